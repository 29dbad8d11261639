use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a frame of cepstral coefficients collapses into one series value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MfccAggregate {
    /// Mean of c1..c12.
    #[default]
    Mean,
    /// The first cepstral coefficient alone.
    C1,
    /// Euclidean norm of c1..c12.
    L2,
}

/// Analysis parameters. Durations are in seconds, frequencies in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionConfig {
    pub frame_length: f64,
    pub hop: f64,
    pub pitch_frame_length: f64,
    pub pitch_floor: f64,
    pub pitch_ceiling: f64,
    pub voicing_threshold: f64,
    pub band_cutoff: f64,
    pub pre_emphasis: f64,
    pub mel_filters: usize,
    pub cepstral_coefficients: usize,
    pub mfcc_aggregate: MfccAggregate,
    /// LPC order is this plus the sample rate in kHz.
    pub lpc_order_offset: usize,
    pub formant_max_bandwidth: f64,
    pub formant_min_frequency: f64,
    /// Audible frames lie within this many dB of the reference frame energy.
    pub audibility_threshold_db: f64,
    /// Percentile of frame energies used as the audibility reference.
    pub audibility_percentile: f64,
    /// Frames at or below this absolute level (dBFS) are never audible.
    pub silence_floor_db: f64,
    pub min_audible_duration: f64,
    /// Median window applied before locating local extrema; 1 disables it.
    pub extrema_smoothing: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            frame_length: 0.025,
            hop: 0.010,
            pitch_frame_length: 0.040,
            pitch_floor: 60.0,
            pitch_ceiling: 500.0,
            voicing_threshold: 0.45,
            band_cutoff: 250.0,
            pre_emphasis: 0.97,
            mel_filters: 26,
            cepstral_coefficients: 13,
            mfcc_aggregate: MfccAggregate::Mean,
            lpc_order_offset: 2,
            formant_max_bandwidth: 400.0,
            formant_min_frequency: 90.0,
            audibility_threshold_db: 35.0,
            audibility_percentile: 95.0,
            silence_floor_db: -90.0,
            min_audible_duration: 0.200,
            extrema_smoothing: 3,
        }
    }
}

impl ExtractionConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExtractionConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("frame_length", self.frame_length),
            ("hop", self.hop),
            ("pitch_frame_length", self.pitch_frame_length),
            ("pitch_floor", self.pitch_floor),
            ("pitch_ceiling", self.pitch_ceiling),
            ("band_cutoff", self.band_cutoff),
            ("formant_max_bandwidth", self.formant_max_bandwidth),
            ("audibility_threshold_db", self.audibility_threshold_db),
            ("min_audible_duration", self.min_audible_duration),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.pitch_floor >= self.pitch_ceiling {
            return Err(Error::InvalidConfig(
                "pitch_floor must be below pitch_ceiling".into(),
            ));
        }
        if !(self.voicing_threshold > 0.0 && self.voicing_threshold < 1.0) {
            return Err(Error::InvalidConfig(
                "voicing_threshold must lie in (0, 1)".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.pre_emphasis) {
            return Err(Error::InvalidConfig(
                "pre_emphasis must lie in [0, 1)".into(),
            ));
        }
        if !(0.0..=100.0).contains(&self.audibility_percentile) {
            return Err(Error::InvalidConfig(
                "audibility_percentile must lie in [0, 100]".into(),
            ));
        }
        if self.mel_filters < 2 || self.cepstral_coefficients < 2 {
            return Err(Error::InvalidConfig(
                "need at least 2 mel filters and 2 cepstral coefficients".into(),
            ));
        }
        if self.cepstral_coefficients > self.mel_filters {
            return Err(Error::InvalidConfig(
                "cepstral_coefficients cannot exceed mel_filters".into(),
            ));
        }
        if self.extrema_smoothing == 0 || self.extrema_smoothing % 2 == 0 {
            return Err(Error::InvalidConfig("extrema_smoothing must be odd".into()));
        }
        Ok(())
    }

    /// Renders the config in its file format.
    pub fn to_file_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = ExtractionConfig::default();
        c.validate().unwrap();
        assert_eq!(ExtractionConfig::parse(&c.to_file_string()).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = ExtractionConfig::parse("band_cutoff = 300.0\nmfcc_aggregate = \"l2\"\n").unwrap();
        assert_eq!(c.band_cutoff, 300.0);
        assert_eq!(c.mfcc_aggregate, MfccAggregate::L2);
        assert_eq!(c.hop, 0.010);
    }

    #[test]
    fn bad_values_rejected() {
        assert!(ExtractionConfig::parse("pitch_floor = 600.0").is_err());
        assert!(ExtractionConfig::parse("voicing_threshold = 1.5").is_err());
        assert!(ExtractionConfig::parse("no_such_key = 1").is_err());
        assert!(ExtractionConfig::parse("hop = -0.01").is_err());
    }
}
