use super::config::ExtractionConfig;
use super::filter::{band_filter, Band};
use super::signal::{Framing, Signal};
use super::stats::FrameSeries;
use crate::error::Result;

/// Lowest level reported, in dBFS.
pub const DB_FLOOR: f64 = -100.0;

pub fn rms_db(frame: &[f64]) -> f64 {
    let ms = frame.iter().map(|v| v * v).sum::<f64>() / frame.len().max(1) as f64;
    if ms <= 0.0 {
        DB_FLOOR
    } else {
        (10.0 * ms.log10()).max(DB_FLOOR)
    }
}

/// Per-frame RMS level in dBFS, after an optional band split.
pub fn extract_intensity_series(
    signal: &Signal,
    config: &ExtractionConfig,
    band: Band,
) -> Result<FrameSeries> {
    let framing = Framing::require(signal, config.frame_length, config.hop)?;
    let filtered;
    let samples = if band == Band::Full {
        &signal.samples
    } else {
        filtered = band_filter(
            &signal.samples,
            signal.sample_rate,
            band,
            config.band_cutoff,
        );
        &filtered
    };
    let values = (0..framing.count)
        .map(|i| rms_db(framing.frame(samples, i)))
        .collect();
    Ok(FrameSeries {
        values,
        hop: config.hop,
        start_time: config.frame_length / 2.0,
        voiced: None,
    })
}
