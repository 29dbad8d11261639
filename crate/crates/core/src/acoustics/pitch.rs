use super::config::ExtractionConfig;
use super::signal::{Framing, Signal};
use super::stats::FrameSeries;
use crate::error::Result;

/// Frames quieter than this RMS are never voiced (about -100 dBFS).
const VOICING_RMS_FLOOR: f64 = 1e-5;

/// Among autocorrelation peaks within this fraction of the best, the
/// shortest lag wins, which suppresses sub-octave picks.
const OCTAVE_TOLERANCE: f64 = 0.9;

/// F0 track by normalized autocorrelation. Unvoiced frames hold 0 and are
/// masked out.
pub fn extract_pitch_series(signal: &Signal, config: &ExtractionConfig) -> Result<FrameSeries> {
    let framing = Framing::require(signal, config.pitch_frame_length, config.hop)?;
    let sr = signal.sample_rate as f64;
    let min_lag = ((sr / config.pitch_ceiling).floor() as usize).max(2);
    let max_lag = ((sr / config.pitch_floor).ceil() as usize).min(framing.frame_samples - 2);

    let mut values = Vec::with_capacity(framing.count);
    let mut voiced = Vec::with_capacity(framing.count);
    let mut frame = vec![0.0; framing.frame_samples];
    for i in 0..framing.count {
        let raw = framing.frame(&signal.samples, i);
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        for (d, s) in frame.iter_mut().zip(raw) {
            *d = s - mean;
        }
        match frame_pitch(&frame, min_lag, max_lag, config.voicing_threshold) {
            Some(lag) => {
                let f0 = (sr / lag).clamp(config.pitch_floor, config.pitch_ceiling);
                values.push(f0);
                voiced.push(true);
            }
            None => {
                values.push(0.0);
                voiced.push(false);
            }
        }
    }
    Ok(FrameSeries {
        values,
        hop: config.hop,
        start_time: config.pitch_frame_length / 2.0,
        voiced: Some(voiced),
    })
}

/// Fractional period in samples, or `None` for an unvoiced frame.
fn frame_pitch(frame: &[f64], min_lag: usize, max_lag: usize, threshold: f64) -> Option<f64> {
    let n = frame.len();
    let energy: f64 = frame.iter().map(|v| v * v).sum();
    if min_lag + 1 >= max_lag || (energy / n as f64).sqrt() < VOICING_RMS_FLOOR {
        return None;
    }
    // prefix[i] = sum of squares of frame[..i]
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in frame {
        prefix.push(prefix.last().unwrap() + v * v);
    }
    let lo = min_lag - 1;
    let hi = max_lag + 1;
    let r: Vec<f64> = (lo..=hi)
        .map(|lag| {
            let cross: f64 = frame[..n - lag]
                .iter()
                .zip(&frame[lag..])
                .map(|(a, b)| a * b)
                .sum();
            let e1 = prefix[n - lag];
            let e2 = prefix[n] - prefix[lag];
            let denom = (e1 * e2).sqrt();
            if denom > 0.0 {
                cross / denom
            } else {
                0.0
            }
        })
        .collect();

    let peaks: Vec<usize> = (1..r.len() - 1)
        .filter(|&j| r[j] > r[j - 1] && r[j] >= r[j + 1])
        .collect();
    let best = peaks
        .iter()
        .map(|&j| r[j])
        .fold(f64::NEG_INFINITY, f64::max);
    if !(best >= threshold) {
        return None;
    }
    let j = *peaks.iter().find(|&&j| r[j] >= OCTAVE_TOLERANCE * best)?;
    let (a, b, c) = (r[j - 1], r[j], r[j + 1]);
    let curvature = a - 2.0 * b + c;
    let offset = if curvature < 0.0 {
        (0.5 * (a - c) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Some((lo + j) as f64 + offset)
}
