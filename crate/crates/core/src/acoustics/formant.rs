use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::config::ExtractionConfig;
use super::pitch::extract_pitch_series;
use super::signal::{Framing, Signal};
use crate::error::{Error, Result};

/// Per-frame F1 < F2 < F3 in Hz.
pub type FormantFrame = [f64; 3];

/// Levinson-Durbin recursion. Returns `a` with `a[0] = 1` such that the
/// prediction error filter is `sum a[k] z^-k`.
pub fn lpc(autocorr: &[f64], order: usize) -> Option<Vec<f64>> {
    if autocorr[0] <= 0.0 {
        return None;
    }
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut err = autocorr[0];
    for i in 1..=order {
        let acc: f64 = (1..i).map(|j| a[j] * autocorr[i - j]).sum::<f64>() + autocorr[i];
        let k = -acc / err;
        let prev = a.clone();
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        if err <= 0.0 {
            return None;
        }
    }
    Some(a)
}

/// Resonances of an all-pole model as (frequency Hz, bandwidth Hz), from
/// the eigenvalues of the companion matrix.
pub fn resonances(a: &[f64], sample_rate: f64) -> Vec<(f64, f64)> {
    let p = a.len() - 1;
    if p == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::<f64>::zeros(p, p);
    for j in 0..p {
        companion[(0, j)] = -a[j + 1];
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im > 0.0)
        .map(|z| {
            let freq = z.im.atan2(z.re) * sample_rate / (2.0 * PI);
            let bw = -z.norm().ln() * sample_rate / PI;
            (freq, bw)
        })
        .collect()
}

/// F1..F3 for every voiced frame that yields three admissible resonances.
pub fn formant_track(signal: &Signal, config: &ExtractionConfig) -> Result<Vec<FormantFrame>> {
    let pitch = extract_pitch_series(signal, config)?;
    let voiced = pitch.voiced.expect("pitch series carries a voicing mask");
    let framing = Framing::require(signal, config.pitch_frame_length, config.hop)?;
    let sr = signal.sample_rate as f64;
    let order = config.lpc_order_offset + (signal.sample_rate as usize).div_ceil(1000);
    let n = framing.frame_samples;
    let window: Vec<f64> = (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1).max(1) as f64).cos())
        .collect();

    let mut track = Vec::new();
    let mut x = vec![0.0; n];
    for (i, &is_voiced) in voiced.iter().enumerate().take(framing.count) {
        if !is_voiced {
            continue;
        }
        let frame = framing.frame(&signal.samples, i);
        for j in 0..n {
            let prev = if j > 0 { frame[j - 1] } else { 0.0 };
            x[j] = (frame[j] - config.pre_emphasis * prev) * window[j];
        }
        let r: Vec<f64> = (0..=order)
            .map(|lag| x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum())
            .collect();
        let Some(a) = lpc(&r, order) else { continue };
        let mut freqs: Vec<f64> = resonances(&a, sr)
            .into_iter()
            .filter(|&(f, bw)| {
                f > config.formant_min_frequency
                    && f < sr / 2.0 - 50.0
                    && bw < config.formant_max_bandwidth
            })
            .map(|(f, _)| f)
            .collect();
        if freqs.len() < 3 {
            continue;
        }
        freqs.sort_by(f64::total_cmp);
        track.push([freqs[0], freqs[1], freqs[2]]);
    }
    if track.is_empty() {
        return Err(Error::NoVoicedFrames);
    }
    Ok(track)
}

/// Mean, std, max, min and range of each formant, grouped by statistic.
pub fn extract_formants(signal: &Signal, config: &ExtractionConfig) -> Result<[f64; 15]> {
    let track = formant_track(signal, config)?;
    let n = track.len() as f64;
    let mut out = [0.0; 15];
    for f in 0..3 {
        let col: Vec<f64> = track.iter().map(|t| t[f]).collect();
        let mean = col.iter().sum::<f64>() / n;
        let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
        out[f] = mean;
        out[3 + f] = std;
        out[6 + f] = max;
        out[9 + f] = min;
        out[12 + f] = max - min;
    }
    Ok(out)
}
