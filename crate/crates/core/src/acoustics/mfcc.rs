use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::config::{ExtractionConfig, MfccAggregate};
use super::signal::{Framing, Signal};
use super::stats::FrameSeries;
use crate::error::Result;

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters evenly spaced on the mel scale from 0 Hz to Nyquist,
/// as weights over the `fft_len / 2 + 1` power bins.
fn mel_filterbank(filters: usize, fft_len: usize, sample_rate: f64) -> Vec<Vec<f64>> {
    let bins = fft_len / 2 + 1;
    let top = hz_to_mel(sample_rate / 2.0);
    let edges: Vec<f64> = (0..filters + 2)
        .map(|i| mel_to_hz(top * i as f64 / (filters + 1) as f64))
        .collect();
    (0..filters)
        .map(|m| {
            let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..bins)
                .map(|b| {
                    let f = b as f64 * sample_rate / fft_len as f64;
                    if f > lo && f <= mid {
                        (f - lo) / (mid - lo)
                    } else if f > mid && f < hi {
                        (hi - f) / (hi - mid)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Cepstral coefficients of every frame, c0 first.
pub fn mfcc_frames(signal: &Signal, config: &ExtractionConfig) -> Result<Vec<Vec<f64>>> {
    let framing = Framing::require(signal, config.frame_length, config.hop)?;
    let mut emphasized = Vec::with_capacity(signal.samples.len());
    let mut prev = 0.0;
    for &s in &signal.samples {
        emphasized.push(s - config.pre_emphasis * prev);
        prev = s;
    }
    let n = framing.frame_samples;
    let fft_len = n.next_power_of_two();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_len);
    let window: Vec<f64> = (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1).max(1) as f64).cos())
        .collect();
    let bank = mel_filterbank(config.mel_filters, fft_len, signal.sample_rate as f64);
    let m = config.mel_filters;
    let dct: Vec<Vec<f64>> = (0..config.cepstral_coefficients)
        .map(|k| {
            (0..m)
                .map(|j| (PI * k as f64 * (j as f64 + 0.5) / m as f64).cos())
                .collect()
        })
        .collect();

    let mut buf = vec![Complex::new(0.0, 0.0); fft_len];
    let mut out = Vec::with_capacity(framing.count);
    for i in 0..framing.count {
        let frame = framing.frame(&emphasized, i);
        for (j, c) in buf.iter_mut().enumerate() {
            *c = Complex::new(if j < n { frame[j] * window[j] } else { 0.0 }, 0.0);
        }
        fft.process(&mut buf);
        let power: Vec<f64> = buf[..fft_len / 2 + 1]
            .iter()
            .map(|c| c.norm_sqr())
            .collect();
        let log_energy: Vec<f64> = bank
            .iter()
            .map(|w| {
                let e: f64 = w.iter().zip(&power).map(|(a, b)| a * b).sum();
                e.max(1e-10).ln()
            })
            .collect();
        out.push(
            dct.iter()
                .map(|basis| basis.iter().zip(&log_energy).map(|(a, b)| a * b).sum())
                .collect(),
        );
    }
    Ok(out)
}

/// One scalar per frame, collapsing c1 onward with the configured aggregate.
pub fn extract_mfcc_series(signal: &Signal, config: &ExtractionConfig) -> Result<FrameSeries> {
    let values = mfcc_frames(signal, config)?
        .into_iter()
        .map(|c| {
            let rest = &c[1..];
            match config.mfcc_aggregate {
                MfccAggregate::Mean => rest.iter().sum::<f64>() / rest.len() as f64,
                MfccAggregate::C1 => rest[0],
                MfccAggregate::L2 => rest.iter().map(|v| v * v).sum::<f64>().sqrt(),
            }
        })
        .collect();
    Ok(FrameSeries {
        values,
        hop: config.hop,
        start_time: config.frame_length / 2.0,
        voiced: None,
    })
}
