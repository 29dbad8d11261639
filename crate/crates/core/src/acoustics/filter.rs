//! Fourth-order Butterworth band split built from two cascaded biquads.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Full,
    LowPass,
    HighPass,
}

#[derive(Debug, Clone, Copy)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    fn new(band: Band, cutoff: f64, sample_rate: f64, q: f64) -> Biquad {
        let w0 = 2.0 * PI * cutoff / sample_rate;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        let a0 = 1.0 + alpha;
        let (b0, b1, b2) = match band {
            Band::LowPass => ((1.0 - cos) / 2.0, 1.0 - cos, (1.0 - cos) / 2.0),
            Band::HighPass => ((1.0 + cos) / 2.0, -(1.0 + cos), (1.0 + cos) / 2.0),
            Band::Full => (a0, 0.0, 0.0),
        };
        Biquad {
            b0: b0 / a0,
            b1: b1 / a0,
            b2: b2 / a0,
            a1: -2.0 * cos / a0,
            a2: (1.0 - alpha) / a0,
        }
    }

    fn run(&self, input: &[f64]) -> Vec<f64> {
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        input
            .iter()
            .map(|&x| {
                let y = self.b0 * x + self.b1 * x1 + self.b2 * x2 - self.a1 * y1 - self.a2 * y2;
                x2 = x1;
                x1 = x;
                y2 = y1;
                y1 = y;
                y
            })
            .collect()
    }
}

/// Pole-pair quality factors of a 4th-order Butterworth prototype.
const BUTTERWORTH4_Q: [f64; 2] = [0.541_196_100_146_197, 1.306_562_964_876_376_7];

/// Filters `samples` with a causal 4th-order Butterworth section.
pub fn band_filter(samples: &[f64], sample_rate: u32, band: Band, cutoff: f64) -> Vec<f64> {
    if band == Band::Full {
        return samples.to_vec();
    }
    let nyquist = sample_rate as f64 / 2.0;
    let cutoff = cutoff.min(nyquist * 0.99);
    BUTTERWORTH4_Q.iter().fold(samples.to_vec(), |acc, &q| {
        Biquad::new(band, cutoff, sample_rate as f64, q).run(&acc)
    })
}
