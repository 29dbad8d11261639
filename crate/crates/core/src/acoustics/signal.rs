use std::path::Path;

use crate::error::{Error, Result};

pub const MIN_SAMPLE_RATE: u32 = 8000;

/// Mono PCM audio scaled to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate < MIN_SAMPLE_RATE {
            return Err(Error::UnsupportedAudio(format!(
                "sample rate {sample_rate} Hz is below {MIN_SAMPLE_RATE} Hz"
            )));
        }
        Ok(Signal {
            samples,
            sample_rate,
        })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn seconds_to_samples(&self, seconds: f64) -> usize {
        (seconds * self.sample_rate as f64).round() as usize
    }

    /// The samples between two times, clamped to the signal.
    pub fn slice(&self, start: f64, end: f64) -> Signal {
        let a = self.seconds_to_samples(start).min(self.samples.len());
        let b = self.seconds_to_samples(end).clamp(a, self.samples.len());
        Signal {
            samples: self.samples[a..b].to_vec(),
            sample_rate: self.sample_rate,
        }
    }

    pub fn scaled(&self, gain: f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            sample_rate: self.sample_rate,
        }
    }
}

/// Reads a 16-bit PCM WAV file; multi-channel audio is averaged to mono.
pub fn read_wav(path: &Path) -> Result<Signal> {
    let mut reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::UnsupportedAudio(format!("{}: {other}", path.display())),
    })?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedAudio(format!(
            "{}: expected 16-bit PCM, found {:?} {}-bit",
            path.display(),
            spec.sample_format,
            spec.bits_per_sample
        )));
    }
    let channels = spec.channels.max(1) as usize;
    let raw: Vec<i16> = reader
        .samples::<i16>()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::UnsupportedAudio(format!("{}: {e}", path.display())))?;
    let samples = raw
        .chunks(channels)
        .map(|frame| frame.iter().map(|&s| s as f64 / 32768.0).sum::<f64>() / frame.len() as f64)
        .collect();
    Signal::new(samples, spec.sample_rate)
}

/// Writes a mono 16-bit PCM WAV file.
pub fn write_wav(path: &Path, signal: &Signal) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let wrap = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::UnsupportedAudio(other.to_string()),
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(wrap)?;
    for &s in &signal.samples {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        w.write_sample(v).map_err(wrap)?;
    }
    w.finalize().map_err(wrap)
}

/// Frame layout shared by the frame-based extractors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Framing {
    pub frame_samples: usize,
    pub hop_samples: usize,
    pub count: usize,
}

impl Framing {
    pub fn new(signal: &Signal, frame_length: f64, hop: f64) -> Framing {
        let frame_samples = signal.seconds_to_samples(frame_length).max(1);
        let hop_samples = signal.seconds_to_samples(hop).max(1);
        let n = signal.samples.len();
        let count = if n < frame_samples {
            0
        } else {
            1 + (n - frame_samples) / hop_samples
        };
        Framing {
            frame_samples,
            hop_samples,
            count,
        }
    }

    /// Like [`Framing::new`] but fails when fewer than two frames fit.
    pub fn require(signal: &Signal, frame_length: f64, hop: f64) -> Result<Framing> {
        let f = Framing::new(signal, frame_length, hop);
        if f.count < 2 {
            return Err(Error::SignalTooShort {
                samples: signal.samples.len(),
                needed: f.frame_samples + f.hop_samples,
            });
        }
        Ok(f)
    }

    pub fn frame<'a>(&self, samples: &'a [f64], i: usize) -> &'a [f64] {
        let start = i * self.hop_samples;
        &samples[start..start + self.frame_samples]
    }
}
