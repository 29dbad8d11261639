use super::config::ExtractionConfig;
use super::intensity::rms_db;
use super::signal::{Framing, Signal};
use super::stats::quantile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSpan {
    pub start: f64,
    pub end: f64,
    pub audible: bool,
}

impl SegmentSpan {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Splits the signal into alternating audible and inaudible spans covering
/// `[0, duration]`. A frame is audible when its level is within the
/// configured margin of the loud reference frame and above the absolute
/// floor; audible runs shorter than the minimum duration are reclassified.
pub fn detect_segments(signal: &Signal, config: &ExtractionConfig) -> Vec<SegmentSpan> {
    let total = signal.duration();
    if total <= 0.0 {
        return Vec::new();
    }
    let framing = Framing::new(signal, config.frame_length, config.hop);
    if framing.count == 0 {
        return vec![SegmentSpan {
            start: 0.0,
            end: total,
            audible: false,
        }];
    }
    let levels: Vec<f64> = (0..framing.count)
        .map(|i| rms_db(framing.frame(&signal.samples, i)))
        .collect();
    let mut sorted = levels.clone();
    sorted.sort_by(f64::total_cmp);
    let reference = quantile(&sorted, config.audibility_percentile / 100.0);
    let threshold = (reference - config.audibility_threshold_db).max(config.silence_floor_db);
    let audible: Vec<bool> = levels.iter().map(|&l| l > threshold).collect();

    // Boundary between frames i-1 and i sits halfway between their centres.
    let sr = signal.sample_rate as f64;
    let frame_len = framing.frame_samples as f64 / sr;
    let hop = framing.hop_samples as f64 / sr;
    let boundary = |i: usize| {
        if i == 0 {
            0.0
        } else if i >= framing.count {
            total
        } else {
            ((i as f64 - 0.5) * hop + frame_len / 2.0).clamp(0.0, total)
        }
    };

    let mut runs: Vec<(usize, usize, bool)> = Vec::new();
    for (i, &a) in audible.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if r.2 == a => r.1 = i + 1,
            _ => runs.push((i, i + 1, a)),
        }
    }
    for r in &mut runs {
        if r.2 && boundary(r.1) - boundary(r.0) < config.min_audible_duration {
            r.2 = false;
        }
    }
    let mut spans: Vec<SegmentSpan> = Vec::new();
    for (a, b, aud) in runs {
        let (start, end) = (boundary(a), boundary(b));
        match spans.last_mut() {
            Some(s) if s.audible == aud => s.end = end,
            _ if end > start => spans.push(SegmentSpan {
                start,
                end,
                audible: aud,
            }),
            _ => {}
        }
    }
    spans
}

/// The duration block in catalog order, plus whether any ratio had a zero
/// denominator and was emitted as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationFeatures {
    pub values: [f64; 23],
    pub degenerate: bool,
}

fn moments(d: &[f64]) -> [f64; 4] {
    if d.is_empty() {
        return [0.0; 4];
    }
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let std = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    [mean, max, min, std]
}

/// Durations, counts and ratios of audible and inaudible spans. Frame
/// counts are span durations in units of `hop`.
pub fn extract_duration_features(
    spans: &[SegmentSpan],
    total_duration: f64,
    hop: f64,
) -> DurationFeatures {
    let aud: Vec<f64> = spans
        .iter()
        .filter(|s| s.audible)
        .map(|s| s.duration())
        .collect();
    let inaud: Vec<f64> = spans
        .iter()
        .filter(|s| !s.audible)
        .map(|s| s.duration())
        .collect();
    let frames = |d: &[f64]| d.iter().map(|x| (x / hop).round()).sum::<f64>();
    let (aud_frames, inaud_frames) = (frames(&aud), frames(&inaud));
    let (n_aud, n_inaud) = (aud.len() as f64, inaud.len() as f64);
    let (aud_total, inaud_total) = (aud.iter().sum::<f64>(), inaud.iter().sum::<f64>());
    let am = moments(&aud);
    let im = moments(&inaud);

    let mut degenerate = false;
    let mut ratio = |num: f64, den: f64| {
        if den > 0.0 {
            num / den
        } else {
            degenerate = true;
            0.0
        }
    };
    let ratios = [
        ratio(aud_frames, inaud_frames),
        ratio(n_aud, n_inaud),
        ratio(aud_frames, aud_frames + inaud_frames),
        ratio(n_aud, n_aud + n_inaud),
        ratio(aud_frames, n_aud),
        ratio(aud_total, inaud_total),
        ratio(aud_total, total_duration),
        ratio(inaud_total, total_duration),
        ratio(am[0], im[0]),
    ];
    let mut values = [0.0; 23];
    values[..4].copy_from_slice(&am);
    values[4..8].copy_from_slice(&im);
    values[8] = n_aud;
    values[9] = n_inaud;
    values[10] = aud_frames;
    values[11] = inaud_frames;
    values[12] = am[1];
    values[13] = im[1];
    values[14..].copy_from_slice(&ratios);
    DurationFeatures { values, degenerate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone_silence_tone() -> Signal {
        let sr = 16000;
        let samples = (0..(2.5 * sr as f64) as usize)
            .map(|i| {
                let t = i as f64 / sr as f64;
                if (1.0..1.5).contains(&t) {
                    0.0
                } else {
                    0.5 * (2.0 * PI * 200.0 * t).sin()
                }
            })
            .collect();
        Signal::new(samples, sr).unwrap()
    }

    #[test]
    fn two_tones_two_audible_spans() {
        let spans = detect_segments(&tone_silence_tone(), &ExtractionConfig::default());
        let aud: Vec<_> = spans.iter().filter(|s| s.audible).collect();
        assert_eq!(aud.len(), 2);
        assert_eq!(spans.len(), 3);
        for s in &aud {
            assert!((s.duration() - 1.0).abs() <= 0.025, "{s:?}");
        }
        assert!((spans[1].duration() - 0.5).abs() <= 0.025);
        assert_eq!(spans[0].start, 0.0);
        assert!((spans[2].end - 2.5).abs() < 1e-12);
        for w in spans.windows(2) {
            assert_eq!(w[0].end, w[1].start);
            assert_ne!(w[0].audible, w[1].audible);
        }
    }

    #[test]
    fn silence_and_pure_tone() {
        let cfg = ExtractionConfig::default();
        let silence = detect_segments(&Signal::new(vec![0.0; 16000], 16000).unwrap(), &cfg);
        assert_eq!(silence.len(), 1);
        assert!(!silence[0].audible);
        let tone = Signal::new(
            (0..16000).map(|i| 0.3 * (i as f64 * 0.1).sin()).collect(),
            16000,
        )
        .unwrap();
        let spans = detect_segments(&tone, &cfg);
        assert_eq!(spans.len(), 1);
        assert!(spans[0].audible);
        assert_eq!((spans[0].start, spans[0].end), (0.0, 1.0));
    }

    #[test]
    fn short_bursts_are_inaudible() {
        let sr = 16000;
        let samples = (0..sr)
            .map(|i| if (8000..9000).contains(&i) { 0.5 } else { 0.0 })
            .collect();
        let spans = detect_segments(
            &Signal::new(samples, sr as u32).unwrap(),
            &ExtractionConfig::default(),
        );
        assert!(spans.iter().all(|s| !s.audible));
        assert_eq!(spans.len(), 1);
    }

    #[test]
    fn duration_block() {
        let spans = [
            SegmentSpan {
                start: 0.0,
                end: 1.0,
                audible: true,
            },
            SegmentSpan {
                start: 1.0,
                end: 1.5,
                audible: false,
            },
            SegmentSpan {
                start: 1.5,
                end: 2.5,
                audible: true,
            },
        ];
        let d = extract_duration_features(&spans, 2.5, 0.01);
        assert_eq!(d.values.len(), 23);
        assert!((d.values[19] - 4.0).abs() < 1e-12);
        assert_eq!(&d.values[..4], &[1.0, 1.0, 1.0, 0.0]);
        assert_eq!((d.values[8], d.values[9]), (2.0, 1.0));
        assert_eq!((d.values[10], d.values[11]), (200.0, 50.0));
        assert!(!d.degenerate);

        let one = [SegmentSpan {
            start: 0.0,
            end: 0.7,
            audible: true,
        }];
        let d = extract_duration_features(&one, 0.7, 0.01);
        assert_eq!(&d.values[..4], &[0.7, 0.7, 0.7, 0.0]);
        assert!(d.degenerate);
        assert!(d.values.iter().all(|v| v.is_finite()));
    }
}
