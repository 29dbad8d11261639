//! Four-group statistics over a frame series: its local minima, its local
//! maxima, the time between consecutive extrema, and the series itself.
//!
//! Extrema are located on the run-length-compressed series (plateaus count
//! once, at their first frame). Interior points are extrema when strictly
//! below (above) both neighbours; an endpoint is an extremum when strictly
//! below (above) its single neighbour.

/// A per-frame contour. When `voiced` is present only voiced frames enter
/// the statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    pub values: Vec<f64>,
    /// Seconds between frames.
    pub hop: f64,
    /// Centre time of the first frame, seconds.
    pub start_time: f64,
    pub voiced: Option<Vec<bool>>,
}

impl FrameSeries {
    pub fn new(values: Vec<f64>, hop: f64) -> Self {
        FrameSeries {
            values,
            hop,
            start_time: 0.0,
            voiced: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn voiced_count(&self) -> usize {
        match &self.voiced {
            Some(mask) => mask.iter().filter(|&&v| v).count(),
            None => self.values.len(),
        }
    }

    /// (frame index, value) of every frame that counts.
    fn active(&self) -> Vec<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.voiced.as_ref().map_or(true, |m| m[*i]))
            .map(|(i, &v)| (i, v))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PitchExtras {
    pub skewness: f64,
    pub fraction_above_mean: f64,
    pub range_above_mean: f64,
    pub range_below_mean: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SeriesStats {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub range: f64,
    pub var: f64,
    pub med: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    /// Mean absolute first difference between consecutive elements.
    pub mean_abs_derivative: f64,
    pub extras: Option<PitchExtras>,
}

impl SeriesStats {
    /// Statistics of `values`; all zero for an empty input.
    pub fn of(values: &[f64], extended: bool) -> SeriesStats {
        if values.is_empty() {
            return SeriesStats {
                extras: extended.then(PitchExtras::default),
                ..Default::default()
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let min = sorted[0];
        let max = sorted[sorted.len() - 1];
        let q1 = quantile(&sorted, 0.25);
        let med = quantile(&sorted, 0.5);
        let q3 = quantile(&sorted, 0.75);
        let mean_abs_derivative = if values.len() < 2 {
            0.0
        } else {
            values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (n - 1.0)
        };
        let extras = extended.then(|| {
            let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
            let skewness = if var > 1e-20 { m3 / var.powf(1.5) } else { 0.0 };
            PitchExtras {
                skewness,
                fraction_above_mean: values.iter().filter(|&&v| v > mean).count() as f64 / n,
                range_above_mean: max - mean,
                range_below_mean: mean - min,
            }
        });
        SeriesStats {
            mean,
            max,
            min,
            range: max - min,
            var,
            med,
            q1,
            q3,
            iqr: q3 - q1,
            mean_abs_derivative,
            extras,
        }
    }

    /// Values in catalog order: ten base statistics, then the four extras
    /// when present.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![
            self.mean,
            self.max,
            self.min,
            self.range,
            self.var,
            self.med,
            self.q1,
            self.q3,
            self.iqr,
            self.mean_abs_derivative,
        ];
        if let Some(e) = self.extras {
            v.extend([
                e.skewness,
                e.fraction_above_mean,
                e.range_above_mean,
                e.range_below_mean,
            ]);
        }
        v
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub minima: SeriesStats,
    pub maxima: SeriesStats,
    pub extrema_durations: SeriesStats,
    pub series: SeriesStats,
    /// Set when a group fell back to a default (no extrema, empty series).
    pub degenerate: bool,
}

impl SeriesSummary {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.minima.to_vec();
        v.extend(self.maxima.to_vec());
        v.extend(self.extrema_durations.to_vec());
        v.extend(self.series.to_vec());
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

/// Positions (into `values`) and kinds of local extrema.
pub fn local_extrema(values: &[f64]) -> Vec<(usize, ExtremumKind)> {
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if runs.last().map_or(true, |&(_, last)| last != v) {
            runs.push((i, v));
        }
    }
    if runs.len() < 2 {
        return Vec::new();
    }
    let last = runs.len() - 1;
    let mut out = Vec::new();
    for (k, &(pos, v)) in runs.iter().enumerate() {
        let left = (k > 0).then(|| runs[k - 1].1);
        let right = (k < last).then(|| runs[k + 1].1);
        let below = left.map_or(true, |l| v < l) && right.map_or(true, |r| v < r);
        let above = left.map_or(true, |l| v > l) && right.map_or(true, |r| v > r);
        if below {
            out.push((pos, ExtremumKind::Minimum));
        } else if above {
            out.push((pos, ExtremumKind::Maximum));
        }
    }
    out
}

/// Running median with an odd window; edges use a shrunken window.
pub fn median_smooth(values: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 || values.len() < 3 {
        return values.to_vec();
    }
    let half = window / 2;
    (0..values.len())
        .map(|i| {
            let reach = half.min(i).min(values.len() - 1 - i);
            let mut w = values[i - reach..=i + reach].to_vec();
            w.sort_by(f64::total_cmp);
            w[w.len() / 2]
        })
        .collect()
}

pub fn series_statistics(series: &FrameSeries, extended: bool) -> SeriesSummary {
    series_statistics_smoothed(series, extended, 1)
}

/// As [`series_statistics`], locating extrema on a median-smoothed copy of
/// the active frames. The "series itself" group always uses raw values.
pub fn series_statistics_smoothed(
    series: &FrameSeries,
    extended: bool,
    smoothing: usize,
) -> SeriesSummary {
    let active = series.active();
    let raw: Vec<f64> = active.iter().map(|&(_, v)| v).collect();
    let smoothed = median_smooth(&raw, smoothing);
    let extrema = local_extrema(&smoothed);

    let minima: Vec<f64> = extrema
        .iter()
        .filter(|(_, k)| *k == ExtremumKind::Minimum)
        .map(|&(p, _)| smoothed[p])
        .collect();
    let maxima: Vec<f64> = extrema
        .iter()
        .filter(|(_, k)| *k == ExtremumKind::Maximum)
        .map(|&(p, _)| smoothed[p])
        .collect();
    let mut degenerate = raw.is_empty() || minima.is_empty() || maxima.is_empty();
    let durations: Vec<f64> = if extrema.len() < 2 {
        degenerate = true;
        vec![series.values.len() as f64 * series.hop]
    } else {
        extrema
            .windows(2)
            .map(|w| (active[w[1].0].0 - active[w[0].0].0) as f64 * series.hop)
            .collect()
    };
    SeriesSummary {
        minima: SeriesStats::of(&minima, false),
        maxima: SeriesStats::of(&maxima, false),
        extrema_durations: SeriesStats::of(&durations, false),
        series: SeriesStats::of(&raw, extended),
        degenerate,
    }
}
