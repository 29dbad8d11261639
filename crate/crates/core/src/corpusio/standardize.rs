use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

/// Deviations below this count as a constant feature.
pub const SCALE_FLOOR: f64 = 1e-8;

/// Per-feature z-scoring fitted on training rows only.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Fits population mean and standard deviation per column. Constant
    /// columns get unit scale so they map to 0 without amplifying unseen
    /// test values.
    pub fn fit<'a, I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
        I::IntoIter: Clone,
    {
        let rows = rows.into_iter();
        let mut n = 0usize;
        let mut mean: Vec<f64> = Vec::new();
        for row in rows.clone() {
            if mean.is_empty() {
                mean = vec![0.0; row.len()];
            }
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
            n += 1;
        }
        if n == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut var = vec![0.0; mean.len()];
        for row in rows {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n as f64).sqrt();
                if sd < SCALE_FLOOR {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Ok(Standardizer { mean, scale })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn transform_value(&self, column: usize, v: f64) -> f64 {
        (v - self.mean[column]) / self.scale[column]
    }

    pub fn inverse(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((z, m), s)| z * s + m)
            .collect()
    }
}

/// Fits on `train_rows` and transforms every row of the matrix.
pub fn fit_apply_standardizer(
    matrix: &FeatureMatrix,
    train_rows: &[usize],
) -> Result<FeatureMatrix> {
    let std = Standardizer::fit(train_rows.iter().map(|&r| matrix.rows[r].values.as_slice()))?;
    let mut out = matrix.clone();
    for row in &mut out.rows {
        row.values = std.transform(&row.values);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_points_map_to_unit() {
        let rows = [vec![1.0], vec![3.0]];
        let s = Standardizer::fit(rows.iter().map(|r| r.as_slice())).unwrap();
        assert_eq!(s.transform(&rows[0]), vec![-1.0]);
        assert_eq!(s.transform(&rows[1]), vec![1.0]);
    }

    #[test]
    fn constant_maps_to_zero() {
        let rows = [vec![5.0], vec![5.0], vec![5.0]];
        let s = Standardizer::fit(rows.iter().map(|r| r.as_slice())).unwrap();
        for r in &rows {
            assert_eq!(s.transform(r), vec![0.0]);
        }
        assert!(s.scale[0] > 0.0);
    }

    #[test]
    fn empty_train_rejected() {
        let rows: [Vec<f64>; 0] = [];
        assert!(matches!(
            Standardizer::fit(rows.iter().map(|r| r.as_slice())),
            Err(Error::EmptyTrainingSet)
        ));
    }

    proptest! {
        #[test]
        fn train_moments_and_inverse(
            data in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..40)
        ) {
            let s = Standardizer::fit(data.iter().map(|r| r.as_slice())).unwrap();
            let z: Vec<Vec<f64>> = data.iter().map(|r| s.transform(r)).collect();
            for c in 0..3 {
                let n = z.len() as f64;
                let m: f64 = z.iter().map(|r| r[c]).sum::<f64>() / n;
                prop_assert!(m.abs() < 1e-9);
                let constant = s.scale[c] == 1.0
                    && data.iter().all(|r| (r[c] - data[0][c]).abs() < 1e-6);
                if !constant {
                    let v: f64 = z.iter().map(|r| (r[c] - m).powi(2)).sum::<f64>() / n;
                    prop_assert!((v.sqrt() - 1.0).abs() < 1e-9);
                }
            }
            for (r, zr) in data.iter().zip(&z) {
                for (a, b) in r.iter().zip(s.inverse(zr)) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }
}
