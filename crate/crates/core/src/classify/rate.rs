use std::fmt;

use serde::{Deserialize, Serialize};

/// Cross-validated accuracy in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionRate {
    pub mean: f64,
    /// Sample standard deviation over folds.
    pub std: f64,
    pub per_fold: Vec<f64>,
}

impl RecognitionRate {
    pub fn from_folds(per_fold: Vec<f64>) -> RecognitionRate {
        let n = per_fold.len();
        if n == 0 {
            return RecognitionRate {
                mean: 0.0,
                std: 0.0,
                per_fold,
            };
        }
        let mean = per_fold.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (per_fold.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        RecognitionRate {
            mean,
            std,
            per_fold,
        }
    }
}

impl fmt::Display for RecognitionRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} ({:.2})", self.mean, self.std)
    }
}
