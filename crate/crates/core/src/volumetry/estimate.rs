use serde::Serialize;

use crate::ensembles::SeedSpec;
use crate::error::{Error, Result};

/// Sample mean with its standard error and a full echo of how it was drawn.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    /// Sample standard deviation over `√n`.
    pub stderr: f64,
    pub n: usize,
    pub seed: SeedSpec,
    pub params: serde_json::Value,
}

impl MonteCarloEstimate {
    /// Mean and standard error of `samples`, summed in index order.
    pub fn from_samples(samples: &[f64], seed: SeedSpec, params: serde_json::Value) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::Config(format!("need at least 2 samples, got {n}")));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Ok(Self { value: mean, stderr: (var / n as f64).sqrt(), n, seed, params })
    }

    /// `|value - target|` in units of the standard error (0 if both vanish).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr() {
        let e = MonteCarloEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], SeedSpec::new(0, 0), serde_json::Value::Null)
            .unwrap();
        assert_eq!(e.value, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn needs_two_samples() {
        assert!(MonteCarloEstimate::from_samples(&[1.0], SeedSpec::new(0, 0), serde_json::Value::Null).is_err());
    }
}
