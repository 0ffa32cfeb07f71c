//! Change of parameter that makes per-pair weights linear.
//!
//! Within one support pair the normalized a-weights
//! `|e|²_{X^λ} / Σ_{A}|e'|²_{X^λ}` are rational in `λ`. Writing them in a
//! scaled parameter `λ̃` instead gives the convex combination
//! `(1-λ̃) v0_e + λ̃ v1_e` of the endpoint-normalized weights, and
//! `λ = c1 / (c0 + c1)` with `c0 = (1-λ̃)/sum0`, `c1 = λ̃/sum1` maps back.

use crate::error::{Error, Result};
use crate::geodesic::SupportPair;

use super::Segment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleMap {
    /// `Σ_{e∈A} |e|²_{X0}`
    pub sum0: f64,
    /// `Σ_{e∈A} |e|²_{X1}`
    pub sum1: f64,
}

impl RescaleMap {
    pub fn new(sum0: f64, sum1: f64) -> Result<Self> {
        if !(sum0 > 0.0 && sum1 > 0.0) {
            return Err(Error::Numerical(format!(
                "rescale sums must be positive, got {sum0} and {sum1}"
            )));
        }
        Ok(RescaleMap { sum0, sum1 })
    }

    pub fn c0(&self, scaled: f64) -> f64 {
        (1.0 - scaled) / self.sum0
    }

    pub fn c1(&self, scaled: f64) -> f64 {
        scaled / self.sum1
    }

    /// Scaled parameter to segment parameter.
    pub fn to_lambda(&self, scaled: f64) -> f64 {
        rescale_lambda(self, scaled)
    }

    /// Segment parameter to scaled parameter (the inverse map).
    pub fn to_scaled(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        if lambda >= 1.0 {
            return 1.0;
        }
        lambda * self.sum1 / ((1.0 - lambda) * self.sum0 + lambda * self.sum1)
    }
}

/// `λ = (λ̃/sum1) / ((1-λ̃)/sum0 + λ̃/sum1)`.
pub fn rescale_lambda(map: &RescaleMap, scaled: f64) -> f64 {
    if scaled <= 0.0 {
        return 0.0;
    }
    if scaled >= 1.0 {
        return 1.0;
    }
    let (c0, c1) = (map.c0(scaled), map.c1(scaled));
    c1 / (c0 + c1)
}

/// Normalized a-weights of a pair at both segment ends.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledWeights {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// `d̃_e = |e|²_{X1}/sum1 - |e|²_{X0}/sum0`; sums to zero.
    pub drift: Vec<f64>,
    pub map: RescaleMap,
}

impl ScaledWeights {
    pub fn at(&self, scaled: f64) -> Vec<f64> {
        self.start
            .iter()
            .zip(&self.end)
            .map(|(v0, v1)| (1.0 - scaled) * v0 + scaled * v1)
            .collect()
    }
}

/// Scaled drift of the a-side of `pair` along `seg`.
pub fn scaled_drift(pair: &SupportPair, seg: &Segment) -> Result<ScaledWeights> {
    let sq0: Vec<f64> = pair.a().iter().map(|(s, _)| seg.squared0(s)).collect();
    let sq1: Vec<f64> = pair.a().iter().map(|(s, _)| seg.squared1(s)).collect();
    let map = RescaleMap::new(sq0.iter().sum(), sq1.iter().sum())?;
    let start: Vec<f64> = sq0.iter().map(|v| v / map.sum0).collect();
    let end: Vec<f64> = sq1.iter().map(|v| v / map.sum1).collect();
    let drift = start.iter().zip(&end).map(|(v0, v1)| v1 - v0).collect();
    Ok(ScaledWeights {
        start,
        end,
        drift,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_identity() {
        let m = RescaleMap::new(1.0, 2.0).unwrap();
        assert_eq!(rescale_lambda(&m, 0.0), 0.0);
        assert_eq!(rescale_lambda(&m, 1.0), 1.0);
        let same = RescaleMap::new(3.0, 3.0).unwrap();
        for x in [0.1, 0.25, 0.5, 0.9] {
            assert!((rescale_lambda(&same, x) - x).abs() < 1e-15);
        }
    }

    #[test]
    fn worked_value() {
        let m = RescaleMap::new(1.0, 2.0).unwrap();
        assert!((rescale_lambda(&m, 0.5) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.to_scaled(1.0 / 3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_inverse_pair() {
        let m = RescaleMap::new(0.3, 7.0).unwrap();
        let mut prev = 0.0;
        for i in 1..=1000 {
            let s = i as f64 / 1000.0;
            let l = rescale_lambda(&m, s);
            assert!(l > prev);
            prev = l;
            assert!((m.to_scaled(l) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_sums() {
        assert!(RescaleMap::new(0.0, 1.0).is_err());
    }
}
