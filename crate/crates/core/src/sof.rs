//! Statistical overlap factor: per-index separation between the healthy and
//! damaged populations, used to pre-select the most separating indices.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use std::cmp::Ordering;

/// Number of indices kept by default.
pub const DEFAULT_SOF_K: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionStats {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl DistributionStats {
    /// Mean and sample standard deviation ((n-1) denominator, 0 for n = 1).
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let count = samples.len();
        if count == 0 {
            return Err(Error::InvalidStats("empty sample".into()));
        }
        let mean = samples.iter().sum::<f64>() / count as f64;
        let std = if count >= 2 {
            let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(DistributionStats { mean, std, count })
    }
}

/// |mean_a - mean_b| / ((std_a + std_b) / 2).
///
/// Zero spread gives +inf when the means differ and 0 when they coincide.
pub fn sof_score(a: DistributionStats, b: DistributionStats) -> Result<f64> {
    let vals = [a.mean, a.std, b.mean, b.std];
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidStats("NaN in distribution stats".into()));
    }
    if vals.iter().any(|v| v.is_infinite()) {
        return Err(Error::InvalidStats("infinite distribution stats".into()));
    }
    let diff = (a.mean - b.mean).abs();
    let spread = (a.std + b.std) / 2.0;
    if spread == 0.0 {
        return Ok(if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(diff / spread)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SofRanking {
    /// One score per column.
    pub scores: Vec<f64>,
    /// Top-k columns, best first.
    pub selected: Vec<usize>,
}

/// Scores every column of the two populations and keeps the k best.
///
/// Ties (including among infinite scores) go to the lower column index.
pub fn rank_by_sof(healthy: &Matrix, damaged: &Matrix, k: usize) -> Result<SofRanking> {
    let d = healthy.cols();
    if damaged.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: damaged.cols(),
        });
    }
    if k > d {
        return Err(Error::KExceedsDimension { k, dim: d });
    }
    for (m, _name) in [(healthy, "healthy"), (damaged, "damaged")] {
        if m.rows() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: m.rows(),
            });
        }
    }
    let scores = (0..d)
        .map(|j| {
            let a = DistributionStats::from_samples(&healthy.column(j))?;
            let b = DistributionStats::from_samples(&damaged.column(j))?;
            sof_score(a, b)
        })
        .collect::<Result<Vec<f64>>>()?;
    let order = descending_order(&scores);
    Ok(SofRanking {
        selected: order[..k].to_vec(),
        scores,
    })
}

/// Indices sorted by descending score, lower index first on ties.
pub(crate) fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| match scores[j].partial_cmp(&scores[i]) {
        Some(Ordering::Equal) | None => i.cmp(&j),
        Some(o) => o,
    });
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(mean: f64, std: f64) -> DistributionStats {
        DistributionStats {
            mean,
            std,
            count: 10,
        }
    }

    #[test]
    fn score_examples() {
        assert_eq!(sof_score(stats(2.0, 1.0), stats(1.0, 1.0)).unwrap(), 1.0);
        assert_eq!(sof_score(stats(1.0, 1.0), stats(1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(sof_score(stats(0.0, 1.0), stats(3.0, 2.0)).unwrap(), 2.0);
    }

    #[test]
    fn zero_spread_cases() {
        assert_eq!(sof_score(stats(1.0, 0.0), stats(2.0, 0.0)).unwrap(), f64::INFINITY);
        assert_eq!(sof_score(stats(1.0, 0.0), stats(1.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn nan_rejected() {
        let err = sof_score(stats(f64::NAN, 1.0), stats(0.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("invalid stats"));
    }

    #[test]
    fn single_sample_std_is_zero() {
        let s = DistributionStats::from_samples(&[4.0]).unwrap();
        assert_eq!((s.mean, s.std, s.count), (4.0, 0.0, 1));
    }

    #[test]
    fn only_differing_column_wins() {
        let healthy = Matrix::from_rows(&[[0.0, 1.0, 2.0], [1.0, 2.0, 3.0], [2.0, 3.0, 4.0]]).unwrap();
        let damaged = Matrix::from_rows(&[[5.0, 1.0, 2.0], [6.0, 2.0, 3.0], [7.0, 3.0, 4.0]]).unwrap();
        let r = rank_by_sof(&healthy, &damaged, 1).unwrap();
        assert_eq!(r.selected, vec![0]);
        assert_eq!(&r.scores[1..], &[0.0, 0.0]);
    }

    #[test]
    fn identical_populations_fall_back_to_index_order() {
        let m = Matrix::from_rows(&[[0.0, 1.0, 2.0, 3.0], [1.0, 0.0, 5.0, 1.0]]).unwrap();
        let r = rank_by_sof(&m, &m, 3).unwrap();
        assert!(r.scores.iter().all(|&s| s == 0.0));
        assert_eq!(r.selected, vec![0, 1, 2]);
    }

    #[test]
    fn infinite_scores_rank_first() {
        let healthy = Matrix::from_rows(&[[0.0, 0.0, 0.0], [1.0, 0.0, 1.0]]).unwrap();
        let damaged = Matrix::from_rows(&[[5.0, 1.0, 0.0], [6.0, 1.0, 1.0]]).unwrap();
        let r = rank_by_sof(&healthy, &damaged, 3).unwrap();
        assert_eq!(r.selected, vec![1, 0, 2]);
    }

    #[test]
    fn k_too_large() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let err = rank_by_sof(&m, &m, 3).unwrap_err();
        assert!(err.to_string().contains("k exceeds dimension"));
    }
}
