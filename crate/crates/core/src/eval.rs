//! Normalization, stratified splitting, decision rules and confusion
//! accounting for the two label schemes.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::synthdata::Dataset;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

/// Per-column standardization fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub means: Vec<f64>,
    /// Columns whose training std is below 1e-12 store 1 (centering only).
    pub stds: Vec<f64>,
}

const MIN_STD: f64 = 1e-12;

pub fn normalize_fit(train: &Matrix) -> Result<Normalizer> {
    let n = train.rows();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let means = train.column_means();
    let mut ss = vec![0.0; train.cols()];
    for r in train.row_iter() {
        for ((s, v), m) in ss.iter_mut().zip(r).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    let stds = ss
        .into_iter()
        .map(|s| {
            let sd = (s / (n - 1) as f64).sqrt();
            if sd < MIN_STD {
                1.0
            } else {
                sd
            }
        })
        .collect();
    Ok(Normalizer { means, stds })
}

pub fn normalize_apply(data: &Matrix, norm: &Normalizer) -> Result<Matrix> {
    if data.cols() != norm.means.len() {
        return Err(Error::DimensionMismatch {
            expected: norm.means.len(),
            got: data.cols(),
        });
    }
    let mut out = data.clone();
    for i in 0..out.rows() {
        for ((v, m), s) in out.row_mut(i).iter_mut().zip(&norm.means).zip(&norm.stds) {
            *v = (*v - m) / s;
        }
    }
    Ok(out)
}

fn pattern_key(labels: &[f64]) -> String {
    labels
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Row indices of a stratified train/test split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified by label pattern, deterministic in `seed`. Each pattern keeps
/// at least one example on both sides.
pub fn split_indices(ds: &Dataset, train_frac: f64, seed: u64) -> Result<SplitIndices> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::InvalidOption(format!(
            "train fraction must lie in (0, 1), got {train_frac}"
        )));
    }
    let mut by_pattern: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, row) in ds.labels.row_iter().enumerate() {
        by_pattern.entry(pattern_key(row)).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (pattern, mut rows) in by_pattern {
        let count = rows.len();
        if count < 2 {
            return Err(Error::CannotStratify { pattern, count });
        }
        rows.shuffle(&mut rng);
        let n_train = ((count as f64 * train_frac).round() as usize).clamp(1, count - 1);
        train.extend_from_slice(&rows[..n_train]);
        test.extend_from_slice(&rows[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

pub fn split(ds: &Dataset, train_frac: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let idx = split_indices(ds, train_frac, seed)?;
    Ok((ds.subset(&idx.train), ds.subset(&idx.test)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Independent binary flag per output (cylinder substructures).
    Multilabel,
    /// One graded severity in {0, 0.5, 1} (gear).
    Graded,
}

impl Task {
    pub fn for_label_dim(l: usize) -> Task {
        if l == 1 {
            Task::Graded
        } else {
            Task::Multilabel
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Multilabel => "multilabel",
            Task::Graded => "graded",
        })
    }
}

/// Nearest of {0, 0.5, 1}; ties go to the larger value.
pub fn snap_severity(y: f64) -> f64 {
    if y < 0.25 {
        0.0
    } else if y < 0.75 {
        0.5
    } else {
        1.0
    }
}

pub fn classify(outputs: &Matrix, task: Task) -> Matrix {
    let mut out = outputs.clone();
    for i in 0..out.rows() {
        for v in out.row_mut(i) {
            *v = match task {
                Task::Multilabel => {
                    if *v >= 0.5 {
                        1.0
                    } else {
                        0.0
                    }
                }
                Task::Graded => snap_severity(*v),
            };
        }
    }
    out
}

/// Decision counts. `wrong_severity` holds graded decisions on faulty
/// examples that detect the fault but at the wrong severity; it is zero for
/// the multilabel task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub wrong_severity: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg + self.wrong_severity
    }

    pub fn correct(&self) -> usize {
        self.true_pos + self.true_neg
    }

    /// Percentage of correct decisions.
    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        100.0 * self.correct() as f64 / self.total() as f64
    }

    pub fn merge(&mut self, o: &ConfusionCounts) {
        self.true_pos += o.true_pos;
        self.true_neg += o.true_neg;
        self.false_pos += o.false_pos;
        self.false_neg += o.false_neg;
        self.wrong_severity += o.wrong_severity;
    }
}

pub fn confusion(pred: &Matrix, truth: &Matrix, task: Task) -> Result<ConfusionCounts> {
    if pred.rows() != truth.rows() || pred.cols() != truth.cols() {
        return Err(Error::DimensionMismatch {
            expected: truth.rows() * truth.cols(),
            got: pred.rows() * pred.cols(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (p, t) in pred.as_slice().iter().zip(truth.as_slice()) {
        let (faulty, flagged) = (*t > 0.0, *p > 0.0);
        match (faulty, flagged) {
            (false, false) => c.true_neg += 1,
            (false, true) => c.false_pos += 1,
            (true, false) => c.false_neg += 1,
            (true, true) => match task {
                Task::Graded if p != t => c.wrong_severity += 1,
                _ => c.true_pos += 1,
            },
        }
    }
    Ok(c)
}
