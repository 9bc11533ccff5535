//! Principal component reduction onto the top-k covariance eigenvectors.

use crate::error::{Error, Result};
use crate::linalg::{covariance, sym_eig, Matrix};
use std::fmt::Write as _;

/// Reduction sizes used throughout the comparison tables.
pub const DEFAULT_K_LIST: [usize; 4] = [10, 7, 5, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// Training column means.
    pub means: Vec<f64>,
    /// D×k, column c is the c-th principal direction.
    pub components: Matrix,
    /// Descending.
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.means.len()
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The same model restricted to its leading `k` components.
    pub fn truncate(&self, k: usize) -> Result<PcaModel> {
        if k == 0 || k > self.k() {
            return Err(Error::InvalidK { k, max: self.k() });
        }
        let keep: Vec<usize> = (0..k).collect();
        Ok(PcaModel {
            means: self.means.clone(),
            components: self.components.select_columns(&keep)?,
            eigenvalues: self.eigenvalues[..k].to_vec(),
        })
    }

    /// Flat CSV: a `#pca,D,k` header, the means row, the eigenvalue row,
    /// then one row of D loadings per component.
    pub fn to_csv(&self) -> String {
        let mut out = format!("#pca,{},{}\n", self.input_dim(), self.k());
        out.push_str(&join(&self.means));
        out.push('\n');
        out.push_str(&join(&self.eigenvalues));
        out.push('\n');
        for c in 0..self.k() {
            out.push_str(&join(&self.components.column(c)));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<PcaModel> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty model file".into(),
        })?;
        let fields: Vec<&str> = header.trim().split(',').collect();
        if fields.len() != 3 || fields[0] != "#pca" {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header `#pca,D,k`".into(),
            });
        }
        let parse_usize = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("bad integer `{s}`"),
            })
        };
        let d = parse_usize(fields[1])?;
        let k = parse_usize(fields[2])?;
        let mut row = |expected: usize| -> Result<Vec<f64>> {
            let (i, l) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: "unexpected end of model file".into(),
            })?;
            crate::synthdata::parse_row(l, i + 1, expected)
        };
        let means = row(d)?;
        let eigenvalues = row(k)?;
        let mut components = Matrix::zeros(d, k);
        for c in 0..k {
            for (r, v) in row(d)?.into_iter().enumerate() {
                components[(r, c)] = v;
            }
        }
        Ok(PcaModel {
            means,
            components,
            eigenvalues,
        })
    }
}

fn join(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{v:e}").unwrap();
    }
    s
}

/// Fits the top-k principal directions of `data`.
pub fn fit_pca(data: &Matrix, k: usize) -> Result<PcaModel> {
    let (n, d) = (data.rows(), data.cols());
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let max = (n - 1).min(d);
    if k == 0 || k > max {
        return Err(Error::InvalidK { k, max });
    }
    let cov = covariance(data)?;
    let eig = sym_eig(&cov)?;
    let keep: Vec<usize> = (0..k).collect();
    Ok(PcaModel {
        means: data.column_means(),
        components: eig.vectors.select_columns(&keep)?,
        eigenvalues: eig.values[..k].to_vec(),
    })
}

/// (data - training means) · components.
pub fn project(model: &PcaModel, data: &Matrix) -> Result<Matrix> {
    let d = model.input_dim();
    if data.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: data.cols(),
        });
    }
    let mut centered = data.clone();
    for i in 0..centered.rows() {
        for (v, m) in centered.row_mut(i).iter_mut().zip(&model.means) {
            *v -= m;
        }
    }
    centered.matmul(&model.components)
}
