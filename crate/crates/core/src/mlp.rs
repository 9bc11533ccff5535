//! Two-layer perceptron with grouped parameters.
//!
//! Parameters live in one flat vector, ordered
//! `[w1 (input-major) | b1 | w2 (hidden-major) | b2]`, so the weights leaving
//! input `c` form the contiguous block `c*n_hidden .. (c+1)*n_hidden`. Group
//! `c < n_in` is that block; the last three groups are the hidden biases, the
//! second-layer weights and the output biases.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// Sigmoid outputs with cross-entropy error.
    Logistic,
    /// Identity outputs with half sum-of-squares error.
    Linear,
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputKind::Logistic => "logistic",
            OutputKind::Linear => "linear",
        })
    }
}

impl FromStr for OutputKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(OutputKind::Logistic),
            "linear" => Ok(OutputKind::Linear),
            other => Err(Error::InvalidOption(format!("unknown output kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_in: usize,
    pub n_hidden: usize,
    pub n_out: usize,
    pub output_kind: OutputKind,
}

pub const DEFAULT_HIDDEN: usize = 8;

impl Layout {
    pub fn new(n_in: usize, n_hidden: usize, n_out: usize, output_kind: OutputKind) -> Result<Self> {
        if n_in == 0 || n_hidden == 0 || n_out == 0 {
            return Err(Error::InvalidOption(format!(
                "layout sizes must be positive, got ({n_in}, {n_hidden}, {n_out})"
            )));
        }
        Ok(Layout {
            n_in,
            n_hidden,
            n_out,
            output_kind,
        })
    }

    pub fn param_count(&self) -> usize {
        self.n_in * self.n_hidden + self.n_hidden + self.n_hidden * self.n_out + self.n_out
    }

    pub fn group_count(&self) -> usize {
        self.n_in + 3
    }

    fn b1_offset(&self) -> usize {
        self.n_in * self.n_hidden
    }

    fn w2_offset(&self) -> usize {
        self.b1_offset() + self.n_hidden
    }

    fn b2_offset(&self) -> usize {
        self.w2_offset() + self.n_hidden * self.n_out
    }

    /// Parameter index ranges of every group, input groups first.
    pub fn groups(&self) -> Vec<Range<usize>> {
        let h = self.n_hidden;
        let mut g: Vec<Range<usize>> = (0..self.n_in).map(|c| c * h..(c + 1) * h).collect();
        g.push(self.b1_offset()..self.w2_offset());
        g.push(self.w2_offset()..self.b2_offset());
        g.push(self.b2_offset()..self.param_count());
        g
    }

    /// Group id of every parameter.
    pub fn group_of_params(&self) -> Vec<usize> {
        let mut out = vec![0; self.param_count()];
        for (g, r) in self.groups().into_iter().enumerate() {
            out[r].iter_mut().for_each(|x| *x = g);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layout: Layout,
    params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorGrad {
    pub error: f64,
    pub grad: Vec<f64>,
}

/// Gaussian weights with std 1/sqrt(fan_in) per layer, deterministic in `seed`.
pub fn init_network(layout: Layout, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = Normal::new(0.0, 1.0 / (layout.n_in as f64).sqrt()).unwrap();
    let second = Normal::new(0.0, 1.0 / (layout.n_hidden as f64).sqrt()).unwrap();
    let split = layout.w2_offset();
    let params = (0..layout.param_count())
        .map(|i| {
            if i < split {
                first.sample(&mut rng)
            } else {
                second.sample(&mut rng)
            }
        })
        .collect();
    Network { layout, params }
}

struct Activations {
    hidden: Vec<f64>,
    /// Output pre-activations.
    pre: Vec<f64>,
}

impl Network {
    pub fn from_params(layout: Layout, params: Vec<f64>) -> Result<Self> {
        if params.len() != layout.param_count() {
            return Err(Error::DimensionMismatch {
                expected: layout.param_count(),
                got: params.len(),
            });
        }
        Ok(Network { layout, params })
    }

    pub fn zeros(layout: Layout) -> Self {
        Network {
            layout,
            params: vec![0.0; layout.param_count()],
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: &[f64]) {
        self.params.copy_from_slice(params);
    }

    pub fn w1(&self, input: usize, hidden: usize) -> f64 {
        self.params[input * self.layout.n_hidden + hidden]
    }

    pub fn b1(&self, hidden: usize) -> f64 {
        self.params[self.layout.b1_offset() + hidden]
    }

    pub fn w2(&self, hidden: usize, out: usize) -> f64 {
        self.params[self.layout.w2_offset() + hidden * self.layout.n_out + out]
    }

    pub fn b2(&self, out: usize) -> f64 {
        self.params[self.layout.b2_offset() + out]
    }

    fn activations(&self, x: &[f64]) -> Activations {
        let l = &self.layout;
        let mut hidden = self.params[l.b1_offset()..l.w2_offset()].to_vec();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let w = &self.params[i * l.n_hidden..(i + 1) * l.n_hidden];
            for (h, &wij) in hidden.iter_mut().zip(w) {
                *h += xi * wij;
            }
        }
        hidden.iter_mut().for_each(|h| *h = h.tanh());
        let mut pre = self.params[l.b2_offset()..].to_vec();
        for (j, &hj) in hidden.iter().enumerate() {
            let w = &self.params[l.w2_offset() + j * l.n_out..l.w2_offset() + (j + 1) * l.n_out];
            for (a, &wjk) in pre.iter_mut().zip(w) {
                *a += hj * wjk;
            }
        }
        Activations { hidden, pre }
    }

    fn squash(&self, a: f64) -> f64 {
        match self.layout.output_kind {
            OutputKind::Logistic => sigmoid(a),
            OutputKind::Linear => a,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.layout.n_in {
            return Err(Error::DimensionMismatch {
                expected: self.layout.n_in,
                got: x.len(),
            });
        }
        let act = self.activations(x);
        Ok(act.pre.into_iter().map(|a| self.squash(a)).collect())
    }

    /// Forward pass over every row.
    pub fn predict(&self, inputs: &Matrix) -> Result<Matrix> {
        let mut out = Matrix::zeros(inputs.rows(), self.layout.n_out);
        for (i, x) in inputs.row_iter().enumerate() {
            out.row_mut(i).copy_from_slice(&self.forward(x)?);
        }
        Ok(out)
    }

    /// Outputs and the Jacobian of the output pre-activations with respect to
    /// every parameter (`n_out × param_count`).
    pub fn output_jacobian(&self, x: &[f64]) -> Result<(Vec<f64>, Matrix)> {
        let l = self.layout;
        if x.len() != l.n_in {
            return Err(Error::DimensionMismatch {
                expected: l.n_in,
                got: x.len(),
            });
        }
        let act = self.activations(x);
        let mut jac = Matrix::zeros(l.n_out, l.param_count());
        for k in 0..l.n_out {
            let row = jac.row_mut(k);
            for j in 0..l.n_hidden {
                let back = (1.0 - act.hidden[j] * act.hidden[j]) * self.w2(j, k);
                for (i, &xi) in x.iter().enumerate() {
                    row[i * l.n_hidden + j] = xi * back;
                }
                row[l.b1_offset() + j] = back;
                row[l.w2_offset() + j * l.n_out + k] = act.hidden[j];
            }
            row[l.b2_offset() + k] = 1.0;
        }
        let outputs = act.pre.iter().map(|&a| self.squash(a)).collect();
        Ok((outputs, jac))
    }

    /// Flat CSV: `#mlp,n_in,n_hidden,n_out,kind` then one parameter per line.
    pub fn to_csv(&self) -> String {
        let l = &self.layout;
        let mut out = format!("#mlp,{},{},{},{}\n", l.n_in, l.n_hidden, l.n_out, l.output_kind);
        for p in &self.params {
            out.push_str(&format!("{p:e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Network> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty network file".into(),
        })?;
        let f: Vec<&str> = header.trim().split(',').collect();
        if f.len() != 5 || f[0] != "#mlp" {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header `#mlp,n_in,n_hidden,n_out,kind`".into(),
            });
        }
        let size = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("bad integer `{s}`"),
            })
        };
        let layout = Layout::new(size(f[1])?, size(f[2])?, size(f[3])?, f[4].parse()?)?;
        let params = lines
            .map(|(i, l)| {
                l.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or(Error::Parse {
                        line: i + 1,
                        msg: format!("bad parameter `{}`", l.trim()),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        Network::from_params(layout, params).map_err(|e| Error::Parse {
            line: text.lines().count(),
            msg: e.to_string(),
        })
    }
}

pub fn sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^a) without overflow.
fn softplus(a: f64) -> f64 {
    a.max(0.0) + (-a.abs()).exp().ln_1p()
}

fn check_shapes(net: &Network, inputs: &Matrix, targets: &Matrix) -> Result<()> {
    let l = &net.layout;
    if inputs.cols() != l.n_in {
        return Err(Error::DimensionMismatch {
            expected: l.n_in,
            got: inputs.cols(),
        });
    }
    if targets.cols() != l.n_out {
        return Err(Error::DimensionMismatch {
            expected: l.n_out,
            got: targets.cols(),
        });
    }
    if targets.rows() != inputs.rows() {
        return Err(Error::DimensionMismatch {
            expected: inputs.rows(),
            got: targets.rows(),
        });
    }
    Ok(())
}

/// Data error and its exact gradient: summed cross-entropy for logistic
/// outputs, half sum-of-squares for linear outputs.
pub fn data_error_grad(net: &Network, inputs: &Matrix, targets: &Matrix) -> Result<ErrorGrad> {
    check_shapes(net, inputs, targets)?;
    let l = net.layout;
    let mut error = 0.0;
    let mut grad = vec![0.0; l.param_count()];
    let mut delta_hidden = vec![0.0; l.n_hidden];
    for (x, t) in inputs.row_iter().zip(targets.row_iter()) {
        let act = net.activations(x);
        let delta_out: Vec<f64> = match l.output_kind {
            OutputKind::Logistic => act
                .pre
                .iter()
                .zip(t)
                .map(|(&a, &ti)| {
                    error += softplus(a) - ti * a;
                    sigmoid(a) - ti
                })
                .collect(),
            OutputKind::Linear => act
                .pre
                .iter()
                .zip(t)
                .map(|(&a, &ti)| {
                    error += 0.5 * (a - ti) * (a - ti);
                    a - ti
                })
                .collect(),
        };
        for (k, &d) in delta_out.iter().enumerate() {
            grad[l.b2_offset() + k] += d;
        }
        for j in 0..l.n_hidden {
            let hj = act.hidden[j];
            let mut back = 0.0;
            for (k, &d) in delta_out.iter().enumerate() {
                grad[l.w2_offset() + j * l.n_out + k] += hj * d;
                back += net.w2(j, k) * d;
            }
            delta_hidden[j] = (1.0 - hj * hj) * back;
            grad[l.b1_offset() + j] += delta_hidden[j];
        }
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let g = &mut grad[i * l.n_hidden..(i + 1) * l.n_hidden];
            for (gij, &dj) in g.iter_mut().zip(&delta_hidden) {
                *gij += xi * dj;
            }
        }
    }
    Ok(ErrorGrad { error, grad })
}

/// Per-group weight penalties ½ Σ w² of every group.
pub fn group_energies(net: &Network) -> Vec<f64> {
    net.layout
        .groups()
        .into_iter()
        .map(|r| 0.5 * net.params[r].iter().map(|w| w * w).sum::<f64>())
        .collect()
}

pub(crate) fn check_alphas(layout: &Layout, alphas: &[f64]) -> Result<()> {
    if alphas.len() != layout.group_count() {
        return Err(Error::InvalidHyperparameter(format!(
            "expected {} group hyperparameters, got {}",
            layout.group_count(),
            alphas.len()
        )));
    }
    if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::InvalidHyperparameter(format!(
            "alpha must be finite and nonnegative, got {a}"
        )));
    }
    Ok(())
}

/// Data error plus Σ_c α_c · ½ Σ_{w∈c} w².
pub fn regularized_error_grad(
    net: &Network,
    inputs: &Matrix,
    targets: &Matrix,
    alphas: &[f64],
) -> Result<ErrorGrad> {
    check_alphas(&net.layout, alphas)?;
    let mut eg = data_error_grad(net, inputs, targets)?;
    for (r, &alpha) in net.layout.groups().into_iter().zip(alphas) {
        for i in r {
            let w = net.params[i];
            eg.error += 0.5 * alpha * w * w;
            eg.grad[i] += alpha * w;
        }
    }
    Ok(eg)
}
