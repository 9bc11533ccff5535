//! Automatic relevance determination.
//!
//! Every input owns a Gaussian prior over the weights leaving it, with its own
//! precision α_c. Training alternates SCG minimization of the regularized
//! error with an evidence-framework update of the precisions:
//!
//! ```text
//! γ_c = N_c − α_c · Σ_{i∈c} (A⁻¹)_ii        A = Gauss-Newton Hessian + diag(α)
//! α_c ← γ_c / Σ_{i∈c} w_i²
//! ```
//!
//! Inputs whose weights the data does not pin down end up with large α
//! (small prior variance) and sink to the bottom of the relevance order.

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix, SymMatrix};
use crate::mlp::{self, init_network, Layout, Network, OutputKind};
use crate::scg::{self, ScgOptions};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

pub const ALPHA_MIN: f64 = 1e-6;
pub const ALPHA_MAX: f64 = 1e6;
/// Group energies below this count as "all weights zero".
const ENERGY_FLOOR: f64 = 1e-12;

/// How the converged model turns into an input ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankMode {
    /// Ascending α, i.e. largest prior variance first.
    #[default]
    PosteriorVariance,
    /// Descending Σ w² over the input's weight group.
    WeightMagnitude,
}

impl fmt::Display for RankMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankMode::PosteriorVariance => "variance",
            RankMode::WeightMagnitude => "magnitude",
        })
    }
}

impl FromStr for RankMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variance" => Ok(RankMode::PosteriorVariance),
            "magnitude" => Ok(RankMode::WeightMagnitude),
            other => Err(Error::InvalidOption(format!("unknown ARD rank mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArdOptions {
    pub cycles: usize,
    pub iters_per_cycle: usize,
    pub alpha_init: f64,
    /// Continue from the previous cycle's weights instead of re-initializing.
    pub warm_start: bool,
    pub rank_mode: RankMode,
    /// Tolerances for the inner SCG runs; `max_iters` is taken from
    /// `iters_per_cycle`.
    pub scg: ScgOptions,
}

impl Default for ArdOptions {
    fn default() -> Self {
        ArdOptions {
            cycles: 2,
            iters_per_cycle: 100,
            alpha_init: 0.1,
            warm_start: true,
            rank_mode: RankMode::PosteriorVariance,
            scg: ScgOptions::default(),
        }
    }
}

impl ArdOptions {
    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return Err(Error::InvalidOption("ARD cycles must be positive".into()));
        }
        if self.iters_per_cycle == 0 {
            return Err(Error::InvalidOption("ARD iterations per cycle must be positive".into()));
        }
        if !(self.alpha_init.is_finite() && self.alpha_init > 0.0) {
            return Err(Error::InvalidHyperparameter(format!(
                "alpha_init must be positive, got {}",
                self.alpha_init
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArdState {
    pub n_inputs: usize,
    /// Precision per group; inputs first, then hidden biases, second-layer
    /// weights, output biases.
    pub alphas: Vec<f64>,
    /// Effective number of well-determined parameters per group.
    pub gammas: Vec<f64>,
    pub group_sizes: Vec<usize>,
    /// Input indices, most relevant first.
    pub relevance: Vec<usize>,
}

impl ArdState {
    /// One row per group: id, size, α, γ.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,size,alpha,gamma\n");
        for (g, ((size, a), gamma)) in self
            .group_sizes
            .iter()
            .zip(&self.alphas)
            .zip(&self.gammas)
            .enumerate()
        {
            out.push_str(&format!("{g},{size},{a:e},{gamma:e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str, n_inputs: usize) -> Result<ArdState> {
        let mut group_sizes = Vec::new();
        let mut alphas = Vec::new();
        let mut gammas = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 4 {
                return Err(bad("expected `group,size,alpha,gamma`"));
            }
            let id: usize = f[0].parse().map_err(|_| bad("bad group id"))?;
            if id != group_sizes.len() {
                return Err(bad("group ids must be consecutive from 0"));
            }
            group_sizes.push(f[1].parse().map_err(|_| bad("bad group size"))?);
            alphas.push(f[2].parse().map_err(|_| bad("bad alpha"))?);
            gammas.push(f[3].parse().map_err(|_| bad("bad gamma"))?);
        }
        if alphas.len() < n_inputs {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected at least {n_inputs} groups, found {}", alphas.len()),
            });
        }
        let mut state = ArdState {
            n_inputs,
            alphas,
            gammas,
            group_sizes,
            relevance: Vec::new(),
        };
        state.relevance = rank_inputs(&state);
        Ok(state)
    }
}

/// Rows r such that Σ r rᵀ is the Gauss-Newton approximation of the data
/// Hessian: output Jacobian rows, scaled by √(y(1−y)) for logistic outputs.
pub fn gauss_newton_rows(net: &Network, inputs: &Matrix) -> Result<Matrix> {
    let l = net.layout;
    let w = l.param_count();
    let mut rows = Matrix::zeros(inputs.rows() * l.n_out, w);
    for (n, x) in inputs.row_iter().enumerate() {
        let (y, jac) = net.output_jacobian(x)?;
        for k in 0..l.n_out {
            let scale = match l.output_kind {
                OutputKind::Linear => 1.0,
                OutputKind::Logistic => (y[k] * (1.0 - y[k])).sqrt(),
            };
            let dst = rows.row_mut(n * l.n_out + k);
            for (d, s) in dst.iter_mut().zip(jac.row(k)) {
                *d = scale * s;
            }
        }
    }
    Ok(rows)
}

/// diag((RᵀR + diag(prior))⁻¹).
///
/// Uses the W×W system directly when there are at least as many rows as
/// parameters, otherwise the Woodbury identity on the smaller M×M system.
pub fn hessian_inverse_diagonal(rows: &Matrix, prior: &[f64]) -> Result<Vec<f64>> {
    let (m, w) = (rows.rows(), rows.cols());
    if prior.len() != w {
        return Err(Error::DimensionMismatch {
            expected: w,
            got: prior.len(),
        });
    }
    if m >= w || prior.iter().any(|&a| a <= 0.0) {
        hessian_inverse_diagonal_direct(rows, prior)
    } else {
        hessian_inverse_diagonal_woodbury(rows, prior)
    }
}

pub(crate) fn hessian_inverse_diagonal_direct(rows: &Matrix, prior: &[f64]) -> Result<Vec<f64>> {
    let w = rows.cols();
    let cols = rows.transpose();
    let mut a = Matrix::zeros(w, w);
    for i in 0..w {
        let ci = cols.row(i);
        for j in i..w {
            let v = crate::linalg::dot(ci, cols.row(j));
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        a[(i, i)] += prior[i];
    }
    let chol = Cholesky::factor(&SymMatrix::new(a)?)?;
    Ok(chol.inverse_diagonal())
}

pub(crate) fn hessian_inverse_diagonal_woodbury(rows: &Matrix, prior: &[f64]) -> Result<Vec<f64>> {
    let (m, w) = (rows.rows(), rows.cols());
    let inv_prior: Vec<f64> = prior.iter().map(|a| 1.0 / a).collect();
    // S = I + R D⁻¹ Rᵀ
    let scaled: Vec<Vec<f64>> = rows
        .row_iter()
        .map(|r| r.iter().zip(&inv_prior).map(|(x, d)| x * d).collect())
        .collect();
    let mut s = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = crate::linalg::dot(&scaled[i], rows.row(j));
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
        s[(i, i)] += 1.0;
    }
    let chol = Cholesky::factor(&SymMatrix::new(s)?)?;
    let cols = rows.transpose();
    Ok((0..w)
        .map(|i| {
            let z = chol.forward(cols.row(i));
            let q: f64 = z.iter().map(|v| v * v).sum();
            let d = inv_prior[i];
            (d - d * d * q).max(0.0)
        })
        .collect())
}

/// Evidence update given the diagonal of the inverse regularized Hessian.
pub fn evidence_update(
    params: &[f64],
    groups: &[Range<usize>],
    inv_diag: &[f64],
    alphas: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mut new_alphas = Vec::with_capacity(groups.len());
    let mut gammas = Vec::with_capacity(groups.len());
    for (r, &alpha) in groups.iter().zip(alphas) {
        let size = r.len() as f64;
        let trace: f64 = inv_diag[r.clone()].iter().sum();
        let gamma = (size - alpha * trace).clamp(0.0, size);
        let energy = 0.5 * params[r.clone()].iter().map(|w| w * w).sum::<f64>();
        let updated = if energy < ENERGY_FLOOR {
            ALPHA_MAX
        } else {
            gamma / (2.0 * energy)
        };
        new_alphas.push(updated.clamp(ALPHA_MIN, ALPHA_MAX));
        gammas.push(gamma);
    }
    (new_alphas, gammas)
}

/// Evidence update for an explicitly supplied data Hessian.
pub fn evidence_update_with_hessian(
    params: &[f64],
    groups: &[Range<usize>],
    data_hessian: &SymMatrix,
    alphas: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = data_hessian.clone();
    a.add_diagonal(&per_param_alphas(groups, alphas, params.len()));
    let inv_diag = Cholesky::factor(&a)?.inverse_diagonal();
    Ok(evidence_update(params, groups, &inv_diag, alphas))
}

fn per_param_alphas(groups: &[Range<usize>], alphas: &[f64], w: usize) -> Vec<f64> {
    let mut out = vec![0.0; w];
    for (r, &a) in groups.iter().zip(alphas) {
        out[r.clone()].iter_mut().for_each(|x| *x = a);
    }
    out
}

/// Re-estimates every group precision at the current (trained) weights.
/// `_targets` is accepted for interface symmetry; with β fixed at 1 the
/// Gauss-Newton Hessian does not depend on them.
pub fn reestimate_alphas(
    net: &Network,
    inputs: &Matrix,
    _targets: &Matrix,
    alphas: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    mlp::check_alphas(&net.layout, alphas)?;
    if alphas.iter().any(|&a| a <= 0.0) {
        return Err(Error::InvalidHyperparameter(
            "evidence re-estimation needs strictly positive alphas".into(),
        ));
    }
    let groups = net.layout.groups();
    let rows = gauss_newton_rows(net, inputs)?;
    let prior = per_param_alphas(&groups, alphas, net.layout.param_count());
    let inv_diag = hessian_inverse_diagonal(&rows, &prior)?;
    Ok(evidence_update(net.params(), &groups, &inv_diag, alphas))
}

/// Inputs by ascending α; lower index first on ties.
pub fn rank_inputs(state: &ArdState) -> Vec<usize> {
    let alphas = &state.alphas[..state.n_inputs];
    let mut order: Vec<usize> = (0..state.n_inputs).collect();
    order.sort_by(|&i, &j| alphas[i].total_cmp(&alphas[j]).then(i.cmp(&j)));
    order
}

/// Inputs by descending weight-group energy; lower index first on ties.
pub fn rank_inputs_by_magnitude(net: &Network) -> Vec<usize> {
    let energies = mlp::group_energies(net);
    crate::sof::descending_order(&energies[..net.layout.n_in])
}

/// Columns of `data` at `ordering[..k]`, in that order.
pub fn select_inputs(data: &Matrix, ordering: &[usize], k: usize) -> Result<Matrix> {
    if k > data.cols() || k > ordering.len() {
        return Err(Error::KExceedsDimension {
            k,
            dim: data.cols().min(ordering.len()),
        });
    }
    data.select_columns(&ordering[..k])
}

/// Minimizes the regularized error from the network's current weights.
pub fn train_regularized(
    net: &mut Network,
    inputs: &Matrix,
    targets: &Matrix,
    alphas: &[f64],
    opts: &ScgOptions,
) -> Result<scg::ScgTrace> {
    let mut work = net.clone();
    let (w, trace) = scg::minimize(
        |w| {
            work.set_params(w);
            let eg = mlp::regularized_error_grad(&work, inputs, targets, alphas)?;
            Ok((eg.error, eg.grad))
        },
        net.params(),
        opts,
    )?;
    net.set_params(&w);
    Ok(trace)
}

/// Trains the grouped-prior network for `opts.cycles` rounds of
/// [SCG, re-estimation] and returns it with the final hyperparameters.
pub fn ard_train(
    inputs: &Matrix,
    targets: &Matrix,
    layout: Layout,
    opts: &ArdOptions,
    seed: u64,
) -> Result<(Network, ArdState)> {
    opts.validate()?;
    if inputs.cols() != layout.n_in {
        return Err(Error::DimensionMismatch {
            expected: layout.n_in,
            got: inputs.cols(),
        });
    }
    let scg_opts = ScgOptions {
        max_iters: opts.iters_per_cycle,
        ..opts.scg
    };
    let mut net = init_network(layout, seed);
    let mut alphas = vec![opts.alpha_init; layout.group_count()];
    let mut gammas = vec![0.0; layout.group_count()];
    for cycle in 0..opts.cycles {
        if cycle > 0 && !opts.warm_start {
            net = init_network(layout, seed);
        }
        train_regularized(&mut net, inputs, targets, &alphas, &scg_opts)
            .map_err(|e| e.context(format!("ARD cycle {}", cycle + 1)))?;
        (alphas, gammas) = reestimate_alphas(&net, inputs, targets, &alphas)
            .map_err(|e| e.context(format!("ARD re-estimation {}", cycle + 1)))?;
    }
    let mut state = ArdState {
        n_inputs: layout.n_in,
        alphas,
        gammas,
        group_sizes: layout.groups().iter().map(|r| r.len()).collect(),
        relevance: Vec::new(),
    };
    state.relevance = match opts.rank_mode {
        RankMode::PosteriorVariance => rank_inputs(&state),
        RankMode::WeightMagnitude => rank_inputs_by_magnitude(&net),
    };
    Ok((net, state))
}
