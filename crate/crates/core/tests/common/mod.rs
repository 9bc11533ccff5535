//! Oracle checks shared by the oracle tests and the acceptance suite. Every
//! check returns a short summary on success and a description of the first
//! violation on failure.
#![allow(dead_code)]

use faultsel::ard::{ard_train, ArdOptions, ArdState};
use faultsel::features::{ar_coeffs, arma_coeffs, basic_stats, ma_coeffs};
use faultsel::linalg::{covariance, solve_spd, sym_eig, Matrix, SymMatrix};
use faultsel::mlp::{data_error_grad, init_network, regularized_error_grad, Layout, Network, OutputKind};
use faultsel::pca::{fit_pca, project};
use faultsel::scg::{minimize, ScgOptions};
use faultsel::sof::rank_by_sof;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

pub fn normals(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(r)).collect()
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, normals(r, rows * cols)).unwrap()
}

pub fn random_symmetric(r: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let m = random_matrix(r, n, n);
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s.row_mut(i)[j] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    SymMatrix::new(s).unwrap()
}

/// Aᵀ A + I for a random square A.
pub fn random_spd(r: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let a = random_matrix(r, n, n);
    let mut m = a.transpose().matmul(&a).unwrap();
    for i in 0..n {
        m.row_mut(i)[i] += 1.0;
    }
    // symmetrize away rounding in the product
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m.row_mut(i)[j] = v;
            m.row_mut(j)[i] = v;
        }
    }
    SymMatrix::new(m).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- linalg

pub fn brute_covariance(data: &Matrix) -> Vec<Vec<f64>> {
    let (n, d) = (data.rows(), data.cols());
    let mean: Vec<f64> = (0..d).map(|j| (0..n).map(|i| data[(i, j)]).sum::<f64>() / n as f64).collect();
    let mut c = vec![vec![0.0; d]; d];
    for a in 0..d {
        for b in 0..d {
            let mut s = 0.0;
            for i in 0..n {
                s += (data[(i, a)] - mean[a]) * (data[(i, b)] - mean[b]);
            }
            c[a][b] = s / (n - 1) as f64;
        }
    }
    c
}

pub fn check_covariance(seed: u64) -> Check {
    let mut r = rng(seed);
    let data = random_matrix(&mut r, 5, 3);
    let c = covariance(&data).map_err(|e| e.to_string())?;
    let oracle = brute_covariance(&data);
    for a in 0..3 {
        for b in 0..3 {
            let got = c.as_matrix()[(a, b)];
            ensure((got - oracle[a][b]).abs() < 1e-12, || {
                format!("covariance[{a},{b}] = {got}, double loop gives {}", oracle[a][b])
            })?;
        }
    }
    Ok("5x3 covariance matches double loop".into())
}

/// Roots of det(A - λI) for a symmetric 3×3 matrix, ascending, by bisection
/// between the critical points of the characteristic cubic.
pub fn cubic_roots_by_bisection(a: &Matrix) -> [f64; 3] {
    let c2 = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
    let c1 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let c0 = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
        - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
        + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
    let p = |x: f64| ((x - c2) * x + c1) * x - c0;
    // critical points of p: 3x² - 2c2 x + c1 = 0
    let disc = (c2 * c2 - 3.0 * c1).max(0.0).sqrt();
    let (x1, x2) = ((c2 - disc) / 3.0, (c2 + disc) / 3.0);
    let bound = 1.0 + a.as_slice().iter().map(|v| v.abs()).sum::<f64>();
    let bisect = |mut lo: f64, mut hi: f64| {
        let rising = p(hi) >= p(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (p(mid) >= 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    [bisect(-bound, x1), bisect(x1, x2), bisect(x2, bound)]
}

pub fn check_eigen_3x3(count: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut worst_root = 0.0f64;
    let mut worst_resid = 0.0f64;
    for case in 0..count {
        let m = random_symmetric(&mut r, 3);
        let eig = sym_eig(&m).map_err(|e| e.to_string())?;
        let mut got = eig.values.clone();
        got.sort_by(f64::total_cmp);
        let oracle = cubic_roots_by_bisection(m.as_matrix());
        for (g, o) in got.iter().zip(&oracle) {
            worst_root = worst_root.max((g - o).abs());
            ensure((g - o).abs() < 1e-8, || format!("case {case}: eigenvalue {g} vs bisection root {o}"))?;
        }
        for (j, &lam) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(j);
            let av = m.as_matrix().matvec(&v).unwrap();
            let resid = av.iter().zip(&v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
            worst_resid = worst_resid.max(resid);
            ensure(resid < 1e-6, || format!("case {case}: eigenvector {j} residual {resid:e}"))?;
        }
    }
    Ok(format!(
        "{count} matrices, max root error {worst_root:.1e}, max residual {worst_resid:.1e}"
    ))
}

pub fn check_spd_residual(seed: u64) -> Check {
    let mut r = rng(seed);
    let m = random_spd(&mut r, 4);
    let rhs = normals(&mut r, 4);
    let x = solve_spd(&m, &rhs).map_err(|e| e.to_string())?;
    let mx = m.as_matrix().matvec(&x).unwrap();
    let resid = mx.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        / rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    ensure(resid < 1e-8, || format!("relative residual {resid:e}"))?;
    Ok(format!("relative residual {resid:.1e}"))
}

// ---------------------------------------------------------------- sof / pca

pub fn check_sof_brute_force(seed: u64) -> Check {
    let mut r = rng(seed);
    let d = 12;
    let healthy = random_matrix(&mut r, 15, d);
    let mut damaged = random_matrix(&mut r, 20, d);
    for i in 0..20 {
        for j in 0..d {
            damaged.row_mut(i)[j] = damaged[(i, j)] * (1.0 + 0.2 * j as f64) + 0.3 * j as f64;
        }
    }
    let ranking = rank_by_sof(&healthy, &damaged, d).map_err(|e| e.to_string())?;
    let stats = |m: &Matrix, j: usize| {
        let col = m.column(j);
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        (mean, sd)
    };
    let scores: Vec<f64> = (0..d)
        .map(|j| {
            let (m1, s1) = stats(&healthy, j);
            let (m2, s2) = stats(&damaged, j);
            (m1 - m2).abs() / ((s1 + s2) / 2.0)
        })
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    ensure(ranking.selected == order, || {
        format!("ordering {:?}, brute force {:?}", ranking.selected, order)
    })?;
    for j in 0..d {
        ensure((ranking.scores[j] - scores[j]).abs() < 1e-12, || {
            format!("score {j}: {} vs {}", ranking.scores[j], scores[j])
        })?;
    }
    Ok(format!("{d} columns ranked as brute force"))
}

pub fn check_pca_isotropic(seed: u64) -> Check {
    let mut r = rng(seed);
    let data = random_matrix(&mut r, 10_000, 3);
    let model = fit_pca(&data, 3).map_err(|e| e.to_string())?;
    let (lo, hi) = model
        .eigenvalues
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    ensure(hi - lo < 0.1 && (lo - 1.0).abs() < 0.1 && (hi - 1.0).abs() < 0.1, || {
        format!("eigenvalues {:?}", model.eigenvalues)
    })?;
    Ok(format!("eigenvalue spread {:.3}", hi - lo))
}

pub fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

pub fn check_pca_projection_variance(seed: u64) -> Check {
    let mut r = rng(seed);
    let mut data = random_matrix(&mut r, 20, 6);
    // give the columns different scales so the eigenvalues separate
    for i in 0..20 {
        for j in 0..6 {
            data.row_mut(i)[j] *= 1.0 + j as f64;
        }
    }
    let model = fit_pca(&data, 3).map_err(|e| e.to_string())?;
    let p = project(&model, &data).map_err(|e| e.to_string())?;
    for j in 0..3 {
        let v = sample_variance(&p.column(j));
        ensure((v - model.eigenvalues[j]).abs() < 1e-6, || {
            format!("projected column {j} variance {v} vs eigenvalue {}", model.eigenvalues[j])
        })?;
    }
    Ok("projected variances equal eigenvalues".into())
}

/// Random D×k matrix with orthonormal columns (Gram-Schmidt).
pub fn random_orthonormal(r: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v = normals(r, d);
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

pub fn check_pca_max_variance(seed: u64) -> Check {
    let mut r = rng(seed);
    let (n, d, k) = (40, 6, 2);
    let mut data = random_matrix(&mut r, n, d);
    for i in 0..n {
        for j in 0..d {
            data.row_mut(i)[j] *= 0.5 + j as f64;
        }
    }
    let model = fit_pca(&data, k).map_err(|e| e.to_string())?;
    let retained: f64 = model.eigenvalues.iter().sum();
    let means = data.column_means();
    for trial in 0..100 {
        let basis = random_orthonormal(&mut r, d, k);
        let alt: f64 = basis
            .iter()
            .map(|b| {
                let proj: Vec<f64> = data
                    .row_iter()
                    .map(|row| row.iter().zip(&means).zip(b).map(|((x, m), w)| (x - m) * w).sum())
                    .collect();
                sample_variance(&proj)
            })
            .sum();
        ensure(retained >= alt - 1e-9, || {
            format!("alternative {trial} retains {alt} > PCA {retained}")
        })?;
    }
    Ok(format!("PCA retains {retained:.3}, beats 100 random projections"))
}

// ---------------------------------------------------------------- mlp

pub fn random_layout(r: &mut ChaCha8Rng) -> Layout {
    loop {
        let kind = if r.gen_bool(0.5) { OutputKind::Logistic } else { OutputKind::Linear };
        let l = Layout::new(r.gen_range(1..=5), r.gen_range(1..=5), r.gen_range(1..=3), kind).unwrap();
        if l.param_count() <= 60 {
            return l;
        }
    }
}

pub fn random_problem(r: &mut ChaCha8Rng, layout: Layout, n: usize) -> (Matrix, Matrix) {
    let x = random_matrix(r, n, layout.n_in);
    let t = match layout.output_kind {
        OutputKind::Logistic => {
            let v = (0..n * layout.n_out).map(|_| if r.gen_bool(0.5) { 1.0 } else { 0.0 }).collect();
            Matrix::from_vec(n, layout.n_out, v).unwrap()
        }
        OutputKind::Linear => random_matrix(r, n, layout.n_out),
    };
    (x, t)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Worst relative gap between `grad` and central differences of `f`.
pub fn finite_difference_gap(net: &Network, grad: &[f64], f: impl Fn(&Network) -> f64) -> f64 {
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut probe = net.clone();
    for i in 0..grad.len() {
        let w = net.params()[i];
        probe.params_mut()[i] = w + h;
        let up = f(&probe);
        probe.params_mut()[i] = w - h;
        let down = f(&probe);
        probe.params_mut()[i] = w;
        worst = worst.max(relative_gap(grad[i], (up - down) / (2.0 * h)));
    }
    worst
}

pub fn check_gradients(count: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for case in 0..count {
        let layout = random_layout(&mut r);
        let net = init_network(layout, r.gen());
        let (x, t) = random_problem(&mut r, layout, 7);
        let alphas: Vec<f64> = (0..layout.group_count()).map(|_| r.gen_range(0.01..2.0)).collect();

        let eg = data_error_grad(&net, &x, &t).map_err(|e| e.to_string())?;
        let gap = finite_difference_gap(&net, &eg.grad, |n| data_error_grad(n, &x, &t).unwrap().error);
        worst = worst.max(gap);
        ensure(gap < 1e-5, || format!("case {case} ({layout:?}): data gradient gap {gap:e}"))?;

        let eg = regularized_error_grad(&net, &x, &t, &alphas).map_err(|e| e.to_string())?;
        let gap = finite_difference_gap(&net, &eg.grad, |n| {
            regularized_error_grad(n, &x, &t, &alphas).unwrap().error
        });
        worst = worst.max(gap);
        ensure(gap < 1e-5, || format!("case {case} ({layout:?}): regularized gradient gap {gap:e}"))?;
    }
    Ok(format!("{count} networks, worst relative gap {worst:.1e}"))
}

// ---------------------------------------------------------------- scg

/// ½ wᵀAw − bᵀw as an SCG objective.
pub fn quadratic<'a>(a: &'a SymMatrix, b: &[f64]) -> impl FnMut(&[f64]) -> faultsel::Result<(f64, Vec<f64>)> + 'a {
    let b = b.to_vec();
    move |w: &[f64]| {
        let aw = a.as_matrix().matvec(w)?;
        let f = 0.5 * w.iter().zip(&aw).map(|(x, y)| x * y).sum::<f64>()
            - w.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>();
        let g = aw.iter().zip(&b).map(|(x, y)| x - y).collect();
        Ok((f, g))
    }
}

pub fn check_scg_quadratics(count: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let opts = ScgOptions {
        max_iters: 1000,
        grad_tol: 1e-10,
        step_tol: 1e-300,
        ..ScgOptions::default()
    };
    let mut worst = 0.0f64;
    for case in 0..count {
        let n = r.gen_range(1..=20);
        let a = random_spd(&mut r, n);
        let b = normals(&mut r, n);
        let exact = solve_spd(&a, &b).map_err(|e| e.to_string())?;
        let w0 = normals(&mut r, n);
        let (w, trace) = minimize(quadratic(&a, &b), &w0, &opts).map_err(|e| e.to_string())?;
        let err = w.iter().zip(&exact).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(err);
        ensure(err < 1e-5, || format!("case {case} (n={n}): max deviation {err:e} from the linear solve"))?;
        ensure(trace.errors.windows(2).all(|p| p[1] <= p[0]), || {
            format!("case {case}: objective trace increases")
        })?;
    }
    Ok(format!("{count} quadratics, worst deviation {worst:.1e}"))
}

// ---------------------------------------------------------------- ard

/// Targets depend linearly on inputs 0..5; inputs 5..10 are pure noise.
pub fn relevance_problem(seed: u64) -> (Matrix, Matrix) {
    let mut r = rng(seed);
    let x = random_matrix(&mut r, 200, 10);
    let coef = [1.0, -0.8, 0.6, -0.5, 0.4];
    let t: Vec<f64> = x
        .row_iter()
        .map(|row| row[..5].iter().zip(coef).map(|(a, c)| a * c).sum::<f64>() + 0.1 * normal(&mut r))
        .collect();
    (x, Matrix::from_vec(200, 1, t).unwrap())
}

pub fn relevance_run(seed: u64, alpha_init: f64) -> faultsel::Result<ArdState> {
    let (x, t) = relevance_problem(seed);
    let layout = Layout::new(10, 4, 1, OutputKind::Linear)?;
    let opts = ArdOptions {
        alpha_init,
        ..ArdOptions::default()
    };
    ard_train(&x, &t, layout, &opts, seed).map(|(_, s)| s)
}

/// Smallest ratio of a noise-input α to a relevant-input α.
pub fn separation(state: &ArdState) -> f64 {
    let max_relevant = state.alphas[..5].iter().cloned().fold(f64::MIN, f64::max);
    let min_noise = state.alphas[5..10].iter().cloned().fold(f64::MAX, f64::min);
    min_noise / max_relevant
}

pub fn check_ard_relevance(seeds: &[u64]) -> Check {
    let mut ratios = Vec::new();
    for &s in seeds {
        let state = relevance_run(s, 0.1).map_err(|e| format!("seed {s}: {e}"))?;
        ratios.push(separation(&state));
    }
    let good = ratios.iter().filter(|&&q| q >= 10.0).count();
    let summary = ratios.iter().map(|q| format!("{q:.3e}")).collect::<Vec<_>>().join(", ");
    ensure(good * 5 >= seeds.len() * 4, || {
        format!("only {good}/{} seeds separate by 10x; ratios {summary}", seeds.len())
    })?;
    Ok(format!("{good}/{} seeds separate; noise/relevant alpha ratios {summary}", seeds.len()))
}

// ---------------------------------------------------------------- features

pub fn ar1_signal(seed: u64, n: usize, a: f64, noise: f64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut x = vec![0.0; n];
    for t in 1..n {
        x[t] = a * x[t - 1] + noise * normal(&mut r);
    }
    x
}

pub fn ma1_signal(seed: u64, n: usize, b: f64) -> Vec<f64> {
    let mut r = rng(seed);
    let e = normals(&mut r, n + 1);
    (0..n).map(|t| e[t + 1] + b * e[t]).collect()
}

fn all_within(v: &[f64], target: f64, tol: f64) -> bool {
    v.iter().all(|x| (x - target).abs() <= tol)
}

pub fn check_moments(seed: u64) -> Check {
    let mut r = rng(seed);
    let s = basic_stats(&normals(&mut r, 100_000)).map_err(|e| e.to_string())?;
    let (skew, kurt) = (s[4], s[5]);
    ensure(skew.abs() <= 0.05 && (kurt - 3.0).abs() <= 0.1, || {
        format!("skewness {skew}, kurtosis {kurt}")
    })?;
    Ok(format!("skewness {skew:.4}, kurtosis {kurt:.4}"))
}

pub fn check_ar_recovery(seed: u64) -> Check {
    let a = ar_coeffs(&ar1_signal(seed, 10_000, 0.8, 1e-3), 1).map_err(|e| e.to_string())?;
    ensure((a[0] - 0.8).abs() <= 0.05, || format!("a1 = {}", a[0]))?;
    let mut r = rng(seed + 1);
    let w = ar_coeffs(&normals(&mut r, 10_000), 20).map_err(|e| e.to_string())?;
    ensure(all_within(&w, 0.0, 0.1), || format!("white-noise AR(20) {w:?}"))?;
    Ok(format!("a1 = {:.4}", a[0]))
}

pub fn check_ma_recovery(seed: u64) -> Check {
    let b = ma_coeffs(&ma1_signal(seed, 10_000, 0.5), 1).map_err(|e| e.to_string())?;
    ensure((b[0] - 0.5).abs() <= 0.05, || format!("b1 = {}", b[0]))?;
    let mut r = rng(seed + 1);
    let w = ma_coeffs(&normals(&mut r, 10_000), 20).map_err(|e| e.to_string())?;
    ensure(all_within(&w, 0.0, 0.1), || format!("white-noise MA(20) {w:?}"))?;
    Ok(format!("b1 = {:.4}", b[0]))
}

pub fn check_arma_recovery(seed: u64) -> Check {
    let c = arma_coeffs(&ar1_signal(seed, 10_000, 0.8, 1.0), 1, 1).map_err(|e| e.to_string())?;
    ensure((c[0] - 0.8).abs() <= 0.1 && c[1].abs() <= 0.1, || format!("ARMA(1,1) {c:?}"))?;
    let mut r = rng(seed + 1);
    let w = arma_coeffs(&normals(&mut r, 10_000), 8, 8).map_err(|e| e.to_string())?;
    ensure(all_within(&w, 0.0, 0.1), || format!("white-noise ARMA(8,8) {w:?}"))?;
    Ok(format!("ARMA(1,1) = ({:.4}, {:.4})", c[0], c[1]))
}

/// Step-down (Schur-Cohn) test: the AR model x_t = Σ a_i x_{t-i} is stable
/// iff every reflection coefficient of 1 - Σ a_i z^-i has modulus below 1.
pub fn ar_is_stable(a: &[f64]) -> bool {
    let mut c: Vec<f64> = a.iter().map(|v| -v).collect();
    while let Some(&k) = c.last() {
        if !(k.abs() < 1.0) {
            return false;
        }
        let m = c.len();
        let denom = 1.0 - k * k;
        c = (0..m - 1).map(|i| (c[i] - k * c[m - 2 - i]) / denom).collect();
    }
    true
}

pub fn check_burg_stability(count: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..count {
        let n = r.gen_range(64..=512);
        let kind = case % 4;
        let x: Vec<f64> = match kind {
            0 => normals(&mut r, n),
            1 => {
                // strongly resonant: near-unit-root AR(2)
                let e = normals(&mut r, n);
                let mut x = vec![0.0; n];
                for t in 2..n {
                    x[t] = 1.98 * x[t - 1] - 0.9801 * x[t - 2] + e[t];
                }
                x
            }
            2 => (0..n)
                .map(|t| (0.3 * t as f64).sin() + 1e-3 * normal(&mut r))
                .collect(),
            _ => {
                // random walk
                let mut acc = 0.0;
                (0..n)
                    .map(|_| {
                        acc += normal(&mut r);
                        acc
                    })
                    .collect()
            }
        };
        let p = r.gen_range(1..=20.min(n / 2 - 1));
        let a = ar_coeffs(&x, p).map_err(|e| e.to_string())?;
        ensure(ar_is_stable(&a), || format!("case {case} (kind {kind}, n={n}, p={p}) unstable: {a:?}"))?;
    }
    Ok(format!("{count} random signals, all Burg fits stable"))
}
