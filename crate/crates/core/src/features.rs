//! Condition-monitoring features of one vibration record.
//!
//! Sign convention for every fitted model:
//! `x_t = Σ a_i x_{t-i} + ε_t + Σ b_j ε_{t-j}`.

use crate::error::{Error, Result};
use crate::linalg::{least_squares, ridge_least_squares, Matrix};

/// Orders of the three fitted linear models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureOrders {
    pub ar: usize,
    pub ma: usize,
    pub arma_p: usize,
    pub arma_q: usize,
}

impl Default for FeatureOrders {
    /// 6 statistics + AR(20) + MA(20) + ARMA(8, 8) = 62 values.
    fn default() -> Self {
        FeatureOrders {
            ar: 20,
            ma: 20,
            arma_p: 8,
            arma_q: 8,
        }
    }
}

impl FeatureOrders {
    pub fn len(&self) -> usize {
        6 + self.ar + self.ma + self.arma_p + self.arma_q
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub const FEATURE_COUNT: usize = 62;
pub const MIN_FEATURE_SIGNAL: usize = 128;

/// mean, rms, crest factor, variance, skewness, kurtosis (raw, Gaussian = 3).
pub fn basic_stats(signal: &[f64]) -> Result<[f64; 6]> {
    let n = signal.len();
    if n < 4 {
        return Err(Error::SignalTooShort { len: n, needed: 4 });
    }
    check_finite(signal)?;
    let nf = n as f64;
    let mean = signal.iter().sum::<f64>() / nf;
    let rms = (signal.iter().map(|x| x * x).sum::<f64>() / nf).sqrt();
    let peak = signal.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let crest = if rms > 0.0 { peak / rms } else { 0.0 };
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in signal {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = m2 / (nf - 1.0);
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let (skewness, kurtosis) = if m2 <= (1e-12 * peak).powi(2) {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    };
    Ok([mean, rms, crest, variance, skewness, kurtosis])
}

fn check_finite(signal: &[f64]) -> Result<()> {
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite sample in signal".into()));
    }
    Ok(())
}

fn demean(signal: &[f64]) -> Vec<f64> {
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    signal.iter().map(|x| x - mean).collect()
}

/// Burg recursion on an already centered signal. Needs `order < len`.
pub(crate) fn burg(x: &[f64], order: usize) -> Vec<f64> {
    let n = x.len();
    let mut fwd = x.to_vec();
    let mut bwd = x.to_vec();
    // prediction-error filter 1 + Σ c_i z^-i
    let mut c = vec![1.0];
    for m in 0..order {
        let (mut num, mut den) = (0.0, 0.0);
        for t in (m + 1)..n {
            num += fwd[t] * bwd[t - 1];
            den += fwd[t] * fwd[t] + bwd[t - 1] * bwd[t - 1];
        }
        let k = if den > 0.0 { -2.0 * num / den } else { 0.0 };
        for t in ((m + 1)..n).rev() {
            let f = fwd[t];
            let b = bwd[t - 1];
            fwd[t] = f + k * b;
            bwd[t] = b + k * f;
        }
        c.push(0.0);
        let prev = c.clone();
        for i in 1..=m + 1 {
            c[i] = prev[i] + k * prev[m + 1 - i];
        }
    }
    c[1..].iter().map(|v| -v).collect()
}

/// AR(p) coefficients by Burg's method on the mean-removed signal.
pub fn ar_coeffs(signal: &[f64], p: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::InvalidOption("AR order must be positive".into()));
    }
    if signal.len() <= 2 * p {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            needed: 2 * p + 1,
        });
    }
    check_finite(signal)?;
    Ok(burg(&demean(signal), p))
}

/// MA(q) coefficients by Durbin's method: long AR of order 4q, then least
/// squares for the MA polynomial whose inverse best matches it.
pub fn ma_coeffs(signal: &[f64], q: usize) -> Result<Vec<f64>> {
    if q == 0 {
        return Err(Error::InvalidOption("MA order must be positive".into()));
    }
    if signal.len() <= 4 * q {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            needed: 4 * q + 1,
        });
    }
    check_finite(signal)?;
    let long = 4 * q;
    let ar = burg(&demean(signal), long);
    // c_0 = 1, c_i = -a_i; (1 + Σ b_j z^j) C(z) ≈ 1
    let mut c = vec![1.0];
    c.extend(ar.iter().map(|a| -a));
    let mut design = Matrix::zeros(long, q);
    let mut y = vec![0.0; long];
    for i in 1..=long {
        y[i - 1] = -c[i];
        for j in 1..=q {
            if i >= j {
                design[(i - 1, j - 1)] = c[i - j];
            }
        }
    }
    least_squares(&design, &y)
}

/// Relative ridge on the ARMA regression. Lagged values and lagged
/// innovations are nearly collinear when the signal is close to white, and
/// plain least squares then returns large cancelling AR/MA pairs.
const ARMA_RIDGE: f64 = 0.02;

/// ARMA(p, q) by Hannan-Rissanen: innovations from a long AR fit, then one
/// least-squares regression on lagged values and lagged innovations.
pub fn arma_coeffs(signal: &[f64], p: usize, q: usize) -> Result<Vec<f64>> {
    if p + q == 0 {
        return Err(Error::InvalidOption("ARMA orders must not both be zero".into()));
    }
    let n = signal.len();
    if n <= 4 * (p + q) {
        return Err(Error::SignalTooShort {
            len: n,
            needed: 4 * (p + q) + 1,
        });
    }
    check_finite(signal)?;
    let x = demean(signal);
    if x.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0; p + q]);
    }
    let long = (4 * (p + q)).min(n / 2);
    let ar = burg(&x, long);
    let mut resid = vec![0.0; n];
    for t in long..n {
        resid[t] = x[t] - (1..=long).map(|i| ar[i - 1] * x[t - i]).sum::<f64>();
    }
    let start = long + p.max(q);
    let rows = n - start;
    let mut design = Matrix::zeros(rows, p + q);
    let mut y = vec![0.0; rows];
    for (r, t) in (start..n).enumerate() {
        y[r] = x[t];
        let row = design.row_mut(r);
        for i in 1..=p {
            row[i - 1] = x[t - i];
        }
        for j in 1..=q {
            row[p + j - 1] = resid[t - j];
        }
    }
    ridge_least_squares(&design, &y, ARMA_RIDGE).map_err(|e| e.context("ARMA regression"))
}

/// The fixed-order feature vector: statistics, AR, MA, then ARMA (AR part
/// first).
pub fn feature_vector_with(signal: &[f64], orders: &FeatureOrders) -> Result<Vec<f64>> {
    if signal.len() < MIN_FEATURE_SIGNAL {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            needed: MIN_FEATURE_SIGNAL,
        });
    }
    let mut out = Vec::with_capacity(orders.len());
    out.extend(basic_stats(signal)?);
    out.extend(ar_coeffs(signal, orders.ar)?);
    out.extend(ma_coeffs(signal, orders.ma)?);
    out.extend(arma_coeffs(signal, orders.arma_p, orders.arma_q)?);
    Ok(out)
}

pub fn feature_vector(signal: &[f64]) -> Result<Vec<f64>> {
    feature_vector_with(signal, &FeatureOrders::default())
}
