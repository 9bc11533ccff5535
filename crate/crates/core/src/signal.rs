//! Resampling and spectra for the gear-record preprocessing routes.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Block-average decimation: a boxcar of width `len / target` followed by
/// taking every `len / target`-th filtered sample.
pub fn decimate(signal: &[f64], target: usize) -> Result<Vec<f64>> {
    let n = signal.len();
    if target == 0 || target > n || n % target != 0 {
        return Err(Error::NonIntegerDecimation { len: n, target });
    }
    let width = n / target;
    Ok(signal
        .chunks_exact(width)
        .map(|block| block.iter().sum::<f64>() / width as f64)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

/// In-place iterative radix-2 decimation-in-time FFT (forward, unscaled).
pub fn fft_in_place(buf: &mut [Complex]) -> Result<()> {
    let n = buf.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let bits = n.trailing_zeros();
    if bits == 0 {
        return Ok(());
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let tw = Complex::new((step * k as f64).cos(), (step * k as f64).sin());
                let a = buf[start + k];
                let b = buf[start + k + half].mul(tw);
                buf[start + k] = Complex::new(a.re + b.re, a.im + b.im);
                buf[start + k + half] = Complex::new(a.re - b.re, a.im - b.im);
            }
        }
        len <<= 1;
    }
    Ok(())
}

/// Full complex transform of a real signal.
pub fn fft_real(signal: &[f64]) -> Result<Vec<Complex>> {
    let mut buf: Vec<Complex> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft_in_place(&mut buf)?;
    Ok(buf)
}

/// One-sided magnitude spectrum of a real frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// |X_k| for k in 0..n/2.
    pub magnitudes: Vec<f64>,
    /// |X_{n/2}|, kept apart so the one-sided bins stay n/2 wide.
    pub nyquist: f64,
}

impl Spectrum {
    /// Σ|X_k|² over the full two-sided transform, rebuilt from the mirror.
    pub fn two_sided_energy(&self) -> f64 {
        let inner: f64 = self.magnitudes.iter().skip(1).map(|m| m * m).sum();
        self.magnitudes[0].powi(2) + 2.0 * inner + self.nyquist.powi(2)
    }
}

pub const MIN_SPECTRUM_LEN: usize = 8;

pub fn dft_magnitude(signal: &[f64]) -> Result<Spectrum> {
    let n = signal.len();
    if !n.is_power_of_two() || n < MIN_SPECTRUM_LEN {
        return Err(Error::NotPowerOfTwo(n));
    }
    let full = fft_real(signal)?;
    Ok(Spectrum {
        magnitudes: full[..n / 2].iter().map(|c| c.abs()).collect(),
        nyquist: full[n / 2].abs(),
    })
}
