//! Harmonic extension on the horizontal strip `|nu| < pi/2` from two
//! boundary traces, via Fourier multipliers in the longitudinal variable.
//!
//! With `hs`, `ha` the transforms of the half-sum and half-difference of
//! the traces, the extension is
//! `Phi^(xi, nu) = hs cosh(xi nu)/cosh(pi xi/2) + ha sinh(xi nu)/sinh(pi xi/2)`
//! and the outward normal derivative at the top boundary carries the
//! multipliers `xi tanh(pi xi/2)` and `xi coth(pi xi/2)`. The hyperbolic
//! ratios are evaluated in exponential form so they stay bounded for
//! large `|xi|`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Uniform periodized grid on `[-l, l)` with its angular frequencies.
#[derive(Debug, Clone)]
pub struct StripGrid {
    l: f64,
    m: usize,
    tau: Vec<f64>,
    xi: Vec<f64>,
}

impl StripGrid {
    pub fn new(l: f64, m: usize) -> Self {
        let tau: Vec<f64> = (0..m).map(|j| -l + 2.0 * l * j as f64 / m as f64).collect();
        let xi: Vec<f64> = (0..m)
            .map(|j| {
                let k = if j < m / 2 {
                    j as f64
                } else {
                    j as f64 - m as f64
                };
                PI * k / l
            })
            .collect();
        Self { l, m, tau, xi }
    }

    /// The working resolution used by the verification suite.
    pub fn standard() -> Self {
        Self::new(40.0, 4096)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn half_length(&self) -> f64 {
        self.l
    }

    /// Raised-cosine window, identity on the inner 90% of the domain.
    pub fn taper(&self) -> Vec<f64> {
        self.tau
            .iter()
            .map(|&t| {
                let s = (t.abs() - 0.9 * self.l) / (0.1 * self.l);
                if s > 0.0 {
                    0.5 * (1.0 + (PI * s.min(1.0)).cos())
                } else {
                    1.0
                }
            })
            .collect()
    }

    fn fft(&self, data: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(self.m).process(&mut buf);
        buf
    }

    fn ifft_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        FftPlanner::new().plan_fft_inverse(self.m).process(&mut buf);
        let scale = 1.0 / self.m as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    fn traces(&self, top: &[f64], bottom: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let half_sum: Vec<f64> = top
            .iter()
            .zip(bottom)
            .map(|(&a, &b)| 0.5 * (a + b))
            .collect();
        let half_diff: Vec<f64> = top
            .iter()
            .zip(bottom)
            .map(|(&a, &b)| 0.5 * (a - b))
            .collect();
        (self.fft(&half_sum), self.fft(&half_diff))
    }

    /// Harmonic extension evaluated on the level `nu`.
    pub fn extend(&self, top: &[f64], bottom: &[f64], nu: f64) -> Vec<f64> {
        let (hs, ha) = self.traces(top, bottom);
        let buf: Vec<Complex64> = (0..self.m)
            .map(|j| {
                let x = self.xi[j];
                hs[j] * cosh_ratio(x, nu) + ha[j] * sinh_ratio(x, nu)
            })
            .collect();
        self.ifft_real(buf)
    }

    /// Outward normal derivatives on the top and bottom boundaries.
    pub fn neumann(&self, top: &[f64], bottom: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (hs, ha) = self.traces(top, bottom);
        let up: Vec<Complex64> = (0..self.m)
            .map(|j| hs[j] * xtanh(self.xi[j]) + ha[j] * xcoth(self.xi[j]))
            .collect();
        let dn: Vec<Complex64> = (0..self.m)
            .map(|j| hs[j] * xtanh(self.xi[j]) - ha[j] * xcoth(self.xi[j]))
            .collect();
        (self.ifft_real(up), self.ifft_real(dn))
    }

    /// Transverse derivative of the extension on an interior level.
    pub fn normal_derivative(&self, top: &[f64], bottom: &[f64], nu: f64) -> Vec<f64> {
        let (hs, ha) = self.traces(top, bottom);
        let buf: Vec<Complex64> = (0..self.m)
            .map(|j| {
                let x = self.xi[j];
                hs[j] * xtanh(x) * sinh_ratio(x, nu) + ha[j] * xcoth(x) * cosh_ratio(x, nu)
            })
            .collect();
        self.ifft_real(buf)
    }

    /// The top Neumann trace rewritten as three bounded pieces:
    /// `tanh` acting on the mean of the trace derivatives, the regularized
    /// `coth` acting on their half-difference, and the zeroth-order jump
    /// term `(top - bottom)/pi`.
    pub fn neumann_three_term(&self, top: &[f64], bottom: &[f64]) -> Vec<f64> {
        let dtop = self.derivative(top);
        let dbot = self.derivative(bottom);
        let half_sum: Vec<f64> = dtop
            .iter()
            .zip(&dbot)
            .map(|(&a, &b)| 0.5 * (a + b))
            .collect();
        let half_diff: Vec<f64> = dtop
            .iter()
            .zip(&dbot)
            .map(|(&a, &b)| 0.5 * (a - b))
            .collect();
        let fs = self.fft(&half_sum);
        let fa = self.fft(&half_diff);
        let buf: Vec<Complex64> = (0..self.m)
            .map(|j| {
                let x = self.xi[j];
                let t1 = fs[j] * (0.5 * PI * x).tanh() * Complex64::new(0.0, -1.0);
                let t2 = if x.abs() < 1e-30 {
                    Complex64::new(0.0, 0.0)
                } else {
                    fa[j] * ((xcoth(x) - 2.0 / PI) / x) * Complex64::new(0.0, -1.0)
                };
                t1 + t2
            })
            .collect();
        let smooth = self.ifft_real(buf);
        smooth
            .iter()
            .zip(top.iter().zip(bottom))
            .map(|(&s, (&t, &b))| s + (t - b) / PI)
            .collect()
    }

    fn derivative(&self, data: &[f64]) -> Vec<f64> {
        let f = self.fft(data);
        let buf: Vec<Complex64> = (0..self.m)
            .map(|j| f[j] * Complex64::new(0.0, self.xi[j]))
            .collect();
        self.ifft_real(buf)
    }
}

/// `cosh(x nu)/cosh(pi x/2)` in overflow-free form.
pub fn cosh_ratio(x: f64, nu: f64) -> f64 {
    let ax = x.abs();
    (ax * (nu.abs() - 0.5 * PI)).exp() * (1.0 + (-2.0 * ax * nu.abs()).exp())
        / (1.0 + (-PI * ax).exp())
}

/// `sinh(x nu)/sinh(pi x/2)`, removable at `x = 0` where it tends to
/// `2 nu / pi`.
pub fn sinh_ratio(x: f64, nu: f64) -> f64 {
    if x.abs() < 1e-3 {
        let xn = x * nu;
        let xp = 0.5 * PI * x;
        (2.0 * nu / PI) * (1.0 + xn * xn / 6.0) / (1.0 + xp * xp / 6.0)
    } else {
        let ax = x.abs();
        nu.signum() * (ax * (nu.abs() - 0.5 * PI)).exp() * (1.0 - (-2.0 * ax * nu.abs()).exp())
            / (1.0 - (-PI * ax).exp())
    }
}

/// `x tanh(pi x/2)`.
pub fn xtanh(x: f64) -> f64 {
    x * (0.5 * PI * x).tanh()
}

/// `x coth(pi x/2)`, with the removable value `2/pi` at `x = 0`.
pub fn xcoth(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let t = 0.5 * PI * x;
        (2.0 / PI) * (1.0 + t * t / 3.0 - t * t * t * t / 45.0)
    } else {
        x / (0.5 * PI * x).tanh()
    }
}
