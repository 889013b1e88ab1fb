//! Periodic spectral layer: grids, parity-tagged fields, the FFT Hilbert
//! transform, spectral differentiation, and curve reconstruction from a
//! tangent-angle field.
//!
//! Conventions fixed here and relied on everywhere else:
//! - nodes are `alpha_j = -pi + 2*pi*j/N`, `j = 0..N`;
//! - the Hilbert multiplier is `i*sgn(k)` with the `k = 0` and Nyquist
//!   bins zeroed, so `H(cos m a) = -sin m a` and `H(sin m a) = cos m a`;
//! - derivative and antiderivative multipliers likewise zero the Nyquist
//!   bin, keeping real fields real and parities exact.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use thiserror::Error;

const TAU: f64 = 2.0 * PI;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid size {0} is not a power of two >= 8")]
    GridSize(usize),
    #[error("value count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field violates declared {parity:?} parity: deviation {deviation:.3e} exceeds {tol:.3e}")]
    ParityViolation {
        parity: Parity,
        deviation: f64,
        tol: f64,
    },
    #[error("tangent angle field must be odd")]
    NonOddInput,
    #[error("tangent angle field has nonzero mean {0:.3e}")]
    NonZeroMean(f64),
}

/// Uniform periodic grid on `[-pi, pi)` with `N` a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicGrid {
    n: usize,
}

impl PeriodicGrid {
    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::GridSize(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -PI + TAU * j as f64 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Index of the node at `alpha = 0`.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    /// Index of the reflected node `-alpha_j` (same node set).
    pub fn reflect(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.n - j
        }
    }
}

/// Parity of a field under `alpha -> -alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    /// Parity of the Hilbert transform / spectral derivative of a field
    /// with this parity.
    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }
}

/// Real samples on a [`PeriodicGrid`] with a declared parity.
///
/// Construction symmetrizes the samples when the declared parity holds to
/// within `1e-12` of the sup norm and rejects them otherwise, so a tagged
/// field is exactly symmetric and downstream parity arguments are exact.
#[derive(Debug, Clone)]
pub struct PeriodicField {
    grid: PeriodicGrid,
    values: Vec<f64>,
    parity: Parity,
}

const PARITY_TOL: f64 = 1e-12;

impl PeriodicField {
    pub fn new(
        grid: PeriodicGrid,
        values: Vec<f64>,
        parity: Parity,
    ) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let mut field = Self {
            grid,
            values,
            parity,
        };
        if parity != Parity::None {
            let scale = field
                .values
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
                .max(1.0);
            let deviation = field.parity_deviation();
            if deviation > PARITY_TOL * scale {
                return Err(SpectralError::ParityViolation {
                    parity,
                    deviation,
                    tol: PARITY_TOL * scale,
                });
            }
            field.symmetrize();
        }
        Ok(field)
    }

    /// Zero field of a given parity.
    pub fn zeros(grid: PeriodicGrid, parity: Parity) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            parity,
        }
    }

    /// Builds a field by sampling `f` at the grid nodes.
    pub fn from_fn(
        grid: PeriodicGrid,
        parity: Parity,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, SpectralError> {
        let values = grid.nodes().iter().map(|&a| f(a)).collect();
        Self::new(grid, values, parity)
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Trapezoid (= spectral) `L^2` norm over one period.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        (self.values.iter().map(|v| v * v).sum::<f64>() * h).sqrt()
    }

    /// `H^1` norm `sqrt(||f||^2 + ||f'||^2)` via the spectral derivative.
    pub fn h1_norm(&self) -> f64 {
        let d = self.derivative();
        self.l2_norm().hypot(d.l2_norm())
    }

    fn parity_deviation(&self) -> f64 {
        let n = self.grid.len();
        let mut dev = 0.0f64;
        match self.parity {
            Parity::Even => {
                for j in 1..n {
                    dev = dev.max((self.values[j] - self.values[n - j]).abs());
                }
            }
            Parity::Odd => {
                dev = dev.max(self.values[0].abs());
                dev = dev.max(self.values[n / 2].abs());
                for j in 1..n {
                    dev = dev.max((self.values[j] + self.values[n - j]).abs());
                }
            }
            Parity::None => {}
        }
        dev
    }

    fn symmetrize(&mut self) {
        let n = self.grid.len();
        match self.parity {
            Parity::Even => {
                for j in 1..n / 2 {
                    let avg = 0.5 * (self.values[j] + self.values[n - j]);
                    self.values[j] = avg;
                    self.values[n - j] = avg;
                }
            }
            Parity::Odd => {
                self.values[0] = 0.0;
                self.values[n / 2] = 0.0;
                for j in 1..n / 2 {
                    let avg = 0.5 * (self.values[j] - self.values[n - j]);
                    self.values[j] = avg;
                    self.values[n - j] = -avg;
                }
            }
            Parity::None => {}
        }
    }

    /// Periodic Hilbert transform (multiplier `i*sgn(k)`, mean and Nyquist
    /// bins zeroed). Maps `cos(m a)` to `-sin(m a)` and `sin` to `cos`.
    pub fn hilbert(&self) -> PeriodicField {
        let out = apply_multiplier_real(&self.values, |k| {
            Complex64::new(0.0, k.signum() as f64)
        });
        PeriodicField {
            grid: self.grid,
            values: out,
            parity: self.parity.flipped(),
        }
        .resymmetrized()
    }

    /// Spectral derivative (multiplier `i*k`, Nyquist zeroed).
    pub fn derivative(&self) -> PeriodicField {
        let out = apply_multiplier_real(&self.values, |k| Complex64::new(0.0, k as f64));
        PeriodicField {
            grid: self.grid,
            values: out,
            parity: self.parity.flipped(),
        }
        .resymmetrized()
    }

    /// Antiderivative with prescribed value at the left endpoint `-pi`.
    ///
    /// The mean part integrates to `mean * (alpha + pi)`; the oscillatory
    /// part uses the `1/(i k)` multiplier. The result is generally
    /// non-periodic and is returned as plain samples.
    pub fn antiderivative_from(&self, base: f64) -> Vec<f64> {
        let m = self.mean();
        let osc = apply_multiplier_real(&self.values, |k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / k as f64)
            }
        });
        let osc0 = osc[0];
        (0..self.len())
            .map(|j| m * (self.grid.node(j) + PI) + osc[j] - osc0 + base)
            .collect()
    }

    /// Restores exact symmetry after an operation whose output parity is
    /// known analytically (roundoff only).
    fn resymmetrized(mut self) -> PeriodicField {
        self.symmetrize();
        self
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let fft = if inverse {
            p.borrow_mut().plan_fft_inverse(buf.len())
        } else {
            p.borrow_mut().plan_fft_forward(buf.len())
        };
        fft.process(buf);
    });
}

/// Signed wavenumber for raw FFT bin `j` of an `n`-point transform.
/// The Nyquist bin maps to `-n/2`.
pub(crate) fn signed_wavenumber(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Applies a diagonal Fourier multiplier to complex samples.
pub(crate) fn apply_multiplier_complex(
    values: &[Complex64],
    mult: impl Fn(i64) -> Complex64,
) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    fft_in_place(&mut buf, false);
    for (j, b) in buf.iter_mut().enumerate() {
        let k = signed_wavenumber(j, n);
        let m = if k == -(n as i64) / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            mult(k)
        };
        *b *= m;
    }
    fft_in_place(&mut buf, true);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|b| *b *= scale);
    buf
}

fn apply_multiplier_real(values: &[f64], mult: impl Fn(i64) -> Complex64) -> Vec<f64> {
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    apply_multiplier_complex(&complex, mult)
        .into_iter()
        .map(|c| c.re)
        .collect()
}

/// Complex antiderivative of periodic complex samples, anchored to `base`
/// at `alpha = -pi`. Returns the (generally non-periodic) samples.
pub(crate) fn antiderivative_complex(
    grid: PeriodicGrid,
    values: &[Complex64],
    base: Complex64,
) -> Vec<Complex64> {
    let n = values.len();
    let mean = values.iter().sum::<Complex64>() / n as f64;
    let osc = apply_multiplier_complex(values, |k| {
        if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0 / k as f64)
        }
    });
    let osc0 = osc[0];
    (0..n)
        .map(|j| mean * (grid.node(j) + PI) + osc[j] - osc0 + base)
        .collect()
}

/// Reconstructs the interface curve from an odd tangent-angle field.
///
/// With `tau = H(theta)` the tangent is `z_alpha = e^{-tau + i theta}`;
/// integrating from the anchored endpoint gives `z(-pi) = -pi`. For a
/// genuine wave profile the mean tangent is `1 + O(spectral)`, so
/// `z(alpha + 2pi) = z(alpha) + 2pi` holds to spectral accuracy.
pub fn curve_from_theta(theta: &PeriodicField) -> Result<Vec<Complex64>, SpectralError> {
    if theta.parity() != Parity::Odd {
        return Err(SpectralError::NonOddInput);
    }
    let mean = theta.mean();
    if mean.abs() > 1e-12 {
        return Err(SpectralError::NonZeroMean(mean));
    }
    let tau = theta.hilbert();
    let zp: Vec<Complex64> = theta
        .values()
        .iter()
        .zip(tau.values())
        .map(|(&th, &ta)| Complex64::from_polar((-ta).exp(), th))
        .collect();
    Ok(antiderivative_complex(
        theta.grid(),
        &zp,
        Complex64::new(-PI, 0.0),
    ))
}

/// Tangent samples `e^{-H theta + i theta}` for an odd tangent angle.
pub fn tangent_from_theta(theta: &PeriodicField) -> Result<Vec<Complex64>, SpectralError> {
    if theta.parity() != Parity::Odd {
        return Err(SpectralError::NonOddInput);
    }
    let tau = theta.hilbert();
    Ok(theta
        .values()
        .iter()
        .zip(tau.values())
        .map(|(&th, &ta)| Complex64::from_polar((-ta).exp(), th))
        .collect())
}

/// Truncated Fourier series fitted through periodic complex samples.
///
/// Coefficients are `c_k = fft_k / N` against the basis `e^{i k (alpha + pi)}`
/// with `k` running over the signed bin numbers (Nyquist at `-N/2`), which
/// reproduces the samples exactly and evaluates anywhere on the line.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    coeffs: Vec<Complex64>,
    n: usize,
}

impl TrigSeries {
    pub fn from_samples(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut buf = values.to_vec();
        fft_in_place(&mut buf, false);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|b| *b *= scale);
        Self { coeffs: buf, n }
    }

    pub fn from_real_samples(values: &[f64]) -> Self {
        let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_samples(&complex)
    }

    /// Unit phases `e^{i k_j (alpha + pi)}` in bin order, built by two
    /// incremental sweeps (positive then negative wavenumbers).
    fn phases(&self, alpha: f64) -> Vec<Complex64> {
        let n = self.n;
        let ph = Complex64::from_polar(1.0, alpha + PI);
        let phc = ph.conj();
        let mut out = vec![Complex64::new(1.0, 0.0); n];
        let mut p = Complex64::new(1.0, 0.0);
        for item in out.iter_mut().take(n / 2) {
            *item = p;
            p *= ph;
        }
        let mut q = phc;
        for j in (n / 2..n).rev() {
            out[j] = q;
            q *= phc;
        }
        out
    }

    fn weighted_sum(&self, alpha: f64, weight: impl Fn(f64) -> Complex64) -> Complex64 {
        let phases = self.phases(alpha);
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, (&c, ph)) in self.coeffs.iter().zip(phases).enumerate() {
            let k = signed_wavenumber(j, self.n) as f64;
            sum += c * weight(k) * ph;
        }
        sum
    }

    pub fn eval(&self, alpha: f64) -> Complex64 {
        self.weighted_sum(alpha, |_| Complex64::new(1.0, 0.0))
    }

    pub fn eval_derivative(&self, alpha: f64) -> Complex64 {
        self.weighted_sum(alpha, |k| Complex64::new(0.0, k))
    }

    pub fn eval_second_derivative(&self, alpha: f64) -> Complex64 {
        self.weighted_sum(alpha, |k| Complex64::new(-k * k, 0.0))
    }

    /// Phases `e^{i k_j (zeta + pi)}` for a complex argument. Off the real
    /// line the two sweeps grow/decay like `e^{|k Im zeta|}`, so callers
    /// should stay within a strip narrow compared to the coefficient decay.
    fn phases_at(&self, zeta: Complex64) -> Vec<Complex64> {
        let n = self.n;
        let arg = Complex64::i() * (zeta + PI);
        let ph = arg.exp();
        let phc = (-arg).exp();
        let mut out = vec![Complex64::new(1.0, 0.0); n];
        let mut p = Complex64::new(1.0, 0.0);
        for item in out.iter_mut().take(n / 2) {
            *item = p;
            p *= ph;
        }
        let mut q = phc;
        for j in (n / 2..n).rev() {
            out[j] = q;
            q *= phc;
        }
        out
    }

    fn weighted_sum_at(&self, zeta: Complex64, weight: impl Fn(f64) -> Complex64) -> Complex64 {
        let phases = self.phases_at(zeta);
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, (&c, ph)) in self.coeffs.iter().zip(phases).enumerate() {
            let k = signed_wavenumber(j, self.n) as f64;
            sum += c * weight(k) * ph;
        }
        sum
    }

    /// Series value at a complex argument.
    pub fn eval_at(&self, zeta: Complex64) -> Complex64 {
        self.weighted_sum_at(zeta, |_| Complex64::new(1.0, 0.0))
    }

    /// Series derivative at a complex argument.
    pub fn eval_derivative_at(&self, zeta: Complex64) -> Complex64 {
        self.weighted_sum_at(zeta, |k| Complex64::new(0.0, k))
    }
}
