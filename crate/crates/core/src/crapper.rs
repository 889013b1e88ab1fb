//! Closed-form exact family of capillary waves on a periodic strip, up to
//! and past the self-contact threshold.
//!
//! The family is parametrized by an amplitude `a` in `[0, 1)`.  All
//! quantities come from the complex potential through the factor
//! `x = a e^{-i alpha}`:
//!
//! * tangent angle   `theta = -2 (arg(1+x) - arg(1-x))`, odd in `alpha`,
//! * log speed       `tau   =  2 (ln|1+x| - ln|1-x|)`, even, zero mean,
//! * curve           `z     = alpha + 4i/(1+x) - 4i`,
//! * curve velocity  `z'    = ((1-x)/(1+x))^2 = e^{-tau + i theta}`,
//! * speed factor    `q     = (1+a^2)/(1-a^2)`,
//!
//! satisfying the stationarity relation `q theta' = sinh(H theta)` with the
//! periodic Hilbert transform `H`.
//!
//! At [`SPLASH_AMPLITUDE`] the two crests touch: the curve passes through
//! the imaginary axis at `alpha = ±`[`CONTACT_ABSCISSA`] with a common
//! point, and for larger amplitudes the profile self-intersects.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::quad::golden_min;
use crate::spectral::{Parity, PeriodicField, PeriodicGrid};

/// Amplitude at which the wave first touches itself.
pub const SPLASH_AMPLITUDE: f64 = 0.454_670_016_452_010_88;

/// Abscissa of the touching point at the splash amplitude (the mirror
/// point `-alpha` carries the other side of the contact).
pub const CONTACT_ABSCISSA: f64 = 2.081_575_977_818_100_6;

/// Amplitude `sqrt(2) - 1` where the profile first develops a vertical
/// tangent (`max theta = pi/2`); beyond it the profile overturns.
pub fn vertical_tangent_amplitude() -> f64 {
    2.0_f64.sqrt() - 1.0
}

#[derive(Debug, Error)]
pub enum CrapperError {
    /// The profile does not reach the imaginary axis: no contact point.
    #[error("no contact point: min horizontal offset {residual:.3e} exceeds tolerance")]
    NoContact { residual: f64 },
}

fn factor(a: f64, alpha: f64) -> Complex64 {
    a * Complex64::new(0.0, -alpha).exp()
}

/// Tangent angle of the family member `a` at parameter `alpha`.
pub fn theta(a: f64, alpha: f64) -> f64 {
    let x = factor(a, alpha);
    let one = Complex64::new(1.0, 0.0);
    -2.0 * ((one + x).arg() - (one - x).arg())
}

/// Logarithm of the inverse conformal speed, `|z'| = e^{-tau}`.
pub fn tau(a: f64, alpha: f64) -> f64 {
    let x = factor(a, alpha);
    let one = Complex64::new(1.0, 0.0);
    2.0 * ((one + x).norm().ln() - (one - x).norm().ln())
}

/// Closed-form derivative of [`theta`] in `alpha`.
pub fn theta_derivative(a: f64, alpha: f64) -> f64 {
    let x = factor(a, alpha);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    -2.0 * (-i * x / (one + x) - i * x / (one - x)).im
}

/// Parametrized profile point.
pub fn curve_point(a: f64, alpha: f64) -> Complex64 {
    let x = factor(a, alpha);
    let one = Complex64::new(1.0, 0.0);
    Complex64::new(alpha, 0.0) + 4.0 * Complex64::i() / (one + x) - 4.0 * Complex64::i()
}

/// Derivative `dz/dalpha` in closed form.
pub fn curve_derivative(a: f64, alpha: f64) -> Complex64 {
    let x = factor(a, alpha);
    let one = Complex64::new(1.0, 0.0);
    let r = (one - x) / (one + x);
    r * r
}

/// Propagation speed factor `q = (1+a^2)/(1-a^2)` of the member `a`.
pub fn speed_factor(a: f64) -> f64 {
    (1.0 + a * a) / (1.0 - a * a)
}

/// Tangent angle sampled on a grid as an odd periodic field.
pub fn theta_field(a: f64, grid: PeriodicGrid) -> PeriodicField {
    PeriodicField::from_fn(grid, Parity::Odd, |alpha| theta(a, alpha))
        .expect("closed-form theta is odd on a symmetric grid")
}

/// Log speed sampled on a grid as an even periodic field.
pub fn tau_field(a: f64, grid: PeriodicGrid) -> PeriodicField {
    PeriodicField::from_fn(grid, Parity::Even, |alpha| tau(a, alpha))
        .expect("closed-form tau is even on a symmetric grid")
}

/// Sup norm of `q theta' - sinh(H theta)` on an `n`-point grid.
///
/// This vanishes identically for family members; the discrete value
/// measures only the spectral truncation of `H` and sits at the roundoff
/// floor once `n` resolves the profile.
pub fn stationarity_residual(a: f64, n: usize) -> f64 {
    let grid = PeriodicGrid::new(n).expect("valid grid size");
    let th = theta_field(a, grid);
    let q = speed_factor(a);
    let hth = th.hilbert();
    let mut worst = 0.0f64;
    for (j, &h) in hth.values().iter().enumerate() {
        let r = q * theta_derivative(a, grid.node(j)) - h.sinh();
        worst = worst.max(r.abs());
    }
    worst
}

/// Signed horizontal gap between the two crest lobes of member `a`.
///
/// Minimizes `Re z` over half a period (coarse scan plus golden-section
/// refinement) and returns twice the minimum: positive while the profile
/// is embedded, zero at first touch, negative once it overlaps.
pub fn signed_gap(a: f64) -> f64 {
    let m = 4096;
    let lo = 0.05;
    let hi = PI;
    let mut best = 0usize;
    let mut best_val = f64::INFINITY;
    for j in 0..m {
        let alpha = lo + (hi - lo) * j as f64 / (m - 1) as f64;
        let v = curve_point(a, alpha).re;
        if v < best_val {
            best_val = v;
            best = j;
        }
    }
    let step = (hi - lo) / (m - 1) as f64;
    let left = lo + step * best.saturating_sub(1) as f64;
    let right = (lo + step * (best + 1) as f64).min(hi);
    let alpha_min = golden_min(left, right, 80, |alpha| curve_point(a, alpha).re);
    2.0 * curve_point(a, alpha_min).re
}

/// Amplitude of first self-contact, by bisection on [`signed_gap`].
pub fn find_splash_threshold() -> f64 {
    let mut lo = 0.40;
    let mut hi = 0.50;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if signed_gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Parameter of the point where member `a` meets the imaginary axis.
///
/// At contact the tangent is vertical, so the abscissa is located by
/// Newton on `theta = pi/2` (quadratic convergence through the tangency
/// that defeats direct minimization of `Re z`), then validated against
/// the axis. Members below the threshold report the residual offset.
pub fn contact_abscissa(a: f64) -> Result<f64, CrapperError> {
    let mut t = 2.0;
    for _ in 0..60 {
        let f = theta(a, t) - std::f64::consts::FRAC_PI_2;
        let df = theta_derivative(a, t);
        let step = f / df;
        t -= step;
        if !t.is_finite() {
            return Err(CrapperError::NoContact {
                residual: f64::INFINITY,
            });
        }
        if step.abs() < 1e-15 {
            break;
        }
    }
    let residual = curve_point(a, t).re;
    if residual.abs() <= 1e-12 {
        Ok(t)
    } else {
        Err(CrapperError::NoContact { residual })
    }
}

/// Largest tangent inclination along member `a`.
pub fn max_inclination(a: f64) -> f64 {
    let m = 2048;
    let mut best = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for j in 1..m {
        let alpha = PI * j as f64 / m as f64;
        let v = theta(a, alpha);
        if v > best_val {
            best_val = v;
            best = j;
        }
    }
    let step = PI / m as f64;
    let alpha = golden_min(
        step * (best - 1) as f64,
        step * (best + 1) as f64,
        80,
        |al| -theta(a, al),
    );
    theta(a, alpha)
}
