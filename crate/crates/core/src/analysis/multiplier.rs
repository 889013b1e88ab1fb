//! The two boundary multiplier symbols `tanh(pi xi/2)` and
//! `coth(pi xi/2) - 2/(pi xi)`, their derivatives, and weighted sup
//! searches.
//!
//! Both symbols are sums over a ladder of imaginary pole pairs,
//!
//! `a(xi) = (4/pi) sum_k xi / (xi^2 + b_k^2)`,
//!
//! with `b_k = 2k - 1` for the first kind and `b_k = 2k` for the second,
//! so every derivative has the closed series
//! `D^n a = (-1)^n n! (4/pi) sum_k Re (xi + i b_k)^{-(n+1)}`.
//! The truncated sum is completed by the midpoint integral of the tail,
//! which leaves a rigorously bounded remainder.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::quad::golden_min;

/// Which symbol: the smoothing `tanh` kind or the regularized `coth` kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Tanh,
    RegularizedCoth,
}

/// Weight used in the sup search: `(1 + xi^2)^{n/2}` or `|xi|^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Bracket,
    Plain,
}

#[derive(Debug, Error)]
pub enum MultiplierError {
    #[error("series remainder bound {bound:.3e} exceeds 1e-8 of the sup {sup:.3e}")]
    TailBoundTooLarge { bound: f64, sup: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SupResult {
    pub sup: f64,
    pub argmax: f64,
    /// Certified bound on the series remainder of the reported sup.
    pub remainder: f64,
}

fn pole_offset(sym: Symbol, k: usize) -> f64 {
    match sym {
        Symbol::Tanh => (2 * k - 1) as f64,
        Symbol::RegularizedCoth => (2 * k) as f64,
    }
}

/// Closed-form symbol value; the regularized kind switches to its Taylor
/// form near zero where the two singular halves cancel.
pub fn value(sym: Symbol, xi: f64) -> f64 {
    match sym {
        Symbol::Tanh => (0.5 * PI * xi).tanh(),
        Symbol::RegularizedCoth => {
            if xi.abs() < 1e-2 {
                let t = 0.5 * PI * xi;
                t / 3.0 - t * t * t / 45.0 + 2.0 * t.powi(5) / 945.0
            } else {
                1.0 / (0.5 * PI * xi).tanh() - 2.0 / (PI * xi)
            }
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `D^n a(xi)` by the pole-pair series with `terms` explicit poles and a
/// midpoint tail integral.
pub fn derivative(sym: Symbol, n: usize, xi: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    for k in 1..=terms {
        let w = Complex64::new(xi, pole_offset(sym, k));
        let inv = 1.0 / w;
        let mut p = inv;
        for _ in 0..n {
            p *= inv;
        }
        sum += p.re;
    }
    let b_mid = pole_offset(sym, terms) + 1.0;
    let tail = if n == 0 {
        0.5 * (0.5 * PI - (b_mid / xi).atan())
    } else {
        let w = Complex64::new(xi, b_mid);
        let inv = 1.0 / w;
        let mut p = inv;
        for _ in 1..n {
            p *= inv;
        }
        p.im / (2.0 * n as f64)
    };
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * factorial(n) * (4.0 / PI) * (sum + tail)
}

/// Bound on the absolute error of [`derivative`] left after the midpoint
/// tail correction.
pub fn remainder_bound(n: usize, terms: usize) -> f64 {
    let b = 2.0 * terms as f64;
    factorial(n) * (4.0 / PI) * (n as f64 + 1.0) / (12.0 * b.powi(n as i32 + 2))
}

fn weight_factor(weight: Weight, n: usize, xi: f64) -> f64 {
    match weight {
        Weight::Bracket => (1.0 + xi * xi).powf(0.5 * n as f64),
        Weight::Plain => xi.abs().powi(n as i32),
    }
}

/// Sup over `xi >= 0` of `weight(xi) |D^n a(xi)|`, by a coarse-plus-
/// geometric scan refined with golden section. Errors out when the series
/// remainder is not small next to the reported sup.
pub fn sup_weighted(
    sym: Symbol,
    n: usize,
    weight: Weight,
    terms: usize,
) -> Result<SupResult, MultiplierError> {
    let g = |xi: f64| weight_factor(weight, n, xi) * derivative(sym, n, xi, terms).abs();
    let mut best_x = 0.0f64;
    let mut best = -1.0f64;
    for i in 0..=2000 {
        let x = i as f64 / 200.0;
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    for i in 0..=105 {
        let x = 10.0 * 1.02f64.powi(i);
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let lo = (best_x - 0.01).max(0.0);
    let hi = best_x + 0.01;
    let xm = golden_min(lo, hi, 60, |x| -g(x));
    let sup = g(xm);
    let remainder = weight_factor(weight, n, xm.max(82.0)) * remainder_bound(n, terms);
    if remainder > 1e-8 * sup {
        return Err(MultiplierError::TailBoundTooLarge {
            bound: remainder,
            sup,
        });
    }
    Ok(SupResult {
        sup,
        argmax: xm,
        remainder,
    })
}
