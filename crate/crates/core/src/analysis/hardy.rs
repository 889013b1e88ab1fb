//! Weighted averaging transforms on a graded interval mesh and their
//! discrete compactness diagnostics.
//!
//! The left transform is `(Lf)(x) = int_0^x f`, the right one
//! `int_x^R f`; conjugated by the power weights `x^gamma`, `x^-beta` and
//! the quadrature half-cell weights they become finite matrices whose
//! singular-value decay separates the compact interior regime from the
//! borderline endpoint regime.

use nalgebra::DMatrix;

use crate::quad;
use crate::rng::GaussianStream;

/// Direction of the averaging transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Discretization of the weighted transform on `(0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    /// Weight exponent applied to the input, as `x^-beta`.
    pub beta: f64,
    /// Weight exponent applied to the output, as `x^gamma`.
    pub gamma: f64,
    /// Number of mesh cells.
    pub size: usize,
    pub side: Side,
    /// Conjugate by the square-root cell weights (the isometry onto
    /// weighted `l^2`).
    pub weighted: bool,
    /// Use the cubically graded mesh instead of the uniform one.
    pub graded: bool,
}

/// Cumulative integral from the left endpoint, at the nodes.
pub fn left_cumulative(xs: &[f64], fs: &[f64]) -> Vec<f64> {
    quad::cumulative_integral(xs, fs)
}

/// Remaining integral up to the right endpoint, at the nodes.
pub fn right_cumulative(xs: &[f64], fs: &[f64]) -> Vec<f64> {
    let cum = quad::cumulative_integral(xs, fs);
    let total = *cum.last().unwrap_or(&0.0);
    cum.into_iter().map(|v| total - v).collect()
}

/// Singular values (descending) of the discretized weighted transform.
pub fn compactness_probe(cfg: &ProbeConfig) -> Vec<f64> {
    let m = cfg.size;
    let xs: Vec<f64> = (1..=m)
        .map(|k| {
            let t = k as f64 / m as f64;
            if cfg.graded {
                t * t * t
            } else {
                t
            }
        })
        .collect();
    let mut hs = vec![0.0; m];
    hs[0] = xs[0];
    for j in 1..m {
        hs[j] = xs[j] - xs[j - 1];
    }
    let mut w = vec![0.0; m];
    for j in 0..m {
        let next = if j + 1 < m { hs[j + 1] } else { 0.0 };
        w[j] = 0.5 * (hs[j] + next);
    }
    w[0] += 0.5 * hs[0];
    // trapezoid over interior nodes, first cell as a rectangle
    let mut l = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        l[(i, 0)] = hs[0];
        for j in 0..i {
            l[(i, j)] += 0.5 * hs[j + 1];
        }
        for j in 1..=i {
            l[(i, j)] += 0.5 * hs[j];
        }
    }
    if cfg.side == Side::Right {
        let last: Vec<f64> = (0..m).map(|j| l[(m - 1, j)]).collect();
        for i in 0..m {
            for j in 0..m {
                l[(i, j)] = last[j] - l[(i, j)];
            }
        }
    }
    let mut b = l;
    for i in 0..m {
        let ri = if cfg.weighted {
            xs[i].powf(cfg.gamma) * w[i].sqrt()
        } else {
            xs[i].powf(cfg.gamma)
        };
        for j in 0..m {
            let cj = if cfg.weighted {
                xs[j].powf(-cfg.beta) / w[j].sqrt()
            } else {
                xs[j].powf(-cfg.beta)
            };
            b[(i, j)] *= ri * cj;
        }
    }
    // singular values through the Gram matrix; the probe ratios live far
    // above the sqrt of eigenvalue roundoff
    let gram = b.transpose() * &b;
    let eig = gram.symmetric_eigenvalues();
    let mut sv: Vec<f64> = eig.iter().map(|&v| v.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Empirical bound constant of the left transform between the weighted
/// spaces `x^beta L^2 -> x^{beta-1} L^2`, over pseudorandom half-integer
/// power sums; deterministic in the seed.
pub fn empirical_constant(size: usize, beta: f64, draws: usize, seed: u64) -> f64 {
    let xs = quad::graded_nodes(1.0, size);
    let mut stream = GaussianStream::new(seed);
    let mut best = 0.0f64;
    for _ in 0..draws {
        let coeffs: Vec<f64> = (0..6).map(|_| stream.next_normal()).collect();
        let f: Vec<f64> = xs
            .iter()
            .map(|&x| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c * x.powf(k as f64 / 2.0))
                    .sum()
            })
            .collect();
        let lf = quad::cumulative_integral(&xs, &f);
        let num_arg: Vec<f64> = xs
            .iter()
            .zip(&lf)
            .skip(1)
            .map(|(&x, &v)| v * v * x.powf(2.0 * (beta - 1.0)))
            .collect();
        let num = quad::integral(&xs[1..], &num_arg).sqrt();
        let den_arg: Vec<f64> = xs
            .iter()
            .zip(&f)
            .map(|(&x, &v)| v * v * x.powf(2.0 * beta))
            .collect();
        let den = quad::integral(&xs, &den_arg).sqrt();
        if den > 1e-12 {
            best = best.max(num / den);
        }
    }
    best
}
