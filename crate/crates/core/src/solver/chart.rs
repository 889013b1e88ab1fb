//! Splash-pinned constraint chart.
//!
//! The chart coordinate is an even mean-free field `u` expanded in cosine
//! modes and restricted to the null space of three linear constraints at
//! the contact abscissa: the point value `u(a*) = 0`, the running mean
//! `int_0^{a*} u = 0`, and the closure `int_0^{a*} Hu = 0`.  Adding the
//! reference coordinate of the critical wave and reading the polar angle
//! of `(u + u_A) + i H(u + u_A)` recovers the tangent angle and log
//! speed of the perturbed curve.

use nalgebra::{DMatrix, DVector};

use crate::crapper;
use crate::spectral::{Parity, PeriodicField, PeriodicGrid};

use super::SolverError;

pub struct ConstraintChart {
    grid: PeriodicGrid,
    alpha_star: f64,
    u_base: Vec<f64>,
    /// Constraint functionals on cosine coefficients, row per constraint.
    cmat: DMatrix<f64>,
    /// Orthonormal null basis of `cmat` in coefficient space.
    basis: DMatrix<f64>,
    /// Node samples of the cosine modes `m = 1..=n/2`.
    modes: DMatrix<f64>,
    /// Node synthesis of the basis columns, `modes * basis`.
    synth: DMatrix<f64>,
}

impl ConstraintChart {
    /// Chart around an arbitrary even reference coordinate; `u_base` is
    /// symmetrized.
    pub fn new(grid: PeriodicGrid, alpha_star: f64, mut u_base: Vec<f64>) -> Self {
        let n = grid.len();
        assert_eq!(u_base.len(), n, "reference coordinate length mismatch");
        for j in 1..n / 2 {
            let avg = 0.5 * (u_base[j] + u_base[n - j]);
            u_base[j] = avg;
            u_base[n - j] = avg;
        }
        let m = n / 2;
        let mut cmat = DMatrix::<f64>::zeros(3, m);
        for mm in 1..=m {
            let (s, c) = (mm as f64 * alpha_star).sin_cos();
            cmat[(0, mm - 1)] = c;
            cmat[(1, mm - 1)] = s / mm as f64;
            cmat[(2, mm - 1)] = (c - 1.0) / mm as f64;
        }
        let basis = null_basis(&cmat);
        let mut modes = DMatrix::<f64>::zeros(n, m);
        for j in 0..=n / 2 {
            let al = grid.node(j);
            for mm in 1..=m {
                let v = (mm as f64 * al).cos();
                modes[(j, mm - 1)] = v;
                if j != 0 && j != n / 2 {
                    modes[(n - j, mm - 1)] = v;
                }
            }
        }
        let synth = &modes * &basis;
        Self {
            grid,
            alpha_star,
            u_base,
            cmat,
            basis,
            modes,
            synth,
        }
    }

    /// Chart anchored at the critical self-touching wave.
    pub fn critical(grid: PeriodicGrid) -> Self {
        let theta = crapper::theta_field(crapper::SPLASH_AMPLITUDE, grid);
        let tau = theta.hilbert();
        let u_base: Vec<f64> = theta
            .values()
            .iter()
            .zip(tau.values())
            .map(|(&th, &ta)| (-ta).exp() * th.cos())
            .collect();
        Self::new(grid, crapper::CONTACT_ABSCISSA, u_base)
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }

    /// Dimension of the constrained coordinate space, `n/2 - 3`.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Reference coordinate samples.
    pub fn base(&self) -> &[f64] {
        &self.u_base
    }

    /// Chart coordinate samples at reduced coordinates `y`.
    pub fn offset(&self, y: &DVector<f64>) -> PeriodicField {
        assert_eq!(y.len(), self.dim(), "reduced coordinate length mismatch");
        let u = &self.synth * y;
        PeriodicField::new(self.grid, u.iter().copied().collect(), Parity::Even)
            .expect("mode synthesis is even")
    }

    /// Tangent angle and log speed at reduced coordinates `y`.
    pub fn theta_tau(
        &self,
        y: &DVector<f64>,
    ) -> Result<(PeriodicField, PeriodicField), SolverError> {
        let u = &self.synth * y;
        self.theta_tau_from_samples(u.as_slice())
    }

    /// Tangent angle and log speed from a full cosine-coefficient vector
    /// of the chart coordinate (modes `1..=n/2`).
    pub fn theta_tau_from_coefficients(
        &self,
        coeffs: &[f64],
    ) -> Result<(PeriodicField, PeriodicField), SolverError> {
        if coeffs.len() != self.grid.len() / 2 {
            return Err(SolverError::BadParameter {
                name: "u_coeffs",
                value: coeffs.len() as f64,
            });
        }
        let c = DVector::from_column_slice(coeffs);
        let u = &self.modes * c;
        self.theta_tau_from_samples(u.as_slice())
    }

    fn theta_tau_from_samples(
        &self,
        u: &[f64],
    ) -> Result<(PeriodicField, PeriodicField), SolverError> {
        let n = self.grid.len();
        let total: Vec<f64> = (0..n).map(|j| u[j] + self.u_base[j]).collect();
        let ufield = PeriodicField::new(self.grid, total, Parity::Even)?;
        let hu = ufield.hilbert();
        let mut th = vec![0.0; n];
        let mut ta = vec![0.0; n];
        for j in 0..n {
            let uu = ufield.values()[j];
            let hh = hu.values()[j];
            let r2 = uu * uu + hh * hh;
            if !(r2 > 1e-24) {
                return Err(SolverError::BranchAmbiguity {
                    alpha: self.grid.node(j),
                });
            }
            th[j] = hh.atan2(uu);
            ta[j] = -0.5 * r2.ln();
        }
        let theta = PeriodicField::new(self.grid, th, Parity::Odd)?;
        let tau = PeriodicField::new(self.grid, ta, Parity::Even)?;
        Ok((theta, tau))
    }

    /// Cosine coefficients (modes `1..=n/2`) of an even field, in the
    /// synthesis convention of this chart.
    pub fn cosine_coefficients(&self, f: &PeriodicField) -> DVector<f64> {
        let n = self.grid.len();
        let v = DVector::from_column_slice(f.values());
        self.modes.transpose() * v * (2.0 / n as f64)
    }

    /// Projection of a coordinate field onto the constrained subspace.
    pub fn project(&self, u: &PeriodicField) -> DVector<f64> {
        self.basis.transpose() * self.cosine_coefficients(u)
    }

    /// The three constraint functionals; zero on the chart.
    pub fn constraint_residuals(&self, u: &PeriodicField) -> [f64; 3] {
        let r = &self.cmat * self.cosine_coefficients(u);
        [r[0], r[1], r[2]]
    }
}

/// Orthonormal basis of the null space of a short fat matrix, by
/// Gram-Schmidt sweep over the coordinate directions.
fn null_basis(cmat: &DMatrix<f64>) -> DMatrix<f64> {
    let m = cmat.ncols();
    let rows = cmat.nrows();
    let mut ortho: Vec<DVector<f64>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut v: DVector<f64> = cmat.row(r).transpose();
        for _ in 0..2 {
            for q in &ortho {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        let norm = v.norm();
        assert!(norm > 1e-12, "degenerate constraint rows");
        ortho.push(v / norm);
    }
    let keep = m - rows;
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(keep);
    for j in 0..m {
        if cols.len() == keep {
            break;
        }
        let mut v = DVector::<f64>::zeros(m);
        v[j] = 1.0;
        for _ in 0..2 {
            for q in ortho.iter().chain(cols.iter()) {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    assert_eq!(cols.len(), keep, "null basis incomplete");
    DMatrix::from_columns(&cols)
}
