//! Constrained stationary solver for the two-fluid interface problem.
//!
//! States couple a tangent-angle curve description with the interface
//! vorticity density and a Bernoulli constant.  The solver works on a
//! splash-pinned chart: even chart coordinates orthogonal to the point,
//! mean, and closure constraints at the contact abscissa, with the
//! Bernoulli constant as the extra bordered unknown absorbing the rank-1
//! cokernel of the linearization.  Continuation in the density ratio and
//! gravity starts from the critical capillary state.
//!
//! The bordered Gauss-Newton iteration lives in [`newton_solve`]; the
//! relaxed root finder in plain tangent-angle coordinates (no chart
//! constraints, free log-speed mean) in [`relaxed_root`]; schedule
//! continuation with step halving in [`continue_branch`].

mod branch;
mod chart;
mod newton;
mod relaxed;
mod residual;

pub use branch::{continue_branch, BranchOutcome, StateRecord, MAX_HALVINGS};
pub use chart::ConstraintChart;
pub use newton::{
    assemble_jacobian, jacobian_fd_check, newton_solve, rank_monitor, NewtonOptions, RankMonitor,
};
pub use relaxed::{relaxed_root, RelaxedOptions, RelaxedRoot};
pub use residual::{
    bernoulli_residual, flat_state, margins, vorticity_residual, AdmissibilityMargins,
    SolverContext, SolverState, MARGIN_RADIUS,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::operators::OperatorError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("parameter {name} = {value} outside admissible range")]
    BadParameter { name: &'static str, value: f64 },
    #[error("tangent angle reconstruction ambiguous near alpha = {alpha:.6}")]
    BranchAmbiguity { alpha: f64 },
    #[error(
        "no convergence after {iters} iterations: residual sup {residual_sup:.3e}, \
         gradient ratio {gradient_ratio:.1e}, stalled: {stalled}"
    )]
    NoConvergence {
        /// Lowest-residual state reached.
        best: Box<SolverState>,
        iters: usize,
        residual_sup: f64,
        /// `|J^T R| / (|J| |R|)` at the last iterate; near zero at a
        /// genuine least-squares stationary point.
        gradient_ratio: f64,
        stalled: bool,
    },
    #[error("admissibility lost: {0}")]
    AdmissibilityLost(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Physical constants of the stationary problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Density ratio `2 rho_1 / (rho_2 - rho_1)` of the two fluids.
    pub epsilon: f64,
    /// Gravity strength.
    pub g: f64,
    /// Surface-tension speed factor; strictly positive.
    pub q: f64,
    /// Bernoulli integration constant.
    pub kappa_b: f64,
}

impl PhysicalParams {
    pub fn new(epsilon: f64, g: f64, q: f64, kappa_b: f64) -> Result<Self, SolverError> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(SolverError::BadParameter { name: "q", value: q });
        }
        for (name, value) in [("epsilon", epsilon), ("g", g), ("kappa_b", kappa_b)] {
            if !value.is_finite() {
                return Err(SolverError::BadParameter { name, value });
            }
        }
        Ok(Self {
            epsilon,
            g,
            q,
            kappa_b,
        })
    }

    /// Single-fluid zero-gravity parameters at the critical wave speed.
    pub fn critical() -> Self {
        Self {
            epsilon: 0.0,
            g: 0.0,
            q: crate::crapper::speed_factor(crate::crapper::SPLASH_AMPLITUDE),
            kappa_b: 0.0,
        }
    }

    /// Same constants pointed at a new `(epsilon, g)` target.
    pub fn with_target(self, epsilon: f64, g: f64) -> Self {
        Self {
            epsilon,
            g,
            ..self
        }
    }
}
