//! Parameter continuation and persistent state records.
//!
//! Continuation walks an `(epsilon, g)` schedule with the previous state
//! as predictor and the bordered Gauss-Newton solve as corrector,
//! halving the parameter step on convergence failures.  Whatever part of
//! the branch was accepted is always returned.

use serde::{Deserialize, Serialize};

use crate::spectral::{Parity, PeriodicField};

use super::newton::{newton_solve, NewtonOptions};
use super::residual::{margins, AdmissibilityMargins, SolverContext, SolverState};
use super::{PhysicalParams, SolverError};

/// Deepest step bisection attempted before a target is abandoned.
pub const MAX_HALVINGS: usize = 4;

/// Result of walking a schedule; `states` holds one accepted state per
/// reached target.
#[derive(Debug)]
pub struct BranchOutcome {
    pub states: Vec<SolverState>,
    /// Index of the first failed schedule entry and its error.
    pub failure: Option<(usize, SolverError)>,
}

impl BranchOutcome {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Sequential continuation from `from` through the schedule targets.
pub fn continue_branch(
    ctx: &SolverContext,
    from: &SolverState,
    schedule: &[(f64, f64)],
    opts: &NewtonOptions,
) -> BranchOutcome {
    let mut states = Vec::with_capacity(schedule.len());
    let mut current = from.clone();
    for (i, &(eps, g)) in schedule.iter().enumerate() {
        match advance(ctx, &current, (eps, g), 0, opts) {
            Ok(state) => {
                current = state.clone();
                states.push(state);
            }
            Err(err) => {
                return BranchOutcome {
                    states,
                    failure: Some((i, err)),
                }
            }
        }
    }
    BranchOutcome {
        states,
        failure: None,
    }
}

fn advance(
    ctx: &SolverContext,
    state: &SolverState,
    target: (f64, f64),
    depth: usize,
    opts: &NewtonOptions,
) -> Result<SolverState, SolverError> {
    let params = state.params.with_target(target.0, target.1);
    match newton_solve(ctx, state, params, opts) {
        Ok(next) => Ok(next),
        Err(SolverError::NoConvergence { .. }) if depth < MAX_HALVINGS => {
            let mid = (
                0.5 * (state.params.epsilon + target.0),
                0.5 * (state.params.g + target.1),
            );
            let first = advance(ctx, state, mid, depth + 1, opts)?;
            advance(ctx, &first, target, depth + 1, opts)
        }
        Err(err) => Err(err),
    }
}

/// Flat serialization of one accepted state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub params: PhysicalParams,
    pub alpha_star: f64,
    /// Cosine coefficients (modes `1..=n/2`) of the chart coordinate.
    pub u_coeffs: Vec<f64>,
    /// Vorticity samples on the full grid.
    pub omega_values: Vec<f64>,
    pub kappa_b: f64,
    /// `(Bernoulli H^1, weighted vorticity)` residual norms.
    pub residuals: (f64, f64),
    pub margins: AdmissibilityMargins,
}

impl StateRecord {
    pub fn from_state(ctx: &SolverContext, state: &SolverState) -> Result<Self, SolverError> {
        let chart = ctx.chart();
        let coeffs = chart.cosine_coefficients(&state.chart_offset(chart)?);
        Ok(Self {
            params: state.params,
            alpha_star: state.alpha_star,
            u_coeffs: coeffs.iter().copied().collect(),
            omega_values: state.omega.values().to_vec(),
            kappa_b: state.params.kappa_b,
            residuals: state.residual_norms,
            margins: margins(&state.curve()?)?,
        })
    }

    pub fn into_state(self, ctx: &SolverContext) -> Result<SolverState, SolverError> {
        let chart = ctx.chart();
        let (theta, tau) = chart.theta_tau_from_coefficients(&self.u_coeffs)?;
        if self.omega_values.len() != chart.grid().len() {
            return Err(SolverError::BadParameter {
                name: "omega_values",
                value: self.omega_values.len() as f64,
            });
        }
        let omega = PeriodicField::new(chart.grid(), self.omega_values, Parity::Even)?;
        let mut params = self.params;
        params.kappa_b = self.kappa_b;
        Ok(SolverState {
            params,
            alpha_star: self.alpha_star,
            theta,
            tau,
            omega,
            residual_norms: self.residuals,
            newton_iters: 0,
        })
    }
}
