//! Coupled stationary residual, state containers, and admissibility
//! margins.
//!
//! The Bernoulli block balances surface tension, the hodograph stretch,
//! gravity, the Bernoulli constant, and the vortex-sheet pressure; the
//! vorticity block is the sheet equation `omega + S omega / pi - 2 +
//! forcing`.  Both are even fields on the periodic grid.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::crapper;
use crate::geometry::{self, NormMesh, WaveCurve};
use crate::operators::{self, HalfOperator, VorticityForm};
use crate::spectral::{Parity, PeriodicField, PeriodicGrid, TrigSeries};

use super::chart::ConstraintChart;
use super::{PhysicalParams, SolverError};

/// Radius of the ball around the contact abscissa on which the pointwise
/// admissibility margins are monitored.
pub const MARGIN_RADIUS: f64 = 0.2;

/// Exponents of the weighted vorticity-residual norm.
const WEIGHT_P: f64 = 2.0;
const WEIGHT_BETA: f64 = 0.3;

/// One accepted point of the stationary problem.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub params: PhysicalParams,
    pub alpha_star: f64,
    /// Tangent angle (odd).
    pub theta: PeriodicField,
    /// Log speed (even); the Hilbert transform of `theta` up to a
    /// constant shift.
    pub tau: PeriodicField,
    /// Vorticity density (even).
    pub omega: PeriodicField,
    /// `(H^1 norm of the Bernoulli residual, weighted Sobolev norm of
    /// the vorticity residual)`.
    pub residual_norms: (f64, f64),
    pub newton_iters: usize,
}

impl SolverState {
    /// The marked interface curve of this state.
    pub fn curve(&self) -> Result<WaveCurve, SolverError> {
        Ok(WaveCurve::from_theta_tau(&self.theta, &self.tau)?.with_contact(self.alpha_star))
    }

    /// Chart coordinate samples `Re z_alpha - u_base`.
    pub fn chart_offset(&self, chart: &ConstraintChart) -> Result<PeriodicField, SolverError> {
        let vals: Vec<f64> = self
            .theta
            .values()
            .iter()
            .zip(self.tau.values())
            .zip(chart.base())
            .map(|((&th, &ta), &base)| (-ta).exp() * th.cos() - base)
            .collect();
        Ok(PeriodicField::new(self.theta.grid(), vals, Parity::Even)?)
    }
}

/// Quiescent state: flat interface, unit vorticity, and the Bernoulli
/// constant that balances the sheet pressure.
pub fn flat_state(
    grid: PeriodicGrid,
    epsilon: f64,
    g: f64,
    q: f64,
) -> Result<SolverState, SolverError> {
    let params = PhysicalParams::new(epsilon, g, q, epsilon / 4.0)?;
    Ok(SolverState {
        params,
        alpha_star: 0.0,
        theta: PeriodicField::zeros(grid, Parity::Odd),
        tau: PeriodicField::zeros(grid, Parity::Even),
        omega: PeriodicField::from_fn(grid, Parity::Even, |_| 1.0)?,
        residual_norms: (0.0, 0.0),
        newton_iters: 0,
    })
}

/// Bernoulli residual of a curve/vorticity/parameter triple.
pub fn bernoulli_residual(
    curve: &WaveCurve,
    omega: &PeriodicField,
    params: &PhysicalParams,
) -> PeriodicField {
    let theta_alpha = curve.theta().derivative();
    let vals = bernoulli_samples(curve, theta_alpha.values(), omega.values(), params);
    even_field(curve.grid(), vals)
}

/// Vorticity residual of a curve/vorticity pair; assembles the singular
/// operator from scratch.
pub fn vorticity_residual(
    curve: &WaveCurve,
    omega: &PeriodicField,
    form: VorticityForm,
) -> PeriodicField {
    let half = HalfOperator::new(curve, None);
    let vals = vorticity_samples(curve, &half, omega.values(), form);
    even_field(curve.grid(), vals)
}

fn bernoulli_samples(
    curve: &WaveCurve,
    theta_alpha: &[f64],
    omega: &[f64],
    params: &PhysicalParams,
) -> Vec<f64> {
    let tension = params.q * (1.0 + params.epsilon / 2.0);
    let sheet = params.epsilon / 4.0;
    let tau = curve.tau().values();
    (0..curve.grid().len())
        .map(|j| {
            let decay = (-tau[j]).exp();
            tension * theta_alpha[j] - tau[j].sinh() + params.g * decay * curve.z()[j].im
                - params.kappa_b * decay
                - sheet * tau[j].exp() * omega[j] * (omega[j] - 2.0)
        })
        .collect()
}

fn vorticity_samples(
    curve: &WaveCurve,
    half: &HalfOperator,
    omega: &[f64],
    form: VorticityForm,
) -> Vec<f64> {
    let n = curve.grid().len();
    let s_omega = half.apply(omega);
    (0..n)
        .map(|j| {
            let forcing = match form {
                VorticityForm::CosTheta => curve.theta().values()[j].cos(),
                VorticityForm::Tangent => curve.zp()[j].re,
            };
            omega[j] + s_omega[j.min(n - j)] / std::f64::consts::PI - 2.0 + forcing
        })
        .collect()
}

fn even_field(grid: PeriodicGrid, mut vals: Vec<f64>) -> PeriodicField {
    let n = grid.len();
    for j in 1..n / 2 {
        let avg = 0.5 * (vals[j] + vals[n - j]);
        vals[j] = avg;
        vals[n - j] = avg;
    }
    PeriodicField::new(grid, vals, Parity::Even).expect("symmetrized samples are even")
}

/// Pointwise admissibility margins of a marked curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityMargins {
    /// Arc-chord sup with the contact window excluded; finite on
    /// chord-arc curves.
    pub chord_arc_sup: f64,
    /// Largest tangent-angle slope over the monitored ball; strictly
    /// negative on admissible states.
    pub slope_max: f64,
    /// Smallest vertical tangent component over the monitored ball;
    /// strictly positive on admissible states.
    pub lift_min: f64,
}

impl AdmissibilityMargins {
    pub fn admissible(&self) -> bool {
        self.chord_arc_sup.is_finite() && self.slope_max < 0.0 && self.lift_min > 0.0
    }
}

/// Margins over the ball `B(alpha_star, MARGIN_RADIUS)` on both symmetric
/// sides of the contact.
pub fn margins(curve: &WaveCurve) -> Result<AdmissibilityMargins, SolverError> {
    let ast = curve
        .alpha_star()
        .ok_or(geometry::GeometryError::ContactRequired)?;
    let theta_alpha = curve.theta().derivative();
    let mut slope_max = f64::NEG_INFINITY;
    let mut lift_min = f64::INFINITY;
    for (j, &al) in curve.grid().nodes().iter().enumerate() {
        let dist = circular_distance(al, ast).min(circular_distance(al, -ast));
        if dist <= MARGIN_RADIUS {
            slope_max = slope_max.max(theta_alpha.values()[j]);
            lift_min = lift_min.min(curve.zp()[j].im);
        }
    }
    Ok(AdmissibilityMargins {
        chord_arc_sup: curve.arc_chord_sup(MARGIN_RADIUS),
        slope_max,
        lift_min,
    })
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = a - b;
    d.sin().atan2(d.cos()).abs()
}

/// Shared evaluation context: the chart, the vorticity forcing form, and
/// a pole warm-start cache reused across nearby curve assemblies.
pub struct SolverContext {
    chart: ConstraintChart,
    form: VorticityForm,
    warm: RefCell<Vec<(usize, Complex64)>>,
}

impl SolverContext {
    pub fn new(chart: ConstraintChart, form: VorticityForm) -> Self {
        Self {
            chart,
            form,
            warm: RefCell::new(Vec::new()),
        }
    }

    pub fn chart(&self) -> &ConstraintChart {
        &self.chart
    }

    pub fn form(&self) -> VorticityForm {
        self.form
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.chart.grid()
    }

    /// Marked curve and streaming operator for a state, reusing the pole
    /// table of the previous assembly as a warm start.
    pub fn curve_operator(
        &self,
        theta: &PeriodicField,
        tau: &PeriodicField,
    ) -> Result<(WaveCurve, HalfOperator), SolverError> {
        let curve =
            WaveCurve::from_theta_tau(theta, tau)?.with_contact(self.chart.alpha_star());
        let warm = self.warm.borrow().clone();
        let half = HalfOperator::new(&curve, if warm.is_empty() { None } else { Some(&warm) });
        *self.warm.borrow_mut() = half.poles().to_vec();
        Ok((curve, half))
    }

    /// Critical exact-family seed with its induced vorticity.
    pub fn critical_state(&self, q: f64) -> Result<SolverState, SolverError> {
        let theta = crapper::theta_field(crapper::SPLASH_AMPLITUDE, self.grid());
        let tau = theta.hilbert();
        let curve =
            WaveCurve::from_theta_tau(&theta, &tau)?.with_contact(self.chart.alpha_star());
        let sol = operators::solve_vorticity(&curve, self.form)?;
        let mut state = SolverState {
            params: PhysicalParams::new(0.0, 0.0, q, 0.0)?,
            alpha_star: self.chart.alpha_star(),
            theta,
            tau,
            omega: sol.omega,
            residual_norms: (0.0, 0.0),
            newton_iters: 0,
        };
        self.set_norms(&mut state)?;
        Ok(state)
    }

    /// Both residual blocks as raw node samples.
    pub(crate) fn residual_samples(
        &self,
        curve: &WaveCurve,
        half: &HalfOperator,
        omega: &[f64],
        params: &PhysicalParams,
    ) -> (Vec<f64>, Vec<f64>) {
        let theta_alpha = curve.theta().derivative();
        (
            bernoulli_samples(curve, theta_alpha.values(), omega, params),
            vorticity_samples(curve, half, omega, self.form),
        )
    }

    /// Bernoulli residual of a state, through the warm-started pipeline.
    pub fn residual_g1(&self, state: &SolverState) -> Result<PeriodicField, SolverError> {
        let (curve, _) = self.curve_operator(&state.theta, &state.tau)?;
        Ok(bernoulli_residual(&curve, &state.omega, &state.params))
    }

    /// Vorticity residual of a state.
    pub fn residual_g2(&self, state: &SolverState) -> Result<PeriodicField, SolverError> {
        let (curve, half) = self.curve_operator(&state.theta, &state.tau)?;
        let vals = vorticity_samples(&curve, &half, state.omega.values(), self.form);
        Ok(even_field(curve.grid(), vals))
    }

    /// Sup norm over both residual blocks.
    pub fn residual_sup(&self, state: &SolverState) -> Result<f64, SolverError> {
        let (curve, half) = self.curve_operator(&state.theta, &state.tau)?;
        let (g1, g2) =
            self.residual_samples(&curve, &half, state.omega.values(), &state.params);
        Ok(g1
            .iter()
            .chain(g2.iter())
            .fold(0.0f64, |m, v| m.max(v.abs())))
    }

    /// Recomputes and stores the residual norms of a state.
    pub(crate) fn set_norms(&self, state: &mut SolverState) -> Result<(), SolverError> {
        let (curve, half) = self.curve_operator(&state.theta, &state.tau)?;
        let (g1, g2) =
            self.residual_samples(&curve, &half, state.omega.values(), &state.params);
        let g1f = even_field(curve.grid(), g1);
        let g2f = even_field(curve.grid(), g2);
        state.residual_norms = (
            g1f.h1_norm(),
            weighted_sobolev(&g2f, state.alpha_star)?,
        );
        Ok(())
    }
}

/// Weighted Sobolev norm `(|f|^p + |f'|^p)^{1/p}` in the power-weighted
/// Lebesgue norm centered at the contact abscissa.
fn weighted_sobolev(field: &PeriodicField, ast: f64) -> Result<f64, SolverError> {
    let series = TrigSeries::from_real_samples(field.values());
    let mesh = NormMesh::default();
    let base = geometry::weighted_norm(|s| series.eval(s).re, ast, WEIGHT_P, WEIGHT_BETA, &mesh)?;
    let slope = geometry::weighted_norm(
        |s| series.eval_derivative(s).re,
        ast,
        WEIGHT_P,
        WEIGHT_BETA,
        &mesh,
    )?;
    Ok((base.powf(WEIGHT_P) + slope.powf(WEIGHT_P)).powf(1.0 / WEIGHT_P))
}
