//! Bordered Gauss-Newton iteration on the chart unknowns and rank
//! diagnostics of the Bernoulli border.
//!
//! Unknowns are the reduced chart coordinates, the even vorticity half
//! (nodes `0..=n/2`), and the Bernoulli constant; equations are the two
//! residual blocks on the full grid, solved in the least-squares sense.
//! Linear dependencies (the vorticity block, the Bernoulli column) are
//! assembled analytically; the chart columns by central differences.

use nalgebra::{DMatrix, DVector, SVD};

use crate::rng::GaussianStream;
use crate::spectral::{Parity, PeriodicField};

use super::residual::{margins, SolverContext, SolverState};
use super::{PhysicalParams, SolverError};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Convergence threshold on the residual sup.
    pub tol_sup: f64,
    pub max_iters: usize,
    /// Central-difference step for the chart columns.
    pub fd_step: f64,
    /// Abort once the residual stops decreasing instead of burning the
    /// full budget; the stall and the gradient ratio are reported in the
    /// convergence error.
    pub stall_exit: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol_sup: 1e-10,
            max_iters: 25,
            fd_step: 1e-6,
            stall_exit: true,
        }
    }
}

struct Unknowns {
    y: DVector<f64>,
    omega_half: DVector<f64>,
    kappa: f64,
}

impl Unknowns {
    fn of_state(ctx: &SolverContext, state: &SolverState) -> Result<Self, SolverError> {
        let n = ctx.grid().len();
        let y = ctx.chart().project(&state.chart_offset(ctx.chart())?);
        let omega_half = DVector::from_iterator(
            n / 2 + 1,
            state.omega.values().iter().take(n / 2 + 1).copied(),
        );
        Ok(Self {
            y,
            omega_half,
            kappa: state.params.kappa_b,
        })
    }

    fn omega_full(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.omega_half[j.min(n - j)]).collect()
    }

    fn apply_step(&mut self, dx: &DVector<f64>) {
        let dim = self.y.len();
        let half = self.omega_half.len();
        for c in 0..dim {
            self.y[c] += dx[c];
        }
        for c in 0..half {
            self.omega_half[c] += dx[dim + c];
        }
        self.kappa += dx[dim + half];
    }
}

fn stacked_residual(
    ctx: &SolverContext,
    y: &DVector<f64>,
    omega_full: &[f64],
    params: &PhysicalParams,
) -> Result<DVector<f64>, SolverError> {
    let (theta, tau) = ctx.chart().theta_tau(y)?;
    let (curve, half) = ctx.curve_operator(&theta, &tau)?;
    let (g1, g2) = ctx.residual_samples(&curve, &half, omega_full, params);
    Ok(DVector::from_iterator(
        g1.len() + g2.len(),
        g1.into_iter().chain(g2),
    ))
}

fn jacobian(
    ctx: &SolverContext,
    unknowns: &Unknowns,
    params: &PhysicalParams,
    fd_step: f64,
) -> Result<DMatrix<f64>, SolverError> {
    let n = ctx.grid().len();
    let half = n / 2 + 1;
    let dim = unknowns.y.len();
    let omega_full = unknowns.omega_full(n);
    let mut jac = DMatrix::<f64>::zeros(2 * n, dim + half + 1);
    let mut y = unknowns.y.clone();
    for c in 0..dim {
        y[c] += fd_step;
        let rp = stacked_residual(ctx, &y, &omega_full, params)?;
        y[c] -= 2.0 * fd_step;
        let rm = stacked_residual(ctx, &y, &omega_full, params)?;
        y[c] += fd_step;
        for r in 0..2 * n {
            jac[(r, c)] = (rp[r] - rm[r]) / (2.0 * fd_step);
        }
    }
    let (theta, tau) = ctx.chart().theta_tau(&unknowns.y)?;
    let (_, half_op) = ctx.curve_operator(&theta, &tau)?;
    let sh = half_op.half_matrix();
    // columns of S restricted to the even mode pairs {m, n-m}
    let mut colsum = DMatrix::<f64>::zeros(half, half);
    for r in 0..half {
        for m in 0..half {
            let mut v = sh[(r, m)];
            if m != 0 && m != n / 2 {
                v += sh[(r, n - m)];
            }
            colsum[(r, m)] = v;
        }
    }
    let sheet = params.epsilon / 4.0;
    for j in 0..n {
        let r = j.min(n - j);
        let coeff = -sheet * tau.values()[j].exp() * (2.0 * omega_full[j] - 2.0);
        jac[(j, dim + r)] = coeff;
        for m in 0..half {
            let identity = if r == m { 1.0 } else { 0.0 };
            jac[(n + j, dim + m)] = identity + colsum[(r, m)] / std::f64::consts::PI;
        }
        jac[(j, dim + half)] = -(-tau.values()[j]).exp();
    }
    Ok(jac)
}

/// Bordered Jacobian of the stacked residual at a state, chart columns
/// first, then the vorticity half, then the Bernoulli column.
pub fn assemble_jacobian(
    ctx: &SolverContext,
    state: &SolverState,
    fd_step: f64,
) -> Result<DMatrix<f64>, SolverError> {
    let unknowns = Unknowns::of_state(ctx, state)?;
    jacobian(ctx, &unknowns, &state.params, fd_step)
}

fn least_squares(jac: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let qr = jac.clone().qr();
    let qtb = qr.q().transpose() * rhs;
    if let Some(x) = qr.r().solve_upper_triangular(&qtb) {
        if x.iter().all(|v| v.is_finite()) {
            return x;
        }
    }
    SVD::new(jac.clone(), true, true)
        .solve(rhs, 1e-13)
        .expect("svd fallback")
}

fn build_state(
    ctx: &SolverContext,
    unknowns: &Unknowns,
    params: PhysicalParams,
    iters: usize,
) -> Result<SolverState, SolverError> {
    let n = ctx.grid().len();
    let (theta, tau) = ctx.chart().theta_tau(&unknowns.y)?;
    let omega = PeriodicField::new(ctx.grid(), unknowns.omega_full(n), Parity::Even)?;
    let mut state = SolverState {
        params: PhysicalParams {
            kappa_b: unknowns.kappa,
            ..params
        },
        alpha_star: ctx.chart().alpha_star(),
        theta,
        tau,
        omega,
        residual_norms: (0.0, 0.0),
        newton_iters: iters,
    };
    ctx.set_norms(&mut state)?;
    Ok(state)
}

/// Gauss-Newton iteration from an initial state toward the target
/// parameters.
///
/// On convergence the returned state has been re-checked for chart
/// constraints and admissibility margins; failure to converge reports
/// the best state reached together with the stationarity diagnostics.
pub fn newton_solve(
    ctx: &SolverContext,
    initial: &SolverState,
    params: PhysicalParams,
    opts: &NewtonOptions,
) -> Result<SolverState, SolverError> {
    let n = ctx.grid().len();
    let mut unknowns = Unknowns::of_state(ctx, initial)?;
    unknowns.kappa = params.kappa_b;
    let mut pars = params;
    let mut best_sup = f64::INFINITY;
    let mut best: Option<(Unknowns, usize)> = None;
    let mut prev_sup = f64::INFINITY;
    let mut stall = 0usize;
    let mut gradient_ratio = f64::NAN;
    let mut iters = 0usize;
    loop {
        pars.kappa_b = unknowns.kappa;
        let omega_full = unknowns.omega_full(n);
        let residual = stacked_residual(ctx, &unknowns.y, &omega_full, &pars)?;
        let sup = residual.amax();
        if sup < best_sup {
            best_sup = sup;
            best = Some((
                Unknowns {
                    y: unknowns.y.clone(),
                    omega_half: unknowns.omega_half.clone(),
                    kappa: unknowns.kappa,
                },
                iters,
            ));
        }
        if sup <= opts.tol_sup {
            let state = build_state(ctx, &unknowns, pars, iters)?;
            return accept(ctx, state);
        }
        let stalled = opts.stall_exit && {
            if sup >= prev_sup * (1.0 - 1e-3) {
                stall += 1;
            } else {
                stall = 0;
            }
            stall >= 3
        };
        if iters >= opts.max_iters || stalled {
            let (bu, bi) = best.expect("at least one iterate recorded");
            let mut bpars = pars;
            bpars.kappa_b = bu.kappa;
            let state = build_state(ctx, &bu, bpars, bi)?;
            return Err(SolverError::NoConvergence {
                best: Box::new(state),
                iters,
                residual_sup: best_sup,
                gradient_ratio,
                stalled,
            });
        }
        prev_sup = sup;
        let jac = jacobian(ctx, &unknowns, &pars, opts.fd_step)?;
        gradient_ratio =
            (jac.transpose() * &residual).norm() / (jac.norm() * residual.norm()).max(1e-300);
        let step = least_squares(&jac, &residual.map(|v| -v));
        unknowns.apply_step(&step);
        iters += 1;
    }
}

fn accept(ctx: &SolverContext, state: SolverState) -> Result<SolverState, SolverError> {
    let offsets = ctx
        .chart()
        .constraint_residuals(&state.chart_offset(ctx.chart())?);
    let worst = offsets.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > 1e-8 {
        return Err(SolverError::AdmissibilityLost(format!(
            "chart constraint residual {worst:.3e} exceeds 1e-8"
        )));
    }
    let m = margins(&state.curve()?)?;
    if !m.admissible() {
        return Err(SolverError::AdmissibilityLost(format!(
            "margins not strict: chord-arc {:.3e}, slope max {:.3e}, lift min {:.3e}",
            m.chord_arc_sup, m.slope_max, m.lift_min
        )));
    }
    Ok(state)
}

/// Rank structure of the coordinate block with and without the Bernoulli
/// border.
#[derive(Debug, Clone, Copy)]
pub struct RankMonitor {
    /// Smallest singular value of the square coordinate-to-Bernoulli
    /// block over the full cosine mode range.
    pub unbordered_min: f64,
    /// Same after appending the Bernoulli column.
    pub bordered_min: f64,
    /// `bordered_min / unbordered_min`.
    pub jump: f64,
    /// Half-grid pairing between the cokernel direction and the border
    /// column, `sum cos(theta) e^{-tau} h`; nonzero means the border acts
    /// on the deficient direction.
    pub pairing: f64,
}

/// Measures how the Bernoulli column repairs the rank deficiency of the
/// coordinate block at a state.
pub fn rank_monitor(ctx: &SolverContext, state: &SolverState) -> Result<RankMonitor, SolverError> {
    let n = ctx.grid().len();
    let half = n / 2 + 1;
    let h = ctx.grid().spacing();
    let base: Vec<f64> = state
        .theta
        .values()
        .iter()
        .zip(state.tau.values())
        .map(|(&th, &ta)| (-ta).exp() * th.cos())
        .collect();
    let d = 1e-7;
    let mut block = DMatrix::<f64>::zeros(half, half);
    for m in 0..half {
        let mode: Vec<f64> = ctx
            .grid()
            .nodes()
            .iter()
            .map(|&al| (m as f64 * al).cos())
            .collect();
        let gp = coordinate_g1(ctx, &base, &mode, d, state)?;
        let gm = coordinate_g1(ctx, &base, &mode, -d, state)?;
        for r in 0..half {
            block[(r, m)] = (gp[r] - gm[r]) / (2.0 * d);
        }
    }
    let sv = SVD::new(block.clone(), false, false).singular_values;
    let unbordered_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let border: Vec<f64> = state.tau.values()[..half]
        .iter()
        .map(|&ta| -(-ta).exp())
        .collect();
    let bordered = {
        let mut m2 = DMatrix::<f64>::zeros(half, half + 1);
        m2.view_mut((0, 0), (half, half)).copy_from(&block);
        for r in 0..half {
            m2[(r, half)] = border[r];
        }
        m2
    };
    let svb = SVD::new(bordered, false, false).singular_values;
    let bordered_min = svb.iter().cloned().fold(f64::INFINITY, f64::min);
    let pairing: f64 = state.theta.values()[..half]
        .iter()
        .zip(&state.tau.values()[..half])
        .map(|(&th, &ta)| th.cos() * (-ta).exp())
        .sum::<f64>()
        * h;
    Ok(RankMonitor {
        unbordered_min,
        bordered_min,
        jump: bordered_min / unbordered_min,
        pairing,
    })
}

fn coordinate_g1(
    ctx: &SolverContext,
    base: &[f64],
    mode: &[f64],
    step: f64,
    state: &SolverState,
) -> Result<Vec<f64>, SolverError> {
    let n = ctx.grid().len();
    let half = n / 2 + 1;
    let total: Vec<f64> = (0..n).map(|j| base[j] + step * mode[j]).collect();
    let ufield = PeriodicField::new(ctx.grid(), total, Parity::Even)?;
    let hu = ufield.hilbert();
    let mut th = vec![0.0; n];
    let mut ta = vec![0.0; n];
    for j in 0..n {
        let (uu, hh) = (ufield.values()[j], hu.values()[j]);
        let r2 = uu * uu + hh * hh;
        if !(r2 > 1e-24) {
            return Err(SolverError::BranchAmbiguity {
                alpha: ctx.grid().node(j),
            });
        }
        th[j] = hh.atan2(uu);
        ta[j] = -0.5 * r2.ln();
    }
    let theta = PeriodicField::new(ctx.grid(), th, Parity::Odd)?;
    let tau = PeriodicField::new(ctx.grid(), ta, Parity::Even)?;
    let curve = crate::geometry::WaveCurve::from_theta_tau(&theta, &tau)?;
    let g1 = super::residual::bernoulli_residual(&curve, &state.omega, &state.params);
    Ok(g1.values()[..half].to_vec())
}

/// Largest relative deviation between the assembled Jacobian and central
/// finite differences of the residual along random unit directions.
pub fn jacobian_fd_check(
    ctx: &SolverContext,
    state: &SolverState,
    directions: usize,
    step: f64,
    seed: u64,
) -> Result<f64, SolverError> {
    let n = ctx.grid().len();
    let unknowns = Unknowns::of_state(ctx, state)?;
    let jac = jacobian(ctx, &unknowns, &state.params, 1e-6)?;
    let nx = jac.ncols();
    let dim = unknowns.y.len();
    let half = unknowns.omega_half.len();
    let mut stream = GaussianStream::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..directions {
        let mut v = DVector::from_fn(nx, |_, _| stream.next_normal());
        v /= v.norm();
        let perturbed = |sign: f64| -> Result<DVector<f64>, SolverError> {
            let mut y = unknowns.y.clone();
            for c in 0..dim {
                y[c] += sign * step * v[c];
            }
            let mut omh = unknowns.omega_half.clone();
            for c in 0..half {
                omh[c] += sign * step * v[dim + c];
            }
            let omega_full: Vec<f64> = (0..n).map(|j| omh[j.min(n - j)]).collect();
            let pars = PhysicalParams {
                kappa_b: unknowns.kappa + sign * step * v[dim + half],
                ..state.params
            };
            stacked_residual(ctx, &y, &omega_full, &pars)
        };
        let rp = perturbed(1.0)?;
        let rm = perturbed(-1.0)?;
        let fd = (rp - rm) / (2.0 * step);
        let jv = &jac * &v;
        let err = (&fd - &jv).norm() / jv.norm().max(1e-300);
        worst = worst.max(err);
    }
    Ok(worst)
}
