//! Root finding in relaxed tangent-angle coordinates.
//!
//! Instead of the constrained chart, the unknowns here are the odd sine
//! modes of the tangent angle, a free additive constant on the log
//! speed, the even vorticity half, and the Bernoulli constant.  The
//! system is square on the folded residual and admits true discrete
//! roots; an optional normalization row `theta(alpha_star) = pi/2` pins
//! the one-parameter root family.  Damped Levenberg-Marquardt steps keep
//! the iteration inside the basin.

use nalgebra::{DMatrix, DVector};

use crate::spectral::{Parity, PeriodicField};

use super::residual::{SolverContext, SolverState};
use super::{PhysicalParams, SolverError};

#[derive(Debug, Clone, Copy)]
pub struct RelaxedOptions {
    pub max_iters: usize,
    /// Stop once the folded residual sup falls below this.
    pub tol_sup: f64,
    /// Initial damping weight.
    pub lambda0: f64,
    /// Central-difference step for the angle columns.
    pub fd_step: f64,
    /// Append the contact-angle normalization row, fixing the root
    /// family parameter.
    pub pin_contact_angle: bool,
}

impl Default for RelaxedOptions {
    fn default() -> Self {
        Self {
            max_iters: 40,
            tol_sup: 1e-10,
            lambda0: 1e-2,
            fd_step: 1e-6,
            pin_contact_angle: false,
        }
    }
}

/// Outcome of the damped root hunt; the residual level reached is
/// reported, not judged.
#[derive(Debug, Clone)]
pub struct RelaxedRoot {
    pub state: SolverState,
    /// Additive log-speed constant of the root.
    pub tau_shift: f64,
    /// Folded residual sup at the final iterate.
    pub residual_sup: f64,
    pub iters: usize,
    /// Chart constraint functionals at the root; the root family is not
    /// required to satisfy them.
    pub constraint_residuals: [f64; 3],
}

struct Workspace<'a> {
    ctx: &'a SolverContext,
    /// Odd sine-mode samples, `n x nb`.
    sines: DMatrix<f64>,
    nb: usize,
    half: usize,
    n: usize,
    pin: Option<f64>,
}

impl<'a> Workspace<'a> {
    fn new(ctx: &'a SolverContext, pin: bool) -> Self {
        let grid = ctx.grid();
        let n = grid.len();
        let nb = n / 2 - 1;
        let mut sines = DMatrix::<f64>::zeros(n, nb);
        for j in 1..n / 2 {
            let al = grid.node(j);
            for m in 1..=nb {
                let v = (m as f64 * al).sin();
                sines[(j, m - 1)] = v;
                sines[(n - j, m - 1)] = -v;
            }
        }
        Self {
            ctx,
            sines,
            nb,
            half: n / 2 + 1,
            n,
            pin: pin.then_some(ctx.chart().alpha_star()),
        }
    }

    fn rows(&self) -> usize {
        2 * self.half + usize::from(self.pin.is_some())
    }

    fn split<'x>(&self, x: &'x DVector<f64>) -> (DVector<f64>, f64, &'x [f64], f64) {
        let b = DVector::from_column_slice(&x.as_slice()[..self.nb]);
        let mu = x[self.nb];
        let omh = &x.as_slice()[self.nb + 1..self.nb + 1 + self.half];
        let kappa = x[self.nb + 1 + self.half];
        (b, mu, omh, kappa)
    }

    fn fields(
        &self,
        b: &DVector<f64>,
        mu: f64,
    ) -> Result<(PeriodicField, PeriodicField), SolverError> {
        let grid = self.ctx.grid();
        let th = &self.sines * b;
        let theta = PeriodicField::new(grid, th.iter().copied().collect(), Parity::Odd)?;
        let mut ta = theta.hilbert();
        let shifted: Vec<f64> = ta.values().iter().map(|v| v + mu).collect();
        ta = PeriodicField::new(grid, shifted, Parity::Even)?;
        Ok((theta, ta))
    }

    fn residual(
        &self,
        x: &DVector<f64>,
        params: &PhysicalParams,
    ) -> Result<DVector<f64>, SolverError> {
        let (b, mu, omh, kappa) = self.split(x);
        let (theta, tau) = self.fields(&b, mu)?;
        let (curve, half_op) = self.ctx.curve_operator(&theta, &tau)?;
        let omega_full: Vec<f64> = (0..self.n).map(|j| omh[j.min(self.n - j)]).collect();
        let pars = PhysicalParams {
            kappa_b: kappa,
            ..*params
        };
        let (g1, g2) = self
            .ctx
            .residual_samples(&curve, &half_op, &omega_full, &pars);
        let mut out = DVector::<f64>::zeros(self.rows());
        for m in 0..self.half {
            out[m] = fold(&g1, m, self.n);
            out[self.half + m] = fold(&g2, m, self.n);
        }
        if let Some(ast) = self.pin {
            let mut angle = 0.0;
            for m in 1..=self.nb {
                angle += b[m - 1] * (m as f64 * ast).sin();
            }
            out[2 * self.half] = angle - std::f64::consts::FRAC_PI_2;
        }
        Ok(out)
    }

    fn jacobian(
        &self,
        x: &DVector<f64>,
        params: &PhysicalParams,
        fd_step: f64,
    ) -> Result<DMatrix<f64>, SolverError> {
        let nx = x.len();
        let rows = self.rows();
        let mut jac = DMatrix::<f64>::zeros(rows, nx);
        let mut xp = x.clone();
        for c in 0..=self.nb {
            xp[c] += fd_step;
            let rp = self.residual(&xp, params)?;
            xp[c] -= 2.0 * fd_step;
            let rm = self.residual(&xp, params)?;
            xp[c] += fd_step;
            for r in 0..rows {
                jac[(r, c)] = (rp[r] - rm[r]) / (2.0 * fd_step);
            }
        }
        let (b, mu, omh, _) = self.split(x);
        let (theta, tau) = self.fields(&b, mu)?;
        let (_, half_op) = self.ctx.curve_operator(&theta, &tau)?;
        let sh = half_op.half_matrix();
        let sheet = params.epsilon / 4.0;
        for r in 0..self.half {
            let coeff = -sheet * tau.values()[r].exp() * (2.0 * omh[r] - 2.0);
            jac[(r, self.nb + 1 + r)] = coeff;
            for m in 0..self.half {
                let mut v = sh[(r, m)];
                if m != 0 && m != self.n / 2 {
                    v += sh[(r, self.n - m)];
                }
                let identity = if r == m { 1.0 } else { 0.0 };
                jac[(self.half + r, self.nb + 1 + m)] =
                    identity + v / std::f64::consts::PI;
            }
            jac[(r, self.nb + 1 + self.half)] = -(-tau.values()[r]).exp();
        }
        if let Some(ast) = self.pin {
            for m in 1..=self.nb {
                jac[(2 * self.half, m - 1)] = (m as f64 * ast).sin();
            }
        }
        Ok(jac)
    }
}

fn fold(v: &[f64], m: usize, n: usize) -> f64 {
    if m == 0 || m == n / 2 {
        v[m]
    } else {
        0.5 * (v[m] + v[n - m])
    }
}

/// Levenberg-Marquardt hunt for a relaxed root near an initial state.
pub fn relaxed_root(
    ctx: &SolverContext,
    initial: &SolverState,
    params: PhysicalParams,
    opts: &RelaxedOptions,
) -> Result<RelaxedRoot, SolverError> {
    let ws = Workspace::new(ctx, opts.pin_contact_angle);
    let n = ws.n;
    let mut x = DVector::<f64>::zeros(ws.nb + 1 + ws.half + 1);
    let theta_vec = DVector::from_column_slice(initial.theta.values());
    let b0 = ws.sines.transpose() * theta_vec * (2.0 / n as f64);
    for c in 0..ws.nb {
        x[c] = b0[c];
    }
    x[ws.nb] = initial.tau.mean();
    for c in 0..ws.half {
        x[ws.nb + 1 + c] = initial.omega.values()[c];
    }
    x[ws.nb + 1 + ws.half] = params.kappa_b;

    let mut residual = ws.residual(&x, &params)?;
    let mut f = residual.norm_squared();
    let mut lambda = opts.lambda0;
    let mut iters = 0usize;
    for it in 0..opts.max_iters {
        iters = it + 1;
        let jac = ws.jacobian(&x, &params, opts.fd_step)?;
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &residual;
        let scale: DVector<f64> = jtj.diagonal().map(|v| v.max(1e-8));
        let mut accepted = false;
        for _ in 0..10 {
            let mut damped = jtj.clone();
            for c in 0..damped.nrows() {
                damped[(c, c)] += lambda * scale[c];
            }
            let neg = jtr.map(|v| -v);
            let fallback = damped.clone();
            let step = match damped.cholesky() {
                Some(chol) => chol.solve(&neg),
                None => match fallback.lu().solve(&neg) {
                    Some(s) => s,
                    None => break,
                },
            };
            let candidate = &x + &step;
            let rc = ws.residual(&candidate, &params)?;
            let fc = rc.norm_squared();
            if fc < f {
                x = candidate;
                residual = rc;
                f = fc;
                lambda = (lambda / 3.0).max(1e-14);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted || residual.amax() < opts.tol_sup {
            break;
        }
    }

    let (b, mu, omh, kappa) = ws.split(&x);
    let (theta, tau) = ws.fields(&b, mu)?;
    let omega_full: Vec<f64> = (0..n).map(|j| omh[j.min(n - j)]).collect();
    let omega = PeriodicField::new(ctx.grid(), omega_full, Parity::Even)?;
    let mut state = SolverState {
        params: PhysicalParams {
            kappa_b: kappa,
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
    let constraint_residuals = ctx
        .chart()
        .constraint_residuals(&state.chart_offset(ctx.chart())?);
    Ok(RelaxedRoot {
        residual_sup: residual.amax(),
        tau_shift: mu,
        state,
        iters,
        constraint_residuals,
    })
}
