//! Interface curves and their diagnostics: chord-arc constants, curvature,
//! contact gaps, graph profiles near a contact, weighted norms.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

use crate::quad;
use crate::spectral::{
    Parity, PeriodicField, PeriodicGrid, SpectralError, TrigSeries,
};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] SpectralError),
    /// The requested diagnostic needs a marked contact abscissa.
    #[error("curve carries no contact abscissa")]
    ContactRequired,
    /// Graph inversion produced a non-monotone abscissa sequence.
    #[error("graph parametrization is not monotone near the contact")]
    NotMonotone,
    /// The log-log profile fit missed the data by more than the cap.
    #[error("power-law fit residual {residual:.3e} exceeds 0.1")]
    BadFit { residual: f64 },
    /// `|s|^{p beta}` is not integrable for `p beta <= -1`.
    #[error("weight exponent {exponent} is not integrable")]
    WeightNotIntegrable { exponent: f64 },
}

/// Spectral interpolant of a curve `z(alpha) = alpha + w(alpha)` with
/// periodic displacement `w`. Evaluates on and off the real line.
#[derive(Debug, Clone)]
pub struct CurveInterpolant {
    series: TrigSeries,
}

impl CurveInterpolant {
    pub fn new(grid: PeriodicGrid, z: &[Complex64]) -> Self {
        let w: Vec<Complex64> = z
            .iter()
            .enumerate()
            .map(|(j, &zj)| zj - grid.node(j))
            .collect();
        Self {
            series: TrigSeries::from_samples(&w),
        }
    }

    pub fn z(&self, alpha: f64) -> Complex64 {
        Complex64::new(alpha, 0.0) + self.series.eval(alpha)
    }

    pub fn zp(&self, alpha: f64) -> Complex64 {
        Complex64::new(1.0, 0.0) + self.series.eval_derivative(alpha)
    }

    pub fn z_at(&self, zeta: Complex64) -> Complex64 {
        zeta + self.series.eval_at(zeta)
    }

    pub fn zp_at(&self, zeta: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0) + self.series.eval_derivative_at(zeta)
    }
}

/// A periodic interface curve with its tangent data and an optional marked
/// contact abscissa `alpha*` (the mirror point `-alpha*` carries the other
/// side of the near-contact).
#[derive(Debug, Clone)]
pub struct WaveCurve {
    grid: PeriodicGrid,
    theta: PeriodicField,
    tau: PeriodicField,
    z: Vec<Complex64>,
    zp: Vec<Complex64>,
    zpp: Vec<Complex64>,
    alpha_star: Option<f64>,
}

impl WaveCurve {
    /// Builds the curve of an odd tangent angle with `tau = H theta`.
    pub fn from_theta(theta: &PeriodicField) -> Result<Self, GeometryError> {
        let tau = theta.hilbert();
        Self::from_theta_tau(theta, &tau)
    }

    /// Builds a curve from independent tangent angle and log speed fields,
    /// `z_alpha = e^{-tau + i theta}`, anchored at `z(-pi) = -pi`.
    pub fn from_theta_tau(
        theta: &PeriodicField,
        tau: &PeriodicField,
    ) -> Result<Self, GeometryError> {
        if theta.parity() != Parity::Odd {
            return Err(SpectralError::NonOddInput.into());
        }
        if theta.len() != tau.len() {
            return Err(SpectralError::LengthMismatch {
                expected: theta.len(),
                got: tau.len(),
            }
            .into());
        }
        let grid = theta.grid();
        let zp: Vec<Complex64> = theta
            .values()
            .iter()
            .zip(tau.values())
            .map(|(&th, &ta)| Complex64::from_polar((-ta).exp(), th))
            .collect();
        let z = crate::spectral::antiderivative_complex(grid, &zp, Complex64::new(-PI, 0.0));
        let zpp = crate::spectral::apply_multiplier_complex(&zp, |k| Complex64::new(0.0, k as f64));
        Ok(Self {
            grid,
            theta: theta.clone(),
            tau: tau.clone(),
            z,
            zp,
            zpp,
            alpha_star: None,
        })
    }

    /// Samples an exact family member on a grid, in closed form.
    pub fn from_family(a: f64, grid: PeriodicGrid) -> Self {
        let theta = crate::crapper::theta_field(a, grid);
        let tau = crate::crapper::tau_field(a, grid);
        let z: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&al| crate::crapper::curve_point(a, al))
            .collect();
        let zp: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&al| crate::crapper::curve_derivative(a, al))
            .collect();
        let zpp = crate::spectral::apply_multiplier_complex(&zp, |k| Complex64::new(0.0, k as f64));
        Self {
            grid,
            theta,
            tau,
            z,
            zp,
            zpp,
            alpha_star: None,
        }
    }

    /// Unit-circle fixture, `z = e^{i alpha}`. A closed curve rather than a
    /// wave profile; used to pin down orientation-dependent kernel
    /// constants (the tangent angle winds, so it is stored unwrapped into
    /// a parity-free field and the profile diagnostics do not apply).
    pub fn circle(grid: PeriodicGrid) -> Self {
        let z: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&al| Complex64::from_polar(1.0, al))
            .collect();
        let zp: Vec<Complex64> = z.iter().map(|&v| Complex64::i() * v).collect();
        let zpp: Vec<Complex64> = z.iter().map(|&v| -v).collect();
        let theta = PeriodicField::from_fn(grid, Parity::None, |al| {
            Complex64::from_polar(1.0, al + FRAC_PI_2).arg()
        })
        .expect("parity-free construction cannot fail");
        let tau = PeriodicField::zeros(grid, Parity::Even);
        Self {
            grid,
            theta,
            tau,
            z,
            zp,
            zpp,
            alpha_star: None,
        }
    }

    /// Marks the contact abscissa used by gap, exclusion, and profile
    /// diagnostics.
    pub fn with_contact(mut self, alpha_star: f64) -> Self {
        self.alpha_star = Some(alpha_star);
        self
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn theta(&self) -> &PeriodicField {
        &self.theta
    }

    pub fn tau(&self) -> &PeriodicField {
        &self.tau
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn zp(&self) -> &[Complex64] {
        &self.zp
    }

    pub fn zpp(&self) -> &[Complex64] {
        &self.zpp
    }

    pub fn alpha_star(&self) -> Option<f64> {
        self.alpha_star
    }

    pub fn interpolant(&self) -> CurveInterpolant {
        CurveInterpolant::new(self.grid, &self.z)
    }

    /// Signed curvature at the nodes, `Im(conj(z') z'') / |z'|^3`.
    pub fn curvature(&self) -> Vec<f64> {
        self.zp
            .iter()
            .zip(&self.zpp)
            .map(|(&zp, &zpp)| (zp.conj() * zpp).im / zp.norm().powi(3))
            .collect()
    }

    /// Distance between the two marked contact points, or the minimum
    /// distance between well-separated parameter arcs when no abscissa is
    /// marked.
    pub fn splash_gap(&self) -> f64 {
        match self.alpha_star {
            Some(ast) => {
                let interp = self.interpolant();
                (interp.z(ast) - interp.z(-ast)).norm()
            }
            None => {
                let n = self.grid.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let sep = circular_distance(self.grid.node(i), self.grid.node(j));
                        if sep >= 1.0 {
                            best = best.min((self.z[i] - self.z[j]).norm());
                        }
                    }
                }
                best
            }
        }
    }

    /// Chord-arc constant: sup over node pairs of the reference-circle
    /// chord divided by the curve chord, with `1/|z'|` on the diagonal.
    ///
    /// When a contact abscissa is marked, pairs joining an
    /// `exclusion`-neighborhood of `alpha*` to one of `-alpha*` are left
    /// out; these are the pairs that degenerate at the contact.
    pub fn arc_chord_sup(&self, exclusion: f64) -> f64 {
        let n = self.grid.len();
        let ea: Vec<Complex64> = self
            .grid
            .nodes()
            .iter()
            .map(|&al| Complex64::from_polar(1.0, al))
            .collect();
        let (dp, dm): (Vec<f64>, Vec<f64>) = match self.alpha_star {
            Some(ast) => (
                self.grid
                    .nodes()
                    .iter()
                    .map(|&al| circular_distance(al, ast))
                    .collect(),
                self.grid
                    .nodes()
                    .iter()
                    .map(|&al| circular_distance(al, -ast))
                    .collect(),
            ),
            None => (vec![f64::INFINITY; n], vec![f64::INFINITY; n]),
        };
        let mut sup = 0.0f64;
        for i in 0..n {
            sup = sup.max(1.0 / self.zp[i].norm());
            for j in (i + 1)..n {
                let excluded = (dp[i] < exclusion && dm[j] < exclusion)
                    || (dm[i] < exclusion && dp[j] < exclusion);
                if excluded {
                    continue;
                }
                let chord = (self.z[i] - self.z[j]).norm();
                sup = sup.max((ea[i] - ea[j]).norm() / chord);
            }
        }
        sup
    }

    /// Graph parametrization of the curve above the marked contact point:
    /// heights `x_j = (j/m)^3 delta` and horizontal offsets `c(x_j)`,
    /// found by Newton inversion of `Im z(alpha) = Im z(alpha*) + x`.
    pub fn graph_profile(&self, delta: f64, m: usize) -> Result<CuspProfile, GeometryError> {
        let ast = self.alpha_star.ok_or(GeometryError::ContactRequired)?;
        let interp = self.interpolant();
        let ystar = interp.z(ast).im;
        let cstar = interp.zp(ast).norm();
        let mut heights = Vec::with_capacity(m);
        let mut widths = Vec::with_capacity(m);
        let mut abscissas = Vec::with_capacity(m);
        for j in 1..=m {
            let t = j as f64 / m as f64;
            let x = t * t * t * delta;
            let mut al = ast + x / cstar;
            for _ in 0..60 {
                let f = interp.z(al).im - ystar - x;
                let df = interp.zp(al).im;
                let step = f / df;
                al -= step;
                if step.abs() < 1e-14 {
                    break;
                }
            }
            heights.push(x);
            widths.push(interp.z(al).re);
            abscissas.push(al);
        }
        if abscissas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::NotMonotone);
        }
        Ok(CuspProfile {
            heights,
            widths,
            abscissas,
        })
    }

    /// Composite regularity gauge: the `H^1` size of the tangent angle, the
    /// reciprocal of the smallest `|theta'|` within `eps` of the contact,
    /// and the chord-arc constant with an `eps/2` exclusion.
    ///
    /// Returns infinity when `theta'` vanishes inside the window, which is
    /// the degenerate-contact sentinel.
    pub fn contact_gauge(&self, eps: f64) -> Result<f64, GeometryError> {
        let ast = self.alpha_star.ok_or(GeometryError::ContactRequired)?;
        let h = self.grid.spacing();
        let thp = self.theta.derivative();
        let thpp = thp.derivative();
        let t1 = thp
            .values()
            .iter()
            .zip(thpp.values())
            .map(|(&a, &b)| a * a + b * b)
            .sum::<f64>()
            .mul_add(h, 0.0)
            .sqrt();
        let series = TrigSeries::from_real_samples(self.theta.values());
        let samples = 20001;
        let mut slope_min = f64::INFINITY;
        for j in 0..samples {
            let al = ast - eps + 2.0 * eps * j as f64 / (samples - 1) as f64;
            slope_min = slope_min.min(series.eval_derivative(al).re.abs());
        }
        if slope_min < 1e-13 {
            return Ok(f64::INFINITY);
        }
        let t3 = self.arc_chord_sup(0.5 * eps);
        Ok(t1 + 1.0 / slope_min + t3)
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    Complex64::from_polar(1.0, a - b).arg().abs()
}

/// Sampled graph profile `(x, c(x))` above a contact point.
#[derive(Debug, Clone)]
pub struct CuspProfile {
    pub heights: Vec<f64>,
    pub widths: Vec<f64>,
    pub abscissas: Vec<f64>,
}

/// Fitted contact strength: `c(x) ~ k x^{1+mu} / (mu (1+mu))`.
#[derive(Debug, Clone, Copy)]
pub struct CuspStrength {
    pub mu: f64,
    pub k: f64,
    pub fit_residual: f64,
}

impl CuspProfile {
    /// Power-law fit of the profile on the window `[1e-3, 1e-1]`.
    pub fn strength(&self) -> Result<CuspStrength, GeometryError> {
        self.strength_windowed(1e-3, 1e-1)
    }

    /// Fits `log c` against `log x` on `[lo, hi]` for the exponent, then
    /// extrapolates `mu (1+mu) x^{-(1+mu)} c(x)` to `x = 0` through the
    /// three smallest sampled heights for the strength coefficient.
    pub fn strength_windowed(&self, lo: f64, hi: f64) -> Result<CuspStrength, GeometryError> {
        let mut lx = Vec::new();
        let mut lc = Vec::new();
        for (&x, &c) in self.heights.iter().zip(&self.widths) {
            if x >= lo && x <= hi {
                if c <= 0.0 {
                    return Err(GeometryError::BadFit {
                        residual: f64::INFINITY,
                    });
                }
                lx.push(x.ln());
                lc.push(c.ln());
            }
        }
        let (slope, intercept) = quad::line_fit(&lx, &lc);
        let residual = lx
            .iter()
            .zip(&lc)
            .map(|(&x, &c)| (slope * x + intercept - c).abs())
            .fold(0.0f64, f64::max);
        if residual > 0.1 {
            return Err(GeometryError::BadFit { residual });
        }
        let mu = slope - 1.0;
        let x3 = &self.heights[..3];
        let mut p = [0.0f64; 3];
        for i in 0..3 {
            p[i] = mu * (mu + 1.0) * x3[i].powf(-(1.0 + mu)) * self.widths[i];
        }
        for m in 1..=2usize {
            for i in 0..(3 - m) {
                p[i] += (p[i] - p[i + 1]) * x3[i] / (x3[i + m] - x3[i]);
            }
        }
        Ok(CuspStrength {
            mu,
            k: p[0],
            fit_residual: residual,
        })
    }
}

/// Mesh controls for [`weighted_norm`]: graded panels of `graded + 1`
/// nodes hugging the marked point from each side, uniform panels of
/// `smooth + 1` nodes elsewhere.
#[derive(Debug, Clone, Copy)]
pub struct NormMesh {
    pub graded: usize,
    pub smooth: usize,
    pub lo: f64,
    pub hi: f64,
    pub halfwidth: f64,
}

impl Default for NormMesh {
    fn default() -> Self {
        Self {
            graded: 64,
            smooth: 256,
            lo: 0.0,
            hi: PI,
            halfwidth: 0.2,
        }
    }
}

/// Weighted `L^p` norm `(int |f|^p |s - ast|^{p beta} ds)^{1/p}` over the
/// mesh window, with cubic-graded panels absorbing the weight degeneracy
/// at `ast`.
///
/// For negative `beta` the integrand value exactly at `ast` is dropped
/// (the graded panel makes the omitted sliver negligible); `p beta <= -1`
/// is rejected as non-integrable.
pub fn weighted_norm(
    f: impl Fn(f64) -> f64,
    ast: f64,
    p: f64,
    beta: f64,
    mesh: &NormMesh,
) -> Result<f64, GeometryError> {
    let pb = p * beta;
    if pb <= -1.0 {
        return Err(GeometryError::WeightNotIntegrable { exponent: pb });
    }
    let weight = |s: f64| -> f64 {
        let d = (s - ast).abs();
        if d == 0.0 {
            if pb == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            d.powf(pb)
        }
    };
    let (m1, m2) = (mesh.graded, mesh.smooth);
    let l = mesh.lo.max(ast - mesh.halfwidth);
    let r = mesh.hi.min(ast + mesh.halfwidth);
    let mut segments: Vec<Vec<f64>> = Vec::new();
    if mesh.lo < l {
        segments.push(linspace(mesh.lo, l, m2 + 1));
    }
    if l < ast && ast <= mesh.hi {
        segments.push(
            (0..=m1)
                .map(|j| {
                    let t = (m1 - j) as f64 / m1 as f64;
                    ast - t * t * t * (ast - l)
                })
                .collect(),
        );
    }
    if mesh.lo <= ast && ast < r {
        segments.push(
            (0..=m1)
                .map(|j| {
                    let t = j as f64 / m1 as f64;
                    ast + t * t * t * (r - ast)
                })
                .collect(),
        );
    }
    if r < mesh.hi {
        segments.push(linspace(r, mesh.hi, m2 + 1));
    }
    let mut total = 0.0;
    for seg in &segments {
        let g: Vec<f64> = seg
            .iter()
            .map(|&s| f(s).abs().powf(p) * weight(s))
            .collect();
        total += quad::integral(seg, &g);
    }
    Ok(total.powf(1.0 / p))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
        .collect()
}
