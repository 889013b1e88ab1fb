//! Singular integral operators on periodic interface curves: the
//! desingularized vortex-sheet velocity, the Nystrom matrices of the
//! normal and tangential layer operators, even-subspace vorticity solves,
//! and off-curve fields.
//!
//! All kernels reduce to the periodic Cauchy kernel `cot((z_i - z_j)/2)`,
//! evaluated through `e^{i z_j}` so that an assembly costs one complex
//! division per entry instead of a transcendental call:
//! `cot(w/2) = i (e^{iw} + 1) / (e^{iw} - 1)`.
//!
//! When the curve carries a marked contact abscissa, quadrature rows whose
//! node faces the opposite arc across the near-contact are repaired: the
//! integrand has a complex pole `p` with small imaginary part (the
//! preimage of the node under the opposite branch), and the row gets the
//! difference between the exact integral of the model term
//! `r cot((zeta - p)/2)/2` and its discrete sum, with `r` expressed
//! through the trigonometric cardinal functions so the fix stays linear
//! in the density.

use nalgebra::DMatrix;
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use thiserror::Error;

use crate::geometry::{CurveInterpolant, WaveCurve};
use crate::spectral::{Parity, PeriodicField};

/// Half-width of the parameter window around the contact abscissa whose
/// nodes are checked for near-contact poles.
pub const CONTACT_WINDOW: f64 = 0.45;

/// Poles are accepted only within this distance from the real axis; wider
/// ones are resolved by the plain trapezoid rule.
pub fn contact_band(n: usize) -> f64 {
    35.0 / n as f64
}

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("folded system condition number {cond:.3e} exceeds 1e12")]
    IllConditioned { cond: f64 },
    #[error("folded system factorization failed")]
    SingularSystem,
}

/// Right-hand side family for the vorticity equation
/// `(pi I + S) omega = pi (2 - forcing)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VorticityForm {
    /// Forcing `cos theta`.
    CosTheta,
    /// Forcing `Re z_alpha` (the hodograph-compatible form).
    Tangent,
}

#[derive(Debug, Clone)]
pub struct VorticitySolution {
    pub omega: PeriodicField,
    /// Sup norm of the unfolded residual `(pi I + S) omega - rhs`.
    pub residual_sup: f64,
    /// Trapezoid integral of `omega` over the period.
    pub integral: f64,
    /// Condition number of the folded system.
    pub cond: f64,
}

struct Kernel {
    n: usize,
    h: f64,
    e: Vec<Complex64>,
    inv_e: Vec<Complex64>,
}

impl Kernel {
    fn new(curve: &WaveCurve) -> Self {
        let e: Vec<Complex64> = curve
            .z()
            .iter()
            .map(|&z| (Complex64::i() * z).exp())
            .collect();
        let inv_e = e.iter().map(|&v| 1.0 / v).collect();
        Self {
            n: curve.grid().len(),
            h: curve.grid().spacing(),
            e,
            inv_e,
        }
    }

    /// `n conj(d) / |d|^2` with `n = q + 1`, `d = q - 1`,
    /// `q = e^{i(z_i - z_j)}`; the cotangent is `i` times this.
    #[inline]
    fn cot_parts(&self, i: usize, j: usize) -> (f64, f64, f64) {
        let q = self.e[i] * self.inv_e[j];
        let (nre, nim) = (q.re + 1.0, q.im);
        let (dre, dim) = (q.re - 1.0, q.im);
        let den = dre * dre + dim * dim;
        (nre * dre + nim * dim, nim * dre - nre * dim, den)
    }
}

fn newton_pole(interp: &CurveInterpolant, zi: Complex64, guess: Complex64) -> Complex64 {
    let mut zeta = guess;
    for _ in 0..50 {
        let f = zi - interp.z_at(zeta);
        let df = -interp.zp_at(zeta);
        let step = f / df;
        zeta -= step;
        if !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        if step.norm() < 1e-14 {
            break;
        }
    }
    zeta
}

/// Finds the near-contact poles of the quadrature rows: for each node in
/// the window around `+alpha*`, the preimage of the node point under the
/// opposite arc, found by Newton on the curve interpolant. Mirrored rows
/// get the exactly mirrored pole, which keeps even symmetry.
pub(crate) fn locate_poles(
    curve: &WaveCurve,
    interp: &CurveInterpolant,
    warm: Option<&[(usize, Complex64)]>,
) -> Vec<(usize, Complex64)> {
    let Some(ast) = curve.alpha_star() else {
        return Vec::new();
    };
    let grid = curve.grid();
    let n = grid.len();
    let band = contact_band(n);
    let mut out = Vec::new();
    for i in 0..n {
        let ai = grid.node(i);
        if ai <= 0.0 || (ai - ast).abs() >= CONTACT_WINDOW {
            continue;
        }
        let seed = warm
            .and_then(|w| {
                w.binary_search_by_key(&i, |&(r, _)| r)
                    .ok()
                    .map(|idx| w[idx].1)
            })
            .unwrap_or_else(|| Complex64::new(-ai, 0.58 * (ai - ast) * (ai - ast)));
        let p = newton_pole(interp, curve.z()[i], seed);
        if p.re.is_finite() && p.im.abs() < band && p.re < 0.0 {
            out.push((i, p));
            out.push((n - i, -p.conj()));
        }
    }
    out.sort_by_key(|&(r, _)| r);
    out
}

/// Additive repair for row `r` of `S` given its near-contact pole.
fn contact_row(
    curve: &WaveCurve,
    interp: &CurveInterpolant,
    units: &[Complex64],
    r: usize,
    p: Complex64,
) -> Vec<f64> {
    let n = curve.grid().len();
    let h = curve.grid().spacing();
    let s0 = (0.5 * n as f64 * (p + PI)).sin();
    let pph = (Complex64::i() * p).exp();
    let mut ell = vec![Complex64::new(0.0, 0.0); n];
    let mut cot_sum = Complex64::new(0.0, 0.0);
    for (j, l) in ell.iter_mut().enumerate() {
        let q = pph * units[j].conj();
        let num = q + 1.0;
        let den = q - 1.0;
        let tan_half = -Complex64::i() * den / num;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *l = if den.norm() < 2e-14 {
            Complex64::new(1.0, 0.0)
        } else {
            sign * s0 / (n as f64 * tan_half)
        };
        cot_sum += -Complex64::i() * num / den;
    }
    let corr = Complex64::new(0.0, PI * p.im.signum()) - 0.5 * h * cot_sum;
    // row_j = 2 pi Re(zp_r b_j), b = (-2 ell / Z'(p)) corr / (4 pi i)
    let w = curve.zp()[r] * (-2.0 / interp.zp_at(p)) * corr / Complex64::new(0.0, 2.0);
    ell.iter().map(|&l| (w * l).re).collect()
}

/// Desingularized vortex-sheet velocity at the nodes,
/// `(h/4 pi i) (sum_{j != i} omega_j cot((z_i - z_j)/2) + d_i)` with the
/// diagonal `d_i = -2 omega'_i / z'_i + omega_i z''_i / z'_i^2`.
pub fn birkhoff_rott(curve: &WaveCurve, omega: &PeriodicField) -> Vec<Complex64> {
    let kern = Kernel::new(curve);
    let om = omega.values();
    let omp = omega.derivative();
    let omp = omp.values();
    let scale = kern.h / (4.0 * PI);
    let mut out = vec![Complex64::new(0.0, 0.0); kern.n];
    for i in 0..kern.n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..kern.n {
            if j == i {
                continue;
            }
            let (ndre, ndim, den) = kern.cot_parts(i, j);
            acc += om[j] * Complex64::new(-ndim / den, ndre / den);
        }
        let zp = curve.zp()[i];
        let diag = -2.0 * omp[i] / zp + om[i] * curve.zpp()[i] / (zp * zp);
        out[i] = scale * (acc + diag) * Complex64::new(0.0, -1.0);
    }
    out
}

fn plain_s_row(kern: &Kernel, curve: &WaveCurve, i: usize, row: &mut [f64]) {
    let zp = curve.zp()[i];
    let half_h = 0.5 * kern.h;
    for (j, slot) in row.iter_mut().enumerate() {
        if j == i {
            *slot = half_h * (curve.zpp()[i] / zp).im;
        } else {
            let (ndre, ndim, den) = kern.cot_parts(i, j);
            *slot = half_h * (zp.re * ndre - zp.im * ndim) / den;
        }
    }
}

/// Nystrom matrix of the layer operator acting on densities,
/// `S[i,j] = (h/2) Im(z'_i cot((z_i - z_j)/2))` with the curvature term on
/// the diagonal. Rows near a marked contact are pole-repaired.
pub fn assemble_s(curve: &WaveCurve) -> DMatrix<f64> {
    let kern = Kernel::new(curve);
    let n = kern.n;
    let mut s = DMatrix::<f64>::zeros(n, n);
    let mut row = vec![0.0; n];
    for i in 0..n {
        plain_s_row(&kern, curve, i, &mut row);
        for j in 0..n {
            s[(i, j)] = row[j];
        }
    }
    if curve.alpha_star().is_some() {
        let interp = curve.interpolant();
        let units: Vec<Complex64> = curve
            .grid()
            .nodes()
            .iter()
            .map(|&al| Complex64::from_polar(1.0, al))
            .collect();
        for (r, p) in locate_poles(curve, &interp, None) {
            let add = contact_row(curve, &interp, &units, r, p);
            for j in 0..n {
                s[(r, j)] += add[j];
            }
        }
    }
    s
}

/// Adjoint-side Nystrom matrix,
/// `T[i,j] = -(h/2) Im(z'_j cot((z_i - z_j)/2))` with the same diagonal
/// as `S`.
pub fn assemble_t(curve: &WaveCurve) -> DMatrix<f64> {
    let kern = Kernel::new(curve);
    let n = kern.n;
    let h = kern.h;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j == i {
                t[(i, j)] = 0.5 * h * (curve.zpp()[i] / curve.zp()[i]).im;
            } else {
                let (ndre, ndim, den) = kern.cot_parts(i, j);
                let zpj = curve.zp()[j];
                t[(i, j)] = -0.5 * h * (zpj.re * ndre - zpj.im * ndim) / den;
            }
        }
    }
    t
}

/// Lower-half row block of `S` (`rows 0..=n/2`), kept matrix-free for
/// repeated applications inside residual evaluations. The upper rows are
/// the even reflections of these.
pub struct HalfOperator {
    kern: Kernel,
    rows: usize,
    zp: Vec<Complex64>,
    diag: Vec<f64>,
    corrections: Vec<(usize, Vec<f64>)>,
    poles: Vec<(usize, Complex64)>,
}

impl HalfOperator {
    pub fn new(curve: &WaveCurve, warm: Option<&[(usize, Complex64)]>) -> Self {
        let kern = Kernel::new(curve);
        let rows = kern.n / 2 + 1;
        let diag: Vec<f64> = (0..rows)
            .map(|i| 0.5 * kern.h * (curve.zpp()[i] / curve.zp()[i]).im)
            .collect();
        let mut corrections = Vec::new();
        let mut poles = Vec::new();
        if curve.alpha_star().is_some() {
            let interp = curve.interpolant();
            let units: Vec<Complex64> = curve
                .grid()
                .nodes()
                .iter()
                .map(|&al| Complex64::from_polar(1.0, al))
                .collect();
            poles = locate_poles(curve, &interp, warm);
            for &(r, p) in &poles {
                if r < rows {
                    corrections.push((r, contact_row(curve, &interp, &units, r, p)));
                }
            }
        }
        Self {
            kern,
            rows,
            zp: curve.zp().to_vec(),
            diag,
            corrections,
            poles,
        }
    }

    /// Pole table of this assembly, reusable as a warm start after a small
    /// curve perturbation.
    pub fn poles(&self) -> &[(usize, Complex64)] {
        &self.poles
    }

    /// `(S omega)` on the lower half rows.
    pub fn apply(&self, omega: &[f64]) -> Vec<f64> {
        let n = self.kern.n;
        let mut out = vec![0.0; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let zp = self.zp[i];
            let mut acc = 0.0;
            for (j, &om) in omega.iter().enumerate().take(i) {
                let (ndre, ndim, den) = self.kern.cot_parts(i, j);
                acc += om * (zp.re * ndre - zp.im * ndim) / den;
            }
            for (j, &om) in omega.iter().enumerate().take(n).skip(i + 1) {
                let (ndre, ndim, den) = self.kern.cot_parts(i, j);
                acc += om * (zp.re * ndre - zp.im * ndim) / den;
            }
            *slot = 0.5 * self.kern.h * acc + self.diag[i] * omega[i];
        }
        for (r, add) in &self.corrections {
            let dot: f64 = add.iter().zip(omega).map(|(&a, &o)| a * o).sum();
            out[*r] += dot;
        }
        out
    }

    /// Explicit lower-half rows, for Jacobian blocks.
    pub fn half_matrix(&self) -> DMatrix<f64> {
        let n = self.kern.n;
        let mut m = DMatrix::<f64>::zeros(self.rows, n);
        for i in 0..self.rows {
            let zp = self.zp[i];
            for j in 0..n {
                if j == i {
                    m[(i, j)] = self.diag[i];
                } else {
                    let (ndre, ndim, den) = self.kern.cot_parts(i, j);
                    m[(i, j)] = 0.5 * self.kern.h * (zp.re * ndre - zp.im * ndim) / den;
                }
            }
        }
        for (r, add) in &self.corrections {
            for j in 0..n {
                m[(*r, j)] += add[j];
            }
        }
        m
    }
}

fn fold_weights(n: usize) -> Vec<f64> {
    let half = n / 2 + 1;
    (0..half)
        .map(|m| {
            if m == 0 || m == n / 2 {
                1.0
            } else {
                std::f64::consts::FRAC_1_SQRT_2
            }
        })
        .collect()
}

/// Compression `Q^T M Q` of an `n x n` matrix to the even subspace, where
/// the columns of `Q` are the normalized indicator pairs `{m, n-m}`.
pub fn fold_even(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let n = mat.nrows();
    let half = n / 2 + 1;
    let w = fold_weights(n);
    let mut out = DMatrix::<f64>::zeros(half, half);
    for p in 0..half {
        let rp: &[usize] = &if p == 0 || p == n / 2 {
            vec![p]
        } else {
            vec![p, n - p]
        };
        for q in 0..half {
            let cq: &[usize] = &if q == 0 || q == n / 2 {
                vec![q]
            } else {
                vec![q, n - q]
            };
            let mut acc = 0.0;
            for &r in rp {
                for &c in cq {
                    acc += mat[(r, c)];
                }
            }
            out[(p, q)] = w[p] * w[q] * acc;
        }
    }
    out
}

/// Singular values of the even compression, descending.
pub fn even_singular_values(mat: &DMatrix<f64>) -> Vec<f64> {
    let folded = fold_even(mat);
    let mut sv: Vec<f64> = folded.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Solves `M x = rhs` on the even subspace; returns the unfolded solution
/// and the folded condition number.
pub fn solve_even(mat: &DMatrix<f64>, rhs: &[f64]) -> Result<(Vec<f64>, f64), OperatorError> {
    let n = mat.nrows();
    let half = n / 2 + 1;
    let w = fold_weights(n);
    let folded = fold_even(mat);
    let mut b = nalgebra::DVector::<f64>::zeros(half);
    for m in 0..half {
        b[m] = if m == 0 || m == n / 2 {
            w[m] * rhs[m]
        } else {
            w[m] * (rhs[m] + rhs[n - m])
        };
    }
    let svd = folded.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = smax / smin;
    if !cond.is_finite() || cond > 1e12 {
        return Err(OperatorError::IllConditioned { cond });
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|_| OperatorError::SingularSystem)?;
    let mut sol = vec![0.0; n];
    for m in 0..half {
        sol[m] = w[m] * x[m];
        if m > 0 && m < n / 2 {
            sol[n - m] = w[m] * x[m];
        }
    }
    Ok((sol, cond))
}

/// Solves the vorticity equation `(pi I + S) omega = pi (2 - forcing)` on
/// the even subspace.
pub fn solve_vorticity(
    curve: &WaveCurve,
    form: VorticityForm,
) -> Result<VorticitySolution, OperatorError> {
    let n = curve.grid().len();
    let s = assemble_s(curve);
    let mut mat = s;
    for i in 0..n {
        mat[(i, i)] += PI;
    }
    let rhs: Vec<f64> = match form {
        VorticityForm::CosTheta => curve
            .theta()
            .values()
            .iter()
            .map(|&th| PI * (2.0 - th.cos()))
            .collect(),
        VorticityForm::Tangent => curve.zp().iter().map(|zp| PI * (2.0 - zp.re)).collect(),
    };
    let (sol, cond) = solve_even(&mat, &rhs)?;
    let mut residual_sup = 0.0f64;
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += mat[(i, j)] * sol[j];
        }
        residual_sup = residual_sup.max((acc - rhs[i]).abs());
    }
    let integral = sol.iter().sum::<f64>() * curve.grid().spacing();
    let omega = PeriodicField::new(curve.grid(), sol, Parity::Even)
        .expect("folded solution is even by construction");
    Ok(VorticitySolution {
        omega,
        residual_sup,
        integral,
        cond,
    })
}

/// Sheet-induced velocity at a point off the curve,
/// `(h/4 pi i) sum_j omega_j cot((p - z_j)/2)`.
pub fn velocity_at(curve: &WaveCurve, omega: &[f64], p: Complex64) -> Complex64 {
    let h = curve.grid().spacing();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&zj, &om) in curve.z().iter().zip(omega) {
        let q = (Complex64::i() * (p - zj)).exp();
        acc += om * Complex64::i() * (q + 1.0) / (q - 1.0);
    }
    acc * h / (4.0 * PI) * Complex64::new(0.0, -1.0)
}

/// Single-layer potential at a point off the curve,
/// `-(h/pi) sum_j ln|sin((p - z_j)/2)| omega_j`.
pub fn potential_at(curve: &WaveCurve, omega: &[f64], p: Complex64) -> f64 {
    let h = curve.grid().spacing();
    let mut acc = 0.0;
    for (&zj, &om) in curve.z().iter().zip(omega) {
        let w = p - zj;
        // |sin(w/2)|^2 = (cosh(Im w) - cos(Re w)) / 2
        let m2 = 0.5 * (w.im.cosh() - w.re.cos());
        acc += 0.5 * m2.ln() * om;
    }
    -acc * h / PI
}

/// Empirical `l^2 -> l^2` norm estimate of `S` over pseudorandom smooth
/// even densities; deterministic in the seed.
pub fn boundedness_probe(curve: &WaveCurve, trials: usize, seed: u64) -> f64 {
    let n = curve.grid().len();
    let s = assemble_s(curve);
    let mut stream = crate::rng::GaussianStream::new(seed);
    let modes = 12.min(n / 2);
    let mut best = 0.0f64;
    for _ in 0..trials {
        let coeffs: Vec<f64> = (0..=modes)
            .map(|m| stream.next_normal() / (1.0 + (m * m) as f64))
            .collect();
        let om: Vec<f64> = (0..n)
            .map(|j| {
                let al = curve.grid().node(j);
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| c * (m as f64 * al).cos())
                    .sum()
            })
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += s[(i, j)] * om[j];
            }
            num += acc * acc;
            den += om[i] * om[i];
        }
        if den > 1e-12 {
            best = best.max((num / den).sqrt());
        }
    }
    best
}

/// SHA-256 of the row-major little-endian bytes of a matrix.
pub fn matrix_digest(mat: &DMatrix<f64>) -> String {
    let mut hasher = Sha256::new();
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            hasher.update(mat[(i, j)].to_le_bytes());
        }
    }
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
