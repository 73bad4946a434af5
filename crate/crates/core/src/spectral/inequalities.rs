//! Trace inequalities used to pass from operator bounds to eigenvalue sums.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::hermitian::{
    eigenvalues, hermiticity_residual, max_abs, negative_part_trace_of, CMatrix, Moment,
};

/// Slack in `lhs ≤ rhs + INEQUALITY_TOL`.
pub const INEQUALITY_TOL: f64 = 1e-10;
/// Relative slack when testing positivity and contractivity of inputs.
pub const INPUT_TOL: f64 = 1e-12;
const ROUNDOFF: f64 = 1e-14;

fn check_hermitian(m: &CMatrix, name: &str) -> Result<()> {
    if !m.is_square() || hermiticity_residual(m) > 1e-13 {
        return Err(Error::domain(format!("{name} is not Hermitian")));
    }
    Ok(())
}

fn check_psd(m: &CMatrix, name: &str) -> Result<()> {
    check_hermitian(m, name)?;
    let lo = eigenvalues(m).first().copied().unwrap_or(0.0);
    if lo < -INPUT_TOL * max_abs(m).max(1.0) {
        return Err(Error::domain(format!(
            "{name} is not positive semidefinite (eigenvalue {lo:e})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BksReport {
    /// `Tr[A − B]_−`
    pub lhs: f64,
    /// `Tr[A² − B²]_−^{1/2}`
    pub rhs: f64,
    pub pass: bool,
}

/// `Tr[A − B]_− ≤ Tr[A² − B²]_−^{1/2}` for positive semidefinite `A`, `B`.
pub fn bks_check(a: &CMatrix, b: &CMatrix) -> Result<BksReport> {
    check_psd(a, "A")?;
    check_psd(b, "B")?;
    if a.shape() != b.shape() {
        return Err(Error::domain("A and B differ in dimension"));
    }
    let lhs = negative_part_trace_of(&eigenvalues(&(a - b)), Moment::One);
    let rhs = negative_part_trace_of(&cleaned(&(a * a - b * b)), Moment::Half);
    Ok(BksReport {
        lhs,
        rhs,
        pass: lhs <= rhs + INEQUALITY_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    /// `Tr[F*XF]_−^{1/2}` and `Tr(F*X_−F)^{1/2}`.
    pub negative_part: (f64, f64),
    /// `Tr(F*YF)^{1/2}` and `Tr Y^{1/2}`.
    pub compression: (f64, f64),
    /// Largest mismatch between the nonzero spectra of `T*T` and `TT*`, `T = FX`.
    pub spectrum_mismatch: f64,
    pub pass: bool,
}

/// Eigenvalues with roundoff-sized entries set to zero, so that square roots
/// do not inflate them to ~1e−8.
fn cleaned(m: &CMatrix) -> Vec<f64> {
    let e = eigenvalues(m);
    let cut = ROUNDOFF * (m.nrows().max(1) as f64) * e.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    e.into_iter()
        .map(|x| if x.abs() <= cut { 0.0 } else { x })
        .collect()
}

fn half_trace(m: &CMatrix) -> f64 {
    cleaned(m).iter().map(|e| e.max(0.0).sqrt()).sum()
}

fn nonzero(mut v: Vec<f64>, cut: f64) -> Vec<f64> {
    v.retain(|e| e.abs() > cut);
    v
}

/// Checks, for a contraction `F`, Hermitian `X` and positive `Y`:
/// (i) `Tr[F*XF]_−^{1/2} ≤ Tr(F*X_−F)^{1/2}`, (ii) `Tr(F*YF)^{1/2} ≤ Tr Y^{1/2}`,
/// (iii) `T*T` and `TT*` have the same nonzero spectrum for `T = FX`.
pub fn projection_trace_checks(f: &CMatrix, x: &CMatrix, y: &CMatrix) -> Result<ProjectionReport> {
    check_hermitian(x, "X")?;
    check_psd(y, "Y")?;
    let n = x.nrows();
    if f.shape() != (n, n) || y.shape() != (n, n) {
        return Err(Error::domain("F, X and Y must share one square shape"));
    }
    let norm = if n == 0 {
        0.0
    } else {
        f.clone().singular_values().max()
    };
    if norm > 1.0 + INPUT_TOL {
        return Err(Error::domain(format!("||F|| = {norm} exceeds 1")));
    }
    let fa = f.adjoint();
    let x_neg = crate::spectral::hermitian::apply_function(x, |e| (-e).max(0.0));
    let sym = |m: CMatrix| (&m + m.adjoint()) * Complex64::new(0.5, 0.0);

    let i_lhs = negative_part_trace_of(&cleaned(&sym(&fa * x * f)), Moment::Half);
    let i_rhs = half_trace(&sym(&fa * &x_neg * f));
    let ii_lhs = half_trace(&sym(&fa * y * f));
    let ii_rhs = half_trace(y);

    let t = f * x;
    let ta = t.adjoint();
    let scale = max_abs(&t).powi(2).max(1.0);
    let cut = 1e-9 * scale;
    let s1 = nonzero(eigenvalues(&sym(&ta * &t)), cut);
    let s2 = nonzero(eigenvalues(&sym(&t * &ta)), cut);
    let mismatch = if s1.len() != s2.len() {
        f64::INFINITY
    } else {
        s1.iter()
            .zip(&s2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale
    };

    let tol = |r: f64| INEQUALITY_TOL * r.max(1.0);
    Ok(ProjectionReport {
        negative_part: (i_lhs, i_rhs),
        compression: (ii_lhs, ii_rhs),
        spectrum_mismatch: mismatch,
        pass: i_lhs <= i_rhs + tol(i_rhs) && ii_lhs <= ii_rhs + tol(ii_rhs) && mismatch <= 1e-10,
    })
}
