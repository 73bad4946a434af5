//! Spectral projectors of operators anticommuting with `U = [[0, I], [−I, 0]]`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::hermitian::{eigen, eigenvalues, max_abs, CMatrix};
use crate::spectral::random::hermitian;

/// Tolerance on `UHU⁻¹ = −H`, relative to `max(1, max|H|)`.
pub const ANTICOMMUTATION_TOL: f64 = 1e-12;
/// Tolerance for the projector and spectrum comparisons.
pub const CHIRAL_TOL: f64 = 1e-10;

/// `U` on `C^n ⊕ C^n`.
pub fn u_matrix(n: usize) -> CMatrix {
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        u[(i, n + i)] = Complex64::new(1.0, 0.0);
        u[(n + i, i)] = Complex64::new(-1.0, 0.0);
    }
    u
}

/// Free Dirac matrix `α·p + mβ` in the standard representation.
pub fn free_dirac(p: [f64; 3], m: f64) -> CMatrix {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let sigma = [
        [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
    ];
    let mut d = CMatrix::zeros(4, 4);
    for (k, s) in sigma.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                d[(i, 2 + j)] += s[i][j] * p[k];
                d[(2 + i, j)] += s[i][j] * p[k];
            }
        }
    }
    for i in 0..2 {
        d[(i, i)] += m;
        d[(2 + i, 2 + i)] -= m;
    }
    d
}

/// Random Hermitian `H` with `UHU⁻¹ = −H`: `G − UGU⁻¹` for Hermitian `G`.
pub fn random_anticommuting(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = hermitian(rng, 2 * n);
    let u = u_matrix(n);
    &g - &u * &g * u.adjoint()
}

/// Projectors onto the positive and negative spectral subspaces.
pub fn spectral_projectors(h: &CMatrix) -> (CMatrix, CMatrix) {
    let (vals, vecs) = eigen(h);
    let pick = |pos: bool| {
        let d = DVector::from_iterator(
            vals.len(),
            vals.iter()
                .map(|&e| Complex64::new(if (e > 0.0) == pos { 1.0 } else { 0.0 }, 0.0)),
        );
        &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
    };
    (pick(true), pick(false))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiralReport {
    /// Set when `H` has a zero eigenvalue; nothing else is checked then.
    pub skipped: bool,
    /// `max|P⁻ − U*P⁺U|`.
    pub projector_residual: f64,
    /// Largest gap between the sorted spectra of `Ξ⁺SΞ⁺` and `Ξ⁻SΞ⁻`.
    pub compressed_spectrum_residual: f64,
    /// Largest gap between the spectrum of `H` and its negation.
    pub symmetry_residual: f64,
    pub pass: bool,
}

/// Verifies `P⁻ = U*P⁺U` and that `Ξ⁺SΞ⁺`, `Ξ⁻SΞ⁻` are isospectral for `S = diag(Y, Y)`.
pub fn chiral_projector_check(h: &CMatrix, y: &CMatrix) -> Result<ChiralReport> {
    let dim = h.nrows();
    if !h.is_square() || !dim.is_multiple_of(2) || y.shape() != (dim / 2, dim / 2) {
        return Err(Error::domain("H must be 2n x 2n and Y n x n"));
    }
    let n = dim / 2;
    let u = u_matrix(n);
    let scale = max_abs(h).max(1.0);
    let anti = max_abs(&(&u * h * u.adjoint() + h)) / scale;
    if anti > ANTICOMMUTATION_TOL {
        return Err(Error::precondition(format!(
            "U H U^-1 + H has size {anti:e}"
        )));
    }
    let spec = eigenvalues(h);
    let symmetry = spec
        .iter()
        .zip(spec.iter().rev())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max);
    if spec.iter().any(|e| e.abs() <= CHIRAL_TOL * scale) {
        return Ok(ChiralReport {
            skipped: true,
            projector_residual: 0.0,
            compressed_spectrum_residual: 0.0,
            symmetry_residual: symmetry,
            pass: true,
        });
    }
    let (pp, pm) = spectral_projectors(h);
    let proj = max_abs(&(&pm - u.adjoint() * &pp * &u));

    let mut s = CMatrix::zeros(dim, dim);
    s.view_mut((0, 0), (n, n)).copy_from(y);
    s.view_mut((n, n), (n, n)).copy_from(y);
    let a = eigenvalues(&(&pp * &s * &pp));
    let b = eigenvalues(&(&pm * &s * &pm));
    let sscale = max_abs(y).max(1.0);
    let comp = a
        .iter()
        .zip(&b)
        .map(|(x, z)| (x - z).abs())
        .fold(0.0, f64::max)
        / sscale;
    Ok(ChiralReport {
        skipped: false,
        projector_residual: proj,
        compressed_spectrum_residual: comp,
        symmetry_residual: symmetry / scale,
        pass: proj <= CHIRAL_TOL && comp <= CHIRAL_TOL && symmetry / scale <= CHIRAL_TOL,
    })
}

/// Rank of the positive projector of the free Dirac matrix at `p`.
pub fn free_projector_rank(p: [f64; 3], m: f64) -> usize {
    let (pp, _) = spectral_projectors(&free_dirac(p, m));
    pp.trace().re.round() as usize
}
