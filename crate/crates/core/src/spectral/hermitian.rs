//! Dense Hermitian matrices and the spectral functionals used by the
//! trace inequalities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance.
pub const HERMITICITY_TOL: f64 = 1e-13;

pub type CMatrix = DMatrix<Complex64>;

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |H − H*|`, relative to `max(1, max |H|)`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint())) / max_abs(m).max(1.0)
}

/// Ascending eigenvalues of a Hermitian matrix (the upper triangle is trusted).
pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Ascending eigenvalues with the corresponding eigenvectors as columns.
pub fn eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| e.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

/// `f(H) = V f(Λ) V*`.
pub fn apply_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    let (vals, vecs) = eigen(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&x| Complex64::new(f(x), 0.0)));
    &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
}

/// A labeled Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    pub label: String,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::domain("Hermitian operator must be square"));
        }
        let r = hermiticity_residual(&matrix);
        if !(r <= HERMITICITY_TOL) {
            return Err(Error::domain(format!(
                "Hermiticity residual {r:e} exceeds {HERMITICITY_TOL:e}"
            )));
        }
        // Symmetrize so that downstream spectral routines see an exact Hermitian matrix.
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(HermitianOperator {
            label: label.into(),
            matrix,
        })
    }

    pub fn from_real_diagonal(label: impl Into<String>, d: &[f64]) -> Self {
        let v = DVector::from_iterator(d.len(), d.iter().map(|&x| Complex64::new(x, 0.0)));
        HermitianOperator {
            label: label.into(),
            matrix: CMatrix::from_diagonal(&v),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues(&self.matrix)
    }
}

/// Exponent of the negative-part trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Moment {
    One,
    Half,
}

impl Moment {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Moment::One => x,
            Moment::Half => x.sqrt(),
        }
    }
}

/// `Σ |e|^p` over the negative eigenvalues `e`.
pub fn negative_part_trace(h: &HermitianOperator, p: Moment) -> f64 {
    negative_part_trace_of(&h.eigenvalues(), p)
}

pub fn negative_part_trace_of(eigs: &[f64], p: Moment) -> f64 {
    eigs.iter()
        .filter(|&&e| e < 0.0)
        .map(|&e| p.apply(-e))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn examples() {
        let h = HermitianOperator::from_real_diagonal("d", &[1.0, -4.0]);
        assert_eq!(negative_part_trace(&h, Moment::Half), 2.0);
        assert_eq!(negative_part_trace(&h, Moment::One), 4.0);
        let pd = HermitianOperator::from_real_diagonal("pd", &[1.0, 2.0]);
        assert_eq!(negative_part_trace(&pd, Moment::One), 0.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 1.0), c(1.0, 1.0), c(0.0, 0.0)]);
        assert!(HermitianOperator::new("bad", m).is_err());
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[a, b], [b̄, d]] has eigenvalues (a+d)/2 ± √(((a−d)/2)² + |b|²).
        let (a, d, b) = (0.3, -1.2, c(0.4, -0.7));
        let m = CMatrix::from_row_slice(2, 2, &[c(a, 0.0), b, b.conj(), c(d, 0.0)]);
        let e = eigenvalues(&m);
        let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        assert!((e[0] - ((a + d) / 2.0 - r)).abs() < 1e-14);
        assert!((e[1] - ((a + d) / 2.0 + r)).abs() < 1e-14);
        let (vals, vecs) = eigen(&m);
        let recon = &vecs
            * CMatrix::from_diagonal(&DVector::from_iterator(2, vals.iter().map(|&x| c(x, 0.0))))
            * vecs.adjoint();
        assert!(max_abs(&(recon - m)) < 1e-14);
    }
}
