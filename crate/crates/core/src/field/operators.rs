//! Field operators linear in the ladder operators, `X = Σ_m (α_m a_m + β_m a*_m)`,
//! and their action on a truncated Fock space.
//!
//! With quadrature weight `w_q` at point `k_q`, the discrete ladder operators
//! satisfy `[a_m, a*_n] = δ_mn` and stand for `√w_q a(k_q)`, so mode sums
//! carry `√w_q` and reproduce the continuum integrals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::fock::{Sparse, TruncatedFock};
use crate::field::modes::ModeSet;
use crate::geometry::Point3;

/// Largest dimension for which dense Fock matrices are assembled.
pub const DENSE_CAP: usize = 4096;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct FieldOp {
    /// Coefficient of `a_m`.
    pub ann: Vec<Complex64>,
    /// Coefficient of `a*_m`.
    pub cre: Vec<Complex64>,
}

impl FieldOp {
    pub fn zero(n_modes: usize) -> Self {
        FieldOp {
            ann: vec![Complex64::new(0.0, 0.0); n_modes],
            cre: vec![Complex64::new(0.0, 0.0); n_modes],
        }
    }

    /// Hermitian operator `Σ (c_m a_m + c̄_m a*_m)`.
    pub fn hermitian(ann: Vec<Complex64>) -> Self {
        let cre = ann.iter().map(|c| c.conj()).collect();
        FieldOp { ann, cre }
    }

    /// Pure annihilation part `Σ c_m a_m`.
    pub fn annihilator(ann: Vec<Complex64>) -> Self {
        let n = ann.len();
        FieldOp {
            ann,
            cre: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn adjoint(&self) -> Self {
        FieldOp {
            ann: self.cre.iter().map(|c| c.conj()).collect(),
            cre: self.ann.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        FieldOp {
            ann: self.ann.iter().map(|c| c * s).collect(),
            cre: self.cre.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &FieldOp) -> Self {
        FieldOp {
            ann: self
                .ann
                .iter()
                .zip(&other.ann)
                .map(|(a, b)| a + b)
                .collect(),
            cre: self
                .cre
                .iter()
                .zip(&other.cre)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// The c-number `[X, Y] = Σ_m (α_m β'_m − β_m α'_m)` of the untruncated CCR.
    pub fn commutator_scalar(&self, other: &FieldOp) -> Complex64 {
        self.ann
            .iter()
            .zip(&self.cre)
            .zip(other.ann.iter().zip(&other.cre))
            .map(|((a, b), (a2, b2))| a * b2 - b * a2)
            .sum()
    }

    /// `X|i⟩` on the truncated space (components above `n_max` are dropped).
    pub fn apply_basis(&self, fock: &TruncatedFock, i: usize) -> Sparse {
        let mut out = Sparse::new();
        for (m, c) in self.ann.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                if let Some((t, amp)) = fock.annihilate(i, m) {
                    out.push((t, c * amp));
                }
            }
        }
        for (m, c) in self.cre.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                if let Some((t, amp)) = fock.create(i, m) {
                    out.push((t, c * amp));
                }
            }
        }
        out
    }

    /// Dense matrix on the full truncated space.
    pub fn dense(&self, fock: &TruncatedFock) -> Result<DMatrix<Complex64>> {
        let d = fock.dim();
        if d > DENSE_CAP {
            return Err(Error::resource(format!(
                "dense Fock matrix of dimension {d} exceeds {DENSE_CAP}"
            )));
        }
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            for (i, c) in self.apply_basis(fock, j) {
                m[(i, j)] += c;
            }
        }
        Ok(m)
    }
}

/// Columns `X e_b` for `b` in `range`, merged per column.
pub fn columns(op: &FieldOp, fock: &TruncatedFock, range: std::ops::Range<usize>) -> Vec<Sparse> {
    range
        .map(|b| {
            let mut col = op.apply_basis(fock, b);
            col.sort_by_key(|e| e.0);
            let mut merged: Sparse = Vec::with_capacity(col.len());
            for (i, c) in col {
                match merged.last_mut() {
                    Some(last) if last.0 == i => last.1 += c,
                    _ => merged.push((i, c)),
                }
            }
            merged
        })
        .collect()
}

/// `U† V` for column lists over the same full space: `G[b, b'] = ⟨u_b, v_b'⟩`.
pub fn gram(u: &[Sparse], v: &[Sparse], dim: usize) -> DMatrix<Complex64> {
    let mut rows_u: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
    for (b, col) in u.iter().enumerate() {
        for &(r, c) in col {
            rows_u[r].push((b, c));
        }
    }
    let mut g = DMatrix::zeros(u.len(), v.len());
    for (b2, col) in v.iter().enumerate() {
        for &(r, c2) in col {
            for &(b, c) in &rows_u[r] {
                g[(b, b2)] += c.conj() * c2;
            }
        }
    }
    g
}

/// Compression of `X*X` to the states in `range`; exact whenever `X` maps
/// `range` into the truncated space without loss.
pub fn compressed_square(
    op: &FieldOp,
    fock: &TruncatedFock,
    range: std::ops::Range<usize>,
) -> DMatrix<Complex64> {
    let cols = columns(op, fock, range);
    gram(&cols, &cols, fock.dim())
}

/// Diagonal of `H_f = Σ |k| a*a` on `range`.
pub fn hf_compressed(fock: &TruncatedFock, range: std::ops::Range<usize>) -> DMatrix<Complex64> {
    let d = range.len();
    let mut m = DMatrix::zeros(d, d);
    for (i, b) in range.enumerate() {
        m[(i, i)] = Complex64::new(fock.hf_diagonal(b), 0.0);
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    A,
    B,
    E,
}

/// Annihilation coefficients of component `i` of the cut-off field at `x`:
/// `A: (1/2π)√w ε_i e^{ik·x}/√|k|`, `B: (i/2π)√w (k∧ε)_i e^{ik·x}/√|k|`,
/// `E: (i/2π)√w √|k| ε_i e^{ik·x}`.
pub fn field_coefficients(
    modes: &ModeSet,
    kind: FieldKind,
    i: usize,
    x: &Point3,
) -> Vec<Complex64> {
    let xv = Vector3::from(*x);
    (0..modes.n_modes())
        .map(|m| {
            let q = m / 2;
            let k = modes.k(q);
            let kn = k.norm();
            let eps = modes.polarization(m);
            let phase = Complex64::from_polar(1.0, k.dot(&xv));
            let sw = modes.weights[q].sqrt() / (2.0 * PI);
            match kind {
                FieldKind::A => phase * (sw * eps[i] / kn.sqrt()),
                FieldKind::B => I * phase * (sw * k.cross(&eps)[i] / kn.sqrt()),
                FieldKind::E => I * phase * (sw * kn.sqrt() * eps[i]),
            }
        })
        .collect()
}

pub fn field_component(modes: &ModeSet, kind: FieldKind, i: usize, x: &Point3) -> FieldOp {
    FieldOp::hermitian(field_coefficients(modes, kind, i, x))
}

/// The three components of A, B and E at one point.
#[derive(Debug, Clone)]
pub struct FieldOperators {
    pub x: Point3,
    pub a: [FieldOp; 3],
    pub b: [FieldOp; 3],
    pub e: [FieldOp; 3],
}

impl FieldOperators {
    pub fn component(&self, kind: FieldKind, i: usize) -> &FieldOp {
        match kind {
            FieldKind::A => &self.a[i],
            FieldKind::B => &self.b[i],
            FieldKind::E => &self.e[i],
        }
    }

    /// Dense `H_f` on the full truncated space.
    pub fn hf_dense(fock: &TruncatedFock) -> Result<DMatrix<Complex64>> {
        let d = fock.dim();
        if d > DENSE_CAP {
            return Err(Error::resource(format!(
                "dense Fock matrix of dimension {d} exceeds {DENSE_CAP}"
            )));
        }
        Ok(hf_compressed(fock, 0..d))
    }
}

pub fn build_operators(fock: &TruncatedFock, x: &Point3) -> FieldOperators {
    let f = |kind| std::array::from_fn(|i| field_component(&fock.modes, kind, i, x));
    FieldOperators {
        x: *x,
        a: f(FieldKind::A),
        b: f(FieldKind::B),
        e: f(FieldKind::E),
    }
}

/// `[X, Y]` compressed to sectors ≤ `n_max − 1`, where the truncated CCR are exact.
pub fn compressed_commutator(x: &FieldOp, y: &FieldOp, fock: &TruncatedFock) -> DMatrix<Complex64> {
    let range = fock.sectors_up_to(fock.n_max.saturating_sub(1));
    let xa = columns(&x.adjoint(), fock, range.clone());
    let ya = columns(&y.adjoint(), fock, range.clone());
    let xc = columns(x, fock, range.clone());
    let yc = columns(y, fock, range);
    // ⟨e_b, XY e_b'⟩ = ⟨X* e_b, Y e_b'⟩.
    gram(&xa, &yc, fock.dim()) - gram(&ya, &xc, fock.dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub first: FieldKind,
    pub second: FieldKind,
    pub i: usize,
    pub j: usize,
    /// Largest entry modulus of the compressed commutator matrix.
    pub max_entry: f64,
    /// Modulus of the c-number value `Σ (α β' − β α')`.
    pub scalar: f64,
}

/// All nine component pairs of `[A(x), A(y)]`, `[B(x), B(y)]`, `[A(x), B(y)]`.
pub fn field_commutators(fock: &TruncatedFock, x: &Point3, y: &Point3) -> Vec<CommutatorReport> {
    let ox = build_operators(fock, x);
    let oy = build_operators(fock, y);
    let mut out = Vec::new();
    for (p, q) in [
        (FieldKind::A, FieldKind::A),
        (FieldKind::B, FieldKind::B),
        (FieldKind::A, FieldKind::B),
    ] {
        for i in 0..3 {
            for j in 0..3 {
                let (u, v) = (ox.component(p, i), oy.component(q, j));
                let c = compressed_commutator(u, v, fock);
                out.push(CommutatorReport {
                    first: p,
                    second: q,
                    i,
                    j,
                    max_entry: c.iter().map(|z| z.norm()).fold(0.0, f64::max),
                    scalar: u.commutator_scalar(v).norm(),
                });
            }
        }
    }
    out
}

/// Largest deviation of `[a_m, a*_n]` from `δ_mn·Id` on sectors ≤ `n_max − 1`.
pub fn ccr_residual(fock: &TruncatedFock) -> f64 {
    let n = fock.n_modes();
    let mut worst: f64 = 0.0;
    let unit = |m: usize, ann: bool| {
        let mut op = FieldOp::zero(n);
        if ann {
            op.ann[m] = Complex64::new(1.0, 0.0);
        } else {
            op.cre[m] = Complex64::new(1.0, 0.0);
        }
        op
    };
    for m in 0..n {
        for k in 0..n {
            let c = compressed_commutator(&unit(m, true), &unit(k, false), fock);
            let d = if m == k { 1.0 } else { 0.0 };
            for r in 0..c.nrows() {
                for s in 0..c.ncols() {
                    let target = if r == s { d } else { 0.0 };
                    worst = worst.max((c[(r, s)] - target).norm());
                }
            }
        }
    }
    worst
}
