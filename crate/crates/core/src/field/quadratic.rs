//! Lower bounds on the field energy by localized quadratic expressions in the
//! fields, checked on a truncated Fock space.
//!
//! For operators `L_j(y) = Σ_m √w_q √|k| v̂_{λ,j}(k) e^{ik·y} a_m` and a weight
//! `w`, the normal form is `H_f ≥ Σ_j ∫ w L_j* L_j`; for `w ≥ 0` the
//! symmetrized form is
//! `H_f ≥ ¼ Σ_j ± ∫ w (L_j ± L_j*)² − ½ Σ_j Σ_m w_q |k| |v̂_{λ,j}|² ∫ w`.
//! Both hold when the kernel of [`vnorm`] has largest eigenvalue ≤ 1.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::fock::TruncatedFock;
use crate::field::modes::ModeSet;
use crate::field::operators::{self, columns, gram, FieldKind, FieldOp};
use crate::geometry::Point3;
use crate::spectral::hermitian::{eigenvalues, min_eigenvalue};

/// Slack allowed on `vnorm ≤ 1` before the hypothesis counts as violated.
pub const VNORM_TOL: f64 = 1e-10;

/// Coefficient family `v̂_{λ,j}(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VFamily {
    /// `(k∧ε_λ)_j / ((2π)^{3/2}|k|)`; then `i(L_j − L_j*) = B_j/√(2π)`.
    Magnetic,
    /// `(ε_λ)_j / (2π)^{3/2}`; then `i(L_j − L_j*) = E_j/√(2π)`.
    Electric,
    /// `(ε_λ)_j / ((2π)^{3/2}|k|)`; then `L_j + L_j* = A_j/√(2π)`.
    Vector,
}

impl VFamily {
    pub fn value(self, modes: &ModeSet, m: usize, j: usize) -> f64 {
        let k = modes.k(m / 2);
        let kn = k.norm();
        let eps = modes.polarization(m);
        let norm = (2.0 * PI).powf(1.5);
        match self {
            VFamily::Magnetic => k.cross(&eps)[j] / (norm * kn),
            VFamily::Electric => eps[j] / norm,
            VFamily::Vector => eps[j] / (norm * kn),
        }
    }
}

/// A grid-sampled weight; each sample stands for a point mass `value·h³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledWeight {
    pub origin: Point3,
    pub spacing: f64,
    pub dims: [usize; 3],
    pub values: Vec<f64>,
}

/// Supported descriptions of the weight `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    /// `w ≡ c`; `ŵ = c(2π)^{3/2}δ`, discretized as `δ_{qq'}/w_q`.
    Constant(f64),
    /// `Σ_s μ_s δ(· − y_s)`.
    Deltas(Vec<(Point3, f64)>),
    Sampled(SampledWeight),
}

impl Weight {
    fn point_masses(&self) -> Result<Option<Vec<(Point3, f64)>>> {
        match self {
            Weight::Constant(_) => Ok(None),
            Weight::Deltas(d) => Ok(Some(d.clone())),
            Weight::Sampled(s) => {
                let n = s.dims[0] * s.dims[1] * s.dims[2];
                if s.values.len() != n || !(s.spacing > 0.0) {
                    return Err(Error::domain(
                        "sampled weight: values do not match the grid",
                    ));
                }
                let cell = s.spacing.powi(3);
                let mut out = Vec::with_capacity(n);
                for i in 0..s.dims[0] {
                    for j in 0..s.dims[1] {
                        for k in 0..s.dims[2] {
                            let v = s.values[(i * s.dims[1] + j) * s.dims[2] + k];
                            let y = [
                                s.origin[0] + i as f64 * s.spacing,
                                s.origin[1] + j as f64 * s.spacing,
                                s.origin[2] + k as f64 * s.spacing,
                            ];
                            out.push((y, v * cell));
                        }
                    }
                }
                Ok(Some(out))
            }
        }
    }
}

fn validate(w: &Weight) -> Result<()> {
    let bad = match w {
        Weight::Constant(c) => !c.is_finite(),
        Weight::Deltas(d) => d
            .iter()
            .any(|(y, m)| !m.is_finite() || y.iter().any(|c| !c.is_finite())),
        Weight::Sampled(s) => s.values.iter().any(|v| !v.is_finite()),
    };
    if bad {
        return Err(Error::domain(
            "weight description contains non-finite values",
        ));
    }
    Ok(())
}

/// Largest eigenvalue of the discretized kernel
/// `M[m, m'] = (2π)^{3/2} √(w_q w_q') Σ_j v̂_{m,j} v̂_{m',j} ŵ(k' − k)`
/// with `ŵ(p) = (2π)^{−3/2} ∫ w(y) e^{ip·y} dy`.
pub fn vnorm(w: &Weight, family: VFamily, modes: &ModeSet) -> Result<f64> {
    validate(w)?;
    let n = modes.n_modes();
    if n == 0 {
        return Ok(0.0);
    }
    let v = |m: usize, j: usize| family.value(modes, m, j);
    let kernel = match w.point_masses()? {
        None => {
            let Weight::Constant(c) = w else {
                unreachable!()
            };
            let scale = c * (2.0 * PI).powi(3);
            let mut best = f64::NEG_INFINITY;
            for q in 0..modes.n_points() {
                let mut block = DMatrix::<Complex64>::zeros(2, 2);
                for a in 0..2 {
                    for b in 0..2 {
                        let s: f64 = (0..3).map(|j| v(2 * q + a, j) * v(2 * q + b, j)).sum();
                        block[(a, b)] = Complex64::new(scale * s, 0.0);
                    }
                }
                best = best.max(*eigenvalues(&block).last().unwrap());
            }
            return Ok(best);
        }
        Some(masses) => {
            // M = Σ_s μ_s Σ_j g g*, with g_m = √w_q v̂_{m,j} e^{−ik·y_s}.
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for (y, mu) in &masses {
                let yv = Vector3::from(*y);
                for j in 0..3 {
                    let g: Vec<Complex64> = (0..n)
                        .map(|a| {
                            let q = a / 2;
                            Complex64::from_polar(
                                modes.weights[q].sqrt() * v(a, j),
                                -modes.k(q).dot(&yv),
                            )
                        })
                        .collect();
                    for a in 0..n {
                        let ga = g[a] * *mu;
                        for b in 0..n {
                            m[(a, b)] += ga * g[b].conj();
                        }
                    }
                }
            }
            m
        }
    };
    Ok(*eigenvalues(&kernel).last().unwrap())
}

/// Ladder form of (L_j(y)) as a [`FieldOp`] with annihilators only.
pub fn l_operator(modes: &ModeSet, family: VFamily, j: usize, y: &Point3) -> FieldOp {
    let yv = Vector3::from(*y);
    let ann = (0..modes.n_modes())
        .map(|m| {
            let q = m / 2;
            let k = modes.k(q);
            Complex64::from_polar(
                modes.weights[q].sqrt() * k.norm().sqrt() * family.value(modes, m, j),
                k.dot(&yv),
            )
        })
        .collect();
    FieldOp::annihilator(ann)
}

/// `½ Σ_j Σ_m w_q |k| |v̂_{m,j}|²`, the subtraction per unit `∫w`.
pub fn subtraction_per_weight(modes: &ModeSet, family: VFamily) -> f64 {
    0.5 * (0..modes.n_modes())
        .map(|m| {
            let q = m / 2;
            let s: f64 = (0..3).map(|j| family.value(modes, m, j).powi(2)).sum();
            modes.weights[q] * modes.omega(q) * s
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadraticForm {
    Normal,
    SymmetrizedPlus,
    SymmetrizedMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldEnergyReport {
    pub vnorm: f64,
    /// Smallest eigenvalue of `H_f − RHS` on sectors ≤ `n_max − 2`.
    pub margin: f64,
    /// Constant added back on the right (zero for the normal form).
    pub subtraction: f64,
    pub compressed_dim: usize,
}

/// Assembles `H_f − RHS` on photon sectors ≤ `n_max − 2` and returns its
/// smallest eigenvalue.
pub fn field_energy_check(
    fock: &TruncatedFock,
    w: &Weight,
    family: VFamily,
    form: QuadraticForm,
) -> Result<FieldEnergyReport> {
    if fock.n_max < 2 {
        return Err(Error::precondition("field energy check needs n_max >= 2"));
    }
    let modes = &fock.modes;
    let vn = vnorm(w, family, modes)?;
    if vn > 1.0 + VNORM_TOL {
        return Err(Error::precondition(format!("||w||_v = {vn} exceeds 1")));
    }
    let range = fock.sectors_up_to(fock.n_max - 2);
    let mut h = operators::hf_compressed(fock, range.clone());
    let mut subtraction = 0.0;
    match (form, w.point_masses()?) {
        (QuadraticForm::Normal, None) => {
            let Weight::Constant(c) = w else {
                unreachable!()
            };
            h -= one_body_constant(fock, family, *c, range.clone());
        }
        (QuadraticForm::Normal, Some(masses)) => {
            for (y, mu) in &masses {
                for j in 0..3 {
                    let cols = columns(&l_operator(modes, family, j, y), fock, range.clone());
                    h -= gram(&cols, &cols, fock.dim()) * Complex64::new(*mu, 0.0);
                }
            }
        }
        (_, None) => {
            return Err(Error::domain(
                "symmetrized forms need a localized weight (delta masses or samples)",
            ))
        }
        (form, Some(masses)) => {
            if masses.iter().any(|(_, mu)| *mu < 0.0) {
                return Err(Error::precondition("symmetrized forms need w >= 0"));
            }
            for (y, mu) in &masses {
                for j in 0..3 {
                    let l = l_operator(modes, family, j, y);
                    let x = match form {
                        QuadraticForm::SymmetrizedPlus => l.add(&l.adjoint()),
                        _ => l
                            .add(&l.adjoint().scaled(Complex64::new(-1.0, 0.0)))
                            .scaled(Complex64::new(0.0, 1.0)),
                    };
                    let cols = columns(&x, fock, range.clone());
                    h -= gram(&cols, &cols, fock.dim()) * Complex64::new(0.25 * mu, 0.0);
                }
            }
            let total: f64 = masses.iter().map(|(_, mu)| mu).sum();
            subtraction = subtraction_per_weight(modes, family) * total;
            for i in 0..h.nrows() {
                h[(i, i)] += subtraction;
            }
        }
    }
    Ok(FieldEnergyReport {
        vnorm: vn,
        margin: min_eigenvalue(&h),
        subtraction,
        compressed_dim: range.len(),
    })
}

/// `dΓ(K)` with `K[m, m'] = c(2π)³ |k_q| Σ_j v̂_{m,j} v̂_{m',j}` for modes at the same point.
fn one_body_constant(
    fock: &TruncatedFock,
    family: VFamily,
    c: f64,
    range: std::ops::Range<usize>,
) -> DMatrix<Complex64> {
    let modes = &fock.modes;
    let d = range.len();
    let mut out = DMatrix::zeros(d, d);
    let scale = c * (2.0 * PI).powi(3);
    for b in range.clone() {
        let state = fock.state(b).to_vec();
        let mut seen = Vec::new();
        for &mp in &state {
            let mp = mp as usize;
            if seen.contains(&mp) {
                continue;
            }
            seen.push(mp);
            let (t, amp) = fock.annihilate(b, mp).unwrap();
            let q = mp / 2;
            for m in [2 * q, 2 * q + 1] {
                let kmm: f64 = scale
                    * modes.omega(q)
                    * (0..3)
                        .map(|j| family.value(modes, m, j) * family.value(modes, mp, j))
                        .sum::<f64>();
                if kmm == 0.0 {
                    continue;
                }
                // Number-conserving, so the result stays inside `range`.
                let (r, amp2) = fock.create(t, m).unwrap();
                out[(r - range.start, b - range.start)] += Complex64::new(kmm * amp * amp2, 0.0);
            }
        }
    }
    out
}

/// Which boxed pointwise bound to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointwiseField {
    /// `H_f ≥ (9π/8)Λ⁻³ B(x)² − (9/8)Λ`
    B,
    /// `H_f ≥ (3π/8)Λ⁻¹ A(x)² − (3/4)Λ`
    A,
    /// The electric analog of the magnetic bound (same constants).
    E,
}

impl PointwiseField {
    fn kind(self) -> FieldKind {
        match self {
            PointwiseField::B => FieldKind::B,
            PointwiseField::E => FieldKind::E,
            PointwiseField::A => FieldKind::A,
        }
    }
}

/// A field-energy bound with closed-form constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    /// Constant weight `w` with magnetic coefficients; constants per unit `∫w`.
    Smeared,
    /// Point-mass weight at one `x`.
    Point(PointwiseField),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub case: BoundCase,
    /// Weight normalization `C` for the point-mass cases.
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub prefactor: f64,
    /// Per unit `∫w` in the smeared case.
    pub subtraction: f64,
    pub per_unit_weight: bool,
    /// False for constants obtained by the same normalization argument but not printed.
    pub printed: bool,
}

/// Closed-form constants of the smeared and pointwise bounds.
///
/// The electric case reuses the magnetic constants; they follow from the same
/// normalization but are flagged as not printed.
pub fn bound_constants(case: BoundCase, lambda: f64) -> Result<BoundConstants> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("Lambda must be > 0, got {lambda}")));
    }
    let pointwise_b = BoundConstants {
        case,
        c: Some(9.0 * PI * PI / lambda.powi(3)),
        prefactor: 9.0 * PI / (8.0 * lambda.powi(3)),
        subtraction: 9.0 * lambda / 8.0,
        per_unit_weight: false,
        printed: true,
    };
    Ok(match case {
        BoundCase::Smeared => BoundConstants {
            case,
            c: None,
            prefactor: 1.0 / (8.0 * PI),
            subtraction: lambda.powi(4) / (8.0 * PI * PI),
            per_unit_weight: true,
            printed: true,
        },
        BoundCase::Point(PointwiseField::B) => pointwise_b,
        BoundCase::Point(PointwiseField::E) => BoundConstants {
            printed: false,
            ..pointwise_b
        },
        BoundCase::Point(PointwiseField::A) => BoundConstants {
            case,
            c: Some(3.0 * PI * PI / lambda),
            prefactor: 3.0 * PI / (8.0 * lambda),
            subtraction: 0.75 * lambda,
            per_unit_weight: false,
            printed: true,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub which: PointwiseField,
    pub prefactor: f64,
    pub subtraction: f64,
    /// Smallest eigenvalue of `H_f − prefactor·Σ_i X_i(x)² + subtraction` on sectors ≤ `n_max − 2`.
    pub margin: f64,
    pub compressed_dim: usize,
}

/// Checks a boxed pointwise bound with its closed-form constants.
pub fn pointwise_bound_check(
    fock: &TruncatedFock,
    x: &Point3,
    which: PointwiseField,
) -> Result<PointwiseReport> {
    if fock.n_max < 2 {
        return Err(Error::precondition("pointwise check needs n_max >= 2"));
    }
    let consts = bound_constants(BoundCase::Point(which), fock.modes.lambda)?;
    let range = fock.sectors_up_to(fock.n_max - 2);
    let mut h = operators::hf_compressed(fock, range.clone());
    for i in 0..3 {
        let op = operators::field_component(&fock.modes, which.kind(), i, x);
        let cols = columns(&op, fock, range.clone());
        h -= gram(&cols, &cols, fock.dim()) * Complex64::new(consts.prefactor, 0.0);
    }
    for i in 0..h.nrows() {
        h[(i, i)] += consts.subtraction;
    }
    Ok(PointwiseReport {
        which,
        prefactor: consts.prefactor,
        subtraction: consts.subtraction,
        margin: min_eigenvalue(&h),
        compressed_dim: range.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::modes::{build_modeset, AngularRule};
    use approx::assert_relative_eq;

    fn fock(n_radial: usize, rule: AngularRule, n_max: usize, seed: u64) -> TruncatedFock {
        TruncatedFock::new(build_modeset(1.0, n_radial, rule, seed).unwrap(), n_max).unwrap()
    }

    #[test]
    fn constants_values() {
        let pb = bound_constants(BoundCase::Point(PointwiseField::B), 1.0).unwrap();
        assert_relative_eq!(pb.c.unwrap(), 88.826_439_609_804_23, max_relative = 1e-14);
        assert_eq!(pb.subtraction, 1.125);
        let pa = bound_constants(BoundCase::Point(PointwiseField::A), 2.0).unwrap();
        assert_relative_eq!(pa.prefactor, 3.0 * PI / 16.0, max_relative = 1e-15);
        assert_eq!(pa.subtraction, 1.5);
        let sm = bound_constants(BoundCase::Smeared, 1.0).unwrap();
        assert_relative_eq!(sm.prefactor, 1.0 / (8.0 * PI));
        assert_relative_eq!(sm.subtraction, 1.0 / (8.0 * PI * PI));
        assert!(
            !bound_constants(BoundCase::Point(PointwiseField::E), 1.0)
                .unwrap()
                .printed
        );
        assert!(bound_constants(BoundCase::Smeared, 0.0).is_err());
    }

    #[test]
    fn constants_self_consistency() {
        for lambda in [0.5, 1.0, 3.0] {
            let c2 = bound_constants(BoundCase::Point(PointwiseField::B), lambda)
                .unwrap()
                .c
                .unwrap();
            let c4 = bound_constants(BoundCase::Point(PointwiseField::A), lambda)
                .unwrap()
                .c
                .unwrap();
            let g = (2.0 / 3.0) / (2.0 * PI).powi(3);
            assert!((c2 * g * 4.0 * PI / 3.0 * lambda.powi(3) - 1.0).abs() < 1e-14);
            assert!((c4 * g * 4.0 * PI * lambda - 1.0).abs() < 1e-14);
            // Prefactor C/(8π) and subtraction C·Λ⁴/(8π²) for the magnetic case.
            let pb = bound_constants(BoundCase::Point(PointwiseField::B), lambda).unwrap();
            assert_relative_eq!(pb.prefactor, c2 / (8.0 * PI), max_relative = 1e-14);
            assert_relative_eq!(
                pb.subtraction,
                c2 * lambda.powi(4) / (8.0 * PI * PI),
                max_relative = 1e-14
            );
            let pa = bound_constants(BoundCase::Point(PointwiseField::A), lambda).unwrap();
            assert_relative_eq!(pa.prefactor, c4 / (8.0 * PI), max_relative = 1e-14);
            assert_relative_eq!(
                pa.subtraction,
                c4 * lambda * lambda / (4.0 * PI * PI),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn vnorm_values() {
        let modes = build_modeset(1.0, 3, AngularRule::Icosahedron, 2).unwrap();
        assert_relative_eq!(
            vnorm(&Weight::Constant(1.0), VFamily::Magnetic, &modes).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            vnorm(&Weight::Constant(1.0), VFamily::Electric, &modes).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        let c = 9.0 * PI * PI;
        let x = [0.3, -0.2, 0.9];
        assert_relative_eq!(
            vnorm(&Weight::Deltas(vec![(x, c)]), VFamily::Magnetic, &modes).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            vnorm(
                &Weight::Deltas(vec![(x, 3.0 * PI * PI)]),
                VFamily::Vector,
                &modes
            )
            .unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_eq!(
            vnorm(&Weight::Constant(0.0), VFamily::Magnetic, &modes).unwrap(),
            0.0
        );
    }

    #[test]
    fn vnorm_delta_matches_gram_oracle() {
        // Rank-3 kernel: top eigenvalue is C times that of Σ_q w_q Σ_λ v̂ v̂ᵀ.
        let modes = build_modeset(1.0, 2, AngularRule::Octahedron, 11).unwrap();
        let mut g = nalgebra::Matrix3::<f64>::zeros();
        for m in 0..modes.n_modes() {
            let v = Vector3::from_fn(|j, _| VFamily::Magnetic.value(&modes, m, j));
            g += v * v.transpose() * modes.weights[m / 2];
        }
        let top = g.symmetric_eigenvalues().max();
        let vn = vnorm(
            &Weight::Deltas(vec![([0.1, 0.2, 0.3], 2.0)]),
            VFamily::Magnetic,
            &modes,
        )
        .unwrap();
        assert_relative_eq!(vn, 2.0 * top, max_relative = 1e-12);
    }

    #[test]
    fn normal_form_values() {
        let f = fock(2, AngularRule::Octahedron, 3, 0);
        let zero = field_energy_check(
            &f,
            &Weight::Constant(0.0),
            VFamily::Magnetic,
            QuadraticForm::Normal,
        )
        .unwrap();
        assert_eq!(zero.margin, 0.0);
        let one = field_energy_check(
            &f,
            &Weight::Constant(1.0),
            VFamily::Magnetic,
            QuadraticForm::Normal,
        )
        .unwrap();
        assert!(one.margin.abs() <= 1e-12);
        let c = 9.0 * PI * PI;
        let delta = field_energy_check(
            &f,
            &Weight::Deltas(vec![([0.2, 0.0, -0.1], c)]),
            VFamily::Magnetic,
            QuadraticForm::Normal,
        )
        .unwrap();
        assert!(delta.margin >= -1e-12);
    }

    #[test]
    fn margin_shrinks_with_sectors() {
        // H_f − Σ L*L conserves photon number, so adding sectors can only lower the minimum.
        let w = Weight::Deltas(vec![([0.2, 0.1, -0.1], 40.0), ([-0.3, 0.0, 0.2], 30.0)]);
        let m3 = field_energy_check(
            &fock(1, AngularRule::Octahedron, 3, 0),
            &w,
            VFamily::Magnetic,
            QuadraticForm::Normal,
        )
        .unwrap();
        let m4 = field_energy_check(
            &fock(1, AngularRule::Octahedron, 4, 0),
            &w,
            VFamily::Magnetic,
            QuadraticForm::Normal,
        )
        .unwrap();
        assert!(m4.margin >= -1e-12);
        assert!(m4.margin <= m3.margin + 1e-12);
        assert!(m4.compressed_dim > m3.compressed_dim);
    }

    #[test]
    fn symmetrized_forms() {
        let f = fock(2, AngularRule::Octahedron, 3, 4);
        let c = 9.0 * PI * PI;
        let w = Weight::Deltas(vec![([0.0, 0.3, 0.1], c)]);
        for form in [
            QuadraticForm::SymmetrizedPlus,
            QuadraticForm::SymmetrizedMinus,
        ] {
            let r = field_energy_check(&f, &w, VFamily::Magnetic, form).unwrap();
            assert!(r.margin >= -1e-10, "{form:?}: {}", r.margin);
            assert_relative_eq!(r.subtraction, 9.0 / 8.0, max_relative = 1e-12);
        }
        assert!(matches!(
            field_energy_check(
                &f,
                &Weight::Constant(1.0),
                VFamily::Magnetic,
                QuadraticForm::SymmetrizedPlus
            ),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            field_energy_check(
                &f,
                &Weight::Deltas(vec![([0.0; 3], 2.0 * c)]),
                VFamily::Magnetic,
                QuadraticForm::Normal
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pointwise_matches_symmetrized_form() {
        // (9π/8)Λ⁻³B² − (9/8)Λ is the minus form with w = Cδ_x.
        let f = fock(2, AngularRule::Icosahedron, 3, 0);
        let x = [0.1, -0.4, 0.25];
        let p = pointwise_bound_check(&f, &x, PointwiseField::B).unwrap();
        let l = field_energy_check(
            &f,
            &Weight::Deltas(vec![(x, 9.0 * PI * PI)]),
            VFamily::Magnetic,
            QuadraticForm::SymmetrizedMinus,
        )
        .unwrap();
        assert!((p.margin - l.margin).abs() < 1e-10);
        let pa = pointwise_bound_check(&f, &x, PointwiseField::A).unwrap();
        let la = field_energy_check(
            &f,
            &Weight::Deltas(vec![(x, 3.0 * PI * PI)]),
            VFamily::Vector,
            QuadraticForm::SymmetrizedPlus,
        )
        .unwrap();
        assert!((pa.margin - la.margin).abs() < 1e-10);
    }

    #[test]
    fn pointwise_margins_nonnegative() {
        let f = fock(2, AngularRule::Icosahedron, 3, 7);
        assert_eq!(f.n_modes(), 48);
        for which in [PointwiseField::B, PointwiseField::A, PointwiseField::E] {
            let r = pointwise_bound_check(&f, &[0.0; 3], which).unwrap();
            assert!(r.margin >= -1e-8, "{which:?}: {}", r.margin);
        }
    }

    #[test]
    fn pointwise_on_empty_field() {
        let f = TruncatedFock::new(ModeSet::empty(2.0), 3).unwrap();
        let r = pointwise_bound_check(&f, &[0.0; 3], PointwiseField::B).unwrap();
        assert_eq!(r.margin, 9.0 * 2.0 / 8.0);
    }

    #[test]
    fn vnorm_is_rotation_invariant() {
        let x = [0.2, 0.1, 0.0];
        let w = Weight::Deltas(vec![(x, 50.0)]);
        let v0 = vnorm(
            &w,
            VFamily::Magnetic,
            &build_modeset(1.0, 2, AngularRule::Icosahedron, 0).unwrap(),
        )
        .unwrap();
        let v1 = vnorm(
            &w,
            VFamily::Magnetic,
            &build_modeset(1.0, 2, AngularRule::Icosahedron, 99).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(v0, v1, max_relative = 1e-12);
    }
}
