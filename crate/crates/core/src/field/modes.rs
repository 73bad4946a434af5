//! Discrete photon modes: quadrature points in the ball `|k| ≤ Λ`, each with
//! two transverse polarizations.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Angular part of the product quadrature. Every rule is antipodal and
/// integrates polynomials of degree ≤ 3 exactly over the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngularRule {
    /// The six points ±x̂, ±ŷ, ±ẑ.
    Octahedron,
    /// The twelve icosahedron vertices (degree 5).
    Icosahedron,
    /// Gauss–Legendre in cos θ times `2·n_theta` uniform azimuths.
    Product { n_theta: usize },
}

impl AngularRule {
    /// Rule with the given point count: 6, 12, or `2·t²` for a product rule.
    pub fn from_count(n: usize) -> Result<Self> {
        match n {
            6 => Ok(AngularRule::Octahedron),
            12 => Ok(AngularRule::Icosahedron),
            _ => {
                let t = ((n / 2) as f64).sqrt().round() as usize;
                if t >= 1 && 2 * t * t == n {
                    Ok(AngularRule::Product { n_theta: t })
                } else {
                    Err(Error::domain(format!(
                        "no antipodal angular rule with {n} points (use 6, 12 or 2t^2)"
                    )))
                }
            }
        }
    }

    /// Unit directions and weights summing to 4π.
    pub fn nodes(&self) -> Vec<(Vector3<f64>, f64)> {
        let four_pi = 4.0 * std::f64::consts::PI;
        match *self {
            AngularRule::Octahedron => {
                let mut v = Vec::with_capacity(6);
                for a in 0..3 {
                    for s in [1.0, -1.0] {
                        let mut u = Vector3::zeros();
                        u[a] = s;
                        v.push((u, four_pi / 6.0));
                    }
                }
                v
            }
            AngularRule::Icosahedron => {
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                let mut v = Vec::with_capacity(12);
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        for u in [
                            Vector3::new(0.0, s1, s2 * phi),
                            Vector3::new(s1, s2 * phi, 0.0),
                            Vector3::new(s2 * phi, 0.0, s1),
                        ] {
                            v.push((u.normalize(), four_pi / 12.0));
                        }
                    }
                }
                v
            }
            AngularRule::Product { n_theta } => {
                let (x, w) = gauss_legendre(n_theta);
                let n_phi = 2 * n_theta;
                let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
                let mut v = Vec::with_capacity(n_theta * n_phi);
                for (ct, wt) in x.iter().zip(&w) {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    for j in 0..n_phi {
                        let p = dphi * (j as f64 + 0.5);
                        v.push((Vector3::new(st * p.cos(), st * p.sin(), *ct), wt * dphi));
                    }
                }
                v
            }
        }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quadrature points of the ball with transverse polarization vectors.
///
/// Mode index `m = 2q + λ` addresses polarization λ ∈ {0, 1} at point q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub lambda: f64,
    pub kpoints: Vec<Point3>,
    pub weights: Vec<f64>,
    pub polarizations: Vec<[Point3; 2]>,
}

/// Polarization chart: `ε₁ = normalize(ẑ × k)`, falling back to `x̂` on the
/// z-axis, and `ε₂ = k̂ × ε₁`.
pub fn polarization_chart(k: &Vector3<f64>) -> [Vector3<f64>; 2] {
    let kh = k.normalize();
    let zc = Vector3::z().cross(&kh);
    let e1 = if zc.norm() > 1e-8 {
        zc.normalize()
    } else {
        Vector3::x()
    };
    let e2 = kh.cross(&e1);
    [e1, e2]
}

fn random_rotation(seed: u64) -> Matrix3<f64> {
    if seed == 0 {
        return Matrix3::identity();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
    UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]))
        .to_rotation_matrix()
        .into_inner()
}

fn to_point(v: &Vector3<f64>) -> Point3 {
    [v[0], v[1], v[2]]
}

/// Product rule: Gauss–Legendre in `|k|` on `[0, Λ]` times an angular rule,
/// rotated by a seeded random rotation (`seed = 0` keeps the rule as is).
pub fn build_modeset(
    lambda: f64,
    n_radial: usize,
    angular: AngularRule,
    seed: u64,
) -> Result<ModeSet> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("Lambda must be > 0, got {lambda}")));
    }
    if n_radial == 0 || matches!(angular, AngularRule::Product { n_theta: 0 }) {
        return Err(Error::domain("quadrature counts must be >= 1"));
    }
    let rot = random_rotation(seed);
    let (xr, wr) = gauss_legendre(n_radial);
    let ang = angular.nodes();
    let mut set = ModeSet::empty(lambda);
    for (x, w) in xr.iter().zip(&wr) {
        let r = 0.5 * lambda * (x + 1.0);
        let radial_weight = 0.5 * lambda * w * r * r;
        for (u, wa) in &ang {
            let k = rot * (u * r);
            let pol = polarization_chart(&k);
            set.kpoints.push(to_point(&k));
            set.weights.push(radial_weight * wa);
            set.polarizations
                .push([to_point(&pol[0]), to_point(&pol[1])]);
        }
    }
    Ok(set)
}

impl ModeSet {
    /// A mode set with no modes.
    pub fn empty(lambda: f64) -> Self {
        ModeSet {
            lambda,
            kpoints: Vec::new(),
            weights: Vec::new(),
            polarizations: Vec::new(),
        }
    }

    pub fn n_points(&self) -> usize {
        self.kpoints.len()
    }

    /// Number of (k, λ) modes.
    pub fn n_modes(&self) -> usize {
        2 * self.kpoints.len()
    }

    pub fn k(&self, q: usize) -> Vector3<f64> {
        Vector3::from(self.kpoints[q])
    }

    pub fn omega(&self, q: usize) -> f64 {
        self.k(q).norm()
    }

    pub fn polarization(&self, m: usize) -> Vector3<f64> {
        Vector3::from(self.polarizations[m / 2][m % 2])
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Index of the point `−k_q`, if present with equal weight.
    pub fn antipode(&self, q: usize) -> Option<usize> {
        let k = self.k(q);
        let tol = 1e-12 * self.lambda;
        (0..self.n_points()).find(|&p| {
            (self.k(p) + k).norm() <= tol
                && (self.weights[p] - self.weights[q]).abs()
                    <= 1e-12 * self.weights[q].abs().max(1e-300)
        })
    }

    /// Largest deviation of `ε_λ·k̂` and `ε_λ·ε_μ − δ_λμ` from zero.
    pub fn polarization_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for q in 0..self.n_points() {
            let kh = self.k(q).normalize();
            let e = [self.polarization(2 * q), self.polarization(2 * q + 1)];
            for a in 0..2 {
                worst = worst.max(e[a].dot(&kh).abs());
                for b in 0..2 {
                    let d = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((e[a].dot(&e[b]) - d).abs());
                }
            }
        }
        worst
    }
}
