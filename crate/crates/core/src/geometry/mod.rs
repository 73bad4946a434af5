//! Nuclear geometry: nearest-neighbor radii, the single-particle potential
//! that bounds the Coulomb energy from below, and the localization functions.

pub mod localization;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use localization::{
    build_localization, gradient_bound_check, GradientReport, LocalizationFamily,
};

pub type Point3 = [f64; 3];

/// Fraction of `D_j` at which `W` switches branch.
pub const BRANCH_FRACTION: f64 = 10.0 / 11.0;

pub(crate) fn dist(a: &Point3, b: &Point3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Nuclei at pairwise distinct positions, all carrying the same charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearConfig {
    positions: Vec<Point3>,
    #[serde(rename = "Z")]
    z: f64,
}

impl NuclearConfig {
    pub fn new(positions: Vec<Point3>, z: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::domain("at least one nucleus is required"));
        }
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::domain(format!("Z must be >= 0, got {z}")));
        }
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::domain("nucleus coordinates must be finite"));
        }
        for i in 0..positions.len() {
            for j in 0..i {
                if dist(&positions[i], &positions[j]) == 0.0 {
                    return Err(Error::domain(format!("nuclei {j} and {i} coincide")));
                }
            }
        }
        Ok(NuclearConfig { positions, z })
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Index of the Voronoi cell containing `x` and the distance to its
    /// nucleus; ties go to the lowest index.
    pub fn nearest(&self, x: &Point3) -> (usize, f64) {
        self.positions
            .iter()
            .enumerate()
            .map(|(j, r)| (j, dist(x, r)))
            .fold(
                (0, f64::INFINITY),
                |best, c| if c.1 < best.1 { c } else { best },
            )
    }
}

/// Electron positions; no constraint beyond finiteness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElectronConfig {
    positions: Vec<Point3>,
}

impl ElectronConfig {
    pub fn new(positions: Vec<Point3>) -> Result<Self> {
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::domain("electron coordinates must be finite"));
        }
        Ok(ElectronConfig { positions })
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }
}

/// `D_j`: half the distance from nucleus j to its nearest neighbor, `+∞` when K = 1.
pub fn voronoi_radii(nuclei: &NuclearConfig) -> Vec<f64> {
    let r = nuclei.positions();
    (0..r.len())
        .map(|j| {
            let nearest = (0..r.len())
                .filter(|&i| i != j)
                .map(|i| dist(&r[i], &r[j]))
                .fold(f64::INFINITY, f64::min);
            0.5 * nearest
        })
        .collect()
}

/// Evaluates `W(x)` using precomputed radii `D_j`.
pub fn w_with_radii(x: &Point3, nuclei: &NuclearConfig, radii: &[f64]) -> f64 {
    let (j, r) = nuclei.nearest(x);
    if r == 0.0 {
        return f64::INFINITY;
    }
    let z = nuclei.z();
    let d = radii[j];
    // With a single nucleus D = ∞ and only the long-range branch exists.
    if d.is_infinite() || r >= BRANCH_FRACTION * d {
        (z.sqrt() + std::f64::consts::FRAC_1_SQRT_2).powi(2) / r
    } else {
        z / r + 121.0 / (42.0 * d)
    }
}

/// Single-particle potential `W(x)` in the Voronoi cell of the nearest nucleus:
/// `(√Z + 1/√2)²/|x−R_j|` for `|x−R_j| ≥ 10D_j/11`, otherwise
/// `Z/|x−R_j| + 121/(42 D_j)`. A point on a nucleus gives `+∞`.
pub fn w_potential(x: &Point3, nuclei: &NuclearConfig) -> f64 {
    w_with_radii(x, nuclei, &voronoi_radii(nuclei))
}

/// Total Coulomb energy of electrons and nuclei.
///
/// Coincidences return the sentinel of the singular term's sign: `−∞` for an
/// electron on a charged nucleus (checked first), `+∞` for coincident electrons.
pub fn vc(electrons: &ElectronConfig, nuclei: &NuclearConfig) -> f64 {
    let z = nuclei.z();
    let x = electrons.positions();
    let r = nuclei.positions();
    let mut attraction = 0.0;
    for xi in x {
        for rk in r {
            let d = dist(xi, rk);
            if z > 0.0 {
                if d == 0.0 {
                    return f64::NEG_INFINITY;
                }
                attraction += z / d;
            }
        }
    }
    let mut repulsion = 0.0;
    for i in 0..x.len() {
        for j in 0..i {
            let d = dist(&x[i], &x[j]);
            if d == 0.0 {
                return f64::INFINITY;
            }
            repulsion += 1.0 / d;
        }
    }
    let mut nuclear = 0.0;
    for k in 0..r.len() {
        for l in 0..k {
            nuclear += 1.0 / dist(&r[k], &r[l]);
        }
    }
    -attraction + repulsion + z * z * nuclear
}

/// Margin of the single-particle lower bound on the Coulomb energy,
/// `V_c − [−Σ_i W(x_i) + (Z²/8) Σ_j 1/D_j]`.
///
/// Any coincidence makes the margin `+∞` (both `W` and the electron repulsion
/// diverge upward faster than the attraction); such configurations are
/// reported rather than treated as errors.
pub fn coulomb_lower_bound_margin(electrons: &ElectronConfig, nuclei: &NuclearConfig) -> f64 {
    let radii = voronoi_radii(nuclei);
    let v = vc(electrons, nuclei);
    let w_sum: f64 = electrons
        .positions()
        .iter()
        .map(|x| w_with_radii(x, nuclei, &radii))
        .sum();
    if !v.is_finite() || !w_sum.is_finite() {
        return f64::INFINITY;
    }
    let z = nuclei.z();
    let constant = z * z / 8.0 * radii.iter().map(|d| 1.0 / d).sum::<f64>();
    v + w_sum - constant
}

/// Both forms of the localized Coulomb bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizedCoulombBound {
    /// `−(N/2L)·max{(√(2Z)+1)², 2Z + 110/21}`
    pub sharp: f64,
    /// `−(N/2L)(√(2Z)+2.3)²`
    pub weak: f64,
}

pub fn localized_coulomb_bound(n: u64, l: f64, z: f64) -> Result<LocalizedCoulombBound> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::domain(format!("L must be > 0, got {l}")));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::domain(format!("Z must be >= 0, got {z}")));
    }
    let s = (2.0 * z).sqrt();
    let pre = n as f64 / (2.0 * l);
    let b = LocalizedCoulombBound {
        sharp: -pre * (s + 1.0).powi(2).max(2.0 * z + 110.0 / 21.0),
        weak: -pre * (s + crate::certificate::COULOMB_SHIFT).powi(2),
    };
    debug_assert!(b.sharp >= b.weak);
    Ok(b)
}
