//! Grid realization of the partition `F² + G² = 1` that localizes the kinetic
//! energy near the nuclei.
//!
//! `φ₁ = g_L ∗ χ_S` with `g` the normalized indicator of the unit ball and `S`
//! the union of radius-`2L` balls; `φ₂ = 1 − φ₁`; `(F, G) = (φ₁, φ₂)/√(φ₁²+φ₂²)`.
//! The convolution is an exact lattice sum over the kernel support, evaluated
//! column by column from prefix sums of the indicator of `S`.

use serde::{Deserialize, Serialize};

use super::{dist, NuclearConfig, Point3};
use crate::error::{Error, Result};

/// Largest admissible `h / L`.
pub const MAX_SPACING_RATIO: f64 = 1.0 / 8.0;
/// Grid size cap (points).
pub const MAX_GRID_POINTS: usize = 1 << 23;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationFamily {
    pub l: f64,
    pub h: f64,
    pub origin: Point3,
    pub dims: [usize; 3],
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// Distance from each grid point to the nearest nucleus.
    pub nucleus_distance: Vec<f64>,
}

impl LocalizationFamily {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Point3 {
        [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + j as f64 * self.h,
            self.origin[2] + k as f64 * self.h,
        ]
    }

    /// Flat index of the grid point nearest to `x`, if `x` lies in the box.
    pub fn nearest_index(&self, x: &Point3) -> Option<usize> {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let t = ((x[a] - self.origin[a]) / self.h).round();
            if t < 0.0 || t >= self.dims[a] as f64 {
                return None;
            }
            ijk[a] = t as usize;
        }
        Some(self.index(ijk[0], ijk[1], ijk[2]))
    }
}

/// Builds φ₁, φ₂, F, G on a cubic grid of spacing `h` covering every
/// radius-`3L` ball with a two-cell margin.
pub fn build_localization(nuclei: &NuclearConfig, l: f64, h: f64) -> Result<LocalizationFamily> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::domain(format!("L must be > 0, got {l}")));
    }
    if !(h.is_finite() && h > 0.0) || h > l * MAX_SPACING_RATIO * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "grid spacing {h} exceeds L/8 = {}",
            l / 8.0
        )));
    }
    let r = nuclei.positions();
    let reach = 3.0 * l + 2.0 * h;
    let mut origin = [0.0; 3];
    let mut dims = [0usize; 3];
    for a in 0..3 {
        let lo = r.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min) - reach;
        let hi = r.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max) + reach;
        origin[a] = lo;
        dims[a] = ((hi - lo) / h).ceil() as usize + 1;
    }
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match total {
        Some(t) if t <= MAX_GRID_POINTS => {}
        _ => {
            return Err(Error::resource(format!(
                "localization grid {dims:?} exceeds {MAX_GRID_POINTS} points"
            )))
        }
    }

    // The radius-L lattice kernel, stored per (di, dj) column as the
    // half-width w of the contiguous run |dk| <= w inside the ball.
    let m = (l / h).floor() as i64;
    let mut columns = Vec::new();
    let mut count = 0usize;
    for di in -m..=m {
        for dj in -m..=m {
            let w = (0..=m)
                .take_while(|&dk| {
                    dist(&[di as f64 * h, dj as f64 * h, dk as f64 * h], &[0.0; 3]) <= l
                })
                .last();
            if let Some(w) = w {
                columns.push((di, dj, w));
                count += 2 * w as usize + 1;
            }
        }
    }
    let inv_count = 1.0 / count as f64;

    // χ_S on the grid padded by m cells, with prefix sums along the last axis.
    let mu = m as usize;
    let pd = [dims[0] + 2 * mu, dims[1] + 2 * mu, dims[2] + 2 * mu];
    let stride = pd[2] + 1;
    let mut prefix = vec![0u32; pd[0] * pd[1] * stride];
    for i in 0..pd[0] {
        for j in 0..pd[1] {
            let row = (i * pd[1] + j) * stride;
            for k in 0..pd[2] {
                let x = [
                    origin[0] + (i as f64 - m as f64) * h,
                    origin[1] + (j as f64 - m as f64) * h,
                    origin[2] + (k as f64 - m as f64) * h,
                ];
                let inside = r.iter().any(|p| dist(&x, p) <= 2.0 * l);
                prefix[row + k + 1] = prefix[row + k] + inside as u32;
            }
        }
    }

    let mut fam = LocalizationFamily {
        l,
        h,
        origin,
        dims,
        phi1: Vec::new(),
        phi2: Vec::new(),
        f: Vec::new(),
        g: Vec::new(),
        nucleus_distance: Vec::new(),
    };
    let n = dims[0] * dims[1] * dims[2];
    let mut phi1 = vec![0.0; n];
    let mut nd = vec![0.0; n];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let x = fam.point(i, j, k);
                let d = nuclei.nearest(&x).1;
                let idx = fam.index(i, j, k);
                nd[idx] = d;
                // Every kernel point lies in S when d < L and none does when d > 3L.
                phi1[idx] = if d < l {
                    1.0
                } else if d > 3.0 * l {
                    0.0
                } else {
                    let (pi, pj, pk) = ((i + mu) as i64, (j + mu) as i64, (k + mu) as i64);
                    let hits: u32 = columns
                        .iter()
                        .map(|&(di, dj, w)| {
                            let row = (((pi + di) as usize) * pd[1] + (pj + dj) as usize) * stride;
                            prefix[row + (pk + w) as usize + 1] - prefix[row + (pk - w) as usize]
                        })
                        .sum();
                    hits as f64 * inv_count
                };
            }
        }
    }
    let phi2: Vec<f64> = phi1.iter().map(|p| 1.0 - p).collect();
    let norm: Vec<f64> = phi1.iter().zip(&phi2).map(|(a, b)| a.hypot(*b)).collect();
    fam.f = phi1.iter().zip(&norm).map(|(a, n)| a / n).collect();
    fam.g = phi2.iter().zip(&norm).map(|(b, n)| b / n).collect();
    fam.phi1 = phi1;
    fam.phi2 = phi2;
    fam.nucleus_distance = nd;
    Ok(fam)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    /// Largest central-difference value of `|∇F|² + |∇G|²` over interior points.
    pub sup: f64,
    /// Continuum bound `36/L²`.
    pub bound: f64,
    /// `36/L²·(1 + h/L)`, allowing for the lattice kernel.
    pub bound_with_slack: f64,
    pub pass: bool,
}

pub fn gradient_bound_check(family: &LocalizationFamily) -> GradientReport {
    let [nx, ny, nz] = family.dims;
    let inv = 1.0 / (2.0 * family.h);
    let mut sup: f64 = 0.0;
    for i in 1..nx.saturating_sub(1) {
        for j in 1..ny.saturating_sub(1) {
            for k in 1..nz.saturating_sub(1) {
                let c = family.index(i, j, k);
                let neighbors = [
                    (family.index(i + 1, j, k), family.index(i - 1, j, k)),
                    (family.index(i, j + 1, k), family.index(i, j - 1, k)),
                    (family.index(i, j, k + 1), family.index(i, j, k - 1)),
                ];
                // Skip points whose stencil is constant in both F and G.
                if neighbors
                    .iter()
                    .all(|&(p, m)| family.f[p] == family.f[c] && family.f[m] == family.f[c])
                {
                    continue;
                }
                let s: f64 = neighbors
                    .iter()
                    .map(|&(p, m)| {
                        let df = (family.f[p] - family.f[m]) * inv;
                        let dg = (family.g[p] - family.g[m]) * inv;
                        df * df + dg * dg
                    })
                    .sum();
                sup = sup.max(s);
            }
        }
    }
    let bound = 36.0 / (family.l * family.l);
    let bound_with_slack = bound * (1.0 + family.h / family.l);
    GradientReport {
        sup,
        bound,
        bound_with_slack,
        pass: sup <= bound_with_slack,
    }
}
