//! Half-moment sums of negative eigenvalues of `c₁(−Δ) − V` on a Dirichlet box,
//! compared with `ℓ c₁^{−3/2} ∫V²`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::certificate::LIEB_THIRRING_CONSTANT;
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::spectral::random::trial_rng;

/// Block width of the Lanczos iteration; also the largest multiplicity resolved reliably.
pub const LANCZOS_BLOCK: usize = 8;
/// Largest Krylov dimension before giving up on convergence.
pub const LANCZOS_MAX_DIM: usize = 1600;
/// Grids up to this many points use a dense eigensolver.
pub const DENSE_LIMIT: usize = 729;

/// `n³` interior points of the box `[−L/2, L/2]³` with zero boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletGrid {
    pub n: usize,
    pub box_len: f64,
}

impl DirichletGrid {
    pub fn new(n: usize, box_len: f64) -> Result<Self> {
        if n < 2 || !(box_len.is_finite() && box_len > 0.0) {
            return Err(Error::domain(
                "Dirichlet grid needs n >= 2 and a positive box length",
            ));
        }
        Ok(DirichletGrid { n, box_len })
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / (self.n + 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn point(&self, idx: usize) -> Point3 {
        let n = self.n;
        let h = self.spacing();
        let c = |i: usize| -0.5 * self.box_len + (i + 1) as f64 * h;
        [c(idx / (n * n)), c((idx / n) % n), c(idx % n)]
    }

    pub fn sample(&self, f: impl Fn(&Point3) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.point(i))).collect()
    }

    /// `y = c₁(−Δ_h)x − Vx` with the 7-point stencil.
    fn apply(&self, c1: f64, v: &[f64], x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let s = c1 / self.spacing().powi(2);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let idx = (i * n + j) * n + k;
                    let mut acc = 6.0 * x[idx];
                    if i > 0 {
                        acc -= x[idx - n * n];
                    }
                    if i + 1 < n {
                        acc -= x[idx + n * n];
                    }
                    if j > 0 {
                        acc -= x[idx - n];
                    }
                    if j + 1 < n {
                        acc -= x[idx + n];
                    }
                    if k > 0 {
                        acc -= x[idx - 1];
                    }
                    if k + 1 < n {
                        acc -= x[idx + 1];
                    }
                    y[idx] = s * acc - v[idx] * x[idx];
                }
            }
        }
    }

    fn dense(&self, c1: f64, v: &[f64]) -> DMatrix<f64> {
        let d = self.len();
        let mut m = DMatrix::zeros(d, d);
        let mut e = vec![0.0; d];
        let mut y = vec![0.0; d];
        for c in 0..d {
            e[c] = 1.0;
            self.apply(c1, v, &e, &mut y);
            m.set_column(c, &DVector::from_column_slice(&y));
            e[c] = 0.0;
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeSpectrum {
    /// Ascending negative eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub converged: bool,
    pub krylov_dim: usize,
}

/// Negative eigenvalues by block Lanczos with full reorthogonalization.
///
/// Converged when every Ritz pair below a small positive threshold has
/// residual `≤ tol·‖H‖`.
pub fn negative_eigenvalues(
    grid: &DirichletGrid,
    c1: f64,
    v: &[f64],
    seed: u64,
) -> NegativeSpectrum {
    let d = grid.len();
    if d <= DENSE_LIMIT {
        let mut e: Vec<f64> = grid
            .dense(c1, v)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .filter(|&e| e < 0.0)
            .collect();
        e.sort_by(f64::total_cmp);
        return NegativeSpectrum {
            eigenvalues: e,
            converged: true,
            krylov_dim: d,
        };
    }
    let vmax = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let hnorm = 12.0 * c1 / grid.spacing().powi(2) + vmax;
    let tol = 1e-10 * hnorm;
    let mut rng = trial_rng(seed, 0);
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut hq: Vec<Vec<f64>> = Vec::new();
    let mut t = DMatrix::<f64>::zeros(0, 0);
    let max_dim = LANCZOS_MAX_DIM.min(d);

    let mut block: Vec<Vec<f64>> = (0..LANCZOS_BLOCK)
        .map(|_| {
            (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let mut last = NegativeSpectrum {
        eigenvalues: Vec::new(),
        converged: false,
        krylov_dim: 0,
    };
    let mut blocks_since_check = 0;
    while q.len() < max_dim {
        // Orthonormalize the candidate block against the basis (two passes).
        for mut w in block.drain(..) {
            if q.len() >= max_dim {
                break;
            }
            let before = dot(&w, &w).sqrt();
            for _ in 0..2 {
                for b in &q {
                    let c = dot(b, &w);
                    axpy(&mut w, -c, b);
                }
            }
            let mut nw = dot(&w, &w).sqrt();
            if nw <= 1e-10 * before.max(1e-300) {
                // Deflated direction: restart it randomly.
                w = (0..d)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect();
                for _ in 0..2 {
                    for b in &q {
                        let c = dot(b, &w);
                        axpy(&mut w, -c, b);
                    }
                }
                nw = dot(&w, &w).sqrt();
            }
            w.iter_mut().for_each(|x| *x /= nw);
            let mut hw = vec![0.0; d];
            grid.apply(c1, v, &w, &mut hw);
            q.push(w);
            hq.push(hw);
        }
        let k0 = t.nrows();
        let k = q.len();
        let mut grown = DMatrix::<f64>::zeros(k, k);
        grown.view_mut((0, 0), (k0, k0)).copy_from(&t);
        for c in k0..k {
            for r in 0..k {
                let x = dot(&q[r], &hq[c]);
                grown[(r, c)] = x;
                grown[(c, r)] = x;
            }
        }
        t = grown;
        block = hq[k0..k].to_vec();

        blocks_since_check += 1;
        let due = blocks_since_check >= 12 || q.len() >= max_dim;
        if !due {
            continue;
        }
        blocks_since_check = 0;
        let eig = t.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lowest = eig.eigenvalues[order[0]];
        let threshold = 0.05 * lowest.abs().max(c1 / grid.box_len.powi(2));
        let mut converged = true;
        let mut neg = Vec::new();
        for &i in &order {
            let theta = eig.eigenvalues[i];
            if theta > threshold {
                break;
            }
            let s = eig.eigenvectors.column(i);
            let mut r = vec![0.0; d];
            for (j, &sj) in s.iter().enumerate() {
                axpy(&mut r, sj, &hq[j]);
                axpy(&mut r, -theta * sj, &q[j]);
            }
            if dot(&r, &r).sqrt() > tol {
                converged = false;
                break;
            }
            if theta < 0.0 {
                neg.push(theta);
            }
        }
        last = NegativeSpectrum {
            eigenvalues: neg,
            converged,
            krylov_dim: k,
        };
        if converged {
            break;
        }
    }
    last
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiebThirringReport {
    pub eigenvalues: Vec<f64>,
    /// `Σ √|e_i|`
    pub half_moment: f64,
    /// `∫V²` by grid quadrature.
    pub v_squared: f64,
    /// `Σ√|e_i| / (ℓ c₁^{−3/2} ∫V²)`; zero when `V = 0`.
    pub ratio: f64,
    pub converged: bool,
}

/// Compares the half-moment sum with `ℓ c₁^{−3/2} ∫V²`, `ℓ = 0.060`.
pub fn lieb_thirring_ratio(grid: &DirichletGrid, v: &[f64], c1: f64) -> Result<LiebThirringReport> {
    if v.len() != grid.len() {
        return Err(Error::domain("potential samples do not match the grid"));
    }
    if v.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::domain("potential must be finite and nonnegative"));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::domain("kinetic coefficient must be positive"));
    }
    let v_squared = v.iter().map(|x| x * x).sum::<f64>() * grid.spacing().powi(3);
    if v_squared == 0.0 {
        return Ok(LiebThirringReport {
            eigenvalues: Vec::new(),
            half_moment: 0.0,
            v_squared,
            ratio: 0.0,
            converged: true,
        });
    }
    let spec = negative_eigenvalues(grid, c1, v, 0);
    let half_moment = spec
        .eigenvalues
        .iter()
        .fold(0.0, |acc, e| acc + (-e).sqrt());
    Ok(LiebThirringReport {
        ratio: half_moment / (LIEB_THIRRING_CONSTANT * c1.powf(-1.5) * v_squared),
        eigenvalues: spec.eigenvalues,
        half_moment,
        v_squared,
        converged: spec.converged,
    })
}

/// A sum of Gaussian wells `Σ d·exp(−|x − c|²/s²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianWell {
    pub label: String,
    pub wells: Vec<(Point3, f64, f64)>,
}

impl GaussianWell {
    pub fn eval(&self, x: &Point3) -> f64 {
        self.wells
            .iter()
            .map(|(c, d, s)| {
                let r2: f64 = (0..3).map(|i| (x[i] - c[i]).powi(2)).sum();
                d * (-r2 / (s * s)).exp()
            })
            .sum()
    }
}

/// The smooth wells used by the diagnostic, on a 16³ grid of box length 8.
pub fn curated_wells() -> Vec<GaussianWell> {
    let single = |label: &str, d: f64, s: f64| GaussianWell {
        label: label.into(),
        wells: vec![([0.0; 3], d, s)],
    };
    vec![
        single("shallow", 4.0, 1.0),
        single("shallow_x4", 16.0, 1.0),
        single("deep", 20.0, 1.0),
        single("wide", 3.0, 1.6),
        GaussianWell {
            label: "off_center".into(),
            wells: vec![([0.7, -0.4, 0.3], 6.0, 1.1)],
        },
        GaussianWell {
            label: "double".into(),
            wells: vec![([-1.2, 0.0, 0.0], 6.0, 0.9), ([1.2, 0.0, 0.0], 6.0, 0.9)],
        },
    ]
}

pub const CURATED_GRID: DirichletGrid = DirichletGrid {
    n: 16,
    box_len: 8.0,
};
