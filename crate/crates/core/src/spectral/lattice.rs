//! Periodic lattice with spectral momentum, on which the Dirac square
//! identity `D(A)² = T^P(A) + m²` is exact for band-limited data.
//!
//! Here `D(A) = α·(p + √α A) + mβ` acts on 4-spinors and
//! `T^P(A) = (p + √α A)² + √α σ·B` on each 2-spinor half.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::random::trial_rng;

/// Default relative tolerance of the identity.
pub const DIRAC_TOL: f64 = 1e-10;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// One plane-wave term `amp·e^{i(2π/L)k·x}`; the conjugate term is added so `A` is real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: [i32; 3],
    pub amp: [Complex64; 3],
}

/// Scalar fields on `n³` points of the periodic box `[0, L)³`.
struct Grid {
    n: usize,
    box_len: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Grid {
    fn new(n: usize, box_len: f64) -> Self {
        let mut planner = FftPlanner::new();
        Grid {
            n,
            box_len,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    fn freq(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut line = vec![ZERO; n];
        for axis in 0..3 {
            let stride = n.pow(2 - axis as u32);
            for base in 0..self.len() {
                if !(base / stride).is_multiple_of(n) {
                    continue;
                }
                for t in 0..n {
                    line[t] = data[base + t * stride];
                }
                plan.process(&mut line);
                for t in 0..n {
                    data[base + t * stride] = line[t];
                }
            }
        }
        if inverse {
            let s = 1.0 / self.len() as f64;
            data.iter_mut().for_each(|z| *z *= s);
        }
    }

    /// `−i ∂_axis` computed spectrally; the Nyquist coefficient is dropped.
    fn momentum(&self, f: &[Complex64], axis: usize) -> Vec<Complex64> {
        let n = self.n;
        let mut g = f.to_vec();
        self.transform(&mut g, false);
        let dk = 2.0 * PI / self.box_len;
        for (idx, z) in g.iter_mut().enumerate() {
            let i = (idx / n.pow(2 - axis as u32)) % n;
            let fr = if 2 * i == n { 0 } else { self.freq(i) };
            *z *= dk * fr as f64;
        }
        self.transform(&mut g, true);
        g
    }

    fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.box_len / n as f64;
        [
            (idx / (n * n)) as f64 * h,
            ((idx / n) % n) as f64 * h,
            (idx % n) as f64 * h,
        ]
    }
}

/// Band-limited vector potential on a periodic box with its exact curl.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGauge {
    pub box_len: f64,
    pub n: usize,
    pub modes: Vec<FourierMode>,
    /// Largest `|k_i|` among the modes.
    pub band: usize,
    pub a: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

impl LatticeGauge {
    /// Requires even `n ≥ 8` and band `< n/4`.
    pub fn new(box_len: f64, n: usize, modes: Vec<FourierMode>) -> Result<Self> {
        let g = Self::unchecked(box_len, n, modes)?;
        if 4 * g.band >= n {
            return Err(Error::domain(format!(
                "band {} of A is not below a quarter of the grid ({n} points)",
                g.band
            )));
        }
        Ok(g)
    }

    /// Skips the band-limit check; used to demonstrate aliasing.
    pub fn unchecked(box_len: f64, n: usize, modes: Vec<FourierMode>) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "grid points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(box_len.is_finite() && box_len > 0.0) {
            return Err(Error::domain("box length must be positive"));
        }
        let band = modes
            .iter()
            .filter(|m| m.amp.iter().any(|a| a.norm() > 0.0))
            .flat_map(|m| m.k.iter().map(|c| c.unsigned_abs() as usize))
            .max()
            .unwrap_or(0);
        let grid = Grid::new(n, box_len);
        let dk = 2.0 * PI / box_len;
        let mut a: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; grid.len()]);
        let mut b: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; grid.len()]);
        for idx in 0..grid.len() {
            let x = grid.point(idx);
            for m in &modes {
                let kv = [m.k[0] as f64 * dk, m.k[1] as f64 * dk, m.k[2] as f64 * dk];
                let ph = Complex64::from_polar(1.0, kv[0] * x[0] + kv[1] * x[1] + kv[2] * x[2]);
                for i in 0..3 {
                    a[i][idx] += 2.0 * (m.amp[i] * ph).re;
                    // curl of amp·e^{ik·x} is i k × amp·e^{ik·x}.
                    let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                    let c = I * (kv[j] * m.amp[l] - kv[l] * m.amp[j]);
                    b[i][idx] += 2.0 * (c * ph).re;
                }
            }
        }
        Ok(LatticeGauge {
            box_len,
            n,
            modes,
            band,
            a,
            b,
        })
    }

    pub fn zero(box_len: f64, n: usize) -> Result<Self> {
        Self::new(box_len, n, Vec::new())
    }

    /// Largest probe band for which every product in the identity stays resolved.
    pub fn probe_band(&self) -> usize {
        (self.n / 2).saturating_sub(1 + 2 * self.band)
    }
}

type Spinor = [Vec<Complex64>; 4];

struct DiracAction<'a> {
    grid: Grid,
    gauge: &'a LatticeGauge,
    sqrt_alpha: f64,
    m: f64,
}

impl DiracAction<'_> {
    /// `π_i f = p_i f + √α A_i f`.
    fn pi(&self, f: &[Complex64], i: usize) -> Vec<Complex64> {
        let mut g = self.grid.momentum(f, i);
        for (z, (fv, av)) in g.iter_mut().zip(f.iter().zip(&self.gauge.a[i])) {
            *z += fv * (self.sqrt_alpha * av);
        }
        g
    }

    /// `σ_i` acting on components `(u0, u1)`.
    fn sigma(i: usize, u0: &[Complex64], u1: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        match i {
            0 => (u1.to_vec(), u0.to_vec()),
            1 => (
                u1.iter().map(|z| -I * z).collect(),
                u0.iter().map(|z| I * z).collect(),
            ),
            _ => (u0.to_vec(), u1.iter().map(|z| -z).collect()),
        }
    }

    fn dirac(&self, psi: &Spinor) -> Spinor {
        let len = self.grid.len();
        let mut out: Spinor = std::array::from_fn(|_| vec![ZERO; len]);
        for i in 0..3 {
            let p: Vec<Vec<Complex64>> = psi.iter().map(|c| self.pi(c, i)).collect();
            // α_i = [[0, σ_i], [σ_i, 0]].
            let (up0, up1) = Self::sigma(i, &p[2], &p[3]);
            let (lo0, lo1) = Self::sigma(i, &p[0], &p[1]);
            for (dst, src) in out.iter_mut().zip([up0, up1, lo0, lo1]) {
                dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
            }
        }
        for c in 0..4 {
            let sign = if c < 2 { 1.0 } else { -1.0 };
            out[c]
                .iter_mut()
                .zip(&psi[c])
                .for_each(|(d, s)| *d += s * (sign * self.m));
        }
        out
    }

    /// `T^P + m²` on each 2-spinor half.
    fn pauli_plus_mass(&self, psi: &Spinor) -> Spinor {
        let len = self.grid.len();
        let mut out: Spinor = std::array::from_fn(|_| vec![ZERO; len]);
        for c in 0..4 {
            for i in 0..3 {
                let t = self.pi(&self.pi(&psi[c], i), i);
                out[c].iter_mut().zip(t).for_each(|(d, s)| *d += s);
            }
            out[c]
                .iter_mut()
                .zip(&psi[c])
                .for_each(|(d, s)| *d += s * (self.m * self.m));
        }
        for half in [0, 2] {
            for i in 0..3 {
                let (s0, s1) = Self::sigma(i, &psi[half], &psi[half + 1]);
                let bi = &self.gauge.b[i];
                for (k, bv) in bi.iter().enumerate() {
                    out[half][k] += s0[k] * (self.sqrt_alpha * bv);
                    out[half + 1][k] += s1[k] * (self.sqrt_alpha * bv);
                }
            }
        }
        out
    }
}

fn random_spinor(grid: &Grid, band: usize, rng: &mut impl Rng) -> Spinor {
    let n = grid.n;
    std::array::from_fn(|_| {
        let mut f = vec![ZERO; grid.len()];
        for (idx, z) in f.iter_mut().enumerate() {
            let ks = [
                grid.freq(idx / (n * n)),
                grid.freq((idx / n) % n),
                grid.freq(idx % n),
            ];
            if ks.iter().all(|k| k.unsigned_abs() as usize <= band) {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *z = Complex64::new(re, im);
            }
        }
        grid.transform(&mut f, true);
        f
    })
}

fn norm(s: &Spinor) -> f64 {
    s.iter()
        .flat_map(|c| c.iter())
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `max_probe ‖D(A)²ψ − (T^P(A) + m²)ψ‖ / ‖(T^P(A) + m²)ψ‖` over random
/// probes of the given band. No band checks; see [`dirac_square_identity`].
pub fn dirac_square_residual(
    gauge: &LatticeGauge,
    alpha: f64,
    m: f64,
    probe_band: usize,
    probes: usize,
    seed: u64,
) -> f64 {
    let op = DiracAction {
        grid: Grid::new(gauge.n, gauge.box_len),
        gauge,
        sqrt_alpha: alpha.sqrt(),
        m,
    };
    (0..probes)
        .map(|t| {
            let psi = random_spinor(&op.grid, probe_band, &mut trial_rng(seed, t as u64));
            let lhs = op.dirac(&op.dirac(&psi));
            let rhs = op.pauli_plus_mass(&psi);
            let diff: Spinor =
                std::array::from_fn(|c| lhs[c].iter().zip(&rhs[c]).map(|(a, b)| a - b).collect());
            norm(&diff) / norm(&rhs).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Relative residual of `D(A)² = T^P(A) + m²` on three random probes at the largest exact band.
pub fn dirac_square_identity(gauge: &LatticeGauge, alpha: f64, m: f64, seed: u64) -> Result<f64> {
    if 4 * gauge.band >= gauge.n {
        return Err(Error::domain("vector potential violates the band limit"));
    }
    if !(alpha >= 0.0 && alpha.is_finite() && m.is_finite()) {
        return Err(Error::domain("alpha must be finite and >= 0, m finite"));
    }
    Ok(dirac_square_residual(
        gauge,
        alpha,
        m,
        gauge.probe_band(),
        3,
        seed,
    ))
}

/// A real vector potential with `count` random modes of band ≤ `band`.
pub fn random_gauge(band: usize, count: usize, rng: &mut impl Rng) -> Vec<FourierMode> {
    let b = band as i32;
    (0..count)
        .map(|_| {
            let k = [
                rng.random_range(-b..=b),
                rng.random_range(-b..=b),
                rng.random_range(-b..=b),
            ];
            let amp = std::array::from_fn(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * 0.5
            });
            FourierMode { k, amp }
        })
        .collect()
}
