//! Seeded random matrix ensembles for the randomized suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::spectral::hermitian::CMatrix;

/// Generator for trial `trial` of a suite run with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = gaussian(rng, n, n);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Positive semidefinite ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdEnsemble {
    /// `G G*` with `G` square Gaussian.
    Wishart,
    /// Nonnegative diagonal in a random unitary basis.
    Diagonal,
    /// `G G*` with `G` of width < n.
    RankDeficient,
}

impl PsdEnsemble {
    pub const ALL: [PsdEnsemble; 3] = [
        PsdEnsemble::Wishart,
        PsdEnsemble::Diagonal,
        PsdEnsemble::RankDeficient,
    ];
}

pub fn unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    gaussian(rng, n, n).qr().q()
}

pub fn psd(rng: &mut impl Rng, n: usize, ensemble: PsdEnsemble) -> CMatrix {
    match ensemble {
        PsdEnsemble::Wishart => {
            let g = gaussian(rng, n, n);
            &g * g.adjoint()
        }
        PsdEnsemble::Diagonal => {
            let u = unitary(rng, n);
            let d = nalgebra::DVector::from_fn(n, |_, _| {
                let x: f64 = rng.random::<f64>() * 3.0;
                Complex64::new(x, 0.0)
            });
            &u * CMatrix::from_diagonal(&d) * u.adjoint()
        }
        PsdEnsemble::RankDeficient => {
            let r = rng.random_range(1..n.max(2));
            let g = gaussian(rng, n, r);
            &g * g.adjoint()
        }
    }
}

/// A random matrix scaled to operator norm `s ∈ (0, 1]`; with `rank < n` it is rank-deficient.
pub fn contraction(rng: &mut impl Rng, n: usize, rank: usize) -> CMatrix {
    let g = &gaussian(rng, n, rank) * gaussian(rng, rank, n);
    let norm = g.clone().singular_values().max();
    let s: f64 = rng.random_range(0.05..=1.0);
    if norm == 0.0 {
        return g;
    }
    g * Complex64::new(s / norm, 0.0)
}
