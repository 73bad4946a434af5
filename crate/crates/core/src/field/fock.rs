//! Bosonic Fock space over a finite mode set, truncated at total photon
//! number `n_max`.
//!
//! Basis states are occupation multisets stored as sorted mode lists; a state
//! with `n` photons lives in sector `n`. Basis order is by sector, then
//! lexicographic.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::modes::ModeSet;

/// Default cap on the number of basis states.
pub const DEFAULT_DIM_CAP: usize = 250_000;

/// A sparse vector: (basis index, amplitude) pairs, not necessarily merged.
pub type Sparse = Vec<(usize, Complex64)>;

#[derive(Debug, Clone)]
pub struct TruncatedFock {
    pub modes: ModeSet,
    pub n_max: usize,
    basis: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
    /// `sector_start[n]` is the index of the first state with n photons;
    /// `sector_start[n_max + 1] = dim`.
    sector_start: Vec<usize>,
}

/// `C(n, k)` in u128 with saturation.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Number of multisets of size ≤ `n_max` drawn from `modes` kinds: `C(modes + n_max, n_max)`.
pub fn fock_dimension(modes: usize, n_max: usize) -> u128 {
    binomial((modes + n_max) as u64, n_max as u64)
}

impl TruncatedFock {
    pub fn new(modes: ModeSet, n_max: usize) -> Result<Self> {
        Self::with_cap(modes, n_max, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(modes: ModeSet, n_max: usize, dim_cap: usize) -> Result<Self> {
        let m = modes.n_modes();
        if m > u16::MAX as usize {
            return Err(Error::resource(format!("{m} modes exceed the index width")));
        }
        let dim = fock_dimension(m, n_max);
        if dim > dim_cap as u128 {
            return Err(Error::resource(format!(
                "Fock dimension {dim} ({m} modes, n_max = {n_max}) exceeds cap {dim_cap}"
            )));
        }
        let mut basis: Vec<Vec<u16>> = vec![Vec::new()];
        let mut sector_start = vec![0, 1];
        let mut prev: Vec<Vec<u16>> = vec![Vec::new()];
        for _ in 1..=n_max {
            let mut next = Vec::new();
            for s in &prev {
                let lo = s.last().copied().unwrap_or(0);
                for mode in lo..m as u16 {
                    let mut t = s.clone();
                    t.push(mode);
                    next.push(t);
                }
            }
            basis.extend(next.iter().cloned());
            sector_start.push(basis.len());
            prev = next;
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(TruncatedFock {
            modes,
            n_max,
            basis,
            index,
            sector_start,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_modes(&self) -> usize {
        self.modes.n_modes()
    }

    pub fn state(&self, i: usize) -> &[u16] {
        &self.basis[i]
    }

    pub fn index_of(&self, occupation: &[u16]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn photon_number(&self, i: usize) -> usize {
        self.basis[i].len()
    }

    /// Basis indices of all states with at most `n` photons (a prefix of the basis).
    pub fn sectors_up_to(&self, n: usize) -> std::ops::Range<usize> {
        0..self.sector_start[n.min(self.n_max) + 1]
    }

    pub fn sector(&self, n: usize) -> std::ops::Range<usize> {
        self.sector_start[n]..self.sector_start[n + 1]
    }

    fn occupation(state: &[u16], mode: u16) -> usize {
        state.iter().filter(|&&x| x == mode).count()
    }

    /// `a_m |i⟩`, or `None` when mode m is empty.
    pub fn annihilate(&self, i: usize, mode: usize) -> Option<(usize, f64)> {
        let s = &self.basis[i];
        let mode = mode as u16;
        let pos = s.iter().position(|&x| x == mode)?;
        let c = Self::occupation(s, mode);
        let mut t = s.clone();
        t.remove(pos);
        Some((self.index[&t], (c as f64).sqrt()))
    }

    /// `a*_m |i⟩`, or `None` when the result would exceed `n_max`.
    pub fn create(&self, i: usize, mode: usize) -> Option<(usize, f64)> {
        let s = &self.basis[i];
        if s.len() >= self.n_max {
            return None;
        }
        let mode = mode as u16;
        let c = Self::occupation(s, mode);
        let pos = s.partition_point(|&x| x <= mode);
        let mut t = s.clone();
        t.insert(pos, mode);
        Some((self.index[&t], ((c + 1) as f64).sqrt()))
    }

    /// `H_f|i⟩ = Σ_m |k_m| n_m |i⟩` (diagonal).
    pub fn hf_diagonal(&self, i: usize) -> f64 {
        self.basis[i]
            .iter()
            .map(|&m| self.modes.omega(m as usize / 2))
            .sum()
    }
}
