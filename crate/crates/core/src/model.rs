//! Shared physical parameters, the energy-bound report, and the charge
//! reduction used before any bound is evaluated.
//!
//! Units: ħ = c = 1. Energies carry the units of `m` and `Lambda`; `alpha`,
//! `Z`, `kappa`, `epsilon`, `C2` and `C3` are dimensionless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The tuple (α, Z, m, Λ, N, K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Fine-structure constant.
    pub alpha: f64,
    /// Common nuclear charge.
    #[serde(rename = "Z")]
    pub z: f64,
    /// Electron mass.
    pub m: f64,
    /// Ultraviolet cutoff on photon wave numbers.
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// Electron count.
    #[serde(rename = "N")]
    pub n: u64,
    /// Nucleus count.
    #[serde(rename = "K")]
    pub k: u64,
}

impl PhysicalParams {
    pub fn new(alpha: f64, z: f64, m: f64, lambda: f64, n: u64, k: u64) -> Result<Self> {
        let p = PhysicalParams {
            alpha,
            z,
            m,
            lambda,
            n,
            k,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the parameter invariants. `m = 0` is accepted: the bound is
    /// still meaningful with a vanishing mass term.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::domain(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.z.is_finite() && self.z >= 0.0) {
            return Err(Error::domain(format!("Z must be >= 0, got {}", self.z)));
        }
        if !(self.m.is_finite() && self.m >= 0.0) {
            return Err(Error::domain(format!("m must be >= 0, got {}", self.m)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::domain(format!(
                "Lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if self.n == 0 {
            return Err(Error::domain("N must be >= 1"));
        }
        if self.k == 0 {
            return Err(Error::domain("K must be >= 1"));
        }
        Ok(())
    }

    /// N / K as a float.
    pub fn electrons_per_nucleus(&self) -> f64 {
        self.n as f64 / self.k as f64
    }
}

/// The four contributions to the energy lower bound and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBoundReport {
    pub kappa: f64,
    pub epsilon: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    /// `+√ε m N`
    pub term_mass: f64,
    /// `−6√(1−ε) Λ N / C₂`
    pub term_c3: f64,
    /// `−(αΛ / 2C₂)(√(2Z) + 2.3)² N`
    pub term_coulomb: f64,
    /// `−(9 / 2π) Λ C₂³ K`
    pub term_field: f64,
    pub total: f64,
    pub total_per_electron: f64,
}

impl EnergyBoundReport {
    /// Residual of `total = Σ terms`.
    pub fn sum_residual(&self) -> f64 {
        (self.term_mass + self.term_c3 + self.term_coulomb + self.term_field - self.total).abs()
    }
}

/// Reduced nuclear data: the common charge and the number of nuclei kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeReduction {
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "K")]
    pub k: u64,
}

/// Moves every nuclear charge to an extreme of `[0, zcap]`.
///
/// The energy is concave in each charge separately, so a lower bound only
/// needs the extreme configurations. Nuclei with charge exactly zero are
/// already at the lower extreme and are dropped; every other nucleus is
/// raised to `zcap`.
pub fn reduce_charges(charges: &[f64], zcap: f64) -> Result<ChargeReduction> {
    if !(zcap.is_finite() && zcap >= 0.0) {
        return Err(Error::domain(format!(
            "charge cap must be >= 0, got {zcap}"
        )));
    }
    if charges.is_empty() {
        return Err(Error::domain("at least one nucleus is required"));
    }
    for &c in charges {
        if !(c.is_finite() && (0.0..=zcap).contains(&c)) {
            return Err(Error::domain(format!("charge {c} outside [0, {zcap}]")));
        }
    }
    let k = charges.iter().filter(|&&c| c > 0.0).count() as u64;
    if k == 0 {
        return Err(Error::domain("all nuclear charges vanish; K >= 1 required"));
    }
    Ok(ChargeReduction { z: zcap, k })
}
