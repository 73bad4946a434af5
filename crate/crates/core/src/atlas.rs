//! Stability and instability verdicts for the model variants, and the
//! thresholds behind the instability results.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::certificate::is_feasible;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projector {
    /// Positive spectral subspace of the free Dirac operator `D(0)`.
    #[serde(rename = "free_D0")]
    FreeD0,
    /// Positive spectral subspace of `D(A)`, including the field.
    #[serde(rename = "dressed_DA")]
    DressedDA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldModel {
    Classical,
    Quantized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelVariant {
    pub projector: Projector,
    pub field: FieldModel,
    pub cutoff: bool,
    pub coulomb: bool,
}

impl ModelVariant {
    pub fn all() -> Vec<ModelVariant> {
        let mut out = Vec::with_capacity(16);
        for projector in [Projector::FreeD0, Projector::DressedDA] {
            for field in [FieldModel::Classical, FieldModel::Quantized] {
                for cutoff in [false, true] {
                    for coulomb in [false, true] {
                        out.push(ModelVariant {
                            projector,
                            field,
                            cutoff,
                            coulomb,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    StableSecondKind,
    PositiveHamiltonian,
    InstabilityFirstKind,
    InstabilitySecondKind,
    Conditional,
}

impl VerdictKind {
    pub fn is_unstable(self) -> bool {
        matches!(
            self,
            VerdictKind::InstabilityFirstKind | VerdictKind::InstabilitySecondKind
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub conditions: Vec<String>,
    /// Identifiers of the table cells and thresholds the verdict rests on.
    pub citations: Vec<String>,
}

/// Inputs to [`classify`] beyond the variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyInput {
    pub alpha: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "K")]
    pub k: u64,
    /// Coupling above which a dressed projector still fails; never defaulted.
    pub alpha_c: Option<f64>,
    /// Use the printed κ floor in the feasibility test.
    pub paper_mode: bool,
}

impl ClassifyInput {
    pub fn new(alpha: f64, z: f64, n: u64, k: u64) -> Self {
        ClassifyInput {
            alpha,
            z,
            n,
            k,
            alpha_c: None,
            paper_mode: false,
        }
    }
}

fn verdict(kind: VerdictKind, conditions: Vec<String>, citations: &[&str]) -> Verdict {
    Verdict {
        kind,
        conditions,
        citations: citations.iter().map(|s| s.to_string()).collect(),
    }
}

/// Total classification of a model variant at the given parameters.
pub fn classify(variant: ModelVariant, input: &ClassifyInput) -> Result<Verdict> {
    let ClassifyInput { alpha, z, .. } = *input;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::domain(format!("Z must be >= 0, got {z}")));
    }
    if input.n == 0 || input.k == 0 {
        return Err(Error::domain("N and K must be >= 1"));
    }
    if let Some(ac) = input.alpha_c {
        if !(ac.is_finite() && ac > 0.0) {
            return Err(Error::domain(format!("alpha_c must be > 0, got {ac}")));
        }
    }
    let row = table_row_id(variant);
    match variant.projector {
        Projector::FreeD0 => {
            let mut conditions = vec!["holds for every alpha > 0".to_string()];
            if variant.coulomb {
                conditions.push("Coulomb terms do not restore stability".into());
            }
            if variant.cutoff {
                conditions
                    .push("energy below a*N^(4/3) - alpha*b*N^2, not bounded by const*N".into());
                Ok(verdict(
                    VerdictKind::InstabilitySecondKind,
                    conditions,
                    &[&row, "bound:free_projector"],
                ))
            } else {
                conditions
                    .push("scaling psi -> psi_mu, A -> A^mu drives the energy to -infinity".into());
                Ok(verdict(
                    VerdictKind::InstabilityFirstKind,
                    conditions,
                    &[&row, "bound:free_projector_scaled"],
                ))
            }
        }
        Projector::DressedDA if !variant.coulomb => Ok(verdict(
            VerdictKind::PositiveHamiltonian,
            vec!["the Hamiltonian is positive by construction".into()],
            &[&row],
        )),
        Projector::DressedDA => {
            let za = z * alpha;
            let feasible = variant.cutoff || variant.field == FieldModel::Classical;
            if feasible && is_feasible(alpha, z, input.paper_mode) {
                let mut conditions =
                    vec![format!("certificate feasible at alpha = {alpha}, Z = {z}")];
                if input.alpha_c.is_some_and(|ac| alpha > ac) {
                    conditions.push(
                        "supplied alpha_c lies below a certified coupling and is inconsistent"
                            .into(),
                    );
                }
                return Ok(verdict(
                    VerdictKind::StableSecondKind,
                    conditions,
                    &[&row, "certificate"],
                ));
            }
            if za > 4.0 / PI {
                return Ok(verdict(
                    VerdictKind::InstabilityFirstKind,
                    vec![format!("Z*alpha = {za} > 4/pi"), "requires m > 0".into()],
                    &[&row, "threshold:z_alpha_four_over_pi"],
                ));
            }
            if let Some(ac) = input.alpha_c.filter(|&ac| alpha > ac) {
                return Ok(verdict(
                    VerdictKind::InstabilityFirstKind,
                    vec![
                        format!("alpha = {alpha} > alpha_c = {ac}"),
                        "for K large enough".into(),
                    ],
                    &[&row, "threshold:alpha_c"],
                ));
            }
            let mut conditions = vec![format!(
                "not certified and Z*alpha = {za} <= 4/pi; between the stability and instability thresholds"
            )];
            if !feasible {
                conditions.push("no stability result for a quantized field without cutoff".into());
            }
            if input.alpha_c.is_none() {
                conditions.push("alpha_c not supplied".into());
            }
            Ok(verdict(VerdictKind::Conditional, conditions, &[&row]))
        }
    }
}

/// Identifier of the table cell covering `v`.
pub fn table_row_id(v: ModelVariant) -> String {
    let c = if v.coulomb { "coulomb" } else { "no_coulomb" };
    match v.projector {
        Projector::FreeD0 => format!(
            "free_projector.{c}.{}",
            if v.cutoff { "cutoff" } else { "no_cutoff" }
        ),
        Projector::DressedDA => match (v.field, v.cutoff) {
            (FieldModel::Classical, _) => format!("dressed_projector.{c}.classical"),
            (FieldModel::Quantized, true) => format!("dressed_projector.{c}.quantized_cutoff"),
            (FieldModel::Quantized, false) => format!("untabulated.{c}.quantized_no_cutoff"),
        },
    }
}

/// What a table cell asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatement {
    Always(VerdictKind),
    /// First kind when α or Zα is too large, stable of the second kind when both are small.
    Threshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub id: String,
    pub table: u8,
    pub coulomb: bool,
    pub column: String,
    pub variants: Vec<ModelVariant>,
    pub statement: RowStatement,
}

/// The eight cells of the two stability tables.
pub fn table_rows() -> Vec<TableRow> {
    let mut rows = Vec::new();
    for coulomb in [false, true] {
        for cutoff in [false, true] {
            let variants = [FieldModel::Classical, FieldModel::Quantized]
                .map(|field| ModelVariant {
                    projector: Projector::FreeD0,
                    field,
                    cutoff,
                    coulomb,
                })
                .to_vec();
            rows.push(TableRow {
                id: table_row_id(variants[0]),
                table: 1,
                coulomb,
                column: format!(
                    "classical or quantized field {}",
                    if cutoff {
                        "with cutoff"
                    } else {
                        "without cutoff"
                    }
                ),
                variants,
                statement: RowStatement::Always(if cutoff {
                    VerdictKind::InstabilitySecondKind
                } else {
                    VerdictKind::InstabilityFirstKind
                }),
            });
        }
    }
    for coulomb in [false, true] {
        let statement = if coulomb {
            RowStatement::Threshold
        } else {
            RowStatement::Always(VerdictKind::PositiveHamiltonian)
        };
        let dressed = |field, cutoff| ModelVariant {
            projector: Projector::DressedDA,
            field,
            cutoff,
            coulomb,
        };
        let classical = vec![
            dressed(FieldModel::Classical, false),
            dressed(FieldModel::Classical, true),
        ];
        rows.push(TableRow {
            id: table_row_id(classical[0]),
            table: 2,
            coulomb,
            column: "classical field with or without cutoff".into(),
            variants: classical,
            statement,
        });
        let quantized = vec![dressed(FieldModel::Quantized, true)];
        rows.push(TableRow {
            id: table_row_id(quantized[0]),
            table: 2,
            coulomb,
            column: "quantized field with cutoff".into(),
            variants: quantized,
            statement,
        });
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeProjectorBound {
    /// `a N^{4/3} − α b N²`
    pub unscaled: f64,
    /// `μ (a N^{1/3} − α b N²)`
    pub scaled: f64,
    /// Smallest N with `unscaled < 0`: `N > (a/(αb))^{3/2}`.
    pub n_crit_unscaled: u64,
    /// Smallest N with `scaled < 0`: `N > (a/(αb))^{3/5}`.
    pub n_crit_scaled: u64,
}

fn smallest_integer_above(x: f64) -> u64 {
    (x.floor() as u64).saturating_add(1)
}

/// Trial-state upper bounds for the free projector. `a`, `b` are not known
/// numerically and must be supplied.
pub fn free_projector_upper_bound(
    n: u64,
    alpha: f64,
    a: f64,
    b: f64,
    mu: f64,
) -> Result<FreeProjectorBound> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain("a and b must be positive"));
    }
    if !(alpha > 0.0 && mu > 0.0 && alpha.is_finite() && mu.is_finite()) {
        return Err(Error::domain("alpha and mu must be positive"));
    }
    let nf = n as f64;
    let ratio = a / (alpha * b);
    Ok(FreeProjectorBound {
        unscaled: a * nf.powf(4.0 / 3.0) - alpha * b * nf * nf,
        scaled: mu * (a * nf.cbrt() - alpha * b * nf * nf),
        n_crit_unscaled: smallest_integer_above(ratio.powf(1.5)),
        n_crit_scaled: smallest_integer_above(ratio.powf(0.6)),
    })
}

/// `ΣZ_j ≥ c·α^{−3/2}` and `ΣZ_j² ≥ 2`, under which nuclei can be placed with
/// negative total Coulomb energy. `c` is not known numerically.
pub fn nuclei_instability_condition(charges: &[f64], alpha: f64, const_c: f64) -> Result<bool> {
    if !(const_c > 0.0 && const_c.is_finite()) {
        return Err(Error::domain("the constant must be positive"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain("alpha must be positive"));
    }
    let total: f64 = charges.iter().sum();
    let squares: f64 = charges.iter().map(|z| z * z).sum();
    Ok(total >= const_c * alpha.powf(-1.5) && squares >= 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalZ {
    /// `4/(πα)`
    pub z_fourpi: f64,
    /// `(4/π)√(1+ε)/α`
    pub z_kato: f64,
}

pub fn critical_z(alpha: f64, epsilon: f64) -> Result<CriticalZ> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    Ok(CriticalZ {
        z_fourpi: 4.0 / (PI * alpha),
        z_kato: 4.0 / PI * (1.0 + epsilon).sqrt() / alpha,
    })
}
