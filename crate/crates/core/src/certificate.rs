//! The constant pipeline behind the energy lower bound.
//!
//! Three conditions must hold simultaneously:
//!
//! * `κ ≥ max{q/0.031, πZ}` (Coulomb control by the localized kinetic energy),
//! * `(κα)² < 1 − ε ≤ 1` (positive kinetic term),
//! * `(1−ε)² α / (1−ε−κ²α²)^{3/2} ≤ 1/(8π·0.060)` (the field energy absorbs
//!   the Lieb–Thirring eigenvalue sum).
//!
//! Given a solution, the bound is the sum of four terms evaluated at the
//! `C₂` that minimizes the negative part. κ is always taken at its floor:
//! larger values only tighten the last two conditions.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnergyBoundReport, PhysicalParams};

/// Lieb–Thirring constant for the ½-moment in three dimensions.
pub const LIEB_THIRRING_CONSTANT: f64 = 0.060;
/// Shift in the Coulomb constant `(√(2Z) + 2.3)²`.
pub const COULOMB_SHIFT: f64 = 2.3;
/// Denominator in the `q / 0.031` kinetic floor.
pub const KAPPA_SPIN_DIVISOR: f64 = 0.031;
/// Printed value of `2 / 0.031`.
pub const KAPPA_FLOOR_PRINTED: f64 = 64.5;
/// Absolute tolerance of the ε bisection.
pub const EPS_BISECTION_TOL: f64 = 1e-12;
/// Final bracket width of the golden-section ε optimization.
pub const EPS_GOLDEN_TOL: f64 = 1e-10;

const GOLDEN_PRESCAN: usize = 512;

/// Right-hand side of the field-energy condition, `1/(8π·0.060)`.
pub fn needs2_threshold() -> f64 {
    1.0 / (8.0 * PI * LIEB_THIRRING_CONSTANT)
}

/// Number of spin states counted in the Coulomb estimate.
///
/// Electrons in the positive spectral subspace contribute a reduced one-body
/// density matrix of trace at most two, so `Two` is the relevant choice; `Four`
/// is kept to expose the naive count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinStates {
    Two,
    Four,
}

impl SpinStates {
    pub fn count(self) -> f64 {
        match self {
            SpinStates::Two => 2.0,
            SpinStates::Four => 4.0,
        }
    }
}

/// Smallest admissible κ: `max(q/0.031, πZ)`.
///
/// With `paper_mode` and `q = 2` the first argument is the printed 64.5 in
/// place of `2/0.031 ≈ 64.516`.
pub fn kappa_min(z: f64, q: SpinStates, paper_mode: bool) -> f64 {
    let floor = match (q, paper_mode) {
        (SpinStates::Two, true) => KAPPA_FLOOR_PRINTED,
        _ => q.count() / KAPPA_SPIN_DIVISOR,
    };
    floor.max(PI * z)
}

/// `(1−ε)² α / (1−ε−κ²α²)^{3/2}`.
///
/// A non-positive denominator is reported as `Error::Infeasible`.
pub fn needs2_lhs(epsilon: f64, kappa: f64, alpha: f64) -> Result<f64> {
    let x = 1.0 - epsilon;
    let denom = x - (kappa * alpha).powi(2);
    if denom <= 0.0 || !denom.is_finite() {
        return Err(Error::infeasible(format!(
            "1 - eps - (kappa*alpha)^2 = {denom} <= 0"
        )));
    }
    Ok(x * x * alpha / denom.powf(1.5))
}

fn needs2_holds(epsilon: f64, kappa: f64, alpha: f64) -> bool {
    matches!(needs2_lhs(epsilon, kappa, alpha), Ok(v) if v <= needs2_threshold())
}

/// All three conditions at the given (ε, κ, α, Z).
pub fn conditions_hold(epsilon: f64, kappa: f64, alpha: f64, z: f64, paper_mode: bool) -> bool {
    let c = (kappa * alpha).powi(2);
    (0.0..1.0).contains(&epsilon)
        && kappa >= kappa_min(z, SpinStates::Two, paper_mode)
        && c < 1.0 - epsilon
        && needs2_holds(epsilon, kappa, alpha)
}

/// Feasible ε-set `{ε ∈ [0, 1−(κα)²) : needs2 holds}` as a closed interval.
///
/// In `x = 1−ε` the left side is `x²α/(x−c)^{3/2}` with `c = (κα)²`, which is
/// decreasing for `x > 4c` and increasing for `x < 4c`. The sublevel set is
/// therefore an interval; both ends are located by bisection on the
/// appropriate monotone branch.
pub fn feasible_eps_interval(alpha: f64, kappa: f64) -> Result<Option<(f64, f64)>> {
    let ka = kappa * alpha;
    if !(ka < 1.0) {
        return Err(Error::infeasible(format!(
            "kappa*alpha = {ka} >= 1 violates the kinetic condition"
        )));
    }
    let c = ka * ka;
    let upper = 1.0 - c;
    let e_min = (1.0 - 4.0 * c).max(0.0);
    if !needs2_holds(e_min, kappa, alpha) {
        return Ok(None);
    }
    // Increasing branch: feasible at lo, infeasible as ε -> upper.
    let (mut lo, mut hi) = (e_min, upper);
    while hi - lo > EPS_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if needs2_holds(mid, kappa, alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps_hi = lo;
    let eps_lo = if needs2_holds(0.0, kappa, alpha) {
        0.0
    } else {
        // Decreasing branch: infeasible at 0, feasible at e_min.
        let (mut lo, mut hi) = (0.0, e_min);
        while hi - lo > EPS_BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if needs2_holds(mid, kappa, alpha) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(Some((eps_lo, eps_hi)))
}

/// Largest feasible ε, or `None` when no ε satisfies the conditions.
pub fn eps_max(alpha: f64, kappa: f64) -> Result<Option<f64>> {
    Ok(feasible_eps_interval(alpha, kappa)?.map(|(_, hi)| hi))
}

/// Largest κα compatible with the field-energy condition at fixed ε:
/// `√(1−ε − ((1−ε)²α / T)^{2/3})` with `T = 1/(8π·0.060)`.
pub fn kappa_alpha_max(alpha: f64, epsilon: f64) -> Option<f64> {
    let x = 1.0 - epsilon;
    let slack = x - (x * x * alpha / needs2_threshold()).powf(2.0 / 3.0);
    (slack > 0.0).then(|| slack.sqrt())
}

/// `6√(1−ε) + (α/2)(√(2Z) + 2.3)²`, the coefficient of `ΛN/C₂`.
fn inverse_c2_coefficient(alpha: f64, z: f64, epsilon: f64) -> f64 {
    6.0 * (1.0 - epsilon).sqrt() + 0.5 * alpha * ((2.0 * z).sqrt() + COULOMB_SHIFT).powi(2)
}

/// The minimizing `C₂`: `C₂⁴ = (N/K)·[6√(1−ε) + (α/2)(√(2Z)+2.3)²]·(2π/27)`.
pub fn optimal_c2(params: &PhysicalParams, epsilon: f64) -> f64 {
    let a = inverse_c2_coefficient(params.alpha, params.z, epsilon);
    (params.electrons_per_nucleus() * a * 2.0 * PI / 27.0).powf(0.25)
}

/// The four energy terms at an arbitrary `C₂`, with `C₃ = 6√(1−ε)/C₂`.
pub fn bound_terms(
    params: &PhysicalParams,
    kappa: f64,
    epsilon: f64,
    c2: f64,
) -> EnergyBoundReport {
    let n = params.n as f64;
    let k = params.k as f64;
    let lam = params.lambda;
    let sq = (1.0 - epsilon).sqrt();
    let term_mass = epsilon.sqrt() * params.m * n;
    let term_c3 = -6.0 * sq * lam * n / c2;
    let term_coulomb =
        -(params.alpha * lam / (2.0 * c2)) * ((2.0 * params.z).sqrt() + COULOMB_SHIFT).powi(2) * n;
    let term_field = -(9.0 / (2.0 * PI)) * lam * c2.powi(3) * k;
    let total = term_mass + term_c3 + term_coulomb + term_field;
    EnergyBoundReport {
        kappa,
        epsilon,
        c2,
        c3: 6.0 * sq / c2,
        term_mass,
        term_c3,
        term_coulomb,
        term_field,
        total,
        total_per_electron: total / n,
    }
}

/// Closed form of the bound at the optimal `C₂`: `√ε m N − (18Λ/π) K C₂³`.
pub fn closed_form_total(params: &PhysicalParams, epsilon: f64) -> f64 {
    let c2 = optimal_c2(params, epsilon);
    epsilon.sqrt() * params.m * params.n as f64
        - 18.0 * params.lambda / PI * params.k as f64 * c2.powi(3)
}

/// A witness (κ, ε, C₂, C₃) for the condition system together with the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub params: PhysicalParams,
    pub kappa: f64,
    pub epsilon: Option<f64>,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    #[serde(rename = "C3")]
    pub c3: Option<f64>,
    /// Present only when the certificate is feasible.
    pub report: Option<EnergyBoundReport>,
    pub feasible: bool,
    pub paper_mode: bool,
    pub notes: Vec<String>,
}

const MASS_COEFFICIENT_NOTE: &str = "mass coefficient of E/N is sqrt(eps) exactly; \
the printed hydrogen line 0.866 m - 4.29 Lambda uses 0.866 = sqrt(0.75), \
while eps = 0.771 gives sqrt(eps) = 0.878";

/// Evaluates the certificate at a given ε, or at the optimizing ε when none is
/// supplied.
pub fn certify(
    params: &PhysicalParams,
    epsilon: Option<f64>,
    paper_mode: bool,
) -> Result<StabilityCertificate> {
    params.validate()?;
    if let Some(e) = epsilon {
        if !(e.is_finite() && (0.0..1.0).contains(&e)) {
            return Err(Error::domain(format!(
                "epsilon must lie in [0, 1), got {e}"
            )));
        }
    }
    let kappa = kappa_min(params.z, SpinStates::Two, paper_mode);
    let mut notes = Vec::new();
    if paper_mode {
        notes.push(MASS_COEFFICIENT_NOTE.to_string());
    }
    let chosen = match epsilon {
        Some(e) => conditions_hold(e, kappa, params.alpha, params.z, paper_mode).then_some(e),
        None => match optimize_eps_with(params, paper_mode) {
            Ok(e) => Some(e),
            Err(Error::Infeasible(_)) => None,
            Err(other) => return Err(other),
        },
    };
    let Some(eps) = chosen else {
        notes.push("no (kappa, eps) satisfies the condition system; no bound claimed".into());
        return Ok(StabilityCertificate {
            params: *params,
            kappa,
            epsilon,
            c2: None,
            c3: None,
            report: None,
            feasible: false,
            paper_mode,
            notes,
        });
    };
    let c2 = optimal_c2(params, eps);
    let report = bound_terms(params, kappa, eps, c2);
    Ok(StabilityCertificate {
        params: *params,
        kappa,
        epsilon: Some(eps),
        c2: Some(c2),
        c3: Some(report.c3),
        report: Some(report),
        feasible: true,
        paper_mode,
        notes,
    })
}

/// The ε in the feasible interval maximizing the bound per electron
/// (formula-valued κ floor).
pub fn optimize_eps(params: &PhysicalParams) -> Result<f64> {
    optimize_eps_with(params, false)
}

/// As [`optimize_eps`] with an explicit choice of κ floor.
///
/// A uniform pre-scan brackets the global maximum and golden-section search
/// refines it to a bracket of width [`EPS_GOLDEN_TOL`]; the objective is a sum
/// of a concave and a convex part, so a bare golden search could stall at an
/// interior local maximum.
pub fn optimize_eps_with(params: &PhysicalParams, paper_mode: bool) -> Result<f64> {
    params.validate()?;
    let kappa = kappa_min(params.z, SpinStates::Two, paper_mode);
    let Some((lo, hi)) = feasible_eps_interval(params.alpha, kappa)? else {
        return Err(Error::infeasible(format!(
            "no feasible eps at alpha = {}, Z = {}",
            params.alpha, params.z
        )));
    };
    let objective =
        |e: f64| bound_terms(params, kappa, e, optimal_c2(params, e)).total_per_electron;
    if hi - lo <= EPS_GOLDEN_TOL {
        return Ok(hi);
    }
    let step = (hi - lo) / GOLDEN_PRESCAN as f64;
    let best = (0..=GOLDEN_PRESCAN)
        .map(|i| (i, objective(lo + step * i as f64)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        )
        .0;
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = (lo + step * (best + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > EPS_GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let mid = 0.5 * (a + b);
    // Endpoints of the feasible interval are candidates in their own right.
    let candidates = [lo, mid, hi];
    let best = candidates.iter().copied().map(|e| (e, objective(e))).fold(
        (mid, f64::NEG_INFINITY),
        |acc, x| if x.1 > acc.1 { x } else { acc },
    );
    Ok(best.0)
}

/// Whether some ε ≥ 0 satisfies the condition system at (α, Z) with κ at its floor.
pub fn is_feasible(alpha: f64, z: f64, paper_mode: bool) -> bool {
    let kappa = kappa_min(z, SpinStates::Two, paper_mode);
    matches!(feasible_eps_interval(alpha, kappa), Ok(Some(_)))
}

/// Largest integer Z for which the condition system is solvable (0 when none).
///
/// Feasibility is monotone in Z, so the search gallops upward and then
/// bisects; the result equals a unit-step scan.
pub fn max_z(alpha: f64, paper_mode: bool) -> u64 {
    max_z_capped(alpha, paper_mode, u64::MAX / 4)
}

/// [`max_z`] restricted to `Z ≤ z_cap`.
pub fn max_z_capped(alpha: f64, paper_mode: bool, z_cap: u64) -> u64 {
    if !(alpha > 0.0) || !is_feasible(alpha, 0.0, paper_mode) {
        return 0;
    }
    let feasible = |z: u64| is_feasible(alpha, z as f64, paper_mode);
    let mut lo = 0u64;
    let mut step = 1u64;
    let hi = loop {
        let probe = lo.saturating_add(step).min(z_cap);
        if probe == lo {
            return lo;
        }
        if !feasible(probe) {
            break probe;
        }
        lo = probe;
        if lo == z_cap {
            return lo;
        }
        step = step.saturating_mul(2);
    };
    let mut hi = hi;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// One row of the (α, Z) stability map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub alpha: f64,
    #[serde(rename = "max_Z")]
    pub max_z: u64,
    /// Largest feasible ε at (α, max_Z); absent when even Z = 0 fails.
    pub eps: Option<f64>,
}

/// Maximal stable Z for every α in an ascending positive grid.
pub fn phase_scan(alpha_grid: &[f64], z_max: u64, paper_mode: bool) -> Result<Vec<PhaseRow>> {
    if alpha_grid.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::domain("alpha grid values must be positive"));
    }
    if alpha_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("alpha grid must be ascending"));
    }
    Ok(alpha_grid
        .par_iter()
        .map(|&alpha| {
            let z = max_z_capped(alpha, paper_mode, z_max);
            let kappa = kappa_min(z as f64, SpinStates::Two, paper_mode);
            let eps = eps_max(alpha, kappa).ok().flatten();
            PhaseRow {
                alpha,
                max_z: z,
                eps,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ALPHA: f64 = 1.0 / 137.0;

    fn hydrogen() -> PhysicalParams {
        PhysicalParams::new(ALPHA, 1.0, 1.0, 1.0, 1, 1).unwrap()
    }

    #[test]
    fn kappa_min_examples() {
        assert_eq!(kappa_min(1.0, SpinStates::Two, true), 64.5);
        assert_relative_eq!(kappa_min(42.0, SpinStates::Two, false), PI * 42.0);
        assert_relative_eq!(kappa_min(0.0, SpinStates::Two, false), 2.0 / 0.031);
        assert_relative_eq!(kappa_min(0.0, SpinStates::Four, true), 4.0 / 0.031);
    }

    #[test]
    fn needs2_examples() {
        let t = needs2_threshold();
        assert_relative_eq!(t, 0.663_145_596_216_230_6, max_relative = 1e-15);
        // ε = 0 at Z = 42: feasible, value frozen from a 30-digit evaluation.
        let v = needs2_lhs(0.0, PI * 42.0, ALPHA).unwrap();
        assert!(v <= t);
        assert_relative_eq!(v, 0.374_630_730_623_195_5, max_relative = 1e-12);
        assert!(needs2_lhs(0.771, 64.5, ALPHA).unwrap() <= t);
        // κα = 1/2 exactly, so the denominator vanishes at ε = 3/4.
        assert!(matches!(
            needs2_lhs(0.75, 1.0, 0.5),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            needs2_lhs(0.8, 1.0, 0.5),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn eps_max_examples() {
        let e = eps_max(ALPHA, 64.5).unwrap().unwrap();
        assert!((e - 0.771).abs() < 0.005, "eps_max = {e}");
        let e42 = eps_max(ALPHA, PI * 42.0).unwrap().unwrap();
        assert!(e42 > 0.0 && e42 < 0.05, "eps_max = {e42}");
        assert!(matches!(eps_max(0.5, 64.5), Err(Error::Infeasible(_))));
    }

    #[test]
    fn eps_max_matches_grid_oracle() {
        // Largest grid point satisfying the condition, by brute force.
        for kappa in [64.5, PI * 30.0, PI * 42.0] {
            let n = 200_000;
            let upper = 1.0 - (kappa * ALPHA).powi(2);
            let grid_best = (0..n)
                .map(|i| upper * i as f64 / n as f64)
                .filter(|&e| needs2_lhs(e, kappa, ALPHA).is_ok_and(|v| v <= needs2_threshold()))
                .fold(f64::NAN, f64::max);
            let e = eps_max(ALPHA, kappa).unwrap().unwrap();
            assert!(e >= grid_best && e - grid_best <= upper / n as f64 + 1e-12);
        }
    }

    #[test]
    fn feasible_eps_set_is_an_interval() {
        for &(alpha, kappa) in &[
            (ALPHA, 64.5),
            (ALPHA, PI * 42.0),
            (0.001, 70.0),
            (0.0105, 65.0),
        ] {
            let upper = 1.0 - (kappa * alpha).powi(2);
            let n = 20_000;
            let flags: Vec<bool> = (0..n)
                .map(|i| needs2_holds(upper * i as f64 / n as f64, kappa, alpha))
                .collect();
            let transitions = flags.windows(2).filter(|w| w[0] != w[1]).count();
            assert!(
                transitions <= 2,
                "feasible set not an interval at ({alpha}, {kappa})"
            );
            if let Some((lo, hi)) = feasible_eps_interval(alpha, kappa).unwrap() {
                for (i, &f) in flags.iter().enumerate() {
                    let e = upper * i as f64 / n as f64;
                    if e < lo - 1e-9 || e > hi + 1e-9 {
                        assert!(!f);
                    } else if e > lo + 1e-9 && e < hi - 1e-9 {
                        assert!(f);
                    }
                }
            } else {
                assert!(flags.iter().all(|f| !f));
            }
        }
    }

    #[test]
    fn needs2_is_not_monotone_but_quasiconvex() {
        // Decreasing for ε < 1 − 4(κα)², increasing afterwards.
        let kappa = 64.5;
        let c = (kappa * ALPHA).powi(2);
        let turn = 1.0 - 4.0 * c;
        assert!(turn > 0.0);
        let f = |e| needs2_lhs(e, kappa, ALPHA).unwrap();
        assert!(f(0.0) > f(turn * 0.5));
        assert!(f(turn * 0.5) > f(turn));
        assert!(f(turn) < f(turn + 0.1));
    }

    #[test]
    fn hydrogen_constants() {
        let cert = certify(&hydrogen(), Some(0.771), true).unwrap();
        assert!(cert.feasible);
        let c2 = cert.c2.unwrap();
        assert!((c2 - 0.908).abs() <= 0.001, "C2 = {c2}");
        let r = cert.report.unwrap();
        // m = Λ = 1: the Λ-coefficient is the non-mass part of E/N.
        let lambda_coeff = r.total_per_electron - 0.771f64.sqrt();
        assert!(
            (lambda_coeff + 4.29).abs() <= 0.01,
            "coefficient {lambda_coeff}"
        );
        assert_relative_eq!(r.term_mass, 0.771f64.sqrt(), max_relative = 1e-15);
        assert!(!cert.notes.is_empty());
    }

    #[test]
    fn report_identities() {
        for &(z, n, k, eps) in &[(1.0, 1, 1, 0.771), (42.0, 3, 2, 0.0), (10.0, 10, 1, 0.3)] {
            let p = PhysicalParams::new(ALPHA, z, 0.7, 2.5, n, k).unwrap();
            let c2 = optimal_c2(&p, eps);
            let r = bound_terms(&p, 100.0, eps, c2);
            assert!(r.sum_residual() <= 1e-12 * r.total.abs().max(1.0));
            // Stationarity: C₃ and Coulomb terms sum to three times the field term.
            assert_relative_eq!(
                r.term_c3 + r.term_coulomb,
                3.0 * r.term_field,
                max_relative = 1e-12
            );
            assert_relative_eq!(r.total, closed_form_total(&p, eps), max_relative = 1e-12);
            assert_relative_eq!(r.c3, 6.0 * (1.0 - eps).sqrt() / c2, max_relative = 1e-15);
        }
    }

    #[test]
    fn optimal_c2_minimizes_negative_part() {
        let p = PhysicalParams::new(ALPHA, 5.0, 1.0, 1.0, 4, 3).unwrap();
        let eps = 0.4;
        let negative = |c2: f64| {
            let r = bound_terms(&p, 64.5, eps, c2);
            r.term_c3 + r.term_coulomb + r.term_field
        };
        let c2 = optimal_c2(&p, eps);
        for f in [0.99, 1.01, 0.9, 1.1] {
            assert!(negative(c2 * f) <= negative(c2));
        }
    }

    #[test]
    fn z50_infeasible_by_exhaustive_scan() {
        let kappa = kappa_min(50.0, SpinStates::Two, false);
        // κα > 1 already, so no ε works; confirm with a direct scan as well.
        for i in 0..10_000 {
            let e = i as f64 / 10_000.0;
            assert!(!conditions_hold(e, kappa, ALPHA, 50.0, false));
        }
        let p = PhysicalParams::new(ALPHA, 50.0, 1.0, 1.0, 1, 1).unwrap();
        let cert = certify(&p, None, false).unwrap();
        assert!(!cert.feasible);
        assert!(cert.report.is_none());
    }

    #[test]
    fn optimize_eps_massless_goes_to_eps_max() {
        let p = PhysicalParams::new(ALPHA, 1.0, 0.0, 1.0, 1, 1).unwrap();
        let e = optimize_eps(&p).unwrap();
        let emax = eps_max(ALPHA, kappa_min(1.0, SpinStates::Two, false))
            .unwrap()
            .unwrap();
        assert!((e - emax).abs() < 1e-9);
    }

    #[test]
    fn optimize_eps_matches_grid_oracle() {
        let p = hydrogen();
        let kappa = kappa_min(1.0, SpinStates::Two, false);
        let (lo, hi) = feasible_eps_interval(ALPHA, kappa).unwrap().unwrap();
        let f = |e: f64| {
            let c2 = optimal_c2(&p, e);
            e.sqrt() * p.m - 18.0 / PI * p.lambda * c2.powi(3)
        };
        let n = 1_000_000;
        let (best_e, best_f) = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .map(|e| (e, f(e)))
            .fold(
                (0.0, f64::NEG_INFINITY),
                |a, b| if b.1 > a.1 { b } else { a },
            );
        let e = optimize_eps(&p).unwrap();
        assert!((e - best_e).abs() < 1e-4, "{e} vs {best_e}");
        assert!((f(e) - best_f).abs() < 1e-8 || f(e) > best_f);
    }

    #[test]
    fn optimize_eps_large_cutoff() {
        let p = PhysicalParams::new(ALPHA, 1.0, 1.0, 1e6, 1, 1).unwrap();
        let e = optimize_eps(&p).unwrap();
        let emax = eps_max(ALPHA, kappa_min(1.0, SpinStates::Two, false))
            .unwrap()
            .unwrap();
        assert!((e - emax).abs() < 1e-6);
    }

    #[test]
    fn max_z_examples() {
        assert_eq!(max_z(ALPHA, true), 42);
        assert_eq!(max_z(ALPHA, false), 42);
        assert!(!is_feasible(ALPHA, 43.0, true));
        assert_eq!(max_z(1.0, true), 0);
        let ka = kappa_min(42.0, SpinStates::Two, true) * ALPHA;
        assert!(ka <= 0.97);
    }

    #[test]
    fn max_z_agrees_with_unit_scan() {
        for alpha in [ALPHA, 0.002, 0.005, 0.01, 0.014] {
            let mut z = 0u64;
            while is_feasible(alpha, (z + 1) as f64, false) {
                z += 1;
            }
            let expected = if is_feasible(alpha, 0.0, false) { z } else { 0 };
            assert_eq!(max_z(alpha, false), expected, "alpha = {alpha}");
        }
    }

    #[test]
    fn kappa_alpha_boundary() {
        let ka = kappa_alpha_max(ALPHA, 0.0).unwrap();
        assert!((ka - 0.97).abs() <= 0.005, "{ka}");
        // Boundary really is the root of the condition.
        let kappa = ka / ALPHA;
        assert_relative_eq!(
            needs2_lhs(0.0, kappa, ALPHA).unwrap(),
            needs2_threshold(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn phase_scan_rows() {
        let rows = phase_scan(&[ALPHA], 1000, true).unwrap();
        assert_eq!(rows[0].max_z, 42);
        assert!(rows[0].eps.unwrap() > 0.0);

        let tiny = phase_scan(&[1e-6], 10_000_000, false).unwrap();
        let z = tiny[0].max_z;
        assert!(z >= 42);
        let ka = kappa_alpha_max(1e-6, 0.0).unwrap();
        assert!((PI * z as f64 * 1e-6) <= ka && (PI * (z + 1) as f64 * 1e-6) > ka);

        let grid: Vec<f64> = (1..=20).map(|i| 0.001 * i as f64).collect();
        let rows = phase_scan(&grid, 1_000_000, false).unwrap();
        assert!(rows.windows(2).all(|w| w[1].max_z <= w[0].max_z));
        assert!(phase_scan(&[0.2, 0.1], 10, false).is_err());
    }

    #[test]
    fn feasibility_monotone_in_alpha() {
        for z in [0.0, 1.0, 10.0, 30.0, 42.0] {
            let mut prev = true;
            for i in 1..200 {
                let alpha = 1e-4 * i as f64;
                let f = is_feasible(alpha, z, false);
                assert!(prev || !f, "feasible again at alpha = {alpha}, Z = {z}");
                prev = f;
            }
        }
    }
}
