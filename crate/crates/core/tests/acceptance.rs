//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use qse_core::atlas::{
    classify, critical_z, table_rows, ClassifyInput, FieldModel, ModelVariant, Projector,
    RowStatement, VerdictKind,
};
use qse_core::certificate::{certify, eps_max, is_feasible, kappa_alpha_max, max_z};
use qse_core::field::{build_modeset, field_commutators, AngularRule, TruncatedFock};
use qse_core::model::PhysicalParams;
use qse_core::spectral::lattice::random_gauge;
use qse_core::spectral::random::trial_rng;
use qse_core::spectral::{dirac_square_identity, LatticeGauge};
use qse_core::suites::{run_suite, smeared_vnorm_refinement, Suite, SuiteReport};

const ALPHA: f64 = 1.0 / 137.0;
const SEED: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn suite_outcome(r: &SuiteReport) -> Outcome {
    outcome(
        r.pass && r.failed == 0,
        format!(
            "{}: {} trials, {} failed, worst margin {:.3e}",
            r.suite, r.trials, r.failed, r.worst_margin
        ),
    )
}

fn c1_max_z() -> Outcome {
    let z = max_z(ALPHA, true);
    let rejects = !is_feasible(ALPHA, 43.0, true);
    outcome(
        z == 42 && rejects,
        format!("max_Z = {z}, Z = 43 rejected: {rejects}"),
    )
}

fn c2_kappa_alpha() -> Outcome {
    match kappa_alpha_max(ALPHA, 0.0) {
        Some(ka) => outcome(
            (ka - 0.97).abs() <= 0.005,
            format!("kappa*alpha boundary = {ka:.6}"),
        ),
        None => outcome(false, "no feasible kappa*alpha at eps = 0"),
    }
}

fn c3_eps_max() -> Outcome {
    match eps_max(ALPHA, 64.5) {
        Ok(Some(e)) => outcome((e - 0.771).abs() <= 0.005, format!("eps_max = {e:.6}")),
        other => outcome(false, format!("eps_max returned {other:?}")),
    }
}

fn c4_hydrogen() -> Outcome {
    let run = || -> qse_core::Result<Outcome> {
        let p = PhysicalParams::new(ALPHA, 1.0, 1.0, 1.0, 1, 1)?;
        let cert = certify(&p, Some(0.771), true)?;
        let Some(r) = cert.report else {
            return Ok(outcome(false, "certificate infeasible"));
        };
        let c2 = r.c2;
        // With m = Λ = 1 and N = K the Λ-coefficient is E/N minus the mass term.
        let mass = r.term_mass / p.n as f64;
        let lambda_coeff = r.total_per_electron - mass;
        let noted = cert.notes.iter().any(|n| n.contains("0.866"));
        Ok(outcome(
            (c2 - 0.908).abs() <= 0.001
                && (lambda_coeff + 4.29).abs() <= 0.01
                && (mass - 0.771f64.sqrt()).abs() < 1e-15
                && noted,
            format!("C2 = {c2:.6}, Lambda coefficient = {lambda_coeff:.5}, mass coefficient = {mass:.5}, note present: {noted}"),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn c5_coulomb() -> Outcome {
    match run_suite(Suite::Coulomb, 10_000, SEED, None) {
        Ok(r) => suite_outcome(&r),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c6_bks() -> Outcome {
    match run_suite(Suite::Bks, 10_000, SEED, None) {
        Ok(r) => suite_outcome(&r),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c7_field_energy() -> Outcome {
    let run = || -> qse_core::Result<Outcome> {
        let levels = smeared_vnorm_refinement()?;
        let (label, finest) = levels.last().cloned().unwrap_or_default();
        let r = run_suite(Suite::Fock, 24, SEED, Some(1e-8))?;
        let modes = build_modeset(1.0, 2, AngularRule::Icosahedron, SEED)?.n_modes();
        Ok(outcome(
            (finest - 1.0).abs() <= 1e-2 && r.pass && r.failed == 0 && modes <= 48,
            format!(
                "vnorm at {label} = {finest:.12}; pointwise B, A, E on {modes} modes, n_max 3: {} points, worst margin {:.3e}",
                r.trials, r.worst_margin
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn c8_commutators() -> Outcome {
    let run = || -> qse_core::Result<Outcome> {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for (nr, rule) in [(2, AngularRule::Octahedron), (1, AngularRule::Icosahedron)] {
            let modes = build_modeset(1.0, nr, rule, SEED)?;
            if (0..modes.n_points()).any(|q| modes.antipode(q).is_none()) {
                return Ok(outcome(false, "mode set not symmetric"));
            }
            let fock = TruncatedFock::new(modes, 2)?;
            for t in 0..8 {
                let mut rng = trial_rng(SEED, t);
                let mut point = || -> [f64; 3] {
                    std::array::from_fn(|_| rand::Rng::random_range(&mut rng, -2.0..2.0))
                };
                let (x, y) = (point(), point());
                for c in field_commutators(&fock, &x, &y) {
                    worst = worst.max(c.max_entry).max(c.scalar);
                    count += 1;
                }
            }
        }
        Ok(outcome(
            worst <= 1e-12,
            format!("{count} component pairs, largest entry {worst:.3e}"),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn c9_dirac() -> Outcome {
    let run = || -> qse_core::Result<Outcome> {
        let mut worst: f64 = 0.0;
        for band in 1..=3 {
            let mut rng = trial_rng(SEED, band as u64);
            let gauge = LatticeGauge::new(2.0 * PI, 16, random_gauge(band, 4, &mut rng))?;
            worst = worst.max(dirac_square_identity(&gauge, ALPHA, 1.0, SEED)?);
            worst = worst.max(dirac_square_identity(&gauge, 0.5, 0.3, SEED + 1)?);
        }
        let chiral = run_suite(Suite::Dirac, 1000, SEED, None)?;
        Ok(outcome(
            worst <= 1e-10 && chiral.pass && chiral.failed == 0,
            format!(
                "16^3 lattice residual {worst:.3e}; chiral suite {} trials, {} failed, worst residual {:.3e}",
                chiral.trials, chiral.failed, -chiral.worst_margin
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn c10_gradient() -> Outcome {
    match run_suite(Suite::Localization, 200, SEED, Some(0.0)) {
        Ok(r) => suite_outcome(&r),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c11_tables() -> Outcome {
    let run = || -> qse_core::Result<Outcome> {
        let rows = table_rows();
        let mut covered = HashSet::new();
        let mut mismatches = Vec::new();
        for row in &rows {
            for &v in &row.variants {
                if !covered.insert(v) {
                    mismatches.push(format!("{} listed twice", row.id));
                }
                match row.statement {
                    RowStatement::Always(kind) => {
                        for alpha in [1e-3, ALPHA, 0.5] {
                            for z in [0.0, 1.0, 42.0, 200.0] {
                                let got = classify(v, &ClassifyInput::new(alpha, z, 2, 2))?.kind;
                                if got != kind {
                                    mismatches.push(format!(
                                        "{} at alpha {alpha}, Z {z}: {got:?}",
                                        row.id
                                    ));
                                }
                            }
                        }
                    }
                    RowStatement::Threshold => {
                        let small = classify(v, &ClassifyInput::new(ALPHA, 20.0, 1, 1))?.kind;
                        let big_z = classify(v, &ClassifyInput::new(ALPHA, 175.0, 1, 1))?.kind;
                        let big_alpha = classify(
                            v,
                            &ClassifyInput {
                                alpha_c: Some(0.1),
                                ..ClassifyInput::new(0.5, 1.0, 1, 1)
                            },
                        )?
                        .kind;
                        if small != VerdictKind::StableSecondKind
                            || big_z != VerdictKind::InstabilityFirstKind
                            || big_alpha != VerdictKind::InstabilityFirstKind
                        {
                            mismatches
                                .push(format!("{}: {small:?}, {big_z:?}, {big_alpha:?}", row.id));
                        }
                    }
                }
            }
        }
        let all = ModelVariant::all();
        for v in &all {
            classify(*v, &ClassifyInput::new(ALPHA, 1.0, 1, 1))?;
            let untabulated = v.projector == Projector::DressedDA
                && v.field == FieldModel::Quantized
                && !v.cutoff;
            if covered.contains(v) == untabulated {
                mismatches.push(format!("coverage of {v:?}"));
            }
        }
        let zc = critical_z(ALPHA, 0.0)?.z_fourpi;
        Ok(outcome(
            rows.len() == 8 && mismatches.is_empty() && (zc - 174.4).abs() <= 0.1,
            format!(
                "{} rows, {} variants enumerated, {} mismatches{}; Z_fourpi = {zc:.4}",
                rows.len(),
                all.len(),
                mismatches.len(),
                mismatches
                    .first()
                    .map(|m| format!(" (first: {m})"))
                    .unwrap_or_default()
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn c12_lieb_thirring() -> Outcome {
    match run_suite(Suite::Lt, 0, SEED, None) {
        Ok(r) => {
            let ratios: Vec<String> = r.records.iter().map(|t| t.detail.clone()).collect();
            outcome(
                r.failed == 0,
                format!("{} wells; {}", r.trials, ratios.join("; ")),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("max_Z at 1/137", Duration::from_secs(1), c1_max_z),
        (
            "kappa*alpha boundary",
            Duration::from_secs(1),
            c2_kappa_alpha,
        ),
        ("eps_max at kappa 64.5", Duration::from_secs(1), c3_eps_max),
        ("hydrogen constants", Duration::from_secs(1), c4_hydrogen),
        ("Coulomb lower bound", Duration::from_secs(30), c5_coulomb),
        ("BKS inequality", Duration::from_secs(60), c6_bks),
        (
            "field energy bounds",
            Duration::from_secs(600),
            c7_field_energy,
        ),
        ("field commutators", Duration::from_secs(60), c8_commutators),
        (
            "Dirac square and chiral projectors",
            Duration::from_secs(120),
            c9_dirac,
        ),
        (
            "localization gradient bound",
            Duration::from_secs(60),
            c10_gradient,
        ),
        ("table fidelity", Duration::from_secs(1), c11_tables),
        (
            "Lieb-Thirring diagnostic",
            Duration::from_secs(300),
            c12_lieb_thirring,
        ),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:2} {}: {name} [{:.2}s / {}s] {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
