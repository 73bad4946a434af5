mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qse_core::atlas::{classify, ClassifyInput, FieldModel, ModelVariant, Projector};
use qse_core::certificate::{certify, max_z, phase_scan};
use qse_core::model::PhysicalParams;
use qse_core::suites::{run_suite, Suite, SuiteReport};
use qse_core::Error;

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_NEGATIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "qse",
    version,
    about = "Stability certificates for the no-pair QED model"
)]
struct Cli {
    /// Worker threads; falls back to QSE_JOBS, then to the core count.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the stability certificate at one parameter point.
    Certify(CertifyArgs),
    /// Largest Z admitted by the certificate.
    Maxz(MaxzArgs),
    /// Scan max Z over a linear grid of alpha.
    Phase(PhaseArgs),
    /// Classify a model variant against the stability tables.
    Classify(ClassifyArgs),
    /// Run randomized verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct AlphaArg {
    #[arg(
        long,
        conflicts_with = "alpha_inverse",
        required_unless_present = "alpha_inverse"
    )]
    alpha: Option<f64>,
    /// Give alpha as 1/x, e.g. `--alpha-inverse 137`.
    #[arg(long)]
    alpha_inverse: Option<f64>,
}

impl AlphaArg {
    fn value(self) -> f64 {
        match (self.alpha, self.alpha_inverse) {
            (Some(a), _) => a,
            (None, Some(inv)) => 1.0 / inv,
            (None, None) => f64::NAN,
        }
    }
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    alpha: AlphaArg,
    #[arg(long = "Z", allow_negative_numbers = true)]
    z: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    m: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long = "N", default_value_t = 1)]
    n: u64,
    #[arg(long = "K", default_value_t = 1)]
    k: u64,
    /// Evaluate at this epsilon instead of the optimum.
    #[arg(long, conflicts_with = "optimize_eps", allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Choose epsilon maximizing the bound (the default).
    #[arg(long)]
    optimize_eps: bool,
    /// Use the printed kappa floor 64.5.
    #[arg(long)]
    paper_mode: bool,
}

#[derive(Args, Debug)]
struct MaxzArgs {
    #[command(flatten)]
    alpha: AlphaArg,
    #[arg(long)]
    paper_mode: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long)]
    alpha_min: f64,
    #[arg(long)]
    alpha_max: f64,
    /// Grid points, endpoints included.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Cap on the Z search.
    #[arg(long, default_value_t = 1_000_000)]
    z_max: u64,
    #[arg(long)]
    paper_mode: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ProjectorArg {
    Free,
    Dressed,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FieldArg {
    Classical,
    Quantized,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

impl YesNo {
    fn get(self) -> bool {
        matches!(self, YesNo::Yes)
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long, value_enum)]
    projector: ProjectorArg,
    #[arg(long, value_enum)]
    field: FieldArg,
    #[arg(long, value_enum)]
    cutoff: YesNo,
    #[arg(long, value_enum)]
    coulomb: YesNo,
    #[command(flatten)]
    alpha: AlphaArg,
    #[arg(long = "Z", default_value_t = 1.0, allow_negative_numbers = true)]
    z: f64,
    #[arg(long = "N", default_value_t = 1)]
    n: u64,
    #[arg(long = "K", default_value_t = 1)]
    k: u64,
    /// Coupling above which the dressed projector still fails.
    #[arg(long)]
    alpha_c: Option<f64>,
    #[arg(long)]
    paper_mode: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite names separated by commas, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the pass tolerance of every selected suite.
    #[arg(long)]
    tol: Option<f64>,
    /// Omit per-trial records from the output.
    #[arg(long)]
    summary: bool,
}

#[derive(Serialize)]
struct MaxzOut {
    alpha: f64,
    #[serde(rename = "max_Z")]
    max_z: u64,
    paper_mode: bool,
}

#[derive(Serialize)]
struct VerifyOut {
    pass: bool,
    suites: Vec<SuiteReport>,
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let code = match &f {
                Failure::Usage(m) => {
                    eprintln!("error: {m}");
                    EXIT_USAGE
                }
                Failure::Core(e) => {
                    eprintln!("error: {e}");
                    match e {
                        Error::Domain(_) | Error::Precondition(_) => EXIT_USAGE,
                        Error::Infeasible(_) => EXIT_NEGATIVE,
                        Error::Resource(_) => EXIT_FAIL,
                    }
                }
                Failure::Io(e) => {
                    eprintln!("error: {e}");
                    EXIT_FAIL
                }
            };
            ExitCode::from(code)
        }
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), Failure> {
    let jobs = match jobs {
        Some(j) => Some(j),
        None => match std::env::var("QSE_JOBS") {
            Ok(s) => Some(
                s.trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("QSE_JOBS must be a count, got '{s}'")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_jobs(cli.jobs)?;
    let out = cli.output.as_deref();
    match cli.command {
        Command::Certify(a) => {
            let params = PhysicalParams::new(a.alpha.value(), a.z, a.m, a.lambda, a.n, a.k)?;
            let cert = certify(&params, a.eps, a.paper_mode)?;
            output::emit(&output::to_canonical_json(&cert)?, out)?;
            Ok(if cert.feasible {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Maxz(a) => {
            let alpha = a.alpha.value();
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Failure::Usage(format!("alpha must be > 0, got {alpha}")));
            }
            let res = MaxzOut {
                alpha,
                max_z: max_z(alpha, a.paper_mode),
                paper_mode: a.paper_mode,
            };
            output::emit(&output::to_canonical_json(&res)?, out)?;
            Ok(EXIT_OK)
        }
        Command::Phase(a) => {
            let grid = linear_grid(a.alpha_min, a.alpha_max, a.steps)?;
            let rows = phase_scan(&grid, a.z_max, a.paper_mode)?;
            let text = match a.format {
                Format::Csv => output::to_csv(&rows)?,
                Format::Json => output::to_canonical_json(&rows)?,
            };
            output::emit(&text, out)?;
            Ok(EXIT_OK)
        }
        Command::Classify(a) => {
            let variant = ModelVariant {
                projector: match a.projector {
                    ProjectorArg::Free => Projector::FreeD0,
                    ProjectorArg::Dressed => Projector::DressedDA,
                },
                field: match a.field {
                    FieldArg::Classical => FieldModel::Classical,
                    FieldArg::Quantized => FieldModel::Quantized,
                },
                cutoff: a.cutoff.get(),
                coulomb: a.coulomb.get(),
            };
            let input = ClassifyInput {
                alpha_c: a.alpha_c,
                paper_mode: a.paper_mode,
                ..ClassifyInput::new(a.alpha.value(), a.z, a.n, a.k)
            };
            let v = classify(variant, &input)?;
            output::emit(&output::to_canonical_json(&v)?, out)?;
            Ok(if v.kind.is_unstable() {
                EXIT_NEGATIVE
            } else {
                EXIT_OK
            })
        }
        Command::Verify(a) => {
            let suites = parse_suites(&a.suite)?;
            let mut reports = Vec::with_capacity(suites.len());
            for s in suites {
                let mut r = run_suite(s, a.trials, a.seed, a.tol)?;
                eprintln!(
                    "{}: {} trials, {} failed, worst margin {:e}{}",
                    s,
                    r.trials,
                    r.failed,
                    r.worst_margin,
                    if r.hard { "" } else { " (diagnostic)" }
                );
                if a.summary {
                    r.records.clear();
                }
                reports.push(r);
            }
            let pass = reports.iter().all(|r| r.pass);
            output::emit(
                &output::to_canonical_json(&VerifyOut {
                    pass,
                    suites: reports,
                })?,
                out,
            )?;
            Ok(if pass { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn parse_suites(spec: &str) -> Result<Vec<Suite>, Failure> {
    if spec == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in spec.split(',').map(str::trim) {
        let s: Suite = name
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// `steps` points from `lo` to `hi` inclusive.
fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(Failure::Usage(format!(
            "need 0 < alpha-min <= alpha-max, got {lo}, {hi}"
        )));
    }
    match steps {
        0 => Err(Failure::Usage("--steps must be >= 1".into())),
        1 => Ok(vec![lo]),
        _ => {
            let d = (hi - lo) / (steps - 1) as f64;
            Ok((0..steps)
                .map(|i| {
                    if i + 1 == steps {
                        hi
                    } else {
                        lo + d * i as f64
                    }
                })
                .collect())
        }
    }
}
