//! `paraplex`: verification suites, coordinate converters and curvature queries.
//!
//! Exit codes: 0 all checks pass, 1 a check or computation failed, 2 usage, 3 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paraplex::config::{self, ConfigLoadError, GeometryConfig};
use paraplex::convert::{self, ConvertKind};
use paraplex::report::to_json_17;
use paraplex::suites::{self, SuiteError};
use paraplex::GeomError;

#[derive(Parser)]
#[command(name = "paraplex", version, about = "Curvature and structure verification for 4-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a JSON report.
    Verify {
        /// linespace, geodesic-spaces, products, planefields, pde, topology or all
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Multiplies every tolerance; recorded in the report.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// Convert line coordinates given as a JSON payload.
    Convert {
        /// xi-eta-to-conformal, conformal-to-xi-eta, points-to-pluecker or pluecker-to-conformal
        #[arg(long)]
        kind: String,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print the curvature package of a geometry at a point.
    Curvature {
        /// builtin name or path to a geometry config
        #[arg(long)]
        geometry: String,
        /// "a,b,c,d"
        #[arg(long)]
        point: String,
    },
}

enum Failure {
    Fail(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Fail(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Fail(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

fn geom_failure(e: GeomError) -> Failure {
    match e {
        GeomError::Config(m) => Failure::Usage(m),
        other => Failure::Fail(other.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_point(s: &str) -> Result<[f64; 4], Failure> {
    let v: Vec<f64> =
        s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| Failure::Usage(format!("--point: {e}")))?;
    v.try_into().map_err(|v: Vec<f64>| Failure::Usage(format!("--point needs 4 numbers, got {}", v.len())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify { suite, seed, out, tolerance_scale } => {
            let report = suites::run_suite(&suite, seed, tolerance_scale).map_err(|e| match e {
                SuiteError::UnknownSuite(_) | SuiteError::BadScale(_) => Failure::Usage(e.to_string()),
            })?;
            report.write(&out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
            for id in report.failed_ids() {
                eprintln!("FAIL {id}");
            }
            eprintln!("{}: {}/{} checks passed", report.suite, report.summary.passed, report.summary.total);
            Ok(report.exit_code() as u8)
        }
        Command::Convert { kind, input } => {
            let k = ConvertKind::parse(&kind).ok_or_else(|| {
                let known: Vec<_> = ConvertKind::ALL.iter().map(|k| k.name()).collect();
                Failure::Usage(format!("unknown kind `{kind}` (known: {})", known.join(", ")))
            })?;
            let payload = serde_json::from_str(&read(&input)?).map_err(|e| Failure::Usage(format!("payload: {e}")))?;
            let out = convert::convert(k, payload).map_err(geom_failure)?;
            print!("{}", to_json_17(&out));
            Ok(0)
        }
        Command::Curvature { geometry, point } => {
            let p = parse_point(&point)?;
            let geo = if config::BUILTINS.contains(&geometry.as_str()) {
                config::builtin(&geometry).map_err(geom_failure)?
            } else {
                let cfg = GeometryConfig::load(Path::new(&geometry)).map_err(|e| match e {
                    ConfigLoadError::Io(m) => Failure::Io(m),
                    ConfigLoadError::Invalid(g) => geom_failure(g),
                })?;
                cfg.build().map_err(geom_failure)?
            };
            let q = config::curvature_query(&geo, &p).map_err(geom_failure)?;
            print!("{}", to_json_17(&q));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
