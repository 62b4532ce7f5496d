use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use cod_core::analysis::{bounds, structural_report};
use cod_core::design::{verify_numeric, verify_symbolic, CodMatrix, NUMERIC_GENERATOR};
use cod_core::equivalence::{canonicalize, equivalent, scramble};
use cod_core::generator::{build_extension_system, construct_g, extend_g, ExtensionResult, MAX_M};
use cod_core::io::{
    export, read_certificate, read_design, write_certificate, write_design, write_op_log,
    ExportFormat,
};
use cod_core::oracle::{
    enumerate_cods, OracleError, Placement, SearchSpec, BUDGET_ENV, DEFAULT_BUDGET,
};

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cod",
    version,
    about = "Maximum-rate, minimum-delay complex orthogonal designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the explicit design G_{2m-1}.
    Generate {
        #[arg(short)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check orthogonality of a design, or re-validate a nonexistence certificate.
    Verify {
        #[arg(required_unless_present = "certificate")]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        certificate: Option<PathBuf>,
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Canonical form of a [C(2m,m-1), 2m-1, C(2m-1,m-1)] design.
    Canonicalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether two designs are equivalent.
    Equivalent { a: PathBuf, b: PathBuf },
    /// Try to append one more orthogonal column to G_{2m-1}.
    Extend {
        #[arg(short)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Maximal rate and minimal delay for n antennas.
    Bounds {
        #[arg(short)]
        n: usize,
    },
    /// Apply random equivalence operations.
    Scramble {
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Structural checks: zero patterns and block shape.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Render a design with variables numbered z1..zk.
    Export {
        file: PathBuf,
        #[arg(long)]
        format: ExportFormat,
    },
    /// Exhaustively enumerate tiny designs and count equivalence classes.
    Enumerate {
        #[arg(short)]
        p: usize,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        /// Search every cell instead of the construction's support.
        #[arg(long)]
        free: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Invalid(anyhow::Error),
}

type Outcome = Result<u8, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

fn load_design(path: &Path) -> Result<CodMatrix, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(invalid)?;
    read_design(&text)
        .with_context(|| path.display().to_string())
        .map_err(invalid)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(usage),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_m(m: usize) -> Result<(), Failure> {
    if m == 0 || m > MAX_M {
        Err(usage(anyhow!("m must be between 1 and {MAX_M}")))
    } else {
        Ok(())
    }
}

fn verify_certificate(path: &Path) -> Outcome {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(invalid)?;
    let (m, cert) = read_certificate(&text)
        .with_context(|| path.display().to_string())
        .map_err(invalid)?;
    check_m(m)?;
    let g = construct_g(m).map_err(usage)?;
    let system = build_extension_system(&g).map_err(usage)?;
    match cert.check(Some(&system)) {
        Ok(()) => {
            println!(
                "certificate valid: {} constraints of the m = {m} extension system, parity sum 1",
                cert.cycle.len()
            );
            Ok(0)
        }
        Err(e) => {
            println!("certificate invalid: {e}");
            Ok(EXIT_FALSE)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Generate { m, output } => {
            check_m(m)?;
            let g = construct_g(m).map_err(usage)?;
            emit(&write_design(&g), output.as_deref())?;
            Ok(0)
        }
        Command::Verify {
            file,
            certificate,
            numeric,
            trials,
            seed,
            tol,
        } => {
            if let Some(cert) = certificate {
                return verify_certificate(&cert);
            }
            let cod = load_design(file.as_deref().expect("required by clap"))?;
            let report = verify_symbolic(&cod);
            print!("{report}");
            let mut ok = report.ok;
            if numeric {
                let n = verify_numeric(&cod, trials, seed, tol);
                println!(
                    "numeric: {} trials, seed {}, generator {NUMERIC_GENERATOR}, max residual {:.3e} (tol {tol:e}): {}",
                    n.trials,
                    n.seed,
                    n.max_residual,
                    if n.ok { "ok" } else { "FAIL" }
                );
                ok &= n.ok;
            }
            Ok(if ok { 0 } else { EXIT_FALSE })
        }
        Command::Canonicalize { file, output } => {
            let cod = load_design(&file)?;
            let canon = canonicalize(&cod).map_err(invalid)?;
            emit(&write_design(&canon), output.as_deref())?;
            Ok(0)
        }
        Command::Equivalent { a, b } => {
            let (a, b) = (load_design(&a)?, load_design(&b)?);
            let same = equivalent(&a, &b).map_err(invalid)?;
            println!("{same}");
            Ok(if same { 0 } else { EXIT_FALSE })
        }
        Command::Extend {
            m,
            output,
            certificate,
        } => {
            check_m(m)?;
            match extend_g(m).map_err(usage)? {
                ExtensionResult::Column {
                    column,
                    solution_count_log2,
                    ..
                } => {
                    let g = construct_g(m).map_err(usage)?;
                    let ext = g.with_column(&column).map_err(usage)?;
                    eprintln!(
                        "extension exists: [{}, {}, {}], 2^{solution_count_log2} sign choices",
                        ext.p(),
                        ext.n(),
                        ext.k()
                    );
                    emit(&write_design(&ext), output.as_deref())?;
                    Ok(0)
                }
                ExtensionResult::Certificate(cert) => {
                    eprintln!(
                        "no extension for m = {m}: inconsistent cycle of {} constraints",
                        cert.cycle.len()
                    );
                    emit(&write_certificate(m, &cert), certificate.as_deref())?;
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::Bounds { n } => {
            let report = bounds(n).map_err(usage)?;
            print!("{report}");
            Ok(0)
        }
        Command::Scramble {
            file,
            seed,
            count,
            output,
            log,
        } => {
            let cod = load_design(&file)?;
            let (out, ops) = scramble(&cod, seed, count).map_err(usage)?;
            eprintln!("scrambled with seed {seed}, {count} operations");
            emit(&write_design(&out), output.as_deref())?;
            if let Some(log) = log {
                emit(&write_op_log(&ops), Some(&log))?;
            }
            Ok(0)
        }
        Command::Analyze { file, json } => {
            let cod = load_design(&file)?;
            let report = structural_report(&cod);
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print!("{report}");
            }
            Ok(if report.all_pass() { 0 } else { EXIT_FALSE })
        }
        Command::Export { file, format } => {
            let cod = load_design(&file)?;
            print!("{}", export(&cod, format));
            Ok(0)
        }
        Command::Enumerate {
            p,
            n,
            k,
            free,
            budget,
        } => {
            let budget = match budget {
                Some(b) => b,
                None => match std::env::var(BUDGET_ENV) {
                    Ok(v) => v
                        .trim()
                        .parse()
                        .with_context(|| format!("{BUDGET_ENV} must be an integer"))
                        .map_err(usage)?,
                    Err(_) => DEFAULT_BUDGET,
                },
            };
            let placement = if free {
                Placement::Free
            } else {
                Placement::Forced
            };
            let spec = SearchSpec::new(p, n, k, placement).with_budget(budget);
            let result = enumerate_cods(&spec).map_err(|e| match e {
                OracleError::Canonical(_) => invalid(e),
                _ => usage(e),
            })?;
            println!(
                "[{p}, {n}, {k}] {}: {} candidates, {} valid, {} classes",
                if free { "free" } else { "forced" },
                result.candidates,
                result.valid,
                result.classes.len()
            );
            for (i, class) in result.classes.iter().enumerate() {
                println!("class {} ({} members):", i + 1, class.members);
                print!("{}", class.key);
            }
            Ok(if result.classes.is_empty() {
                EXIT_FALSE
            } else {
                0
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("invalid input: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
