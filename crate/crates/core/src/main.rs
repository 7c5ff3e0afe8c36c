use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rocn_core::construct::{build_self_testing_matrix_capped, preset, Preset, MAX_CONSTRUCT_M};
use rocn_core::report::{certify, exit, exit_code, CertifyOptions, VerifyReport};
use rocn_core::rocn::{MatrixFile, DEFAULT_TOLERANCE};
use rocn_core::selftest::DEFAULT_RANK_THRESHOLD;
use rocn_core::strategy::diagnose_capped;
use rocn_core::Error;

#[derive(Parser)]
#[command(
    name = "rocn",
    version,
    about = "Build and certify ROCN Bell inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    Chsh,
    Elegant,
}

impl From<PresetName> for Preset {
    fn from(p: PresetName) -> Self {
        match p {
            PresetName::Chsh => Preset::Chsh,
            PresetName::Elegant => Preset::Elegant,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the m x m(m+1) self-testing matrix for even m
    Construct {
        #[arg(long)]
        m: usize,
        /// Drop the identity block O^(0) (n = m^2)
        #[arg(long)]
        omit_identity_block: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a matrix and run every self-testing check on it
    Certify {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Relative singular-value cutoff for the moment-matrix rank
        #[arg(long, default_value_t = DEFAULT_RANK_THRESHOLD)]
        rank_threshold: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check that the canonical strategy attains the quantum bound
    Verify {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write a named preset matrix
    Preset {
        #[arg(value_enum)]
        name: PresetName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Size guard for constructions and strategies, overridable with `ROCN_MAX_M`.
fn max_m() -> Result<usize, String> {
    match std::env::var("ROCN_MAX_M") {
        Ok(v) => v
            .parse()
            .map_err(|_| format!("ROCN_MAX_M must be a positive integer, got `{v}`")),
        Err(_) => Ok(MAX_CONSTRUCT_M),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    Err(format!("cannot write stdout: {e}"))
                }
                _ => Ok(()),
            }
        }
    }
}

fn read_matrix(path: &Path) -> Result<MatrixFile, (i32, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| (exit::INPUT, format!("cannot read {}: {e}", path.display())))?;
    MatrixFile::parse(&text).map_err(|e| (exit::INPUT, e.to_string()))
}

fn fail(err: &Error) -> (i32, String) {
    let msg = match err {
        Error::MustBeEven(_) | Error::OddM(_) => format!("m must be even: {err}"),
        _ => err.to_string(),
    };
    (exit_code(err), msg)
}

fn run(cli: Cli) -> Result<i32, (i32, String)> {
    let max_m = max_m().map_err(|e| (exit::INPUT, e))?;
    match cli.command {
        Command::Construct {
            m,
            omit_identity_block,
            out,
        } => {
            let h = build_self_testing_matrix_capped(m, !omit_identity_block, max_m)
                .map_err(|e| fail(&e))?;
            emit(&h.to_json(), out.as_deref()).map_err(|e| (exit::INPUT, e))?;
            Ok(exit::OK)
        }
        Command::Preset { name, out } => {
            let h = preset(name.into());
            emit(&h.to_json(), out.as_deref()).map_err(|e| (exit::INPUT, e))?;
            Ok(exit::OK)
        }
        Command::Certify {
            matrix,
            tolerance,
            rank_threshold,
            format,
        } => {
            let file = read_matrix(&matrix)?;
            let options = CertifyOptions {
                tolerance,
                rank_threshold,
                max_m,
            };
            let report = certify(&file, options).map_err(|e| fail(&e))?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(text.trim_end(), None).map_err(|e| (exit::INPUT, e))?;
            Ok(if report.rocn.valid {
                exit::OK
            } else {
                exit::NOT_ROCN
            })
        }
        Command::Verify {
            matrix,
            tolerance,
            format,
        } => {
            let file = read_matrix(&matrix)?;
            if file.m % 2 == 1 {
                return Err(fail(&Error::OddM(file.m)));
            }
            let label = file.label.clone();
            let h = file.into_rocn(tolerance).map_err(|e| fail(&e))?;
            let diag = diagnose_capped(&h, max_m).map_err(|e| fail(&e))?;
            let report = VerifyReport::new(&label, h.m(), h.n(), &diag, tolerance);
            let text = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(text.trim_end(), None).map_err(|e| (exit::INPUT, e))?;
            Ok(if report.passed {
                exit::OK
            } else {
                exit::VERIFICATION
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
