use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod args;
mod commands;

use args::Common;

#[derive(Debug, Parser)]
#[command(name = "walkzeta", version, about = "Zeta functions, Ronkin functions and amoebas of walks on tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Finite-torus zeta function over a u-grid.
    Zeta(Common),
    /// Logarithmic zeta function by quadrature, with the closed form when known.
    Logzeta(Common),
    /// Trace moments C_r on the finite and infinite torus.
    Cr(Common),
    /// Ronkin function over an x-grid.
    Ronkin(Common),
    /// Logarithmic zeta function against the Ronkin function at the origin.
    Correspond(Common),
    /// Amoeba point cloud, raster and complement components.
    Amoeba(Common),
    /// Tropical hypersurface and duality report.
    Tropical(Common),
    /// Newton polytope.
    Newton(Common),
    /// Walk evolution: state or measure dumps.
    Simulate(Common),
    /// Runs the invariant suite; exit status 0 iff every check passes.
    Verify(Common),
}

pub enum CliError {
    Config(String),
    Core(walkzeta::error::Error),
    /// Some invariant checks failed.
    Checks(Vec<String>),
}

impl From<walkzeta::error::Error> for CliError {
    fn from(e: walkzeta::error::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use walkzeta::error::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Checks(_) => 1,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Pole { .. } | E::Degenerate(_) => 3,
                E::Accuracy { .. } => 4,
                _ => 2,
            },
        }
    }

    fn to_json(&self) -> String {
        let v = match self {
            CliError::Config(m) => serde_json::json!({"error": "config", "message": m}),
            CliError::Checks(ids) => serde_json::json!({"error": "verify", "failed": ids}),
            CliError::Core(e) => {
                let mut v = serde_json::json!({"error": e.kind(), "message": e.to_string()});
                if let walkzeta::error::Error::Accuracy { nodes, delta, singular, .. } = e {
                    v["nodes"] = (*nodes).into();
                    v["delta"] = serde_json::Value::from(*delta);
                    v["singular"] = (*singular).into();
                }
                v
            }
        };
        v.to_string()
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(s) = std::env::var("RZ_THREADS") {
        let n: usize = s
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("RZ_THREADS must be a positive integer, got {s:?}")))?;
        if n == 0 {
            return Err(CliError::Config("RZ_THREADS must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (out, c) = match &cli.command {
        Command::Zeta(c) => (commands::zeta(c)?, c),
        Command::Logzeta(c) => (commands::logzeta(c)?, c),
        Command::Cr(c) => (commands::cr(c)?, c),
        Command::Ronkin(c) => (commands::ronkin(c)?, c),
        Command::Correspond(c) => (commands::correspond(c)?, c),
        Command::Amoeba(c) => (commands::amoeba(c)?, c),
        Command::Tropical(c) => (commands::tropical(c)?, c),
        Command::Newton(c) => (commands::newton(c)?, c),
        Command::Simulate(c) => (commands::simulate(c)?, c),
        Command::Verify(c) => {
            let (text, failed) = commands::verify(c)?;
            emit(&text, c)?;
            return if failed.is_empty() { Ok(()) } else { Err(CliError::Checks(failed)) };
        }
    };
    emit(&out, c)
}

fn emit(text: &str, c: &Common) -> Result<(), CliError> {
    match &c.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::Config(first.to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
