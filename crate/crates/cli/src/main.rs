mod artifacts;
mod commands;

use clap::{Parser, ValueEnum};
use geotool_core::scenario::Scenario;
use geotool_core::GeoError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Energy and momentum densities and the dominant energy report.
    Constraints,
    /// Null expansions and trapped-surface classification.
    Surface,
    /// Jang equation solve with boundary and scalar-condition reports.
    Jang,
    /// Quasi-local masses and Liu-Yau margins.
    Masses,
    /// Dirac spectra and eigenvalue bound margins.
    Dirac,
    /// Every applicable check.
    Verify,
    /// Family table over one scenario parameter.
    Sweep,
}

#[derive(Debug, Parser)]
#[command(name = "geotool", version, about = "Quasi-local mass and trapped-surface toolkit")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    pub scenario: PathBuf,
    /// Directory for `<name>.report.json`, `<name>.table.csv` and `<name>.solution.bin`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the resolution used by the command.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Overrides the scenario tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// `name=a:b:n`; for `masses` only `r` is accepted.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Parameter of `sweep`: `r`, `c` or `M`.
    #[arg(long)]
    pub param: Option<String>,
    /// Range of `sweep`, `a:b:n`.
    #[arg(long)]
    pub range: Option<String>,
}

#[derive(Debug)]
pub enum Failure {
    Geo(GeoError),
    Io(String),
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        Failure::Geo(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Geo(e) => write!(f, "{e}"),
            Failure::Io(m) => f.write_str(m),
        }
    }
}

// 2 parse, 3 infeasible scenario, 4 solver failure
fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Io(_) | Failure::Geo(GeoError::Parse(_)) => 2,
        Failure::Geo(
            GeoError::NewtonDiverged(_)
            | GeoError::BlowUpSuspected { .. }
            | GeoError::SingularJacobian(_)
            | GeoError::NotConverged(_)
            | GeoError::ModeRangeInsufficient { .. },
        ) => 4,
        Failure::Geo(_) => 3,
    }
}

fn run(args: &Args) -> Result<bool, Failure> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", args.scenario.display())))?;
    let scenario = Scenario::from_json(&text).map_err(|e| match e {
        GeoError::Parse(m) => GeoError::Parse(format!("{}: {m}", args.scenario.display())),
        other => other,
    })?;
    let base = args.scenario.parent().map(PathBuf::from).unwrap_or_default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.max(1))
        .build()
        .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| commands::dispatch(args, scenario.clone(), &base))?;
    for c in &outcome.checks {
        println!("{} {}: {:e} >= {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.bound);
    }
    for s in &outcome.skipped {
        println!("SKIP {s}");
    }
    let written = artifacts::write(&args.out, &scenario.name, &outcome)?;
    let golden_ok = match std::env::var_os("GEOTOOL_GOLDEN_DIR") {
        Some(dir) => artifacts::compare_golden(&PathBuf::from(dir), &written)?,
        None => true,
    };
    Ok(outcome.pass() && golden_ok)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("geotool: {f}");
            ExitCode::from(exit_code(&f))
        }
    }
}
