//! `acvar`: run convergence experiments, algebraic suites, Jacobi spectra
//! and the finite-difference oracle from the command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acvar_core::lab::report::{oracle_csv, spectrum_csv, write_text};
use acvar_core::lab::suites::{AlgebraicSuites, MIN_EXPANSION_SLOPE};
use acvar_core::lab::{algebraic_suites, emit, oracle_matrix, run_experiment, ExperimentConfig, ExperimentKind, Format, OracleOptions};
use acvar_core::sharp::{jacobi_spectrum, SpectrumKind, SpectrumReport};
use acvar_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "acvar", version, about = "Inner variations of the Allen-Cahn and area functionals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy convergence to 2mσ times the area.
    Energy(RunArgs),
    /// First inner variation convergence.
    FirstVar(RunArgs),
    /// Second inner variation against the predicted limit.
    SecondVar(RunArgs),
    /// Energy measure pairings against scalar test functions.
    Measure(RunArgs),
    /// Stress pairings against vector test fields.
    Stress(RunArgs),
    /// Equipartition defect.
    Equipartition(RunArgs),
    /// Second inner variation with the discrepancy gap check.
    Discrepancy(RunArgs),
    /// Stacked layers: energy ratio and second variation.
    Multiplicity(RunArgs),
    /// Run the experiment named by `kind` in the config file.
    Run(RunArgs),
    /// Frame identities and expansion residual suites.
    Identities(SuiteArgs),
    /// Jacobi spectrum of a round circle or sphere.
    Spectrum(SpectrumArgs),
    /// Finite-difference oracle matrix.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config `output` key, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    kind: ShapeArg,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Highest Fourier or spherical-harmonic degree in the basis.
    #[arg(long, default_value_t = 8)]
    max_mode: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Skip the first-order comparisons.
    #[arg(long)]
    second_order_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Human,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Human => Format::Human,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Circle,
    Sphere,
}

/// Exit status: 0 when every verdict passes, 1 when one fails, 2 for
/// configuration and I/O errors.
enum Outcome {
    Verdict(bool),
    Failed(Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Outcome::Verdict(true) => ExitCode::SUCCESS,
        Outcome::Verdict(false) => ExitCode::from(1),
        Outcome::Failed(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Outcome {
    let result = match command {
        Command::Energy(a) => run(Some(ExperimentKind::Energy), a),
        Command::FirstVar(a) => run(Some(ExperimentKind::FirstVar), a),
        Command::SecondVar(a) => run(Some(ExperimentKind::SecondVar), a),
        Command::Measure(a) => run(Some(ExperimentKind::Measure), a),
        Command::Stress(a) => run(Some(ExperimentKind::Stress), a),
        Command::Equipartition(a) => run(Some(ExperimentKind::Equipartition), a),
        Command::Discrepancy(a) => run(Some(ExperimentKind::Discrepancy), a),
        Command::Multiplicity(a) => run(Some(ExperimentKind::Multiplicity), a),
        Command::Run(a) => run(None, a),
        Command::Identities(a) => identities(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(passed) => Outcome::Verdict(passed),
        Err(e) => Outcome::Failed(e),
    }
}

fn deliver(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(kind: Option<ExperimentKind>, args: RunArgs) -> Result<bool, Error> {
    let config = ExperimentConfig::from_path(&args.config)?;
    let kind = match (kind, config.kind) {
        (Some(cli), Some(file)) if cli != file => {
            return Err(Error::Configuration(format!("config declares kind '{file}' but '{cli}' was requested")));
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(Error::Configuration("config has no 'kind' key".into())),
    };
    let report = run_experiment(kind, &config)?;
    let out = args.out.or_else(|| config.output.clone());
    deliver(out.as_deref(), &emit(&report, args.format.into()))?;
    Ok(report.passed())
}

fn suites_text(s: &AlgebraicSuites) -> String {
    let mut out = String::from("suite,label,value\n");
    for (dim, suite) in [(2, &s.identities_2d), (3, &s.identities_3d)] {
        for (label, r) in &suite.max_residuals {
            let _ = writeln!(out, "identity_{dim}d,{label},{r:.16e}");
        }
    }
    for (dim, e) in [(2, &s.expansions_2d), (3, &s.expansions_3d)] {
        let _ = writeln!(out, "expansion_{dim}d,det_min_slope,{:.16e}", e.det_min_slope);
        let _ = writeln!(out, "expansion_{dim}d,det_below_{MIN_EXPANSION_SLOPE},{}", e.det_below);
        let _ = writeln!(out, "expansion_{dim}d,inverse_min_slope,{:.16e}", e.inverse_min_slope);
        let _ = writeln!(out, "expansion_{dim}d,inverse_below_{MIN_EXPANSION_SLOPE},{}", e.inverse_below);
    }
    let _ = writeln!(out, "timing,elapsed_seconds,{:.6e}", s.elapsed.as_secs_f64());
    out
}

fn identities(args: SuiteArgs) -> Result<bool, Error> {
    let suites = algebraic_suites(args.seed)?;
    deliver(args.out.as_deref(), &suites_text(&suites))?;
    Ok(suites.passed())
}

fn spectrum_human(report: &SpectrumReport) -> String {
    let mut out = String::new();
    for c in &report.clusters {
        let _ = writeln!(out, "lambda = {:>14.9}  multiplicity {}", c.value, c.multiplicity);
    }
    let _ = writeln!(out, "morse_index {}  nullity {}", report.morse_index, report.nullity);
    out
}

fn spectrum(args: SpectrumArgs) -> Result<bool, Error> {
    let kind = match args.kind {
        ShapeArg::Circle => SpectrumKind::Circle { radius: args.radius },
        ShapeArg::Sphere => SpectrumKind::Sphere { radius: args.radius },
    };
    let report = jacobi_spectrum(kind, args.max_mode)?;
    let text = match args.format {
        FormatArg::Csv => spectrum_csv(&report),
        FormatArg::Human => spectrum_human(&report),
    };
    deliver(args.out.as_deref(), &text)?;
    let expected = SpectrumReport::closed_form(kind, args.max_mode);
    let matches = expected.len() == report.clusters.len()
        && expected
            .iter()
            .zip(&report.clusters)
            .all(|(e, c)| e.multiplicity == c.multiplicity && (e.value - c.value).abs() <= SPECTRUM_TOLERANCE * e.value.abs().max(1.0));
    Ok(matches)
}

/// Agreement required between the Galerkin and closed-form eigenvalues.
const SPECTRUM_TOLERANCE: f64 = 1e-8;

fn oracle(args: OracleArgs) -> Result<bool, Error> {
    let options = OracleOptions { seed: args.seed, include_first_order: !args.second_order_only, ..Default::default() };
    let rows = oracle_matrix(&options)?;
    deliver(args.out.as_deref(), &oracle_csv(&rows))?;
    Ok(rows.iter().all(|r| r.passed()))
}
