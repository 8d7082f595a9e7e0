//! `petrov`: Weyl operators, annihilators and Petrov types from the
//! command line.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use petrov_core::ErrorClass;

#[derive(Parser, Debug)]
#[command(name = "petrov", version, about = "Weyl curvature, annihilating vectors and Petrov types of 4-metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weyl operator of a chart at a point, with its blocks and residuals.
    Weyl(RunArgs),
    /// Unit vectors T with W(T,·,·,T) = 0.
    SolveT(RunArgs),
    /// Petrov type of the Lorentzian partner defined by an annihilating T.
    Classify(RunArgs),
    /// Spacelike critical planes of the Lorentzian quadratic form.
    CriticalPoints(RunArgs),
    /// Berger–Thorpe normal form of the Weyl operator.
    NormalForm(RunArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Chart document to read.
    #[arg(long, conflicts_with_all = ["builtin", "fixture", "params"])]
    pub chart: Option<std::path::PathBuf>,
    /// Builtin chart: flat, paper-example, product(c1,c2), space-form(k), lorentz-flat.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Lorentzian normal-form fixture of the given Petrov type (I, D, II, N, III, O).
    #[arg(long, conflicts_with_all = ["builtin", "params"])]
    pub fixture: Option<String>,
    /// Riemannian normal form `λ1,λ2,λ3,μ1,μ2,μ3`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "builtin")]
    pub params: Option<String>,
    /// Evaluation point `r,x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Vector field T as four expressions in the chart coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance of the structural checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Also run the multistart search oracle (critical-points).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// paper-example, corollary, exclusion, bridge, normal-form or all.
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of the full sample sizes.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Run on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    /// Printed, but some eigenstructure decision was borderline.
    Borderline,
    /// A suite failed.
    Failed,
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Parse => 2,
        ErrorClass::Domain => 3,
        ErrorClass::Contract => 4,
        ErrorClass::Borderline => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Weyl(a) => commands::weyl(a),
        Command::SolveT(a) => commands::solve_t(a),
        Command::Classify(a) => commands::classify(a),
        Command::CriticalPoints(a) => commands::critical_points(a),
        Command::NormalForm(a) => commands::normal_form(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Borderline) => ExitCode::from(5),
        Ok(Status::Failed) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
