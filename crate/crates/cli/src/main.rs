//! Command-line driver.
//!
//! Problems are JSON files (see the repository README for the schema).
//! Exit codes: 0 on success, 2 when a mathematical precondition is
//! violated or a certification check fails, 1 on operational failures
//! (I/O, parsing, iteration budgets). Every long flag can also be set
//! through an environment variable with the `POLARFORM_` prefix.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use polarform::io::{self, MatrixData, Problem, ToleranceOverrides};
use polarform::matfunc::{self, SignFunctionSpec};
use polarform::polar::{self, PolarFactors};
use polarform::{ComplexMatrix, Error, Result};

#[derive(Parser)]
#[command(
    name = "polarform",
    version,
    about = "Polar decompositions F = W S in scalar product spaces",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Residual tolerance for matrix equality checks
    #[arg(long, global = true, env = "POLARFORM_TOL_EQ")]
    tol_eq: Option<f64>,

    /// Spectrum classification band (relative to the matrix norm)
    #[arg(long, global = true, env = "POLARFORM_TOL_CLASS")]
    tol_class: Option<f64>,

    /// Singularity threshold on sigma_min / sigma_max
    #[arg(long, global = true, env = "POLARFORM_TOL_SING")]
    tol_sing: Option<f64>,

    /// Write a JSON result file to this path
    #[arg(long, global = true, env = "POLARFORM_OUTPUT")]
    output: Option<PathBuf>,

    /// Suppress all non-error output
    #[arg(long, global = true, env = "POLARFORM_QUIET")]
    quiet: bool,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file (JSON)
    problem: PathBuf,

    /// Override the problem's form kind
    /// (real_bilinear | complex_bilinear | sesquilinear)
    #[arg(long)]
    form: Option<String>,

    /// Override the problem's stem selection (sign1 | sign2 | sign3)
    #[arg(long)]
    sign: Option<String>,

    /// Override the problem's side (right | left)
    #[arg(long)]
    side: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Factor F = W S (or F = S' W') and certify the result
    Decompose(ProblemArgs),

    /// Re-check the factors in an existing report against the problem
    Certify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Report file produced by `decompose --output`
        report: PathBuf,
    },

    /// Generalized matrix sign of F
    Sign(ProblemArgs),

    /// Principal square root of F
    Sqrt(ProblemArgs),

    /// (M,N)-adjoint of F and the double-adjoint residual
    Adjoint(ProblemArgs),
}

fn load_problem(args: &ProblemArgs, overrides: &ToleranceOverrides) -> Result<Problem> {
    let mut file = io::read_problem(&args.problem)?;
    if let Some(form) = &args.form {
        file.form = form.clone();
    }
    if let Some(sign) = &args.sign {
        file.sign_function = sign.clone();
    }
    if let Some(side) = &args.side {
        file.side = Some(side.clone());
    }
    file.into_problem(overrides)
}

fn format_entry(z: Complex64) -> String {
    format!("{:>12.6}{:>+12.6}i", z.re, z.im)
}

fn print_matrix(name: &str, a: &ComplexMatrix) {
    println!("{name} ({}x{}):", a.rows(), a.cols());
    for r in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|c| format_entry(a[(r, c)])).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn write_json(path: &PathBuf, value: &serde_json::Value) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Runs one subcommand; `Ok(true)` means all checks passed.
fn run(cli: &Cli) -> Result<bool> {
    let overrides = ToleranceOverrides {
        tol_eq: cli.tol_eq,
        tol_class: cli.tol_class,
        tol_sing: cli.tol_sing,
    };
    match &cli.command {
        Command::Decompose(args) => {
            let problem = load_problem(args, &overrides)?;
            let factors = polar::decompose(
                &problem.f,
                &problem.pair,
                &problem.spec,
                problem.side,
                &problem.tolerances,
            )?;
            let report = polar::certify(
                &problem.f,
                &factors,
                &problem.pair,
                &problem.tolerances,
            )?;
            if !cli.quiet {
                print_matrix("W", &factors.w);
                print_matrix("S", &factors.s);
                print_matrix("Sigma", &factors.sigma);
                print_certification(&report);
            }
            if let Some(path) = &cli.output {
                let file = io::build_report(
                    &factors,
                    &report,
                    problem.pair.form(),
                    &problem.tolerances,
                );
                io::write_report(path, &file)?;
            }
            Ok(report.pass)
        }
        Command::Certify { problem: args, report } => {
            let problem = load_problem(args, &overrides)?;
            let text = std::fs::read_to_string(report)?;
            let file: io::ReportFile = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", report.display())))?;
            let factors = PolarFactors {
                w: file.factors.w.to_matrix("factors.w")?,
                s: file.factors.s.to_matrix("factors.s")?,
                sigma: file.factors.sigma.to_matrix("factors.sigma")?,
                side: io::parse_side(&file.metadata.side)?,
                sign: SignFunctionSpec::Builtin(io::parse_sign(
                    &file.metadata.sign_function,
                )?),
                classification: Vec::new(),
            };
            let result = polar::certify(
                &problem.f,
                &factors,
                &problem.pair,
                &problem.tolerances,
            )?;
            if !cli.quiet {
                print_certification(&result);
            }
            if let Some(path) = &cli.output {
                let file = io::build_report(
                    &factors,
                    &result,
                    problem.pair.form(),
                    &problem.tolerances,
                );
                io::write_report(path, &file)?;
            }
            Ok(result.pass)
        }
        Command::Sign(args) => {
            let problem = load_problem(args, &overrides)?;
            let result = matfunc::generalized_sign(
                &problem.f,
                &problem.spec,
                &problem.tolerances,
            )?;
            if !cli.quiet {
                print_matrix("Sigma", &result.sigma);
                for cl in &result.classification {
                    println!(
                        "  lambda = {:.6e}{:+.6e}i  stem = {:.6e}{:+.6e}i  discontinuity distance = {:.3e}",
                        cl.value.re,
                        cl.value.im,
                        cl.stem_value.re,
                        cl.stem_value.im,
                        cl.discontinuity_distance
                    );
                }
            }
            if let Some(path) = &cli.output {
                write_json(
                    path,
                    &serde_json::json!({
                        "sigma": MatrixData::from_matrix(&result.sigma),
                        "eigenvalues": result
                            .classification
                            .iter()
                            .map(|c| serde_json::json!({
                                "value": [c.value.re, c.value.im],
                                "stem_value": [c.stem_value.re, c.stem_value.im],
                                "discontinuity_distance": c.discontinuity_distance,
                            }))
                            .collect::<Vec<_>>(),
                    }),
                )?;
            }
            Ok(true)
        }
        Command::Sqrt(args) => {
            let problem = load_problem(args, &overrides)?;
            let root = matfunc::principal_sqrt(&problem.f, &problem.tolerances)?;
            if !cli.quiet {
                print_matrix("sqrt(F)", &root);
            }
            if let Some(path) = &cli.output {
                write_json(
                    path,
                    &serde_json::json!({ "sqrt": MatrixData::from_matrix(&root) }),
                )?;
            }
            Ok(true)
        }
        Command::Adjoint(args) => {
            let problem = load_problem(args, &overrides)?;
            let adj = problem.pair.adjoint(&problem.f)?;
            let outcome = problem
                .pair
                .double_adjoint_holds(&problem.f, &problem.tolerances)?;
            if !cli.quiet {
                print_matrix("F^[M,N]", &adj);
                println!(
                    "double-adjoint residual = {:.3e} ({})",
                    outcome.residual,
                    if outcome.holds { "holds" } else { "violated" }
                );
            }
            if let Some(path) = &cli.output {
                write_json(
                    path,
                    &serde_json::json!({
                        "adjoint": MatrixData::from_matrix(&adj),
                        "double_adjoint_residual": outcome.residual,
                        "double_adjoint_holds": outcome.holds,
                    }),
                )?;
            }
            Ok(outcome.holds)
        }
    }
}

fn print_certification(report: &polar::CertificationReport) {
    for check in &report.checks {
        println!(
            "{:<28} residual = {:.3e}  threshold = {:.3e}  {}",
            check.name,
            check.residual,
            check.threshold,
            if check.pass { "PASS" } else { "FAIL" }
        );
    }
    println!("certification: {}", if report.pass { "PASS" } else { "FAIL" });
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_precondition_violation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
