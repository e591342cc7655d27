//! The `rnd` command line: generate, solve, verify, report.
//!
//! Results go to stdout as JSON (tables for `report`); failures go to
//! stderr as `{"error": kind, "message": text}`. Exit codes are 0 on
//! success, 1 when a check fails or the instance has no solution, 2 for
//! usage and input errors, 3 when a solver budget runs out.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::gadgets::{gen_gamma, gen_hose, gen_two_path, parse_dimacs, CnfFormula};
use crate::harness::{
    check_cut, check_dichotomy, check_lagrange_gap, check_static_machinery, default_alphas, size_report,
};
use crate::model::{validate, Graph, Instance};
use crate::rational::Rational;
use crate::robust::{
    cong_dynamic, cong_lagrange, cong_one_path, cong_static, lin_dynamic, lin_static, uniform_lambda, ExactOracle,
    ReservationOracle, ScaledOracle, DEFAULT_MAX_ITERS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rnd", version, about = "Robust network design under polyhedral demand uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated instance as JSON.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve one problem on an instance.
    Solve(SolveArgs),
    /// Run a verification check; exits 0 iff every assertion holds.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Size metrics of one or more instances.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Out {
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Formula {
    /// DIMACS CNF file with three literals per clause.
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    rho: Rational,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// The recursive gadget `G_γ`.
    Gamma {
        #[command(flatten)]
        formula: Formula,
        #[arg(long, default_value_t = 1)]
        gamma: u32,
        #[command(flatten)]
        out: Out,
    },
    /// The two-path gadget.
    Twopath {
        #[command(flatten)]
        formula: Formula,
        #[command(flatten)]
        out: Out,
    },
    /// Symmetric hose set over all node pairs of a graph.
    Hose {
        /// Graph JSON (`node_count`, `edges`).
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated per-node bounds.
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<Rational>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    CongDyn,
    CongStatic,
    CongLagrange,
    LinDyn,
    LinStatic,
    CongOnePath,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(value_enum)]
    problem: Problem,
    input: PathBuf,
    /// Comma-separated edge costs; uniform over finite edges when omitted.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<Rational>>,
    /// Approximation factor of the reservation oracle (scaled exact oracle).
    #[arg(long, default_value = "1")]
    alpha: Rational,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        <Problem as ValueEnum>::from_str(s, false).map_err(|_| Error::Malformed(format!("unknown problem `{s}`")))
    }
}

/// Options shared by every problem; unused ones are ignored.
#[derive(Debug, Clone, PartialEq, Eq, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub lambda: Option<Vec<Rational>>,
    pub alpha: Rational,
    pub max_iters: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            lambda: None,
            alpha: Rational::one(),
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// The JSON object `rnd solve` prints.
pub fn solve_instance(inst: &Instance, problem: Problem, opts: &SolveOptions) -> crate::Result<serde_json::Value> {
    let lambda = || opts.lambda.clone().unwrap_or_else(|| uniform_lambda(inst));
    Ok(match problem {
        Problem::CongDyn => json!({ "beta": cong_dynamic(inst)?.beta }),
        Problem::CongStatic => {
            let s = cong_static(inst)?;
            json!({ "beta": s.beta, "lambda": s.lambda, "reservation": s.reservation, "template": s.template })
        }
        Problem::CongLagrange => {
            let exact = ExactOracle::new(inst)?;
            let mut oracle: Box<dyn ReservationOracle> = if opts.alpha == Rational::one() {
                Box::new(exact)
            } else {
                Box::new(ScaledOracle::new(exact, opts.alpha.clone())?)
            };
            let (beta, trace) = cong_lagrange(inst, oracle.as_mut(), opts.max_iters)?;
            json!({ "beta_tilde": beta, "iterations": trace.iterations.len() })
        }
        Problem::LinDyn => {
            let r = lin_dynamic(inst, &lambda())?;
            json!({ "value": r.value, "reservation": r.reservation })
        }
        Problem::LinStatic => {
            let r = lin_static(inst, &lambda())?;
            json!({ "value": r.value, "reservation": r.reservation, "template": r.template })
        }
        Problem::CongOnePath => json!({ "beta": cong_one_path(inst)? }),
    })
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Congestion of `G_γ` against the satisfiable / low-value bounds.
    Dichotomy {
        #[command(flatten)]
        formula: Formula,
        #[arg(long, default_value_t = 1)]
        gamma: u32,
    },
    /// Cut witness for a satisfying assignment.
    Cut {
        #[command(flatten)]
        formula: Formula,
        #[arg(long, default_value_t = 1)]
        gamma: u32,
        /// Skip comparing the cut bound with the exact congestion.
        #[arg(long)]
        no_solve: bool,
    },
    /// Cutting-plane value against the exact congestion for several oracle ratios.
    Lagrange {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<Rational>>,
    },
    /// Static routing multipliers and the linear-cost identities.
    Static {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Malformed(_) => (EXIT_USAGE, "malformed"),
            Error::Parse { .. } => (EXIT_USAGE, "parse"),
            Error::Json(_) => (EXIT_USAGE, "json"),
            Error::Io(_) => (EXIT_USAGE, "io"),
            Error::Precondition(_) => (EXIT_USAGE, "precondition"),
            Error::Infeasible(_) => (EXIT_CHECK_FAILED, "infeasible"),
            Error::Unbounded(_) => (EXIT_CHECK_FAILED, "unbounded"),
            Error::DimensionCap { .. } => (EXIT_BUDGET, "dimension-cap"),
            Error::Budget(_) => (EXIT_BUDGET, "budget"),
            Error::IterationLimit { .. } => (EXIT_BUDGET, "iteration-limit"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        kind: "io",
        message: format!("{}: {e}", path.display()),
    })
}

fn load_cnf(path: &Path) -> Result<CnfFormula, Failure> {
    Ok(parse_dimacs(&read(path)?)?)
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let inst = Instance::from_json(&read(path)?)?;
    let problems = validate(&inst);
    if !problems.is_empty() {
        return Err(Failure {
            code: EXIT_USAGE,
            kind: "invalid-instance",
            message: format!("{}: {}", path.display(), problems.join("; ")),
        });
    }
    Ok(inst)
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let s = serde_json::to_string(value).map_err(Error::from)?;
    writeln!(out, "{s}").map_err(Error::from)?;
    Ok(())
}

fn write_instance(inst: &Instance, out: &Out, stdout: &mut dyn Write) -> Outcome {
    let text = inst.to_json();
    match &out.output {
        Some(p) => fs::write(p, text + "\n").map_err(Error::from)?,
        None => writeln!(stdout, "{text}").map_err(Error::from)?,
    }
    Ok(EXIT_OK)
}

fn gen(cmd: GenCommand, stdout: &mut dyn Write) -> Outcome {
    match cmd {
        GenCommand::Gamma { formula, gamma, out } => {
            let phi = load_cnf(&formula.cnf)?;
            write_instance(&gen_gamma(&phi, &formula.rho, gamma)?, &out, stdout)
        }
        GenCommand::Twopath { formula, out } => {
            let phi = load_cnf(&formula.cnf)?;
            write_instance(&gen_two_path(&phi, &formula.rho)?, &out, stdout)
        }
        GenCommand::Hose { graph, bounds, out } => {
            let g: Graph = serde_json::from_str(&read(&graph)?).map_err(Error::from)?;
            write_instance(&gen_hose(&bounds, g)?, &out, stdout)
        }
    }
}

fn solve(a: SolveArgs, stdout: &mut dyn Write) -> Outcome {
    let inst = load_instance(&a.input)?;
    let opts = SolveOptions {
        lambda: a.lambda,
        alpha: a.alpha,
        max_iters: a.max_iters,
    };
    emit_json(stdout, &solve_instance(&inst, a.problem, &opts)?)?;
    Ok(EXIT_OK)
}

fn verdict(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn verify(cmd: VerifyCommand, stdout: &mut dyn Write) -> Outcome {
    match cmd {
        VerifyCommand::Dichotomy { formula, gamma } => {
            let phi = load_cnf(&formula.cnf)?;
            let r = check_dichotomy(&phi, &formula.rho, gamma)?;
            emit_json(stdout, &r)?;
            Ok(verdict(r.pass))
        }
        VerifyCommand::Cut { formula, gamma, no_solve } => {
            let phi = load_cnf(&formula.cnf)?;
            let r = check_cut(&phi, &formula.rho, gamma, !no_solve)?;
            emit_json(stdout, &r)?;
            Ok(verdict(r.pass))
        }
        VerifyCommand::Lagrange { inputs, alphas } => {
            let alphas = alphas.unwrap_or_else(default_alphas);
            let mut pass = true;
            for p in inputs {
                let r = check_lagrange_gap(&load_instance(&p)?, &alphas)?;
                pass &= r.pass;
                emit_json(stdout, &json!({ "input": p.display().to_string(), "report": r }))?;
            }
            Ok(verdict(pass))
        }
        VerifyCommand::Static { inputs } => {
            let mut pass = true;
            for p in inputs {
                let r = check_static_machinery(&load_instance(&p)?)?;
                pass &= r.pass;
                emit_json(stdout, &json!({ "input": p.display().to_string(), "report": r }))?;
            }
            Ok(verdict(pass))
        }
    }
}

fn report(inputs: Vec<PathBuf>, stdout: &mut dyn Write) -> Outcome {
    let w = |e: std::io::Error| Failure::from(Error::from(e));
    writeln!(stdout, "{:<32} {:>8} {:>8} {:>8} {:>6} {:>12} {:>12}", "instance", "|V|", "|E|", "|H|", "Δ", "ln(|V|/Δ)", "predicted")
        .map_err(w)?;
    for p in inputs {
        let s = size_report(&load_instance(&p)?);
        let predicted = s.predicted.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
        writeln!(
            stdout,
            "{:<32} {:>8} {:>8} {:>8} {:>6} {:>12.4} {:>12}",
            p.display(),
            s.nodes,
            s.edges,
            s.commodities,
            s.max_degree,
            s.log_ratio,
            predicted
        )
        .map_err(w)?;
    }
    Ok(EXIT_OK)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = writeln!(stderr, "{}", json!({ "error": "usage", "message": text.trim_end() }));
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(c) => gen(c, stdout),
        Command::Solve(a) => solve(a, stdout),
        Command::Verify(c) => verify(c, stdout),
        Command::Report { inputs } => report(inputs, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "{}", json!({ "error": f.kind, "message": f.message }));
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("rnd").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("\"error\":\"usage\""));
    }

    #[test]
    fn decimal_rho_is_rejected() {
        let (code, _, _) = call(&["verify", "dichotomy", "--cnf", "x.cnf", "--rho", "0.5"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn missing_file_is_io_error() {
        let (code, _, err) = call(&["solve", "cong-dyn", "/nonexistent/instance.json"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("\"error\":\"io\""));
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("solve"));
    }
}
