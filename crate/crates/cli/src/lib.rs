//! Command-line frontend for `gateaux-core`.
//!
//! Every subcommand reads one JSON problem file and prints one JSON document
//! `{command, inputs_digest, tolerances, result, certificate?, oracle?}`.
//! Exit codes: 0 computed (or predicate true), 1 predicate false,
//! 2 input error, 3 indeterminate.

pub mod commands;
pub mod encode;
pub mod error;
pub mod problem;
pub mod verify;

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use gateaux_core::ToleranceConfig;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::encode::{num, to_stable_string, tolerances};
use crate::error::CliError;
use crate::problem::{parse_problem, ToleranceOverrides};

#[derive(Debug, Parser)]
#[command(name = "gateaux", version, about = "Gateaux derivatives and Birkhoff-James orthogonality for matrices and functions")]
struct Cli {
    #[command(subcommand)]
    command: CommandLine,
}

#[derive(Debug, Subcommand)]
enum CommandLine {
    /// Operator norm of A.
    Norm(Args),
    /// Right Gateaux derivative of the norm at A in direction B.
    Dplus(Args),
    /// Right derivative in the rotated direction e^{i phi} B.
    Dphi(Args),
    /// Minimum of the rotated derivative over phi.
    Dmin(Args),
    /// Two-sided derivative, null when the one-sided limits differ.
    Dtwo(Args),
    /// Is the norm smooth (Gateaux differentiable) at A?
    Smooth(Args),
    /// Derivative from the spectral window of width eps.
    Dcutoff(Args),
    /// Is A orthogonal to B?
    Bj(Args),
    /// Is A orthogonal to the span of Bs?
    BjSubspace(Args),
    /// Is G in the subdifferential of the norm at A?
    Subdiff(Args),
    /// Splits a norm-attaining state T into norming vectors.
    Decompose(Args),
    /// Sup norm of f.
    FnNorm(Args),
    /// Right derivative of the sup norm at f in direction g.
    FnDplus(Args),
    /// Derivative from the points within delta of the maximum modulus.
    FnDdelta(Args),
    /// Is f orthogonal to the span of hs?
    FnBj(Args),
}

/// Subcommands without their arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Norm,
    Dplus,
    Dphi,
    Dmin,
    Dtwo,
    Smooth,
    Dcutoff,
    Bj,
    BjSubspace,
    Subdiff,
    Decompose,
    FnNorm,
    FnDplus,
    FnDdelta,
    FnBj,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Dplus => "dplus",
            Command::Dphi => "dphi",
            Command::Dmin => "dmin",
            Command::Dtwo => "dtwo",
            Command::Smooth => "smooth",
            Command::Dcutoff => "dcutoff",
            Command::Bj => "bj",
            Command::BjSubspace => "bj-subspace",
            Command::Subdiff => "subdiff",
            Command::Decompose => "decompose",
            Command::FnNorm => "fn-norm",
            Command::FnDplus => "fn-dplus",
            Command::FnDdelta => "fn-ddelta",
            Command::FnBj => "fn-bj",
        }
    }
}

#[derive(Debug, clap::Args)]
struct Args {
    /// Problem file; `-` or nothing reads standard input.
    input: Option<PathBuf>,
    /// Attach a brute-force oracle cross-check.
    #[arg(long)]
    check: bool,
    /// Validate a previously emitted certificate instead of solving.
    #[arg(long, value_name = "CERT")]
    verify_certificate: Option<PathBuf>,
    #[command(flatten)]
    tol: ToleranceFlags,
}

#[derive(Debug, clap::Args)]
struct ToleranceFlags {
    /// Relative off-diagonal threshold ending the Jacobi sweeps.
    #[arg(long)]
    eig_offdiag: Option<f64>,
    /// Relative width of the top eigenvalue cluster.
    #[arg(long)]
    cluster_rel: Option<f64>,
    /// Residual tolerance for witnesses.
    #[arg(long)]
    feas_eps: Option<f64>,
    /// Duality gap below which the feasibility solver gives up.
    #[arg(long)]
    fw_gap_eps: Option<f64>,
    /// Eigenvalue floor for PSD checks.
    #[arg(long)]
    psd_tol: Option<f64>,
    /// Finite-difference steps, comma-separated and strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    fd_steps: Option<Vec<f64>>,
    /// Number of angles sampled in [0, 2pi).
    #[arg(long)]
    grid_phi: Option<usize>,
    /// Iteration cap for every solver.
    #[arg(long)]
    max_iter: Option<usize>,
}

impl From<ToleranceFlags> for ToleranceOverrides {
    fn from(f: ToleranceFlags) -> Self {
        ToleranceOverrides {
            eig_offdiag: f.eig_offdiag,
            cluster_rel: f.cluster_rel,
            feas_eps: f.feas_eps,
            fw_gap_eps: f.fw_gap_eps,
            psd_tol: f.psd_tol,
            fd_steps: f.fd_steps,
            grid_phi: f.grid_phi,
            max_iter: f.max_iter,
        }
    }
}

impl CommandLine {
    fn split(self) -> (Command, Args) {
        match self {
            CommandLine::Norm(a) => (Command::Norm, a),
            CommandLine::Dplus(a) => (Command::Dplus, a),
            CommandLine::Dphi(a) => (Command::Dphi, a),
            CommandLine::Dmin(a) => (Command::Dmin, a),
            CommandLine::Dtwo(a) => (Command::Dtwo, a),
            CommandLine::Smooth(a) => (Command::Smooth, a),
            CommandLine::Dcutoff(a) => (Command::Dcutoff, a),
            CommandLine::Bj(a) => (Command::Bj, a),
            CommandLine::BjSubspace(a) => (Command::BjSubspace, a),
            CommandLine::Subdiff(a) => (Command::Subdiff, a),
            CommandLine::Decompose(a) => (Command::Decompose, a),
            CommandLine::FnNorm(a) => (Command::FnNorm, a),
            CommandLine::FnDplus(a) => (Command::FnDplus, a),
            CommandLine::FnDdelta(a) => (Command::FnDdelta, a),
            CommandLine::FnBj(a) => (Command::FnBj, a),
        }
    }
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let (command, args) = cli.command.split();
    let mut doc = Map::new();
    doc.insert("command".into(), json!(command.name()));
    match execute(command, args, &mut doc) {
        Ok(code) => Outcome {
            code,
            stdout: to_stable_string(&Value::Object(doc)),
            stderr: String::new(),
        },
        Err(e) => {
            let mut err = Map::new();
            match &e {
                CliError::Input(msg) => {
                    err.insert("kind".into(), json!("input"));
                    err.insert("message".into(), json!(msg));
                }
                CliError::Indeterminate { message, iterations, objective, lower_bound } => {
                    err.insert("kind".into(), json!("indeterminate"));
                    err.insert("message".into(), json!(message));
                    err.insert("iterations".into(), json!(iterations));
                    err.insert("objective".into(), num(*objective));
                    err.insert("lower_bound".into(), num(*lower_bound));
                }
            }
            doc.insert("result".into(), Value::Null);
            doc.insert("error".into(), Value::Object(err));
            Outcome {
                code: e.exit_code(),
                stdout: to_stable_string(&Value::Object(doc)),
                stderr: format!("gateaux {}: {e}\n", command.name()),
            }
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, CliError> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => std::fs::read(p)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    std::io::stdin()
        .read_to_end(&mut buf)
        .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?;
    Ok(buf)
}

/// Fills `doc` and returns the exit code.
fn execute(command: Command, args: Args, doc: &mut Map<String, Value>) -> Result<i32, CliError> {
    let bytes = read_input(args.input.as_deref())?;
    let digest = hex::encode(Sha256::digest(&bytes));
    doc.insert("inputs_digest".into(), json!(digest));

    let problem = parse_problem(&bytes)?;
    let mut tol = ToleranceConfig::default();
    if let Some(o) = &problem.tolerances {
        o.apply(&mut tol);
    }
    ToleranceOverrides::from(args.tol).apply(&mut tol);
    tol.validate()
        .map_err(|e| CliError::Input(format!("tolerances: {e}")))?;
    doc.insert("tolerances".into(), tolerances(&tol));

    if let Some(cert_path) = &args.verify_certificate {
        let cert_bytes = std::fs::read(cert_path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", cert_path.display())))?;
        let cert: Value = serde_json::from_slice(&cert_bytes).map_err(|e| {
            CliError::Input(format!("malformed certificate file {}: {e}", cert_path.display()))
        })?;
        let v = verify::verify(command, command.name(), &problem, &digest, &cert, &tol)?;
        doc.insert("result".into(), json!(v.accepted));
        doc.insert("verification".into(), v.details);
        return Ok(if v.accepted { 0 } else { 1 });
    }

    let report = commands::execute(command, &problem, &tol, args.check)?;
    doc.insert("result".into(), report.result);
    if let Some(c) = report.certificate {
        doc.insert("certificate".into(), c);
    }
    if let Some(o) = report.oracle {
        doc.insert("oracle".into(), o);
    }
    Ok(if report.negative { 1 } else { 0 })
}
