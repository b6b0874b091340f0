//! Command-line front end. `main` is a thin wrapper around [`run_with_io`].
//!
//! Exit codes: 0 success, 2 bad input (flags, files, parse errors),
//! 3 numerical precondition (non-SPD Gram, singular system), 4 violated
//! model assumption. Errors go to stderr as `{"error": ...}`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bnb::{check_bnb, BnbError};
use crate::kato_examples::{build_kikuchi, ElementKind, KatoError};
use crate::linalg::DenseMatrix;
use crate::modulus::{
    analyze, closed_range_probe, DiscreteOperator, ModulusError, ProbeConfig, ProbeLevel,
};
use crate::parabolic::{
    run_pipeline, sweep, write_solution_csv, ParabolicError, ParabolicProblem, SpectralMethod,
};
use crate::spaces::{read_matrix_csv, write_matrix_csv, CsvError, GramSpace, SpaceError};

pub const SCHEMA: &str = "infsup.run/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_ASSUMPTION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "infsup", version, about = "Inf-sup and minimum modulus diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum modulus, reduced minimum modulus and kernel of A : V -> W'.
    Modulus(OperatorArgs),
    /// Banach-Necas-Babuska verdict for A : V -> W'.
    Bnb(OperatorArgs),
    /// Reduced minimum modulus of the discretized Volterra operator.
    Kikuchi(KikuchiArgs),
    /// Space-time well-posedness report for a parabolic problem.
    Parabolic(ParabolicArgs),
}

#[derive(Debug, clap::Args)]
pub struct OperatorArgs {
    /// Matrix CSV with entry (j, i) = a(phi_i, psi_j).
    pub matrix: PathBuf,
    /// Gram matrix of the trial space V (default: identity).
    #[arg(long)]
    pub gram_v: Option<PathBuf>,
    /// Gram matrix of the test space W (default: identity).
    #[arg(long)]
    pub gram_w: Option<PathBuf>,
    /// Relative singular value cutoff (default: max(rows, cols) * eps).
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct KikuchiArgs {
    /// Number of cells.
    #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
    pub cells: Option<usize>,
    /// Comma-separated cell counts.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    #[arg(long, default_value = "p0")]
    pub kind: ElementKind,
    /// Directory to write matrix.csv, gram_v.csv and gram_w.csv (with --cells).
    #[arg(long, requires = "cells")]
    pub emit: Option<PathBuf>,
    /// Write the (n, h, gamma, slope) table here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ParabolicArgs {
    /// JSON problem description.
    pub config: PathBuf,
    /// Write the nodal solution as (t, x, u) CSV.
    #[arg(long)]
    pub dump_solution: Option<PathBuf>,
    /// Number of levels, doubling nx and nt together, with fitted rates.
    #[arg(long)]
    pub sweep: Option<usize>,
    /// Extremal singular value method.
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum MethodArg {
    Auto,
    Dense,
    Lanczos,
}

impl From<MethodArg> for SpectralMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => SpectralMethod::Auto,
            MethodArg::Dense => SpectralMethod::Dense,
            MethodArg::Lanczos => SpectralMethod::Lanczos,
        }
    }
}

/// Top-level report. Field order is the serialization order.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    /// SHA-256 over the command line and every input file.
    pub inputs_digest: String,
    pub tolerances: Value,
    pub results: Value,
    pub wall_time: f64,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub body: Value,
}

impl CliError {
    fn new(code: i32, message: impl std::fmt::Display) -> Self {
        CliError { code, body: json!({ "error": message.to_string() }) }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::new(EXIT_INPUT, e)
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        let code = match e {
            SpaceError::InvalidGram(_) => EXIT_NUMERIC,
            SpaceError::DimensionMismatch { .. } => EXIT_INPUT,
        };
        CliError::new(code, e)
    }
}

impl From<ModulusError> for CliError {
    fn from(e: ModulusError) -> Self {
        match e {
            ModulusError::DimensionMismatch { .. } => CliError::new(EXIT_INPUT, e),
            ModulusError::Space(s) => s.into(),
            other => CliError::new(EXIT_NUMERIC, other),
        }
    }
}

impl From<BnbError> for CliError {
    fn from(e: BnbError) -> Self {
        match e {
            BnbError::Modulus(m) => m.into(),
            BnbError::Space(s) => s.into(),
            other => CliError::new(EXIT_NUMERIC, other),
        }
    }
}

impl From<KatoError> for CliError {
    fn from(e: KatoError) -> Self {
        CliError::new(EXIT_INPUT, e)
    }
}

impl From<ParabolicError> for CliError {
    fn from(e: ParabolicError) -> Self {
        let code = match e {
            ParabolicError::AssumptionViolated { .. } => EXIT_ASSUMPTION,
            ParabolicError::SingularSystem | ParabolicError::Linalg(_) => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        };
        let mut err = CliError::new(code, &e);
        if let Some(w) = e.witness() {
            err = err.with("witness", json!(w));
        }
        if let ParabolicError::Parse { field, error } = &e {
            err = err.with("field", json!(field)).with("offset", json!(error.offset));
        }
        err
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// JSON report or error. Returns the exit code.
pub fn run_with_io<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let err = CliError::new(EXIT_INPUT, e.render().to_string().trim_end());
            let _ = writeln!(stderr, "{}", err.body);
            return err.code;
        }
    };
    let start = Instant::now();
    match run(&cli.command) {
        Ok(mut report) => {
            report.wall_time = start.elapsed().as_secs_f64();
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            match writeln!(stdout, "{text}") {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "{}", json!({ "error": e.to_string() }));
                    EXIT_INPUT
                }
            }
        }
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.body);
            err.code
        }
    }
}

pub fn run(command: &Command) -> Result<RunReport, CliError> {
    match command {
        Command::Modulus(a) => cmd_modulus(a),
        Command::Bnb(a) => cmd_bnb(a),
        Command::Kikuchi(a) => cmd_kikuchi(a),
        Command::Parabolic(a) => cmd_parabolic(a),
    }
}

struct Digest256(Sha256);

impl Digest256 {
    fn new(command: &str) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        Digest256(h)
    }

    fn field(&mut self, name: &str, value: &str) {
        self.0.update([0u8]);
        self.0.update(name.as_bytes());
        self.0.update([0u8]);
        self.0.update(value.as_bytes());
    }

    fn file(&mut self, name: &str, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        self.field(name, "");
        self.0.update(&bytes);
        Ok(())
    }

    fn finish(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn report(command: &str, digest: Digest256, tolerances: Value, results: Value) -> RunReport {
    RunReport {
        schema: SCHEMA,
        command: command.into(),
        inputs_digest: digest.finish(),
        tolerances,
        results,
        wall_time: 0.0,
    }
}

fn load_operator(a: &OperatorArgs, digest: &mut Digest256) -> Result<DiscreteOperator, CliError> {
    digest.file("matrix", &a.matrix)?;
    let matrix = read_matrix_csv(&a.matrix)?;
    let gram = |p: &Option<PathBuf>, name: &str, dim: usize, d: &mut Digest256| -> Result<GramSpace, CliError> {
        match p {
            None => Ok(GramSpace::euclidean(dim)),
            Some(p) => {
                d.file(name, p)?;
                let g = read_matrix_csv(p)?;
                GramSpace::new(g).map_err(|e| {
                    CliError::from(e).with("file", json!(p.display().to_string()))
                })
            }
        }
    };
    let v = gram(&a.gram_v, "gram_v", matrix.cols(), digest)?;
    let w = gram(&a.gram_w, "gram_w", matrix.rows(), digest)?;
    Ok(DiscreteOperator::new(v, w, matrix)?)
}

fn operator_tolerances(op: &DiscreteOperator, rel_tol: Option<f64>) -> Value {
    json!({ "rel_tol": crate::modulus::resolve_rel_tol(op, rel_tol) })
}

fn cmd_modulus(a: &OperatorArgs) -> Result<RunReport, CliError> {
    let mut digest = Digest256::new("modulus");
    if let Some(t) = a.rel_tol {
        digest.field("rel_tol", &format!("{t:?}"));
    }
    let op = load_operator(a, &mut digest)?;
    let r = analyze(&op, a.rel_tol)?;
    Ok(report("modulus", digest, operator_tolerances(&op, a.rel_tol), json!(r)))
}

fn cmd_bnb(a: &OperatorArgs) -> Result<RunReport, CliError> {
    let mut digest = Digest256::new("bnb");
    if let Some(t) = a.rel_tol {
        digest.field("rel_tol", &format!("{t:?}"));
    }
    let op = load_operator(a, &mut digest)?;
    let v = check_bnb(&op, a.rel_tol)?;
    Ok(report("bnb", digest, operator_tolerances(&op, a.rel_tol), json!(v)))
}

#[derive(Debug, Serialize)]
struct KikuchiRow {
    n: usize,
    h: f64,
    gamma: crate::modulus::Gamma,
}

fn cmd_kikuchi(a: &KikuchiArgs) -> Result<RunReport, CliError> {
    let mut digest = Digest256::new("kikuchi");
    let cells: Vec<usize> = match (&a.cells, &a.sweep) {
        (Some(n), _) => vec![*n],
        (None, Some(s)) => s.clone(),
        (None, None) => unreachable!("clap requires one of --cells, --sweep"),
    };
    if cells.is_empty() {
        return Err(CliError::new(EXIT_INPUT, "--sweep needs at least one cell count"));
    }
    digest.field("cells", &format!("{cells:?}"));
    digest.field("kind", &format!("{:?}", a.kind));

    let instances = cells
        .iter()
        .map(|&n| build_kikuchi(n, a.kind))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(dir) = &a.emit {
        emit_instance(dir, &instances[0].operator)?;
    }
    let levels: Vec<ProbeLevel> = instances
        .iter()
        .map(|i| ProbeLevel { parameter: i.cells as f64, operator: i.operator.clone() })
        .collect();
    let config = ProbeConfig::default();
    let probe = closed_range_probe(&levels, &config)?;
    let rows: Vec<KikuchiRow> = probe
        .levels
        .iter()
        .map(|l| KikuchiRow { n: l.parameter as usize, h: 1.0 / l.parameter, gamma: l.gamma })
        .collect();
    if let Some(path) = &a.csv {
        write_kikuchi_table(path, &rows, probe.slope)?;
    }
    let results = json!({
        "kind": a.kind,
        "levels": rows,
        "slope": probe.slope,
        "diagnosis": probe.diagnosis,
    });
    Ok(report("kikuchi", digest, json!(config), results))
}

fn emit_instance(dir: &Path, op: &DiscreteOperator) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", dir.display())))?;
    let write = |name: &str, m: &DenseMatrix| write_matrix_csv(dir.join(name), m);
    write("matrix.csv", op.matrix())?;
    write("gram_v.csv", op.domain().gram())?;
    write("gram_w.csv", op.test_space().gram())?;
    Ok(())
}

fn write_kikuchi_table(path: &Path, rows: &[KikuchiRow], slope: Option<f64>) -> Result<(), CliError> {
    let io = |e: &dyn std::fmt::Display| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    w.write_record(["n", "h", "gamma", "slope"]).map_err(|e| io(&e))?;
    let slope = slope.map_or(String::new(), |s| format!("{s:?}"));
    for r in rows {
        let g = r.gamma.finite().map_or("inf".to_string(), |g| format!("{g:?}"));
        w.write_record([r.n.to_string(), format!("{:?}", r.h), g, slope.clone()])
            .map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}

fn cmd_parabolic(a: &ParabolicArgs) -> Result<RunReport, CliError> {
    let mut digest = Digest256::new("parabolic");
    digest.file("config", &a.config)?;
    digest.field("sweep", &format!("{:?}", a.sweep));
    digest.field("method", &format!("{:?}", a.method));
    let problem = ParabolicProblem::from_path(&a.config)?;
    let method = SpectralMethod::from(a.method);
    let (rep, asm, sol) = run_pipeline(&problem, method)?;
    if let Some(path) = &a.dump_solution {
        write_solution_csv(path, &asm, &sol.u)?;
    }
    let mut results = json!(rep);
    if let Some(levels) = a.sweep {
        if levels == 0 {
            return Err(CliError::new(EXIT_INPUT, "--sweep needs at least one level"));
        }
        results["sweep"] = json!(sweep(&problem, levels, method)?);
    }
    let tolerances = json!({
        "bound_slack": 1e-8,
        "residual": 1e-10,
        "dx_step": crate::parabolic::DX_STEP,
        "sample_density": problem.sample_density,
        "dense_limit": crate::parabolic::DENSE_LIMIT,
    });
    Ok(report("parabolic", digest, tolerances, results))
}
