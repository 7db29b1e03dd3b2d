//! Command-line front end.
//!
//! `varwork <minimize|spectrum|validate|sweep|report> [flags]`. A JSON
//! [`RunConfig`] may be given with `--config`; flags override its fields.
//! Exit status: 0 success, 1 usage error, 2 computation failure.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fd;
use crate::formulas::FormulaId;
use crate::models::{make_model, Couplings, Family, ModelSpec};
use crate::optimize::{log_grid, minimize_family, Functional, MinimizeResult, TrialFamily};
use crate::report::{self, compact_json, float_cell, CsvRow, Format};
use crate::ritz::{self, TruncationStep};
use crate::trial::TrialParams;
use crate::validation::{self, SuiteCouplings, ValidationRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Minimize,
    Spectrum,
    Validate,
    Sweep,
    Report,
}

impl CommandKind {
    fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Minimize => "minimize",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Validate => "validate",
            CommandKind::Sweep => "sweep",
            CommandKind::Report => "report",
        }
    }
}

/// Reference solver for spectra and oracle gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Fock,
    Fd,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fock" | "ritz" => Ok(Method::Fock),
            "fd" => Ok(Method::Fd),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}' (fock or fd)"))),
        }
    }
}

/// A coupling grid: `0.1`, `0.1,0.2,0.5`, or log-spaced `lo:hi:n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grid(#[serde(deserialize_with = "one_or_many")] pub Vec<f64>);

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::InvalidParameter(format!("bad grid '{s}': {what}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected lo:hi:n"));
            }
            let (lo, hi) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2].trim().parse().map_err(|_| bad("point count"))?;
            if !(lo > 0.0 && hi >= lo) || n == 0 {
                return Err(bad("log grid needs 0 < lo <= hi and n >= 1"));
            }
            return Ok(Grid(log_grid(lo, hi, n)));
        }
        let v = s.split(',').map(num).collect::<Result<Vec<f64>>>()?;
        Ok(Grid(v))
    }
}

fn default_grid() -> Grid {
    Grid(vec![0.1])
}

/// Fully resolved run description; also the `--config` file schema.
/// Every field is optional in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub model: Family,
    pub lambda: Grid,
    pub mu: Grid,
    pub power: u32,
    pub dim: u32,
    pub family: TrialFamily,
    pub degree: u32,
    pub formulas: Vec<FormulaId>,
    pub all: bool,
    /// Use the printed functional when minimizing.
    pub printed: bool,
    pub tol: f64,
    pub order: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub k: usize,
    pub truncation: usize,
    pub method: Method,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            model: Family::Quartic,
            lambda: default_grid(),
            mu: default_grid(),
            power: 2,
            dim: 1,
            family: TrialFamily::Gaussian,
            degree: 0,
            formulas: vec![],
            all: false,
            printed: false,
            tol: 1e-10,
            order: crate::quadrature::DEFAULT_ORDER,
            format: Format::Json,
            out: None,
            k: 1,
            truncation: ritz::MAX_TRUNCATION,
            method: Method::Fock,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::InvalidParameter(m));
        if self.lambda.0.is_empty() || self.mu.0.is_empty() {
            return usage("coupling grids must be nonempty".into());
        }
        if self.lambda.0.iter().chain(&self.mu.0).any(|x| !x.is_finite()) {
            return usage("coupling grids must be finite".into());
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return usage(format!("tolerance must be positive, got {}", self.tol));
        }
        if !(crate::quadrature::MIN_ORDER..=crate::quadrature::MAX_ORDER).contains(&self.order) {
            return usage(format!(
                "order must lie in [{}, {}], got {}",
                crate::quadrature::MIN_ORDER,
                crate::quadrature::MAX_ORDER,
                self.order
            ));
        }
        if self.k < 1 {
            return usage("k must be >= 1".into());
        }
        if self.truncation < ritz::START_TRUNCATION {
            return usage(format!("truncation cap must be >= {}", ritz::START_TRUNCATION));
        }
        Ok(())
    }

    /// Models on the coupling grid, `λ` outer and `μ` inner; `μ` only
    /// varies for the cubic-quartic family.
    pub fn models(&self) -> Result<Vec<ModelSpec>> {
        let mus: &[f64] = if self.model == Family::CubicQuartic { &self.mu.0 } else { &self.mu.0[..1] };
        let lambdas: &[f64] = if self.model == Family::Harmonic { &self.lambda.0[..1] } else { &self.lambda.0 };
        let mut out = Vec::new();
        for &lambda in lambdas {
            for &mu in mus {
                let c = match self.model {
                    Family::Harmonic => Couplings { lambda: 0.0, mu: 0.0, n: 2 },
                    Family::CubicQuartic => Couplings { lambda, mu, n: 2 },
                    _ => Couplings { lambda, mu: 0.0, n: self.power },
                };
                out.push(make_model(self.model, c, self.dim)?);
            }
        }
        Ok(out)
    }

    fn functional(&self) -> Functional {
        if self.printed {
            Functional::Printed
        } else {
            Functional::Moments
        }
    }
}

/// Command-line flags; all optional so that a config file can fill gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// harmonic | quartic | power2n | cubic-quartic
    #[arg(long)]
    pub model: Option<String>,
    /// Coupling λ: `0.1`, `0.1,0.5`, or log grid `lo:hi:n`
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Quartic coupling μ of the cubic-quartic model (same grid syntax)
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Power index n of the x^{2n} model
    #[arg(long)]
    pub power: Option<u32>,
    /// Number of identical modes
    #[arg(long)]
    pub dim: Option<u32>,
    /// gaussian | displaced-gaussian | coherent | displaced-coherent | squeezed | monomial
    #[arg(long)]
    pub family: Option<String>,
    /// Fock index for the monomial family
    #[arg(long)]
    pub degree: Option<u32>,
    /// Formula id; repeat or comma-separate. With `minimize`, selects the printed functional
    #[arg(long, value_delimiter = ',')]
    pub formula: Vec<String>,
    /// Validate every formula
    #[arg(long)]
    pub all: bool,
    /// Optimizer tolerance; Ritz convergence tolerance for `spectrum`
    #[arg(long)]
    pub tol: Option<f64>,
    /// Quadrature order (nodes per axis)
    #[arg(long)]
    pub order: Option<usize>,
    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of levels
    #[arg(short = 'k', long = "k")]
    pub k: Option<usize>,
    /// Fock truncation cap
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Reference solver: fock | fd
    #[arg(long)]
    pub method: Option<String>,
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize a trial family and compare with the reference ground energy
    Minimize(Flags),
    /// Lowest levels from the Fock-basis or finite-difference solver
    Spectrum(Flags),
    /// Printed formulas against independent oracles
    Validate(Flags),
    /// Minimize over a coupling grid in parallel
    Sweep(Flags),
    /// Validation ledger, series fits and bound checks in one document
    Report(Flags),
}

#[derive(Debug, Parser)]
#[command(name = "varwork", version, about = "Variational workbench for anharmonic oscillators")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

fn parse<T: FromStr<Err = Error>>(s: &str) -> Result<T> {
    s.parse()
}

/// Merge a config file (if any) with flags into a checked [`RunConfig`].
pub fn resolve(command: Option<CommandKind>, flags: &Flags) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| Error::InvalidParameter(format!("bad config {}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    if command.is_some() {
        cfg.command = command;
    }
    if let Some(m) = &flags.model {
        cfg.model = parse(m)?;
    }
    if let Some(l) = &flags.lambda {
        cfg.lambda = parse(l)?;
    }
    if let Some(m) = &flags.mu {
        cfg.mu = parse(m)?;
    }
    if let Some(p) = flags.power {
        cfg.power = p;
        if flags.model.is_none() && cfg.model == Family::Quartic && p != 2 {
            cfg.model = Family::Power2n;
        }
    }
    if let Some(d) = flags.dim {
        cfg.dim = d;
    }
    if let Some(f) = &flags.family {
        cfg.family = parse(f)?;
    }
    if let Some(n) = flags.degree {
        cfg.degree = n;
    }
    if !flags.formula.is_empty() {
        cfg.formulas = flags.formula.iter().map(|f| parse(f.trim())).collect::<Result<_>>()?;
    }
    cfg.all |= flags.all;
    if let Some(t) = flags.tol {
        cfg.tol = t;
    }
    if let Some(o) = flags.order {
        cfg.order = o;
    }
    if let Some(f) = &flags.format {
        cfg.format = parse(f)?;
    }
    if let Some(o) = &flags.out {
        cfg.out = Some(o.clone());
    }
    if let Some(k) = flags.k {
        cfg.k = k;
    }
    if let Some(t) = flags.truncation {
        cfg.truncation = t;
    }
    if let Some(m) = &flags.method {
        cfg.method = parse(m)?;
    }
    if cfg.command == Some(CommandKind::Minimize) || cfg.command == Some(CommandKind::Sweep) {
        cfg.printed |= !cfg.formulas.is_empty();
    }
    cfg.validate()?;
    check_command(&cfg)?;
    Ok(cfg)
}

/// Command-specific usage rules.
fn check_command(cfg: &RunConfig) -> Result<()> {
    let usage = |m: &str| Err(Error::InvalidParameter(m.into()));
    match cfg.command {
        None => usage("no command given (minimize, spectrum, validate, sweep, report)"),
        Some(CommandKind::Validate) if !cfg.all && cfg.formulas.is_empty() => usage("validate needs --all or --formula"),
        Some(CommandKind::Report) if cfg.format != Format::Json => usage("report is JSON only"),
        _ => Ok(()),
    }
}

/// Reference ground energy of the `d`-mode model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleGap {
    pub method: Method,
    /// Single-mode level the trial is compared with.
    pub level: usize,
    pub reference_energy: f64,
    pub gap: f64,
}

/// Result of `minimize` and one row of `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub model: ModelSpec,
    pub family: TrialFamily,
    pub functional: Functional,
    pub params_opt: TrialParams,
    /// Total energy, `d` times the single-mode value.
    pub energy_opt: f64,
    pub energy_per_mode: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub bracket_used: Vec<[f64; 2]>,
    pub stationary_points: usize,
    pub provenance: String,
    pub oracle: OracleGap,
}

fn reference_level(model: &ModelSpec, level: usize, method: Method, cfg: &RunConfig) -> Result<f64> {
    let one = model.with_dim(1)?;
    match method {
        Method::Fock => {
            let s = ritz::converged_spectrum_capped(&one, level + 1, validation::REFERENCE_TOL, cfg.truncation)?;
            Ok(s.values[level])
        }
        Method::Fd => {
            let r = fd::fd_spectrum(&one, fd::DEFAULT_HALF_WIDTH, fd::DEFAULT_POINTS, level + 1, true)?;
            Ok(r[level].energy)
        }
    }
}

pub fn minimize_report(model: &ModelSpec, cfg: &RunConfig) -> Result<EnergyReport> {
    let functional = cfg.functional();
    let r: MinimizeResult = minimize_family(model, cfg.family, cfg.degree, functional, cfg.tol)?;
    if functional == Functional::Printed {
        if let Some(id) = cfg.formulas.first() {
            // the chosen printed functional must be the one the family uses
            crate::formulas::paper_energy(*id, &r.params_opt, &model.with_dim(1)?)?;
        }
    }
    let d = model.d() as f64;
    let level = if cfg.family == TrialFamily::Monomial { cfg.degree as usize } else { 0 };
    let reference = d * reference_level(model, level, cfg.method, cfg)?;
    let energy = d * r.energy_opt;
    Ok(EnergyReport {
        model: *model,
        family: cfg.family,
        functional,
        params_opt: r.params_opt,
        energy_opt: energy,
        energy_per_mode: r.energy_opt,
        gradient_norm: r.gradient_norm,
        iterations: r.iterations,
        bracket_used: r.bracket_used,
        stationary_points: r.stationary_points,
        provenance: r.provenance,
        oracle: OracleGap { method: cfg.method, level, reference_energy: reference, gap: energy - reference },
    })
}

fn model_cells(m: &ModelSpec) -> Vec<String> {
    vec![
        m.family().to_string(),
        float_cell(m.lambda()),
        float_cell(m.mu()),
        m.n().to_string(),
        m.d().to_string(),
    ]
}

impl CsvRow for EnergyReport {
    fn header() -> &'static [&'static str] {
        &[
            "model",
            "lambda",
            "mu",
            "power",
            "dim",
            "family",
            "functional",
            "params_opt",
            "energy_opt",
            "energy_per_mode",
            "reference_energy",
            "gap",
            "gradient_norm",
            "iterations",
            "provenance",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let mut f = model_cells(&self.model);
        f.extend([
            self.family.to_string(),
            self.functional.as_str().into(),
            compact_json(&serde_json::to_value(self.params_opt).unwrap_or(Value::Null)),
            float_cell(self.energy_opt),
            float_cell(self.energy_per_mode),
            float_cell(self.oracle.reference_energy),
            float_cell(self.oracle.gap),
            float_cell(self.gradient_norm),
            self.iterations.to_string(),
            self.provenance.clone(),
        ]);
        f
    }
}

/// Output of `spectrum` for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub model: ModelSpec,
    pub method: Method,
    pub k: usize,
    pub values: Vec<f64>,
    /// Final Fock truncation.
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<TruncationStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<fd::Grid1D>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_expansions: Option<usize>,
}

pub fn spectrum_report(model: &ModelSpec, cfg: &RunConfig) -> Result<SpectrumReport> {
    match cfg.method {
        Method::Fock => {
            let s = ritz::converged_spectrum_capped(model, cfg.k, cfg.tol.max(1e-12), cfg.truncation)?;
            Ok(SpectrumReport {
                model: *model,
                method: Method::Fock,
                k: cfg.k,
                values: s.values,
                truncation: Some(s.n),
                history: s.history,
                grid: None,
                box_expansions: None,
            })
        }
        Method::Fd => {
            let one = model.with_dim(1)?;
            let r = fd::fd_spectrum(&one, fd::DEFAULT_HALF_WIDTH, fd::DEFAULT_POINTS, cfg.k, true)?;
            let single: Vec<f64> = r.iter().map(|x| x.energy).collect();
            Ok(SpectrumReport {
                model: *model,
                method: Method::Fd,
                k: cfg.k,
                values: ritz::product_levels(&single, model.d(), cfg.k),
                truncation: None,
                history: vec![],
                grid: r.first().map(|x| x.grid),
                box_expansions: r.first().map(|x| x.box_expansions),
            })
        }
    }
}

impl SpectrumReport {
    fn rows(&self) -> Vec<SpectrumRow> {
        self.values
            .iter()
            .enumerate()
            .map(|(level, &value)| SpectrumRow { model: self.model, method: self.method, level, value })
            .collect()
    }
}

/// One level, for CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub model: ModelSpec,
    pub method: Method,
    pub level: usize,
    pub value: f64,
}

impl CsvRow for SpectrumRow {
    fn header() -> &'static [&'static str] {
        &["model", "lambda", "mu", "power", "dim", "method", "level", "value"]
    }

    fn fields(&self) -> Vec<String> {
        let mut f = model_cells(&self.model);
        f.extend([
            match self.method {
                Method::Fock => "fock".into(),
                Method::Fd => "fd".into(),
            },
            self.level.to_string(),
            float_cell(self.value),
        ]);
        f
    }
}

fn validation_records(cfg: &RunConfig) -> Result<Vec<ValidationRecord>> {
    if !cfg.all && cfg.formulas.is_empty() {
        return Err(Error::InvalidParameter("validate needs --all or --formula".into()));
    }
    let mut out = Vec::new();
    for &lambda in &cfg.lambda.0 {
        for &mu in &cfg.mu.0 {
            let cases = validation::standard_cases(SuiteCouplings { lambda, mu })?;
            for case in cases {
                if cfg.all || cfg.formulas.contains(&case.formula()) {
                    out.push(validation::validate_case(&case, cfg.order));
                }
            }
        }
    }
    Ok(out)
}

fn worker_count() -> usize {
    std::env::var("VW_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// `minimize` over every grid model on a worker pool; output keeps grid order.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<EnergyReport>> {
    let models = cfg.models()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Io(format!("worker pool: {e}")))?;
    pool.install(|| models.par_iter().map(|m| minimize_report(m, cfg)).collect())
}

/// Full document for `report`.
pub fn full_report(cfg: &RunConfig) -> Result<Value> {
    let lambda = cfg.lambda.0[0];
    let mu = cfg.mu.0[0];
    let validation = validation::validate_all(SuiteCouplings { lambda, mu }, cfg.order)?;
    let series = validation::series_checks(mu)?;
    let bounds = validation::bound_checks()?;
    Ok(json!({
        "validation": serde_json::to_value(validation).map_err(|e| Error::Io(e.to_string()))?,
        "series": serde_json::to_value(series).map_err(|e| Error::Io(e.to_string()))?,
        "bounds": serde_json::to_value(bounds).map_err(|e| Error::Io(e.to_string()))?,
    }))
}

/// Render the output of one resolved run.
pub fn execute(cfg: &RunConfig) -> Result<String> {
    let command = cfg
        .command
        .ok_or_else(|| Error::InvalidParameter("no command given (minimize, spectrum, validate, sweep, report)".into()))?;
    match command {
        CommandKind::Minimize => {
            let rows = cfg.models()?.iter().map(|m| minimize_report(m, cfg)).collect::<Result<Vec<_>>>()?;
            report::render(&rows, cfg.format)
        }
        CommandKind::Sweep => report::render(&sweep(cfg)?, cfg.format),
        CommandKind::Spectrum => {
            let reps = cfg.models()?.iter().map(|m| spectrum_report(m, cfg)).collect::<Result<Vec<_>>>()?;
            match cfg.format {
                Format::Json => report::to_canonical_json(&reps),
                Format::Csv => report::to_csv(&reps.iter().flat_map(|r| r.rows()).collect::<Vec<_>>()),
            }
        }
        CommandKind::Validate => report::render(&validation_records(cfg)?, cfg.format),
        CommandKind::Report => {
            if cfg.format != Format::Json {
                return Err(Error::InvalidParameter("report is JSON only".into()));
            }
            report::to_canonical_json(&full_report(cfg)?)
        }
    }
}

fn split(cli: Cli) -> (Option<CommandKind>, Flags) {
    match cli.command {
        Some(Command::Minimize(f)) => (Some(CommandKind::Minimize), f),
        Some(Command::Spectrum(f)) => (Some(CommandKind::Spectrum), f),
        Some(Command::Validate(f)) => (Some(CommandKind::Validate), f),
        Some(Command::Sweep(f)) => (Some(CommandKind::Sweep), f),
        Some(Command::Report(f)) => (Some(CommandKind::Report), f),
        None => (None, cli.flags),
    }
}

/// Parse `argv` (including the program name), run, and write to the given
/// streams. Returns the exit status.
pub fn run_with_io<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let (command, flags) = split(cli);
    let cfg = match resolve(command, &flags) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = execute(&cfg).and_then(|text| report::emit_report(&text, cfg.out.as_deref(), stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let what = cfg.command.map_or("run", |c| c.as_str());
            let _ = writeln!(stderr, "error ({what}): {e}");
            // accepted arguments that still fail, inadmissible models included
            EXIT_FAILURE
        }
    }
}

/// Entry point used by the binary.
pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("varwork").chain(args.iter().copied());
        let code = run_with_io(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_syntax() {
        assert_eq!("0.1".parse::<Grid>().unwrap().0, vec![0.1]);
        assert_eq!("0.1, 0.2".parse::<Grid>().unwrap().0, vec![0.1, 0.2]);
        let g = "1e-4:1e-2:3".parse::<Grid>().unwrap().0;
        assert_eq!(g.len(), 3);
        assert!((g[1] - 1e-3).abs() < 1e-15);
        assert!("a".parse::<Grid>().is_err());
        assert!("0:1:3".parse::<Grid>().is_err());
        assert!("1:2".parse::<Grid>().is_err());
    }

    #[test]
    fn config_merge_and_defaults() {
        let flags = Flags { lambda: Some("0.5".into()), ..Default::default() };
        let cfg = resolve(Some(CommandKind::Minimize), &flags).unwrap();
        assert_eq!(cfg.lambda.0, vec![0.5]);
        assert_eq!(cfg.model, Family::Quartic);
        let cfg: RunConfig = serde_json::from_str(r#"{"command": "spectrum", "lambda": [0.1, 0.2], "model": "harmonic"}"#).unwrap();
        assert_eq!(cfg.command, Some(CommandKind::Spectrum));
        assert_eq!(cfg.models().unwrap().len(), 1);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
        let bad = RunConfig { tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let empty = RunConfig { lambda: Grid(vec![]), ..Default::default() };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn cli_examples() {
        let (code, out, _) = run(&["spectrum", "--model", "harmonic", "-k", "4"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let vals: Vec<f64> = v[0]["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        for (i, e) in vals.iter().enumerate() {
            assert!((e - (i as f64 + 0.5)).abs() < 1e-12);
        }
        let (code, out, _) = run(&["minimize", "--model", "quartic", "--lambda", "0.1", "--family", "gaussian"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let alpha = v[0]["params_opt"]["params"]["alpha"].as_f64().unwrap();
        assert_eq!(alpha, crate::optimize::cardano_root(0.1).unwrap());
        assert!((v[0]["oracle"]["gap"].as_f64().unwrap() - 1.161e-3).abs() < 1e-5);
    }

    #[test]
    fn usage_and_failure_codes() {
        assert_eq!(run(&["frobnicate"]).0, 1);
        assert_eq!(run(&["minimize", "--bogus"]).0, 1);
        assert_eq!(run(&["minimize", "--lambda", "x"]).0, 1);
        assert_eq!(run(&["minimize", "--model", "quartic", "--lambda", "-1"]).0, 2);
        assert_eq!(run(&["minimize", "--family", "squeezed", "--formula", "GaussQuartic"]).0, 2);
        assert_eq!(run(&["validate"]).0, 1);
        assert_eq!(run(&["report", "--format", "csv"]).0, 1);
        assert_eq!(run(&[]).0, 1);
        assert_eq!(run(&["--help"]).0, 0);
        // Fock cap too small to converge: computation failure
        let (code, _, err) = run(&["spectrum", "--lambda", "1", "--truncation", "32", "-k", "3"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn validate_filter_and_csv() {
        let (code, out, _) = run(&["validate", "--formula", "NormSquaredPaper", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("formula,quantity,params,paper_value"));
        assert!(lines[1..].iter().all(|l| l.starts_with("NormSquaredPaper,norm_squared")));
    }

    #[test]
    fn sweep_keeps_grid_order() {
        let (code, out, err) = run(&["sweep", "--lambda", "1e-3:1:20", "--format", "csv"]);
        assert_eq!(code, 0, "{err}");
        let rows: Vec<&str> = out.lines().skip(1).collect();
        assert_eq!(rows.len(), 20);
        let lambdas: Vec<f64> = rows.iter().map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
    }
}
