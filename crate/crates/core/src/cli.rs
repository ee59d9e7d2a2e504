//! Scenario files, run orchestration and on-disk artifacts.
//!
//! A scenario is a JSON document with a `schema_version`, the full
//! [`EnergySystem`], optional solver overrides and the list of artifacts to
//! write. Any numeric series may be given inline or as a sidecar reference:
//!
//! ```json
//! {"csv": "loads_48.csv", "column": "electricity"}
//! {"repeat": 0.0, "count": 48}
//! ```
//!
//! Sidecar paths are relative to the scenario file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analyze::{extract_report, RunReport};
use crate::formulate::{compile, CompileError};
use crate::lp::LinearProgram;
use crate::model::{system_dimensions, validate_system, EnergySystem, Severity, ValidationReport};
use crate::solver::{check_certificate, solve, SolveStatus, SolverConfig};

pub const SCHEMA_VERSION: u64 = 1;

/// Process exit codes.
pub mod exit {
    pub const OPTIMAL: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const UNBOUNDED: i32 = 4;
    pub const LIMIT: i32 = 5;
    pub const SCHEMA: i32 = 6;
    pub const INVALID: i32 = 7;
    pub const IO: i32 = 8;
    /// `--verify` found a residual above tolerance.
    pub const VERIFY: i32 = 9;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u64,
    pub system: EnergySystem,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

impl Scenario {
    pub fn new(system: EnergySystem) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            system,
            solver: SolverConfig::default(),
            outputs: Outputs::default(),
        }
    }
}

/// Artifacts written by [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub schedule_csv: bool,
    pub fill_csv: bool,
    pub summary: bool,
    pub lp_export: bool,
    pub plot_data: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            schedule_csv: true,
            fill_csv: true,
            summary: true,
            lp_export: false,
            plot_data: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("validation failed:\n{0}")]
    Invalid(ValidationReport),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io { .. } => exit::IO,
            ScenarioError::Parse(_) => exit::PARSE,
            ScenarioError::Schema(_) => exit::SCHEMA,
            ScenarioError::Invalid(_) => exit::INVALID,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads, resolves sidecars, checks the schema and validates the system.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let sc = parse_scenario(&text, base)?;
    let report = validate_system(&sc.system);
    for w in report
        .violations
        .iter()
        .filter(|v| v.severity == Severity::Warning)
    {
        warn!("{w}");
    }
    if !report.is_valid() {
        return Err(ScenarioError::Invalid(report));
    }
    sc.solver
        .validate()
        .map_err(|e| ScenarioError::Schema(format!("solver: {e}")))?;
    Ok(sc)
}

/// Parses scenario text without validating the system.
pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario, ScenarioError> {
    let mut doc: Value =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    match doc.get("schema_version") {
        None => {
            return Err(ScenarioError::Schema(
                "missing field `schema_version`".into(),
            ))
        }
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(ScenarioError::Schema(format!(
                "schema_version {v} is not supported (expected {SCHEMA_VERSION})"
            )))
        }
    }
    resolve_sidecars(&mut doc, base_dir, "")?;
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let at = e.path().to_string();
        ScenarioError::Schema(format!("at `{at}`: {}", e.inner()))
    })
}

/// Canonical JSON form; loading it back reproduces the same scenario.
pub fn to_canonical_json(sc: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(sc).expect("scenario serialises");
    s.push('\n');
    s
}

fn resolve_sidecars(v: &mut Value, base: &Path, at: &str) -> Result<(), ScenarioError> {
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter_mut().enumerate() {
                resolve_sidecars(item, base, &format!("{at}[{i}]"))?;
            }
        }
        Value::Object(map) => {
            if map.contains_key("csv") {
                *v = read_sidecar(map, base, at)?;
            } else if map.contains_key("repeat") {
                let value = map["repeat"].clone();
                let count = map.get("count").and_then(Value::as_u64).ok_or_else(|| {
                    ScenarioError::Schema(format!("at `{at}`: repeat needs an integer `count`"))
                })?;
                if map.len() != 2 || !value.is_number() {
                    return Err(ScenarioError::Schema(format!(
                        "at `{at}`: repeat takes exactly a number and `count`"
                    )));
                }
                *v = Value::Array(vec![value; count as usize]);
            } else {
                for (k, item) in map.iter_mut() {
                    let sub = if at.is_empty() {
                        k.clone()
                    } else {
                        format!("{at}.{k}")
                    };
                    resolve_sidecars(item, base, &sub)?;
                }
            }
        }
        _ => {}
    }
    Ok(())
}

fn read_sidecar(
    map: &serde_json::Map<String, Value>,
    base: &Path,
    at: &str,
) -> Result<Value, ScenarioError> {
    let (Some(file), Some(column)) = (
        map.get("csv").and_then(Value::as_str),
        map.get("column").and_then(Value::as_str),
    ) else {
        return Err(ScenarioError::Schema(format!(
            "at `{at}`: sidecar needs string fields `csv` and `column`"
        )));
    };
    if map.len() != 2 {
        return Err(ScenarioError::Schema(format!(
            "at `{at}`: sidecar takes only `csv` and `column`"
        )));
    }
    let path = base.join(file);
    let text = fs::read_to_string(&path).map_err(io_error(&path))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| {
            ScenarioError::Schema(format!(
                "at `{at}`: {} has no column `{column}`",
                path.display()
            ))
        })?;
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
        let cell = record.get(idx).unwrap_or("").trim();
        let x: f64 = cell.parse().map_err(|_| {
            ScenarioError::Parse(format!(
                "{} data row {}: `{cell}` in column `{column}` is not a number",
                path.display(),
                line + 1
            ))
        })?;
        out.push(Value::from(x));
    }
    Ok(Value::Array(out))
}

/// Command-line adjustments to a scenario run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for artifacts; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub mip_gap: Option<f64>,
    pub seed: Option<u64>,
    pub export_lp: bool,
    /// Fail unless the independent residual check and the solver certificate both pass.
    pub verify: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub status: SolveStatus,
    pub exit_code: i32,
    /// Present whenever the solver returned an assignment.
    pub report: Option<RunReport>,
    pub summary: String,
    pub written: Vec<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver: {0}")]
    Config(#[from] crate::solver::ConfigError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Compile(_) | RunError::Config(_) => exit::INVALID,
            RunError::Io { .. } => exit::IO,
        }
    }
}

pub fn status_exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal => exit::OPTIMAL,
        SolveStatus::Infeasible => exit::INFEASIBLE,
        SolveStatus::Unbounded => exit::UNBOUNDED,
        SolveStatus::GapLimit | SolveStatus::IterationLimit => exit::LIMIT,
    }
}

/// Compiles, solves and reports; writes the requested artifacts.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let sys = &sc.system;
    let mut cfg = sc.solver.clone();
    if let Some(g) = opts.mip_gap {
        cfg.mip_gap = g;
    }
    if let Some(s) = opts.seed {
        cfg.deterministic_seed = s;
    }
    cfg.validate()?;

    let prog = compile(sys)?;
    for w in &prog.warnings {
        warn!("{}: {}", w.code, w.message);
    }
    info!(
        "compiled {} variables ({} integer), {} rows, {} nonzeros",
        prog.num_vars(),
        prog.vars.iter().filter(|v| v.integer).count(),
        prog.num_rows(),
        prog.num_nonzeros()
    );
    let sol = solve(&prog, &cfg);
    info!(
        "solver finished: {:?}, objective {}, {} iterations, {} nodes",
        sol.status, sol.objective, sol.stats.iterations, sol.stats.nodes
    );

    let report = extract_report(sys, &prog, &sol).ok();
    let mut exit_code = status_exit_code(sol.status);
    if opts.verify {
        let cert = check_certificate(&prog, &sol);
        let residuals_ok = report.as_ref().map_or(true, |r| r.verification.passed());
        if !cert.passed() || !residuals_ok {
            warn!("verification failed");
            if exit_code == exit::OPTIMAL {
                exit_code = exit::VERIFY;
            }
        }
    }
    let summary = match &report {
        Some(r) => summary_text(sys, r),
        None => format!("status: {:?}\n", sol.status),
    };

    let mut written = Vec::new();
    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.clone(),
            source,
        })?;
        let mut put = |name: &str, body: String| -> Result<(), RunError> {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|source| RunError::Io {
                path: path.clone(),
                source,
            })?;
            written.push(path);
            Ok(())
        };
        if sc.outputs.summary {
            put("summary.txt", summary.clone())?;
        }
        if sc.outputs.lp_export || opts.export_lp {
            put("model.lp", prog.to_lp_format())?;
        }
        if let Some(r) = &report {
            if sc.outputs.summary {
                put("summary.json", json_line(&summary_json(r)))?;
            }
            if sc.outputs.schedule_csv {
                put("schedule.csv", schedule_csv(sys, r))?;
            }
            if sc.outputs.fill_csv && !sys.storages.is_empty() {
                put("fill.csv", fill_csv(sys, r))?;
            }
            if sc.outputs.plot_data {
                put("plot_data.json", json_line(&plot_data(sys, r)))?;
            }
        }
    }
    Ok(RunOutcome {
        status: sol.status,
        exit_code,
        report,
        summary,
        written,
    })
}

/// Compiled program for a scenario, for inspection and export.
pub fn compile_scenario(sc: &Scenario) -> Result<LinearProgram, CompileError> {
    compile(&sc.system)
}

/// Human-readable dimensions of the system and of its compiled program.
pub fn dimensions_text(sc: &Scenario) -> Result<String, CompileError> {
    let d = system_dimensions(&sc.system);
    let prog = compile(&sc.system)?;
    let mut s = String::new();
    writeln!(s, "steps: {}", d.steps).unwrap();
    writeln!(s, "nodes: {}", d.nodes).unwrap();
    writeln!(s, "components: {}", d.components).unwrap();
    writeln!(s, "storages: {}", d.storages).unwrap();
    writeln!(s, "periods: {}", d.periods).unwrap();
    writeln!(s, "variables: {}", prog.num_vars()).unwrap();
    writeln!(
        s,
        "integer_variables: {}",
        prog.vars.iter().filter(|v| v.integer).count()
    )
    .unwrap();
    writeln!(s, "rows: {}", prog.num_rows()).unwrap();
    writeln!(s, "nonzeros: {}", prog.num_nonzeros()).unwrap();
    Ok(s)
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialises");
    s.push('\n');
    s
}

/// Shortest round-trip decimal; `-0` prints as `0`.
fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

fn write_table(columns: Vec<(String, Vec<f64>)>, steps: usize) -> String {
    let mut columns = columns;
    columns.sort_by(|a, b| a.0.cmp(&b.0));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["time".to_string()];
    header.extend(columns.iter().map(|c| c.0.clone()));
    w.write_record(&header).unwrap();
    for t in 0..steps {
        let mut row = vec![t.to_string()];
        row.extend(columns.iter().map(|c| num(c.1[t])));
        w.write_record(&row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Output-side power per component, plus `<id>/secondary` and `<id>/on` columns where present.
pub fn schedule_csv(sys: &EnergySystem, r: &RunReport) -> String {
    let mut cols: Vec<(String, Vec<f64>)> = r
        .schedules
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    cols.extend(
        r.secondary_outputs
            .iter()
            .map(|(k, v)| (format!("{k}/secondary"), v.clone())),
    );
    cols.extend(
        r.units_on
            .iter()
            .map(|(k, v)| (format!("{k}/on"), v.clone())),
    );
    write_table(cols, sys.time_grid.num_steps())
}

/// `<id>/charge`, `<id>/discharge` and `<id>/fill` per storage; fill is the level after the step.
pub fn fill_csv(sys: &EnergySystem, r: &RunReport) -> String {
    let mut cols = Vec::new();
    for (id, s) in &r.storages {
        cols.push((format!("{id}/charge"), s.charge.clone()));
        cols.push((format!("{id}/discharge"), s.discharge.clone()));
        cols.push((format!("{id}/fill"), s.fill.clone()));
    }
    write_table(cols, sys.time_grid.num_steps())
}

pub fn summary_text(sys: &EnergySystem, r: &RunReport) -> String {
    let mut s = String::new();
    writeln!(s, "status: {:?}", r.status).unwrap();
    writeln!(s, "objective: {:.6}", r.objective).unwrap();
    writeln!(s, "bound: {:.6}", r.bound).unwrap();
    writeln!(s, "gap: {:.3e}", r.gap).unwrap();
    writeln!(s, "iterations: {}", r.iterations).unwrap();
    writeln!(s, "nodes: {}", r.nodes).unwrap();
    writeln!(s).unwrap();
    writeln!(s, "Installed capacities").unwrap();
    let width = r.installed.iter().map(|c| c.id.len()).max().unwrap_or(0);
    for c in &r.installed {
        let unit = if sys.storage(&c.id).is_some() {
            "MWh"
        } else {
            "MW"
        };
        write!(s, "  {:<width$}  {:>14.3} {unit}", c.id, c.total).unwrap();
        if !c.per_period.is_empty() {
            let per: Vec<String> = c.per_period.iter().map(|x| format!("{x:.3}")).collect();
            write!(s, "  per period [{}]", per.join(", ")).unwrap();
        }
        writeln!(s).unwrap();
    }
    writeln!(s).unwrap();
    writeln!(s, "Cost breakdown (EUR)").unwrap();
    for (name, v) in r.costs.entries() {
        writeln!(s, "  {name:<11}  {v:>16.3}").unwrap();
    }
    writeln!(s, "  {:<11}  {:>16.3}", "total", r.costs.total()).unwrap();
    writeln!(s).unwrap();
    writeln!(s, "emissions_kg: {:.6}", r.emissions_kg).unwrap();
    let v = &r.verification;
    let failing: Vec<String> = v.failing().map(|f| f.tag.to_string()).collect();
    if failing.is_empty() {
        writeln!(s, "verification: PASS (tolerance {:e})", v.tolerance).unwrap();
    } else {
        writeln!(
            s,
            "verification: FAIL {} (tolerance {:e})",
            failing.join(" "),
            v.tolerance
        )
        .unwrap();
    }
    s
}

fn summary_json(r: &RunReport) -> Value {
    serde_json::json!({
        "status": r.status,
        "objective": r.objective,
        "bound": r.bound,
        "gap": if r.gap.is_finite() { Value::from(r.gap) } else { Value::Null },
        "iterations": r.iterations,
        "nodes": r.nodes,
        "installed": r.installed,
        "costs": r.costs,
        "cost_total": r.costs.total(),
        "emissions_kg": r.emissions_kg,
        "statistics": r.statistics,
        "verification": r.verification,
    })
}

fn plot_data(sys: &EnergySystem, r: &RunReport) -> Value {
    let steps = sys.time_grid.num_steps();
    let mut start = Vec::with_capacity(steps);
    let mut h = 0.0;
    for t in 0..steps {
        start.push(h);
        h += sys.time_grid.dt(t);
    }
    let loads: std::collections::BTreeMap<&str, Vec<f64>> = sys
        .nodes
        .iter()
        .filter(|n| !n.boundary)
        .map(|n| (n.id.as_str(), (0..steps).map(|t| n.load.at(t)).collect()))
        .collect();
    serde_json::json!({
        "step_start_hours": start,
        "step_hours": sys.time_grid.step_durations,
        "loads": loads,
        "schedules": r.schedules,
        "secondary_outputs": r.secondary_outputs,
        "units_on": r.units_on,
        "storages": r.storages,
        "efficiencies": r.efficiencies,
    })
}

/// Validation-only check used by the `validate` command.
pub fn validate_scenario(sc: &Scenario) -> ValidationReport {
    validate_system(&sc.system)
}
