//! Model exchange and solver process driving: deterministic MPS/LP writers,
//! a subprocess runner built around a `{model}`/`{solution}` command template,
//! and a parser for the plain `name value` solution format.

use crate::error::{Error, Result};
use crate::milp::{MilpModel, Sense, VarKind};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

/// Name of the objective row in emitted files.
const OBJ_ROW: &str = "COST";

/// Model text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFormat {
    Mps,
    Lp,
}

/// How to run the external solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Shell command with `{model}` and `{solution}` placeholders.
    pub command_template: String,
    pub format: ModelFormat,
    /// Relative MIP gap requested from the solver.
    pub mip_gap_rel: f64,
    /// Wall-clock limit for one solve, seconds.
    pub time_limit_s: Option<f64>,
    pub threads: Option<usize>,
}

/// Environment variable holding the default command template.
pub const SOLVER_CMD_ENV: &str = "RDPLAN_SOLVER_CMD";
/// Environment variables passed to the child with gap/limit/thread settings.
pub const MIP_GAP_ENV: &str = "RDPLAN_MIP_GAP";
pub const TIME_LIMIT_ENV: &str = "RDPLAN_TIME_LIMIT";
pub const THREADS_ENV: &str = "RDPLAN_THREADS";

impl SolverConfig {
    pub fn new(command_template: impl Into<String>) -> Result<Self> {
        let cfg = SolverConfig {
            command_template: command_template.into(),
            format: ModelFormat::Mps,
            mip_gap_rel: 1e-4,
            time_limit_s: None,
            threads: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read the command template from `RDPLAN_SOLVER_CMD`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(SOLVER_CMD_ENV) {
            Ok(tpl) => SolverConfig::new(tpl),
            Err(_) => Err(Error::Config(format!(
                "no solver configured: set {SOLVER_CMD_ENV} to a command with \
                 {{model}} and {{solution}} placeholders"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.command_template.contains("{model}")
            || !self.command_template.contains("{solution}")
        {
            return Err(Error::Config(format!(
                "solver command must contain {{model}} and {{solution}}: {}",
                self.command_template
            )));
        }
        if self.mip_gap_rel < 0.0 {
            return Err(Error::Config("mip gap must be ≥ 0".into()));
        }
        Ok(())
    }
}

/// Outcome class of one solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    FeasibleGap,
    Infeasible,
    Timeout,
    Error,
}

impl SolveStatus {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "optimal" => SolveStatus::Optimal,
            "feasible-gap" => SolveStatus::FeasibleGap,
            "infeasible" => SolveStatus::Infeasible,
            "timeout" => SolveStatus::Timeout,
            "error" => SolveStatus::Error,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleGap => "feasible-gap",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Timeout => "timeout",
            SolveStatus::Error => "error",
        }
    }
}

/// Parsed solver output.
#[derive(Debug, Clone)]
pub struct SolutionRecord {
    pub status: SolveStatus,
    /// Objective value; NaN when the run produced no incumbent.
    pub objective: f64,
    /// Values keyed by canonical variable name.
    pub values: HashMap<String, f64>,
    pub wall_time_s: f64,
    pub gap: Option<f64>,
}

impl SolutionRecord {
    pub fn has_incumbent(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::FeasibleGap)
    }

    pub fn value(&self, name: &str) -> Result<f64> {
        self.values
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string() // normalizes -0
    } else {
        format!("{x}")
    }
}

/// Merge duplicate coefficients per constraint, preserving first-seen order.
fn merged_terms(terms: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut order: Vec<usize> = Vec::new();
    let mut acc: HashMap<usize, f64> = HashMap::new();
    for &(id, c) in terms {
        if !acc.contains_key(&id) {
            order.push(id);
        }
        *acc.entry(id).or_insert(0.0) += c;
    }
    order.into_iter().map(|id| (id, acc[&id])).collect()
}

/// Render the model as MPS text (extended fixed form: whitespace-separated
/// fields, free-length names, minimize objective).
pub fn to_mps(model: &MilpModel) -> Result<String> {
    model.check()?;
    let mut out = String::new();
    out.push_str("NAME          RDPLAN\n");
    out.push_str("ROWS\n");
    out.push_str(&format!(" N  {OBJ_ROW}\n"));
    for con in &model.constraints {
        let sense = match con.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {sense}  {}", con.name);
    }

    // transpose: per-variable entries in constraint declaration order
    let mut per_var: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.variables.len()];
    for (ci, con) in model.constraints.iter().enumerate() {
        for (id, coeff) in merged_terms(&con.terms) {
            if coeff != 0.0 {
                per_var[id].push((ci, coeff));
            }
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for (vi, v) in model.variables.iter().enumerate() {
        let want_int = v.kind == VarKind::Binary;
        if want_int != in_int {
            let marker = if want_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(
                out,
                "    MARKER                 'MARKER'                 {marker}"
            );
            in_int = want_int;
        }
        // objective entry always present so every column is declared
        let _ = writeln!(out, "    {}  {OBJ_ROW}  {}", v.name, fmt_num(v.obj));
        for &(ci, coeff) in &per_var[vi] {
            let _ = writeln!(
                out,
                "    {}  {}  {}",
                v.name,
                model.constraints[ci].name,
                fmt_num(coeff)
            );
        }
    }
    if in_int {
        out.push_str("    MARKER                 'MARKER'                 'INTEND'\n");
    }

    out.push_str("RHS\n");
    for con in &model.constraints {
        if con.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", con.name, fmt_num(con.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for v in &model.variables {
        match v.kind {
            VarKind::Binary => {
                let _ = writeln!(out, " BV BND  {}", v.name);
            }
            VarKind::Continuous => {
                let (lo, hi) = (v.lower, v.upper);
                if lo == hi {
                    let _ = writeln!(out, " FX BND  {}  {}", v.name, fmt_num(lo));
                } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                    let _ = writeln!(out, " FR BND  {}", v.name);
                } else {
                    if lo == f64::NEG_INFINITY {
                        let _ = writeln!(out, " MI BND  {}", v.name);
                    } else if lo != 0.0 {
                        let _ = writeln!(out, " LO BND  {}  {}", v.name, fmt_num(lo));
                    }
                    if hi != f64::INFINITY {
                        let _ = writeln!(out, " UP BND  {}  {}", v.name, fmt_num(hi));
                    }
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

/// Render the model as CPLEX-style LP text.
pub fn to_lp(model: &MilpModel) -> Result<String> {
    model.check()?;
    let mut out = String::new();
    out.push_str("\\ co-planning model\nMinimize\n obj:");
    let mut first = true;
    for v in &model.variables {
        if v.obj != 0.0 {
            let sign = if v.obj < 0.0 {
                " - "
            } else if first {
                " "
            } else {
                " + "
            };
            let _ = write!(out, "{sign}{} {}", fmt_num(v.obj.abs()), v.name);
            first = false;
        }
    }
    if first {
        out.push_str(" 0 dummy_zero");
    }
    out.push_str("\nSubject To\n");
    for con in &model.constraints {
        let _ = write!(out, " {}:", con.name);
        let mut first = true;
        for (id, coeff) in merged_terms(&con.terms) {
            if coeff == 0.0 {
                continue;
            }
            let sign = if coeff < 0.0 {
                " - "
            } else if first {
                " "
            } else {
                " + "
            };
            let _ = write!(out, "{sign}{} {}", fmt_num(coeff.abs()), model.variables[id].name);
            first = false;
        }
        if first {
            out.push_str(" 0 dummy_zero");
        }
        let op = match con.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", fmt_num(con.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.kind == VarKind::Binary {
            continue; // the Binaries section implies [0, 1]
        }
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if v.lower == v.upper {
            let _ = writeln!(out, " {} = {}", v.name, fmt_num(v.lower));
        } else {
            let lo = if v.lower == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                fmt_num(v.lower)
            };
            let hi = if v.upper == f64::INFINITY {
                "+inf".to_string()
            } else {
                fmt_num(v.upper)
            };
            let _ = writeln!(out, " {lo} <= {} <= {hi}", v.name);
        }
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

/// Write the model to `path` in the requested format.
pub fn write_model(model: &MilpModel, format: ModelFormat, path: &Path) -> Result<()> {
    let text = match format {
        ModelFormat::Mps => to_mps(model)?,
        ModelFormat::Lp => to_lp(model)?,
    };
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Parse MPS text written by [`to_mps`] back into a model (test support and
/// round-trip verification; handles exactly the subset this crate emits).
pub fn read_mps(text: &str) -> Result<MilpModel> {
    use crate::milp::ModelMeta;
    let mut model = MilpModel::new(ModelMeta::default());
    let mut section = String::new();
    let mut row_sense: Vec<(String, Sense)> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut terms: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rhs: HashMap<String, f64> = HashMap::new();
    let mut obj: HashMap<String, f64> = HashMap::new();
    let mut var_order: Vec<String> = Vec::new();
    let mut var_kind: HashMap<String, VarKind> = HashMap::new();
    let mut var_terms: HashMap<String, Vec<(usize, f64)>> = HashMap::new();
    let mut bounds: HashMap<String, (f64, f64)> = HashMap::new();
    let mut explicit_bounds: Vec<(String, String, Option<f64>)> = Vec::new();
    let mut in_int = false;

    let err = |line: usize, reason: &str| Error::Parse {
        path: "<mps>".into(),
        line,
        reason: reason.to_string(),
    };

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let head = !raw.starts_with(' ');
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if head {
            section = fields[0].to_string();
            continue;
        }
        match section.as_str() {
            "ROWS" => {
                if fields.len() != 2 {
                    return Err(err(line, "ROWS entry needs sense and name"));
                }
                match fields[0] {
                    "N" => {}
                    s => {
                        let sense = match s {
                            "L" => Sense::Le,
                            "G" => Sense::Ge,
                            "E" => Sense::Eq,
                            _ => return Err(err(line, "unknown row sense")),
                        };
                        row_index.insert(fields[1].to_string(), row_sense.len());
                        row_sense.push((fields[1].to_string(), sense));
                        terms.push(Vec::new());
                    }
                }
            }
            "COLUMNS" => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match fields[2] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        _ => return Err(err(line, "unknown marker")),
                    }
                    continue;
                }
                if fields.len() != 3 {
                    return Err(err(line, "COLUMNS entry needs name, row, value"));
                }
                let (name, row) = (fields[0], fields[1]);
                let value: f64 = fields[2].parse().map_err(|_| err(line, "bad number"))?;
                if !var_kind.contains_key(name) {
                    var_order.push(name.to_string());
                    var_kind.insert(
                        name.to_string(),
                        if in_int {
                            VarKind::Binary
                        } else {
                            VarKind::Continuous
                        },
                    );
                }
                if row == OBJ_ROW {
                    *obj.entry(name.to_string()).or_insert(0.0) += value;
                } else {
                    let &ri = row_index
                        .get(row)
                        .ok_or_else(|| err(line, "unknown row"))?;
                    var_terms.entry(name.to_string()).or_default().push((ri, value));
                }
            }
            "RHS" => {
                if fields.len() != 3 {
                    return Err(err(line, "RHS entry needs set, row, value"));
                }
                let value: f64 = fields[2].parse().map_err(|_| err(line, "bad number"))?;
                rhs.insert(fields[1].to_string(), value);
            }
            "BOUNDS" => {
                let (kind, name, value) = match fields.len() {
                    3 => (fields[0], fields[2], None),
                    4 => (
                        fields[0],
                        fields[2],
                        Some(fields[3].parse::<f64>().map_err(|_| err(line, "bad number"))?),
                    ),
                    _ => return Err(err(line, "BOUNDS entry malformed")),
                };
                explicit_bounds.push((kind.to_string(), name.to_string(), value));
            }
            "NAME" | "ENDATA" => {}
            _ => return Err(err(line, "unknown section")),
        }
    }

    for name in &var_order {
        let kind = var_kind[name];
        let default = match kind {
            VarKind::Binary => (0.0, 1.0),
            VarKind::Continuous => (0.0, f64::INFINITY),
        };
        bounds.insert(name.clone(), default);
    }
    for (kind, name, value) in explicit_bounds {
        let b = bounds
            .get_mut(&name)
            .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
        match (kind.as_str(), value) {
            ("BV", _) => *b = (0.0, 1.0),
            ("FR", _) => *b = (f64::NEG_INFINITY, f64::INFINITY),
            ("MI", _) => b.0 = f64::NEG_INFINITY,
            ("LO", Some(v)) => b.0 = v,
            ("UP", Some(v)) => b.1 = v,
            ("FX", Some(v)) => *b = (v, v),
            _ => {
                return Err(Error::Parse {
                    path: "<mps>".into(),
                    line: 0,
                    reason: format!("unsupported bound {kind}"),
                })
            }
        }
    }

    for name in &var_order {
        let (lo, hi) = bounds[name];
        let id = model.add_var(
            name.clone(),
            var_kind[name],
            lo,
            hi,
            obj.get(name).copied().unwrap_or(0.0),
        );
        for &(ri, coeff) in var_terms.get(name).into_iter().flatten() {
            terms[ri].push((id, coeff));
        }
    }
    for (ri, (name, sense)) in row_sense.into_iter().enumerate() {
        model.add_con(
            name.clone(),
            std::mem::take(&mut terms[ri]),
            sense,
            rhs.get(&name).copied().unwrap_or(0.0),
        );
    }
    Ok(model)
}

/// Parse a solution file: `# objective <v>`, `# status <s>`, optional
/// `# gap <g>`, then one `name value` line per variable.
pub fn parse_solution(path: &Path, model: &MilpModel) -> Result<SolutionRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_solution_text(&text, &path.display().to_string(), model)
}

fn parse_solution_text(text: &str, origin: &str, model: &MilpModel) -> Result<SolutionRecord> {
    let err = |line: usize, reason: String| Error::Parse {
        path: origin.to_string(),
        line,
        reason,
    };
    let mut status: Option<SolveStatus> = None;
    let mut objective = f64::NAN;
    let mut gap = None;
    let mut values: HashMap<String, f64> = HashMap::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["objective", v] => {
                    objective = v
                        .parse()
                        .map_err(|_| err(line, format!("bad objective value {v}")))?;
                }
                ["status", s] => {
                    status = Some(
                        SolveStatus::parse(s)
                            .ok_or_else(|| err(line, format!("unknown status {s}")))?,
                    );
                }
                ["gap", g] => {
                    gap = Some(
                        g.parse()
                            .map_err(|_| err(line, format!("bad gap value {g}")))?,
                    );
                }
                _ => {} // other comments ignored
            }
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(line, format!("expected `name value`, got `{t}`")));
        }
        let name = fields[0];
        let var = model
            .var(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut v: f64 = fields[1]
            .parse()
            .map_err(|_| err(line, format!("bad value for {name}")))?;
        if var.kind == VarKind::Binary {
            // snap solver noise onto the lattice
            if (v - 0.0).abs() <= 1e-6 {
                v = 0.0;
            } else if (v - 1.0).abs() <= 1e-6 {
                v = 1.0;
            } else {
                return Err(err(line, format!("binary {name} has value {v}")));
            }
        } else {
            let tol = 1e-5;
            if v < var.lower - tol || v > var.upper + tol {
                return Err(err(
                    line,
                    format!(
                        "{name} = {v} outside bounds [{}, {}]",
                        var.lower, var.upper
                    ),
                ));
            }
            v = v.clamp(var.lower, var.upper);
        }
        values.insert(name.to_string(), v);
    }

    let status = status.ok_or_else(|| err(0, "missing `# status` line".into()))?;
    if status == SolveStatus::Optimal {
        for v in &model.variables {
            if !values.contains_key(&v.name) {
                return Err(Error::UnknownVariable(format!(
                    "{} missing from optimal solution",
                    v.name
                )));
            }
        }
        if objective.is_nan() {
            return Err(err(0, "optimal solution without `# objective`".into()));
        }
    }
    Ok(SolutionRecord {
        status,
        objective,
        values,
        wall_time_s: 0.0,
        gap,
    })
}

/// Write the model, run the configured solver command, parse the solution.
pub fn solve(model: &MilpModel, config: &SolverConfig) -> Result<SolutionRecord> {
    config.validate()?;
    let dir = tempfile::Builder::new()
        .prefix("rdplan-solve-")
        .tempdir()
        .map_err(|e| Error::io("solver scratch dir", e))?;
    let ext = match config.format {
        ModelFormat::Mps => "mps",
        ModelFormat::Lp => "lp",
    };
    let model_path = dir.path().join(format!("model.{ext}"));
    let solution_path = dir.path().join("solution.txt");
    write_model(model, config.format, &model_path)?;

    let cmd = config
        .command_template
        .replace("{model}", &model_path.display().to_string())
        .replace("{solution}", &solution_path.display().to_string());

    let started = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .env(MIP_GAP_ENV, format!("{}", config.mip_gap_rel))
        .env(
            TIME_LIMIT_ENV,
            config
                .time_limit_s
                .map(|t| format!("{t}"))
                .unwrap_or_default(),
        )
        .env(
            THREADS_ENV,
            config.threads.map(|t| t.to_string()).unwrap_or_default(),
        )
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::io("spawning solver", e))?;

    let status = loop {
        if let Some(st) = child
            .try_wait()
            .map_err(|e| Error::io("waiting for solver", e))?
        {
            break st;
        }
        if let Some(limit) = config.time_limit_s {
            // grace factor: the adapter should stop itself first
            if started.elapsed().as_secs_f64() > limit * 2.0 + 10.0 {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::Timeout { limit_s: limit });
            }
        }
        std::thread::sleep(Duration::from_millis(20));
    };
    let wall = started.elapsed().as_secs_f64();

    if !solution_path.exists() {
        let mut stderr = String::new();
        if let Some(mut pipe) = child.stderr.take() {
            use std::io::Read;
            let _ = pipe.read_to_string(&mut stderr);
        }
        let tail: String = stderr
            .lines()
            .rev()
            .take(10)
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect::<Vec<_>>()
            .join("\n");
        return Err(Error::SolverCrashed {
            code: status.code(),
            stderr: tail,
        });
    }
    let mut record = parse_solution(&solution_path, model)?;
    record.wall_time_s = wall;
    Ok(record)
}

/// Convenience: temp path helper for callers that keep artifacts.
pub fn default_model_filename(format: ModelFormat) -> PathBuf {
    match format {
        ModelFormat::Mps => PathBuf::from("model.mps"),
        ModelFormat::Lp => PathBuf::from("model.lp"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{ModelMeta, VarKind};

    fn one_var_model() -> MilpModel {
        let mut m = MilpModel::new(ModelMeta::default());
        let x = m.add_var("X".into(), VarKind::Continuous, 0.0, f64::INFINITY, 1.0);
        m.add_con("XMIN".into(), vec![(x, 1.0)], Sense::Ge, 1.0);
        m
    }

    fn mixed_model() -> MilpModel {
        let mut m = MilpModel::new(ModelMeta::default());
        let y = m.add_var("Y_L01".into(), VarKind::Binary, 0.0, 1.0, 5.0);
        let x = m.add_var("X".into(), VarKind::Continuous, -2.0, 10.0, 2.0);
        let z = m.add_var("Z".into(), VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY, 0.0);
        m.add_con("C1".into(), vec![(x, 1.0), (y, 3.0)], Sense::Le, 6.0);
        m.add_con("C2".into(), vec![(z, 1.0), (x, -1.0)], Sense::Eq, 0.0);
        m
    }

    #[test]
    fn one_var_mps_is_hand_checkable() {
        let text = to_mps(&one_var_model()).unwrap();
        let want = "NAME          RDPLAN\n\
                    ROWS\n\
                    \x20N  COST\n\
                    \x20G  XMIN\n\
                    COLUMNS\n\
                    \x20   X  COST  1\n\
                    \x20   X  XMIN  1\n\
                    RHS\n\
                    \x20   RHS  XMIN  1\n\
                    BOUNDS\n\
                    ENDATA\n";
        assert_eq!(text, want);
    }

    #[test]
    fn binary_gets_markers_and_bv() {
        let text = to_mps(&mixed_model()).unwrap();
        assert!(text.contains("'INTORG'"));
        assert!(text.contains("'INTEND'"));
        assert!(text.contains(" BV BND  Y_L01"));
        // INTORG appears before the binary column, INTEND after
        let io = text.find("'INTORG'").unwrap();
        let col = text.find("Y_L01  COST").unwrap();
        let ie = text.find("'INTEND'").unwrap();
        assert!(io < col && col < ie);
    }

    #[test]
    fn emission_is_deterministic() {
        let a = to_mps(&mixed_model()).unwrap();
        let b = to_mps(&mixed_model()).unwrap();
        assert_eq!(a, b);
        let la = to_lp(&mixed_model()).unwrap();
        let lb = to_lp(&mixed_model()).unwrap();
        assert_eq!(la, lb);
    }

    #[test]
    fn mps_round_trip_preserves_everything() {
        let m = mixed_model();
        let back = read_mps(&to_mps(&m).unwrap()).unwrap();
        assert_eq!(back.n_vars(), m.n_vars());
        for (a, b) in m.variables.iter().zip(&back.variables) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.kind, b.kind);
            assert_eq!(a.lower, b.lower);
            assert_eq!(a.upper, b.upper);
            assert_eq!(a.obj, b.obj);
        }
        assert_eq!(back.constraints.len(), m.constraints.len());
        for (a, b) in m.constraints.iter().zip(&back.constraints) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.sense, b.sense);
            assert_eq!(a.rhs, b.rhs);
            let mut at = a.terms.clone();
            let mut bt = b.terms.clone();
            at.sort_by_key(|t| t.0);
            bt.sort_by_key(|t| t.0);
            assert_eq!(at, bt);
        }
    }

    #[test]
    fn lp_text_structure() {
        let text = to_lp(&mixed_model()).unwrap();
        assert!(text.starts_with("\\ co-planning model\nMinimize\n obj: 5 Y_L01 + 2 X\n"));
        assert!(text.contains(" C1: 1 X + 3 Y_L01 <= 6\n"));
        assert!(text.contains(" C2: 1 Z - 1 X = 0\n"));
        assert!(text.contains(" -2 <= X <= 10\n"));
        assert!(text.contains(" Z free\n"));
        assert!(text.contains("Binaries\n Y_L01\n"));
        assert!(text.ends_with("End\n"));
    }

    #[test]
    fn solution_basic_parse() {
        let m = mixed_model();
        let rec = parse_solution_text(
            "# status optimal\n# objective 9\nY_L01 1\nX 2\nZ 2\n",
            "t",
            &m,
        )
        .unwrap();
        assert_eq!(rec.status, SolveStatus::Optimal);
        assert_eq!(rec.objective, 9.0);
        assert_eq!(rec.values["Y_L01"], 1.0);
    }

    #[test]
    fn binary_noise_snapped() {
        let m = mixed_model();
        let rec = parse_solution_text(
            "# status optimal\n# objective 4\nY_L01 1e-9\nX 2\nZ 2\n",
            "t",
            &m,
        )
        .unwrap();
        assert_eq!(rec.values["Y_L01"], 0.0);
        let rec = parse_solution_text(
            "# status optimal\n# objective 9\nY_L01 0.9999997\nX 2\nZ 2\n",
            "t",
            &m,
        )
        .unwrap();
        assert_eq!(rec.values["Y_L01"], 1.0);
    }

    #[test]
    fn fractional_binary_rejected() {
        let m = mixed_model();
        let err = parse_solution_text(
            "# status optimal\n# objective 4\nY_L01 0.5\nX 2\nZ 2\n",
            "t",
            &m,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn missing_variable_under_optimal() {
        let m = mixed_model();
        let err = parse_solution_text("# status optimal\n# objective 4\nY_L01 0\nX 2\n", "t", &m)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(_)), "{err}");
    }

    #[test]
    fn unknown_name_rejected() {
        let m = mixed_model();
        let err =
            parse_solution_text("# status optimal\n# objective 4\nNOPE 1\n", "t", &m).unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(_)), "{err}");
    }

    #[test]
    fn out_of_bounds_value_rejected() {
        let m = mixed_model();
        let err = parse_solution_text(
            "# status optimal\n# objective 4\nY_L01 0\nX 11\nZ 0\n",
            "t",
            &m,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn infeasible_record_needs_no_values() {
        let m = mixed_model();
        let rec = parse_solution_text("# status infeasible\n", "t", &m).unwrap();
        assert_eq!(rec.status, SolveStatus::Infeasible);
        assert!(rec.objective.is_nan());
        assert!(rec.values.is_empty());
    }

    #[test]
    fn config_requires_placeholders() {
        assert!(SolverConfig::new("solver {model}").is_err());
        assert!(SolverConfig::new("solver {model} {solution}").is_ok());
    }

    #[test]
    fn solve_via_fake_echo_solver() {
        let m = one_var_model();
        let cfg = SolverConfig::new(
            "printf '# status optimal\\n# objective 1\\nX 1\\n' > {solution} && cat {model} > /dev/null",
        )
        .unwrap();
        let rec = solve(&m, &cfg).unwrap();
        assert_eq!(rec.status, SolveStatus::Optimal);
        assert_eq!(rec.objective, 1.0);
        assert_eq!(rec.values["X"], 1.0);
        assert!(rec.wall_time_s >= 0.0);
    }

    #[test]
    fn crash_without_solution_reported() {
        let m = one_var_model();
        let cfg =
            SolverConfig::new("echo boom >&2; test -f {model}; rm -f {solution}; exit 7").unwrap();
        let err = solve(&m, &cfg).unwrap_err();
        match err {
            Error::SolverCrashed { code, stderr } => {
                assert_eq!(code, Some(7));
                assert!(stderr.contains("boom"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn gap_and_feasible_status() {
        let m = one_var_model();
        let rec = parse_solution_text(
            "# status feasible-gap\n# objective 1.001\n# gap 0.001\nX 1.001\n",
            "t",
            &m,
        )
        .unwrap();
        assert_eq!(rec.status, SolveStatus::FeasibleGap);
        assert_eq!(rec.gap, Some(0.001));
    }
}
