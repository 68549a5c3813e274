//! Command-line pipeline behind the `rdplan` binary.
//!
//! One structured config file (TOML or JSON) plus flag overrides drives six
//! subcommands: `aggregate`, `plan`, `benchmark`, `evaluate`, `compare`, and
//! `export-lp`. Artifacts are deterministic for a fixed config and seed
//! (timing fields excluded), so runs diff cleanly.
//!
//! Exit codes: 0 success · 1 infeasible result or evaluation flag ·
//! 2 input/config error · 3 solver failure.

use crate::aggregate::{
    agglomerate, ctpc_agglomerate, extract_representatives, mark_extreme_days,
    RepresentativeDaySet,
};
use crate::error::{Error, Result};
use crate::evaluate::{
    comparison_csv, comparison_report, compare_methods_with_jobs, ess_invest_cost,
    evaluate_error, extract_decisions, run_benchmark, Benchmark, ErrorReport, Method, ReducedRun,
};
use crate::ingest::{build_feature_days, load_hourly_csv, HourlySeries, SeriesKind};
use crate::linking::{link_days, SldPlan};
use crate::planner::{build_plan_model, InvestmentPlan};
use crate::plot;
use crate::solver::{
    solve, write_model, ModelFormat, SolutionRecord, SolverConfig, SOLVER_CMD_ENV,
};
use crate::synthetic::{garver_system, synthetic_year, SYNTHETIC_YEAR};
use crate::system::{load_system, Network, PolicyParams};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Exit code for infeasible outcomes and raised evaluation flags.
pub const EXIT_INFEASIBLE: i32 = 1;
/// Exit code for input and configuration problems.
pub const EXIT_INPUT: i32 = 2;
/// Exit code for solver crashes, timeouts, and unparseable solutions.
pub const EXIT_SOLVER: i32 = 3;

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

/// File paths section of the run config. Any omitted input falls back to the
/// bundled synthetic instance and profile year.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub load_csv: Option<PathBuf>,
    pub wind_csv: Option<PathBuf>,
    pub system_json: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

/// Solver section of the run config.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Command template with `{model}` and `{solution}` placeholders.
    pub command: Option<String>,
    pub mip_gap: Option<f64>,
    pub time_limit_s: Option<f64>,
    pub threads: Option<usize>,
}

/// Scalar policy overrides applied on top of the loaded instance.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub load_growth: Option<f64>,
    pub interest_rate: Option<f64>,
    pub wind_share: Option<f64>,
    pub max_curtail_share: Option<f64>,
    pub reserve_wind_frac: Option<f64>,
    pub reserve_load_frac: Option<f64>,
    pub cost_segments: Option<usize>,
    pub theta_bound_rad: Option<f64>,
    pub mip_gap: Option<f64>,
    pub reference_bus: Option<usize>,
    pub weighted_curtailment: Option<bool>,
}

/// Parsed run configuration; every field has a working default so an empty
/// file (or no file) is a valid config.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub paths: PathsConfig,
    pub nrd: Option<usize>,
    pub method: Option<String>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub policy: PolicySection,
}

/// Read a TOML or JSON config file; the parser is chosen by extension, with
/// a JSON fallback for unknown extensions.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
        .unwrap_or_default();
    if ext == "json" {
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

/// Representative-day aggregation and transmission/storage co-planning.
#[derive(Debug, Parser)]
#[command(name = "rdplan", version, about)]
pub struct Cli {
    /// Config file (TOML or JSON); flags override config values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Number of representative days.
    #[arg(long, global = true)]
    pub nrd: Option<usize>,
    /// Aggregation method: proposed | ctpc.
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// Seed for the bundled synthetic profiles.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Parallel evaluations in `compare` (defaults to 1).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Solver command template with {model} and {solution} placeholders.
    #[arg(long, global = true)]
    pub solver_cmd: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the year into weighted representative days and linked blocks.
    Aggregate(PlotArg),
    /// Solve the reduced co-planning model and report the plan.
    Plan(PlanArgs),
    /// Solve the full-year benchmark model (cached per instance).
    Benchmark,
    /// Fix reduced-space investments into the full year and measure the error.
    Evaluate,
    /// Sweep (method, nrd) configurations against one shared benchmark.
    Compare(CompareArgs),
    /// Write the reduced model as LP (or MPS) text without solving.
    ExportLp(ExportArgs),
}

#[derive(Debug, Args)]
pub struct PlotArg {
    /// Also write SVG charts next to the JSON artifacts.
    #[arg(long)]
    pub plots: bool,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Write the model file and stop before calling the solver.
    #[arg(long)]
    pub export_only: bool,
    /// Model format for --export-only: mps | lp.
    #[arg(long, default_value = "mps")]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated nrd values (default: the single configured nrd).
    #[arg(long)]
    pub nrds: Option<String>,
    /// Comma-separated methods (default: proposed,ctpc).
    #[arg(long)]
    pub methods: Option<String>,
    /// Also write SVG charts next to the CSV.
    #[arg(long)]
    pub plots: bool,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Output path (default: <out_dir>/model.lp).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Model format: lp | mps.
    #[arg(long, default_value = "lp")]
    pub format: String,
}

// ---------------------------------------------------------------------------
// Effective settings and input resolution
// ---------------------------------------------------------------------------

/// Flag/config/default precedence, resolved once per run.
#[derive(Debug)]
struct Effective {
    nrd: usize,
    method: Method,
    seed: u64,
    jobs: usize,
    out_dir: PathBuf,
    paths: PathsConfig,
    solver_cmd: Option<String>,
    solver: SolverSection,
    policy: PolicySection,
}

impl Effective {
    fn resolve(cli: &Cli) -> Result<Self> {
        let config = match &cli.config {
            Some(p) => load_config(p)?,
            None => RunConfig::default(),
        };
        let nrd = cli.nrd.or(config.nrd).unwrap_or(14);
        let method = cli
            .method
            .clone()
            .or(config.method)
            .unwrap_or_else(|| "proposed".to_string())
            .parse::<Method>()?;
        let seed = cli.seed.or(config.seed).unwrap_or(42);
        let jobs = cli.jobs.or(config.jobs).unwrap_or(1).max(1);
        let out_dir = config
            .paths
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"));
        let solver_cmd = cli
            .solver_cmd
            .clone()
            .or_else(|| config.solver.command.clone());
        Ok(Effective {
            nrd,
            method,
            seed,
            jobs,
            out_dir,
            paths: config.paths,
            solver_cmd,
            solver: config.solver,
            policy: config.policy,
        })
    }

    /// Build the solver configuration: flag > config > `RDPLAN_SOLVER_CMD`.
    fn solver_config(&self) -> Result<SolverConfig> {
        let mut cfg = match &self.solver_cmd {
            Some(cmd) => SolverConfig::new(cmd.clone())?,
            None => SolverConfig::from_env().map_err(|_| {
                Error::Config(format!(
                    "no solver configured: pass --solver-cmd, set [solver].command \
                     in the config, or export {SOLVER_CMD_ENV}"
                ))
            })?,
        };
        if let Some(gap) = self.solver.mip_gap {
            cfg.mip_gap_rel = gap;
        }
        cfg.time_limit_s = self.solver.time_limit_s;
        cfg.threads = self.solver.threads;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Inputs of one run plus the byte-level fingerprint material that keys the
/// benchmark cache.
struct Inputs {
    network: Network,
    params: PolicyParams,
    load: HourlySeries,
    wind: HourlySeries,
    fingerprint: u64,
}

fn apply_policy_overrides(params: &mut PolicyParams, ov: &PolicySection) {
    if let Some(v) = ov.load_growth {
        params.load_growth = v;
    }
    if let Some(v) = ov.interest_rate {
        params.interest_rate = v;
    }
    if let Some(v) = ov.wind_share {
        params.wind_share = v;
    }
    if let Some(v) = ov.max_curtail_share {
        params.max_curtail_share = v;
    }
    if let Some(v) = ov.reserve_wind_frac {
        params.reserve_wind_frac = v;
    }
    if let Some(v) = ov.reserve_load_frac {
        params.reserve_load_frac = v;
    }
    if let Some(v) = ov.cost_segments {
        params.cost_segments = v;
    }
    if let Some(v) = ov.theta_bound_rad {
        params.theta_bound_rad = v;
    }
    if let Some(v) = ov.mip_gap {
        params.mip_gap = v;
    }
    if let Some(v) = ov.reference_bus {
        params.reference_bus = v;
    }
    if let Some(v) = ov.weighted_curtailment {
        params.weighted_curtailment = v;
    }
}

/// 64-bit FNV-1a over artifact-relevant bytes (stable across runs, unlike
/// the std hasher's randomized keys).
fn fnv1a64(chunks: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for chunk in chunks {
        for &b in *chunk {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

fn resolve_inputs(eff: &Effective) -> Result<Inputs> {
    let mut fp_parts: Vec<Vec<u8>> = Vec::new();
    let (network, mut params) = match &eff.paths.system_json {
        Some(p) => {
            fp_parts.push(std::fs::read(p).map_err(|e| Error::io(p.display().to_string(), e))?);
            load_system(p)?
        }
        None => {
            fp_parts.push(b"builtin:garver6".to_vec());
            garver_system()
        }
    };
    apply_policy_overrides(&mut params, &eff.policy);
    let (load, wind) = match (&eff.paths.load_csv, &eff.paths.wind_csv) {
        (Some(lp), Some(wp)) => {
            fp_parts.push(std::fs::read(lp).map_err(|e| Error::io(lp.display().to_string(), e))?);
            fp_parts.push(std::fs::read(wp).map_err(|e| Error::io(wp.display().to_string(), e))?);
            (
                load_hourly_csv(lp, SYNTHETIC_YEAR, SeriesKind::Load)?,
                load_hourly_csv(wp, SYNTHETIC_YEAR, SeriesKind::Wind)?,
            )
        }
        (None, None) => {
            fp_parts.push(format!("synthetic:{}", eff.seed).into_bytes());
            synthetic_year(eff.seed, network.total_peak_load_mw())
        }
        _ => {
            return Err(Error::Config(
                "load_csv and wind_csv must be given together".into(),
            ))
        }
    };
    // Policy scalars shape the model, so they key the cache too.
    fp_parts.push(
        serde_json::to_vec(&params).map_err(|e| Error::Config(format!("fingerprint: {e}")))?,
    );
    let refs: Vec<&[u8]> = fp_parts.iter().map(|v| v.as_slice()).collect();
    let fingerprint = fnv1a64(&refs);
    Ok(Inputs {
        network,
        params,
        load,
        wind,
        fingerprint,
    })
}

// ---------------------------------------------------------------------------
// Shared pipeline steps
// ---------------------------------------------------------------------------

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Cluster, pin extremes, extract representatives, and link blocks.
fn aggregate_pipeline(
    inputs: &Inputs,
    method: Method,
    nrd: usize,
) -> Result<(RepresentativeDaySet, SldPlan, usize)> {
    let wind_scale: f64 = inputs.network.wind_candidates.iter().map(|w| w.pmax_mw).sum();
    let features = build_feature_days(&inputs.load, &inputs.wind, wind_scale)?;
    let clustering = match method {
        Method::Proposed => {
            let extremes = mark_extreme_days(&features, &[]);
            agglomerate(&features, nrd, &extremes)?
        }
        Method::Ctpc => ctpc_agglomerate(&features, nrd)?,
    };
    let reps = extract_representatives(&clustering, &features);
    let slds = link_days(&features, &reps)?;
    let extreme_day = mark_extreme_days(&features, &[])
        .first()
        .copied()
        .unwrap_or(0);
    Ok((reps, slds, extreme_day))
}

/// Reuse `rds.json`/`slds.json` when both exist, otherwise aggregate inline.
fn reduced_artifacts(
    eff: &Effective,
    inputs: &Inputs,
) -> Result<(RepresentativeDaySet, SldPlan)> {
    let rds_path = eff.out_dir.join("rds.json");
    let slds_path = eff.out_dir.join("slds.json");
    if rds_path.exists() && slds_path.exists() {
        let reps: RepresentativeDaySet = read_json(&rds_path)?;
        let slds: SldPlan = read_json(&slds_path)?;
        return Ok((reps, slds));
    }
    let (reps, slds, _) = aggregate_pipeline(inputs, eff.method, eff.nrd)?;
    Ok((reps, slds))
}

/// Benchmark cache keyed by the instance fingerprint.
fn cached_benchmark(
    eff: &Effective,
    inputs: &Inputs,
    solver: &SolverConfig,
) -> Result<(Benchmark, bool)> {
    let path = eff
        .out_dir
        .join(format!("benchmark-{:016x}.json", inputs.fingerprint));
    if path.exists() {
        return Ok((read_json(&path)?, true));
    }
    let bench = run_benchmark(
        &inputs.network,
        &inputs.params,
        &inputs.load,
        &inputs.wind,
        solver,
    )?;
    write_json(&path, &bench)?;
    Ok((bench, false))
}

fn parse_format(s: &str) -> Result<ModelFormat> {
    match s.to_ascii_lowercase().as_str() {
        "mps" => Ok(ModelFormat::Mps),
        "lp" => Ok(ModelFormat::Lp),
        other => Err(Error::Config(format!("unknown model format {other}"))),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| Error::Config(format!("bad {what} entry: {p}")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

const M: f64 = 1e6;

/// Normalize IEEE negative zero (e.g. an empty `.sum()`) for display.
fn nz(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn assumed_header(params: &PolicyParams) -> String {
    if params.assumed.is_empty() {
        "assumed parameters: none\n".to_string()
    } else {
        format!("assumed parameters: {}\n", params.assumed.join(", "))
    }
}

fn investment_lines(network: &Network, plan: &InvestmentPlan) -> String {
    let mut out = String::new();
    if plan.built_lines.is_empty() {
        out.push_str("  lines: none\n");
    } else {
        for id in &plan.built_lines {
            let l = &network.candidate_lines[id - 1];
            out.push_str(&format!(
                "  line {id}: bus {} - bus {} ({:.0} MW, {:.0} km)\n",
                l.from, l.to, l.pmax_mw, l.length_km
            ));
        }
    }
    for (bus, mw) in &plan.wind_capacity_mw {
        if *mw > 1e-9 {
            out.push_str(&format!("  wind at bus {bus}: {mw:.1} MW\n"));
        }
    }
    for (bus, mw) in &plan.ess_power_mw {
        let mwh = plan.ess_energy_mwh.get(bus).copied().unwrap_or(0.0);
        if *mw > 1e-9 || mwh > 1e-9 {
            out.push_str(&format!(
                "  storage at bus {bus}: {mw:.1} MW / {mwh:.1} MWh\n"
            ));
        }
    }
    out
}

/// Cost report: total, operating, storage investment, and objective in M$.
fn plan_report(
    network: &Network,
    params: &PolicyParams,
    plan: &InvestmentPlan,
    sol: &SolutionRecord,
    nrd: usize,
    n_sld: usize,
) -> String {
    let line_invest: f64 = plan
        .built_lines
        .iter()
        .map(|id| network.candidate_lines[id - 1].build_cost_usd())
        .sum();
    let wind_invest: f64 = network
        .wind_candidates
        .iter()
        .map(|w| {
            plan.wind_capacity_mw.get(&w.bus).copied().unwrap_or(0.0) * w.invest_cost_usd_per_mw
        })
        .sum();
    let ess_invest = ess_invest_cost(network, plan);
    let operating = sol.objective - line_invest - wind_invest - ess_invest;
    let mut out = String::new();
    out.push_str(&format!(
        "co-planning report ({} representative days, {} linked blocks)\n",
        nrd, n_sld
    ));
    out.push_str(&assumed_header(params));
    out.push_str(&format!("solver status: {}\n", sol.status.as_str()));
    out.push_str("\ncosts (M$)\n");
    out.push_str(&format!("  TC    total cost            {:12.3}\n", nz(sol.objective / M)));
    out.push_str(&format!("  TO    operating cost        {:12.3}\n", nz(operating / M)));
    out.push_str(&format!("  TLC   line investment       {:12.3}\n", nz(line_invest / M)));
    out.push_str(&format!("  TWC   wind investment       {:12.3}\n", nz(wind_invest / M)));
    out.push_str(&format!("  TESSC storage investment    {:12.3}\n", nz(ess_invest / M)));
    out.push_str(&format!("  Z     objective             {:12.3}\n", nz(sol.objective / M)));
    out.push_str("\ninvestments\n");
    out.push_str(&investment_lines(network, plan));
    out
}

fn error_report_text(report: &ErrorReport) -> String {
    let fixed = report
        .fixed_full_objective_usd
        .map(|v| format!("{:.3}", v / M))
        .unwrap_or_else(|| "infeasible".to_string());
    format!(
        "reduced objective      {:12.3} M$\n\
         fixed full objective   {:>12} M$\n\
         benchmark objective    {:12.3} M$\n\
         error                  {:12.4} %\n\
         storage-cost error     {:>12}\n\
         reduced wall time      {:12.1} s\n\
         benchmark wall time    {:12.1} s\n\
         time saving            {:12.1} %\n",
        report.reduced_objective_usd / M,
        fixed,
        report.benchmark_objective_usd / M,
        report.error * 100.0,
        report
            .ess_cost_error
            .map(|v| format!("{:.4} %", v * 100.0))
            .unwrap_or_else(|| "n/a".to_string()),
        report.t_reduced_s,
        report.t_full_s,
        (1.0 - report.t_reduced_s / report.t_full_s.max(1e-9)) * 100.0,
    )
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_aggregate(eff: &Effective, plots: bool) -> Result<i32> {
    let inputs = resolve_inputs(eff)?;
    ensure_dir(&eff.out_dir)?;
    let (reps, slds, extreme_day) = aggregate_pipeline(&inputs, eff.method, eff.nrd)?;
    write_json(&eff.out_dir.join("rds.json"), &reps)?;
    write_json(&eff.out_dir.join("slds.json"), &slds)?;
    println!(
        "aggregated: nrd={} slds={} extreme_day={} method={}",
        reps.n_rds(),
        slds.n_slds(),
        extreme_day,
        eff.method.as_str()
    );
    if plots {
        let series: Vec<(String, Vec<f64>)> = reps
            .rds
            .iter()
            .enumerate()
            .map(|(i, rd)| (format!("rd{:02} w={}", i + 1, rd.weight), rd.lf.clone()))
            .collect();
        let p = eff.out_dir.join("rd_profiles.svg");
        plot::line_chart(
            "representative-day load profiles",
            "hour of day",
            "load (per-unit of peak)",
            &series,
            &p,
        )?;
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn cmd_plan(eff: &Effective, args: &PlanArgs) -> Result<i32> {
    let inputs = resolve_inputs(eff)?;
    ensure_dir(&eff.out_dir)?;
    let (reps, slds) = reduced_artifacts(eff, &inputs)?;
    let model = build_plan_model(&inputs.network, &inputs.params, &reps, &slds)?;
    if args.export_only {
        let format = parse_format(&args.format)?;
        let path = eff.out_dir.join(match format {
            ModelFormat::Mps => "model.mps",
            ModelFormat::Lp => "model.lp",
        });
        write_model(&model, format, &path)?;
        println!(
            "exported {} ({} variables, {} binary, {} constraints)",
            path.display(),
            model.n_vars(),
            model.n_binaries(),
            model.constraints.len()
        );
        return Ok(0);
    }
    let solver = eff.solver_config()?;
    let sol = solve(&model, &solver)?;
    if !sol.has_incumbent() {
        eprintln!("plan: solver ended {} with no incumbent", sol.status.as_str());
        return Ok(EXIT_INFEASIBLE);
    }
    let plan = extract_decisions(&sol, &model)?;
    #[derive(serde::Serialize)]
    struct SolutionArtifact<'a> {
        status: &'a str,
        objective_usd: f64,
        gap: Option<f64>,
        nrd: usize,
        n_sld: usize,
        plan: &'a InvestmentPlan,
    }
    write_json(
        &eff.out_dir.join("solution.json"),
        &SolutionArtifact {
            status: sol.status.as_str(),
            objective_usd: sol.objective,
            gap: sol.gap,
            nrd: reps.n_rds(),
            n_sld: slds.n_slds(),
            plan: &plan,
        },
    )?;
    let report = plan_report(&inputs.network, &inputs.params, &plan, &sol, reps.n_rds(), slds.n_slds());
    std::fs::write(eff.out_dir.join("plan_report.txt"), &report)
        .map_err(|e| Error::io("plan_report.txt", e))?;
    print!("{report}");
    Ok(0)
}

fn cmd_benchmark(eff: &Effective) -> Result<i32> {
    let inputs = resolve_inputs(eff)?;
    ensure_dir(&eff.out_dir)?;
    let solver = eff.solver_config()?;
    let (bench, cached) = cached_benchmark(eff, &inputs, &solver)?;
    write_json(&eff.out_dir.join("benchmark.json"), &bench)?;
    println!(
        "benchmark objective {:.3} M$ ({}; wall {:.1} s)\n{}",
        bench.objective_usd / M,
        if cached { "cached" } else { "solved now" },
        bench.wall_time_s,
        investment_lines(&inputs.network, &bench.plan)
    );
    Ok(0)
}

fn cmd_evaluate(eff: &Effective) -> Result<i32> {
    let inputs = resolve_inputs(eff)?;
    ensure_dir(&eff.out_dir)?;
    let solver = eff.solver_config()?;
    let (reps, slds) = reduced_artifacts(eff, &inputs)?;
    let model = build_plan_model(&inputs.network, &inputs.params, &reps, &slds)?;
    let sol = solve(&model, &solver)?;
    if !sol.has_incumbent() {
        eprintln!(
            "evaluate: reduced model ended {} with no incumbent",
            sol.status.as_str()
        );
        return Ok(EXIT_INFEASIBLE);
    }
    let reduced = ReducedRun {
        plan: extract_decisions(&sol, &model)?,
        objective_usd: sol.objective,
        wall_time_s: sol.wall_time_s,
    };
    let (bench, _) = cached_benchmark(eff, &inputs, &solver)?;
    let report = evaluate_error(
        &reduced,
        &inputs.network,
        &inputs.params,
        &inputs.load,
        &inputs.wind,
        &solver,
        Some(&bench),
    )?;
    write_json(&eff.out_dir.join("error_report.json"), &report)?;
    print!("{}", error_report_text(&report));
    if report.infeasible {
        Ok(EXIT_INFEASIBLE)
    } else {
        Ok(0)
    }
}

fn cmd_compare(eff: &Effective, args: &CompareArgs) -> Result<i32> {
    let inputs = resolve_inputs(eff)?;
    ensure_dir(&eff.out_dir)?;
    let solver = eff.solver_config()?;
    let nrds: Vec<usize> = match &args.nrds {
        Some(s) => parse_list(s, "nrd")?,
        None => vec![eff.nrd],
    };
    let methods: Vec<Method> = match &args.methods {
        Some(s) => parse_list(s, "method")?,
        None => vec![Method::Proposed, Method::Ctpc],
    };
    let mut configs = Vec::new();
    for &m in &methods {
        for &n in &nrds {
            configs.push((m, n));
        }
    }
    let rows = compare_methods_with_jobs(
        &configs,
        &inputs.network,
        &inputs.params,
        &inputs.load,
        &inputs.wind,
        &solver,
        eff.jobs,
    )?;
    let csv = comparison_csv(&rows);
    std::fs::write(eff.out_dir.join("comparison.csv"), &csv)
        .map_err(|e| Error::io("comparison.csv", e))?;
    let text = comparison_report(&rows, &inputs.params);
    std::fs::write(eff.out_dir.join("comparison.txt"), &text)
        .map_err(|e| Error::io("comparison.txt", e))?;
    print!("{text}");
    if args.plots {
        let bars: Vec<(String, f64)> = rows
            .iter()
            .map(|r| (format!("{}\u{a0}n{}", r.method.as_str(), r.nrd), r.error))
            .collect();
        let p = eff.out_dir.join("error_vs_nrd.svg");
        plot::bar_chart("fix-and-evaluate error by configuration", "error fraction", &bars, &p)?;
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn cmd_export_lp(eff: &Effective, args: &ExportArgs) -> Result<i32> {
    let inputs = resolve_inputs(eff)?;
    ensure_dir(&eff.out_dir)?;
    let (reps, slds) = reduced_artifacts(eff, &inputs)?;
    let model = build_plan_model(&inputs.network, &inputs.params, &reps, &slds)?;
    let format = parse_format(&args.format)?;
    let path = match &args.out {
        Some(p) => p.clone(),
        None => eff.out_dir.join(match format {
            ModelFormat::Mps => "model.mps",
            ModelFormat::Lp => "model.lp",
        }),
    };
    write_model(&model, format, &path)?;
    println!(
        "exported {} ({} variables, {} binary, {} constraints)",
        path.display(),
        model.n_vars(),
        model.n_binaries(),
        model.constraints.len()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Exit code for an error, following the documented convention.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SolverCrashed { .. } | Error::Timeout { .. } | Error::UnknownVariable(_) => {
            EXIT_SOLVER
        }
        // A solve that ends without usable values is an infeasibility signal.
        Error::NotSolved(_) => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    }
}

/// Run the parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let eff = match Effective::resolve(cli) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("rdplan: {err}");
            return exit_code(&err);
        }
    };
    let outcome = match &cli.command {
        Command::Aggregate(a) => cmd_aggregate(&eff, a.plots),
        Command::Plan(a) => cmd_plan(&eff, a),
        Command::Benchmark => cmd_benchmark(&eff),
        Command::Evaluate => cmd_evaluate(&eff),
        Command::Compare(a) => cmd_compare(&eff, a),
        Command::ExportLp(a) => cmd_export_lp(&eff, a),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("rdplan: {err}");
            exit_code(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_configs_parse_identically() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("run.toml");
        std::fs::write(
            &toml_path,
            "nrd = 7\nmethod = \"ctpc\"\nseed = 9\n[paths]\nout_dir = \"x\"\n[solver]\nmip_gap = 0.001\n",
        )
        .unwrap();
        let json_path = dir.path().join("run.json");
        std::fs::write(
            &json_path,
            r#"{"nrd":7,"method":"ctpc","seed":9,"paths":{"out_dir":"x"},"solver":{"mip_gap":0.001}}"#,
        )
        .unwrap();
        let a = load_config(&toml_path).unwrap();
        let b = load_config(&json_path).unwrap();
        assert_eq!(a.nrd, b.nrd);
        assert_eq!(a.method, b.method);
        assert_eq!(a.seed, b.seed);
        assert_eq!(a.paths.out_dir, b.paths.out_dir);
        assert_eq!(a.solver.mip_gap, b.solver.mip_gap);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.toml");
        std::fs::write(&p, "nrdd = 7\n").unwrap();
        assert!(load_config(&p).is_err());
    }

    #[test]
    fn flags_override_config_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        std::fs::write(&p, "nrd = 7\nmethod = \"ctpc\"\n").unwrap();
        let cli = Cli::parse_from([
            "rdplan",
            "--config",
            p.to_str().unwrap(),
            "--nrd",
            "21",
            "aggregate",
        ]);
        let eff = Effective::resolve(&cli).unwrap();
        assert_eq!(eff.nrd, 21); // flag wins
        assert_eq!(eff.method.as_str(), "ctpc"); // config survives
    }

    #[test]
    fn missing_config_file_is_an_input_error() {
        let cli = Cli::parse_from(["rdplan", "--config", "/nonexistent/run.toml", "aggregate"]);
        let err = Effective::resolve(&cli).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_INPUT);
    }

    #[test]
    fn exit_codes_follow_the_documented_convention() {
        assert_eq!(
            exit_code(&Error::SolverCrashed {
                code: Some(7),
                stderr: String::new()
            }),
            EXIT_SOLVER
        );
        assert_eq!(exit_code(&Error::NotSolved("infeasible".into())), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_INPUT);
        assert_eq!(
            exit_code(&Error::io("f", std::io::Error::other("gone"))),
            EXIT_INPUT
        );
    }

    #[test]
    fn fingerprint_is_stable_and_input_sensitive() {
        let a = fnv1a64(&[b"alpha", b"beta"]);
        let b = fnv1a64(&[b"alpha", b"beta"]);
        let c = fnv1a64(&[b"alpha", b"betb"]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn format_and_list_parsing() {
        assert!(matches!(parse_format("MPS").unwrap(), ModelFormat::Mps));
        assert!(matches!(parse_format("lp").unwrap(), ModelFormat::Lp));
        assert!(parse_format("sav").is_err());
        let ns: Vec<usize> = parse_list("4, 8,14", "nrd").unwrap();
        assert_eq!(ns, vec![4, 8, 14]);
        let ms: Vec<Method> = parse_list("proposed,ctpc", "method").unwrap();
        assert_eq!(ms.len(), 2);
    }
}
