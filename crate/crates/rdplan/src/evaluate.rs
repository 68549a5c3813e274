//! Benchmark machinery: pull investment decisions out of a solved model,
//! re-price them on the full-year problem, compute the relative cost error,
//! reconstruct year-long storage trajectories, and tabulate method sweeps.

use crate::aggregate::{agglomerate, ctpc_agglomerate, extract_representatives, mark_extreme_days};
use crate::error::{Error, Result};
use crate::ingest::{build_feature_days, HourlySeries};
use crate::linking::{link_days, SldPlan};
use crate::milp::{names, MilpModel};
use crate::planner::{build_full_space_model, build_plan_model, fix_investments, InvestmentPlan};
use crate::solver::{solve, SolutionRecord, SolveStatus, SolverConfig};
use crate::system::{Network, PolicyParams};
use serde::{Deserialize, Serialize};

/// Ignore capacities below this when reading a plan out of a solution (MW).
const CAPACITY_FLOOR: f64 = 1e-9;

/// A solved reduced-space run: the decisions plus what they cost there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReducedRun {
    pub plan: InvestmentPlan,
    pub objective_usd: f64,
    pub wall_time_s: f64,
}

/// Full-year reference solve: its objective anchors the error measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Benchmark {
    pub objective_usd: f64,
    pub plan: InvestmentPlan,
    pub wall_time_s: f64,
}

/// Relative cost of implementing reduced-space decisions on the full year.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub reduced_objective_usd: f64,
    /// Full-year optimum with investments pinned to the reduced plan.
    pub fixed_full_objective_usd: Option<f64>,
    pub benchmark_objective_usd: f64,
    /// |fixed − benchmark| / benchmark; 1.0 when the pinned model is infeasible.
    pub error: f64,
    /// Same measure restricted to the storage investment cost.
    pub ess_cost_error: Option<f64>,
    pub infeasible: bool,
    pub t_reduced_s: f64,
    pub t_full_s: f64,
}

/// Read the investment decisions out of a solved model.
pub fn extract_decisions(sol: &SolutionRecord, model: &MilpModel) -> Result<InvestmentPlan> {
    if !sol.has_incumbent() {
        return Err(Error::NotSolved(format!(
            "cannot extract decisions from a {} run",
            sol.status.as_str()
        )));
    }
    let mut plan = InvestmentPlan::default();
    for l in 1..=model.meta.n_candidate_lines {
        if sol.value(&names::y_line(l))? >= 0.5 {
            plan.built_lines.insert(l);
        }
    }
    for &bus in &model.meta.storage_buses {
        let c = sol.value(&names::c_storage(bus))?;
        let s = sol.value(&names::s_storage(bus))?;
        if c > CAPACITY_FLOOR {
            plan.ess_power_mw.insert(bus, c);
        }
        if s > CAPACITY_FLOOR {
            plan.ess_energy_mwh.insert(bus, s);
        }
    }
    for &bus in &model.meta.wind_buses {
        let pw = sol.value(&names::pw_wind(bus))?;
        if pw > CAPACITY_FLOOR {
            plan.wind_capacity_mw.insert(bus, pw);
        }
    }
    Ok(plan)
}

/// Storage investment cost of a plan, priced by the instance's candidates.
pub fn ess_invest_cost(network: &Network, plan: &InvestmentPlan) -> f64 {
    network
        .storage_candidates
        .iter()
        .map(|s| {
            let c = plan.ess_power_mw.get(&s.bus).copied().unwrap_or(0.0);
            let e = plan.ess_energy_mwh.get(&s.bus).copied().unwrap_or(0.0);
            s.power_cost_usd_per_mw * c + s.energy_cost_usd_per_mwh * e
        })
        .sum()
}

/// |f_hat − f_star| / f_star.
pub fn relative_error(f_hat: f64, f_star: f64) -> f64 {
    (f_hat - f_star).abs() / f_star
}

/// Error of one cost component; `None` when the reference component is zero
/// but the evaluated one is not (no meaningful denominator).
pub fn component_error(hat: f64, star: f64) -> Option<f64> {
    if star.abs() < 1e-9 {
        if hat.abs() < 1e-9 {
            Some(0.0)
        } else {
            None
        }
    } else {
        Some(relative_error(hat, star))
    }
}

/// Solve the full-year model once and keep its objective and decisions.
pub fn run_benchmark(
    network: &Network,
    params: &PolicyParams,
    load: &HourlySeries,
    wind: &HourlySeries,
    solver: &SolverConfig,
) -> Result<Benchmark> {
    let model = build_full_space_model(network, params, load, wind)?;
    let sol = solve(&model, solver)?;
    if !sol.has_incumbent() {
        return Err(Error::NotSolved(format!(
            "full-year benchmark ended {}",
            sol.status.as_str()
        )));
    }
    let plan = extract_decisions(&sol, &model)?;
    Ok(Benchmark {
        objective_usd: sol.objective,
        plan,
        wall_time_s: sol.wall_time_s,
    })
}

/// Pin the reduced-space decisions into the full-year model, re-solve, and
/// measure the relative cost of those decisions. A `benchmark` of `None`
/// solves the reference model here first.
pub fn evaluate_error(
    reduced: &ReducedRun,
    network: &Network,
    params: &PolicyParams,
    load: &HourlySeries,
    wind: &HourlySeries,
    solver: &SolverConfig,
    benchmark: Option<&Benchmark>,
) -> Result<ErrorReport> {
    let computed;
    let bench = match benchmark {
        Some(b) => b,
        None => {
            computed = run_benchmark(network, params, load, wind, solver)?;
            &computed
        }
    };
    if !(bench.objective_usd > 0.0) {
        return Err(Error::Config(format!(
            "benchmark objective must be positive to anchor the error measure, got {}",
            bench.objective_usd
        )));
    }
    let ess_cost_error = component_error(
        ess_invest_cost(network, &reduced.plan),
        ess_invest_cost(network, &bench.plan),
    );

    let full = build_full_space_model(network, params, load, wind)?;
    let fixed = fix_investments(&full, &reduced.plan)?;
    let sol = solve(&fixed, solver)?;
    match sol.status {
        SolveStatus::Infeasible => Ok(ErrorReport {
            reduced_objective_usd: reduced.objective_usd,
            fixed_full_objective_usd: None,
            benchmark_objective_usd: bench.objective_usd,
            error: 1.0,
            ess_cost_error,
            infeasible: true,
            t_reduced_s: reduced.wall_time_s,
            t_full_s: bench.wall_time_s,
        }),
        SolveStatus::Optimal | SolveStatus::FeasibleGap => Ok(ErrorReport {
            reduced_objective_usd: reduced.objective_usd,
            fixed_full_objective_usd: Some(sol.objective),
            benchmark_objective_usd: bench.objective_usd,
            error: relative_error(sol.objective, bench.objective_usd),
            ess_cost_error,
            infeasible: false,
            t_reduced_s: reduced.wall_time_s,
            t_full_s: bench.wall_time_s,
        }),
        other => Err(Error::NotSolved(format!(
            "fixed-investment evaluation ended {}",
            other.as_str()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Storage trajectory reconstruction
// ---------------------------------------------------------------------------

/// One hourly excursion outside the storage energy envelope.
#[derive(Debug, Clone, Serialize)]
pub struct SocViolation {
    pub bus: usize,
    /// Hour of the year, 0-based.
    pub hour: usize,
    pub soc_mwh: f64,
    pub capacity_mwh: f64,
}

/// Year-long stored-energy trajectories rebuilt from block-level decisions.
#[derive(Debug, Clone, Serialize)]
pub struct SocTrajectory {
    pub buses: Vec<usize>,
    /// `soc_mwh[i][t]`: energy of candidate `i` at the end of year-hour `t`.
    pub soc_mwh: Vec<Vec<f64>>,
    /// `boundary_mwh[i][b]`: end-of-block energy, one entry per block.
    pub boundary_mwh: Vec<Vec<f64>>,
    pub violations: Vec<SocViolation>,
}

fn need(sol: &SolutionRecord, name: &str) -> Result<f64> {
    sol.values
        .get(name)
        .copied()
        .ok_or_else(|| Error::MissingVariables(name.to_string()))
}

/// Rebuild each storage unit's hourly state of charge across the year by
/// repeating its representative-day profile over every member day of each
/// block and chaining the day-to-day drift from the block energies.
///
/// Every block is anchored at its end-of-block energy variable, so block
/// boundaries reproduce those values exactly; the first block starts from the
/// level implied by its own end (the cyclic coupling guarantees the year-end
/// energy covers it, possibly with spare).
pub fn reconstruct_soc(
    sol: &SolutionRecord,
    slds: &SldPlan,
    model: &MilpModel,
) -> Result<SocTrajectory> {
    let meta = &model.meta;
    if slds.n_slds() != meta.n_sld {
        return Err(Error::DimensionMismatch(format!(
            "solution was built over {} blocks, plan has {}",
            meta.n_sld,
            slds.n_slds()
        )));
    }
    let hours = meta.hours;
    let n_hours_year = slds.n_days() * hours;
    let mut traj = SocTrajectory {
        buses: meta.storage_buses.clone(),
        soc_mwh: Vec::new(),
        boundary_mwh: Vec::new(),
        violations: Vec::new(),
    };

    for &bus in &meta.storage_buses {
        let cap = need(sol, &names::s_storage(bus))?;
        let tol = 1e-6 * cap + 1e-9;
        let mut dlam = Vec::with_capacity(meta.n_rd);
        let mut lamz = Vec::with_capacity(meta.n_rd);
        let mut lam = Vec::with_capacity(meta.n_rd);
        for rd in 0..meta.n_rd {
            dlam.push(need(sol, &names::dlam(bus, rd + 1))?);
            lamz.push(need(sol, &names::lamz(bus, rd + 1))?);
            let mut row = Vec::with_capacity(hours);
            for h in 0..hours {
                row.push(need(sol, &names::lam(bus, rd + 1, h + 1))?);
            }
            lam.push(row);
        }

        let mut soc = Vec::with_capacity(n_hours_year);
        let mut boundaries = Vec::with_capacity(slds.n_slds());
        for (b, block) in slds.blocks.iter().enumerate() {
            let e_end = need(sol, &names::e_sld(bus, b + 1))?;
            boundaries.push(e_end);
            let rd = block.rd;
            let rho = block.len() as f64;
            let incoming = e_end - rho * dlam[rd];
            for d in 0..block.len() {
                let day_start = incoming + d as f64 * dlam[rd];
                for h in 0..hours {
                    soc.push(day_start + lam[rd][h] - lamz[rd]);
                }
            }
        }
        for (t, &v) in soc.iter().enumerate() {
            if v < -tol || v > cap + tol {
                traj.violations.push(SocViolation {
                    bus,
                    hour: t,
                    soc_mwh: v,
                    capacity_mwh: cap,
                });
            }
        }
        traj.soc_mwh.push(soc);
        traj.boundary_mwh.push(boundaries);
    }
    Ok(traj)
}

// ---------------------------------------------------------------------------
// Method comparison
// ---------------------------------------------------------------------------

/// Day-selection method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Extreme-pinned global agglomeration with block linking.
    Proposed,
    /// Chronological adjacent-only agglomeration.
    Ctpc,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Ctpc => "ctpc",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Method::Proposed),
            "ctpc" => Ok(Method::Ctpc),
            other => Err(Error::Config(format!(
                "unknown method {other}; expected proposed or ctpc"
            ))),
        }
    }
}

/// One sweep entry: a method at a day count, scored against the benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub method: Method,
    pub nrd: usize,
    pub n_sld: usize,
    pub reduced_obj_usd: Option<f64>,
    pub fixed_full_obj_usd: Option<f64>,
    pub benchmark_obj_usd: f64,
    pub error: f64,
    pub ess_error: Option<f64>,
    pub infeasible: bool,
    pub t_reduced_s: f64,
    pub t_full_s: f64,
    /// 1 − t_reduced / t_full.
    pub time_saving: f64,
}

fn time_saving(t_reduced: f64, t_full: f64) -> f64 {
    if t_full > 0.0 {
        1.0 - t_reduced / t_full
    } else {
        0.0
    }
}

/// Score one `(method, nrd)` configuration against a shared benchmark.
fn score_config(
    method: Method,
    nrd: usize,
    features: &crate::ingest::FeatureDays,
    benchmark: &Benchmark,
    network: &Network,
    params: &PolicyParams,
    load: &HourlySeries,
    wind: &HourlySeries,
    solver: &SolverConfig,
) -> Result<CompareRow> {
    let clustering = match method {
        Method::Proposed => {
            let extremes = mark_extreme_days(features, &[]);
            agglomerate(features, nrd, &extremes)?
        }
        Method::Ctpc => ctpc_agglomerate(features, nrd)?,
    };
    let reps = extract_representatives(&clustering, features);
    let slds = link_days(features, &reps)?;
    let model = build_plan_model(network, params, &reps, &slds)?;
    let sol = solve(&model, solver)?;

    if !sol.has_incumbent() {
        return Ok(CompareRow {
            method,
            nrd,
            n_sld: slds.n_slds(),
            reduced_obj_usd: None,
            fixed_full_obj_usd: None,
            benchmark_obj_usd: benchmark.objective_usd,
            error: 1.0,
            ess_error: None,
            infeasible: true,
            t_reduced_s: sol.wall_time_s,
            t_full_s: benchmark.wall_time_s,
            time_saving: time_saving(sol.wall_time_s, benchmark.wall_time_s),
        });
    }
    let reduced = ReducedRun {
        plan: extract_decisions(&sol, &model)?,
        objective_usd: sol.objective,
        wall_time_s: sol.wall_time_s,
    };
    let report = evaluate_error(
        &reduced,
        network,
        params,
        load,
        wind,
        solver,
        Some(benchmark),
    )?;
    Ok(CompareRow {
        method,
        nrd,
        n_sld: slds.n_slds(),
        reduced_obj_usd: Some(report.reduced_objective_usd),
        fixed_full_obj_usd: report.fixed_full_objective_usd,
        benchmark_obj_usd: report.benchmark_objective_usd,
        error: report.error,
        ess_error: report.ess_cost_error,
        infeasible: report.infeasible,
        t_reduced_s: report.t_reduced_s,
        t_full_s: report.t_full_s,
        time_saving: time_saving(report.t_reduced_s, report.t_full_s),
    })
}

/// Run every `(method, nrd)` configuration against one shared benchmark.
pub fn compare_methods(
    configs: &[(Method, usize)],
    network: &Network,
    params: &PolicyParams,
    load: &HourlySeries,
    wind: &HourlySeries,
    solver: &SolverConfig,
) -> Result<Vec<CompareRow>> {
    compare_methods_with_jobs(configs, network, params, load, wind, solver, 1)
}

/// Like [`compare_methods`], with up to `jobs` configurations solved
/// concurrently. The benchmark is solved once, up front, on the calling
/// thread; row order matches `configs` regardless of completion order.
pub fn compare_methods_with_jobs(
    configs: &[(Method, usize)],
    network: &Network,
    params: &PolicyParams,
    load: &HourlySeries,
    wind: &HourlySeries,
    solver: &SolverConfig,
    jobs: usize,
) -> Result<Vec<CompareRow>> {
    let wind_scale: f64 = network.wind_candidates.iter().map(|w| w.pmax_mw).sum();
    let features = build_feature_days(load, wind, wind_scale)?;
    let benchmark = run_benchmark(network, params, load, wind, solver)?;

    let workers = jobs.clamp(1, configs.len().max(1));
    if workers <= 1 {
        let mut rows = Vec::with_capacity(configs.len());
        for &(method, nrd) in configs {
            rows.push(score_config(
                method, nrd, &features, &benchmark, network, params, load, wind, solver,
            )?);
        }
        return Ok(rows);
    }

    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<CompareRow>>>> =
        (0..configs.len()).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= configs.len() {
                    break;
                }
                let (method, nrd) = configs[i];
                let row = score_config(
                    method, nrd, &features, &benchmark, network, params, load, wind, solver,
                );
                *slots[i].lock().expect("result slot poisoned") = Some(row);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("result slot poisoned")
                .expect("worker exited without storing a result")
        })
        .collect()
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Render the sweep as CSV.
pub fn comparison_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(
        "method,nrd,n_sld,reduced_obj,fixed_full_obj,benchmark_obj,error,ess_error,infeasible,t_reduced_s,t_full_s,time_saving\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method.as_str(),
            r.nrd,
            r.n_sld,
            csv_opt(r.reduced_obj_usd),
            csv_opt(r.fixed_full_obj_usd),
            r.benchmark_obj_usd,
            r.error,
            csv_opt(r.ess_error),
            r.infeasible,
            r.t_reduced_s,
            r.t_full_s,
            r.time_saving,
        ));
    }
    out
}

/// Render the sweep as a short human-readable report.
pub fn comparison_report(rows: &[CompareRow], params: &PolicyParams) -> String {
    let mut out = String::from("method      nrd  blocks  error      ess error  time saving\n");
    for r in rows {
        let err = if r.infeasible {
            "100% (infeasible)".to_string()
        } else {
            format!("{:.3}%", 100.0 * r.error)
        };
        let ess = r
            .ess_error
            .map(|e| format!("{:.3}%", 100.0 * e))
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:<10}  {:>3}  {:>6}  {:<9}  {:<9}  {:.1}%\n",
            r.method.as_str(),
            r.nrd,
            r.n_sld,
            err,
            ess,
            100.0 * r.time_saving
        ));
    }
    if !params.assumed.is_empty() {
        out.push_str("assumed defaults in effect: ");
        out.push_str(&params.assumed.join(", "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::build_slds;
    use crate::milp::{ModelMeta, VarKind};
    use std::collections::HashMap;

    fn meta_model(meta: ModelMeta) -> MilpModel {
        MilpModel::new(meta)
    }

    fn bare_params() -> PolicyParams {
        PolicyParams {
            load_growth: 0.05,
            interest_rate: 0.05,
            wind_share: 0.0,
            max_curtail_share: 0.05,
            reserve_wind_frac: 0.05,
            reserve_load_frac: 0.03,
            cost_segments: 1,
            theta_bound_rad: 0.5,
            mip_gap: 1e-4,
            reference_bus: 1,
            weighted_curtailment: false,
            assumed: Vec::new(),
        }
    }

    fn record(values: HashMap<String, f64>) -> SolutionRecord {
        SolutionRecord {
            status: SolveStatus::Optimal,
            objective: 0.0,
            values,
            wall_time_s: 0.0,
            gap: None,
        }
    }

    #[test]
    fn decisions_read_and_snapped() {
        let model = meta_model(ModelMeta {
            n_candidate_lines: 2,
            storage_buses: vec![2],
            wind_buses: vec![2],
            ..ModelMeta::default()
        });
        let mut values = HashMap::new();
        values.insert("Y_L01".into(), 0.9999); // snapped to built
        values.insert("Y_L02".into(), 0.0);
        values.insert("C_S02".into(), 5.0);
        values.insert("S_S02".into(), 20.0);
        values.insert("PW_W02".into(), 30.0);
        let plan = extract_decisions(&record(values), &model).unwrap();
        assert!(plan.built_lines.contains(&1));
        assert!(!plan.built_lines.contains(&2));
        assert_eq!(plan.ess_power_mw[&2], 5.0);
        assert_eq!(plan.ess_energy_mwh[&2], 20.0);
        assert_eq!(plan.wind_capacity_mw[&2], 30.0);
    }

    #[test]
    fn zero_solution_gives_empty_plan() {
        let model = meta_model(ModelMeta {
            n_candidate_lines: 1,
            storage_buses: vec![3],
            wind_buses: vec![3],
            ..ModelMeta::default()
        });
        let mut values = HashMap::new();
        values.insert("Y_L01".into(), 0.0);
        values.insert("C_S03".into(), 0.0);
        values.insert("S_S03".into(), 0.0);
        values.insert("PW_W03".into(), 0.0);
        let plan = extract_decisions(&record(values), &model).unwrap();
        assert_eq!(plan, InvestmentPlan::default());
    }

    #[test]
    fn unsolved_record_is_rejected() {
        let model = meta_model(ModelMeta::default());
        let mut rec = record(HashMap::new());
        rec.status = SolveStatus::Infeasible;
        let err = extract_decisions(&rec, &model).unwrap_err();
        assert!(matches!(err, Error::NotSolved(_)), "{err}");
    }

    #[test]
    fn error_formula_matches_definition() {
        assert_eq!(relative_error(102.0, 100.0), 0.02);
        assert_eq!(relative_error(100.0, 100.0), 0.0);
        assert_eq!(relative_error(98.0, 100.0), 0.02); // absolute value
    }

    #[test]
    fn component_error_handles_zero_reference() {
        assert_eq!(component_error(0.0, 0.0), Some(0.0));
        assert_eq!(component_error(5.0, 0.0), None);
        assert_eq!(component_error(110.0, 100.0), Some(0.1));
    }

    fn soc_fixture(
        blocks: &[usize],
        dlam: &[f64],
        e_end: &[f64],
        cap: f64,
        hours: usize,
    ) -> (SolutionRecord, SldPlan, MilpModel) {
        let n_rd = dlam.len();
        let slds = build_slds(blocks, n_rd).unwrap();
        let model = meta_model(ModelMeta {
            storage_buses: vec![2],
            n_rd,
            n_sld: slds.n_slds(),
            hours,
            ..ModelMeta::default()
        });
        let mut values = HashMap::new();
        values.insert("S_S02".into(), cap);
        for (rd, &d) in dlam.iter().enumerate() {
            values.insert(names::dlam(2, rd + 1), d);
            values.insert(names::lamz(2, rd + 1), 1.0);
            // linear intra-day ramp ending at lamz + dlam
            for h in 0..hours {
                let lam = 1.0 + d * (h + 1) as f64 / hours as f64;
                values.insert(names::lam(2, rd + 1, h + 1), lam);
            }
        }
        for (b, &e) in e_end.iter().enumerate() {
            values.insert(names::e_sld(2, b + 1), e);
        }
        (record(values), slds, model)
    }

    #[test]
    fn flat_year_stays_at_initial_energy() {
        let (rec, slds, model) = soc_fixture(&[0, 0, 0], &[0.0], &[7.0], 100.0, 4);
        let traj = reconstruct_soc(&rec, &slds, &model).unwrap();
        assert_eq!(traj.soc_mwh[0].len(), 12);
        assert!(traj.soc_mwh[0].iter().all(|&v| (v - 7.0).abs() < 1e-12));
        assert!(traj.violations.is_empty());
        assert_eq!(traj.boundary_mwh[0], vec![7.0]);
    }

    #[test]
    fn constant_drift_accumulates_over_member_days() {
        // one 10-day block drifting +5 MWh/day from an implied start of zero
        let (rec, slds, model) =
            soc_fixture(&[0; 10], &[5.0], &[50.0], 100.0, 2);
        let traj = reconstruct_soc(&rec, &slds, &model).unwrap();
        let soc = &traj.soc_mwh[0];
        // end of member day d is 5·(d+1)
        for d in 0..10 {
            let end = soc[d * 2 + 1];
            assert!((end - 5.0 * (d + 1) as f64).abs() < 1e-12, "day {d}: {end}");
        }
        assert_eq!(traj.boundary_mwh[0], vec![50.0]);
        assert!(traj.violations.is_empty());
    }

    #[test]
    fn blocks_join_continuously() {
        // rd0 drifts +2/day over 3 days, rd1 drifts -1/day over 2 days
        let (rec, slds, model) =
            soc_fixture(&[0, 0, 0, 1, 1], &[2.0, -1.0], &[10.0, 8.0], 50.0, 2);
        let traj = reconstruct_soc(&rec, &slds, &model).unwrap();
        let soc = &traj.soc_mwh[0];
        // block 1 ends at E_1 = 10; block 2 starts from 10 and ends at 8
        assert!((soc[5] - 10.0).abs() < 1e-12);
        assert!((soc[7] - 9.0).abs() < 1e-12);
        assert!((soc[9] - 8.0).abs() < 1e-12);
        assert_eq!(traj.boundary_mwh[0], vec![10.0, 8.0]);
        assert!(traj.violations.is_empty());
    }

    #[test]
    fn excursions_are_reported() {
        // drift +5/day with capacity 8: the trajectory tops out at 10
        let (rec, slds, model) = soc_fixture(&[0, 0], &[5.0], &[10.0], 8.0, 2);
        let traj = reconstruct_soc(&rec, &slds, &model).unwrap();
        assert!(!traj.violations.is_empty());
        let worst = traj
            .violations
            .iter()
            .map(|v| v.soc_mwh)
            .fold(f64::MIN, f64::max);
        assert!((worst - 10.0).abs() < 1e-12);
        assert!(traj.violations.iter().all(|v| v.bus == 2));
    }

    #[test]
    fn missing_variable_is_reported_by_name() {
        let (rec, slds, model) = soc_fixture(&[0, 0], &[5.0], &[10.0], 8.0, 2);
        let mut rec = rec;
        rec.values.remove("DLAM_S02_D001");
        let err = reconstruct_soc(&rec, &slds, &model).unwrap_err();
        match err {
            Error::MissingVariables(name) => assert_eq!(name, "DLAM_S02_D001"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn csv_layout_is_stable() {
        let rows = vec![CompareRow {
            method: Method::Proposed,
            nrd: 14,
            n_sld: 120,
            reduced_obj_usd: Some(100.0),
            fixed_full_obj_usd: Some(102.0),
            benchmark_obj_usd: 100.0,
            error: 0.02,
            ess_error: Some(0.1),
            infeasible: false,
            t_reduced_s: 1.0,
            t_full_s: 100.0,
            time_saving: 0.99,
        }];
        let csv = comparison_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,nrd,n_sld,reduced_obj,fixed_full_obj,benchmark_obj,error,ess_error,infeasible,t_reduced_s,t_full_s,time_saving"
        );
        assert_eq!(
            lines.next().unwrap(),
            "proposed,14,120,100,102,100,0.02,0.1,false,1,100,0.99"
        );
    }

    #[test]
    fn infeasible_row_has_empty_objectives() {
        let rows = vec![CompareRow {
            method: Method::Ctpc,
            nrd: 4,
            n_sld: 9,
            reduced_obj_usd: None,
            fixed_full_obj_usd: None,
            benchmark_obj_usd: 100.0,
            error: 1.0,
            ess_error: None,
            infeasible: true,
            t_reduced_s: 0.5,
            t_full_s: 10.0,
            time_saving: 0.95,
        }];
        let csv = comparison_csv(&rows);
        assert!(csv.lines().nth(1).unwrap().starts_with("ctpc,4,9,,,100,1,,true,"));
        let report = comparison_report(&rows, &bare_params());
        assert!(report.contains("100% (infeasible)"));
    }

    #[test]
    fn method_parses_both_ways() {
        assert_eq!("proposed".parse::<Method>().unwrap(), Method::Proposed);
        assert_eq!("ctpc".parse::<Method>().unwrap(), Method::Ctpc);
        assert!("kmeans".parse::<Method>().is_err());
        assert_eq!(
            serde_json::to_string(&Method::Proposed).unwrap(),
            "\"proposed\""
        );
    }
}
