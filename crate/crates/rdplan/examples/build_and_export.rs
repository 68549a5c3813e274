//! Build the planning models for the bundled instance and export them as
//! solver-ready files: the full-year benchmark, the identity reduction
//! (365 representative days), and a 14-day reduction.
//!
//! Writes `out/full.mps`, `out/reduced365.mps`, `out/reduced14.mps`, and
//! `out/reduced14.lp`, printing model sizes along the way.

use rdplan::aggregate::{agglomerate, extract_representatives, mark_extreme_days};
use rdplan::ingest::build_feature_days;
use rdplan::linking::link_days;
use rdplan::milp::MilpModel;
use rdplan::planner::{build_full_space_model, build_plan_model};
use rdplan::solver::{write_model, ModelFormat};
use rdplan::synthetic;
use std::path::Path;
use std::time::Instant;

fn describe(tag: &str, model: &MilpModel, built_in: std::time::Duration) {
    println!(
        "{tag}: {} variables ({} binary), {} constraints, built in {:.2?}",
        model.n_vars(),
        model.n_binaries(),
        model.constraints.len(),
        built_in
    );
}

fn main() -> rdplan::Result<()> {
    let out = Path::new("out");
    std::fs::create_dir_all(out).map_err(|e| rdplan::Error::io("out", e))?;

    let (network, params) = synthetic::garver_system();
    let (load, wind) = synthetic::synthetic_year(42, network.total_peak_load_mw());
    let wind_cap: f64 = network.wind_candidates.iter().map(|w| w.pmax_mw).sum();
    let features = build_feature_days(&load, &wind, wind_cap)?;
    let extremes = mark_extreme_days(&features, &[]);
    println!(
        "instance: {} buses, {} candidate lines, extreme day index {}",
        network.buses.len(),
        network.candidate_lines.len(),
        extremes[0]
    );

    let t = Instant::now();
    let full = build_full_space_model(&network, &params, &load, &wind)?;
    describe("full-year", &full, t.elapsed());
    write_model(&full, ModelFormat::Mps, &out.join("full.mps"))?;

    for &nrd in &[365usize, 14] {
        let t = Instant::now();
        let clustering = agglomerate(&features, nrd, &extremes)?;
        let reps = extract_representatives(&clustering, &features);
        let slds = link_days(&features, &reps)?;
        let model = build_plan_model(&network, &params, &reps, &slds)?;
        describe(&format!("reduced nrd={nrd} ({} blocks)", slds.n_slds()), &model, t.elapsed());
        write_model(&model, ModelFormat::Mps, &out.join(format!("reduced{nrd}.mps")))?;
        if nrd == 14 {
            write_model(&model, ModelFormat::Lp, &out.join("reduced14.lp"))?;
        }
    }
    println!("models written under {}", out.display());
    Ok(())
}
