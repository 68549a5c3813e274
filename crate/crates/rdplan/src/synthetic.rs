//! Deterministic synthetic inputs: an hourly demand/wind-availability year
//! and two small planning instances used by the examples and the test suite.

use crate::error::Result;
use crate::ingest::{HourlySeries, DAYS_PER_YEAR, HOURS_PER_DAY};
use crate::system::{parse_system, Network, PolicyParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Year the synthetic series are stamped with (non-leap).
pub const SYNTHETIC_YEAR: i32 = 2023;

/// Day index (0-based) of the engineered heat wave: the annual demand peak
/// paired with becalmed wind, so the adequacy-critical day is unambiguous.
pub const HEAT_WAVE_DAY: usize = 199;

/// Day indices (0-based) of engineered winter storms: three multi-day runs of
/// sustained high wind over mild demand. Every storm day uses the same
/// deterministic template, hour for hour, so the surplus they inject is
/// represented exactly by one aggregated day carrying their full weight.
pub const STORM_DAYS: [usize; 10] = [8, 9, 10, 11, 39, 40, 41, 352, 353, 354];

/// Day index (0-based) of the stress year's single extreme evening peak.
pub const STRESS_PEAK_DAY: usize = 19;

/// Smoothed noise in [-1, 1]: an order-1 autoregression over uniform draws.
struct SmoothNoise {
    rng: ChaCha8Rng,
    state: f64,
    persistence: f64,
}

impl SmoothNoise {
    fn new(seed: u64, persistence: f64) -> Self {
        SmoothNoise {
            rng: ChaCha8Rng::seed_from_u64(seed),
            state: 0.0,
            persistence,
        }
    }

    fn next(&mut self) -> f64 {
        let shock: f64 = self.rng.gen_range(-1.0..1.0);
        self.state = self.persistence * self.state + (1.0 - self.persistence) * shock;
        self.state
    }
}

/// One deterministic year of system demand (MW) and wind availability
/// (fraction of installed capacity), hour by hour.
///
/// Demand peaks in summer (cooling-driven) with a two-bump weekday shape,
/// weekend relief, and smooth noise. Availability peaks in winter with slow,
/// persistent noise. One engineered heat-wave day pairs the annual demand
/// peak with becalmed wind — the scarcity event that makes peaking storage
/// worth building. Three engineered winter storms ([`STORM_DAYS`]) hold
/// output high over mild demand for days at a stretch, the multi-day surplus
/// runs that dominate annual curtailment.
pub fn synthetic_year(seed: u64, peak_load_mw: f64) -> (HourlySeries, HourlySeries) {
    let mut load_noise = SmoothNoise::new(seed, 0.7);
    let mut wind_noise = SmoothNoise::new(seed ^ 0x9e37_79b9_7f4a_7c15, 0.88);
    let mut load = Vec::with_capacity(DAYS_PER_YEAR * HOURS_PER_DAY);
    let mut wind = Vec::with_capacity(DAYS_PER_YEAR * HOURS_PER_DAY);

    for day in 0..DAYS_PER_YEAR {
        // +1 in high summer for demand, +1 in mid-January for wind
        let season_load = (TAU * (day as f64 - HEAT_WAVE_DAY as f64) / 365.0).cos();
        let season_wind = (TAU * (day as f64 - 15.0) / 365.0).cos();
        let weekend = day % 7 >= 5;
        let scarcity = day == HEAT_WAVE_DAY;
        let storm = STORM_DAYS.contains(&day);
        for hour in 0..HOURS_PER_DAY {
            let h = hour as f64;
            // two-bump weekday shape: midday cooling and early evening
            let midday = (-((h - 13.0) / 3.2).powi(2)).exp();
            let evening = (-((h - 19.0) / 2.8).powi(2)).exp();
            let noise_l = load_noise.next();
            let noise_w = wind_noise.next();

            let lf = if storm {
                // fixed template: mild, flat demand under the storm front
                0.36
            } else {
                let mut lf = 0.42
                    + 0.14 * season_load
                    + 0.12 * midday
                    + 0.10 * evening
                    + 0.02 * noise_l;
                if weekend {
                    lf -= 0.05;
                }
                if scarcity {
                    lf += 0.34 * (-((h - 16.0) / 3.5).powi(2)).exp();
                }
                lf
            };
            load.push(peak_load_mw * lf.clamp(0.22, 1.0));

            let wf = if storm {
                // fixed template: sustained, steady output
                0.84
            } else if scarcity {
                0.05 // becalmed through the heat wave
            } else {
                0.22 + 0.08 * season_wind
                    + 0.04 * (TAU * (h - 3.0) / 24.0).cos()
                    + 0.04 * noise_w
            };
            wind.push(wf.clamp(0.02, 0.97));
        }
    }
    let load = HourlySeries::new(load, "synthetic-load", SYNTHETIC_YEAR)
        .expect("generator emits a full year");
    let wind = HourlySeries::new(wind, "synthetic-wind", SYNTHETIC_YEAR)
        .expect("generator emits a full year");
    (load, wind)
}

/// The bundled six-bus instance (plus one expansion bus): six existing lines,
/// eleven candidate lines, three wind sites, three battery and two
/// pumped-hydro candidates. Synthetic reconstruction — costs and shapes are
/// plausible, not sourced measurements.
pub fn garver_system() -> (Network, PolicyParams) {
    parse_system(GARVER_JSON, "garver6-synthetic (built-in)")
        .expect("built-in instance is valid")
}

/// JSON text of the bundled instance; [`garver_system`] parses exactly this.
pub const GARVER_JSON: &str = r#"{
    "base_power_mva": 100.0,
    "buses": [
        {"id": 1, "peak_load_mw": 80.0},
        {"id": 2, "peak_load_mw": 170.0},
        {"id": 3, "peak_load_mw": 70.0},
        {"id": 4, "peak_load_mw": 140.0},
        {"id": 5, "peak_load_mw": 100.0},
        {"id": 6, "peak_load_mw": 0.0},
        {"id": 7, "peak_load_mw": 0.0}
    ],
    "existing_lines": [
        {"from": 1, "to": 2, "susceptance_pu": 4.0, "pmax_mw": 160.0},
        {"from": 1, "to": 4, "susceptance_pu": 3.5, "pmax_mw": 150.0},
        {"from": 1, "to": 5, "susceptance_pu": 4.0, "pmax_mw": 150.0},
        {"from": 2, "to": 3, "susceptance_pu": 4.5, "pmax_mw": 160.0},
        {"from": 2, "to": 4, "susceptance_pu": 3.5, "pmax_mw": 140.0},
        {"from": 3, "to": 5, "susceptance_pu": 4.5, "pmax_mw": 150.0}
    ],
    "candidate_lines": [
        {"from": 1, "to": 5, "susceptance_pu": 4.0, "pmax_mw": 100.0,
         "length_km": 20.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 2, "to": 3, "susceptance_pu": 4.5, "pmax_mw": 100.0,
         "length_km": 20.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 2, "to": 6, "susceptance_pu": 3.333, "pmax_mw": 100.0,
         "length_km": 40.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 2, "to": 6, "susceptance_pu": 3.333, "pmax_mw": 100.0,
         "length_km": 40.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 4, "to": 6, "susceptance_pu": 3.333, "pmax_mw": 100.0,
         "length_km": 45.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 4, "to": 6, "susceptance_pu": 3.333, "pmax_mw": 100.0,
         "length_km": 45.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 3, "to": 5, "susceptance_pu": 4.5, "pmax_mw": 100.0,
         "length_km": 22.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 5, "to": 7, "susceptance_pu": 6.667, "pmax_mw": 200.0,
         "length_km": 35.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 6, "to": 7, "susceptance_pu": 4.0, "pmax_mw": 200.0,
         "length_km": 50.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 3, "to": 7, "susceptance_pu": 2.857, "pmax_mw": 200.0,
         "length_km": 50.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0},
        {"from": 2, "to": 7, "susceptance_pu": 2.222, "pmax_mw": 200.0,
         "length_km": 60.0, "invest_cost_usd_per_km": 2000000.0, "right_of_way_usd_per_km": 80000.0}
    ],
    "generators": [
        {"bus": 1, "pmax_mw": 280.0, "segment_costs_usd_per_mwh": [17.5]},
        {"bus": 3, "pmax_mw": 270.0, "segment_costs_usd_per_mwh": [26.0]}
    ],
    "wind_candidates": [
        {"bus": 3, "pmax_mw": 150.0, "invest_cost_usd_per_mw": 1100000.0,
         "curtail_cost_usd_per_mwh": 0.0},
        {"bus": 5, "pmax_mw": 150.0, "invest_cost_usd_per_mw": 1100000.0,
         "curtail_cost_usd_per_mwh": 0.0},
        {"bus": 7, "pmax_mw": 300.0, "invest_cost_usd_per_mw": 1100000.0,
         "curtail_cost_usd_per_mwh": 0.0}
    ],
    "storage_candidates": [
        {"bus": 1, "tech": "bess", "cmax_mw": 100.0, "smax_mwh": 400.0},
        {"bus": 4, "tech": "bess", "cmax_mw": 100.0, "smax_mwh": 400.0},
        {"bus": 5, "tech": "bess", "cmax_mw": 100.0, "smax_mwh": 400.0},
        {"bus": 2, "tech": "phess", "cmax_mw": 50.0, "smax_mwh": 50000.0},
        {"bus": 3, "tech": "phess", "cmax_mw": 50.0, "smax_mwh": 50000.0}
    ],
    "policy": {
        "cost_segments": 1,
        "reference_bus": 1,
        "wind_share": 0.5,
        "max_curtail_share": 0.05,
        "load_growth": 0.05,
        "theta_bound_rad": 0.6,
        "weighted_curtailment": true
    }
}"#;

/// Total installed peak load of the bundled instance (MW).
pub fn garver_peak_load_mw() -> f64 {
    garver_system().0.total_peak_load_mw()
}

/// A two-bus instance where averaging the extreme day away is fatal:
/// a remote 150 MW peak exceeds the single existing 100 MW corridor, so any
/// plan built without seeing the peak day skips the second circuit and cannot
/// serve the true peak. Pair with [`stress_year`].
pub fn stress_system() -> (Network, PolicyParams) {
    parse_system(STRESS_JSON, "ctpc-stress (built-in)")
        .expect("built-in instance is valid")
}

/// JSON text of the stress instance; [`stress_system`] parses exactly this.
pub const STRESS_JSON: &str = r#"{
    "base_power_mva": 100.0,
    "buses": [
        {"id": 1, "peak_load_mw": 0.0},
        {"id": 2, "peak_load_mw": 150.0}
    ],
    "existing_lines": [
        {"from": 1, "to": 2, "susceptance_pu": 3.0, "pmax_mw": 100.0}
    ],
    "candidate_lines": [
        {"from": 1, "to": 2, "susceptance_pu": 3.0, "pmax_mw": 100.0,
         "length_km": 10.0, "invest_cost_usd_per_km": 1000000.0, "right_of_way_usd_per_km": 40000.0}
    ],
    "generators": [
        {"bus": 1, "pmax_mw": 250.0, "segment_costs_usd_per_mwh": [20.0]}
    ],
    "wind_candidates": [],
    "storage_candidates": [],
    "policy": {
        "cost_segments": 1,
        "wind_share": 0.0,
        "max_curtail_share": 0.0,
        "reference_bus": 1
    }
}"#;

/// Demand/wind year for the stress instance: a flat, mild year except for the
/// engineered peak day, whose evening spike is the only reason to build the
/// second circuit. Chronology-preserving aggregation at small day counts
/// averages that day into its neighbours and under-builds.
pub fn stress_year() -> (HourlySeries, HourlySeries) {
    let mut load = Vec::with_capacity(DAYS_PER_YEAR * HOURS_PER_DAY);
    for day in 0..DAYS_PER_YEAR {
        for hour in 0..HOURS_PER_DAY {
            let h = hour as f64;
            let evening = (-((h - 19.0) / 2.5).powi(2)).exp();
            let mut lf = 0.50 + 0.08 * evening;
            if day == STRESS_PEAK_DAY {
                lf = 0.55 + 0.45 * evening;
            }
            load.push(150.0 * lf);
        }
    }
    let load = HourlySeries::new(load, "stress-load", SYNTHETIC_YEAR)
        .expect("generator emits a full year");
    let wind = HourlySeries::new(
        vec![0.0; DAYS_PER_YEAR * HOURS_PER_DAY],
        "stress-wind",
        SYNTHETIC_YEAR,
    )
    .expect("generator emits a full year");
    (load, wind)
}

/// Check the generated pair against the ingestion rules (length, ranges).
pub fn validate_year(load: &HourlySeries, wind: &HourlySeries) -> Result<()> {
    use crate::error::Error;
    for (t, &v) in load.values.iter().enumerate() {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::BadValue {
                path: load.label.clone(),
                row: t + 2,
                reason: format!("load {v} at hour {t}"),
            });
        }
    }
    for (t, &v) in wind.values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::BadValue {
                path: wind.label.clone(),
                row: t + 2,
                reason: format!("availability {v} at hour {t}"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_feature_days;

    #[test]
    fn year_is_deterministic() {
        let (l1, w1) = synthetic_year(42, 560.0);
        let (l2, w2) = synthetic_year(42, 560.0);
        assert_eq!(l1.values, l2.values);
        assert_eq!(w1.values, w2.values);
        let (l3, _) = synthetic_year(43, 560.0);
        assert_ne!(l1.values, l3.values);
    }

    #[test]
    fn year_passes_ingestion_rules() {
        let (load, wind) = synthetic_year(42, 560.0);
        validate_year(&load, &wind).unwrap();
        let (load, wind) = stress_year();
        validate_year(&load, &wind).unwrap();
    }

    #[test]
    fn heat_wave_is_the_extreme_net_load_day() {
        let (load, wind) = synthetic_year(42, 560.0);
        let features = build_feature_days(&load, &wind, 600.0).unwrap();
        let (day, _) = features.raw_net_load.argmax();
        assert_eq!(day, HEAT_WAVE_DAY);
    }

    #[test]
    fn annual_peak_lands_on_heat_wave_day() {
        let (load, _) = synthetic_year(42, 560.0);
        let peak = load.annual_max();
        let t0 = HEAT_WAVE_DAY * HOURS_PER_DAY;
        let wave_max = load.values[t0..t0 + HOURS_PER_DAY]
            .iter()
            .cloned()
            .fold(f64::MIN, f64::max);
        assert_eq!(peak, wave_max);
    }

    #[test]
    fn storm_days_share_one_exact_template() {
        let (load, wind) = synthetic_year(42, 560.0);
        let first = STORM_DAYS[0] * HOURS_PER_DAY;
        for &day in &STORM_DAYS[1..] {
            let t0 = day * HOURS_PER_DAY;
            for h in 0..HOURS_PER_DAY {
                assert_eq!(load.values[t0 + h], load.values[first + h]);
                assert_eq!(wind.values[t0 + h], wind.values[first + h]);
            }
        }
    }

    #[test]
    fn windy_spells_span_consecutive_days_above_the_demand_valley() {
        // multi-day surplus runs are what exercise block-to-block energy
        // carryover; make sure the generator actually produces them
        let (net, params) = garver_system();
        let peak = net.total_peak_load_mw();
        let (load, wind) = synthetic_year(42, peak);
        let wind_mw = params.wind_share * (1.0 + params.load_growth) * peak;
        let mut surplus_days = vec![false; DAYS_PER_YEAR];
        for day in 0..DAYS_PER_YEAR {
            let mut surplus_mwh = 0.0;
            for h in 0..HOURS_PER_DAY {
                let t = day * HOURS_PER_DAY + h;
                let s = wind_mw * wind.values[t] - (1.0 + params.load_growth) * load.values[t];
                if s > 0.0 {
                    surplus_mwh += s;
                }
            }
            surplus_days[day] = surplus_mwh > 0.0;
        }
        let longest_run = surplus_days
            .split(|&d| !d)
            .map(<[bool]>::len)
            .max()
            .unwrap_or(0);
        assert!(
            longest_run >= 3,
            "expected a multi-day surplus spell, longest run was {longest_run}"
        );
    }

    #[test]
    fn bundled_instance_matches_advertised_shape() {
        let (net, params) = garver_system();
        assert_eq!(net.buses.len(), 7);
        assert_eq!(net.existing_lines.len(), 6);
        assert_eq!(net.candidate_lines.len(), 11);
        assert_eq!(net.wind_candidates.len(), 3);
        let wind_mw: Vec<f64> = net.wind_candidates.iter().map(|w| w.pmax_mw).collect();
        assert_eq!(wind_mw, vec![150.0, 150.0, 300.0]);
        let bess = net
            .storage_candidates
            .iter()
            .filter(|s| s.ratio_hours == 4.0)
            .count();
        assert_eq!(bess, 3);
        assert_eq!(net.storage_candidates.len(), 5);
        assert_eq!(params.cost_segments, 1);
        // the shares that shape the plan are set explicitly, not assumed
        assert!(!params.assumed.iter().any(|a| a == "policy.wind_share"));
        assert!(!params.assumed.iter().any(|a| a == "policy.max_curtail_share"));
    }

    #[test]
    fn stress_year_peak_exceeds_existing_corridor() {
        let (load, _) = stress_year();
        let (net, params) = stress_system();
        let peak = load.annual_max() / 150.0; // per-unit of bus-2 peak
        let grown = 150.0 * peak * (1.0 + params.load_growth);
        assert!(grown > net.existing_lines[0].pmax_mw);
        // an ordinary day fits through the existing corridor even with growth
        let ordinary_max = load.values[..STRESS_PEAK_DAY * HOURS_PER_DAY]
            .iter()
            .cloned()
            .fold(f64::MIN, f64::max);
        let lf = ordinary_max / load.annual_max();
        assert!(lf * (1.0 + params.load_growth) * 150.0 < 100.0);
    }
}
