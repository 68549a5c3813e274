//! Co-planning model assembly: investment in lines, wind plants, and storage
//! plus hourly operation over weighted representative days, with storage
//! energy chained across sequentially linked day blocks.
//!
//! Also builds the full-year benchmark variant (every day is its own
//! representative and block) and the fixed-investment re-dispatch transform.

use crate::aggregate::RepresentativeDaySet;
use crate::error::{Error, Result};
use crate::ingest::{DayMatrix, HourlySeries};
use crate::linking::SldPlan;
use crate::milp::{names, MilpModel, ModelMeta, Sense, VarId, VarKind};
use crate::system::{Network, PolicyParams};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Disjunctive constants above this are rejected as numerically unsafe.
pub const BIG_M_LIMIT: f64 = 1e9;

/// First-stage decisions: which lines to build and how much capacity to site.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InvestmentPlan {
    /// Candidate line ids (1-based declaration order).
    pub built_lines: BTreeSet<usize>,
    /// Storage power rating by bus (MW).
    pub ess_power_mw: BTreeMap<usize, f64>,
    /// Storage energy rating by bus (MWh).
    pub ess_energy_mwh: BTreeMap<usize, f64>,
    /// Wind plant capacity by bus (MW).
    pub wind_capacity_mw: BTreeMap<usize, f64>,
}

/// Operating profiles the model is instantiated over, already reduced to
/// (representative day, hour) with day weights and block structure.
struct Profiles {
    hours: usize,
    n_rd: usize,
    /// Load factor per (rd, h), per-unit of system peak.
    lf: Vec<Vec<f64>>,
    /// Wind capacity factor per (rd, h).
    wf: Vec<Vec<f64>>,
    /// Days represented by each representative day.
    rho_rd: Vec<f64>,
    /// Representative day of each block.
    sld_rd: Vec<usize>,
    /// Days in each block.
    rho_sld: Vec<f64>,
}

impl Profiles {
    fn from_reduced(reps: &RepresentativeDaySet, slds: &SldPlan) -> Result<Self> {
        let n_rd = reps.n_rds();
        if n_rd == 0 {
            return Err(Error::DimensionMismatch("no representative days".into()));
        }
        let hours = reps.rds[0].lf.len();
        for (i, rd) in reps.rds.iter().enumerate() {
            if rd.lf.len() != hours || rd.wf.len() != hours {
                return Err(Error::DimensionMismatch(format!(
                    "representative {i} has {} load / {} wind hours, expected {hours}",
                    rd.lf.len(),
                    rd.wf.len()
                )));
            }
        }
        if slds.blocks.len() != slds.weights.len() || slds.blocks.len() != slds.mp.len() {
            return Err(Error::DimensionMismatch(
                "block, weight and incidence counts disagree".into(),
            ));
        }
        if slds.blocks.is_empty() {
            return Err(Error::DimensionMismatch("no linked blocks".into()));
        }
        for (i, (b, row)) in slds.blocks.iter().zip(&slds.mp).enumerate() {
            if b.rd >= n_rd {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} maps to representative {} of {n_rd}",
                    b.rd
                )));
            }
            if row.len() != n_rd
                || row.iter().map(|&x| x as usize).sum::<usize>() != 1
                || row[b.rd] != 1
            {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} incidence row is not one-hot on its representative"
                )));
            }
        }
        Ok(Profiles {
            hours,
            n_rd,
            lf: reps.rds.iter().map(|r| r.lf.clone()).collect(),
            wf: reps.rds.iter().map(|r| r.wf.clone()).collect(),
            rho_rd: reps.rds.iter().map(|r| r.weight as f64).collect(),
            sld_rd: slds.blocks.iter().map(|b| b.rd).collect(),
            rho_sld: slds.weights.clone(),
        })
    }

    /// Every day its own representative and block, in calendar order.
    fn from_full_year(load: &HourlySeries, wind: &HourlySeries) -> Result<Self> {
        let load_days = DayMatrix::from_flat(&load.values)?;
        let wind_days = DayMatrix::from_flat(&wind.values)?;
        let peak = load.annual_max();
        if peak <= 0.0 {
            return Err(Error::DimensionMismatch("annual peak load is zero".into()));
        }
        let n = load_days.days();
        Ok(Profiles {
            hours: crate::ingest::HOURS_PER_DAY,
            n_rd: n,
            lf: (0..n)
                .map(|d| load_days.day_row(d).iter().map(|v| v / peak).collect())
                .collect(),
            wf: (0..n).map(|d| wind_days.day_row(d).to_vec()).collect(),
            rho_rd: vec![1.0; n],
            sld_rd: (0..n).collect(),
            rho_sld: vec![1.0; n],
        })
    }
}

/// Variable ids grouped by family for constraint assembly.
struct Vars {
    y: Vec<VarId>,
    c: BTreeMap<usize, VarId>,
    s: BTreeMap<usize, VarId>,
    pw: BTreeMap<usize, VarId>,
    p: Vec<Vec<Vec<VarId>>>,
    ps: Vec<Vec<Vec<Vec<VarId>>>>,
    r: Vec<Vec<Vec<VarId>>>,
    i: Vec<Vec<Vec<VarId>>>,
    pc: BTreeMap<usize, Vec<Vec<VarId>>>,
    pch: BTreeMap<usize, Vec<Vec<VarId>>>,
    pdh: BTreeMap<usize, Vec<Vec<VarId>>>,
    u: BTreeMap<usize, Vec<Vec<VarId>>>,
    lam: BTreeMap<usize, Vec<Vec<VarId>>>,
    lamz: BTreeMap<usize, Vec<VarId>>,
    dlam: BTreeMap<usize, Vec<VarId>>,
    e: BTreeMap<usize, Vec<VarId>>,
    lmin: BTreeMap<usize, Vec<VarId>>,
    lmax: BTreeMap<usize, Vec<VarId>>,
    th: BTreeMap<usize, Vec<Vec<VarId>>>,
    pe: Vec<Vec<Vec<VarId>>>,
    pl: Vec<Vec<Vec<VarId>>>,
}

fn build_core(network: &Network, params: &PolicyParams, prof: &Profiles) -> Result<MilpModel> {
    let psi = network.base_power_mva;
    let n_rd = prof.n_rd;
    let n_sld = prof.sld_rd.len();
    let hours = prof.hours;
    let nseg = params.cost_segments;
    let disc = 1.0 / (1.0 + params.interest_rate);
    let growth = 1.0 + params.load_growth;
    let total_peak = network.total_peak_load_mw();

    if network.wind_candidates.is_empty() && params.wind_share * growth * total_peak > 0.0 {
        return Err(Error::Config(
            "wind share is positive but the instance has no wind candidates".into(),
        ));
    }
    if network.generators.is_empty() && params.reserve_load_frac > 0.0 && total_peak > 0.0 {
        return Err(Error::Config(
            "reserve requirement is positive but the instance has no thermal units".into(),
        ));
    }
    for g in &network.generators {
        if g.segment_costs_usd_per_mwh.len() != nseg {
            return Err(Error::DimensionMismatch(format!(
                "generator at bus {} has {} cost segments, policy requires {nseg}",
                g.bus,
                g.segment_costs_usd_per_mwh.len()
            )));
        }
    }
    // disjunctive constants must stay numerically safe
    let big_m: Vec<f64> = network
        .candidate_lines
        .iter()
        .enumerate()
        .map(|(idx, l)| {
            let m = psi * l.susceptance_pu * 2.0 * params.theta_bound_rad;
            if m > BIG_M_LIMIT {
                Err(Error::BigMOverflow {
                    line: idx + 1,
                    value: m,
                })
            } else {
                Ok(m)
            }
        })
        .collect::<Result<_>>()?;

    let meta = ModelMeta {
        bus_ids: network.buses.iter().map(|b| b.id).collect(),
        n_generators: network.generators.len(),
        n_existing_lines: network.existing_lines.len(),
        n_candidate_lines: network.candidate_lines.len(),
        storage_buses: network.storage_candidates.iter().map(|s| s.bus).collect(),
        wind_buses: network.wind_candidates.iter().map(|w| w.bus).collect(),
        n_rd,
        n_sld,
        hours,
    };
    let mut m = MilpModel::new(meta);

    // ---- variables, family by family, in canonical order -------------------
    let y: Vec<VarId> = network
        .candidate_lines
        .iter()
        .enumerate()
        .map(|(idx, l)| {
            m.add_var(
                names::y_line(idx + 1),
                VarKind::Binary,
                0.0,
                1.0,
                l.build_cost_usd(),
            )
        })
        .collect();
    let mut c = BTreeMap::new();
    let mut s = BTreeMap::new();
    for st in &network.storage_candidates {
        c.insert(
            st.bus,
            m.add_var(
                names::c_storage(st.bus),
                VarKind::Continuous,
                0.0,
                st.cmax_mw,
                st.power_cost_usd_per_mw,
            ),
        );
        s.insert(
            st.bus,
            m.add_var(
                names::s_storage(st.bus),
                VarKind::Continuous,
                0.0,
                st.smax_mwh,
                st.energy_cost_usd_per_mwh,
            ),
        );
    }
    let mut pw = BTreeMap::new();
    for w in &network.wind_candidates {
        pw.insert(
            w.bus,
            m.add_var(
                names::pw_wind(w.bus),
                VarKind::Continuous,
                0.0,
                w.pmax_mw,
                w.invest_cost_usd_per_mw,
            ),
        );
    }
    let for_each_rd_h = |f: &mut dyn FnMut(usize, usize)| {
        for rd in 0..n_rd {
            for h in 0..hours {
                f(rd, h);
            }
        }
    };
    let mut p = Vec::new();
    let mut ps = Vec::new();
    let mut r = Vec::new();
    let mut i_onoff = Vec::new();
    for (gi, g) in network.generators.iter().enumerate() {
        let gid = gi + 1;
        let mut pg = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            pg[rd].push(m.add_var(
                names::p_gen(gid, rd + 1, h + 1),
                VarKind::Continuous,
                0.0,
                g.pmax_mw,
                0.0,
            ));
        });
        p.push(pg);
        let mut psg = vec![vec![Vec::with_capacity(nseg); hours]; n_rd];
        for_each_rd_h(&mut |rd, h| {
            for k in 0..nseg {
                psg[rd][h].push(m.add_var(
                    names::ps_seg(gid, rd + 1, h + 1, k + 1),
                    VarKind::Continuous,
                    0.0,
                    g.pmax_mw / nseg as f64,
                    disc * prof.rho_rd[rd] * g.segment_costs_usd_per_mwh[k],
                ));
            }
        });
        ps.push(psg);
        let mut rg = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            rg[rd].push(m.add_var(
                names::r_gen(gid, rd + 1, h + 1),
                VarKind::Continuous,
                0.0,
                g.pmax_mw,
                disc * prof.rho_rd[rd] * g.reserve_cost_usd_per_mwh,
            ));
        });
        r.push(rg);
        let mut ig = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            ig[rd].push(m.add_var(
                names::i_gen(gid, rd + 1, h + 1),
                VarKind::Binary,
                0.0,
                1.0,
                0.0,
            ));
        });
        i_onoff.push(ig);
    }
    let mut pc = BTreeMap::new();
    for w in &network.wind_candidates {
        let mut v = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            v[rd].push(m.add_var(
                names::pc_wind(w.bus, rd + 1, h + 1),
                VarKind::Continuous,
                0.0,
                f64::INFINITY,
                disc * prof.rho_rd[rd] * w.curtail_cost_usd_per_mwh,
            ));
        });
        pc.insert(w.bus, v);
    }
    let mut pch = BTreeMap::new();
    let mut pdh = BTreeMap::new();
    let mut u = BTreeMap::new();
    let mut lam = BTreeMap::new();
    let mut lamz = BTreeMap::new();
    let mut dlam = BTreeMap::new();
    let mut e = BTreeMap::new();
    let mut lmin = BTreeMap::new();
    let mut lmax = BTreeMap::new();
    for st in &network.storage_candidates {
        let bus = st.bus;
        let mut vch = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            vch[rd].push(m.add_var(
                names::pch(bus, rd + 1, h + 1),
                VarKind::Continuous,
                0.0,
                st.cmax_mw / st.eta_charge,
                0.0,
            ));
        });
        pch.insert(bus, vch);
        let mut vdh = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            vdh[rd].push(m.add_var(
                names::pdh(bus, rd + 1, h + 1),
                VarKind::Continuous,
                0.0,
                st.cmax_mw * st.eta_discharge,
                0.0,
            ));
        });
        pdh.insert(bus, vdh);
        let mut vu = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            vu[rd].push(m.add_var(
                names::u_storage(bus, rd + 1, h + 1),
                VarKind::Binary,
                0.0,
                1.0,
                0.0,
            ));
        });
        u.insert(bus, vu);
        let mut vlam = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            vlam[rd].push(m.add_var(
                names::lam(bus, rd + 1, h + 1),
                VarKind::Continuous,
                0.0,
                f64::INFINITY,
                0.0,
            ));
        });
        lam.insert(bus, vlam);
        lamz.insert(
            bus,
            (0..n_rd)
                .map(|rd| {
                    m.add_var(
                        names::lamz(bus, rd + 1),
                        VarKind::Continuous,
                        0.0,
                        f64::INFINITY,
                        0.0,
                    )
                })
                .collect::<Vec<_>>(),
        );
        dlam.insert(
            bus,
            (0..n_rd)
                .map(|rd| {
                    m.add_var(
                        names::dlam(bus, rd + 1),
                        VarKind::Continuous,
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        0.0,
                    )
                })
                .collect::<Vec<_>>(),
        );
        e.insert(
            bus,
            (0..n_sld)
                .map(|sld| {
                    m.add_var(
                        names::e_sld(bus, sld + 1),
                        VarKind::Continuous,
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        0.0,
                    )
                })
                .collect::<Vec<_>>(),
        );
        lmin.insert(
            bus,
            (0..n_rd)
                .map(|rd| {
                    m.add_var(
                        names::lmin(bus, rd + 1),
                        VarKind::Continuous,
                        0.0,
                        f64::INFINITY,
                        0.0,
                    )
                })
                .collect::<Vec<_>>(),
        );
        lmax.insert(
            bus,
            (0..n_rd)
                .map(|rd| {
                    m.add_var(
                        names::lmax(bus, rd + 1),
                        VarKind::Continuous,
                        0.0,
                        f64::INFINITY,
                        0.0,
                    )
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut th = BTreeMap::new();
    for b in &network.buses {
        let bound = params.theta_bound_rad;
        let (lo, hi) = if b.id == params.reference_bus {
            (0.0, 0.0)
        } else {
            (-bound, bound)
        };
        let mut v = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            v[rd].push(m.add_var(
                names::theta(b.id, rd + 1, h + 1),
                VarKind::Continuous,
                lo,
                hi,
                0.0,
            ));
        });
        th.insert(b.id, v);
    }
    let mut pe = Vec::new();
    for (li, l) in network.existing_lines.iter().enumerate() {
        let mut v = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            v[rd].push(m.add_var(
                names::pe_line(li + 1, rd + 1, h + 1),
                VarKind::Continuous,
                -l.pmax_mw,
                l.pmax_mw,
                0.0,
            ));
        });
        pe.push(v);
    }
    let mut pl = Vec::new();
    for (li, l) in network.candidate_lines.iter().enumerate() {
        let mut v = vec![Vec::with_capacity(hours); n_rd];
        for_each_rd_h(&mut |rd, h| {
            v[rd].push(m.add_var(
                names::pl_line(li + 1, rd + 1, h + 1),
                VarKind::Continuous,
                -l.pmax_mw,
                l.pmax_mw,
                0.0,
            ));
        });
        pl.push(v);
    }
    let vars = Vars {
        y,
        c,
        s,
        pw,
        p,
        ps,
        r,
        i: i_onoff,
        pc,
        pch,
        pdh,
        u,
        lam,
        lamz,
        dlam,
        e,
        lmin,
        lmax,
        th,
        pe,
        pl,
    };

    add_constraints(&mut m, network, params, prof, &vars, &big_m)?;
    Ok(m)
}

fn add_constraints(
    m: &mut MilpModel,
    network: &Network,
    params: &PolicyParams,
    prof: &Profiles,
    v: &Vars,
    big_m: &[f64],
) -> Result<()> {
    let psi = network.base_power_mva;
    let n_rd = prof.n_rd;
    let n_sld = prof.sld_rd.len();
    let hours = prof.hours;
    let nseg = params.cost_segments;
    let growth = 1.0 + params.load_growth;
    let total_peak = network.total_peak_load_mw();

    // per-bus device lookup for the balance rows
    let mut gens_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (gi, g) in network.generators.iter().enumerate() {
        gens_at.entry(g.bus).or_default().push(gi);
    }

    // hourly power balance at every bus
    for bus in &network.buses {
        for rd in 0..n_rd {
            for h in 0..hours {
                let mut terms: Vec<(VarId, f64)> = Vec::new();
                for &gi in gens_at.get(&bus.id).into_iter().flatten() {
                    terms.push((v.p[gi][rd][h], 1.0));
                }
                if let Some(&pw_id) = v.pw.get(&bus.id) {
                    terms.push((pw_id, prof.wf[rd][h]));
                    terms.push((v.pc[&bus.id][rd][h], -1.0));
                }
                if v.pch.contains_key(&bus.id) {
                    terms.push((v.pdh[&bus.id][rd][h], 1.0));
                    terms.push((v.pch[&bus.id][rd][h], -1.0));
                }
                for (li, l) in network.existing_lines.iter().enumerate() {
                    if l.from == bus.id {
                        terms.push((v.pe[li][rd][h], -1.0));
                    } else if l.to == bus.id {
                        terms.push((v.pe[li][rd][h], 1.0));
                    }
                }
                for (li, l) in network.candidate_lines.iter().enumerate() {
                    if l.from == bus.id {
                        terms.push((v.pl[li][rd][h], -1.0));
                    } else if l.to == bus.id {
                        terms.push((v.pl[li][rd][h], 1.0));
                    }
                }
                let rhs = growth * prof.lf[rd][h] * bus.peak_load_mw;
                m.add_con(
                    format!("BAL_B{:02}_D{:03}_H{:02}", bus.id, rd + 1, h + 1),
                    terms,
                    Sense::Eq,
                    rhs,
                );
            }
        }
    }

    // thermal units: on/off capacity, segment split, segment caps
    for (gi, g) in network.generators.iter().enumerate() {
        let gid = gi + 1;
        for rd in 0..n_rd {
            for h in 0..hours {
                m.add_con(
                    format!("ONCAP_G{gid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    vec![(v.p[gi][rd][h], 1.0), (v.i[gi][rd][h], -g.pmax_mw)],
                    Sense::Le,
                    0.0,
                );
                let mut terms = vec![(v.p[gi][rd][h], 1.0)];
                for k in 0..nseg {
                    terms.push((v.ps[gi][rd][h][k], -1.0));
                }
                m.add_con(
                    format!("SEGSUM_G{gid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    terms,
                    Sense::Eq,
                    0.0,
                );
                for k in 0..nseg {
                    m.add_con(
                        format!("SEGCAP_G{gid:02}_D{:03}_H{:02}_K{:02}", rd + 1, h + 1, k + 1),
                        vec![
                            (v.ps[gi][rd][h][k], 1.0),
                            (v.i[gi][rd][h], -g.pmax_mw / nseg as f64),
                        ],
                        Sense::Le,
                        0.0,
                    );
                }
            }
        }
    }

    // wind: capacity share, curtailment caps, curtailed-energy share
    if !network.wind_candidates.is_empty() {
        m.add_con(
            "WSHARE".into(),
            v.pw.values().map(|&id| (id, 1.0)).collect(),
            Sense::Ge,
            params.wind_share * growth * total_peak,
        );
        for w in &network.wind_candidates {
            for rd in 0..n_rd {
                for h in 0..hours {
                    m.add_con(
                        format!("CURTCAP_W{:02}_D{:03}_H{:02}", w.bus, rd + 1, h + 1),
                        vec![
                            (v.pc[&w.bus][rd][h], 1.0),
                            (v.pw[&w.bus], -prof.wf[rd][h]),
                        ],
                        Sense::Le,
                        0.0,
                    );
                }
            }
        }
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for w in &network.wind_candidates {
            let mut wf_total = 0.0;
            for rd in 0..n_rd {
                let day_weight = if params.weighted_curtailment {
                    prof.rho_rd[rd]
                } else {
                    1.0
                };
                for h in 0..hours {
                    terms.push((v.pc[&w.bus][rd][h], day_weight));
                    wf_total += day_weight * prof.wf[rd][h];
                }
            }
            terms.push((v.pw[&w.bus], -params.max_curtail_share * wf_total));
        }
        m.add_con("CURTSHARE".into(), terms, Sense::Le, 0.0);
    }

    // flexible spinning reserve
    for (gi, g) in network.generators.iter().enumerate() {
        let gid = gi + 1;
        for rd in 0..n_rd {
            for h in 0..hours {
                m.add_con(
                    format!("RLIM_G{gid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    vec![(v.r[gi][rd][h], 1.0), (v.p[gi][rd][h], -1.0)],
                    Sense::Le,
                    0.0,
                );
                m.add_con(
                    format!("RHEAD_G{gid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    vec![(v.r[gi][rd][h], 1.0), (v.p[gi][rd][h], 1.0)],
                    Sense::Le,
                    g.pmax_mw,
                );
            }
        }
    }
    if !network.generators.is_empty() {
        for rd in 0..n_rd {
            for h in 0..hours {
                let mut terms: Vec<(VarId, f64)> =
                    (0..network.generators.len()).map(|gi| (v.r[gi][rd][h], 1.0)).collect();
                for w in &network.wind_candidates {
                    terms.push((v.pw[&w.bus], -params.reserve_wind_frac * prof.wf[rd][h]));
                }
                m.add_con(
                    format!("RESV_D{:03}_H{:02}", rd + 1, h + 1),
                    terms,
                    Sense::Ge,
                    params.reserve_load_frac * growth * prof.lf[rd][h] * total_peak,
                );
            }
        }
    }

    // existing line flows follow angle differences; capacity sits in bounds
    for (li, l) in network.existing_lines.iter().enumerate() {
        let lid = li + 1;
        for rd in 0..n_rd {
            for h in 0..hours {
                m.add_con(
                    format!("EFLOW_L{lid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    vec![
                        (v.pe[li][rd][h], 1.0),
                        (v.th[&l.from][rd][h], -psi * l.susceptance_pu),
                        (v.th[&l.to][rd][h], psi * l.susceptance_pu),
                    ],
                    Sense::Eq,
                    0.0,
                );
            }
        }
    }

    // candidate lines: disjunctive flow definition and gated capacity
    for (li, l) in network.candidate_lines.iter().enumerate() {
        let lid = li + 1;
        let mm = big_m[li];
        for rd in 0..n_rd {
            for h in 0..hours {
                let flow = |sign: f64| -> Vec<(VarId, f64)> {
                    vec![
                        (v.pl[li][rd][h], 1.0),
                        (v.th[&l.from][rd][h], -psi * l.susceptance_pu),
                        (v.th[&l.to][rd][h], psi * l.susceptance_pu),
                        (v.y[li], sign * mm),
                    ]
                };
                m.add_con(
                    format!("NFLOWHI_L{lid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    flow(1.0),
                    Sense::Le,
                    mm,
                );
                m.add_con(
                    format!("NFLOWLO_L{lid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    flow(-1.0),
                    Sense::Ge,
                    -mm,
                );
                m.add_con(
                    format!("NCAPHI_L{lid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    vec![(v.pl[li][rd][h], 1.0), (v.y[li], -l.pmax_mw)],
                    Sense::Le,
                    0.0,
                );
                m.add_con(
                    format!("NCAPLO_L{lid:02}_D{:03}_H{:02}", rd + 1, h + 1),
                    vec![(v.pl[li][rd][h], 1.0), (v.y[li], l.pmax_mw)],
                    Sense::Ge,
                    0.0,
                );
            }
        }
    }

    // storage operation
    for st in &network.storage_candidates {
        let bus = st.bus;
        let (ec, ed) = (st.eta_charge, 1.0 / st.eta_discharge);
        m.add_con(
            format!("RATIO_S{bus:02}"),
            vec![(v.c[&bus], st.ratio_hours), (v.s[&bus], -1.0)],
            Sense::Le,
            0.0,
        );
        for rd in 0..n_rd {
            for h in 0..hours {
                let d = rd + 1;
                let hh = h + 1;
                m.add_con(
                    format!("CHCAP_S{bus:02}_D{d:03}_H{hh:02}"),
                    vec![(v.pch[&bus][rd][h], ec), (v.c[&bus], -1.0)],
                    Sense::Le,
                    0.0,
                );
                m.add_con(
                    format!("DCCAP_S{bus:02}_D{d:03}_H{hh:02}"),
                    vec![(v.pdh[&bus][rd][h], ed), (v.c[&bus], -1.0)],
                    Sense::Le,
                    0.0,
                );
                m.add_con(
                    format!("EXCLC_S{bus:02}_D{d:03}_H{hh:02}"),
                    vec![(v.pch[&bus][rd][h], ec), (v.u[&bus][rd][h], -st.cmax_mw)],
                    Sense::Le,
                    0.0,
                );
                m.add_con(
                    format!("EXCLD_S{bus:02}_D{d:03}_H{hh:02}"),
                    vec![(v.pdh[&bus][rd][h], ed), (v.u[&bus][rd][h], st.cmax_mw)],
                    Sense::Le,
                    st.cmax_mw,
                );
                // hourly state of charge, day-initial level feeding hour 1
                let mut terms = vec![
                    (v.lam[&bus][rd][h], 1.0),
                    (v.pch[&bus][rd][h], -ec),
                    (v.pdh[&bus][rd][h], ed),
                ];
                if h == 0 {
                    terms.push((v.lamz[&bus][rd], -1.0));
                } else {
                    terms.push((v.lam[&bus][rd][h - 1], -1.0));
                }
                m.add_con(
                    format!("SOC_S{bus:02}_D{d:03}_H{hh:02}"),
                    terms,
                    Sense::Eq,
                    0.0,
                );
                m.add_con(
                    format!("LAMCAP_S{bus:02}_D{d:03}_H{hh:02}"),
                    vec![(v.lam[&bus][rd][h], 1.0), (v.s[&bus], -1.0)],
                    Sense::Le,
                    0.0,
                );
                // excursion envelopes below/above the day-initial level
                m.add_con(
                    format!("EXMIN_S{bus:02}_D{d:03}_H{hh:02}"),
                    vec![
                        (v.lmin[&bus][rd], 1.0),
                        (v.lamz[&bus][rd], -1.0),
                        (v.lam[&bus][rd][h], 1.0),
                    ],
                    Sense::Ge,
                    0.0,
                );
                m.add_con(
                    format!("EXMAX_S{bus:02}_D{d:03}_H{hh:02}"),
                    vec![
                        (v.lmax[&bus][rd], 1.0),
                        (v.lamz[&bus][rd], 1.0),
                        (v.lam[&bus][rd][h], -1.0),
                    ],
                    Sense::Ge,
                    0.0,
                );
            }
            m.add_con(
                format!("LAMZCAP_S{bus:02}_D{:03}", rd + 1),
                vec![(v.lamz[&bus][rd], 1.0), (v.s[&bus], -1.0)],
                Sense::Le,
                0.0,
            );
            let mut terms = vec![(v.dlam[&bus][rd], 1.0)];
            for h in 0..hours {
                terms.push((v.pch[&bus][rd][h], -ec));
                terms.push((v.pdh[&bus][rd][h], ed));
            }
            m.add_con(
                format!("DLAMDEF_S{bus:02}_D{:03}", rd + 1),
                terms,
                Sense::Eq,
                0.0,
            );
        }

        // block-level energy chain with cyclic closure
        for sld in 1..n_sld {
            m.add_con(
                format!("CHAIN_S{bus:02}_B{:03}", sld + 1),
                vec![
                    (v.e[&bus][sld], 1.0),
                    (v.e[&bus][sld - 1], -1.0),
                    (v.dlam[&bus][prof.sld_rd[sld]], -prof.rho_sld[sld]),
                ],
                Sense::Eq,
                0.0,
            );
        }
        m.add_con(
            format!("CYC_S{bus:02}"),
            vec![
                (v.e[&bus][0], 1.0),
                (v.e[&bus][n_sld - 1], -1.0),
                (v.dlam[&bus][prof.sld_rd[0]], -prof.rho_sld[0]),
            ],
            Sense::Le,
            0.0,
        );

        // within-block envelopes keep the running level inside [0, S]
        for sld in 0..n_sld {
            let rd = prof.sld_rd[sld];
            let prev = if sld == 0 { n_sld - 1 } else { sld - 1 };
            m.add_con(
                format!("ENVTOP_S{bus:02}_B{:03}", sld + 1),
                vec![
                    (v.e[&bus][sld], 1.0),
                    (v.lmax[&bus][rd], 1.0),
                    (v.dlam[&bus][rd], -1.0),
                    (v.s[&bus], -1.0),
                ],
                Sense::Le,
                0.0,
            );
            m.add_con(
                format!("ENVPRELO_S{bus:02}_B{:03}", sld + 1),
                vec![(v.e[&bus][prev], 1.0), (v.lmin[&bus][rd], -1.0)],
                Sense::Ge,
                0.0,
            );
            m.add_con(
                format!("ENVPREHI_S{bus:02}_B{:03}", sld + 1),
                vec![
                    (v.e[&bus][prev], 1.0),
                    (v.lmax[&bus][rd], 1.0),
                    (v.s[&bus], -1.0),
                ],
                Sense::Le,
                0.0,
            );
            m.add_con(
                format!("ENVBOT_S{bus:02}_B{:03}", sld + 1),
                vec![
                    (v.e[&bus][sld], 1.0),
                    (v.lmin[&bus][rd], -1.0),
                    (v.dlam[&bus][rd], 1.0),
                ],
                Sense::Ge,
                0.0,
            );
        }
    }

    Ok(())
}

/// Build the reduced co-planning model over representative days and blocks.
pub fn build_plan_model(
    network: &Network,
    params: &PolicyParams,
    reps: &RepresentativeDaySet,
    slds: &SldPlan,
) -> Result<MilpModel> {
    build_core(network, params, &Profiles::from_reduced(reps, slds)?)
}

/// Build the full-year benchmark: every calendar day is its own
/// representative of weight one and its own block, so the energy chain is a
/// chronological year-long recursion.
pub fn build_full_space_model(
    network: &Network,
    params: &PolicyParams,
    load: &HourlySeries,
    wind: &HourlySeries,
) -> Result<MilpModel> {
    build_core(network, params, &Profiles::from_full_year(load, wind)?)
}

/// Pin every investment variable to the given plan (equal bounds); leaves
/// operation free and the objective untouched.
pub fn fix_investments(model: &MilpModel, plan: &InvestmentPlan) -> Result<MilpModel> {
    let mut fixed = model.clone();
    let mut pin = |name: String, value: f64| -> Result<()> {
        let id = fixed
            .var_id(&name)
            .ok_or_else(|| Error::PlanOutOfBounds(format!("{name} not in model")))?;
        let v = &mut fixed.variables[id];
        let tol = 1e-6 * v.upper.abs().max(1.0);
        if value < v.lower - tol || value > v.upper + tol {
            return Err(Error::PlanOutOfBounds(format!(
                "{name} = {value} outside [{}, {}]",
                v.lower, v.upper
            )));
        }
        let value = value.clamp(v.lower, v.upper);
        v.lower = value;
        v.upper = value;
        Ok(())
    };
    for l in 1..=model.meta.n_candidate_lines {
        let built = plan.built_lines.contains(&l);
        pin(names::y_line(l), if built { 1.0 } else { 0.0 })?;
    }
    for &line in &plan.built_lines {
        if line == 0 || line > model.meta.n_candidate_lines {
            return Err(Error::PlanOutOfBounds(format!(
                "built line {line} does not exist (1..={})",
                model.meta.n_candidate_lines
            )));
        }
    }
    for &bus in &model.meta.storage_buses.clone() {
        pin(
            names::c_storage(bus),
            plan.ess_power_mw.get(&bus).copied().unwrap_or(0.0),
        )?;
        pin(
            names::s_storage(bus),
            plan.ess_energy_mwh.get(&bus).copied().unwrap_or(0.0),
        )?;
    }
    for &bus in &model.meta.wind_buses.clone() {
        pin(
            names::pw_wind(bus),
            plan.wind_capacity_mw.get(&bus).copied().unwrap_or(0.0),
        )?;
    }
    Ok(fixed)
}
