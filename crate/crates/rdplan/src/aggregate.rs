//! Hierarchical centroid-linkage clustering with Ward dissimilarity,
//! extreme-day pinning, and a chronology-only adjacent-merge baseline.
//!
//! Days start as singleton clusters; the pair with the globally minimum
//! dissimilarity merges until the requested number of representative days
//! remains. The day holding the year's maximum net-load is pinned so that its
//! cluster centroid stays equal to that day, which keeps the adequacy-driving
//! peak visible in the reduced model.

use crate::error::{Error, Result};
use crate::ingest::{FeatureDays, HOURS_PER_DAY};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One cluster of day indices and its representative centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Sorted member day indices.
    pub members: Vec<usize>,
    pub centroid: Vec<f64>,
    /// When set, the centroid is held equal to this day's feature vector.
    pub pinned_extreme: Option<usize>,
}

impl Cluster {
    pub fn lowest_day(&self) -> usize {
        self.members[0]
    }
}

/// A single merge event: clusters identified by their lowest member day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeRecord {
    pub a: usize,
    pub b: usize,
    pub dissimilarity: f64,
}

/// Final partition plus the ordered merge history.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub clusters: Vec<Cluster>,
    pub merge_log: Vec<MergeRecord>,
}

/// How to choose the surviving pin when two pinned clusters merge.
#[derive(Debug, Clone, Copy)]
pub enum PinTie {
    /// Keep the extreme with the earliest day index (default, reproducible).
    EarliestDay,
    /// Pick one of the two pins at random from a seeded stream.
    Seeded(u64),
}

/// Arithmetic mean of feature rows (Eq.-style centroid over any dimension).
pub fn mean_rows(rows: &[&[f64]]) -> Vec<f64> {
    let dim = rows[0].len();
    let mut out = vec![0.0; dim];
    for row in rows {
        for (o, v) in out.iter_mut().zip(row.iter()) {
            *o += v;
        }
    }
    let n = rows.len() as f64;
    out.iter_mut().for_each(|v| *v /= n);
    out
}

/// Centroid of a member set over the normalized feature space.
pub fn centroid(members: &[usize], features: &FeatureDays) -> Result<Vec<f64>> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let rows: Vec<&[f64]> = members.iter().map(|&d| features.day(d)).collect();
    Ok(mean_rows(&rows))
}

/// Ward dissimilarity from sizes and centroids: 2|A||B|/(|A|+|B|) · ‖x̄_A − x̄_B‖².
pub fn ward_dissimilarity_parts(
    size_a: usize,
    size_b: usize,
    centroid_a: &[f64],
    centroid_b: &[f64],
) -> f64 {
    let sq: f64 = centroid_a
        .iter()
        .zip(centroid_b)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let (na, nb) = (size_a as f64, size_b as f64);
    2.0 * na * nb / (na + nb) * sq
}

/// Ward dissimilarity between two clusters.
pub fn ward_dissimilarity(a: &Cluster, b: &Cluster) -> f64 {
    ward_dissimilarity_parts(a.members.len(), b.members.len(), &a.centroid, &b.centroid)
}

/// Days to pin as extremes: the day containing the maximum raw net-load hour,
/// merged with any user-supplied days (deduplicated, in that order).
pub fn mark_extreme_days(features: &FeatureDays, user_days: &[usize]) -> Vec<usize> {
    let (day, _) = features.raw_net_load.argmax();
    let mut out = vec![day];
    for &d in user_days {
        if !out.contains(&d) {
            out.push(d);
        }
    }
    out
}

struct Engine {
    alive: BTreeMap<usize, Cluster>,
    dist: BTreeMap<(usize, usize), f64>,
    next_id: usize,
    merge_log: Vec<MergeRecord>,
}

impl Engine {
    fn new(clusters: Vec<Cluster>) -> Self {
        let mut alive = BTreeMap::new();
        for (i, c) in clusters.into_iter().enumerate() {
            alive.insert(i, c);
        }
        let next_id = alive.len();
        Engine {
            alive,
            dist: BTreeMap::new(),
            next_id,
            merge_log: Vec::new(),
        }
    }

    fn fill_all_distances(&mut self) {
        let ids: Vec<usize> = self.alive.keys().cloned().collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                self.compute_pair(a, b);
            }
        }
    }

    fn compute_pair(&mut self, a: usize, b: usize) {
        let d = ward_dissimilarity(&self.alive[&a], &self.alive[&b]);
        self.dist.insert((a.min(b), a.max(b)), d);
    }

    /// Pair with minimum D; ties resolved lexicographically on
    /// (smaller lowest-day, larger lowest-day).
    fn min_pair(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(f64, (usize, usize), (usize, usize))> = None;
        for (&(a, b), &d) in &self.dist {
            let (la, lb) = (self.alive[&a].lowest_day(), self.alive[&b].lowest_day());
            let key = (la.min(lb), la.max(lb));
            let better = match &best {
                None => true,
                Some((bd, bkey, _)) => d < *bd || (d == *bd && key < *bkey),
            };
            if better {
                best = Some((d, key, (a, b)));
            }
        }
        best.map(|(d, _, (a, b))| (a, b, d))
    }

    fn merge(&mut self, a: usize, b: usize, d: f64, features: &FeatureDays, tie: &mut PinPicker) {
        let ca = self.alive.remove(&a).expect("cluster a alive");
        let cb = self.alive.remove(&b).expect("cluster b alive");
        self.merge_log.push(MergeRecord {
            a: ca.lowest_day().min(cb.lowest_day()),
            b: ca.lowest_day().max(cb.lowest_day()),
            dissimilarity: d,
        });

        let mut members = ca.members.clone();
        members.extend_from_slice(&cb.members);
        members.sort_unstable();

        let pinned = match (ca.pinned_extreme, cb.pinned_extreme) {
            (None, None) => None,
            (Some(e), None) | (None, Some(e)) => Some(e),
            (Some(ea), Some(eb)) => Some(tie.pick(ea, eb)),
        };
        let centroid = match pinned {
            Some(day) => features.day(day).to_vec(),
            None => mean_rows(&members.iter().map(|&m| features.day(m)).collect::<Vec<_>>()),
        };

        let id = self.next_id;
        self.next_id += 1;
        self.alive.insert(
            id,
            Cluster {
                members,
                centroid,
                pinned_extreme: pinned,
            },
        );

        // drop distances touching the removed clusters, then link the new one
        self.dist
            .retain(|&(x, y), _| x != a && x != b && y != a && y != b);
        let others: Vec<usize> = self.alive.keys().cloned().filter(|&k| k != id).collect();
        for o in others {
            self.compute_pair(o, id);
        }
    }

    fn finish(self) -> Clustering {
        let mut clusters: Vec<Cluster> = self.alive.into_values().collect();
        clusters.sort_by_key(|c| c.lowest_day());
        Clustering {
            clusters,
            merge_log: self.merge_log,
        }
    }
}

struct PinPicker {
    rng: Option<ChaCha8Rng>,
}

impl PinPicker {
    fn new(tie: PinTie) -> Self {
        PinPicker {
            rng: match tie {
                PinTie::EarliestDay => None,
                PinTie::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
        }
    }

    fn pick(&mut self, a: usize, b: usize) -> usize {
        match self.rng.as_mut() {
            None => a.min(b),
            Some(rng) => {
                if rng.gen_bool(0.5) {
                    a
                } else {
                    b
                }
            }
        }
    }
}

fn singleton_clusters(features: &FeatureDays, extremes: &[usize]) -> Vec<Cluster> {
    (0..features.n_days())
        .map(|d| Cluster {
            members: vec![d],
            centroid: features.day(d).to_vec(),
            pinned_extreme: extremes.contains(&d).then_some(d),
        })
        .collect()
}

/// Agglomerate to `nrd` clusters, always merging the globally closest pair.
pub fn agglomerate(features: &FeatureDays, nrd: usize, extremes: &[usize]) -> Result<Clustering> {
    agglomerate_with(features, nrd, extremes, PinTie::EarliestDay)
}

/// [`agglomerate`] with an explicit rule for double-pin merges.
pub fn agglomerate_with(
    features: &FeatureDays,
    nrd: usize,
    extremes: &[usize],
    tie: PinTie,
) -> Result<Clustering> {
    let days = features.n_days();
    if nrd == 0 || nrd > days {
        return Err(Error::BadNrd { nrd, days });
    }
    for &e in extremes {
        if e >= days {
            return Err(Error::DimensionMismatch(format!(
                "extreme day {e} outside 0..{days}"
            )));
        }
    }
    let mut picker = PinPicker::new(tie);
    let mut engine = Engine::new(singleton_clusters(features, extremes));
    engine.fill_all_distances();
    while engine.alive.len() > nrd {
        let (a, b, d) = engine.min_pair().expect("at least one pair while above nrd");
        engine.merge(a, b, d, features, &mut picker);
    }
    Ok(engine.finish())
}

/// Chronological baseline: only adjacent clusters may merge, no pinning.
/// Every resulting cluster is a contiguous day range.
pub fn ctpc_agglomerate(features: &FeatureDays, nrd: usize) -> Result<Clustering> {
    let days = features.n_days();
    if nrd == 0 || nrd > days {
        return Err(Error::BadNrd { nrd, days });
    }
    // contiguous ranges as (start, members, centroid), kept in day order
    let mut clusters = singleton_clusters(features, &[]);
    let mut merge_log = Vec::new();
    while clusters.len() > nrd {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..clusters.len() - 1 {
            let d = ward_dissimilarity(&clusters[i], &clusters[i + 1]);
            let better = match best {
                None => true,
                Some((bd, _)) => d < bd,
            };
            if better {
                best = Some((d, i));
            }
        }
        let (d, i) = best.expect("at least two clusters");
        let right = clusters.remove(i + 1);
        let left = &mut clusters[i];
        merge_log.push(MergeRecord {
            a: left.lowest_day(),
            b: right.lowest_day(),
            dissimilarity: d,
        });
        left.members.extend(right.members);
        left.centroid = mean_rows(
            &left
                .members
                .iter()
                .map(|&m| features.day(m))
                .collect::<Vec<_>>(),
        );
    }
    Ok(Clustering {
        clusters,
        merge_log,
    })
}

/// One representative day: denormalized profiles plus clustering metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentativeDay {
    /// Load profile, per-unit of the year's peak load.
    pub lf: Vec<f64>,
    /// Wind capacity-factor profile in [0, 1].
    pub wf: Vec<f64>,
    /// Number of source days represented.
    pub weight: usize,
    pub extreme: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extreme_day: Option<usize>,
    /// Centroid in the normalized 72-feature space (used for day mapping).
    pub centroid: Vec<f64>,
}

/// Normalization context carried alongside the representative profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormRecords {
    pub feature_norms: Vec<crate::ingest::FeatureNorm>,
    pub peak_load_mw: f64,
}

/// The final weighted representative-day profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentativeDaySet {
    pub rds: Vec<RepresentativeDay>,
    pub norms: NormRecords,
}

impl RepresentativeDaySet {
    pub fn n_rds(&self) -> usize {
        self.rds.len()
    }

    /// Hours per day in the profiles (24 for the production pipeline).
    pub fn hours(&self) -> usize {
        self.rds.first().map(|r| r.lf.len()).unwrap_or(HOURS_PER_DAY)
    }

    pub fn total_weight(&self) -> usize {
        self.rds.iter().map(|r| r.weight).sum()
    }
}

/// Turn a final clustering into weighted, denormalized representative days.
pub fn extract_representatives(
    clustering: &Clustering,
    features: &FeatureDays,
) -> RepresentativeDaySet {
    let rds = clustering
        .clusters
        .iter()
        .map(|c| RepresentativeDay {
            lf: features.denormalize_load_pu(&c.centroid),
            wf: features.denormalize_wind(&c.centroid),
            weight: c.members.len(),
            extreme: c.pinned_extreme.is_some(),
            extreme_day: c.pinned_extreme,
            centroid: c.centroid.clone(),
        })
        .collect();
    RepresentativeDaySet {
        rds,
        norms: NormRecords {
            feature_norms: features.norms.clone(),
            peak_load_mw: features.peak_load_mw,
        },
    }
}

/// Recompute a cluster centroid from scratch, honoring the pin.
pub fn recomputed_centroid(c: &Cluster, features: &FeatureDays) -> Vec<f64> {
    match c.pinned_extreme {
        Some(day) => features.day(day).to_vec(),
        None => mean_rows(&c.members.iter().map(|&m| features.day(m)).collect::<Vec<_>>()),
    }
}
