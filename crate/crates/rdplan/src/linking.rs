//! Sequentially linked day blocks: map every calendar day to its closest
//! representative day, then run-length encode the assignment into contiguous
//! blocks. The blocks carry the inter-day ordering that lets long-duration
//! storage chain energy across the year.

use crate::aggregate::RepresentativeDaySet;
use crate::error::{Error, Result};
use crate::ingest::FeatureDays;
use serde::{Deserialize, Serialize};

/// One contiguous run of days all mapped to the same representative day.
/// Serialized as `[start, end, rd]` with an inclusive end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, usize)", into = "(usize, usize, usize)")]
pub struct SldBlock {
    pub start: usize,
    pub end: usize,
    pub rd: usize,
}

impl From<(usize, usize, usize)> for SldBlock {
    fn from((start, end, rd): (usize, usize, usize)) -> Self {
        SldBlock { start, end, rd }
    }
}

impl From<SldBlock> for (usize, usize, usize) {
    fn from(b: SldBlock) -> Self {
        (b.start, b.end, b.rd)
    }
}

impl SldBlock {
    /// Number of calendar days in the block.
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false // a block always spans at least one day
    }
}

/// The ordered block structure over the planning year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SldPlan {
    pub blocks: Vec<SldBlock>,
    /// One-hot block-to-representative-day incidence, `mp[sld][rd]`.
    pub mp: Vec<Vec<u8>>,
    /// Days per block (the chaining weight of each block).
    pub weights: Vec<f64>,
}

impl SldPlan {
    pub fn n_slds(&self) -> usize {
        self.blocks.len()
    }

    /// Total days covered by the plan.
    pub fn n_days(&self) -> usize {
        self.weights.iter().sum::<f64>() as usize
    }

    /// Representative days that no block maps to (worth a warning upstream:
    /// their operating cost still counts, but they never anchor storage).
    pub fn unmapped_rds(&self, n_rds: usize) -> Vec<usize> {
        (0..n_rds)
            .filter(|&r| !self.blocks.iter().any(|b| b.rd == r))
            .collect()
    }
}

/// Squared Euclidean distance between two equal-length vectors.
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Assign each day to the closest representative-day centroid in the
/// normalized feature space; ties go to the lowest representative index.
pub fn map_days(features: &FeatureDays, rds: &RepresentativeDaySet) -> Result<Vec<usize>> {
    if rds.rds.is_empty() {
        return Err(Error::DimensionMismatch(
            "cannot map days onto an empty representative set".into(),
        ));
    }
    for (i, rd) in rds.rds.iter().enumerate() {
        if rd.centroid.len() != features.day(0).len() {
            return Err(Error::DimensionMismatch(format!(
                "representative {i} centroid has {} features, days have {}",
                rd.centroid.len(),
                features.day(0).len()
            )));
        }
    }
    Ok((0..features.n_days())
        .map(|d| {
            let row = features.day(d);
            let mut best = (f64::INFINITY, 0usize);
            for (r, rd) in rds.rds.iter().enumerate() {
                let dist = sq_dist(row, &rd.centroid);
                if dist < best.0 {
                    best = (dist, r);
                }
            }
            best.1
        })
        .collect())
}

/// Run-length encode a day-to-representative assignment into ordered blocks.
pub fn build_slds(assignment: &[usize], n_rds: usize) -> Result<SldPlan> {
    if assignment.is_empty() {
        return Err(Error::DimensionMismatch("empty day assignment".into()));
    }
    if let Some(&bad) = assignment.iter().find(|&&r| r >= n_rds) {
        return Err(Error::DimensionMismatch(format!(
            "assignment references representative {bad}, only {n_rds} exist"
        )));
    }
    let mut blocks = Vec::new();
    let mut start = 0usize;
    for d in 1..=assignment.len() {
        if d == assignment.len() || assignment[d] != assignment[start] {
            blocks.push(SldBlock {
                start,
                end: d - 1,
                rd: assignment[start],
            });
            start = d;
        }
    }
    let mp = blocks
        .iter()
        .map(|b| {
            let mut row = vec![0u8; n_rds];
            row[b.rd] = 1;
            row
        })
        .collect();
    let weights = blocks.iter().map(|b| b.len() as f64).collect();
    Ok(SldPlan {
        blocks,
        mp,
        weights,
    })
}

/// Map days and encode blocks in one step.
pub fn link_days(features: &FeatureDays, rds: &RepresentativeDaySet) -> Result<SldPlan> {
    let assignment = map_days(features, rds)?;
    build_slds(&assignment, rds.n_rds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{agglomerate, extract_representatives, mark_extreme_days};
    use crate::ingest::{DayMatrix, HOURS_PER_DAY};
    use proptest::prelude::*;

    fn level_features(levels: &[f64]) -> FeatureDays {
        let n = levels.len();
        let mut load = Vec::with_capacity(n * HOURS_PER_DAY);
        let mut wind = Vec::with_capacity(n * HOURS_PER_DAY);
        for &lv in levels {
            for _ in 0..HOURS_PER_DAY {
                load.push(100.0 + lv);
                wind.push(0.5);
            }
        }
        FeatureDays::from_day_profiles(
            &DayMatrix::from_flat(&load).unwrap(),
            &DayMatrix::from_flat(&wind).unwrap(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn rle_spec_case() {
        let plan = build_slds(&[0, 0, 1, 1, 1, 0], 2).unwrap();
        assert_eq!(
            plan.blocks,
            vec![
                SldBlock { start: 0, end: 1, rd: 0 },
                SldBlock { start: 2, end: 4, rd: 1 },
                SldBlock { start: 5, end: 5, rd: 0 },
            ]
        );
        assert_eq!(plan.weights, vec![2.0, 3.0, 1.0]);
        assert_eq!(plan.mp, vec![vec![1, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn single_rd_single_block() {
        let plan = build_slds(&[0; 10], 1).unwrap();
        assert_eq!(plan.n_slds(), 1);
        assert_eq!(plan.blocks[0], SldBlock { start: 0, end: 9, rd: 0 });
        assert_eq!(plan.weights, vec![10.0]);
    }

    #[test]
    fn alternating_assignment_gives_day_blocks() {
        let plan = build_slds(&[0, 1, 0, 1], 2).unwrap();
        assert_eq!(plan.n_slds(), 4);
        assert!(plan.blocks.iter().all(|b| b.len() == 1));
    }

    #[test]
    fn out_of_range_assignment_rejected() {
        assert!(build_slds(&[0, 2], 2).is_err());
    }

    #[test]
    fn unmapped_rds_reported() {
        let plan = build_slds(&[0, 0, 2], 4).unwrap();
        assert_eq!(plan.unmapped_rds(4), vec![1, 3]);
    }

    #[test]
    fn days_map_to_nearest_centroid() {
        let f = level_features(&[0.0, 2.0, 50.0, 52.0, 1.0]);
        let clustering = agglomerate(&f, 2, &[]).unwrap();
        let reps = extract_representatives(&clustering, &f);
        let assign = map_days(&f, &reps).unwrap();
        // days 0,1,4 share one representative, days 2,3 the other
        assert_eq!(assign[0], assign[1]);
        assert_eq!(assign[0], assign[4]);
        assert_eq!(assign[2], assign[3]);
        assert_ne!(assign[0], assign[2]);
    }

    #[test]
    fn extreme_day_maps_to_its_pinned_rd() {
        let mut levels = vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0];
        levels[4] = 400.0;
        let f = level_features(&levels);
        let extremes = mark_extreme_days(&f, &[]);
        let clustering = agglomerate(&f, 3, &extremes).unwrap();
        let reps = extract_representatives(&clustering, &f);
        let assign = map_days(&f, &reps).unwrap();
        let pinned_rd = reps.rds.iter().position(|r| r.extreme).unwrap();
        assert_eq!(assign[4], pinned_rd);
    }

    #[test]
    fn tie_goes_to_lowest_rd() {
        // two identical representatives: every day must map to index 0
        let f = level_features(&[0.0, 1.0]);
        let clustering = agglomerate(&f, 2, &[]).unwrap();
        let mut reps = extract_representatives(&clustering, &f);
        let c0 = reps.rds[0].centroid.clone();
        reps.rds[1].centroid = c0;
        let assign = map_days(&f, &reps).unwrap();
        assert_eq!(assign, vec![0, 0]);
    }

    #[test]
    fn json_round_trip() {
        let plan = build_slds(&[0, 0, 1, 1, 1, 0], 2).unwrap();
        let text = serde_json::to_string(&plan).unwrap();
        assert!(text.contains("[0,1,0]"), "blocks serialize as triples: {text}");
        let back: SldPlan = serde_json::from_str(&text).unwrap();
        assert_eq!(back, plan);
    }

    proptest! {
        #[test]
        fn blocks_partition_the_year(assignment in proptest::collection::vec(0usize..5, 1..200)) {
            let plan = build_slds(&assignment, 5).unwrap();
            // contiguous cover from day 0 to the last day
            prop_assert_eq!(plan.blocks[0].start, 0);
            prop_assert_eq!(plan.blocks.last().unwrap().end, assignment.len() - 1);
            for w in plan.blocks.windows(2) {
                prop_assert_eq!(w[1].start, w[0].end + 1);
                prop_assert_ne!(w[0].rd, w[1].rd);
            }
            // weights sum to the day count
            prop_assert_eq!(plan.n_days(), assignment.len());
            // every day's block agrees with its assignment, rows are one-hot
            for (sld, b) in plan.blocks.iter().enumerate() {
                for d in b.start..=b.end {
                    prop_assert_eq!(assignment[d], b.rd);
                }
                prop_assert_eq!(plan.mp[sld].iter().map(|&x| x as usize).sum::<usize>(), 1);
                prop_assert_eq!(plan.mp[sld][b.rd], 1);
            }
        }
    }
}
