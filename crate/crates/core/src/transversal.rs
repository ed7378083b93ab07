//! Minimum blocking sets: the transversal number and the family of all
//! transversals.
//!
//! The solver branches on a block that the partial set misses, taking its
//! points one at a time and excluding the earlier ones in later branches, so
//! each blocking set is reached at most once. A packing of pairwise disjoint
//! unhit blocks gives the lower bound used for pruning.

use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::error::{ensure_invariant, MifError, Result};
use crate::family::{Block, Family};

/// Largest point set accepted by [`brute_force_transversals`].
pub const ORACLE_POINT_LIMIT: usize = 20;

/// Transversal number; infinite exactly when some block is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tau {
    Finite(usize),
    Infinite,
}

impl Tau {
    pub fn finite(self) -> Option<usize> {
        match self {
            Tau::Finite(t) => Some(t),
            Tau::Infinite => None,
        }
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{t}"),
            Tau::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Tau {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tau::Finite(t) => s.serialize_u64(*t as u64),
            Tau::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalReport {
    pub tau: usize,
    /// Every minimum blocking set, sorted.
    pub transversals: Family,
    pub nodes_explored: u64,
}

impl TransversalReport {
    /// Equality of the mathematical content, ignoring node counts.
    pub fn same_result(&self, other: &TransversalReport) -> bool {
        self.tau == other.tau && self.transversals.blocks() == other.transversals.blocks()
    }
}

impl Serialize for TransversalReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TransversalReport", 3)?;
        st.serialize_field("tau", &self.tau)?;
        st.serialize_field("transversals", self.transversals.blocks())?;
        st.serialize_field("nodes", &self.nodes_explored)?;
        st.end()
    }
}

struct Solver<'a> {
    blocks: &'a [Block],
    nodes: u64,
}

impl<'a> Solver<'a> {
    fn new(blocks: &'a [Block]) -> Self {
        Solver { blocks, nodes: 0 }
    }

    /// Picks the unhit block with the fewest non-excluded points (lowest
    /// index on ties) and a disjoint-packing lower bound, in one pass.
    /// Returns `None` when `chosen` already blocks everything.
    fn inspect(&self, chosen: &Block, excluded: &Block) -> Option<(Block, usize)> {
        let mut branch: Option<Block> = None;
        let mut packed = Block::empty();
        let mut bound = 0;
        for b in self.blocks {
            if b.intersects(chosen) {
                continue;
            }
            let open = b.difference(excluded);
            if branch.is_none_or(|cur| open.len() < cur.len()) {
                branch = Some(open);
            }
            if open.is_disjoint(&packed) {
                packed = packed.union(&open);
                bound += 1;
            }
        }
        branch.map(|b| (b, bound))
    }

    fn minimize(&mut self, chosen: Block, excluded: Block, depth: usize, best: &mut usize) {
        self.nodes += 1;
        let Some((branch, bound)) = self.inspect(&chosen, &excluded) else {
            *best = (*best).min(depth);
            return;
        };
        if depth + bound >= *best || branch.is_empty() {
            return;
        }
        let mut excluded = excluded;
        for x in branch.iter() {
            self.minimize(chosen.with(x), excluded, depth + 1, best);
            excluded.insert(x);
        }
    }

    fn enumerate(
        &mut self,
        chosen: Block,
        excluded: Block,
        depth: usize,
        target: usize,
        out: &mut HashSet<Block>,
    ) {
        self.nodes += 1;
        let Some((branch, bound)) = self.inspect(&chosen, &excluded) else {
            if depth == target {
                out.insert(chosen);
            }
            return;
        };
        if depth + bound > target || branch.is_empty() {
            return;
        }
        let mut excluded = excluded;
        for x in branch.iter() {
            self.enumerate(chosen.with(x), excluded, depth + 1, target, out);
            excluded.insert(x);
        }
    }
}

/// Minimum size of a blocking set; 0 for the empty family.
pub fn tau(family: &Family) -> Tau {
    if family.has_empty_block() {
        return Tau::Infinite;
    }
    let mut solver = Solver::new(family.blocks());
    let mut best = usize::MAX;
    solver.minimize(Block::empty(), Block::empty(), 0, &mut best);
    Tau::Finite(best)
}

/// Like [`tau`] but an empty block is an error.
pub fn finite_tau(family: &Family) -> Result<usize> {
    tau(family).finite().ok_or(MifError::EmptyBlock)
}

fn check_power_bound(family: &Family, tau: usize, count: usize) -> Result<()> {
    if let Some(k) = family.uniform_block_size() {
        let cap = (k as u128).checked_pow(tau as u32).unwrap_or(u128::MAX);
        ensure_invariant!(
            (count as u128) <= cap,
            "{count} transversals exceed k^tau = {k}^{tau}"
        );
    }
    Ok(())
}

/// All minimum blocking sets of `family`.
pub fn transversal_family(family: &Family) -> Result<TransversalReport> {
    if family.has_empty_block() {
        return Err(MifError::EmptyBlock);
    }
    let mut solver = Solver::new(family.blocks());
    let mut best = usize::MAX;
    solver.minimize(Block::empty(), Block::empty(), 0, &mut best);
    let tau = best;
    let mut found = HashSet::new();
    solver.enumerate(Block::empty(), Block::empty(), 0, tau, &mut found);
    let transversals = Family::new(family.universe(), found)?;
    check_power_bound(family, tau, transversals.len())?;
    Ok(TransversalReport {
        tau,
        transversals,
        nodes_explored: solver.nodes,
    })
}

/// Testing oracle: scans all subsets of the point set in order of size.
pub fn brute_force_transversals(family: &Family) -> Result<TransversalReport> {
    if family.has_empty_block() {
        return Err(MifError::EmptyBlock);
    }
    let points = family.point_set().to_vec();
    if points.len() > ORACLE_POINT_LIMIT {
        return Err(MifError::OracleTooLarge {
            points: points.len(),
            limit: ORACLE_POINT_LIMIT,
        });
    }
    let mut scanned = 0u64;
    for size in 0..=points.len() {
        let mut found = Vec::new();
        for combo in points.iter().copied().combinations(size) {
            scanned += 1;
            let set = Block::from_points(combo);
            if family.is_blocking_set(&set) {
                found.push(set);
            }
        }
        if !found.is_empty() {
            let transversals = Family::new(family.universe(), found)?;
            check_power_bound(family, size, transversals.len())?;
            return Ok(TransversalReport {
                tau: size,
                transversals,
                nodes_explored: scanned,
            });
        }
    }
    unreachable!("the full point set blocks a family without empty blocks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bg_family, projective_plane};

    #[test]
    fn single_block_has_tau_one() {
        for k in 1..6 {
            let f = Family::from_blocks([Block::from_points(0..k)]);
            assert_eq!(tau(&f), Tau::Finite(1));
        }
    }

    #[test]
    fn degenerate_families() {
        let empty = Family::new(3, []).unwrap();
        assert_eq!(tau(&empty), Tau::Finite(0));
        let report = transversal_family(&empty).unwrap();
        assert_eq!(report.transversals.blocks(), &[Block::empty()]);
        let with_empty = Family::new(3, [Block::empty(), Block::singleton(1)]).unwrap();
        assert_eq!(tau(&with_empty), Tau::Infinite);
        assert_eq!(transversal_family(&with_empty).unwrap_err(), MifError::EmptyBlock);
        assert_eq!(brute_force_transversals(&with_empty).unwrap_err(), MifError::EmptyBlock);
    }

    #[test]
    fn edge_has_two_transversals() {
        let r = transversal_family(&Family::from_sets(&[[0, 1]])).unwrap();
        assert_eq!(r.tau, 1);
        assert_eq!(r.transversals, Family::from_sets(&[[0], [1]]).with_universe(2).unwrap());
    }

    #[test]
    fn triangle_oracle() {
        let tri = Family::from_sets(&[[0, 1], [1, 2], [0, 2]]);
        let r = brute_force_transversals(&tri).unwrap();
        assert_eq!(r.tau, 2);
        assert_eq!(r.transversals, tri);
        assert!(transversal_family(&tri).unwrap().same_result(&r));
        let single = Family::from_sets(&[[0]]);
        let r = brute_force_transversals(&single).unwrap();
        assert_eq!((r.tau, r.transversals.len()), (1, 1));
    }

    #[test]
    fn bg32_tau_is_two() {
        let bg = bg_family(3, 2).unwrap();
        assert_eq!(tau(&bg.family), Tau::Finite(2));
    }

    #[test]
    fn fano_transversals_are_its_lines() {
        let fano = projective_plane(2).unwrap();
        let oracle = brute_force_transversals(&fano).unwrap();
        assert_eq!(oracle.tau, 3);
        assert_eq!(oracle.transversals, fano);
        let fast = transversal_family(&fano).unwrap();
        assert!(fast.same_result(&oracle));
    }

    #[test]
    fn oracle_refuses_large_point_sets() {
        let f = Family::from_blocks([Block::from_points(0..21)]);
        assert_eq!(
            brute_force_transversals(&f).unwrap_err(),
            MifError::OracleTooLarge { points: 21, limit: 20 }
        );
    }

    #[test]
    fn report_json_shape() {
        let r = transversal_family(&Family::from_sets(&[[0, 1]])).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["tau"], 1);
        assert_eq!(v["transversals"], serde_json::json!([[0], [1]]));
        assert!(v["nodes"].as_u64().unwrap() > 0);
    }
}
