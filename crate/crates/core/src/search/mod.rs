//! Isomorph-free exhaustive search for MIF(k), k in {2,3}, and brute-force
//! maxima of ISP point counts for tiny parameters.

mod isp;
mod mif;
mod space;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::bounds::{binomial_u64, search_point_bound};
use crate::canon::{canonicalize, CanonicalForm};
use crate::family::{Block, Family};
use crate::isp::{validate_isp, SetPairSystem};
use crate::mif::{is_mif, is_one_critical};
use crate::error::ensure_invariant;
use crate::{MifError, Result};

use space::SubsetSpace;

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "MIFLAB_BUDGET";

/// Parameters accepted by [`compute_n`] without `allow_any`.
pub const ISP_WHITELIST: [(usize, usize); 5] = [(2, 1), (3, 1), (2, 2), (1, 2), (1, 3)];

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Node cap; exceeding it yields `BudgetExceeded`.
    pub budget: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Log of finished subtrees. An existing log is resumed.
    pub checkpoint: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            workers: None,
            checkpoint: None,
        }
    }
}

impl SearchConfig {
    /// Default config with the budget taken from `MIFLAB_BUDGET` if set.
    pub fn from_env() -> Result<Self> {
        let mut c = SearchConfig::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            c.budget = v
                .trim()
                .parse()
                .map_err(|_| MifError::ParameterOutOfRange(format!("{BUDGET_ENV}={v:?} is not a node count")))?;
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MifClass {
    pub form: CanonicalForm,
    /// Colex-least member of the class on points `0..points`.
    pub representative: Family,
    pub points: usize,
    pub blocks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub k: usize,
    pub universe_bound: usize,
    /// Sorted by point count, then canonical form.
    pub canonical_mifs: Vec<MifClass>,
    pub max_points: usize,
    pub counts_by_point_count: BTreeMap<usize, usize>,
    pub nodes: u64,
}

/// All MIF(k) on at most `p_max` points, one per isomorphism class.
pub fn enumerate_mifs(k: usize, p_max: usize) -> Result<SearchResult> {
    enumerate_mifs_with(k, p_max, &SearchConfig::default())
}

pub fn enumerate_mifs_with(k: usize, p_max: usize, config: &SearchConfig) -> Result<SearchResult> {
    if !(2..=3).contains(&k) {
        return Err(MifError::UnsupportedK(k));
    }
    if p_max < 2 * k - 1 {
        return Err(MifError::ParameterOutOfRange(format!(
            "p_max={p_max} is below 2k-1={}",
            2 * k - 1
        )));
    }
    if p_max > 16 || binomial_u64(p_max as u64, k as u64) > 128 {
        return Err(MifError::UnsupportedParams(format!(
            "C({p_max},{k}) candidate blocks exceed the 128 the search handles"
        )));
    }
    let space = SubsetSpace::new(k, p_max);
    let raw = mif::search(&space, config)?;
    let mut classes = Vec::with_capacity(raw.mifs.len());
    for &m in &raw.mifs {
        let family = Family::from_blocks(space.to_point_lists(m).into_iter().map(Block::from_points));
        let points = family.num_points();
        ensure_invariant!(
            family.universe() == points,
            "colex-least MIF does not use a prefix of the points"
        );
        ensure_invariant!(is_mif(&family)?.is_mif(), "search emitted a non-MIF");
        ensure_invariant!(is_one_critical(&family), "search emitted a MIF that is not 1-critical");
        classes.push(MifClass {
            form: canonicalize(&family),
            blocks: family.len(),
            representative: family,
            points,
        });
    }
    classes.sort_by(|a, b| (a.points, &a.form).cmp(&(b.points, &b.form)));
    for w in classes.windows(2) {
        ensure_invariant!(w[0].form != w[1].form, "two emitted MIFs are isomorphic");
    }
    let mut counts = BTreeMap::new();
    for c in &classes {
        *counts.entry(c.points).or_insert(0) += 1;
    }
    Ok(SearchResult {
        k,
        universe_bound: p_max,
        max_points: classes.iter().map(|c| c.points).max().unwrap_or(0),
        canonical_mifs: classes,
        counts_by_point_count: counts,
        nodes: raw.nodes,
    })
}

/// The largest point count of a MIF(k), searching up to the proven bound.
pub fn max_mif_points(k: usize) -> Result<usize> {
    max_mif_points_with(k, &SearchConfig::default())
}

pub fn max_mif_points_with(k: usize, config: &SearchConfig) -> Result<usize> {
    let bound = search_point_bound(k)?;
    Ok(enumerate_mifs_with(k, bound, config)?.max_points)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IspSearchResult {
    pub k: usize,
    pub t: usize,
    /// Pair cap C(k+t,k).
    pub max_pairs: usize,
    pub max_points: usize,
    pub witness: SetPairSystem,
    pub nodes: u64,
}

/// The largest point count of an ISP(k,t), by exhaustive search.
pub fn compute_n(k: usize, t: usize) -> Result<usize> {
    Ok(search_isp(k, t, DEFAULT_BUDGET, false)?.max_points)
}

/// Exhaustive ISP(k,t) search. Parameters off [`ISP_WHITELIST`] need
/// `allow_any`; the budget still applies.
pub fn search_isp(k: usize, t: usize, budget: u64, allow_any: bool) -> Result<IspSearchResult> {
    if k == 0 || t == 0 {
        return Err(MifError::UnsupportedParams(format!("ISP({k},{t}) needs k, t >= 1")));
    }
    if !allow_any && !ISP_WHITELIST.contains(&(k, t)) {
        return Err(MifError::UnsupportedParams(format!(
            "ISP({k},{t}) is off the desk-scale whitelist"
        )));
    }
    let max_pairs = binomial_u64((k + t) as u64, k as u64) as usize;
    let out = isp::search(k, t, max_pairs, budget)?;
    let to_block = |m: u32| Block::from_points((0..32).filter(|x| m >> x & 1 == 1));
    let pairs = out.witness.iter().map(|&(a, b)| (to_block(a), to_block(b))).collect();
    let witness = SetPairSystem::new(pairs).with_params(k, t);
    let verdict = validate_isp(&witness);
    ensure_invariant!(verdict.valid, "ISP search witness fails validation");
    ensure_invariant!(
        witness.num_points() == out.max_points,
        "ISP search witness has {} points, expected {}",
        witness.num_points(),
        out.max_points
    );
    Ok(IspSearchResult {
        k,
        t,
        max_pairs,
        max_points: out.max_points,
        witness,
        nodes: out.nodes,
    })
}
