//! Maximal intersecting families: verification, 1-criticality, 2-/3-
//! chromatic classification, the point merge `F[β↦α]` and the collapse
//! chain that repeats it.

use std::fmt;

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::bounds::binomial;
use crate::error::{ensure_invariant, MifError, Result};
use crate::family::{Block, Family, PointId};
use crate::isp::{bollobas_sum, validate_isp, SetPairSystem};
use crate::transversal::{tau, transversal_family, Tau};

/// Above this many candidate k-subsets the brute-force characterization
/// cross-check in [`is_mif`] is skipped.
pub const CHARACTERIZATION_LIMIT: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MifCertificate {
    pub k: usize,
    pub tau: usize,
    pub transversal_match: bool,
    /// Whether the k-subset characterization was also checked.
    pub characterization_checked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotMifReason {
    NotUniform,
    TauMismatch { tau: Tau, k: usize },
    /// `tau = k` but the transversal family differs from the family.
    TransversalsDiffer { extra: usize, missing: usize },
}

impl fmt::Display for NotMifReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotMifReason::NotUniform => write!(f, "family is not uniform"),
            NotMifReason::TauMismatch { tau, k } => write!(f, "tau={tau} != k={k}"),
            NotMifReason::TransversalsDiffer { extra, missing } => write!(
                f,
                "{extra} transversals are not blocks and {missing} blocks are not transversals"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MifVerdict {
    Mif(MifCertificate),
    NotMif(NotMifReason),
}

impl MifVerdict {
    pub fn is_mif(&self) -> bool {
        matches!(self, MifVerdict::Mif(_))
    }

    pub fn certificate(&self) -> Option<&MifCertificate> {
        match self {
            MifVerdict::Mif(c) => Some(c),
            MifVerdict::NotMif(_) => None,
        }
    }
}

impl Serialize for MifVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            MifVerdict::Mif(c) => {
                m.serialize_entry("mif", &true)?;
                m.serialize_entry("certificate", c)?;
            }
            MifVerdict::NotMif(r) => {
                m.serialize_entry("mif", &false)?;
                m.serialize_entry("reason", &r.to_string())?;
                m.serialize_entry("detail", r)?;
            }
        }
        m.end()
    }
}

/// Brute-force check: intersecting, no (k-1)-subset of the point set
/// blocks, and every blocking k-subset of the point set is a block.
/// `None` when the subset count is over [`CHARACTERIZATION_LIMIT`].
fn characterization(family: &Family, k: usize) -> Option<bool> {
    let points = family.point_set().to_vec();
    let v = points.len();
    let work = binomial(v as i64, k as i64) + binomial(v as i64, k as i64 - 1);
    if work > CHARACTERIZATION_LIMIT.into() {
        return None;
    }
    if !family.is_intersecting() || v < k {
        return Some(false);
    }
    let small_blocker = points
        .iter()
        .copied()
        .combinations(k - 1)
        .any(|c| family.is_blocking_set(&Block::from_points(c)));
    if small_blocker {
        return Some(false);
    }
    Some(points.iter().copied().combinations(k).all(|c| {
        let set = Block::from_points(c);
        !family.is_blocking_set(&set) || family.contains(&set)
    }))
}

pub fn is_mif(family: &Family) -> Result<MifVerdict> {
    if family.is_empty() {
        return Err(MifError::EmptyFamily);
    }
    if family.has_empty_block() {
        return Err(MifError::EmptyBlock);
    }
    let Some(k) = family.uniform_block_size() else {
        return Ok(MifVerdict::NotMif(NotMifReason::NotUniform));
    };
    let verdict = match tau(family) {
        Tau::Finite(t) if t == k => {
            let report = transversal_family(family)?;
            if report.transversals.blocks() == family.blocks() {
                MifVerdict::Mif(MifCertificate {
                    k,
                    tau: t,
                    transversal_match: true,
                    characterization_checked: false,
                })
            } else {
                let extra = report
                    .transversals
                    .iter()
                    .filter(|b| !family.contains(b))
                    .count();
                let missing = family
                    .iter()
                    .filter(|b| !report.transversals.contains(b))
                    .count();
                MifVerdict::NotMif(NotMifReason::TransversalsDiffer { extra, missing })
            }
        }
        other => MifVerdict::NotMif(NotMifReason::TauMismatch { tau: other, k }),
    };
    match (characterization(family, k), verdict) {
        (None, v) => Ok(v),
        (Some(c), v) => {
            ensure_invariant!(
                c == v.is_mif(),
                "characterization says {c} but transversal check says {}",
                v.is_mif()
            );
            Ok(match v {
                MifVerdict::Mif(mut cert) => {
                    cert.characterization_checked = true;
                    MifVerdict::Mif(cert)
                }
                other => other,
            })
        }
    }
}

fn require_mif(family: &Family) -> Result<usize> {
    match is_mif(family)? {
        MifVerdict::Mif(c) => Ok(c.k),
        MifVerdict::NotMif(r) => Err(MifError::NotMif(r.to_string())),
    }
}

/// For every `x ∈ B ∈ F` some `B' ∈ F` has `B ∩ B' = {x}`.
pub fn is_one_critical(family: &Family) -> bool {
    family.iter().all(|b| {
        b.iter().all(|x| {
            let target = Block::singleton(x);
            family.iter().any(|c| b.intersection(c) == target)
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChromaticClass {
    Two,
    Three,
}

impl ChromaticClass {
    pub fn number(self) -> u8 {
        match self {
            ChromaticClass::Two => 2,
            ChromaticClass::Three => 3,
        }
    }
}

impl Serialize for ChromaticClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

/// 2 if the points admit a 2-coloring with no monochromatic block, else 3.
/// Uniform intersecting families always admit a 3-coloring.
pub fn chromatic_class(family: &Family) -> Result<ChromaticClass> {
    if family.uniform_block_size().is_none() {
        return Err(MifError::NotUniform);
    }
    if !family.is_intersecting() {
        return Err(MifError::NotIntersecting);
    }
    let points = family.point_set().to_vec();
    if points.is_empty() {
        return Ok(ChromaticClass::Three);
    }
    // Colour-0 set grows point by point; the first point is fixed to 0.
    fn extend(points: &[PointId], blocks: &[Block], idx: usize, red: Block, blue: Block) -> bool {
        // A block fully inside one colour class is monochromatic.
        if blocks.iter().any(|b| b.is_subset(&red) || b.is_subset(&blue)) {
            return false;
        }
        if idx == points.len() {
            return true;
        }
        let p = points[idx];
        extend(points, blocks, idx + 1, red.with(p), blue)
            || extend(points, blocks, idx + 1, red, blue.with(p))
    }
    let first = Block::singleton(points[0]);
    if extend(&points, family.blocks(), 1, first, Block::empty()) {
        Ok(ChromaticClass::Two)
    } else {
        Ok(ChromaticClass::Three)
    }
}

/// `F[β↦α]` with the pieces it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeParts {
    pub merged: Family,
    /// Blocks avoiding both `α` and `β`.
    pub avoiding: Family,
    pub avoiding_transversals: Family,
}

/// `F[β↦α] = G ∪ {T ∪ {α} : T ∈ G^⊤}` where `G` is the set of blocks
/// avoiding both points. Requires a MIF with `{α, β}` in no block; the
/// result is re-verified to be a MIF on `P_F ∖ {β}`.
pub fn merge(family: &Family, alpha: PointId, beta: PointId) -> Result<Family> {
    merge_parts(family, alpha, beta).map(|p| p.merged)
}

pub fn merge_parts(family: &Family, alpha: PointId, beta: PointId) -> Result<MergeParts> {
    if alpha == beta {
        return Err(MifError::SamePoint(alpha));
    }
    let points = family.point_set();
    for p in [alpha, beta] {
        if !points.contains(p) {
            return Err(MifError::NotAPoint(p));
        }
    }
    if family.iter().any(|b| b.contains(alpha) && b.contains(beta)) {
        return Err(MifError::CoveredPair { alpha, beta });
    }
    let k = require_mif(family)?;

    let pair = Block::from_points([alpha, beta]);
    let avoiding = family.avoiding(&pair);
    let report = transversal_family(&avoiding)?;
    ensure_invariant!(
        report.tau + 1 == k,
        "blocks avoiding {alpha},{beta} have tau {} instead of {}",
        report.tau,
        k - 1
    );
    let gt = report.transversals;
    for t in gt.iter() {
        ensure_invariant!(
            gt.iter().any(|u| u.is_disjoint(t)),
            "transversal {t} of the avoiding blocks meets every other transversal"
        );
    }
    let merged = Family::new(
        family.universe(),
        avoiding.iter().copied().chain(gt.iter().map(|t| t.with(alpha))),
    )?;

    ensure_invariant!(
        require_mif(&merged).ok() == Some(k),
        "merge of {beta} into {alpha} is not a MIF({k})"
    );
    ensure_invariant!(
        merged.point_set() == points.without(beta),
        "merge of {beta} into {alpha} has point set {} instead of P_F minus {beta}",
        merged.point_set()
    );
    for b in family.iter() {
        let image = if b.contains(beta) { b.without(beta).with(alpha) } else { *b };
        ensure_invariant!(merged.contains(&image), "block image {image} missing after merge");
    }
    Ok(MergeParts {
        merged,
        avoiding,
        avoiding_transversals: gt,
    })
}

/// Record of a collapse chain `F_1 = F, F_{n+1} = F_n[β_n↦α]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapseTrace {
    pub alpha: PointId,
    /// `β_0 = α, β_1, …, β_{N-1}`.
    pub betas: Vec<PointId>,
    /// `F_1, …, F_N`.
    pub chain: Vec<Family>,
    /// `(B_n, B'_n)` with `B_n ∩ B'_n = {β_n}`.
    pub witness_pairs: Vec<(Block, Block)>,
    /// `(T_n, T'_n)` for all n, then `(T'_n, T_n)`; an ISP(k-1,k-1).
    pub isp: SetPairSystem,
    /// Points of the transversal family of the blocks of `F_N` avoiding `α`.
    pub g_top_points: usize,
}

impl CollapseTrace {
    /// Chain length `N`.
    pub fn steps(&self) -> usize {
        self.chain.len()
    }
}

fn witness_pair(family: &Family, x: PointId) -> Option<(Block, Block)> {
    let target = Block::singleton(x);
    let blocks = family.blocks();
    blocks.iter().enumerate().find_map(|(i, b)| {
        blocks[i + 1..]
            .iter()
            .find(|c| b.intersection(c) == target)
            .map(|c| (*b, *c))
    })
}

fn first_unpaired(family: &Family, alpha: PointId) -> Option<PointId> {
    family.point_set().iter().find(|&p| {
        p != alpha && !family.iter().any(|b| b.contains(alpha) && b.contains(p))
    })
}

/// Merges points into `alpha` (smallest eligible point first) until every
/// remaining point shares a block with it, and extracts the ISP(k-1,k-1)
/// of `2N` pairs from the witness blocks.
pub fn collapse(family: &Family, alpha: PointId) -> Result<CollapseTrace> {
    let k = require_mif(family)?;
    if k < 2 {
        return Err(MifError::ParameterOutOfRange(format!("collapse needs k >= 2, got {k}")));
    }
    if !family.point_set().contains(alpha) {
        return Err(MifError::NotAPoint(alpha));
    }
    let mut betas = vec![alpha];
    let mut chain = vec![family.clone()];
    while let Some(beta) = first_unpaired(chain.last().expect("nonempty chain"), alpha) {
        let next = merge(chain.last().expect("nonempty chain"), alpha, beta)?;
        betas.push(beta);
        chain.push(next);
    }
    let n = chain.len();

    let mut witness_pairs = Vec::with_capacity(n);
    for (i, &beta) in betas.iter().enumerate() {
        let source = &chain[i.saturating_sub(1)];
        let pair = witness_pair(source, beta).ok_or_else(|| {
            MifError::InvariantViolation(format!("no witness blocks meeting exactly in {beta}"))
        })?;
        witness_pairs.push(pair);
    }
    let halves: Vec<(Block, Block)> = witness_pairs
        .iter()
        .zip(&betas)
        .map(|((b, c), &beta)| (b.without(beta), c.without(beta)))
        .collect();

    // T_m ∪ {α} and T'_m ∪ {α} stay blocks in every later family.
    for (m, (t, u)) in halves.iter().enumerate() {
        for later in chain.iter().skip(m + 1) {
            ensure_invariant!(
                later.contains(&t.with(alpha)) && later.contains(&u.with(alpha)),
                "witness halves of step {m} are not blocks with alpha in a later family"
            );
        }
    }

    let pairs = halves
        .iter()
        .copied()
        .chain(halves.iter().map(|&(t, u)| (u, t)))
        .collect();
    let isp = SetPairSystem::new(pairs).with_params(k - 1, k - 1);
    let verdict = validate_isp(&isp);
    if let Some(v) = verdict.violation {
        return Err(MifError::InvariantViolation(format!(
            "collapse system is not an ISP({},{}): {v}",
            k - 1,
            k - 1
        )));
    }
    bollobas_sum(&isp)?;
    let cap = binomial(2 * k as i64 - 2, k as i64 - 1);
    ensure_invariant!(
        cap >= (2 * n).into(),
        "2N = {} exceeds C(2k-2,k-1) = {cap}",
        2 * n
    );

    let last = chain.last().expect("nonempty chain");
    let g = last.avoiding(&Block::singleton(alpha));
    let gt = transversal_family(&g)?;
    ensure_invariant!(gt.tau + 1 == k, "tau of blocks avoiding alpha is {}", gt.tau);
    let through_alpha = Family::new(
        last.universe(),
        last.iter().filter(|b| b.contains(alpha)).map(|b| b.without(alpha)),
    )?;
    ensure_invariant!(
        gt.transversals.blocks() == through_alpha.blocks(),
        "transversals of blocks avoiding alpha differ from the alpha-blocks minus alpha"
    );
    let g_top_points = gt.transversals.num_points();
    ensure_invariant!(
        family.num_points() == n + g_top_points,
        "vs(F) = {} but N + vs(G^T) = {} + {}",
        family.num_points(),
        n,
        g_top_points
    );

    Ok(CollapseTrace {
        alpha,
        betas,
        chain,
        witness_pairs,
        isp,
        g_top_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bg_family, complete_family, projective_plane};

    fn triangle() -> Family {
        Family::from_sets(&[[0, 1], [1, 2], [0, 2]])
    }

    #[test]
    fn labels_do_not_affect_verdicts() {
        let names = |n: usize| (0..n).map(|i| format!("p{i}")).collect::<Vec<_>>();
        let tri = triangle().with_labels(names(3)).unwrap();
        assert!(is_mif(&tri).unwrap().is_mif());
        let fano = projective_plane(2).unwrap().with_labels(names(7)).unwrap();
        assert!(is_mif(&fano).unwrap().is_mif());
        assert_eq!(collapse(&fano, 0).unwrap().g_top_points, 6);
        let k5 = complete_family(3).unwrap().with_labels(names(5)).unwrap();
        assert_eq!(collapse(&k5, 0).unwrap().g_top_points, 4);
    }

    #[test]
    fn triangle_and_fano_are_mifs() {
        let cert = is_mif(&triangle()).unwrap();
        assert_eq!(cert.certificate().unwrap().k, 2);
        assert!(cert.certificate().unwrap().characterization_checked);
        let fano = is_mif(&projective_plane(2).unwrap()).unwrap();
        assert_eq!(fano.certificate().unwrap().k, 3);
    }

    #[test]
    fn bg32_is_not_a_mif() {
        let v = is_mif(&bg_family(3, 2).unwrap().family).unwrap();
        match v {
            MifVerdict::NotMif(r) => assert_eq!(r.to_string(), "tau=2 != k=3"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_maximal_intersecting_family() {
        // Fano minus a line: tau stays 3 but new transversals appear.
        let fano = projective_plane(2).unwrap();
        let holed = fano.without_block(0);
        assert!(matches!(
            is_mif(&holed).unwrap(),
            MifVerdict::NotMif(NotMifReason::TransversalsDiffer { .. }) |
            MifVerdict::NotMif(NotMifReason::TauMismatch { .. })
        ));
    }

    #[test]
    fn is_mif_errors() {
        assert_eq!(is_mif(&Family::new(1, []).unwrap()).unwrap_err(), MifError::EmptyFamily);
        let f = Family::new(2, [Block::empty(), Block::singleton(0)]).unwrap();
        assert_eq!(is_mif(&f).unwrap_err(), MifError::EmptyBlock);
    }

    #[test]
    fn one_criticality() {
        assert!(is_one_critical(&triangle()));
        assert!(!is_one_critical(&Family::from_sets(&[[0, 1], [0, 2]])));
        assert!(is_one_critical(&projective_plane(3).unwrap()));
    }

    #[test]
    fn chromatic_classes() {
        assert_eq!(chromatic_class(&projective_plane(2).unwrap()).unwrap(), ChromaticClass::Three);
        assert_eq!(chromatic_class(&projective_plane(3).unwrap()).unwrap(), ChromaticClass::Two);
        assert_eq!(chromatic_class(&Family::from_sets(&[[0, 1, 2]])).unwrap(), ChromaticClass::Two);
        assert_eq!(chromatic_class(&triangle()).unwrap(), ChromaticClass::Three);
        assert_eq!(
            chromatic_class(&Family::from_sets(&[[0, 1], [2, 3]])).unwrap_err(),
            MifError::NotIntersecting
        );
        let mixed = Family::from_blocks([Block::from_points([0]), Block::from_points([0, 1])]);
        assert_eq!(chromatic_class(&mixed).unwrap_err(), MifError::NotUniform);
    }

    #[test]
    fn fano_chromatic_matches_exhaustive_scan() {
        let fano = projective_plane(2).unwrap();
        let two_colorable = (0u32..1 << 7).any(|mask| {
            let red = Block::from_points((0..7).filter(|i| mask >> i & 1 == 1));
            fano.iter().all(|b| !b.is_subset(&red) && b.intersects(&red))
        });
        assert!(!two_colorable);
    }

    #[test]
    fn merge_rejects_covered_pairs() {
        let fano = projective_plane(2).unwrap();
        for (a, b) in (0..7).tuple_combinations() {
            assert_eq!(
                merge(&fano, a, b).unwrap_err(),
                MifError::CoveredPair { alpha: a, beta: b }
            );
        }
        assert!(matches!(merge(&triangle(), 0, 1), Err(MifError::CoveredPair { .. })));
        assert_eq!(merge(&triangle(), 1, 1).unwrap_err(), MifError::SamePoint(1));
        assert_eq!(merge(&triangle(), 1, 5).unwrap_err(), MifError::NotAPoint(5));
    }

    #[test]
    fn merge_rejects_non_mif() {
        let f = Family::from_sets(&[[0, 1], [0, 2]]);
        assert!(matches!(merge(&f, 1, 2), Err(MifError::NotMif(_))));
    }

    #[test]
    fn complete_family_collapses_in_one_step() {
        let k5 = complete_family(3).unwrap();
        let trace = collapse(&k5, 0).unwrap();
        assert_eq!(trace.steps(), 1);
        assert_eq!(trace.g_top_points, 4);
    }

    #[test]
    fn collapse_triangle() {
        let trace = collapse(&triangle(), 0).unwrap();
        assert_eq!(trace.steps(), 1);
        assert_eq!(trace.betas, vec![0]);
        assert_eq!(trace.g_top_points, 2);
        assert_eq!(trace.isp.len(), 2);
        assert_eq!(
            trace.witness_pairs,
            vec![(Block::from_points([0, 1]), Block::from_points([0, 2]))]
        );
    }

    #[test]
    fn collapse_fano() {
        let fano = projective_plane(2).unwrap();
        for alpha in 0..7 {
            let trace = collapse(&fano, alpha).unwrap();
            assert_eq!(trace.steps(), 1);
            assert_eq!(trace.g_top_points, 6);
            assert_eq!(trace.isp.len(), 2);
            let cert = bollobas_sum(&trace.isp).unwrap();
            assert_eq!(cert.sum.to_string(), "1/3");
        }
        assert_eq!(collapse(&fano, 9).unwrap_err(), MifError::NotAPoint(9));
    }
}
