//! Intersecting set-pair systems: pairs `(A_i, B_i)` with `A_i ∩ B_j`
//! empty exactly when `i = j`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::bounds::{binomial, bollobas_pair_bound};
use crate::error::{ensure_invariant, MifError, Result};
use crate::family::{Block, Family};
use crate::transversal::{finite_tau, transversal_family};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetPair {
    #[serde(rename = "A")]
    pub a: Block,
    #[serde(rename = "B")]
    pub b: Block,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetPairSystem {
    pub pairs: Vec<SetPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
}

impl SetPairSystem {
    pub fn new(pairs: Vec<(Block, Block)>) -> Self {
        SetPairSystem {
            pairs: pairs.into_iter().map(|(a, b)| SetPair { a, b }).collect(),
            k: None,
            t: None,
        }
    }

    pub fn with_params(mut self, k: usize, t: usize) -> Self {
        self.k = Some(k);
        self.t = Some(t);
        self
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Union of all `A_i` and `B_i`.
    pub fn point_set(&self) -> Block {
        self.pairs
            .iter()
            .fold(Block::empty(), |acc, p| acc.union(&p.a).union(&p.b))
    }

    pub fn num_points(&self) -> usize {
        self.point_set().len()
    }

    /// `(#A, #B)` if all pairs share the same sizes.
    pub fn uniform_sizes(&self) -> Option<(usize, usize)> {
        let first = self.pairs.first()?;
        let sizes = (first.a.len(), first.b.len());
        self.pairs
            .iter()
            .all(|p| (p.a.len(), p.b.len()) == sizes)
            .then_some(sizes)
    }

    pub fn parse_json(input: &str) -> Result<Self> {
        serde_json::from_str(input).map_err(|e| MifError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("set-pair system serializes")
    }
}

/// First defect found while validating; indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IspViolation {
    /// `A_i ∩ B_i` is nonempty.
    OwnPairMeets { i: usize },
    /// `A_i ∩ B_j` is empty with `i != j`.
    CrossPairDisjoint { i: usize, j: usize },
    /// Pair sizes differ from the declared parameters.
    SizeMismatch { i: usize, a: usize, b: usize },
}

impl fmt::Display for IspViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IspViolation::OwnPairMeets { i } => write!(f, "A_{i} meets B_{i}"),
            IspViolation::CrossPairDisjoint { i, j } => {
                write!(f, "A_{i} and B_{j} are disjoint with {i} != {j}")
            }
            IspViolation::SizeMismatch { i, a, b } => {
                write!(f, "pair {i} has sizes ({a},{b}), not the declared parameters")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IspVerdict {
    pub valid: bool,
    pub violation: Option<IspViolation>,
    pub pairs: usize,
    pub points: usize,
    /// Sizes `(k, t)` shared by all pairs, if any.
    pub sizes: Option<(usize, usize)>,
}

pub fn validate_isp(isp: &SetPairSystem) -> IspVerdict {
    let violation = cross_violation(isp).or_else(|| size_violation(isp));
    IspVerdict {
        valid: violation.is_none(),
        violation,
        pairs: isp.len(),
        points: isp.num_points(),
        sizes: isp.uniform_sizes(),
    }
}

fn cross_violation(isp: &SetPairSystem) -> Option<IspViolation> {
    for (i, p) in isp.pairs.iter().enumerate() {
        for (j, q) in isp.pairs.iter().enumerate() {
            let meets = p.a.intersects(&q.b);
            if i == j && meets {
                return Some(IspViolation::OwnPairMeets { i });
            }
            if i != j && !meets {
                return Some(IspViolation::CrossPairDisjoint { i, j });
            }
        }
    }
    None
}

fn size_violation(isp: &SetPairSystem) -> Option<IspViolation> {
    isp.pairs.iter().enumerate().find_map(|(i, p)| {
        let bad_a = isp.k.is_some_and(|k| p.a.len() != k);
        let bad_b = isp.t.is_some_and(|t| p.b.len() != t);
        (bad_a || bad_b).then_some(IspViolation::SizeMismatch {
            i,
            a: p.a.len(),
            b: p.b.len(),
        })
    })
}

fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BollobasCertificate {
    /// `sum 1 / C(#A_i + #B_i, #A_i)`, exact.
    #[serde(serialize_with = "ser_rational")]
    pub sum: BigRational,
    /// `C(k+t,k)` when all pairs have sizes `(k,t)`.
    #[serde(serialize_with = "ser_big_opt")]
    pub pair_bound: Option<BigUint>,
}

pub fn bollobas_sum(isp: &SetPairSystem) -> Result<BollobasCertificate> {
    let verdict = validate_isp(isp);
    if let Some(v) = verdict.violation {
        return Err(MifError::InvalidIsp(v.to_string()));
    }
    let mut sum = BigRational::zero();
    for p in &isp.pairs {
        let (a, b) = (p.a.len() as i64, p.b.len() as i64);
        let denom = BigInt::from(binomial(a + b, a));
        sum += BigRational::new(BigInt::one(), denom);
    }
    ensure_invariant!(sum <= BigRational::one(), "Bollobás sum {sum} exceeds 1");
    let pair_bound = isp.uniform_sizes().map(|(k, t)| bollobas_pair_bound(k, t));
    if let Some(bound) = &pair_bound {
        ensure_invariant!(
            BigUint::from(isp.len()) <= *bound,
            "{} pairs exceed the pair bound {bound}",
            isp.len()
        );
    }
    Ok(BollobasCertificate { sum, pair_bound })
}

/// Greedy deletion in ascending block order down to a subfamily that still
/// has transversal number `t` but loses it on removing any block.
pub fn minimal_subfamily(family: &Family, t: usize) -> Result<Family> {
    let mut current = family.clone();
    let mut i = 0;
    while i < current.len() {
        let candidate = current.without_block(i);
        if finite_tau(&candidate)? == t {
            current = candidate;
        } else {
            i += 1;
        }
    }
    Ok(current)
}

/// Set-pair system `(B_i, T_i)` built from a minimal subfamily `{B_i}` with
/// the same transversal number `t`, where `T_i` is the least transversal of
/// the subfamily without `B_i`. Checks that every point of the transversal
/// family of `family` is a point of the result.
pub fn extract_isp(family: &Family) -> Result<SetPairSystem> {
    if family.is_empty() {
        return Err(MifError::EmptyFamily);
    }
    if family.has_empty_block() {
        return Err(MifError::EmptyBlock);
    }
    let k = family.uniform_block_size().ok_or(MifError::NotUniform)?;
    let t = finite_tau(family)?;
    let minimal = minimal_subfamily(family, t)?;

    let mut pairs = Vec::with_capacity(minimal.len());
    for (i, b) in minimal.iter().enumerate() {
        let rest = minimal.without_block(i);
        let report = transversal_family(&rest)?;
        ensure_invariant!(
            report.tau + 1 == t,
            "subfamily is not minimal: removing {b} leaves tau {}",
            report.tau
        );
        let least = *report.transversals.blocks().first().expect("nonempty transversal family");
        pairs.push((*b, least));
    }
    let isp = SetPairSystem::new(pairs).with_params(k, t - 1);

    let verdict = validate_isp(&isp);
    if let Some(v) = verdict.violation {
        return Err(MifError::InvariantViolation(format!(
            "extracted system is not an ISP({k},{}): {v}",
            t - 1
        )));
    }
    bollobas_sum(&isp)?;
    let covered = transversal_family(family)?.transversals.point_set();
    ensure_invariant!(
        covered.is_subset(&isp.point_set()),
        "points {} of the transversal family are missing from the ISP",
        covered.difference(&isp.point_set())
    );
    Ok(isp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bg_family, projective_plane};

    fn b(points: &[usize]) -> Block {
        Block::from_points(points.iter().copied())
    }

    #[test]
    fn swapped_singletons_are_an_isp11() {
        let isp = SetPairSystem::new(vec![(b(&[0]), b(&[1])), (b(&[1]), b(&[0]))]).with_params(1, 1);
        let v = validate_isp(&isp);
        assert!(v.valid);
        assert_eq!((v.pairs, v.points, v.sizes), (2, 2, Some((1, 1))));
        let cert = bollobas_sum(&isp).unwrap();
        assert_eq!(cert.sum, BigRational::one());
        assert_eq!(cert.pair_bound, Some(BigUint::from(2u32)));
    }

    #[test]
    fn disjoint_cross_pair_is_reported() {
        let isp = SetPairSystem::new(vec![(b(&[0]), b(&[1])), (b(&[2]), b(&[3]))]);
        let v = validate_isp(&isp);
        assert_eq!(v.violation, Some(IspViolation::CrossPairDisjoint { i: 0, j: 1 }));
        assert!(matches!(bollobas_sum(&isp), Err(MifError::InvalidIsp(_))));
    }

    #[test]
    fn own_pair_and_size_violations() {
        let isp = SetPairSystem::new(vec![(b(&[0, 1]), b(&[1]))]);
        assert_eq!(validate_isp(&isp).violation, Some(IspViolation::OwnPairMeets { i: 0 }));
        let isp = SetPairSystem::new(vec![(b(&[0, 1]), b(&[2]))]).with_params(2, 2);
        assert_eq!(
            validate_isp(&isp).violation,
            Some(IspViolation::SizeMismatch { i: 0, a: 2, b: 1 })
        );
    }

    #[test]
    fn empty_b_allows_one_pair_only() {
        let one = SetPairSystem::new(vec![(b(&[0, 1, 2]), Block::empty())]).with_params(3, 0);
        assert!(validate_isp(&one).valid);
        assert_eq!(bollobas_sum(&one).unwrap().sum, BigRational::one());
        let two = SetPairSystem::new(vec![
            (b(&[0, 1, 2]), Block::empty()),
            (b(&[3, 4, 5]), Block::empty()),
        ]);
        assert!(!validate_isp(&two).valid);
    }

    #[test]
    fn json_shape() {
        let isp = SetPairSystem::new(vec![(b(&[0]), b(&[1])), (b(&[1]), b(&[0]))]).with_params(1, 1);
        let s = isp.to_json();
        assert_eq!(s, r#"{"pairs":[{"A":[0],"B":[1]},{"A":[1],"B":[0]}],"k":1,"t":1}"#);
        assert_eq!(SetPairSystem::parse_json(&s).unwrap(), isp);
        let bare = SetPairSystem::parse_json(r#"{"pairs":[]}"#).unwrap();
        assert_eq!(bare.k, None);
    }

    #[test]
    fn extract_from_single_block() {
        let f = Family::from_sets(&[[0, 1, 2]]);
        let isp = extract_isp(&f).unwrap();
        assert_eq!(isp.pairs, vec![SetPair { a: b(&[0, 1, 2]), b: Block::empty() }]);
        assert_eq!((isp.k, isp.t), (Some(3), Some(0)));
    }

    #[test]
    fn extract_from_bg32_covers_transversal_points() {
        let bg = bg_family(3, 2).unwrap();
        let isp = extract_isp(&bg.family).unwrap();
        assert!(validate_isp(&isp).valid);
        assert_eq!((isp.k, isp.t), (Some(3), Some(1)));
        assert!(bg.expected_transversals.point_set().is_subset(&isp.point_set()));
        assert_eq!(bg.expected_transversals.num_points(), 6);
    }

    #[test]
    fn extract_from_fano() {
        let fano = projective_plane(2).unwrap();
        let isp = extract_isp(&fano).unwrap();
        assert!(validate_isp(&isp).valid);
        assert_eq!((isp.k, isp.t), (Some(3), Some(2)));
        assert_eq!(isp.num_points(), 7);
    }

    #[test]
    fn minimal_subfamily_is_minimal() {
        let fano = projective_plane(2).unwrap();
        let e = minimal_subfamily(&fano, 3).unwrap();
        assert_eq!(finite_tau(&e).unwrap(), 3);
        for i in 0..e.len() {
            assert_eq!(finite_tau(&e.without_block(i)).unwrap(), 2);
        }
    }

    #[test]
    fn extract_rejects_bad_input() {
        assert_eq!(extract_isp(&Family::new(2, []).unwrap()).unwrap_err(), MifError::EmptyFamily);
        let mixed = Family::from_blocks([b(&[0]), b(&[0, 1])]);
        assert_eq!(extract_isp(&mixed).unwrap_err(), MifError::NotUniform);
    }
}
