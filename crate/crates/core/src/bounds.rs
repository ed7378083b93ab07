//! Exact evaluation of the closed-form bounds on `N(k)` and `n(k,t)`.
//!
//! Everything is arbitrary precision. Binomials with a negative or too
//! large lower index, or a negative upper index, are zero.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{ensure_invariant, MifError, Result};

pub fn binomial(n: i64, r: i64) -> BigUint {
    if n < 0 || r < 0 || r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r) as u64;
    let n = n as u64;
    let mut acc = BigUint::from(1u32);
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `u64` binomial for small arguments; panics on overflow.
pub fn binomial_u64(n: u64, r: u64) -> u64 {
    binomial(n as i64, r as i64)
        .to_u64()
        .expect("binomial fits in u64")
}

fn halve(value: BigUint, what: &str) -> Result<BigUint> {
    let (q, r) = value.div_rem(&BigUint::from(2u32));
    ensure_invariant!(r.is_zero(), "{what} is odd");
    Ok(q)
}

/// `C(2k-2, k-1) / 2`, checked to divide exactly.
pub fn half_central_binomial(k: usize) -> Result<BigUint> {
    let m = k as i64 - 1;
    halve(binomial(2 * m, m), "C(2k-2,k-1)")
}

/// `sum_{i=1}^{m} C(2i, i)`.
fn central_sum(m: i64) -> BigUint {
    (1..=m).map(|i| binomial(2 * i, i)).sum()
}

fn require_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(MifError::ParameterOutOfRange(format!("need k >= 2, got {k}")));
    }
    Ok(())
}

/// Lower bound `2k-2 + C(2k-2,k-1)/2` on `N(k)`.
pub fn el_lower(k: usize) -> Result<BigUint> {
    require_k(k)?;
    Ok(BigUint::from(2 * k - 2) + half_central_binomial(k)?)
}

/// Conjectured exact value of `N(k)`.
pub fn conjectured_n(k: usize) -> Result<BigUint> {
    require_k(k)?;
    let m = k as i64 - 1;
    let central = binomial(2 * m, m);
    halve(BigUint::from(4 * k - 4) + central, "4k-4 + C(2k-2,k-1)")
}

/// `(3/2) sum_{i=1}^{k-1} C(2i,i)`, the upper bound `n(k,k-1)` evaluates to.
pub fn tuza_nk_upper(k: usize) -> Result<BigUint> {
    require_k(k)?;
    halve(central_sum(k as i64 - 1) * 3u32, "3 * sum C(2i,i)")
}

/// `(3/2) sum_{i=1}^{k-1} C(2i,i) - C(2k-2,k-1)/2`, evaluated as one fraction.
pub fn improved_upper(k: usize) -> Result<BigUint> {
    require_k(k)?;
    let m = k as i64 - 1;
    let numerator = central_sum(m) * 3u32;
    let central = binomial(2 * m, m);
    ensure_invariant!(numerator >= central, "improved bound negative at k={k}");
    halve(numerator - central, "3 * sum C(2i,i) - C(2k-2,k-1)")
}

fn tuza_nkt_any(k: usize, t: usize) -> Result<BigUint> {
    let (ki, ti) = (k as i64, t as i64);
    let first = binomial(ki + ti, ti + 1);
    let second = binomial(2 * ti - 1, ti + 1);
    let tail = halve(central_sum(ti - 1) * 3u32, "3 * sum C(2i,i)")?;
    ensure_invariant!(first >= second, "negative Tuza bound at ({k},{t})");
    Ok(first - second + tail)
}

/// `C(k+t,t+1) - C(2t-1,t+1) + (3/2) sum_{i=1}^{t-1} C(2i,i)`, for `k >= t >= 1`.
pub fn tuza_nkt_upper(k: usize, t: usize) -> Result<BigUint> {
    if t < 1 || k < t {
        return Err(MifError::ParameterOutOfRange(format!(
            "Tuza bound needs k >= t >= 1, got k={k}, t={t}"
        )));
    }
    tuza_nkt_any(k, t)
}

/// `ceil(k/(t+1)) C(floor(kt/(t+1))+t, t) + floor(kt/(t+1)) + t`, for `k >= t+2`.
pub fn tuza_conjecture_value(k: usize, t: usize) -> Result<BigUint> {
    if k < t + 2 {
        return Err(MifError::ParameterOutOfRange(format!(
            "conjectured n(k,t) needs k >= t+2, got k={k}, t={t}"
        )));
    }
    let blocks = k.div_ceil(t + 1);
    let m = (k * t) / (t + 1);
    Ok(BigUint::from(blocks) * binomial((m + t) as i64, t as i64) + BigUint::from(m + t))
}

/// Bollobás cap `C(k+t,k)` on the number of pairs of an ISP(k,t).
pub fn bollobas_pair_bound(k: usize, t: usize) -> BigUint {
    binomial((k + t) as i64, k as i64)
}

/// `C(2k-2,k-1)/2 + n(k,k-2)` with the Tuza value substituted for
/// `n(k,k-2)`; at `k = 2` that term is `n(2,0) = 2` exactly.
pub fn main_upper_with_tuza(k: usize) -> Result<BigUint> {
    require_k(k)?;
    Ok(half_central_binomial(k)? + tuza_nkt_any(k, k - 2)?)
}

/// Proven point bound used to size the exhaustive MIF search.
pub fn search_point_bound(k: usize) -> Result<usize> {
    main_upper_with_tuza(k)?
        .to_usize()
        .ok_or_else(|| MifError::ParameterOutOfRange(format!("bound at k={k} too large")))
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

fn ser_big_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_big(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainUpper {
    #[serde(serialize_with = "ser_big")]
    pub half_binomial: BigUint,
    /// The unknown term: always `"n(k,k-2)"`.
    pub n_term: String,
    /// Value after substituting the Tuza bound for `n(k,k-2)`.
    #[serde(serialize_with = "ser_big")]
    pub with_tuza: BigUint,
    /// Value after substituting the conjectured `n(k,k-2)`.
    #[serde(serialize_with = "ser_big")]
    pub with_conjecture: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairBounds {
    pub t: usize,
    #[serde(serialize_with = "ser_big")]
    pub bollobas_pair_bound: BigUint,
    #[serde(serialize_with = "ser_big_opt")]
    pub tuza_nkt_upper: Option<BigUint>,
    #[serde(serialize_with = "ser_big_opt")]
    pub tuza_conjecture: Option<BigUint>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsTable {
    pub k: usize,
    #[serde(serialize_with = "ser_big")]
    pub el_lower: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub tuza_nk_upper: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub improved_upper: BigUint,
    pub main_upper: MainUpper,
    #[serde(serialize_with = "ser_big")]
    pub conjectured_n: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairBounds>,
    pub notes: Vec<String>,
}

pub fn eval_bounds(k: usize) -> Result<BoundsTable> {
    require_k(k)?;
    let half = half_central_binomial(k)?;
    let el = el_lower(k)?;
    let tuza = tuza_nk_upper(k)?;
    let improved = improved_upper(k)?;
    let conj = conjectured_n(k)?;
    let with_tuza = main_upper_with_tuza(k)?;
    let with_conjecture = &half + tuza_conjecture_value(k, k - 2)?;

    ensure_invariant!(
        improved.clone() + &half == tuza,
        "improved bound differs from Tuza bound minus C(2k-2,k-1)/2 at k={k}"
    );
    ensure_invariant!(el == conj, "lower bound and conjectured N differ at k={k}");

    let mut notes = Vec::new();
    if k >= 3 {
        ensure_invariant!(
            with_tuza == improved,
            "closed-form improved bound disagrees with the substituted main bound at k={k}"
        );
        let closed = &half + binomial(2 * k as i64 - 4, k as i64 - 2) * 2u32 + BigUint::from(2 * k - 4);
        ensure_invariant!(
            with_conjecture == closed,
            "conjectural bound disagrees with its closed form at k={k}"
        );
    } else {
        notes.push(format!(
            "k=2: closed-form improved bound {improved} is below the lower bound {el}; \
             the main bound with n(2,0)=2 gives {with_tuza}"
        ));
    }

    Ok(BoundsTable {
        k,
        el_lower: el,
        tuza_nk_upper: tuza,
        improved_upper: improved,
        main_upper: MainUpper {
            half_binomial: half,
            n_term: "n(k,k-2)".into(),
            with_tuza,
            with_conjecture,
        },
        conjectured_n: conj,
        pair: None,
        notes,
    })
}

/// [`eval_bounds`] plus the set-pair bounds at `(k, t)`.
pub fn eval_bounds_with_pair(k: usize, t: usize) -> Result<BoundsTable> {
    let mut table = eval_bounds(k)?;
    let tuza = tuza_nkt_upper(k, t).ok();
    let mut notes = Vec::new();
    if (k, t) == (2, 1) {
        notes.push(
            "n(2,1) = 4 by exhaustive search, witness A1={b2,x} B1={b1}, A2={b1,y} B2={b2}, \
             which exceeds the Tuza value 3 at this boundary"
                .to_string(),
        );
    }
    table.pair = Some(PairBounds {
        t,
        bollobas_pair_bound: bollobas_pair_bound(k, t),
        tuza_nkt_upper: tuza,
        tuza_conjecture: tuza_conjecture_value(k, t).ok(),
        notes,
    });
    Ok(table)
}

impl BoundsTable {
    /// Human-readable two-column table.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("k".into(), self.k.to_string()),
            ("lower bound 2k-2+C(2k-2,k-1)/2".into(), self.el_lower.to_string()),
            ("conjectured N(k)".into(), self.conjectured_n.to_string()),
            ("Tuza upper (3/2)sum C(2i,i)".into(), self.tuza_nk_upper.to_string()),
            ("improved upper".into(), self.improved_upper.to_string()),
            (
                "main upper C(2k-2,k-1)/2 + n(k,k-2)".into(),
                format!("{} + {}", self.main_upper.half_binomial, self.main_upper.n_term),
            ),
            ("  with Tuza n(k,k-2)".into(), self.main_upper.with_tuza.to_string()),
            ("  with conjectured n(k,k-2)".into(), self.main_upper.with_conjecture.to_string()),
        ];
        if let Some(p) = &self.pair {
            rows.push(("t".into(), p.t.to_string()));
            rows.push(("Bollobas pairs C(k+t,k)".into(), p.bollobas_pair_bound.to_string()));
            let opt = |v: &Option<BigUint>| v.as_ref().map_or("n/a".to_string(), |x| x.to_string());
            rows.push(("Tuza n(k,t) upper".into(), opt(&p.tuza_nkt_upper)));
            rows.push(("conjectured n(k,t)".into(), opt(&p.tuza_conjecture)));
        }
        let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (l, v) in rows {
            out.push_str(&format!("{l:<width$}  {v}\n"));
        }
        let pair_notes = self.pair.iter().flat_map(|p| p.notes.iter());
        for n in self.notes.iter().chain(pair_notes) {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}
