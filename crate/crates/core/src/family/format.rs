//! Family file formats.
//!
//! JSON: `{"universe":n,"labels":[...],"blocks":[[ids...],...]}` where
//! `labels` is omitted when absent.
//!
//! Text, one record per line:
//!
//! ```text
//! c comment (also lines starting with '#')
//! u 7          universe size (optional; defaults to max point + 1)
//! l 0 name     label of point 0 (optional; all or none)
//! b 0 1 3      one block
//! ```
//!
//! Writers emit blocks in sorted order, so `write(parse(write(f)))` is byte
//! identical to `write(f)`.

use serde::{Deserialize, Serialize};

use super::{check_universe, Block, Family, PointId, DEFAULT_UNIVERSE_LIMIT};
use crate::error::{MifError, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyRepr {
    universe: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    blocks: Vec<Block>,
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            universe: self.universe,
            labels: self.labels.clone(),
            blocks: self.blocks.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(d)?;
        from_repr(repr, super::MAX_UNIVERSE).map_err(serde::de::Error::custom)
    }
}

fn from_repr(repr: FamilyRepr, limit: usize) -> Result<Family> {
    check_universe(repr.universe, limit)?;
    let f = Family::new(repr.universe, repr.blocks)?;
    match repr.labels {
        Some(labels) => f.with_labels(labels),
        None => Ok(f),
    }
}

fn json_error(e: serde_json::Error) -> MifError {
    MifError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_json(input: &str) -> Result<Family> {
    parse_json_with_limit(input, DEFAULT_UNIVERSE_LIMIT)
}

pub fn parse_json_with_limit(input: &str, limit: usize) -> Result<Family> {
    let repr: FamilyRepr = serde_json::from_str(input).map_err(json_error)?;
    from_repr(repr, limit)
}

pub fn to_json(family: &Family) -> String {
    serde_json::to_string(family).expect("family serializes")
}

pub fn parse_text(input: &str) -> Result<Family> {
    parse_text_with_limit(input, DEFAULT_UNIVERSE_LIMIT)
}

pub fn parse_text_with_limit(input: &str, limit: usize) -> Result<Family> {
    let mut universe: Option<usize> = None;
    let mut labels: Vec<(PointId, String)> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();

    for (lineno, line) in input.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = tokens_with_columns(line);
        let (_, tag) = tokens.next().expect("nonempty line has a token");
        let err = |column: usize, message: String| MifError::Parse {
            line: line_no,
            column,
            message,
        };
        match tag {
            "c" => continue,
            "u" => {
                let (col, tok) = tokens
                    .next()
                    .ok_or_else(|| err(line.len() + 1, "missing universe size".into()))?;
                let n = tok
                    .parse::<usize>()
                    .map_err(|_| err(col, format!("invalid universe size {tok:?}")))?;
                if universe.replace(n).is_some() {
                    return Err(err(indent + 1, "duplicate universe record".into()));
                }
            }
            "l" => {
                let (col, tok) = tokens
                    .next()
                    .ok_or_else(|| err(line.len() + 1, "missing label point".into()))?;
                let p = tok
                    .parse::<usize>()
                    .map_err(|_| err(col, format!("invalid point id {tok:?}")))?;
                let (_, name) = tokens
                    .next()
                    .ok_or_else(|| err(line.len() + 1, "missing label".into()))?;
                labels.push((p, name.to_string()));
            }
            "b" => {
                let mut block = Block::empty();
                let mut count = 0;
                for (col, tok) in tokens {
                    let p = tok
                        .parse::<usize>()
                        .map_err(|_| err(col, format!("invalid point id {tok:?}")))?;
                    if p >= super::MAX_UNIVERSE {
                        return Err(err(col, format!("point {p} exceeds block capacity")));
                    }
                    block.insert(p);
                    count += 1;
                    if block.len() != count {
                        return Err(err(col, format!("duplicate point {p} in block")));
                    }
                }
                blocks.push(block);
            }
            other => {
                return Err(err(indent + 1, format!("unknown record type {other:?}")));
            }
        }
    }

    let max_point = blocks.iter().filter_map(Block::last).max();
    let universe = universe.unwrap_or_else(|| max_point.map_or(0, |p| p + 1));
    check_universe(universe, limit)?;
    let family = Family::new(universe, blocks)?;
    if labels.is_empty() {
        return Ok(family);
    }
    let given = labels.len();
    let mut ordered = vec![None; universe];
    for (p, name) in labels {
        let slot = ordered
            .get_mut(p)
            .ok_or(MifError::PointOutOfUniverse { point: p, universe })?;
        *slot = Some(name);
    }
    let ordered: Option<Vec<String>> = ordered.into_iter().collect();
    let ordered = ordered.ok_or(MifError::LabelCount { labels: given, universe })?;
    family.with_labels(ordered)
}

fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| {
        let offset = tok.as_ptr() as usize - line.as_ptr() as usize;
        (offset + 1, tok)
    })
}

pub fn to_text(family: &Family) -> String {
    let mut out = format!("u {}\n", family.universe());
    if let Some(labels) = family.labels() {
        for (i, l) in labels.iter().enumerate() {
            out.push_str(&format!("l {i} {l}\n"));
        }
    }
    for b in family.blocks() {
        out.push('b');
        for p in b.iter() {
            out.push_str(&format!(" {p}"));
        }
        out.push('\n');
    }
    out
}

/// Parses either format, choosing JSON when the first non-space byte is `{`.
pub fn parse_any(input: &str) -> Result<Family> {
    parse_any_with_limit(input, DEFAULT_UNIVERSE_LIMIT)
}

pub fn parse_any_with_limit(input: &str, limit: usize) -> Result<Family> {
    if input.trim_start().starts_with('{') {
        parse_json_with_limit(input, limit)
    } else {
        parse_text_with_limit(input, limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn json_shape() {
        let f = Family::from_sets(&[[1, 2], [0, 1]]);
        assert_eq!(to_json(&f), r#"{"universe":3,"blocks":[[0,1],[1,2]]}"#);
        let labeled = f
            .with_labels(vec!["x".into(), "y".into(), "z".into()])
            .unwrap();
        assert_eq!(
            to_json(&labeled),
            r#"{"universe":3,"labels":["x","y","z"],"blocks":[[0,1],[1,2]]}"#
        );
    }

    #[test]
    fn text_shape_and_defaults() {
        let f = parse_text("# triangle\nb 0 1\nb 1 2\n\nb 0 2\n").unwrap();
        assert_eq!(f.universe(), 3);
        assert_eq!(to_text(&f), "u 3\nb 0 1\nb 0 2\nb 1 2\n");
    }

    #[test]
    fn json_errors_report_position() {
        let err = parse_json("{\"universe\": 3,\n \"blocks\": [[0, 1], [x]]}").unwrap_err();
        match err {
            MifError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn text_errors_report_position() {
        let err = parse_text("b 0 1\nb 2 zz\n").unwrap_err();
        assert_eq!(
            err,
            MifError::Parse {
                line: 2,
                column: 5,
                message: "invalid point id \"zz\"".into()
            }
        );
        assert!(matches!(
            parse_text("b 0 0\n"),
            Err(MifError::Parse { line: 1, column: 5, .. })
        ));
        assert!(matches!(
            parse_text("q 1\n"),
            Err(MifError::Parse { line: 1, column: 1, .. })
        ));
    }

    #[test]
    fn universe_limit_is_enforced() {
        assert!(matches!(
            parse_text("u 129\nb 0\n"),
            Err(MifError::UniverseOverflow { requested: 129, limit: 128 })
        ));
        assert!(parse_text_with_limit("u 129\nb 0\n", 200).is_ok());
        assert!(matches!(
            parse_json(r#"{"universe":2,"blocks":[[0,5]]}"#),
            Err(MifError::PointOutOfUniverse { point: 5, universe: 2 })
        ));
    }

    #[test]
    fn parse_any_dispatches() {
        let a = parse_any(" {\"universe\":2,\"blocks\":[[0,1]]}").unwrap();
        let b = parse_any("b 0 1\n").unwrap();
        assert_eq!(a, b);
    }

    fn arb_family() -> impl Strategy<Value = Family> {
        (1usize..40).prop_flat_map(|universe| {
            prop::collection::vec(prop::collection::btree_set(0..universe, 0..6), 0..12).prop_map(
                move |sets| {
                    Family::new(
                        universe,
                        sets.into_iter().map(Block::from_points),
                    )
                    .unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(f in arb_family()) {
            let s = to_json(&f);
            let g = parse_json(&s).unwrap();
            prop_assert_eq!(&g, &f);
            prop_assert_eq!(to_json(&g), s);
        }

        #[test]
        fn text_round_trip_is_bit_exact(f in arb_family()) {
            let s = to_text(&f);
            let g = parse_text(&s).unwrap();
            prop_assert_eq!(&g, &f);
            prop_assert_eq!(to_text(&g), s);
        }
    }
}
