//! Committed example families. The JSON files under `fixtures/` are
//! generated by [`generate`] and rendered by [`render`], one block per line.

use std::path::Path;

use crate::constructions::{bg_family, complete_family, projective_plane};
use crate::family::{format, Family};
use crate::Result;

pub const NAMES: [&str; 6] = ["triangle", "complete3", "complete4", "fano", "pg23", "bg32"];

const EMBEDDED: [(&str, &str); 6] = [
    ("triangle", include_str!("../fixtures/triangle.json")),
    ("complete3", include_str!("../fixtures/complete3.json")),
    ("complete4", include_str!("../fixtures/complete4.json")),
    ("fano", include_str!("../fixtures/fano.json")),
    ("pg23", include_str!("../fixtures/pg23.json")),
    ("bg32", include_str!("../fixtures/bg32.json")),
];

/// Builds the named fixture from its construction. Panics on unknown names.
pub fn generate(name: &str) -> Result<Family> {
    match name {
        "triangle" => Ok(Family::from_sets(&[[0, 1], [0, 2], [1, 2]])),
        "complete3" => complete_family(3),
        "complete4" => complete_family(4),
        "fano" => projective_plane(2),
        "pg23" => projective_plane(3),
        "bg32" => Ok(bg_family(3, 2)?.family),
        _ => panic!("unknown fixture {name:?}"),
    }
}

pub fn render(family: &Family) -> String {
    let mut out = format!("{{\n  \"universe\": {},\n", family.universe());
    if let Some(labels) = family.labels() {
        let json = serde_json::to_string(labels).expect("labels serialize");
        out.push_str(&format!("  \"labels\": {json},\n"));
    }
    out.push_str("  \"blocks\": [\n");
    let lines: Vec<String> = family
        .iter()
        .map(|b| {
            let pts: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            format!("    [{}]", pts.join(", "))
        })
        .collect();
    out.push_str(&lines.join(",\n"));
    out.push_str("\n  ]\n}\n");
    out
}

/// The compiled-in copy of the named fixture.
pub fn embedded(name: &str) -> Option<&'static str> {
    EMBEDDED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Reads `<dir>/<name>.json` if `dir` is given, else the embedded copy.
pub fn load(name: &str, dir: Option<&Path>) -> Result<Family> {
    match dir {
        Some(d) => format::parse_json(&std::fs::read_to_string(d.join(format!("{name}.json")))?),
        None => format::parse_json(embedded(name).unwrap_or_else(|| panic!("unknown fixture {name:?}"))),
    }
}
