use miflab::fixtures::{embedded, generate, load, render, NAMES};

// Set MIFLAB_WRITE_FIXTURES=1 to rewrite the committed files.
#[test]
fn committed_fixtures_match_constructions() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let write = std::env::var_os("MIFLAB_WRITE_FIXTURES").is_some();
    if write {
        for name in NAMES {
            let text = render(&generate(name).unwrap());
            std::fs::write(dir.join(format!("{name}.json")), text).unwrap();
        }
    }
    for name in NAMES {
        let text = render(&generate(name).unwrap());
        let path = dir.join(format!("{name}.json"));
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text, "{name}");
        assert_eq!(embedded(name).unwrap(), text, "{name} (embedded)");
    }
}

#[test]
fn fixtures_parse_back_to_constructions() {
    for name in NAMES {
        assert_eq!(load(name, None).unwrap(), generate(name).unwrap(), "{name}");
    }
}

#[test]
fn removed_line_changes_fano() {
    let text = embedded("fano").unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let cut = lines.iter().position(|l| l.trim_start().starts_with('[')).unwrap();
    let mut kept = lines.clone();
    kept.remove(cut);
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fano.json"), kept.join("\n")).unwrap();
    let f = load("fano", Some(dir.path())).unwrap();
    assert_eq!(f.len(), 6);
}
