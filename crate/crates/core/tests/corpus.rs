use semired::corpus::{builtin, verify_entry};

#[test]
fn every_builtin_entry_reverifies() {
    let mut failures = Vec::new();
    for e in builtin() {
        match verify_entry(&e) {
            Ok(o) if o.ok => {}
            Ok(o) => failures.push(format!("{}: expected {}, computed {}", e.name, e.expected(), o.computed)),
            Err(err) => failures.push(format!("{}: {err}", e.name)),
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn corpus_has_every_kind() {
    let kinds: std::collections::BTreeSet<String> = builtin().into_iter().map(|e| e.kind).collect();
    for k in ["stability", "torus_family", "family", "reduction", "cocycle", "charts"] {
        assert!(kinds.contains(k), "missing {k}");
    }
}
