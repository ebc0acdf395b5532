//! Golden files under data/golden. Regenerate with `BENDLAB_BLESS=1`.

use bendlab::acceptance;

#[test]
fn goldens_match() {
    let dir = acceptance::golden_dir();
    if std::env::var_os("BENDLAB_BLESS").is_some() {
        std::fs::create_dir_all(&dir).unwrap();
        for (name, make) in acceptance::golden_artifacts() {
            std::fs::write(dir.join(name), make().unwrap()).unwrap();
        }
    }
    for (name, outcome) in acceptance::check_goldens(&dir) {
        assert!(outcome.is_ok(), "{name}: {outcome:?}");
    }
}

#[test]
fn corrupted_golden_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, make) in acceptance::golden_artifacts() {
        std::fs::write(tmp.path().join(name), make().unwrap()).unwrap();
    }
    std::fs::write(tmp.path().join("desk_report.json"), b"{}\n").unwrap();
    let results = acceptance::check_goldens(tmp.path());
    let bad: Vec<_> = results.iter().filter(|(_, r)| r.is_err()).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].0, "desk_report.json");
    assert!(bad[0].1.as_ref().unwrap_err().contains("desk_report.json"));
}
