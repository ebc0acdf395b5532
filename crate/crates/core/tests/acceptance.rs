use std::io::Write;

use bendlab::acceptance;

#[test]
fn acceptance() {
    // direct writes bypass libtest capture, so the table shows on success too
    let mut err = std::io::stderr();
    let results = acceptance::run(None);
    for r in &results {
        writeln!(err, "{}", r.line()).unwrap();
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    writeln!(err, "{}/{} criteria passed", results.len() - failed.len(), results.len()).unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
