//! End-to-end runs of the pipeline over the bundled fixtures.

use std::path::PathBuf;
use std::sync::OnceLock;

use modcurves::forms::FixtureStore;
use modcurves::records::{load_corpus, verify_record, Outcome, PipelineOptions};

fn store() -> &'static FixtureStore {
    static STORE: OnceLock<FixtureStore> = OnceLock::new();
    STORE.get_or_init(|| {
        let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
        FixtureStore::open(&root).expect("fixture directory")
    })
}

#[test]
fn every_fixture_validates() {
    let s = store();
    assert!(s.invalid().is_empty(), "{:?}", s.invalid());
    assert_eq!(s.labels().count(), 77);
}

#[test]
fn corpus_records_verify() {
    let corpus = load_corpus();
    let opts = PipelineOptions::default();
    let mut failures = Vec::new();
    for r in &corpus.records {
        let rep = verify_record(r, store(), &opts);
        eprintln!("{:<12} {:?} {}ms", rep.id, rep.outcome, rep.elapsed_ms.unwrap_or(0));
        if rep.outcome != Outcome::Verified {
            let bad: Vec<_> = rep.checks.iter().filter(|c| !c.passed).collect();
            failures.push(format!("{} {:?} {:?} {:?}", rep.id, rep.outcome, rep.error, bad));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
