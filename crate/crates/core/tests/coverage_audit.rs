//! Every check id is reachable from exactly one suite, and every suite emits
//! exactly the ids it declares.

use std::collections::BTreeSet;

use twisted_xxx::config::RunConfig;
use twisted_xxx::suite::{run_suite, suite_check_ids, Suite};

#[test]
fn suites_partition_the_check_ids() {
    let mut seen = BTreeSet::new();
    for s in Suite::CONCRETE {
        for id in suite_check_ids(s) {
            assert!(seen.insert(*id), "{id} is declared by more than one suite");
        }
    }
    assert!(suite_check_ids(Suite::All).is_empty());
}

#[test]
fn each_suite_emits_exactly_its_declared_ids() {
    let cfg = RunConfig {
        samples: Some(1),
        ..RunConfig::default()
    };
    let mut total = 0;
    for s in Suite::CONCRETE {
        let reports = run_suite(&cfg, s).unwrap();
        let emitted: BTreeSet<&str> = reports.iter().map(|r| r.check_id.as_str()).collect();
        let declared: BTreeSet<&str> = suite_check_ids(s).iter().copied().collect();
        assert_eq!(emitted, declared, "suite {s}");
        for r in &reports {
            assert!(!r.notes.starts_with("error"), "{s}: {} errored: {}", r.check_id, r.notes);
        }
        total += reports.len();
    }
    assert_eq!(run_suite(&cfg, Suite::All).unwrap().len(), total);
}
