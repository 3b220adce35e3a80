mod common;

use common::{oracle_run, ENGINES};
use shapq::shapley::Score;

#[test]
fn engines_match_bruteforce_shapley() {
    for (i, engine) in ENGINES.into_iter().enumerate() {
        let run = oracle_run(engine, 60, 100 + i as u64, Score::Shapley);
        assert!(run.mismatches.is_empty(), "{engine}: {:#?}", &run.mismatches[..run.mismatches.len().min(3)]);
        assert!(run.axiom_failures.is_empty(), "{engine}: {:#?}", &run.axiom_failures[..run.axiom_failures.len().min(3)]);
    }
}

#[test]
fn engines_match_bruteforce_banzhaf() {
    for (i, engine) in ENGINES.into_iter().enumerate() {
        let run = oracle_run(engine, 30, 200 + i as u64, Score::Banzhaf);
        assert!(run.mismatches.is_empty(), "{engine}: {:#?}", &run.mismatches[..run.mismatches.len().min(3)]);
    }
}
