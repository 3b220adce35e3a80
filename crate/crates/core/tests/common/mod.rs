#![allow(dead_code)]

use std::collections::BTreeMap;

use shapq::corpus::{random_instance, rng, DbShape};
use shapq::shapley::axioms::check_axioms;
use shapq::shapley::bruteforce::bruteforce_all;
use shapq::shapley::dispatch::{run_engine, Engine, Options};
use shapq::shapley::Score;
use shapq::{AggregateQuery, Database, Fact, Rational};

pub const ENGINES: [Engine; 6] = [
    Engine::Boolean,
    Engine::SumCount,
    Engine::MaxMin,
    Engine::CDist,
    Engine::AvgQnt,
    Engine::Dup,
];

#[derive(Debug, Default)]
pub struct OracleRun {
    pub instances: usize,
    pub facts: usize,
    pub mismatches: Vec<String>,
    pub axiom_failures: Vec<String>,
}

pub fn engine_values(engine: Engine, a: &AggregateQuery, d: &Database, score: Score) -> BTreeMap<Fact, Rational> {
    let opts = Options {
        score,
        ..Options::default()
    };
    d.endogenous()
        .into_iter()
        .map(|f| {
            let v = run_engine(engine, a, d, &f, &opts).unwrap_or_else(|e| panic!("{engine} on {a}: {e}"));
            (f, v)
        })
        .collect()
}

/// Compares `engine` against brute force on `count` seeded instances and
/// checks the axioms on the engine output.
pub fn oracle_run(engine: Engine, count: usize, seed: u64, score: Score) -> OracleRun {
    let mut r = rng(seed);
    let shape = DbShape::default();
    let mut out = OracleRun::default();
    for k in 0..count {
        let (a, d) = random_instance(&mut r, engine, &shape);
        let got = engine_values(engine, &a, &d, score);
        let want = bruteforce_all(&a, &d, score, 20).expect("within cap");
        out.instances += 1;
        out.facts += got.len();
        if got != want {
            let bad: Vec<String> = want
                .iter()
                .filter(|(f, v)| got.get(*f) != Some(*v))
                .map(|(f, v)| format!("{f}: engine {:?} oracle {v}", got.get(f).map(|x| x.to_string())))
                .collect();
            out.mismatches.push(format!("#{k} {a} on {d:?}: {}", bad.join("; ")));
        }
        if score == Score::Shapley {
            let rep = check_axioms(&a, &d, &got).expect("axioms evaluate");
            if !rep.passed() {
                out.axiom_failures.push(format!("#{k} {a}: {rep:?}"));
            }
        }
    }
    out
}
