use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use shapq::aggregates::{AggregateFunction, AggregateQuery, ValueFunction};
use shapq::exec::{set_mode, ExecMode};
use shapq::gadgets::setcover::{recover_cover_counts_avg, SetCoverInstance};
use shapq::shapley::bruteforce::{shapley_bruteforce_capped, Game};
use shapq::shapley::dispatch::{run_engine, Engine, Options};
use shapq::{parse_cq, Database, Fact};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

// x-values with 19 R facts and one S fact each
fn scaling_db(groups: i64) -> Database {
    let mut d = Database::new();
    for x in 0..groups {
        for y in 0..19 {
            d.endo(Fact::ints("R", &[x, y])).unwrap();
        }
        d.endo(Fact::ints("S", &[x])).unwrap();
    }
    d
}

fn avg_engine(c: &mut Criterion) {
    let q = parse_cq("Q(x) :- R(x,y), S(x).").unwrap();
    let a = AggregateQuery::new(AggregateFunction::Avg, ValueFunction::Identity(1), q).unwrap();
    let mut g = c.benchmark_group("avg_engine");
    g.sample_size(10);
    for groups in [4, 10] {
        let d = scaling_db(groups);
        let f = Fact::ints("S", &[0]);
        for (name, mode) in MODES {
            g.bench_with_input(BenchmarkId::new(name, d.endo_count()), &d, |b, d| {
                set_mode(mode);
                b.iter(|| run_engine(Engine::AvgQnt, &a, d, &f, &Options::default()).unwrap())
            });
        }
    }
    g.finish();
}

fn bruteforce(c: &mut Criterion) {
    let q = parse_cq("Q(x) :- R(x,y), S(y).").unwrap();
    let a = AggregateQuery::new(AggregateFunction::Max, ValueFunction::Identity(1), q).unwrap();
    let mut d = Database::new();
    for i in 0..8 {
        d.endo(Fact::ints("R", &[i, i % 4])).unwrap();
    }
    for j in 0..8 {
        d.endo(Fact::ints("S", &[j])).unwrap();
    }
    let f = Fact::ints("S", &[0]);
    let mut g = c.benchmark_group("bruteforce_16");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| {
            set_mode(mode);
            b.iter(|| shapley_bruteforce_capped(&a, &d, &f, 20).unwrap())
        });
        g.bench_function(format!("{name}_sumk"), |b| {
            set_mode(mode);
            let game = Game::new(&a, &d, 20).unwrap();
            b.iter(|| game.sumk())
        });
    }
    g.finish();
}

fn setcover_grid(c: &mut Criterion) {
    let inst = SetCoverInstance::new(4, vec![vec![1, 2], vec![3, 4], vec![2, 3]]).unwrap();
    let oracle = |a: &AggregateQuery, d: &Database, f: &Fact| shapley_bruteforce_capped(a, d, f, 20);
    let mut g = c.benchmark_group("setcover_avg_grid");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| {
            set_mode(mode);
            b.iter(|| recover_cover_counts_avg(&inst, &oracle).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, avg_engine, bruteforce, setcover_grid);
criterion_main!(benches);
