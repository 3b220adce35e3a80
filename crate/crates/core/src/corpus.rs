//! Seeded random instances over hand-written query families.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregates::{AggregateFunction, AggregateQuery, ValueFunction};
use crate::cq::{parse_cq, ConjunctiveQuery, HeadSlot, HierarchyClass};
use crate::model::{int, rat, Constant, Database, Fact, Provenance};
use crate::shapley::dispatch::{route, Engine};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labeled queries, at least three per class.
pub const FAMILIES: &[(&str, HierarchyClass)] = &[
    ("Q(x) :- R(x).", HierarchyClass::SQHierarchical),
    ("Q(x) :- R(x,y), S(x).", HierarchyClass::SQHierarchical),
    ("Q(x) :- R(x,y), S(x,z).", HierarchyClass::SQHierarchical),
    ("Q(x) :- R(x), S(y).", HierarchyClass::SQHierarchical),
    ("Q() :- R(x), S(x,y).", HierarchyClass::SQHierarchical),
    ("Q(x,y) :- R(x,y), S(x,y).", HierarchyClass::SQHierarchical),
    ("Q(x,y) :- R(x,y), S(x).", HierarchyClass::QHierarchical),
    ("Q(x,z) :- R(x,y), S(x,z).", HierarchyClass::QHierarchical),
    ("Q(x,y) :- R(x), S(x,y), T(x,y,z).", HierarchyClass::QHierarchical),
    ("Q(x) :- R(x,y), S(y).", HierarchyClass::AllHierarchical),
    ("Q(x) :- R(x,y), S(y), T(y,z).", HierarchyClass::AllHierarchical),
    ("Q(x,u) :- R(x,y), S(y), U(u).", HierarchyClass::AllHierarchical),
    ("Q(x) :- P(y), R(x,y,z), S(y,v).", HierarchyClass::AllHierarchical),
    ("Q(x,y) :- R(x), S(x,y), T(y).", HierarchyClass::ExistsHierarchical),
    ("Q(y) :- R(x), S(x,y), T(y).", HierarchyClass::ExistsHierarchical),
    ("Q(x,y) :- R(x,z), S(x,y), T(y).", HierarchyClass::ExistsHierarchical),
    ("Q() :- R(x), S(x,y), T(y).", HierarchyClass::NotExistsHierarchical),
    ("Q(z) :- R(x,z), S(x,y), T(y,z).", HierarchyClass::NotExistsHierarchical),
    ("Q(x) :- R(x,y), S(y,z), T(z).", HierarchyClass::NotExistsHierarchical),
    ("Q() :- R(x,y), S(y,z), T(z,w).", HierarchyClass::NotExistsHierarchical),
];

pub fn family_queries() -> Vec<(ConjunctiveQuery, HierarchyClass)> {
    FAMILIES
        .iter()
        .map(|(q, c)| (parse_cq(q).expect("family query parses"), *c))
        .collect()
}

#[derive(Debug, Clone)]
pub struct DbShape {
    pub max_endo: usize,
    pub max_total: usize,
    /// Constants are drawn from lo..hi.
    pub lo: i64,
    pub hi: i64,
    pub endo_prob: f64,
}

impl Default for DbShape {
    fn default() -> Self {
        DbShape {
            max_endo: 12,
            max_total: 30,
            lo: -1,
            hi: 3,
            endo_prob: 0.6,
        }
    }
}

/// Random facts over the relations of `q`, respecting its constants so
/// that homomorphisms are common.
pub fn random_database<R: Rng>(rng: &mut R, q: &ConjunctiveQuery, shape: &DbShape) -> Database {
    let mut d = Database::new();
    for a in &q.body {
        d.declare(&a.relation, a.args.len()).expect("self-join free");
    }
    let total = rng.random_range(1..=shape.max_total);
    let mut endo = 0;
    for _ in 0..total * 3 {
        if d.len() >= total {
            break;
        }
        let a = &q.body[rng.random_range(0..q.body.len())];
        let tuple: Vec<Constant> = a
            .args
            .iter()
            .map(|t| match t {
                crate::cq::Term::Const(c) => c.clone(),
                crate::cq::Term::Var(_) => Constant::int(rng.random_range(shape.lo..shape.hi)),
            })
            .collect();
        let f = Fact::new(&a.relation, tuple);
        if d.contains(&f) {
            continue;
        }
        let p = if endo < shape.max_endo && rng.random_bool(shape.endo_prob) {
            endo += 1;
            Provenance::Endogenous
        } else {
            Provenance::Exogenous
        };
        d.insert(f, p).expect("fresh fact");
    }
    d
}

/// A value function reading a head variable, or a constant for Boolean
/// heads.
pub fn random_tau<R: Rng>(rng: &mut R, q: &ConjunctiveQuery) -> ValueFunction {
    let vars: Vec<usize> = q
        .slots
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, HeadSlot::Var(_)))
        .map(|(i, _)| i + 1)
        .collect();
    let Some(&pos) = vars.choose(rng) else {
        return ValueFunction::Const(int(rng.random_range(1..4)));
    };
    match rng.random_range(0..7) {
        0..=2 => ValueFunction::Identity(pos),
        3 => ValueFunction::ReLU(pos),
        4 | 5 => ValueFunction::GreaterThan(int(rng.random_range(0..2)), pos),
        _ => ValueFunction::Const(int(rng.random_range(1..4))),
    }
}

pub fn aggregates_for(engine: Engine) -> Vec<AggregateFunction> {
    use AggregateFunction::*;
    match engine {
        Engine::SumCount => vec![Sum, Count],
        Engine::MaxMin => vec![Max, Min],
        Engine::CDist => vec![CDist],
        Engine::AvgQnt => vec![Avg, Median, Quantile(rat(1, 3)), Quantile(rat(3, 4))],
        Engine::Dup => vec![Dup],
        Engine::Boolean => vec![Max, Min, Avg, CDist, Median, Quantile(rat(2, 3))],
        Engine::BruteForce => vec![Sum, Count, CDist, Max, Min, Avg, Median, Dup],
    }
}

/// An instance that `route` sends to `engine`.
pub fn random_instance<R: Rng>(rng: &mut R, engine: Engine, shape: &DbShape) -> (AggregateQuery, Database) {
    let queries = family_queries();
    let alphas = aggregates_for(engine);
    loop {
        let (q, _) = queries.choose(rng).expect("nonempty");
        let alpha = alphas.choose(rng).expect("nonempty").clone();
        let tau = if engine == Engine::Boolean {
            ValueFunction::Const(int(rng.random_range(1..4)))
        } else {
            random_tau(rng, q)
        };
        let Ok(a) = AggregateQuery::new(alpha, tau, q.clone()) else {
            continue;
        };
        let routed = route(&a).ok();
        if routed == Some(engine) || (engine == Engine::BruteForce && routed.is_none()) {
            let d = random_database(rng, q, shape);
            if d.endo_count() > 0 {
                return (a, d);
            }
        }
    }
}

/// Random database for `Q(x) :- R(x,y), S(y)`.
pub fn random_qxyy_db<R: Rng>(rng: &mut R, max_endo: usize) -> Database {
    let q = parse_cq("Q(x) :- R(x,y), S(y).").expect("well-formed");
    let shape = DbShape {
        max_endo,
        max_total: 14,
        lo: -1,
        hi: 4,
        endo_prob: 0.6,
    };
    loop {
        let d = random_database(rng, &q, &shape);
        if d.endo_count() > 0 {
            return d;
        }
    }
}

/// All-endogenous R(a) facts with distinct a.
pub fn random_single_relation<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Database {
    let mut d = Database::new();
    d.declare("R", 1).expect("fresh");
    let mut pool: Vec<i64> = (lo..hi).collect();
    for _ in 0..n.min(pool.len()) {
        let i = rng.random_range(0..pool.len());
        d.endo(Fact::ints("R", &[pool.swap_remove(i)])).expect("distinct");
    }
    d
}

/// Single relation R(a, b) where τ reads a, so several facts share a value.
pub fn random_single_relation_pairs<R: Rng>(rng: &mut R, n: usize) -> Database {
    let mut d = Database::new();
    d.declare("R", 2).expect("fresh");
    while d.len() < n {
        let f = Fact::ints("R", &[rng.random_range(-2..4), rng.random_range(0..6)]);
        if !d.contains(&f) {
            d.endo(f).expect("fresh");
        }
    }
    d
}
