//! Chooses an engine from the aggregate function and the class of the query.

use std::fmt;

use crate::aggregates::{AggregateFunction, AggregateQuery, ValueFunction};
use crate::cq::{HeadSlot, HierarchyClass};
use crate::engine::{avgqnt, boolean, dup, maxmin};
use crate::error::{Error, Result};
use crate::model::{Database, Fact, Rational};
use crate::shapley::bruteforce::{default_cap, Game};
use crate::shapley::Score;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    BruteForce,
    Boolean,
    SumCount,
    MaxMin,
    CDist,
    AvgQnt,
    Dup,
}

impl Engine {
    pub fn tag(self) -> &'static str {
        match self {
            Engine::BruteForce => "bruteforce",
            Engine::Boolean => "boolean",
            Engine::SumCount => "sumcount",
            Engine::MaxMin => "maxmin",
            Engine::CDist => "cdist",
            Engine::AvgQnt => "avgqnt",
            Engine::Dup => "dup",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub allow_bruteforce: bool,
    pub cap: usize,
    pub score: Score,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            allow_bruteforce: true,
            cap: default_cap(),
            score: Score::Shapley,
        }
    }
}

/// τ is the same for every answer.
pub fn tau_is_constant(a: &AggregateQuery) -> bool {
    match &a.tau {
        ValueFunction::Const(_) => true,
        t => matches!(
            t.position().and_then(|i| a.query.slots.get(i - 1)),
            Some(HeadSlot::Fixed(_))
        ),
    }
}

/// The class a tractable engine needs for this aggregate.
pub fn required_class(a: &AggregateQuery) -> (HierarchyClass, Engine) {
    use AggregateFunction::*;
    let constant = tau_is_constant(a);
    match a.alpha {
        Sum | Count => (HierarchyClass::ExistsHierarchical, Engine::SumCount),
        Max | Min | Avg | Quantile(_) | Median if constant => (HierarchyClass::AllHierarchical, Engine::Boolean),
        CDist if constant => (HierarchyClass::AllHierarchical, Engine::Boolean),
        Max | Min => (HierarchyClass::AllHierarchical, Engine::MaxMin),
        CDist => (HierarchyClass::AllHierarchical, Engine::CDist),
        Avg | Quantile(_) | Median => (HierarchyClass::QHierarchical, Engine::AvgQnt),
        Dup => (HierarchyClass::SQHierarchical, Engine::Dup),
    }
}

/// The tractable engine for `a`, or the reason there is none.
pub fn route(a: &AggregateQuery) -> Result<Engine> {
    if let Some(r) = a.query.self_join() {
        return Err(Error::SelfJoin(r));
    }
    let (need, engine) = required_class(a);
    if a.query.classify() >= need {
        Ok(engine)
    } else {
        Err(Error::IntractableClass(format!("{} required", need.label())))
    }
}

pub fn run_engine(engine: Engine, a: &AggregateQuery, d: &Database, f: &Fact, opts: &Options) -> Result<Rational> {
    let score = opts.score;
    match engine {
        Engine::BruteForce => {
            if !d.is_endogenous(f) {
                return Err(Error::FactNotEndogenous(f.to_string()));
            }
            let game = Game::new(a, d, opts.cap)?;
            let i = game.index_of(f).expect("endogenous fact is a player");
            Ok(game.score(i, score))
        }
        Engine::Boolean => boolean::constant_tau_score(a, d, f, score),
        Engine::SumCount => boolean::sumcount_score(a, d, f, score),
        Engine::MaxMin => maxmin::maxmin_score(a, d, f, score),
        Engine::CDist => boolean::cdist_score(a, d, f, score),
        Engine::AvgQnt => avgqnt::avgqnt_score(a, d, f, score),
        Engine::Dup => dup::dup_score(a, d, f, score),
    }
}

pub fn dispatch(a: &AggregateQuery, d: &Database, f: &Fact, opts: &Options) -> Result<(Rational, Engine)> {
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    let engine = match route(a) {
        Ok(e) => e,
        Err(Error::SelfJoin(_) | Error::IntractableClass(_)) if opts.allow_bruteforce => Engine::BruteForce,
        Err(e) => return Err(e),
    };
    Ok((run_engine(engine, a, d, f, opts)?, engine))
}

pub fn dispatch_shapley(a: &AggregateQuery, d: &Database, f: &Fact, allow_bruteforce: bool) -> Result<(Rational, Engine)> {
    let opts = Options {
        allow_bruteforce,
        ..Options::default()
    };
    dispatch(a, d, f, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cq::parse_cq;

    fn aq(alpha: AggregateFunction, q: &str) -> AggregateQuery {
        AggregateQuery::new(alpha, ValueFunction::Identity(1), parse_cq(q).unwrap()).unwrap()
    }

    #[test]
    fn routing() {
        let qxyy = "Q(x) :- R(x,y), S(y).";
        assert!(matches!(route(&aq(AggregateFunction::Avg, qxyy)), Err(Error::IntractableClass(m)) if m == "q-hierarchical required"));
        assert_eq!(route(&aq(AggregateFunction::Max, qxyy)).unwrap(), Engine::MaxMin);
        assert!(route(&aq(AggregateFunction::Dup, "Q(x,y) :- R(x,y), S(x).")).is_err());
        assert_eq!(route(&aq(AggregateFunction::Sum, qxyy)).unwrap(), Engine::SumCount);
        let hard = AggregateQuery::new(
            AggregateFunction::Count,
            ValueFunction::Const(crate::model::int(1)),
            parse_cq("Q() :- R(x), S(x,y), T(y).").unwrap(),
        )
        .unwrap();
        assert!(matches!(route(&hard), Err(Error::IntractableClass(_))));
        assert!(matches!(route(&aq(AggregateFunction::Max, "Q(x) :- R(x,y), R(y,x).")), Err(Error::SelfJoin(_))));
    }
}
