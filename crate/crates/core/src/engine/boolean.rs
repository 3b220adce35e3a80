//! Hierarchical Boolean queries and the aggregates that reduce to them:
//! Sum and Count per answer, CDist per value, and constant value functions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::aggregates::{aggregate_sorted, check_schema, AggregateFunction, AggregateQuery, ValueFunction};
use crate::combinatorics::{binomial_row, convolve, pad_free};
use crate::cq::{ConjunctiveQuery, HierarchyClass};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{Constant, Database, Fact, Provenance, Rational};
use crate::shapley::dp::{self, DpPlugin, UnionKind};
use crate::shapley::{score_by_sumk, Score, SumKVector};

/// For each k, how many k-subsets of the endogenous facts leave the query
/// without answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyCounts {
    pub n: usize,
    pub p0: Vec<BigInt>,
}

impl EmptyCounts {
    /// Counts of k-subsets that do produce an answer.
    pub fn nonempty(&self) -> Vec<BigInt> {
        binomial_row(self.n)
            .into_iter()
            .zip(&self.p0)
            .map(|(c, z)| c - z)
            .collect()
    }
}

pub(crate) fn ground_atoms_present(q: &ConjunctiveQuery, d: &Database) -> bool {
    let none = BTreeMap::new();
    q.body
        .iter()
        .all(|a| a.ground(&none).is_some_and(|f| d.contains(&f)))
}

/// P0 over the generic recursion.
pub struct Emptiness;

impl DpPlugin for Emptiness {
    type Table = EmptyCounts;

    fn base_case(&self, q: &ConjunctiveQuery, _: Option<&ValueFunction>, d: &Database) -> Result<EmptyCounts> {
        let r = d.endo_count();
        let mut p0 = binomial_row(r);
        if ground_atoms_present(q, d) {
            p0[r] -= 1;
        }
        Ok(EmptyCounts { n: r, p0 })
    }

    fn empty(&self, _: &ConjunctiveQuery, _: Option<&ValueFunction>) -> EmptyCounts {
        EmptyCounts {
            n: 0,
            p0: vec![BigInt::from(1)],
        }
    }

    fn combine_union(&self, _: &ConjunctiveQuery, _: UnionKind, a: EmptyCounts, b: &EmptyCounts) -> Result<EmptyCounts> {
        Ok(EmptyCounts {
            n: a.n + b.n,
            p0: convolve(&a.p0, &b.p0),
        })
    }

    fn combine_cross(&self, a: EmptyCounts, b: &EmptyCounts) -> Result<EmptyCounts> {
        let ne = convolve(&a.nonempty(), &b.nonempty());
        let n = a.n + b.n;
        let p0 = binomial_row(n).into_iter().zip(ne).map(|(c, x)| c - x).collect();
        Ok(EmptyCounts { n, p0 })
    }

    fn pad_free(&self, t: EmptyCounts, m: usize) -> EmptyCounts {
        EmptyCounts {
            n: t.n + m,
            p0: pad_free(&t.p0, m),
        }
    }
}

/// P0 together with P1, the counts of k-subsets giving exactly one answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyOneCounts {
    pub n: usize,
    pub p0: Vec<BigInt>,
    pub p1: Vec<BigInt>,
}

pub struct EmptyOrOne;

impl DpPlugin for EmptyOrOne {
    type Table = EmptyOneCounts;

    fn base_case(&self, q: &ConjunctiveQuery, _: Option<&ValueFunction>, d: &Database) -> Result<EmptyOneCounts> {
        let r = d.endo_count();
        let mut p0 = binomial_row(r);
        let mut p1 = vec![BigInt::zero(); r + 1];
        if ground_atoms_present(q, d) {
            p0[r] -= 1;
            p1[r] += 1;
        }
        Ok(EmptyOneCounts { n: r, p0, p1 })
    }

    fn empty(&self, _: &ConjunctiveQuery, _: Option<&ValueFunction>) -> EmptyOneCounts {
        EmptyOneCounts {
            n: 0,
            p0: vec![BigInt::from(1)],
            p1: vec![BigInt::zero()],
        }
    }

    fn combine_union(
        &self,
        q: &ConjunctiveQuery,
        kind: UnionKind,
        a: EmptyOneCounts,
        b: &EmptyOneCounts,
    ) -> Result<EmptyOneCounts> {
        let n = a.n + b.n;
        let p0 = convolve(&a.p0, &b.p0);
        let p1 = match kind {
            UnionKind::Disjoint => add(&convolve(&a.p1, &b.p0), &convolve(&a.p0, &b.p1)),
            UnionKind::Overlapping if q.is_boolean() => {
                binomial_row(n).into_iter().zip(&p0).map(|(c, z)| c - z).collect()
            }
            UnionKind::Overlapping => return Err(Error::NotQHierarchical),
        };
        Ok(EmptyOneCounts { n, p0, p1 })
    }

    fn combine_cross(&self, a: EmptyOneCounts, b: &EmptyOneCounts) -> Result<EmptyOneCounts> {
        let e = Emptiness.combine_cross(
            EmptyCounts { n: a.n, p0: a.p0 },
            &EmptyCounts { n: b.n, p0: b.p0.clone() },
        )?;
        Ok(EmptyOneCounts {
            n: e.n,
            p0: e.p0,
            p1: convolve(&a.p1, &b.p1),
        })
    }

    fn pad_free(&self, t: EmptyOneCounts, m: usize) -> EmptyOneCounts {
        EmptyOneCounts {
            n: t.n + m,
            p0: pad_free(&t.p0, m),
            p1: pad_free(&t.p1, m),
        }
    }
}

pub(crate) fn add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

pub fn empty_one_counts(q: &ConjunctiveQuery, d: &Database) -> Result<EmptyOneCounts> {
    check_schema(q, d)?;
    if q.classify() < HierarchyClass::QHierarchical && !q.is_boolean() {
        return Err(Error::NotQHierarchical);
    }
    dp::run(&EmptyOrOne, q, None, d)
}

pub fn empty_counts(q: &ConjunctiveQuery, d: &Database) -> Result<EmptyCounts> {
    check_schema(q, d)?;
    dp::run(&Emptiness, q, None, d)
}

/// sum_k of the game "Q has an answer".
pub fn sumk_boolean(q: &ConjunctiveQuery, d: &Database) -> Result<SumKVector> {
    Ok(SumKVector::from_counts(&empty_counts(q, d)?.nonempty()))
}

pub fn boolean_score(q: &ConjunctiveQuery, d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    score_by_sumk(score, d, f, |db| sumk_boolean(q, db))
}

pub fn boolean_shapley(q: &ConjunctiveQuery, d: &Database, f: &Fact) -> Result<Rational> {
    boolean_score(q, d, f, Score::Shapley)
}

/// Score of f in the game "t ∈ Q(D)", t over the current head.
pub fn membership_score(q: &ConjunctiveQuery, t: &[Constant], d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    boolean_score(&q.ground_head(t)?, d, f, score)
}

/// Answers in which f takes part, keyed by the current head with the tuple
/// over the original head as value.
fn answers_using(q: &ConjunctiveQuery, d: &Database, f: &Fact) -> BTreeMap<Vec<Constant>, Vec<Constant>> {
    let mut out = BTreeMap::new();
    q.for_each_homomorphism(d, |b, image| {
        if image.iter().any(|(g, _)| *g == f) {
            let full = q
                .full_tuple(b)
                .into_iter()
                .map(|c| c.unwrap_or_else(|| Constant::int(0)))
                .collect();
            out.insert(q.head_tuple(b), full);
        }
    });
    out
}

/// Sum and Count: linear in the answers.
pub fn sumcount_score(a: &AggregateQuery, d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    check_schema(&a.query, d)?;
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    if let Some(r) = a.query.self_join() {
        return Err(Error::SelfJoin(r));
    }
    if a.query.classify() < HierarchyClass::ExistsHierarchical {
        return Err(Error::NotExistsHierarchical);
    }
    let count = match a.alpha {
        AggregateFunction::Count => true,
        AggregateFunction::Sum => false,
        _ => return Err(Error::EngineNotApplicable("sumcount".into(), a.alpha.to_string())),
    };
    let answers: Vec<_> = answers_using(&a.query, d, f).into_iter().collect();
    let parts = exec::map(&answers, |(head, full)| -> Result<Rational> {
        let w = if count { Rational::from(BigInt::from(1)) } else { a.tau.eval(full)? };
        if w.is_zero() {
            return Ok(w);
        }
        Ok(w * membership_score(&a.query, head, d, f, score)?)
    });
    parts.into_iter().try_fold(Rational::zero(), |acc, p| Ok(acc + p?))
}

/// CDist as a sum over values a of the game "some answer has value a".
pub fn cdist_score(a: &AggregateQuery, d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    check_schema(&a.query, d)?;
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    if a.alpha != AggregateFunction::CDist {
        return Err(Error::EngineNotApplicable("cdist".into(), a.alpha.to_string()));
    }
    let q = &a.query;
    if a.tau.is_constant() || a.tau.variable(q).is_none() {
        return constant_tau_score(a, d, f, score);
    }
    let x = a.tau.variable(q).unwrap().to_string();
    let qb = q.boolean();
    let atom = q.body.iter().find(|at| at.has_var(&x)).expect("head variable occurs in the body");
    let col = atom.args.iter().position(|t| t.as_var() == Some(x.as_str())).unwrap();
    let mut values = BTreeSet::new();
    for (g, _) in d.facts_of(&atom.relation) {
        if atom.matches(g) {
            values.insert(a.tau.apply(&g.tuple[col])?);
        }
    }
    let values: Vec<Rational> = values.into_iter().collect();
    let parts = exec::map(&values, |v| -> Result<Rational> {
        let mut bad = None;
        let da = d.filter(|g, _| {
            if g.relation != atom.relation {
                return true;
            }
            match a.tau.apply(&g.tuple[col]) {
                Ok(w) => &w == v,
                Err(e) => {
                    bad = Some(e);
                    false
                }
            }
        });
        if let Some(e) = bad {
            return Err(e);
        }
        if !da.is_endogenous(f) {
            return Ok(Rational::zero());
        }
        boolean_score(&qb, &da, f, score)
    });
    parts.into_iter().try_fold(Rational::zero(), |acc, p| Ok(acc + p?))
}

/// CDist over a single all-endogenous relation: one over the number of
/// facts sharing t's value.
pub fn cdist_single_relation_closed(d: &Database, tau: &ValueFunction, t: &Fact) -> Result<Rational> {
    let single = d.facts().all(|(f, p)| f.relation == t.relation && p == Provenance::Endogenous);
    if !single || !d.contains(t) {
        return Err(Error::Precondition("all facts endogenous and of the relation of t".into()));
    }
    let v = tau.eval(&t.tuple)?;
    let mut same = 0i64;
    for (f, _) in d.facts() {
        if tau.eval(&f.tuple)? == v {
            same += 1;
        }
    }
    Ok(Rational::new(BigInt::from(1), BigInt::from(same)))
}

/// α({c}) times the score of the Boolean query, for a constant τ ≡ c.
pub fn constant_tau_score(a: &AggregateQuery, d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    check_schema(&a.query, d)?;
    let c = match &a.tau {
        ValueFunction::Const(c) => c.clone(),
        other => match other.position().and_then(|i| a.query.slots.get(i - 1)) {
            Some(crate::cq::HeadSlot::Fixed(v)) => other.apply(v)?,
            _ => return Err(Error::EngineNotApplicable("boolean".into(), format!("τ = {other}"))),
        },
    };
    match a.alpha {
        AggregateFunction::Sum | AggregateFunction::Count | AggregateFunction::Dup => {
            return Err(Error::EngineNotApplicable("boolean".into(), a.alpha.to_string()))
        }
        _ => {}
    }
    let value = aggregate_sorted(&a.alpha, &[&c]);
    if value.is_zero() {
        if !d.is_endogenous(f) {
            return Err(Error::FactNotEndogenous(f.to_string()));
        }
        return Ok(value);
    }
    Ok(value * boolean_score(&a.query.boolean(), d, f, score)?)
}
