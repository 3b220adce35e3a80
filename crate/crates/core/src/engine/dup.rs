//! Has-duplicates over sq-hierarchical queries.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::aggregates::{check_schema, AggregateFunction, AggregateQuery, ValueFunction};
use crate::combinatorics::{binomial_row, convolve, pad_free};
use crate::cq::{ConjunctiveQuery, HeadSlot, HierarchyClass};
use crate::engine::boolean::{add, empty_counts, empty_one_counts, EmptyOneCounts};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{Constant, Database, Fact, Rational};
use crate::shapley::{score_by_sumk, Score, SumKVector};

/// Facts grouped by the value of the answer they take part in, in
/// ascending value order, and the facts that take part in no answer.
pub fn afact_partition(
    q: &ConjunctiveQuery,
    d: &Database,
    tau: &ValueFunction,
) -> Result<(Vec<(Rational, Database)>, Database)> {
    if !q.is_connected() {
        return Err(Error::NotConnectedSQ);
    }
    let free = q.free_vars();
    if q.body.iter().any(|a| free.iter().any(|v| !a.has_var(v))) {
        return Err(Error::NotConnectedSQ);
    }
    let mut owner: BTreeMap<Fact, Vec<Constant>> = BTreeMap::new();
    q.for_each_homomorphism(d, |b, image| {
        let t: Vec<Constant> = q
            .full_tuple(b)
            .into_iter()
            .map(|c| c.unwrap_or_else(|| Constant::int(0)))
            .collect();
        for (f, _) in image {
            owner.entry((*f).clone()).or_insert_with(|| t.clone());
        }
    });
    let mut value_of: BTreeMap<Fact, Rational> = BTreeMap::new();
    for (f, t) in owner {
        value_of.insert(f, tau.eval(&t)?);
    }
    let mut groups: BTreeMap<Rational, Database> = BTreeMap::new();
    for v in value_of.values() {
        groups.entry(v.clone()).or_insert_with(|| d.filter(|f, _| value_of.get(f) == Some(v)));
    }
    let residual = d.filter(|f, _| !value_of.contains_key(f));
    Ok((groups.into_iter().collect(), residual))
}

/// Number of k-subsets whose value bag has no repeated value, for a
/// connected query.
pub fn sumk_nodup_connected(q: &ConjunctiveQuery, d: &Database, tau: &ValueFunction) -> Result<Vec<BigInt>> {
    let (groups, residual) = afact_partition(q, d, tau)?;
    let tables = exec::map(&groups, |(_, di)| -> Result<Vec<BigInt>> {
        let t = empty_one_counts(q, di)?;
        Ok(add(&t.p0, &t.p1))
    });
    let mut acc = vec![BigInt::from(1)];
    for t in tables {
        acc = convolve(&acc, &t?);
    }
    Ok(pad_free(&acc, residual.endo_count()))
}

fn complement(n: usize, v: &[BigInt]) -> Vec<BigInt> {
    binomial_row(n).into_iter().zip(v).map(|(c, x)| c - x).collect()
}

fn check(a: &AggregateQuery, d: &Database) -> Result<()> {
    check_schema(&a.query, d)?;
    if a.alpha != AggregateFunction::Dup {
        return Err(Error::EngineNotApplicable("dup".into(), a.alpha.to_string()));
    }
    if let Some(r) = a.query.self_join() {
        return Err(Error::SelfJoin(r));
    }
    if a.query.classify() < HierarchyClass::SQHierarchical {
        return Err(Error::NotSQHierarchical);
    }
    Ok(())
}

pub fn sumk_dup(a: &AggregateQuery, d: &Database) -> Result<SumKVector> {
    check(a, d)?;
    let q = &a.query;
    let n = d.endo_count();
    let mut comps = q.connected_components();
    if comps.len() <= 1 {
        let nodup = sumk_nodup_connected(q, d, &a.tau)?;
        return Ok(SumKVector::from_counts(&complement(n, &nodup)));
    }
    let carrier = match a.tau.variable(q) {
        Some(v) => comps.iter().position(|c| c.has_var(v)).unwrap_or(0),
        None => 0,
    };
    let q1 = comps.remove(carrier);
    let body: Vec<_> = comps.into_iter().flat_map(|c| c.body).collect();
    let slots = q
        .slots
        .iter()
        .map(|s| match s {
            HeadSlot::Var(v) if !body.iter().any(|at| at.has_var(v)) => HeadSlot::Elsewhere(v.clone()),
            other => other.clone(),
        })
        .collect();
    let q2 = ConjunctiveQuery {
        name: q.name.clone(),
        slots,
        body,
    };
    let in_q = |c: &ConjunctiveQuery| {
        let rels = c.relations();
        d.filter(move |f, _| rels.contains(&f.relation))
    };
    let d1 = in_q(&q1);
    let d2 = in_q(&q2);
    let residual = n - d1.endo_count() - d2.endo_count();
    let n1 = d1.endo_count();
    let n2 = d2.endo_count();

    let nonempty1 = empty_counts(&q1, &d1)?.nonempty();
    let dup1 = complement(n1, &sumk_nodup_connected(&q1, &d1, &a.tau)?);
    let t2: EmptyOneCounts = empty_one_counts(&q2, &d2)?;
    let many2 = complement(n2, &add(&t2.p0, &t2.p1));
    let out = add(&convolve(&nonempty1, &many2), &convolve(&dup1, &t2.p1));
    Ok(SumKVector::from_counts(&pad_free(&out, residual)))
}

pub fn dup_score(a: &AggregateQuery, d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    check(a, d)?;
    score_by_sumk(score, d, f, |db| sumk_dup(a, db))
}
