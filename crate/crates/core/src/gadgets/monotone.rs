//! Rewriting the constants under one head variable by a value table.

use std::collections::{BTreeMap, BTreeSet};

use crate::cq::{ConjunctiveQuery, HeadSlot};
use crate::error::{Error, Result};
use crate::model::{Constant, Database, Fact};

/// Argument positions where the variable at head position `i` (1-based)
/// occurs, per relation.
fn positions(q: &ConjunctiveQuery, i: usize) -> Result<BTreeMap<String, Vec<usize>>> {
    let x = match q.slots.get(i.wrapping_sub(1)) {
        Some(HeadSlot::Var(v)) => v,
        _ => return Err(Error::OutOfRange(format!("head position {i}"))),
    };
    Ok(q.body
        .iter()
        .map(|a| {
            let ps = a.args.iter().enumerate().filter(|(_, t)| t.as_var() == Some(x)).map(|(p, _)| p).collect();
            (a.relation.clone(), ps)
        })
        .collect())
}

/// Applies `gamma` at every position of the head variable x_i and leaves
/// other positions alone.
pub fn monotone_push(d: &Database, q: &ConjunctiveQuery, i: usize, gamma: &BTreeMap<Constant, Constant>) -> Result<Database> {
    let pos = positions(q, i)?;
    let mut domain = BTreeSet::new();
    for (rel, ps) in &pos {
        for (f, _) in d.facts_of(rel) {
            for &p in ps {
                domain.insert(f.tuple[p].clone());
            }
        }
    }
    let mut seen: BTreeMap<&Constant, &Constant> = BTreeMap::new();
    for c in &domain {
        let g = gamma.get(c).ok_or_else(|| Error::Precondition(format!("no value for {c}")))?;
        if let Some(prev) = seen.insert(g, c) {
            return Err(Error::NonInjectiveOnDomain(format!("{prev} and {c}")));
        }
    }
    d.with_facts_mapped(|f| match pos.get(&f.relation) {
        Some(ps) => {
            let mut t = f.tuple.clone();
            for &p in ps {
                t[p] = gamma[&t[p]].clone();
            }
            Fact::new(&f.relation, t)
        }
        None => f.clone(),
    })
}

/// π(f) for a single fact.
pub fn push_fact(f: &Fact, q: &ConjunctiveQuery, i: usize, gamma: &BTreeMap<Constant, Constant>) -> Result<Fact> {
    let pos = positions(q, i)?;
    let mut t = f.tuple.clone();
    for &p in pos.get(&f.relation).into_iter().flatten() {
        t[p] = gamma
            .get(&t[p])
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("no value for {}", t[p])))?;
    }
    Ok(Fact::new(&f.relation, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregates::{value_bag, AggregateFunction, AggregateQuery, ValueFunction};
    use crate::cq::parse_cq;

    fn db() -> Database {
        let mut d = Database::new();
        d.endo(Fact::ints("R", &[1, 5])).unwrap();
        d.endo(Fact::ints("R", &[2, 5])).unwrap();
        d.exo(Fact::ints("S", &[1])).unwrap();
        d.endo(Fact::ints("S", &[2])).unwrap();
        d
    }

    #[test]
    fn identity_table() {
        let q = parse_cq("Q(x) :- R(x,y), S(x).").unwrap();
        let id: BTreeMap<_, _> = (0..10).map(|v| (Constant::int(v), Constant::int(v))).collect();
        assert_eq!(monotone_push(&db(), &q, 1, &id).unwrap(), db());
    }

    #[test]
    fn bags_follow_gamma() {
        let q = parse_cq("Q(x) :- R(x,y), S(x).").unwrap();
        let gamma: BTreeMap<_, _> = [(1, 10), (2, 30)].map(|(a, b)| (Constant::int(a), Constant::int(b))).into();
        let pushed = monotone_push(&db(), &q, 1, &gamma).unwrap();
        assert!(pushed.is_endogenous(&Fact::ints("R", &[30, 5])));
        assert!(pushed.contains(&Fact::ints("S", &[10])));
        let a = AggregateQuery::new(AggregateFunction::Max, ValueFunction::Identity(1), q.clone()).unwrap();
        let bag: Vec<_> = value_bag(&a, &pushed).unwrap().iter().map(|(v, _)| v.clone()).collect();
        assert_eq!(bag, vec![crate::model::int(10), crate::model::int(30)]);
        assert_eq!(push_fact(&Fact::ints("R", &[2, 5]), &q, 1, &gamma).unwrap(), Fact::ints("R", &[30, 5]));
    }

    #[test]
    fn rejects_collisions() {
        let q = parse_cq("Q(x) :- R(x,y), S(x).").unwrap();
        let gamma: BTreeMap<_, _> = [(1, 7), (2, 7)].map(|(a, b)| (Constant::int(a), Constant::int(b))).into();
        assert!(matches!(monotone_push(&db(), &q, 1, &gamma), Err(Error::NonInjectiveOnDomain(_))));
        let short: BTreeMap<_, _> = [(1, 7)].map(|(a, b)| (Constant::int(a), Constant::int(b))).into();
        assert!(matches!(monotone_push(&db(), &q, 1, &short), Err(Error::Precondition(_))));
    }
}
