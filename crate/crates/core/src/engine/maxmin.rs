//! Max and Min over all-hierarchical queries. Min runs the Max tables on
//! negated values.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::aggregates::{check_schema, tau_on_substituted, AggregateFunction, AggregateQuery, ValueFunction};
use crate::combinatorics::{binomial, binomial_row, convolve, pad_free};
use crate::cq::{parse_cq, ConjunctiveQuery};
use crate::engine::boolean::{add, ground_atoms_present, EmptyCounts, Emptiness};
use crate::error::{Error, Result};
use crate::model::{Database, Fact, Rational};
use crate::shapley::dp::{self, DpPlugin, UnionKind};
use crate::shapley::{score_by_sumk, shapley_coefficient, Score, SumKVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxTable {
    /// Counts per maximum value, with `bottom` for subsets without answers.
    WithValue {
        n: usize,
        bottom: Vec<BigInt>,
        rows: BTreeMap<Rational, Vec<BigInt>>,
    },
    /// The component does not carry τ.
    Plain(EmptyCounts),
}

impl MaxTable {
    pub fn n(&self) -> usize {
        match self {
            MaxTable::WithValue { n, .. } => *n,
            MaxTable::Plain(e) => e.n,
        }
    }

    /// Σ_a a·T(a,k).
    pub fn sumk(&self, negate: bool) -> Result<SumKVector> {
        let MaxTable::WithValue { n, rows, .. } = self else {
            return Err(Error::VariantMismatch);
        };
        let mut out = vec![Rational::zero(); n + 1];
        for (a, row) in rows {
            let a = if negate { -a } else { a.clone() };
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out[k] += &a * Rational::from_integer(c.clone());
                }
            }
        }
        Ok(SumKVector(out))
    }
}

fn extend(v: &mut Vec<BigInt>, len: usize) {
    if v.len() < len {
        v.resize(len, BigInt::zero());
    }
}

pub struct MaxPlugin {
    pub negate: bool,
}

impl DpPlugin for MaxPlugin {
    type Table = MaxTable;

    fn base_case(&self, q: &ConjunctiveQuery, tau: Option<&ValueFunction>, d: &Database) -> Result<MaxTable> {
        let r = d.endo_count();
        let present = ground_atoms_present(q, d);
        let mut none = binomial_row(r);
        let Some(tau) = tau else {
            if present {
                none[r] -= 1;
            }
            return Ok(MaxTable::Plain(EmptyCounts { n: r, p0: none }));
        };
        let ValueFunction::Const(c) = tau else {
            return Err(Error::VariantMismatch);
        };
        let mut rows = BTreeMap::new();
        if present {
            none[r] -= 1;
            let mut row = vec![BigInt::zero(); r + 1];
            row[r] = BigInt::from(1);
            rows.insert(if self.negate { -c } else { c.clone() }, row);
        }
        Ok(MaxTable::WithValue { n: r, bottom: none, rows })
    }

    fn empty(&self, _: &ConjunctiveQuery, tau: Option<&ValueFunction>) -> MaxTable {
        let one = vec![BigInt::from(1)];
        match tau {
            Some(_) => MaxTable::WithValue {
                n: 0,
                bottom: one,
                rows: BTreeMap::new(),
            },
            None => MaxTable::Plain(EmptyCounts { n: 0, p0: one }),
        }
    }

    fn combine_union(&self, q: &ConjunctiveQuery, kind: UnionKind, a: MaxTable, b: &MaxTable) -> Result<MaxTable> {
        match (a, b) {
            (MaxTable::Plain(x), MaxTable::Plain(y)) => {
                Ok(MaxTable::Plain(Emptiness.combine_union(q, kind, x, y)?))
            }
            (
                MaxTable::WithValue { n: n1, bottom: b1, rows: r1 },
                MaxTable::WithValue { n: n2, bottom: b2, rows: r2 },
            ) => {
                let n = n1 + n2;
                let mut keys: Vec<&Rational> = r1.keys().chain(r2.keys()).collect();
                keys.sort();
                keys.dedup();
                let zero1 = vec![BigInt::zero(); n1 + 1];
                let zero2 = vec![BigInt::zero(); n2 + 1];
                // cumulative counts with max below the current key
                let mut below1 = b1.clone();
                let mut below2 = b2.clone();
                let mut rows = BTreeMap::new();
                for a in keys {
                    let t1 = r1.get(a).unwrap_or(&zero1);
                    let t2 = r2.get(a).unwrap_or(&zero2);
                    let upto2 = add(&below2, t2);
                    let row = add(&convolve(t1, &upto2), &convolve(&below1, t2));
                    below1 = add(&below1, t1);
                    below2 = upto2;
                    if row.iter().any(|c| !c.is_zero()) {
                        rows.insert(a.clone(), row);
                    }
                }
                let mut bottom = convolve(&b1, b2);
                extend(&mut bottom, n + 1);
                Ok(MaxTable::WithValue { n, bottom, rows })
            }
            _ => Err(Error::VariantMismatch),
        }
    }

    fn combine_cross(&self, a: MaxTable, b: &MaxTable) -> Result<MaxTable> {
        match (a, b) {
            (MaxTable::Plain(x), MaxTable::Plain(y)) => Ok(MaxTable::Plain(Emptiness.combine_cross(x, y)?)),
            (MaxTable::WithValue { n: n1, rows: r1, .. }, MaxTable::Plain(y)) => {
                let n = n1 + y.n;
                let ne = y.nonempty();
                let mut bottom = binomial_row(n);
                let mut rows = BTreeMap::new();
                for (a, t1) in r1 {
                    let mut row = convolve(&t1, &ne);
                    extend(&mut row, n + 1);
                    for (bk, c) in bottom.iter_mut().zip(&row) {
                        *bk -= c;
                    }
                    if row.iter().any(|c| !c.is_zero()) {
                        rows.insert(a, row);
                    }
                }
                Ok(MaxTable::WithValue { n, bottom, rows })
            }
            (x @ MaxTable::Plain(_), y @ MaxTable::WithValue { .. }) => self.combine_cross(y.clone(), &x),
            _ => Err(Error::VariantMismatch),
        }
    }

    fn pad_free(&self, t: MaxTable, m: usize) -> MaxTable {
        if m == 0 {
            return t;
        }
        match t {
            MaxTable::Plain(e) => MaxTable::Plain(Emptiness.pad_free(e, m)),
            MaxTable::WithValue { n, bottom, rows } => MaxTable::WithValue {
                n: n + m,
                bottom: pad_free(&bottom, m),
                rows: rows.into_iter().map(|(a, r)| (a, pad_free(&r, m))).collect(),
            },
        }
    }
}

fn check(a: &AggregateQuery, d: &Database) -> Result<bool> {
    check_schema(&a.query, d)?;
    match a.alpha {
        AggregateFunction::Max => Ok(false),
        AggregateFunction::Min => Ok(true),
        _ => Err(Error::EngineNotApplicable("maxmin".into(), a.alpha.to_string())),
    }
}

/// The table of the whole query over `d`.
pub fn max_table(a: &AggregateQuery, d: &Database) -> Result<MaxTable> {
    let negate = check(a, d)?;
    let tau = tau_on_substituted(&a.tau, &a.query)?;
    dp::run(&MaxPlugin { negate }, &a.query, Some(&tau), d)
}

pub fn sumk_maxmin(a: &AggregateQuery, d: &Database) -> Result<SumKVector> {
    let negate = check(a, d)?;
    max_table(a, d)?.sumk(negate)
}

pub fn maxmin_score(a: &AggregateQuery, d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    check(a, d)?;
    score_by_sumk(score, d, f, |db| sumk_maxmin(a, db))
}

/// Max over a single all-endogenous relation, in closed form.
pub fn max_single_relation_closed(d: &Database, tau: &ValueFunction, t: &Fact) -> Result<Rational> {
    let facts: Vec<&Fact> = d.facts().map(|(f, _)| f).collect();
    let single = facts.iter().all(|f| f.relation == t.relation)
        && d.facts().all(|(_, p)| p == crate::model::Provenance::Endogenous);
    if !single || !d.contains(t) {
        return Err(Error::Precondition(
            "all facts endogenous and of the relation of t".into(),
        ));
    }
    let n = facts.len();
    let values = facts
        .iter()
        .map(|f| tau.eval(&f.tuple))
        .collect::<Result<Vec<_>>>()?;
    let vt = tau.eval(&t.tuple)?;
    let mut total = &vt / Rational::from_integer(BigInt::from(n));
    let mut below: Vec<&Rational> = values.iter().filter(|v| **v < vt).collect();
    below.sort();
    below.dedup();
    for a in below {
        let le = values.iter().filter(|v| *v <= a).count();
        let lt = values.iter().filter(|v| *v < a).count();
        let mut s = Rational::zero();
        for k in 1..n {
            let diff = binomial(le, k) - binomial(lt, k);
            if !diff.is_zero() {
                s += shapley_coefficient(k, n)? * Rational::from_integer(diff);
            }
        }
        total += (&vt - a) * s;
    }
    Ok(total)
}

/// The query `Q(x⃗) :- R(x⃗)` over one relation of the given arity.
pub fn single_relation_query(relation: &str, arity: usize) -> ConjunctiveQuery {
    let vars: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    parse_cq(&format!("Q({0}) :- {relation}({0}).", vars.join(","))).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, rat};

    fn two() -> Database {
        let mut d = Database::new();
        d.endo(Fact::ints("R", &[1])).unwrap();
        d.endo(Fact::ints("R", &[2])).unwrap();
        d
    }

    #[test]
    fn table_example() {
        let q = parse_cq("Q(x) :- R(x).").unwrap();
        let a = AggregateQuery::new(AggregateFunction::Max, ValueFunction::Identity(1), q).unwrap();
        let MaxTable::WithValue { bottom, rows, .. } = max_table(&a, &two()).unwrap() else {
            panic!("expected a valued table");
        };
        assert_eq!(bottom, [1, 0, 0].map(BigInt::from).to_vec());
        assert_eq!(rows[&int(1)], [0, 1, 0].map(BigInt::from).to_vec());
        assert_eq!(rows[&int(2)], [0, 1, 1].map(BigInt::from).to_vec());
    }

    #[test]
    fn two_fact_values() {
        let q = parse_cq("Q(x) :- R(x).").unwrap();
        let mut a = AggregateQuery::new(AggregateFunction::Max, ValueFunction::Identity(1), q).unwrap();
        let d = two();
        assert_eq!(maxmin_score(&a, &d, &Fact::ints("R", &[2]), Score::Shapley).unwrap(), rat(3, 2));
        assert_eq!(maxmin_score(&a, &d, &Fact::ints("R", &[1]), Score::Shapley).unwrap(), rat(1, 2));
        a.alpha = AggregateFunction::Min;
        assert_eq!(maxmin_score(&a, &d, &Fact::ints("R", &[1]), Score::Shapley).unwrap(), int(0));
        assert_eq!(maxmin_score(&a, &d, &Fact::ints("R", &[2]), Score::Shapley).unwrap(), int(1));
        let closed = max_single_relation_closed(&d, &ValueFunction::Identity(1), &Fact::ints("R", &[2])).unwrap();
        assert_eq!(closed, rat(3, 2));
    }
}
