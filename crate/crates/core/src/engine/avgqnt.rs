//! Avg, Median and quantiles over q-hierarchical queries. For every value
//! a of the answers, one pass of the recursion counts k-subsets by how many
//! answers fall below, at and above a.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::aggregates::{
    check_schema, full_answers, quantile_indices, tau_on_substituted, AggregateFunction, AggregateQuery,
    ValueFunction,
};
use crate::combinatorics::{binomial_row, harmonic};
use crate::cq::{ConjunctiveQuery, HierarchyClass};
use crate::engine::boolean::ground_atoms_present;
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{Database, Fact, Provenance, Rational};
use crate::shapley::dp::{self, DpPlugin, UnionKind};
use crate::shapley::{score_by_sumk, Score, SumKVector};

/// Answer counts below, at and above the threshold. Avg keeps "not equal"
/// in the first slot. Tables without τ keep the answer count in the first
/// slot.
pub type Counts = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub n: usize,
    pub valued: bool,
    pub map: HashMap<(usize, Counts), BigInt>,
}

impl CountTable {
    fn single(n: usize, valued: bool, map: HashMap<(usize, Counts), BigInt>) -> Self {
        CountTable { n, valued, map }
    }

    /// Σ over ℓ of the entries at k, one number per k.
    pub fn totals(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.n + 1];
        for ((k, _), c) in &self.map {
            out[*k] += c;
        }
        out
    }
}

fn combine<F>(a: &CountTable, b: &CountTable, valued: bool, mut op: F) -> CountTable
where
    F: FnMut(Counts, Counts) -> Counts,
{
    let mut map: HashMap<(usize, Counts), BigInt> = HashMap::new();
    for ((k1, l1), c1) in &a.map {
        for ((k2, l2), c2) in &b.map {
            *map.entry((k1 + k2, op(*l1, *l2))).or_insert_with(BigInt::zero) += c1 * c2;
        }
    }
    CountTable::single(a.n + b.n, valued, map)
}

pub struct ThresholdPlugin {
    pub threshold: Rational,
    pub avg: bool,
}

impl ThresholdPlugin {
    fn slot(&self, c: &Rational) -> usize {
        match c.cmp(&self.threshold) {
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Greater if self.avg => 0,
            std::cmp::Ordering::Greater => 2,
        }
    }
}

impl DpPlugin for ThresholdPlugin {
    type Table = CountTable;

    fn base_case(&self, q: &ConjunctiveQuery, tau: Option<&ValueFunction>, d: &Database) -> Result<CountTable> {
        let r = d.endo_count();
        let present = ground_atoms_present(q, d);
        let slot = match tau {
            None => 0,
            Some(ValueFunction::Const(c)) => self.slot(c),
            Some(_) => return Err(Error::VariantMismatch),
        };
        let mut map = HashMap::new();
        for (k, c) in binomial_row(r).into_iter().enumerate() {
            let c = if present && k == r { c - 1 } else { c };
            if !c.is_zero() {
                map.insert((k, [0; 3]), c);
            }
        }
        if present {
            let mut l = [0; 3];
            l[slot] = 1;
            map.insert((r, l), BigInt::from(1));
        }
        Ok(CountTable::single(r, tau.is_some(), map))
    }

    fn empty(&self, _: &ConjunctiveQuery, tau: Option<&ValueFunction>) -> CountTable {
        CountTable::single(0, tau.is_some(), HashMap::from([((0, [0; 3]), BigInt::from(1))]))
    }

    fn combine_union(&self, q: &ConjunctiveQuery, kind: UnionKind, a: CountTable, b: &CountTable) -> Result<CountTable> {
        if a.valued != b.valued {
            return Err(Error::VariantMismatch);
        }
        match kind {
            UnionKind::Disjoint => Ok(combine(&a, b, a.valued, |x, y| [x[0] + y[0], x[1] + y[1], x[2] + y[2]])),
            UnionKind::Overlapping if q.is_boolean() => {
                Ok(combine(&a, b, a.valued, |x, y| if x == [0; 3] { y } else { x }))
            }
            UnionKind::Overlapping => Err(Error::NotQHierarchical),
        }
    }

    fn combine_cross(&self, a: CountTable, b: &CountTable) -> Result<CountTable> {
        match (a.valued, b.valued) {
            (true, true) => Err(Error::VariantMismatch),
            (false, true) => self.combine_cross(b.clone(), &a),
            (valued, false) => Ok(combine(&a, b, valued, |x, y| [x[0] * y[0], x[1] * y[0], x[2] * y[0]])),
        }
    }

    fn pad_free(&self, t: CountTable, m: usize) -> CountTable {
        if m == 0 {
            return t;
        }
        let row = binomial_row(m);
        let mut map = HashMap::new();
        for ((k, l), c) in t.map {
            for (j, b) in row.iter().enumerate() {
                *map.entry((k + j, l)).or_insert_with(BigInt::zero) += &c * b;
            }
        }
        CountTable::single(t.n + m, t.valued, map)
    }
}

/// Weight of the threshold value in the aggregate of a bag with the given
/// counts.
pub fn weight(alpha: &AggregateFunction, l: Counts) -> Rational {
    match alpha.quantile_param() {
        None => {
            let total = l[0] + l[1];
            if total == 0 {
                Rational::zero()
            } else {
                Rational::new(BigInt::from(l[1]), BigInt::from(total))
            }
        }
        Some(q) => {
            let total = (l[0] + l[1] + l[2]) as usize;
            if total == 0 {
                return Rational::zero();
            }
            let (i, j) = quantile_indices(&q, total);
            let hit = |p: usize| (l[0] as usize) < p && p <= (l[0] + l[1]) as usize;
            Rational::new(BigInt::from(hit(i) as u8 + hit(j) as u8), BigInt::from(2))
        }
    }
}

fn check(a: &AggregateQuery, d: &Database) -> Result<()> {
    check_schema(&a.query, d)?;
    match a.alpha {
        AggregateFunction::Avg | AggregateFunction::Median | AggregateFunction::Quantile(_) => {}
        _ => return Err(Error::EngineNotApplicable("avgqnt".into(), a.alpha.to_string())),
    }
    if let Some(r) = a.query.self_join() {
        return Err(Error::SelfJoin(r));
    }
    if a.query.classify() < HierarchyClass::QHierarchical {
        return Err(Error::NotQHierarchical);
    }
    Ok(())
}

/// The count table of the whole query at one threshold.
pub fn threshold_table(a: &AggregateQuery, d: &Database, threshold: &Rational) -> Result<CountTable> {
    check(a, d)?;
    let plugin = ThresholdPlugin {
        threshold: threshold.clone(),
        avg: a.alpha == AggregateFunction::Avg,
    };
    let tau = tau_on_substituted(&a.tau, &a.query)?;
    dp::run(&plugin, &a.query, Some(&tau), d)
}

pub fn sumk_avgqnt(a: &AggregateQuery, d: &Database) -> Result<SumKVector> {
    check(a, d)?;
    let values: BTreeSet<Rational> = full_answers(&a.query, d)
        .iter()
        .map(|t| a.tau.eval(t))
        .collect::<Result<_>>()?;
    let values: Vec<Rational> = values.into_iter().collect();
    let n = d.endo_count();
    let parts = exec::map(&values, |v| -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); n + 1];
        if v.is_zero() {
            return Ok(out);
        }
        let table = threshold_table(a, d, v)?;
        for ((k, l), c) in &table.map {
            let w = weight(&a.alpha, *l);
            if !w.is_zero() {
                out[*k] += w * v * Rational::from_integer(c.clone());
            }
        }
        Ok(out)
    });
    let mut out = vec![Rational::zero(); n + 1];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p?) {
            *o += x;
        }
    }
    Ok(SumKVector(out))
}

pub fn avgqnt_score(a: &AggregateQuery, d: &Database, f: &Fact, score: Score) -> Result<Rational> {
    check(a, d)?;
    score_by_sumk(score, d, f, |db| sumk_avgqnt(a, db))
}

/// Avg over a single all-endogenous relation, in closed form.
pub fn avg_single_relation_closed(d: &Database, tau: &ValueFunction, t: &Fact) -> Result<Rational> {
    let single = d.facts().all(|(f, p)| f.relation == t.relation && p == Provenance::Endogenous);
    if !single || !d.contains(t) {
        return Err(Error::Precondition(
            "all facts endogenous and of the relation of t".into(),
        ));
    }
    let n = d.len();
    let vt = tau.eval(&t.tuple)?;
    let h = harmonic(n);
    let nr = Rational::from_integer(BigInt::from(n));
    if n == 1 {
        return Ok(vt);
    }
    let mut others = Rational::zero();
    for (f, _) in d.facts() {
        if f != t {
            others += tau.eval(&f.tuple)?;
        }
    }
    let one = Rational::from_integer(BigInt::from(1));
    Ok(&h / &nr * vt - (h - one) / (&nr * (nr.clone() - Rational::from_integer(BigInt::from(1)))) * others)
}
