//! Value functions, aggregate functions and evaluation of A = α∘τ∘Q.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cq::{ConjunctiveQuery, HeadSlot};
use crate::error::{Error, Result};
use crate::model::{parse_rational, Constant, Database, Rational};

/// Positions are 1-based over the original head.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueFunction {
    Identity(usize),
    GreaterThan(Rational, usize),
    ReLU(usize),
    Const(Rational),
}

impl ValueFunction {
    pub fn position(&self) -> Option<usize> {
        match self {
            ValueFunction::Identity(i) | ValueFunction::GreaterThan(_, i) | ValueFunction::ReLU(i) => {
                Some(*i)
            }
            ValueFunction::Const(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ValueFunction::Const(_))
    }

    /// Value for a constant placed at the function's position.
    pub fn apply(&self, c: &Constant) -> Result<Rational> {
        if let ValueFunction::Const(v) = self {
            return Ok(v.clone());
        }
        let v = c
            .as_int()
            .ok_or_else(|| Error::NonNumericConstant(c.to_string()))?;
        let v = Rational::from_integer(v.clone());
        Ok(match self {
            ValueFunction::Identity(_) => v,
            ValueFunction::GreaterThan(b, _) => {
                if &v > b {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            ValueFunction::ReLU(_) => {
                if v.is_positive() {
                    v
                } else {
                    Rational::zero()
                }
            }
            ValueFunction::Const(_) => unreachable!(),
        })
    }

    /// Value of a tuple over the original head.
    pub fn eval(&self, t: &[Constant]) -> Result<Rational> {
        match self.position() {
            None => self.apply(&Constant::int(0)),
            Some(i) => {
                let c = t
                    .get(i - 1)
                    .ok_or_else(|| Error::InvalidValueFunction(format!("position {i} out of range")))?;
                self.apply(c)
            }
        }
    }

    pub fn validate(&self, q: &ConjunctiveQuery) -> Result<()> {
        if let Some(i) = self.position() {
            if i == 0 || i > q.slots.len() {
                return Err(Error::InvalidValueFunction(format!(
                    "position {i} outside a head of arity {}",
                    q.slots.len()
                )));
            }
        }
        Ok(())
    }

    /// The head variable the function reads, if it is still a variable of `q`.
    pub fn variable<'a>(&self, q: &'a ConjunctiveQuery) -> Option<&'a str> {
        let i = self.position()?;
        match q.slots.get(i - 1)? {
            HeadSlot::Var(v) | HeadSlot::Elsewhere(v) => Some(v.as_str()),
            HeadSlot::Fixed(_) => None,
        }
    }
}

impl fmt::Display for ValueFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |v: &Rational| {
            if v.is_integer() {
                v.numer().to_string()
            } else {
                format!("{}/{}", v.numer(), v.denom())
            }
        };
        match self {
            ValueFunction::Identity(i) => write!(f, "id:{i}"),
            ValueFunction::GreaterThan(b, i) => write!(f, "gt:{}:{i}", r(b)),
            ValueFunction::ReLU(i) => write!(f, "relu:{i}"),
            ValueFunction::Const(c) => write!(f, "const:{}", r(c)),
        }
    }
}

pub fn parse_value_function(text: &str) -> Result<ValueFunction> {
    let bad = || Error::InvalidValueFunction(text.to_string());
    let pos = |s: &str| -> Result<usize> {
        let i: usize = s.trim().parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        Ok(i)
    };
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.as_slice() {
        ["id", i] => Ok(ValueFunction::Identity(pos(i)?)),
        ["relu", i] => Ok(ValueFunction::ReLU(pos(i)?)),
        ["gt", b, i] => Ok(ValueFunction::GreaterThan(
            parse_rational(b).map_err(|_| bad())?,
            pos(i)?,
        )),
        ["const", c] => Ok(ValueFunction::Const(parse_rational(c).map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

/// The substituted query's τ′: constant once τ's own slot has been fixed.
pub fn tau_on_substituted(tau: &ValueFunction, qsub: &ConjunctiveQuery) -> Result<ValueFunction> {
    if let Some(i) = tau.position() {
        if let Some(HeadSlot::Fixed(a)) = qsub.slots.get(i - 1) {
            return Ok(ValueFunction::Const(tau.apply(a)?));
        }
    }
    Ok(tau.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AggregateFunction {
    Sum,
    Count,
    CDist,
    Min,
    Max,
    Avg,
    Quantile(Rational),
    Median,
    Dup,
}

impl AggregateFunction {
    pub fn quantile(q: Rational) -> Result<Self> {
        if q <= Rational::zero() || q >= Rational::one() {
            return Err(Error::InvalidAggregate(format!(
                "quantile parameter {q} outside (0,1)"
            )));
        }
        Ok(AggregateFunction::Quantile(q))
    }

    /// The quantile parameter for Median and Quantile.
    pub fn quantile_param(&self) -> Option<Rational> {
        match self {
            AggregateFunction::Quantile(q) => Some(q.clone()),
            AggregateFunction::Median => Some(Rational::new(BigInt::one(), BigInt::from(2))),
            _ => None,
        }
    }
}

impl fmt::Display for AggregateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregateFunction::Sum => write!(f, "sum"),
            AggregateFunction::Count => write!(f, "count"),
            AggregateFunction::CDist => write!(f, "cdist"),
            AggregateFunction::Min => write!(f, "min"),
            AggregateFunction::Max => write!(f, "max"),
            AggregateFunction::Avg => write!(f, "avg"),
            AggregateFunction::Quantile(q) => write!(f, "qnt:{}/{}", q.numer(), q.denom()),
            AggregateFunction::Median => write!(f, "median"),
            AggregateFunction::Dup => write!(f, "dup"),
        }
    }
}

pub fn parse_aggregate(text: &str) -> Result<AggregateFunction> {
    let t = text.trim();
    Ok(match t {
        "sum" => AggregateFunction::Sum,
        "count" => AggregateFunction::Count,
        "cdist" => AggregateFunction::CDist,
        "min" => AggregateFunction::Min,
        "max" => AggregateFunction::Max,
        "avg" => AggregateFunction::Avg,
        "median" => AggregateFunction::Median,
        "dup" => AggregateFunction::Dup,
        _ => match t.strip_prefix("qnt:") {
            Some(q) => AggregateFunction::quantile(
                parse_rational(q).map_err(|_| Error::InvalidAggregate(text.to_string()))?,
            )?,
            None => return Err(Error::InvalidAggregate(text.to_string())),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateQuery {
    pub alpha: AggregateFunction,
    pub tau: ValueFunction,
    pub query: ConjunctiveQuery,
}

impl AggregateQuery {
    pub fn new(alpha: AggregateFunction, tau: ValueFunction, query: ConjunctiveQuery) -> Result<Self> {
        tau.validate(&query)?;
        Ok(AggregateQuery { alpha, tau, query })
    }
}

impl fmt::Display for AggregateQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} . {} . {}", self.alpha, self.tau, self.query)
    }
}

/// A finite bag of rationals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RationalBag {
    counts: BTreeMap<Rational, usize>,
}

impl RationalBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Rational) {
        *self.counts.entry(v).or_insert(0) += 1;
    }

    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn multiplicity(&self, v: &Rational) -> usize {
        self.counts.get(v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, usize)> {
        self.counts.iter().map(|(v, &c)| (v, c))
    }

    /// The i-th smallest element counted with multiplicity, 1-based.
    pub fn nth_smallest(&self, i: usize) -> Option<&Rational> {
        let mut seen = 0;
        for (v, c) in self.iter() {
            seen += c;
            if seen >= i {
                return Some(v);
            }
        }
        None
    }
}

impl FromIterator<Rational> for RationalBag {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        let mut b = RationalBag::new();
        for v in iter {
            b.add(v);
        }
        b
    }
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub(crate) fn quantile_indices(q: &Rational, size: usize) -> (usize, usize) {
    let ql = q * Rational::from_integer(BigInt::from(size));
    let lo = ceil(&ql);
    let hi = floor(&(ql + Rational::one()));
    let as_usize = |b: BigInt| usize::try_from(b).expect("quantile index fits");
    (as_usize(lo), as_usize(hi))
}

pub fn aggregate(alpha: &AggregateFunction, bag: &RationalBag) -> Rational {
    if bag.is_empty() {
        return Rational::zero();
    }
    let n = Rational::from_integer(BigInt::from(bag.size()));
    let sum = || {
        bag.iter()
            .fold(Rational::zero(), |acc, (v, c)| acc + v * Rational::from_integer(BigInt::from(c)))
    };
    match alpha {
        AggregateFunction::Sum => sum(),
        AggregateFunction::Count => n,
        AggregateFunction::CDist => Rational::from_integer(BigInt::from(bag.distinct())),
        AggregateFunction::Min => bag.iter().next().unwrap().0.clone(),
        AggregateFunction::Max => bag.iter().last().unwrap().0.clone(),
        AggregateFunction::Avg => sum() / n,
        AggregateFunction::Quantile(_) | AggregateFunction::Median => {
            let q = alpha.quantile_param().unwrap();
            let (i, j) = quantile_indices(&q, bag.size());
            let a = bag.nth_smallest(i).unwrap();
            let b = bag.nth_smallest(j).unwrap();
            (a + b) / Rational::from_integer(BigInt::from(2))
        }
        AggregateFunction::Dup => {
            if bag.iter().any(|(_, c)| c >= 2) {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
    }
}

/// α over values already sorted ascending.
pub fn aggregate_sorted(alpha: &AggregateFunction, vals: &[&Rational]) -> Rational {
    if vals.is_empty() {
        return Rational::zero();
    }
    let n = vals.len();
    let sum = || vals.iter().fold(Rational::zero(), |acc, v| acc + *v);
    match alpha {
        AggregateFunction::Sum => sum(),
        AggregateFunction::Count => Rational::from_integer(BigInt::from(n)),
        AggregateFunction::CDist => {
            let d = 1 + vals.windows(2).filter(|w| w[0] != w[1]).count();
            Rational::from_integer(BigInt::from(d))
        }
        AggregateFunction::Min => vals[0].clone(),
        AggregateFunction::Max => vals[n - 1].clone(),
        AggregateFunction::Avg => sum() / Rational::from_integer(BigInt::from(n)),
        AggregateFunction::Quantile(_) | AggregateFunction::Median => {
            let q = alpha.quantile_param().unwrap();
            let (i, j) = quantile_indices(&q, n);
            (vals[i - 1] + vals[j - 1]) / Rational::from_integer(BigInt::from(2))
        }
        AggregateFunction::Dup => {
            if vals.windows(2).any(|w| w[0] == w[1]) {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
    }
}

pub(crate) fn check_schema(q: &ConjunctiveQuery, d: &Database) -> Result<()> {
    for atom in &q.body {
        match d.arity(&atom.relation) {
            None => return Err(Error::SchemaMismatch(atom.relation.clone())),
            Some(a) if a != atom.args.len() => {
                return Err(Error::ArityMismatch {
                    relation: atom.relation.clone(),
                    expected: a,
                    got: atom.args.len(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Q(D) under set semantics, as tuples over the current head.
pub fn answers(q: &ConjunctiveQuery, d: &Database) -> Result<BTreeSet<Vec<Constant>>> {
    check_schema(q, d)?;
    let mut out = BTreeSet::new();
    q.for_each_homomorphism(d, |b, _| {
        out.insert(q.head_tuple(b));
    });
    Ok(out)
}

/// Answers keyed by their tuple over the original head slots.
pub(crate) fn full_answers(q: &ConjunctiveQuery, d: &Database) -> BTreeSet<Vec<Constant>> {
    let mut out = BTreeSet::new();
    q.for_each_homomorphism(d, |b, _| {
        let t = q
            .full_tuple(b)
            .into_iter()
            .map(|c| c.unwrap_or_else(|| Constant::int(0)))
            .collect();
        out.insert(t);
    });
    out
}

pub fn value_bag(a: &AggregateQuery, d: &Database) -> Result<RationalBag> {
    check_schema(&a.query, d)?;
    full_answers(&a.query, d)
        .iter()
        .map(|t| a.tau.eval(t))
        .collect::<Result<Vec<_>>>()
        .map(|vs| vs.into_iter().collect())
}

pub fn eval(a: &AggregateQuery, d: &Database) -> Result<Rational> {
    Ok(aggregate(&a.alpha, &value_bag(a, d)?))
}
