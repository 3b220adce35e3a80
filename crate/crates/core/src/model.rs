//! Constants, facts and databases split into endogenous and exogenous parts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical `p/q` text, denominator always printed.
pub fn format_exact(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering rounded half away from zero.
pub fn format_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r.numer().abs() * &scale;
    let (q, rem) = scaled.div_rem(r.denom());
    let q = if rem * 2 >= *r.denom() { q + 1 } else { q };
    let neg = r.is_negative() && !q.is_zero();
    let (whole, frac) = q.div_rem(&scale);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if digits > 0 {
        out.push('.');
        out.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
    }
    out
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::OutOfRange(format!("not a rational: {text}"));
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// Integers are ordered numerically. The derived order puts every integer
/// before every symbol; it is only used for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Int(BigInt),
    Sym(String),
}

impl Constant {
    pub fn int(v: i64) -> Self {
        Constant::Int(BigInt::from(v))
    }

    pub fn sym(s: &str) -> Self {
        Constant::Sym(s.to_string())
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Constant::Int(v) => Some(v),
            Constant::Sym(_) => None,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Int(v) => write!(f, "{v}"),
            Constant::Sym(s) => write!(f, "{s:?}"),
        }
    }
}

impl From<i64> for Constant {
    fn from(v: i64) -> Self {
        Constant::int(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Endogenous,
    Exogenous,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSchema {
    pub name: String,
    pub arity: usize,
}

/// A fact is identified by its relation and tuple. Provenance lives in the
/// database that holds it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub relation: String,
    pub tuple: Vec<Constant>,
}

impl Fact {
    pub fn new(relation: &str, tuple: Vec<Constant>) -> Self {
        Fact {
            relation: relation.to_string(),
            tuple,
        }
    }

    pub fn ints(relation: &str, values: &[i64]) -> Self {
        Fact::new(relation, values.iter().map(|&v| Constant::int(v)).collect())
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, c) in self.tuple.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Database {
    schema: BTreeMap<String, usize>,
    facts: BTreeMap<Fact, Provenance>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_schema(schema: &[RelationSchema]) -> Result<Self> {
        let mut db = Database::new();
        for rel in schema {
            db.declare(&rel.name, rel.arity)?;
        }
        Ok(db)
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.schema.get(name) {
            Some(&a) if a != arity => Err(Error::ArityMismatch {
                relation: name.to_string(),
                expected: a,
                got: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.schema.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    /// Adds a fact, declaring its relation on first use.
    pub fn insert(&mut self, fact: Fact, prov: Provenance) -> Result<()> {
        self.declare(&fact.relation, fact.tuple.len())?;
        if self.facts.contains_key(&fact) {
            return Err(Error::DuplicateFact(fact.to_string()));
        }
        self.facts.insert(fact, prov);
        Ok(())
    }

    pub fn endo(&mut self, fact: Fact) -> Result<()> {
        self.insert(fact, Provenance::Endogenous)
    }

    pub fn exo(&mut self, fact: Fact) -> Result<()> {
        self.insert(fact, Provenance::Exogenous)
    }

    pub fn schema(&self) -> Vec<RelationSchema> {
        self.schema
            .iter()
            .map(|(name, &arity)| RelationSchema {
                name: name.clone(),
                arity,
            })
            .collect()
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.schema.get(relation).copied()
    }

    pub fn has_relation(&self, relation: &str) -> bool {
        self.schema.contains_key(relation)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn provenance(&self, fact: &Fact) -> Option<Provenance> {
        self.facts.get(fact).copied()
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains_key(fact)
    }

    pub fn is_endogenous(&self, fact: &Fact) -> bool {
        self.provenance(fact) == Some(Provenance::Endogenous)
    }

    pub fn facts(&self) -> impl Iterator<Item = (&Fact, Provenance)> {
        self.facts.iter().map(|(f, &p)| (f, p))
    }

    pub fn facts_of<'a>(&'a self, relation: &'a str) -> impl Iterator<Item = (&'a Fact, Provenance)> {
        self.facts
            .iter()
            .filter(move |(f, _)| f.relation == relation)
            .map(|(f, &p)| (f, p))
    }

    /// Endogenous facts in sorted order.
    pub fn endogenous(&self) -> Vec<Fact> {
        self.facts
            .iter()
            .filter(|(_, &p)| p == Provenance::Endogenous)
            .map(|(f, _)| f.clone())
            .collect()
    }

    pub fn exogenous(&self) -> Vec<Fact> {
        self.facts
            .iter()
            .filter(|(_, &p)| p == Provenance::Exogenous)
            .map(|(f, _)| f.clone())
            .collect()
    }

    pub fn endo_count(&self) -> usize {
        self.facts.values().filter(|&&p| p == Provenance::Endogenous).count()
    }

    /// Same schema, no facts.
    pub fn empty_like(&self) -> Database {
        Database {
            schema: self.schema.clone(),
            facts: BTreeMap::new(),
        }
    }

    /// Keeps the facts accepted by `keep`, schema unchanged.
    pub fn filter(&self, mut keep: impl FnMut(&Fact, Provenance) -> bool) -> Database {
        Database {
            schema: self.schema.clone(),
            facts: self
                .facts
                .iter()
                .filter(|(f, &p)| keep(f, p))
                .map(|(f, &p)| (f.clone(), p))
                .collect(),
        }
    }

    /// Rewrites every fact, keeping its provenance. Fails if two facts collide.
    pub fn with_facts_mapped(&self, mut map: impl FnMut(&Fact) -> Fact) -> Result<Database> {
        let mut out = self.empty_like();
        for (f, &p) in &self.facts {
            out.insert(map(f), p)?;
        }
        Ok(out)
    }

    /// Dˣ together with the given endogenous facts.
    pub fn with_endogenous_subset(&self, chosen: &BTreeSet<Fact>) -> Database {
        self.filter(|f, p| p == Provenance::Exogenous || chosen.contains(f))
    }

    pub fn active_domain(&self) -> BTreeSet<Constant> {
        self.facts.keys().flat_map(|f| f.tuple.iter().cloned()).collect()
    }
}

pub fn make_fact_exogenous(d: &Database, f: &Fact) -> Result<Database> {
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    let mut out = d.clone();
    out.facts.insert(f.clone(), Provenance::Exogenous);
    Ok(out)
}

pub fn remove_fact(d: &Database, f: &Fact) -> Result<Database> {
    if !d.contains(f) {
        return Err(Error::FactAbsent(f.to_string()));
    }
    let mut out = d.clone();
    out.facts.remove(f);
    Ok(out)
}

pub fn restrict_to_relations(d: &Database, names: &BTreeSet<String>) -> Result<Database> {
    if let Some(bad) = names.iter().find(|n| !d.has_relation(n)) {
        return Err(Error::UnknownRelation(bad.clone()));
    }
    Ok(d.filter(|f, _| names.contains(&f.relation)))
}
