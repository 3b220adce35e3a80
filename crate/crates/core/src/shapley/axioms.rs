//! Checks a table of values against efficiency, null player and symmetry.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::aggregates::{eval, AggregateQuery};
use crate::cq::Term;
use crate::error::Result;
use crate::model::{Constant, Database, Fact, Provenance, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub efficiency_expected: Rational,
    pub efficiency_total: Rational,
    /// Facts in no homomorphism image whose value is not zero.
    pub null_player_failures: Vec<Fact>,
    /// Pairs related by a database automorphism, with whether their values agree.
    pub symmetric_pairs: Vec<(Fact, Fact, bool)>,
    /// Endogenous facts missing from the value table.
    pub missing: Vec<Fact>,
}

impl AxiomReport {
    pub fn efficiency_holds(&self) -> bool {
        self.efficiency_expected == self.efficiency_total
    }

    pub fn passed(&self) -> bool {
        self.efficiency_holds()
            && self.null_player_failures.is_empty()
            && self.symmetric_pairs.iter().all(|p| p.2)
            && self.missing.is_empty()
    }
}

/// Facts of `d` used by some homomorphism of the query.
pub fn participating(a: &AggregateQuery, d: &Database) -> BTreeSet<Fact> {
    let mut out = BTreeSet::new();
    a.query.for_each_homomorphism(d, |_, image| {
        for (f, _) in image {
            out.insert((*f).clone());
        }
    });
    out
}

/// An involution of constants mapping f onto g that fixes the database,
/// provenance included, the query constants and the values τ can see.
pub fn swap_automorphism(a: &AggregateQuery, d: &Database, f: &Fact, g: &Fact) -> Result<Option<BTreeMap<Constant, Constant>>> {
    if f.relation != g.relation || f.tuple.len() != g.tuple.len() || d.provenance(f) != d.provenance(g) {
        return Ok(None);
    }
    let mut pi: BTreeMap<Constant, Constant> = BTreeMap::new();
    for (x, y) in f.tuple.iter().zip(&g.tuple) {
        if x == y {
            continue;
        }
        for (p, q) in [(x, y), (y, x)] {
            match pi.get(p) {
                Some(z) if z != q => return Ok(None),
                _ => {
                    pi.insert(p.clone(), q.clone());
                }
            }
        }
    }
    if pi.iter().any(|(p, q)| pi.get(q) != Some(p)) {
        return Ok(None);
    }
    let image = |c: &Constant| pi.get(c).cloned().unwrap_or_else(|| c.clone());
    let q = &a.query;
    for atom in &q.body {
        for t in &atom.args {
            if let Term::Const(c) = t {
                if pi.contains_key(c) {
                    return Ok(None);
                }
            }
        }
    }
    if let Some(v) = a.tau.variable(q) {
        let mut seen = BTreeSet::new();
        for atom in &q.body {
            for (i, t) in atom.args.iter().enumerate() {
                if t.as_var() != Some(v) {
                    continue;
                }
                for (h, _) in d.facts_of(&atom.relation) {
                    let c = &h.tuple[i];
                    if pi.contains_key(c) && seen.insert(c.clone()) && a.tau.apply(c)? != a.tau.apply(&image(c))? {
                        return Ok(None);
                    }
                }
            }
        }
    }
    for (h, p) in d.facts() {
        let moved = Fact::new(&h.relation, h.tuple.iter().map(&image).collect());
        if d.provenance(&moved) != Some(p) {
            return Ok(None);
        }
    }
    Ok(Some(pi))
}

pub fn check_axioms(a: &AggregateQuery, d: &Database, values: &BTreeMap<Fact, Rational>) -> Result<AxiomReport> {
    let exo = d.filter(|_, p| p == Provenance::Exogenous);
    let expected = eval(a, d)? - eval(a, &exo)?;
    let endo = d.endogenous();
    let missing: Vec<Fact> = endo.iter().filter(|f| !values.contains_key(*f)).cloned().collect();
    let total = endo
        .iter()
        .filter_map(|f| values.get(f))
        .fold(Rational::zero(), |acc, v| acc + v);
    let used = participating(a, d);
    let null_player_failures = endo
        .iter()
        .filter(|f| !used.contains(*f) && values.get(*f).is_some_and(|v| !v.is_zero()))
        .cloned()
        .collect();
    let mut symmetric_pairs = Vec::new();
    for (i, f) in endo.iter().enumerate() {
        for g in &endo[i + 1..] {
            if swap_automorphism(a, d, f, g)?.is_some() {
                let ok = values.get(f) == values.get(g);
                symmetric_pairs.push((f.clone(), g.clone(), ok));
            }
        }
    }
    Ok(AxiomReport {
        efficiency_expected: expected,
        efficiency_total: total,
        null_player_failures,
        symmetric_pairs,
        missing,
    })
}
