//! Carrying a `Q(x) :- R(x,y), S(y)` instance into a larger query that has
//! the same non-q-hierarchical shape.

use std::collections::{BTreeMap, BTreeSet};

use crate::aggregates::{AggregateFunction, AggregateQuery, ValueFunction};
use crate::cq::{Atom, ConjunctiveQuery, HeadSlot};
use crate::error::{Error, Result};
use crate::model::{Constant, Database, Fact, Provenance};

#[derive(Debug, Clone)]
pub struct Embedding {
    pub query: AggregateQuery,
    pub db: Database,
    /// Image of each fact of the source database.
    pub h: BTreeMap<Fact, Fact>,
    /// The variables playing x and y.
    pub x0: String,
    pub y0: String,
}

/// The filler used for every variable other than x0 and y0.
pub fn filler() -> Constant {
    Constant::sym("c")
}

/// A free x and an existential y whose atoms strictly contain those of x.
pub fn witness_pair(q: &ConjunctiveQuery) -> Option<(String, String)> {
    let free = q.free_vars();
    for x in &free {
        let ax = q.atoms_of(x);
        for y in q.existential_vars() {
            let ay = q.atoms_of(&y);
            if ax.is_subset(&ay) && ax != ay {
                return Some((x.clone(), y));
            }
        }
    }
    None
}

fn retarget(tau: &ValueFunction, pos: usize) -> ValueFunction {
    match tau {
        ValueFunction::Identity(_) => ValueFunction::Identity(pos),
        ValueFunction::GreaterThan(t, _) => ValueFunction::GreaterThan(t.clone(), pos),
        ValueFunction::ReLU(_) => ValueFunction::ReLU(pos),
        ValueFunction::Const(c) => ValueFunction::Const(c.clone()),
    }
}

/// Embeds `d` (over R/2 and S/1) into `q`. `tau` is read at the x position
/// of the source query and moved to the head position of x0.
pub fn embed_qxyy(q: &ConjunctiveQuery, alpha: &AggregateFunction, tau: &ValueFunction, d: &Database) -> Result<Embedding> {
    if let Some(r) = q.self_join() {
        return Err(Error::SelfJoin(r));
    }
    if d.arity("R").is_some_and(|k| k != 2) || d.arity("S").is_some_and(|k| k != 1) {
        return Err(Error::SchemaMismatch("source must be R/2, S/1".into()));
    }
    if let Some(other) = d.schema().iter().find(|s| s.name != "R" && s.name != "S") {
        return Err(Error::SchemaMismatch(format!("unexpected relation {}", other.name)));
    }
    let (x0, y0) = witness_pair(q).ok_or_else(|| Error::Precondition("query is q-hierarchical".into()))?;
    let phi_r = q
        .body
        .iter()
        .position(|a| a.has_var(&x0) && a.has_var(&y0))
        .expect("x0 atoms lie inside y0 atoms");
    let phi_s = q
        .body
        .iter()
        .position(|a| a.has_var(&y0) && !a.has_var(&x0))
        .expect("strict containment");
    let pos = q
        .slots
        .iter()
        .position(|s| matches!(s, HeadSlot::Var(v) if *v == x0))
        .expect("x0 is free")
        + 1;

    let mut out = Database::new();
    for atom in &q.body {
        out.declare(&atom.relation, atom.args.len())?;
    }
    let base: BTreeMap<String, Constant> = q.vars().into_iter().map(|v| (v, filler())).collect();
    let ground = |atom: &Atom, a: Option<&Constant>, b: &Constant| {
        let mut binding = base.clone();
        if let Some(a) = a {
            binding.insert(x0.clone(), a.clone());
        }
        binding.insert(y0.clone(), b.clone());
        atom.ground(&binding).expect("every variable bound")
    };

    let mut h = BTreeMap::new();
    let s_values: BTreeSet<&Constant> = d.facts_of("S").map(|(f, _)| &f.tuple[0]).collect();
    for (f, p) in d.facts_of("R") {
        let img = ground(&q.body[phi_r], Some(&f.tuple[0]), &f.tuple[1]);
        out.insert(img.clone(), p)?;
        h.insert(f.clone(), img);
    }
    for (f, p) in d.facts_of("S") {
        let img = ground(&q.body[phi_s], None, &f.tuple[0]);
        out.insert(img.clone(), p)?;
        h.insert(f.clone(), img);
    }
    for (f, _) in d.facts_of("R") {
        if !s_values.contains(&f.tuple[1]) {
            continue;
        }
        for (i, atom) in q.body.iter().enumerate() {
            if i == phi_r || i == phi_s {
                continue;
            }
            let g = ground(atom, Some(&f.tuple[0]), &f.tuple[1]);
            if !out.contains(&g) {
                out.insert(g, Provenance::Exogenous)?;
            }
        }
    }
    let query = AggregateQuery::new(alpha.clone(), retarget(tau, pos), q.clone())?;
    Ok(Embedding { query, db: out, h, x0, y0 })
}
