//! The recursion shared by every polynomial-time engine. It walks an
//! all-hierarchical self-join-free query by root substitution and by
//! splitting into connected components. An engine supplies the tables and
//! how they combine.

use crate::aggregates::{tau_on_substituted, ValueFunction};
use crate::cq::{ConjunctiveQuery, HierarchyClass};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::Database;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionKind {
    /// The root is a head variable, so different values give different answers.
    Disjoint,
    /// The root is existential.
    Overlapping,
}

pub trait DpPlugin: Sync {
    type Table: Clone + Send;

    /// `q` has no variables left.
    fn base_case(&self, q: &ConjunctiveQuery, tau: Option<&ValueFunction>, d: &Database) -> Result<Self::Table>;

    /// Table of a root variable with no candidate values.
    fn empty(&self, q: &ConjunctiveQuery, tau: Option<&ValueFunction>) -> Self::Table;

    fn combine_union(
        &self,
        q: &ConjunctiveQuery,
        kind: UnionKind,
        a: Self::Table,
        b: &Self::Table,
    ) -> Result<Self::Table>;

    /// Independent components. `a` carries τ when some component does.
    fn combine_cross(&self, a: Self::Table, b: &Self::Table) -> Result<Self::Table>;

    /// Adds `m` endogenous facts that cannot change the outcome.
    fn pad_free(&self, t: Self::Table, m: usize) -> Self::Table;
}

/// Runs the recursion over all of `d`. Facts that match no atom are padded.
pub fn run<P: DpPlugin>(
    plugin: &P,
    q: &ConjunctiveQuery,
    tau: Option<&ValueFunction>,
    d: &Database,
) -> Result<P::Table> {
    if let Some(r) = q.self_join() {
        return Err(Error::SelfJoin(r));
    }
    if q.classify() < HierarchyClass::AllHierarchical {
        return Err(Error::NotAllHierarchical);
    }
    let relevant = d.filter(|f, _| q.body.iter().any(|a| a.matches(f)));
    let m = d.endo_count() - relevant.endo_count();
    let t = recurse(plugin, q, tau, &relevant)?;
    Ok(plugin.pad_free(t, m))
}

fn recurse<P: DpPlugin>(
    plugin: &P,
    q: &ConjunctiveQuery,
    tau: Option<&ValueFunction>,
    d: &Database,
) -> Result<P::Table> {
    if q.vars().is_empty() {
        return plugin.base_case(q, tau, d);
    }
    if let Some(x) = q.choose_root(true) {
        let kind = if q.free_vars().contains(&x) {
            UnionKind::Disjoint
        } else {
            UnionKind::Overlapping
        };
        let values: Vec<_> = q.values_variable_can_take(d, &x)?.into_iter().collect();
        let parts = exec::map(&values, |a| -> Result<(P::Table, usize)> {
            let sub = q.substitute(&x, a)?;
            let da = q.consistent_subset(d, &x, a)?;
            let tau_a = tau.map(|t| tau_on_substituted(t, &sub)).transpose()?;
            let t = recurse(plugin, &sub, tau_a.as_ref(), &da)?;
            Ok((t, da.endo_count()))
        });
        let mut covered = 0;
        let mut acc: Option<P::Table> = None;
        for part in parts {
            let (t, n) = part?;
            covered += n;
            acc = Some(match acc {
                None => t,
                Some(a) => plugin.combine_union(q, kind, a, &t)?,
            });
        }
        let acc = acc.unwrap_or_else(|| plugin.empty(q, tau));
        return Ok(plugin.pad_free(acc, d.endo_count() - covered));
    }
    let mut comps = q.connected_components();
    if comps.len() < 2 {
        return Err(Error::NotAllHierarchical);
    }
    let carrier = match tau.and_then(|t| t.variable(q)) {
        Some(v) => comps.iter().position(|c| c.has_var(v)).unwrap_or(0),
        None => 0,
    };
    let first = comps.remove(carrier);
    comps.insert(0, first);
    let tables = exec::map(&comps, |c| {
        let dc = d.filter(|f, _| c.body.iter().any(|a| a.matches(f)));
        let tc = if std::ptr::eq(c, &comps[0]) { tau } else { None };
        recurse(plugin, c, tc, &dc)
    });
    let mut it = tables.into_iter();
    let mut acc = it.next().expect("at least two components")?;
    for t in it {
        acc = plugin.combine_cross(acc, &t?)?;
    }
    Ok(acc)
}
