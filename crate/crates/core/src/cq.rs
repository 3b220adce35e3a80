//! Conjunctive queries: parsing, hierarchy classes and the structural
//! operations used by the dynamic programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::model::{Constant, Database, Fact, Provenance};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Constant),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(relation: &str, args: Vec<Term>) -> Self {
        Atom {
            relation: relation.to_string(),
            args,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn has_var(&self, x: &str) -> bool {
        self.vars().any(|v| v == x)
    }

    pub fn is_ground(&self) -> bool {
        self.vars().next().is_none()
    }

    /// Extends `binding` so that the atom maps onto `fact`. On failure the
    /// binding is left untouched.
    pub fn unify(&self, fact: &Fact, binding: &mut BTreeMap<String, Constant>) -> bool {
        self.unify_tracked(fact, binding).is_some()
    }

    /// As `unify`, returning the variables newly bound.
    pub fn unify_tracked<'a>(
        &'a self,
        fact: &Fact,
        binding: &mut BTreeMap<String, Constant>,
    ) -> Option<Vec<&'a str>> {
        if fact.relation != self.relation || fact.tuple.len() != self.args.len() {
            return None;
        }
        let mut added: Vec<&str> = Vec::new();
        for (term, value) in self.args.iter().zip(&fact.tuple) {
            let ok = match term {
                Term::Const(c) => c == value,
                Term::Var(v) => match binding.get(v) {
                    Some(bound) => bound == value,
                    None => {
                        binding.insert(v.clone(), value.clone());
                        added.push(v);
                        true
                    }
                },
            };
            if !ok {
                for v in added {
                    binding.remove(v);
                }
                return None;
            }
        }
        Some(added)
    }

    pub fn matches(&self, fact: &Fact) -> bool {
        self.unify(fact, &mut BTreeMap::new())
    }

    /// The fact obtained by applying a total assignment of the atom's variables.
    pub fn ground(&self, binding: &BTreeMap<String, Constant>) -> Option<Fact> {
        let tuple = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(v) => binding.get(v).cloned(),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Fact {
            relation: self.relation.clone(),
            tuple,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// One position of the original head. Substitution turns a `Var` slot into
/// `Fixed`; splitting into components marks variables owned by another
/// component as `Elsewhere`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HeadSlot {
    Var(String),
    Fixed(Constant),
    Elsewhere(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConjunctiveQuery {
    pub name: String,
    pub slots: Vec<HeadSlot>,
    pub body: Vec<Atom>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HierarchyClass {
    NotExistsHierarchical,
    ExistsHierarchical,
    AllHierarchical,
    QHierarchical,
    SQHierarchical,
}

impl HierarchyClass {
    pub fn label(self) -> &'static str {
        match self {
            HierarchyClass::NotExistsHierarchical => "not exists-hierarchical",
            HierarchyClass::ExistsHierarchical => "exists-hierarchical",
            HierarchyClass::AllHierarchical => "all-hierarchical",
            HierarchyClass::QHierarchical => "q-hierarchical",
            HierarchyClass::SQHierarchical => "sq-hierarchical",
        }
    }
}

impl fmt::Display for HierarchyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-predicate verdicts with a witnessing variable pair when a check fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub class: HierarchyClass,
    pub exists_hierarchical: Option<(String, String)>,
    pub all_hierarchical: Option<(String, String)>,
    pub q_hierarchical: Option<(String, String)>,
    pub sq_hierarchical: Option<(String, String)>,
}

impl ConjunctiveQuery {
    pub fn new(name: &str, head: &[&str], body: Vec<Atom>) -> Result<Self> {
        let q = ConjunctiveQuery {
            name: name.to_string(),
            slots: head.iter().map(|v| HeadSlot::Var(v.to_string())).collect(),
            body,
        };
        q.check_safety()?;
        Ok(q)
    }

    fn check_safety(&self) -> Result<()> {
        for v in self.head() {
            if !self.body.iter().any(|a| a.has_var(v)) {
                return Err(Error::UnsafeHead(v.to_string()));
            }
        }
        Ok(())
    }

    /// Current head variables, in head order.
    pub fn head(&self) -> Vec<&str> {
        self.slots
            .iter()
            .filter_map(|s| match s {
                HeadSlot::Var(v) => Some(v.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn is_boolean(&self) -> bool {
        self.head().is_empty()
    }

    /// Variables in order of first occurrence in the body.
    pub fn vars(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in &self.body {
            for v in a.vars() {
                if seen.insert(v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.head().into_iter().map(str::to_string).collect()
    }

    pub fn existential_vars(&self) -> BTreeSet<String> {
        let free = self.free_vars();
        self.vars().into_iter().filter(|v| !free.contains(v)).collect()
    }

    pub fn has_var(&self, x: &str) -> bool {
        self.body.iter().any(|a| a.has_var(x))
    }

    pub fn atoms_of(&self, x: &str) -> BTreeSet<usize> {
        self.body
            .iter()
            .enumerate()
            .filter(|(_, a)| a.has_var(x))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn relations(&self) -> BTreeSet<String> {
        self.body.iter().map(|a| a.relation.clone()).collect()
    }

    pub fn atom_for(&self, relation: &str) -> Option<&Atom> {
        self.body.iter().find(|a| a.relation == relation)
    }

    pub fn self_join(&self) -> Option<String> {
        let mut seen = BTreeSet::new();
        for a in &self.body {
            if !seen.insert(a.relation.as_str()) {
                return Some(a.relation.clone());
            }
        }
        None
    }

    pub fn is_self_join_free(&self) -> bool {
        self.self_join().is_none()
    }

    /// A variable is free in the head slots and therefore its 0-based
    /// position(s) in the original head.
    pub fn slot_positions(&self, x: &str) -> Vec<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, HeadSlot::Var(v) if v == x))
            .map(|(i, _)| i)
            .collect()
    }

    /// Boolean version: same body, empty head.
    pub fn boolean(&self) -> ConjunctiveQuery {
        ConjunctiveQuery {
            name: self.name.clone(),
            slots: Vec::new(),
            body: self.body.clone(),
        }
    }

    fn check_var(&self, x: &str) -> Result<()> {
        if self.has_var(x) {
            Ok(())
        } else {
            Err(Error::UnknownVariable(x.to_string()))
        }
    }

    pub fn hierarchical_wrt(&self, vars: &BTreeSet<String>) -> Result<bool> {
        for v in vars {
            self.check_var(v)?;
        }
        Ok(self.hierarchy_witness(vars).is_none())
    }

    fn hierarchy_witness(&self, vars: &BTreeSet<String>) -> Option<(String, String)> {
        let sets: Vec<(&String, BTreeSet<usize>)> =
            vars.iter().map(|v| (v, self.atoms_of(v))).collect();
        for (i, (x, ax)) in sets.iter().enumerate() {
            for (y, ay) in &sets[i + 1..] {
                let nested = ax.is_subset(ay) || ay.is_subset(ax);
                if !nested && !ax.is_disjoint(ay) {
                    return Some(((*x).clone(), (*y).clone()));
                }
            }
        }
        None
    }

    pub fn classify(&self) -> HierarchyClass {
        self.class_report().class
    }

    pub fn class_report(&self) -> ClassReport {
        let all: BTreeSet<String> = self.vars().into_iter().collect();
        let free = self.free_vars();
        let exist = self.existential_vars();
        let exists_w = self.hierarchy_witness(&exist);
        let all_w = self.hierarchy_witness(&all);
        let atoms: BTreeMap<&String, BTreeSet<usize>> =
            all.iter().map(|v| (v, self.atoms_of(v))).collect();
        let strict = |small: &String, big: &String| {
            let (s, b) = (&atoms[small], &atoms[big]);
            s.is_subset(b) && s.len() < b.len()
        };
        let mut q_w = None;
        'q: for x in &exist {
            for y in &free {
                if strict(y, x) {
                    q_w = Some((y.clone(), x.clone()));
                    break 'q;
                }
            }
        }
        let mut sq_w = None;
        'sq: for y in &free {
            for z in &all {
                if strict(y, z) {
                    sq_w = Some((y.clone(), z.clone()));
                    break 'sq;
                }
            }
        }
        let class = if all_w.is_none() {
            if sq_w.is_none() {
                HierarchyClass::SQHierarchical
            } else if q_w.is_none() {
                HierarchyClass::QHierarchical
            } else {
                HierarchyClass::AllHierarchical
            }
        } else if exists_w.is_none() {
            HierarchyClass::ExistsHierarchical
        } else {
            HierarchyClass::NotExistsHierarchical
        };
        ClassReport {
            class,
            exists_hierarchical: exists_w,
            all_hierarchical: all_w,
            q_hierarchical: q_w,
            sq_hierarchical: sq_w,
        }
    }

    pub fn root_variables(&self) -> BTreeSet<String> {
        if self.body.is_empty() {
            return BTreeSet::new();
        }
        self.vars()
            .into_iter()
            .filter(|v| self.body.iter().all(|a| a.has_var(v)))
            .collect()
    }

    /// Root used by the dynamic program: the first free root in head order
    /// when `prefer_free` is set, otherwise the first root in body order.
    pub fn choose_root(&self, prefer_free: bool) -> Option<String> {
        let roots = self.root_variables();
        if roots.is_empty() {
            return None;
        }
        if prefer_free {
            if let Some(v) = self.head().into_iter().find(|v| roots.contains(*v)) {
                return Some(v.to_string());
            }
        }
        self.vars().into_iter().find(|v| roots.contains(v))
    }

    pub fn connected_components(&self) -> Vec<ConjunctiveQuery> {
        let n = self.body.len();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while c[r] != r {
                r = c[r];
            }
            c[i] = r;
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.body[i].vars().any(|v| self.body[j].has_var(v)) {
                    let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                    if a != b {
                        comp[b.max(a)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut comp, i);
            groups.entry(r).or_default().push(i);
        }
        groups
            .values()
            .map(|idx| {
                let body: Vec<Atom> = idx.iter().map(|&i| self.body[i].clone()).collect();
                let slots = self
                    .slots
                    .iter()
                    .map(|s| match s {
                        HeadSlot::Var(v) if !body.iter().any(|a| a.has_var(v)) => {
                            HeadSlot::Elsewhere(v.clone())
                        }
                        other => other.clone(),
                    })
                    .collect();
                ConjunctiveQuery {
                    name: self.name.clone(),
                    slots,
                    body,
                }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Q with x replaced by a everywhere; head slots of x become `Fixed(a)`.
    pub fn substitute(&self, x: &str, a: &Constant) -> Result<ConjunctiveQuery> {
        self.check_var(x)?;
        let body = self
            .body
            .iter()
            .map(|atom| Atom {
                relation: atom.relation.clone(),
                args: atom
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) if v == x => Term::Const(a.clone()),
                        other => other.clone(),
                    })
                    .collect(),
            })
            .collect();
        let slots = self
            .slots
            .iter()
            .map(|s| match s {
                HeadSlot::Var(v) if v == x => HeadSlot::Fixed(a.clone()),
                other => other.clone(),
            })
            .collect();
        Ok(ConjunctiveQuery {
            name: self.name.clone(),
            slots,
            body,
        })
    }

    /// Head slots fixed by substitution, as (0-based position, value).
    pub fn fixed_slots(&self) -> Vec<(usize, Constant)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                HeadSlot::Fixed(c) => Some((i, c.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn values_variable_can_take(&self, d: &Database, x: &str) -> Result<BTreeSet<Constant>> {
        self.check_var(x)?;
        let mut acc: Option<BTreeSet<Constant>> = None;
        for atom in &self.body {
            for (pos, t) in atom.args.iter().enumerate() {
                if t.as_var() != Some(x) {
                    continue;
                }
                let column: BTreeSet<Constant> = d
                    .facts_of(&atom.relation)
                    .map(|(f, _)| f.tuple[pos].clone())
                    .collect();
                acc = Some(match acc {
                    None => column,
                    Some(prev) => prev.intersection(&column).cloned().collect(),
                });
            }
        }
        Ok(acc.unwrap_or_default())
    }

    pub fn consistent_subset(&self, d: &Database, x: &str, a: &Constant) -> Result<Database> {
        let sub = self.substitute(x, a)?;
        Ok(d.filter(|f, _| sub.body.iter().any(|atom| atom.matches(f))))
    }

    /// Calls `visit` with every homomorphism of the body into `d`, giving the
    /// assignment and the image fact of each atom.
    pub fn for_each_homomorphism<F>(&self, d: &Database, mut visit: F)
    where
        F: FnMut(&BTreeMap<String, Constant>, &[(&Fact, Provenance)]),
    {
        let index: Vec<Vec<(&Fact, Provenance)>> = self
            .body
            .iter()
            .map(|a| d.facts_of(&a.relation).filter(|(f, _)| a.matches(f)).collect())
            .collect();
        let mut order: Vec<usize> = (0..self.body.len()).collect();
        order.sort_by_key(|&i| index[i].len());
        let mut binding = BTreeMap::new();
        let mut image: Vec<(&Fact, Provenance)> = Vec::with_capacity(self.body.len());
        fn go<'a, F>(
            q: &ConjunctiveQuery,
            index: &[Vec<(&'a Fact, Provenance)>],
            order: &[usize],
            depth: usize,
            binding: &mut BTreeMap<String, Constant>,
            image: &mut Vec<(&'a Fact, Provenance)>,
            visit: &mut F,
        ) where
            F: FnMut(&BTreeMap<String, Constant>, &[(&Fact, Provenance)]),
        {
            if depth == order.len() {
                let mut by_atom = vec![image[0]; image.len()];
                for (k, &i) in order.iter().enumerate() {
                    by_atom[i] = image[k];
                }
                visit(binding, &by_atom);
                return;
            }
            let atom = &q.body[order[depth]];
            for &(fact, prov) in &index[order[depth]] {
                if let Some(added) = atom.unify_tracked(fact, binding) {
                    image.push((fact, prov));
                    go(q, index, order, depth + 1, binding, image, visit);
                    image.pop();
                    for v in added {
                        binding.remove(v);
                    }
                }
            }
        }
        if self.body.is_empty() {
            visit(&binding, &[]);
            return;
        }
        go(self, &index, &order, 0, &mut binding, &mut image, &mut visit);
    }

    /// The head tuple of an assignment, over the current head.
    pub fn head_tuple(&self, binding: &BTreeMap<String, Constant>) -> Vec<Constant> {
        self.head().iter().map(|v| binding[*v].clone()).collect()
    }

    /// The tuple over the original head positions. `Elsewhere` slots are
    /// reported as `None`.
    pub fn full_tuple(&self, binding: &BTreeMap<String, Constant>) -> Vec<Option<Constant>> {
        self.slots
            .iter()
            .map(|s| match s {
                HeadSlot::Var(v) => binding.get(v).cloned(),
                HeadSlot::Fixed(c) => Some(c.clone()),
                HeadSlot::Elsewhere(_) => None,
            })
            .collect()
    }

    /// Grounds every head variable with the corresponding entry of `t`.
    pub fn ground_head(&self, t: &[Constant]) -> Result<ConjunctiveQuery> {
        let head: Vec<String> = self.head().into_iter().map(str::to_string).collect();
        if head.len() != t.len() {
            return Err(Error::OutOfRange(format!(
                "answer of length {} for a head of length {}",
                t.len(),
                head.len()
            )));
        }
        let mut q = self.clone();
        for (v, c) in head.iter().zip(t) {
            if !q.has_var(v) {
                // repeated head variable already grounded
                continue;
            }
            q = q.substitute(v, c)?;
        }
        Ok(q)
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) :- ", self.name, self.head().join(","))?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ".")
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{s}'")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start || self.src[start..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos = start;
            return Err(self.err("expected identifier"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn term(&mut self, fresh: &mut usize, taken: &BTreeSet<String>) -> Result<Term> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('"') => {
                self.pos += 1;
                let rest = &self.src[self.pos..];
                let end = rest.find('"').ok_or_else(|| self.err("unterminated symbol"))?;
                let s = rest[..end].to_string();
                self.pos += end + 1;
                Ok(Term::Const(Constant::Sym(s)))
            }
            Some(c) if c == '-' || c.is_ascii_digit() => {
                self.pos += c.len_utf8();
                while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    self.pos += 1;
                }
                let text = &self.src[start..self.pos];
                let v: BigInt = text.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("bad integer '{text}'"),
                })?;
                Ok(Term::Const(Constant::Int(v)))
            }
            _ => {
                let name = self.ident()?;
                if name == "_" {
                    loop {
                        *fresh += 1;
                        let candidate = format!("_{fresh}");
                        if !taken.contains(&candidate) {
                            return Ok(Term::Var(candidate));
                        }
                    }
                }
                if !name.starts_with(|c: char| c.is_lowercase() || c == '_') {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("'{name}' is not a variable (variables start lowercase)"),
                    });
                }
                Ok(Term::Var(name))
            }
        }
    }
}

fn named_vars(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|s| s.starts_with('_') && s.len() > 1)
        .map(str::to_string)
        .collect()
}

pub fn parse_cq(text: &str) -> Result<ConjunctiveQuery> {
    let taken = named_vars(text);
    let mut fresh = 0usize;
    let mut lx = Lexer { src: text, pos: 0 };
    let name = lx.ident()?;
    lx.expect("(")?;
    let mut head = Vec::new();
    if !lx.eat(")") {
        loop {
            lx.skip_ws();
            let at = lx.pos;
            match lx.term(&mut fresh, &taken)? {
                Term::Var(v) if !v.starts_with('_') || taken.contains(&v) => head.push(v),
                _ => {
                    return Err(Error::Syntax {
                        pos: at,
                        msg: "head arguments must be named variables".into(),
                    })
                }
            }
            if lx.eat(")") {
                break;
            }
            lx.expect(",")?;
        }
    }
    lx.expect(":-")?;
    let mut body = Vec::new();
    loop {
        let rel = lx.ident()?;
        lx.expect("(")?;
        let mut args = Vec::new();
        if !lx.eat(")") {
            loop {
                args.push(lx.term(&mut fresh, &taken)?);
                if lx.eat(")") {
                    break;
                }
                lx.expect(",")?;
            }
        }
        body.push(Atom::new(&rel, args));
        if lx.eat(",") {
            continue;
        }
        break;
    }
    lx.eat(".");
    lx.skip_ws();
    if lx.pos != text.len() {
        return Err(lx.err("trailing input"));
    }
    let q = ConjunctiveQuery {
        name,
        slots: head.into_iter().map(HeadSlot::Var).collect(),
        body,
    };
    q.check_safety()?;
    Ok(q)
}

/// Parses a ground atom such as `R(1,"a")` into a fact.
pub fn parse_fact(text: &str) -> Result<Fact> {
    let mut lx = Lexer { src: text, pos: 0 };
    let rel = lx.ident()?;
    lx.expect("(")?;
    let mut tuple = Vec::new();
    let mut fresh = 0;
    if !lx.eat(")") {
        loop {
            lx.skip_ws();
            let at = lx.pos;
            match lx.term(&mut fresh, &BTreeSet::new())? {
                Term::Const(c) => tuple.push(c),
                Term::Var(_) => {
                    return Err(Error::Syntax {
                        pos: at,
                        msg: "facts take constants only".into(),
                    })
                }
            }
            if lx.eat(")") {
                break;
            }
            lx.expect(",")?;
        }
    }
    lx.skip_ws();
    if lx.pos != text.len() {
        return Err(lx.err("trailing input"));
    }
    Ok(Fact::new(&rel, tuple))
}
