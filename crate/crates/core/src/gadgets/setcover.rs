//! Set-cover encodings for Avg and for quantiles over `Q(x) :- R(x,y), S(y)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::aggregates::{AggregateFunction, AggregateQuery, ValueFunction};
use crate::combinatorics::factorial;
use crate::cq::{parse_cq, ConjunctiveQuery};
use crate::error::{Error, Result};
use crate::exec;
use crate::gadgets::linalg::{exact_solve, ExactMatrix};
use crate::model::{Constant, Database, Fact, Rational};
use crate::shapley::shapley_coefficient;

/// Elements 1..=n and subsets Y₁..Y_m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetCoverInstance {
    pub fn new(n: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::OutOfRange("at least one subset is needed".into()));
        }
        for s in &sets {
            if s.is_empty() || s.iter().any(|&e| e == 0 || e > n) {
                return Err(Error::OutOfRange(format!("subset {s:?} of 1..={n}")));
            }
        }
        Ok(SetCoverInstance { n, sets })
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    fn covered(&self, chosen: u64) -> usize {
        let mut seen = vec![false; self.n + 1];
        for (j, s) in self.sets.iter().enumerate() {
            if chosen >> j & 1 == 1 {
                for &e in s {
                    seen[e] = true;
                }
            }
        }
        seen.iter().filter(|b| **b).count()
    }

    /// Z[i][j]: number of j-subsets of the sets covering exactly i elements.
    pub fn cover_counts(&self) -> Vec<Vec<BigInt>> {
        let (n, m) = (self.n, self.m());
        let mut z = vec![vec![BigInt::zero(); m + 1]; n + 1];
        for c in 0..1u64 << m {
            z[self.covered(c)][c.count_ones() as usize] += 1;
        }
        z
    }

    pub fn count_covers(&self) -> BigInt {
        self.cover_counts()[self.n].iter().sum()
    }

    /// Shapley value of player i in the game "the chosen sets cover everything".
    pub fn cover_game_shapley(&self, i: usize) -> Rational {
        let m = self.m();
        let mut total = Rational::zero();
        for c in 0..1u64 << m {
            if c >> i & 1 == 1 {
                continue;
            }
            let before = self.covered(c) == self.n;
            let after = self.covered(c | 1 << i) == self.n;
            if after && !before {
                total += shapley_coefficient(c.count_ones() as usize, m).unwrap();
            }
        }
        total
    }
}

/// `Q(x) :- R(x,y), S(y)`.
pub fn qxyy() -> ConjunctiveQuery {
    parse_cq("Q(x) :- R(x,y), S(y).").expect("well-formed")
}

fn r(a: i64, b: i64) -> Fact {
    Fact::ints("R", &[a, b])
}

fn s(a: i64) -> Fact {
    Fact::ints("S", &[a])
}

fn schema() -> Database {
    let mut d = Database::new();
    d.declare("R", 2).unwrap();
    d.declare("S", 1).unwrap();
    d
}

/// The database D_{q,r} and the fact S(0).
pub fn build_avg_setcover_db(inst: &SetCoverInstance, q: usize, r_: usize) -> Result<(Database, Fact)> {
    let (n, m) = (inst.n as i64, inst.m() as i64);
    if q > inst.n || r_ > inst.m() {
        return Err(Error::OutOfRange(format!("(q, r) = ({q}, {r_})")));
    }
    let mut d = schema();
    for (j, set) in inst.sets.iter().enumerate() {
        for &i in set {
            d.exo(r(-(i as i64), j as i64 + 1))?;
        }
    }
    for i in 1..=q as i64 + 1 {
        d.exo(r(-n - i, m + 1))?;
    }
    for j in 1..=r_ as i64 {
        d.exo(r(1, m + 1 + j))?;
    }
    d.exo(r(1, 0))?;
    for j in 1..=m {
        d.endo(s(j))?;
    }
    for j in 1..=r_ as i64 {
        d.endo(s(m + 1 + j))?;
    }
    d.endo(s(0))?;
    d.exo(s(m + 1))?;
    Ok((d, s(0)))
}

pub fn avg_query() -> AggregateQuery {
    AggregateQuery::new(AggregateFunction::Avg, ValueFunction::ReLU(1), qxyy()).expect("valid")
}

/// Coefficient of Z[i][j] in the Shapley value of S(0) on D_{q,r}.
pub fn avg_coefficient(m: usize, q: usize, r_: usize, i: usize, j: usize) -> Rational {
    let orders = Rational::new(factorial(j) * factorial(m + r_ - j), factorial(m + r_ + 1));
    orders * Rational::new(BigInt::one(), BigInt::from(i + q + 2))
}

/// The system matrix: rows (r, q), columns (j, i), both flattened row-major.
pub fn avg_system(inst: &SetCoverInstance) -> Result<ExactMatrix> {
    let (n, m) = (inst.n, inst.m());
    let mm = ExactMatrix::from_fn(m + 1, m + 1, |r_, j| {
        Rational::new(factorial(j) * factorial(m + r_ - j), factorial(m + r_ + 1))
    })?;
    let nn = ExactMatrix::from_fn(n + 1, n + 1, |q, i| Rational::new(BigInt::one(), BigInt::from(i + q + 2)))?;
    Ok(mm.kron(&nn))
}

pub type ShapleyFn<'a> = dyn Fn(&AggregateQuery, &Database, &Fact) -> Result<Rational> + Sync + 'a;

/// Recovers Z from Shapley values of S(0) over every D_{q,r}.
pub fn recover_cover_counts_avg(inst: &SetCoverInstance, shapley: &ShapleyFn<'_>) -> Result<Vec<Vec<Rational>>> {
    let (n, m) = (inst.n, inst.m());
    let a = avg_query();
    let grid: Vec<(usize, usize)> = (0..=m).flat_map(|r_| (0..=n).map(move |q| (r_, q))).collect();
    let rhs = exec::map(&grid, |&(r_, q)| {
        let (d, f) = build_avg_setcover_db(inst, q, r_)?;
        shapley(&a, &d, &f)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let z = exact_solve(&avg_system(inst)?, &rhs)?;
    Ok((0..=n).map(|i| (0..=m).map(|j| z[j * (n + 1) + i].clone()).collect()).collect())
}

/// Quantile parameter a/b as the pair (a, b) in lowest terms.
fn fraction(q: &Rational) -> Result<(i64, i64)> {
    let a: i64 = q.numer().try_into().map_err(|_| Error::OutOfRange(q.to_string()))?;
    let b: i64 = q.denom().try_into().map_err(|_| Error::OutOfRange(q.to_string()))?;
    if a <= 0 || a >= b {
        return Err(Error::OutOfRange(format!("quantile {q}")));
    }
    Ok((a, b))
}

/// Database whose quantile game is the set-cover game; S(i) plays Yᵢ.
pub fn build_qnt_setcover_db(inst: &SetCoverInstance, q: &Rational) -> Result<Database> {
    let (a, b) = fraction(q)?;
    let n = inst.n as i64;
    let w = b * (b - a);
    let mut d = schema();
    for (i, set) in inst.sets.iter().enumerate() {
        for &j in set {
            for l in 0..w {
                d.exo(r(j as i64 * w - l, i as i64 + 1))?;
            }
        }
    }
    for l in 1..=b * a * n {
        d.exo(r(-l, 0))?;
    }
    d.exo(r(n * w + 1, 0))?;
    d.exo(s(0))?;
    for i in 1..=inst.m() as i64 {
        d.endo(s(i))?;
    }
    Ok(d)
}

pub fn qnt_query(q: &Rational) -> Result<AggregateQuery> {
    AggregateQuery::new(
        AggregateFunction::quantile(q.clone())?,
        ValueFunction::GreaterThan(Rational::zero(), 1),
        qxyy(),
    )
}

/// The endogenous fact playing set i (0-based).
pub fn qnt_player(i: usize) -> Fact {
    Fact::new("S", vec![Constant::int(i as i64 + 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregates::eval;
    use crate::model::{int, rat};

    pub(crate) fn sample_instance() -> SetCoverInstance {
        SetCoverInstance::new(4, vec![vec![1, 2], vec![3, 4], vec![2, 3]]).unwrap()
    }

    #[test]
    fn sample_database_shape() {
        let (d, f) = build_avg_setcover_db(&sample_instance(), 2, 2).unwrap();
        assert_eq!(d.facts_of("R").count(), 12);
        assert_eq!(d.endo_count(), 6);
        assert_eq!(f, s(0));
        let exo = d.filter(|_, p| p == crate::model::Provenance::Exogenous);
        let with = |facts: &[Fact]| {
            let mut e = exo.clone();
            for g in facts {
                e.endo(g.clone()).unwrap();
            }
            eval(&avg_query(), &e).unwrap()
        };
        assert_eq!(with(&[s(1), s(2), s(6)]), rat(1, 8));
        assert_eq!(with(&[s(1), s(3), s(6)]), rat(1, 7));
        assert_eq!(with(&[]), int(0));
    }

    #[test]
    fn recovers_sample_counts() {
        let inst = sample_instance();
        let bf = |a: &AggregateQuery, d: &Database, f: &Fact| crate::shapley::bruteforce::shapley_bruteforce(a, d, f);
        let z = recover_cover_counts_avg(&inst, &bf).unwrap();
        let direct = inst.cover_counts();
        for i in 0..=inst.n {
            for j in 0..=inst.m() {
                assert_eq!(z[i][j], Rational::from_integer(direct[i][j].clone()), "Z[{i}][{j}]");
            }
        }
    }

    #[test]
    fn counts_by_enumeration() {
        let z = sample_instance().cover_counts();
        assert_eq!(z[0][0], BigInt::one());
        let total: BigInt = z.iter().flatten().sum();
        assert_eq!(total, BigInt::from(8));
        assert_eq!(sample_instance().count_covers(), BigInt::from(2));
    }

    #[test]
    fn qnt_game_is_cover_game() {
        let inst = sample_instance();
        for q in [rat(1, 3), rat(1, 2), rat(2, 3)] {
            let d = build_qnt_setcover_db(&inst, &q).unwrap();
            let a = qnt_query(&q).unwrap();
            let exo = d.filter(|_, p| p == crate::model::Provenance::Exogenous);
            for c in 0..1u64 << inst.m() {
                let mut e = exo.clone();
                for i in 0..inst.m() {
                    if c >> i & 1 == 1 {
                        e.endo(qnt_player(i)).unwrap();
                    }
                }
                let covers = inst.covered(c) == inst.n;
                assert_eq!(eval(&a, &e).unwrap(), int(covers as i64), "q={q} c={c}");
            }
        }
    }
}
