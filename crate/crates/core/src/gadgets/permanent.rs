//! Counting perfect matchings through has-duplicates.
//!
//! A 0/1 matrix becomes a family of two-element sets over rows 1..n and
//! columns n+1..2n, one per 1-entry. A j-subset of that family is pairwise
//! disjoint exactly when it is a partial matching, so the number of disjoint
//! n-subsets is the permanent.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::aggregates::{AggregateFunction, AggregateQuery, ValueFunction};
use crate::combinatorics::factorial;
use crate::cq::parse_cq;
use crate::error::{Error, Result};
use crate::exec;
use crate::gadgets::linalg::{exact_solve, ExactMatrix};
use crate::gadgets::setcover::{qxyy, SetCoverInstance, ShapleyFn};
use crate::model::{Database, Fact, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DupVariant {
    /// `Q(x,y) :- R(x,y), S(y)` with τ = id on x.
    Full,
    /// `Q(x) :- R(x,y), S(y)` with τ = relu on x.
    Relu,
}

/// Square 0/1 matrix as rows of booleans.
pub fn matrix_sets(m: &[Vec<bool>]) -> Result<SetCoverInstance> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch);
    }
    let sets: Vec<Vec<usize>> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| m[i][j]).map(move |j| vec![i + 1, n + j + 1]))
        .collect();
    SetCoverInstance::new(2 * n, sets)
}

/// Ryser-free subset DP: row i picks a column from the unused mask.
pub fn permanent(m: &[Vec<bool>]) -> Result<BigInt> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch);
    }
    if n > 20 {
        return Err(Error::OutOfRange(format!("{n}x{n} matrix")));
    }
    let mut ways = vec![BigInt::zero(); 1 << n];
    ways[0] = BigInt::one();
    for mask in 0usize..1 << n {
        if ways[mask].is_zero() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for j in 0..n {
            if m[i][j] && mask >> j & 1 == 0 {
                let w = ways[mask].clone();
                ways[mask | 1 << j] += w;
            }
        }
    }
    Ok(ways[(1 << n) - 1].clone())
}

/// Z[j]: number of pairwise disjoint j-subsets of the family.
pub fn disjoint_counts(inst: &SetCoverInstance) -> Vec<BigInt> {
    let m = inst.m();
    let mut z = vec![BigInt::zero(); m + 1];
    for c in 0u64..1 << m {
        let mut seen = vec![false; inst.n + 1];
        let mut ok = true;
        for (j, s) in inst.sets.iter().enumerate() {
            if c >> j & 1 == 1 {
                for &e in s {
                    ok &= !std::mem::replace(&mut seen[e], true);
                }
            }
        }
        if ok {
            z[c.count_ones() as usize] += 1;
        }
    }
    z
}

pub fn dup_query(variant: DupVariant) -> AggregateQuery {
    match variant {
        DupVariant::Full => AggregateQuery::new(
            AggregateFunction::Dup,
            ValueFunction::Identity(1),
            parse_cq("Q(x,y) :- R(x,y), S(y).").expect("well-formed"),
        ),
        DupVariant::Relu => AggregateQuery::new(AggregateFunction::Dup, ValueFunction::ReLU(1), qxyy()),
    }
    .expect("valid")
}

/// The database D_r with r padding facts, and the fact S(0).
pub fn build_dup_db(inst: &SetCoverInstance, r: usize, variant: DupVariant) -> Result<(Database, Fact)> {
    let m = inst.m() as i64;
    let mut d = Database::new();
    d.declare("R", 2)?;
    d.declare("S", 1)?;
    for (j, set) in inst.sets.iter().enumerate() {
        for &i in set {
            d.exo(Fact::ints("R", &[i as i64, j as i64 + 1]))?;
        }
    }
    // values that collide with the always-present witness
    let (witness, marker) = match variant {
        DupVariant::Full => (0, 0),
        DupVariant::Relu => (-1, -2),
    };
    d.exo(Fact::ints("R", &[witness, -1]))?;
    d.exo(Fact::ints("R", &[marker, 0]))?;
    for p in 1..=r as i64 {
        d.exo(Fact::ints("R", &[marker, m + p]))?;
    }
    d.exo(Fact::ints("S", &[-1]))?;
    for j in 0..=m {
        d.endo(Fact::ints("S", &[j]))?;
    }
    for p in 1..=r as i64 {
        d.endo(Fact::ints("S", &[m + p]))?;
    }
    Ok((d, Fact::ints("S", &[0])))
}

/// H[r][u] = (r+u)!, r and u in 0..=m.
pub fn hankel_system(m: usize) -> Result<ExactMatrix> {
    ExactMatrix::from_fn(m + 1, m + 1, |r, u| Rational::from_integer(factorial(r + u)))
}

/// Recovers the disjoint-subset counts from the Shapley value of S(0) on
/// D_0..D_m.
pub fn recover_disjoint_counts(inst: &SetCoverInstance, variant: DupVariant, shapley: &ShapleyFn<'_>) -> Result<Vec<Rational>> {
    let m = inst.m();
    let a = dup_query(variant);
    let rs: Vec<usize> = (0..=m).collect();
    let rhs = exec::map(&rs, |&r| {
        let (d, f) = build_dup_db(inst, r, variant)?;
        Ok(shapley(&a, &d, &f)? * Rational::from_integer(factorial(m + r + 1)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let w = exact_solve(&hankel_system(m)?, &rhs)?;
    // W_u = (m-u)! Z_{m-u}
    Ok((0..=m)
        .map(|j| &w[m - j] / Rational::from_integer(factorial(j)))
        .collect())
}

pub fn permanent_via_shapley(matrix: &[Vec<bool>], shapley: &ShapleyFn<'_>) -> Result<Rational> {
    let n = matrix.len();
    let ones = matrix.iter().flatten().filter(|b| **b).count();
    // Z has no entry n when there are fewer than n sets
    if n > 0 && ones < n {
        return Ok(Rational::zero());
    }
    let inst = matrix_sets(matrix)?;
    Ok(recover_disjoint_counts(&inst, DupVariant::Full, shapley)?[n].clone())
}
