//! Game semantics: coefficients, the sum_k reduction, brute force, the
//! generic dynamic program, dispatch and axiom checks.

pub mod axioms;
pub mod bruteforce;
pub mod dispatch;
pub mod dp;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::model::{make_fact_exogenous, remove_fact, Database, Fact, Rational};

/// Entry k holds Σ over k-subsets E of Dⁿ of A(Dˣ ∪ E).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumKVector(pub Vec<Rational>);

impl SumKVector {
    pub fn from_counts(counts: &[BigInt]) -> Self {
        SumKVector(counts.iter().map(|c| Rational::from_integer(c.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Score {
    Shapley,
    Banzhaf,
}

/// q_k = k!(n−k−1)!/n!.
pub fn shapley_coefficient(k: usize, n: usize) -> Result<Rational> {
    if n == 0 || k >= n {
        return Err(Error::OutOfRange(format!("coefficient q_{k} for n = {n}")));
    }
    Ok(Rational::new(
        factorial(k) * factorial(n - k - 1),
        factorial(n),
    ))
}

/// All q_0, ..., q_{n−1}.
pub fn shapley_coefficients(n: usize) -> Vec<Rational> {
    (0..n).map(|k| shapley_coefficient(k, n).unwrap()).collect()
}

fn check_lengths(f: &SumKVector, g: &SumKVector, n: usize) -> Result<()> {
    if f.len() < n || g.len() < n {
        return Err(Error::LengthMismatch);
    }
    Ok(())
}

/// Σ_{k<n} q_k (sum_k(F) − sum_k(G)) with F = D, f exogenous and G = D∖{f}.
pub fn shapley_from_sumk(f: &SumKVector, g: &SumKVector, n: usize) -> Result<Rational> {
    check_lengths(f, g, n)?;
    let q = shapley_coefficients(n);
    Ok((0..n).fold(Rational::zero(), |acc, k| acc + &q[k] * (&f.0[k] - &g.0[k])))
}

pub fn banzhaf_from_sumk(f: &SumKVector, g: &SumKVector, n: usize) -> Result<Rational> {
    check_lengths(f, g, n)?;
    if n == 0 {
        return Err(Error::OutOfRange("Banzhaf value with no players".into()));
    }
    let total = (0..n).fold(Rational::zero(), |acc, k| acc + (&f.0[k] - &g.0[k]));
    Ok(total / Rational::from_integer(BigInt::one() << (n - 1)))
}

pub fn score_from_sumk(score: Score, f: &SumKVector, g: &SumKVector, n: usize) -> Result<Rational> {
    match score {
        Score::Shapley => shapley_from_sumk(f, g, n),
        Score::Banzhaf => banzhaf_from_sumk(f, g, n),
    }
}

/// A score of `f` from a sum_k routine run on D with f exogenous and on D∖{f}.
pub fn score_by_sumk<S>(score: Score, d: &Database, f: &Fact, sumk: S) -> Result<Rational>
where
    S: Fn(&Database) -> Result<SumKVector>,
{
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    let n = d.endo_count();
    let with_f = sumk(&make_fact_exogenous(d, f)?)?;
    let without_f = sumk(&remove_fact(d, f)?)?;
    score_from_sumk(score, &with_f, &without_f, n)
}
