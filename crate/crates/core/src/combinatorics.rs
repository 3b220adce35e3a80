use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::model::Rational;

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// C(n, 0), ..., C(n, n).
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for i in 0..n {
        c = c * (n - i) / (i + 1);
        row.push(c.clone());
    }
    row
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// out[k] = Σ a[i]·b[k−i].
pub fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Accounts for `m` extra endogenous facts that never influence the result.
pub fn pad_free(a: &[BigInt], m: usize) -> Vec<BigInt> {
    if m == 0 {
        return a.to_vec();
    }
    convolve(a, &binomial_row(m))
}

pub fn harmonic(n: usize) -> Rational {
    (1..=n).fold(Rational::zero(), |acc, i| {
        acc + Rational::new(BigInt::one(), BigInt::from(i))
    })
}

pub fn to_rational(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        let row = binomial_row(4);
        assert_eq!(row, [1, 4, 6, 4, 1].map(BigInt::from).to_vec());
        for k in 0..=6 {
            assert_eq!(binomial_row(6)[k], binomial(6, k));
        }
    }

    #[test]
    fn vandermonde_by_convolution() {
        let c = convolve(&binomial_row(3), &binomial_row(4));
        assert_eq!(c, binomial_row(7));
        assert_eq!(pad_free(&[BigInt::one()], 2), binomial_row(2));
    }

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(harmonic(3), crate::model::rat(11, 6));
    }
}
