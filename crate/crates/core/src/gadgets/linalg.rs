//! Dense exact matrices and a fraction-free solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl ExactMatrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch);
        }
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Ok(ExactMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    /// H[i][j] = 1/(i+j+1), 0-based.
    pub fn hilbert(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| Rational::new(BigInt::one(), BigInt::from(i + j + 1)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    /// Entry ((i1,i2),(j1,j2)) = self[i1][j1]·other[i2][j2], flattened row-major.
    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = Vec::with_capacity(rows * cols);
        for i1 in 0..self.rows {
            for i2 in 0..other.rows {
                for j1 in 0..self.cols {
                    for j2 in 0..other.cols {
                        data.push(self.get(i1, j1) * other.get(i2, j2));
                    }
                }
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch);
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(Rational::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect())
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch);
        }
        ExactMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Rational::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        })
    }

    pub fn determinant(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch);
        }
        let (mut a, scale) = self.integer_rows(&vec![Rational::zero(); self.rows]);
        let n = self.rows;
        match bareiss(&mut a, n) {
            Some(sign) => {
                let det = &a[n - 1][n - 1] * BigInt::from(sign);
                Ok(Rational::new(det, scale.iter().fold(BigInt::one(), |acc, s| acc * s)))
            }
            None => Ok(Rational::zero()),
        }
    }

    /// Augmented integer rows [A | b], each row scaled by the lcm of its
    /// denominators. Returns the rows and the scale of each.
    fn integer_rows(&self, b: &[Rational]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut out = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for (i, bi) in b.iter().enumerate().take(self.rows) {
            let row: Vec<&Rational> = (0..self.cols).map(|j| self.get(i, j)).chain([bi]).collect();
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            out.push(row.iter().map(|x| (*x * Rational::from_integer(l.clone())).to_integer()).collect());
            scales.push(l);
        }
        (out, scales)
    }
}

/// In-place Bareiss elimination over the first n columns with partial
/// pivoting on numerator magnitude. Returns the permutation sign, or None
/// when singular.
fn bareiss(a: &mut [Vec<BigInt>], n: usize) -> Option<i32> {
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .max_by(|&i, &j| a[i][k].abs().cmp(&a[j][k].abs()).then(j.cmp(&i)))?;
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..a[i].len() {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Some(sign)
}

/// Solves L·z = a exactly.
pub fn exact_solve(l: &ExactMatrix, a: &[Rational]) -> Result<Vec<Rational>> {
    if l.rows != l.cols || a.len() != l.rows {
        return Err(Error::DimensionMismatch);
    }
    let n = l.rows;
    let (mut m, _) = l.integer_rows(a);
    bareiss(&mut m, n).ok_or(Error::SingularMatrix)?;
    let mut z = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut rhs = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            rhs -= Rational::from_integer(m[i][j].clone()) * &z[j];
        }
        z[i] = rhs / Rational::from_integer(m[i][i].clone());
    }
    Ok(z)
}
