//! Fraction-free (Bareiss) elimination on rational matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Clears denominators: returns an integer matrix `M` and `L` with `M = L·A`.
fn integerize(a: &[Vec<Rational>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let l = a
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let m = a
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect();
    (m, l)
}

/// Forward Bareiss pass on `m` (n rows, at least n columns).
/// Returns `None` if the leading n×n block is singular, else the sign of the
/// row permutation.
fn bareiss(m: &mut [Vec<BigInt>]) -> Option<i32> {
    let n = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut sign = 1;
    for k in 0..n {
        let piv = (k..n).find(|&r| !m[r][k].is_zero())?;
        if piv != k {
            m.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..cols {
                let val = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = val;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(sign)
}

/// Exact determinant.
pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    let (mut m, l) = integerize(a);
    match bareiss(&mut m) {
        None => Rational::zero(),
        Some(sign) => {
            let det_m = &m[n - 1][n - 1] * BigInt::from(sign);
            Rational::new(det_m, l.pow(n as u32))
        }
    }
}

/// Solves `A·X = B` for square `A`; `None` if `A` is singular.
pub fn solve(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let k = b.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).cloned().collect())
        .collect();
    let (mut m, _) = integerize(&aug);
    bareiss(&mut m)?;
    let mut x = vec![vec![Rational::zero(); k]; n];
    for c in 0..k {
        for i in (0..n).rev() {
            let mut acc = Rational::from_integer(m[i][n + c].clone());
            for j in i + 1..n {
                acc -= Rational::from_integer(m[i][j].clone()) * &x[j][c];
            }
            x[i][c] = acc / Rational::from_integer(m[i][i].clone());
        }
    }
    Some(x)
}

/// Exact inverse; `None` if singular.
pub fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let id: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    solve(a, &id)
}

/// Negative definiteness via leading principal minors: the k-th minor must
/// have sign (−1)^k.
pub fn is_negative_definite(a: &[Vec<Rational>]) -> bool {
    let n = a.len();
    (1..=n).all(|k| {
        let minor: Vec<Vec<Rational>> = a[..k].iter().map(|r| r[..k].to_vec()).collect();
        let d = determinant(&minor);
        if k % 2 == 1 {
            d.is_negative()
        } else {
            d.is_positive()
        }
    })
}
