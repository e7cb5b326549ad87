//! Curve lattices, divisor classes and Zariski decomposition.
//!
//! A lattice is a list of named curves with an exact symmetric intersection
//! matrix. The curves need not be independent: classes are coefficient
//! vectors over the curve list and are compared numerically through the Gram
//! form.
//!
//! Active curves are the generators used for the nef test. Only active curves
//! with negative self-intersection may enter a negative part.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::scalar::{OrderedField, Ring};
use crate::{Error, Rational, Result};

/// Coefficient vector over a lattice's curve list.
#[derive(Clone, Debug, PartialEq)]
pub struct Class<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> Class<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); n],
        }
    }

    pub fn from_vec(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// The class of the `i`-th curve.
    pub fn curve(n: usize, i: usize) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[i] = T::one();
        c
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn get(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn set(&mut self, i: usize, x: T) {
        self.coeffs[i] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(T::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|a| a.clone() * k.clone())
    }

    /// Adds `k` times the `i`-th curve.
    pub fn add_curve(&mut self, i: usize, k: T) {
        let cur = std::mem::replace(&mut self.coeffs[i], T::zero());
        self.coeffs[i] = cur + k;
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Class<U> {
        Class {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.len(), o.len(), "class length mismatch");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }
}

/// `c = P + N` with `P` nef and `N` supported on a negative-definite set.
#[derive(Clone, Debug, PartialEq)]
pub struct ZariskiPair<F> {
    pub p: Class<F>,
    pub n: Class<F>,
    /// Sorted indices of the curves with positive coefficient in `N`.
    pub support: Vec<usize>,
}

/// A negative-definite set of eligible curves with its inverse Gram block.
#[derive(Clone, Debug)]
pub struct NdSubset {
    pub curves: Vec<usize>,
    pub inverse: Vec<Vec<Rational>>,
    /// `inverse` times the positive lcm of its denominators.
    pub scaled: Vec<Vec<BigInt>>,
}

impl NdSubset {
    fn new(curves: Vec<usize>, inverse: Vec<Vec<Rational>>) -> Self {
        let den = inverse
            .iter()
            .flatten()
            .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let scaled = inverse
            .iter()
            .map(|row| row.iter().map(|x| x.numer() * (&den / x.denom())).collect())
            .collect();
        Self { curves, inverse, scaled }
    }
}

#[derive(Debug)]
pub struct CurveLattice {
    names: Vec<String>,
    active: Vec<bool>,
    gram: Vec<Vec<Rational>>,
    index: HashMap<String, usize>,
    nd_subsets: OnceLock<Vec<NdSubset>>,
}

impl Clone for CurveLattice {
    fn clone(&self) -> Self {
        Self {
            names: self.names.clone(),
            active: self.active.clone(),
            gram: self.gram.clone(),
            index: self.index.clone(),
            nd_subsets: OnceLock::new(),
        }
    }
}

impl PartialEq for CurveLattice {
    fn eq(&self, o: &Self) -> bool {
        self.names == o.names && self.active == o.active && self.gram == o.gram
    }
}

impl CurveLattice {
    pub fn new(curves: Vec<(String, bool)>, gram: Vec<Vec<Rational>>) -> Result<Self> {
        let n = curves.len();
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return bad(format!("Gram matrix must be {n}x{n}"));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return bad(format!(
                        "Gram matrix is not symmetric at ({}, {})",
                        curves[i].0, curves[j].0
                    ));
                }
            }
        }
        let mut index = HashMap::new();
        for (i, (name, _)) in curves.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return bad(format!("duplicate curve name {name:?}"));
            }
        }
        let (names, active) = curves.into_iter().unzip();
        Ok(Self {
            names,
            active,
            gram,
            index,
            nd_subsets: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown curve {name:?}")))
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    /// Active with negative self-intersection.
    pub fn is_eligible(&self, i: usize) -> bool {
        self.active[i] && Signed::is_negative(&self.gram[i][i])
    }

    pub fn active_curves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.active[i])
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn gram_block(&self, s: &[usize]) -> Vec<Vec<Rational>> {
        s.iter()
            .map(|&i| s.iter().map(|&j| self.gram[i][j].clone()).collect())
            .collect()
    }

    /// `a · D_j`.
    pub fn pair_curve<T: Ring>(&self, a: &Class<T>, j: usize) -> T {
        let mut acc = T::zero();
        for (i, x) in a.coeffs.iter().enumerate() {
            let g = &self.gram[i][j];
            if !g.is_zero() && !x.is_zero() {
                acc = acc + x.clone() * T::from_rational(g);
            }
        }
        acc
    }

    /// `aᵀ·G·b`.
    pub fn pair<T: Ring>(&self, a: &Class<T>, b: &Class<T>) -> Result<T> {
        if a.len() != self.len() || b.len() != self.len() {
            return Err(Error::InvalidScenario(format!(
                "class lengths {} and {} do not match a lattice of {} curves",
                a.len(),
                b.len(),
                self.len()
            )));
        }
        let mut acc = T::zero();
        for (j, y) in b.coeffs.iter().enumerate() {
            if !y.is_zero() {
                acc = acc + self.pair_curve(a, j) * y.clone();
            }
        }
        Ok(acc)
    }

    pub fn square<T: Ring>(&self, a: &Class<T>) -> T {
        self.pair(a, a).expect("class length checked by caller")
    }

    /// Nonnegative against every active curve.
    pub fn is_nef<F: OrderedField>(&self, c: &Class<F>) -> bool {
        self.active_curves()
            .all(|j| !self.pair_curve(c, j).is_neg())
    }

    pub fn is_negative_definite(&self, s: &[usize]) -> bool {
        linalg::is_negative_definite(&self.gram_block(s))
    }

    /// Iterative Zariski decomposition over any ordered field containing the
    /// rationals. Linear solves use the rational inverse of the Gram block,
    /// so coefficients of `c` are never divided.
    pub fn zariski_decompose<F: OrderedField>(&self, c: &Class<F>) -> Result<ZariskiPair<F>> {
        let n = self.len();
        if c.len() != n {
            return Err(Error::InvalidScenario("class length mismatch".into()));
        }
        let not_psef = |why: String| Err(Error::NotPseudoeffective(why));
        let cap = self.active_curves().count() + 1;
        let mut support: Vec<usize> = Vec::new();
        let mut a: Vec<F> = Vec::new();
        let mut p = c.clone();
        let mut iterations = 0;
        loop {
            let entering: Vec<usize> = self
                .active_curves()
                .filter(|&j| self.pair_curve(&p, j).is_neg())
                .collect();
            if entering.is_empty() {
                break;
            }
            iterations += 1;
            if iterations > cap {
                return not_psef("support did not stabilise".into());
            }
            for j in entering {
                if !self.is_eligible(j) {
                    return not_psef(format!(
                        "negative against {} which cannot enter a negative part",
                        self.names[j]
                    ));
                }
                if support.contains(&j) {
                    return not_psef(format!("{} re-enters the support", self.names[j]));
                }
                support.push(j);
            }
            support.sort_unstable();
            let Some(inv) = linalg::inverse(&self.gram_block(&support)) else {
                return not_psef("singular support".into());
            };
            let rhs: Vec<F> = support.iter().map(|&j| self.pair_curve(c, j)).collect();
            a = apply_inverse(&inv, &rhs);
            p = c.clone();
            for (k, &i) in support.iter().enumerate() {
                p.add_curve(i, -a[k].clone());
            }
        }
        if let Some(k) = a.iter().position(F::is_neg) {
            return not_psef(format!("negative coefficient on {}", self.names[support[k]]));
        }
        if !self.is_negative_definite(&support) {
            return not_psef("support is not negative definite".into());
        }
        if self.square(&p).is_neg() {
            return not_psef("nef part has negative square".into());
        }
        let mut nclass = Class::zero(n);
        let mut final_support = Vec::new();
        for (k, &i) in support.iter().enumerate() {
            if a[k].is_pos() {
                nclass.set(i, a[k].clone());
                final_support.push(i);
            }
        }
        let pair = ZariskiPair {
            p,
            n: nclass,
            support: final_support,
        };
        self.verify_pair(c, &pair)?;
        Ok(pair)
    }

    /// Defensive postcondition: the decomposition satisfies every defining
    /// property.
    pub fn verify_pair<F: OrderedField>(&self, c: &Class<F>, z: &ZariskiPair<F>) -> Result<()> {
        let fail = |m: &str| Err(Error::InvariantViolation(format!("Zariski pair: {m}")));
        if z.p.add(&z.n) != *c {
            return fail("P + N differs from the input");
        }
        if !self.is_nef(&z.p) {
            return fail("P is not nef");
        }
        for i in 0..self.len() {
            let in_support = z.support.contains(&i);
            if in_support != z.n.get(i).is_pos() || z.n.get(i).is_neg() {
                return fail("N does not match its support");
            }
            if in_support && !self.pair_curve(&z.p, i).is_zero() {
                return fail("P is not orthogonal to the support");
            }
        }
        if !self.is_negative_definite(&z.support) {
            return fail("support is not negative definite");
        }
        Ok(())
    }

    /// All negative-definite subsets of eligible curves (including the empty
    /// set) with their inverse Gram blocks. Computed once per lattice.
    pub fn nd_subsets(&self) -> &[NdSubset] {
        self.nd_subsets.get_or_init(|| {
            let eligible: Vec<usize> = (0..self.len()).filter(|&i| self.is_eligible(i)).collect();
            let mut out = vec![NdSubset::new(vec![], vec![])];
            let mut stack: Vec<(Vec<usize>, usize)> = vec![(vec![], 0)];
            // Negative definiteness is inherited by subsets, so the search
            // only extends sets that already qualify.
            while let Some((set, from)) = stack.pop() {
                for (k, &j) in eligible.iter().enumerate().skip(from) {
                    let mut next = set.clone();
                    next.push(j);
                    if self.is_negative_definite(&next) {
                        let inverse = linalg::inverse(&self.gram_block(&next))
                            .expect("negative definite blocks are invertible");
                        out.push(NdSubset::new(next.clone(), inverse));
                        stack.push((next, k + 1));
                    }
                }
            }
            out
        })
    }

    /// Exhaustive oracle: tries every negative-definite support and returns
    /// the valid pair, or `None` when no support works (not pseudoeffective).
    /// Panics if two supports are valid, which would contradict uniqueness.
    pub fn zariski_oracle(&self, c: &Class<Rational>) -> Option<ZariskiPair<Rational>> {
        let rhs_all: Vec<Rational> = (0..self.len()).map(|j| self.pair_curve(c, j)).collect();
        // Positive multiples of the right-hand sides, so signs can be decided
        // in integer arithmetic before any rational is formed.
        let rhs_den = rhs_all.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let rhs_int: Vec<BigInt> = rhs_all
            .iter()
            .map(|x| x.numer() * (&rhs_den / x.denom()))
            .collect();
        let mut found: Option<ZariskiPair<Rational>> = None;
        for sub in self.nd_subsets() {
            let all_positive = sub.scaled.iter().all(|row| {
                let x: BigInt = row.iter().zip(&sub.curves).map(|(g, &j)| g * &rhs_int[j]).sum();
                x.is_positive()
            });
            if !all_positive {
                continue;
            }
            let a: Vec<Rational> = sub
                .inverse
                .iter()
                .map(|row| row.iter().zip(&sub.curves).map(|(g, &j)| g * &rhs_all[j]).sum())
                .collect();
            let mut p = c.clone();
            for (k, &i) in sub.curves.iter().enumerate() {
                p.add_curve(i, -a[k].clone());
            }
            if !self.is_nef(&p) {
                continue;
            }
            let mut n = Class::zero(self.len());
            for (k, &i) in sub.curves.iter().enumerate() {
                n.set(i, a[k].clone());
            }
            let pair = ZariskiPair {
                p,
                n,
                support: sub.curves.clone(),
            };
            if let Some(prev) = &found {
                panic!(
                    "two valid Zariski supports {:?} and {:?}",
                    prev.support, pair.support
                );
            }
            found = Some(pair);
        }
        found
    }

    /// Solves `Gram|_S · a = (c·C_i)` on a fixed support for a class with
    /// coefficients in any ring. Returns `None` if the block is singular.
    pub fn solve_on_support<T: Ring>(&self, support: &[usize], c: &Class<T>) -> Option<Vec<T>> {
        let inv = linalg::inverse(&self.gram_block(support))?;
        let rhs: Vec<T> = support.iter().map(|&j| self.pair_curve(c, j)).collect();
        Some(apply_inverse(&inv, &rhs))
    }
}

fn apply_inverse<T: Ring>(inv: &[Vec<Rational>], rhs: &[T]) -> Vec<T> {
    inv.iter()
        .map(|row| {
            row.iter().zip(rhs).fold(T::zero(), |acc, (g, b)| {
                if g.is_zero() {
                    acc
                } else {
                    acc + T::from_rational(g) * b.clone()
                }
            })
        })
        .collect()
}

/// Convenience: class from rational coefficients.
pub fn class_of(coeffs: &[Rational]) -> Class<Rational> {
    Class::from_vec(coeffs.to_vec())
}
