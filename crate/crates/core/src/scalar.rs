//! Ordered-field abstraction used by the lattice and Zariski code.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::Rational;

/// A commutative ring containing the rationals. Classes with coefficients in
/// any `Ring` can be paired against the lattice.
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;
}

/// An exact ordered field.
pub trait OrderedField: Ring + PartialOrd + Div<Output = Self> {
    fn is_neg(&self) -> bool {
        *self < Self::zero()
    }

    fn is_pos(&self) -> bool {
        *self > Self::zero()
    }
}

impl Ring for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl OrderedField for Rational {}

/// `re + eps·ε` with ε a positive infinitesimal, ordered lexicographically.
///
/// Evaluating a Zariski decomposition at `v + ε` yields the support that is
/// valid on an open interval just above `v`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Infinitesimal<T> {
    pub re: T,
    pub eps: T,
}

impl<T: OrderedField> Infinitesimal<T> {
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    pub fn real(re: T) -> Self {
        Self { re, eps: T::zero() }
    }
}

impl<T: fmt::Debug> fmt::Debug for Infinitesimal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}ε)", self.re, self.eps)
    }
}

impl<T: OrderedField> PartialOrd for Infinitesimal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.re.partial_cmp(&other.re)? {
            Ordering::Equal => self.eps.partial_cmp(&other.eps),
            ord => Some(ord),
        }
    }
}

impl<T: OrderedField> Add for Infinitesimal<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: OrderedField> Sub for Infinitesimal<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: OrderedField> Mul for Infinitesimal<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let eps = self.re.clone() * o.eps + self.eps * o.re.clone();
        Self::new(self.re * o.re, eps)
    }
}

impl<T: OrderedField> Div for Infinitesimal<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        assert!(
            !o.re.is_zero(),
            "division by a purely infinitesimal quantity"
        );
        let re = self.re.clone() / o.re.clone();
        let eps = (self.eps * o.re.clone() - self.re * o.eps) / (o.re.clone() * o.re);
        Self::new(re, eps)
    }
}

impl<T: OrderedField> Neg for Infinitesimal<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<T: OrderedField> Zero for Infinitesimal<T> {
    fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<T: OrderedField> One for Infinitesimal<T> {
    fn one() -> Self {
        Self::new(T::one(), T::zero())
    }
}

impl<T: OrderedField> Ring for Infinitesimal<T> {
    fn from_rational(r: &Rational) -> Self {
        Self::real(T::from_rational(r))
    }
}

impl<T: OrderedField> OrderedField for Infinitesimal<T> {}
