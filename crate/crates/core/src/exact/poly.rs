use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::format_rational;
use crate::Rational;

/// Polynomial variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
}

/// Sparse polynomial in `u` and `v` with rational coefficients.
///
/// Keys are `(deg_u, deg_v)`. Zero coefficients are never stored, so
/// structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn u() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn v() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn var(x: Var) -> Self {
        match x {
            Var::U => Self::u(),
            Var::V => Self::v(),
        }
    }

    pub fn monomial(c: Rational, du: u32, dv: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((du, dv), c);
        p
    }

    /// `c0 + cu·u + cv·v`.
    pub fn affine(c0: Rational, cu: Rational, cv: Rational) -> Self {
        let mut p = Self::constant(c0);
        p.add_term((1, 0), cu);
        p.add_term((0, 1), cv);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in it {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, key: (u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, du: u32, dv: u32) -> Rational {
        self.terms.get(&(du, dv)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self, x: Var) -> u32 {
        self.terms
            .keys()
            .map(|&(a, b)| if x == Var::U { a } else { b })
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn depends_on(&self, x: Var) -> bool {
        self.degree(x) > 0
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, u: &Rational, v: &Rational) -> Rational {
        let mut upow: Vec<Rational> = vec![Rational::one()];
        let mut vpow: Vec<Rational> = vec![Rational::one()];
        let mut acc = Rational::zero();
        for (&(a, b), c) in &self.terms {
            while upow.len() <= a as usize {
                let next = upow.last().unwrap() * u;
                upow.push(next);
            }
            while vpow.len() <= b as usize {
                let next = vpow.last().unwrap() * v;
                vpow.push(next);
            }
            acc += c * &upow[a as usize] * &vpow[b as usize];
        }
        acc
    }

    /// Evaluates a polynomial in one variable; the other must be absent.
    pub fn eval1(&self, x: &Rational) -> Rational {
        let z = Rational::zero();
        match (self.depends_on(Var::U), self.depends_on(Var::V)) {
            (_, false) => self.eval(x, &z),
            (false, true) => self.eval(&z, x),
            (true, true) => panic!("eval1 on bivariate polynomial {self}"),
        }
    }

    /// Substitutes `x := val`.
    pub fn eval_at(&self, x: Var, val: &Rational) -> Self {
        self.subst(x, &Self::constant(val.clone()))
    }

    /// Substitutes `x := q`.
    pub fn subst(&self, x: Var, q: &Poly) -> Self {
        let mut out = Self::zero();
        let mut powers: Vec<Poly> = vec![Self::one()];
        for (&(a, b), c) in &self.terms {
            let (e, rest) = match x {
                Var::U => (a, Self::monomial(c.clone(), 0, b)),
                Var::V => (b, Self::monomial(c.clone(), a, 0)),
            };
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * q;
                powers.push(next);
            }
            out += &rest * &powers[e as usize];
        }
        out
    }

    pub fn derivative(&self, x: Var) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(&(a, b), c)| match x {
            Var::U if a > 0 => Some(((a - 1, b), c * Rational::from_integer(a.into()))),
            Var::V if b > 0 => Some(((a, b - 1), c * Rational::from_integer(b.into()))),
            _ => None,
        }))
    }

    pub fn antiderivative(&self, x: Var) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), c)| match x {
            Var::U => ((a + 1, b), c / Rational::from_integer((a + 1).into())),
            Var::V => ((a, b + 1), c / Rational::from_integer((b + 1).into())),
        }))
    }

    /// `∫_lo^hi p dx` where the bounds do not involve `x`.
    pub fn integrate_var(&self, x: Var, lo: &Poly, hi: &Poly) -> Self {
        debug_assert!(!lo.depends_on(x) && !hi.depends_on(x));
        let f = self.antiderivative(x);
        &f.subst(x, hi) - &f.subst(x, lo)
    }

    /// `p(u/k, v/k)`.
    pub fn rescale_args(&self, k: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), c)| {
            let mut d = Rational::one();
            for _ in 0..a + b {
                d *= k;
            }
            ((a, b), c / d)
        }))
    }
}

impl fmt::Display for Poly {
    /// Canonical expanded form: ascending total degree, `u` before `v`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|x, y| (x.0 + x.1, y.0).cmp(&(y.0 + y.1, x.0)));
        for (i, key) in keys.iter().enumerate() {
            let c = &self.terms[key];
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = monomial_str(key.0, key.1);
            if mono.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

fn monomial_str(a: u32, b: u32) -> String {
    let part = |name: &str, e: u32| match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    };
    [part("u", a), part("v", b)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

impl crate::scalar::Ring for Poly {
    fn from_rational(r: &Rational) -> Self {
        Poly::constant(r.clone())
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, o: Poly) {
        for (k, c) in o.terms {
            self.add_term(k, c);
        }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, o: &Poly) {
        for (k, c) in &o.terms {
            self.add_term(*k, c.clone());
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, o: Poly) -> Poly {
        self += o;
        self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(*k, -c);
        }
        r
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &o.terms {
                r.add_term((a + x, b + y), c * d);
            }
        }
        r
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

/// Exact `∫_a^b p` for a polynomial in a single variable (either `u` or `v`).
pub fn integrate_interval(p: &Poly, a: &Rational, b: &Rational) -> Rational {
    let x = if p.depends_on(Var::V) { Var::V } else { Var::U };
    assert!(
        !(p.depends_on(Var::U) && p.depends_on(Var::V)),
        "integrate_interval needs a univariate polynomial, got {p}"
    );
    let f = p.antiderivative(x);
    f.eval1(b) - f.eval1(a)
}

/// `u ↦ ∫_{lo(u)}^{hi(u)} p(u, v) dv`.
pub fn integrate_strip(p: &Poly, lo: &AffineForm, hi: &AffineForm) -> Poly {
    p.integrate_var(Var::V, lo.as_poly(), hi.as_poly())
}

/// Polynomial of total degree at most one: `c0 + cu·u + cv·v`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AffineForm(Poly);

impl AffineForm {
    pub fn new(p: Poly) -> Option<Self> {
        (p.total_degree() <= 1).then_some(Self(p))
    }

    pub fn from_parts(c0: Rational, cu: Rational, cv: Rational) -> Self {
        Self(Poly::affine(c0, cu, cv))
    }

    pub fn constant(c: Rational) -> Self {
        Self(Poly::constant(c))
    }

    pub fn c0(&self) -> Rational {
        self.0.coeff(0, 0)
    }

    pub fn cu(&self) -> Rational {
        self.0.coeff(1, 0)
    }

    pub fn cv(&self) -> Rational {
        self.0.coeff(0, 1)
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn eval(&self, u: &Rational, v: &Rational) -> Rational {
        self.c0() + self.cu() * u + self.cv() * v
    }

    /// The line `self = 0` written as `v = w(u)`; `None` if `v` is absent.
    pub fn solve_for_v(&self) -> Option<AffineForm> {
        let cv = self.cv();
        if cv.is_zero() {
            return None;
        }
        Some(Self::from_parts(-self.c0() / &cv, -self.cu() / &cv, Rational::zero()))
    }

    /// Restriction to the line `v = w(u)`, an affine function of `u`.
    pub fn along(&self, w: &AffineForm) -> AffineForm {
        AffineForm(self.0.subst(Var::V, w.as_poly()))
    }

    /// Root in `u` of a `v`-free form, if it is not constant.
    pub fn root_u(&self) -> Option<Rational> {
        let cu = self.cu();
        (!cu.is_zero() && self.cv().is_zero()).then(|| -self.c0() / cu)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Affine({})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_display() {
        assert_eq!(p("28 - u^3 + 1/2*(u-1)^3").to_string(), "55/2 + 3/2*u - 3/2*u^2 - 1/2*u^3");
        assert_eq!(p("(u - v)^2").to_string(), "u^2 - 2*u*v + v^2");
        assert_eq!(p("-v + 3").to_string(), "3 - v");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn interval_examples() {
        assert_eq!(integrate_interval(&p("7 - 4*v"), &int(0), &int(1)), int(5));
        // 8v - 3v^2 + v^3/3 from 1 to 2 is 20/3 - 16/3.
        assert_eq!(integrate_interval(&p("(2-v)*(4-v)"), &int(1), &int(2)), rat(4, 3));
        assert_eq!(integrate_interval(&Poly::zero(), &int(3), &int(9)), int(0));
    }

    #[test]
    fn strip_examples() {
        let zero = AffineForm::constant(int(0));
        let hi = AffineForm::new(Poly::u()).unwrap();
        assert_eq!(integrate_strip(&p("(u-v)^2"), &zero, &hi), p("1/3*u^3"));
        let t = AffineForm::constant(rat(5, 3));
        assert_eq!(integrate_strip(&Poly::one(), &zero, &t), Poly::constant(rat(5, 3)));
    }

    #[test]
    fn strip_feeds_qp_upper_cell() {
        // With w = 2-u and r = 2w-v the integrand is r(2w+r) on r ∈ [0,w]: 4w³/3.
        let lo = AffineForm::new(p("2 - u")).unwrap();
        let hi = AffineForm::new(p("4 - 2*u")).unwrap();
        let got = integrate_strip(&p("(4-2*u-v)*(8-4*u-v)"), &lo, &hi);
        assert_eq!(got, p("2 - u").pow(3).scale(&rat(4, 3)));
    }

    #[test]
    fn substitution_and_derivatives() {
        let q = p("u^2*v + 3*v^2 - u");
        assert_eq!(q.derivative(Var::V), p("u^2 + 6*v"));
        assert_eq!(q.antiderivative(Var::U).derivative(Var::U), q);
        assert_eq!(q.subst(Var::V, &p("1 - u")), p("u^2 - u^3 + 3*(1-u)^2 - u"));
        assert_eq!(q.eval(&int(2), &int(-1)), int(-4 + 3 - 2));
        assert_eq!(q.rescale_args(&int(2)), p("1/8*u^2*v + 3/4*v^2 - 1/2*u"));
    }

    #[test]
    fn affine_lines() {
        let g = AffineForm::new(p("3 - u - 2*v")).unwrap();
        let w = g.solve_for_v().unwrap();
        assert_eq!(w.as_poly(), &p("3/2 - 1/2*u"));
        assert!(g.along(&w).as_poly().is_zero());
        assert_eq!(AffineForm::new(p("2*u - 1")).unwrap().root_u(), Some(rat(1, 2)));
        assert!(AffineForm::new(p("u*v")).is_none());
    }
}
