use num_traits::{Signed, Zero};

use super::{integrate_interval, Poly, Var};
use crate::{Error, Rational};

/// Piecewise polynomial function of one variable on `[t₀, t_k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFn {
    breaks: Vec<Rational>,
    pieces: Vec<Poly>,
    continuous: bool,
}

impl PiecewiseFn {
    /// `breaks` has one more entry than `pieces`. Pieces are univariate
    /// (written in `u`). With `continuous` set, adjacent pieces must agree
    /// at shared breakpoints.
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Poly>, continuous: bool) -> Result<Self, Error> {
        if pieces.is_empty() || breaks.len() != pieces.len() + 1 {
            return Err(Error::InvalidScenario(format!(
                "piecewise function needs k+1 breakpoints for k pieces (got {} and {})",
                breaks.len(),
                pieces.len()
            )));
        }
        if let Some(w) = breaks.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidScenario(format!(
                "breakpoints not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        if pieces.iter().any(|p| p.depends_on(Var::V)) {
            return Err(Error::InvalidScenario("piece depends on v".into()));
        }
        let f = Self {
            breaks,
            pieces,
            continuous,
        };
        if continuous {
            for i in 1..f.pieces.len() {
                let x = &f.breaks[i];
                let (l, r) = (f.pieces[i - 1].eval1(x), f.pieces[i].eval1(x));
                if l != r {
                    return Err(Error::DiscontinuousVolume(format!(
                        "jump at {x}: {l} vs {r}"
                    )));
                }
            }
        }
        Ok(f)
    }

    pub fn single(a: Rational, b: Rational, p: Poly) -> Result<Self, Error> {
        Self::new(vec![a, b], vec![p], true)
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn start(&self) -> &Rational {
        &self.breaks[0]
    }

    pub fn end(&self) -> &Rational {
        self.breaks.last().unwrap()
    }

    /// `(a, b, piece)` triples.
    pub fn intervals(&self) -> impl Iterator<Item = (&Rational, &Rational, &Poly)> {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (&self.breaks[i], &self.breaks[i + 1], p))
    }

    /// Value at `x`; at an interior breakpoint the left piece is used.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        if x < self.start() || x > self.end() {
            return None;
        }
        let i = self.breaks[1..]
            .iter()
            .position(|b| x <= b)
            .unwrap_or(self.pieces.len() - 1);
        Some(self.pieces[i].eval1(x))
    }

    /// Concatenates functions whose domains abut.
    pub fn concat(parts: &[PiecewiseFn], continuous: bool) -> Result<Self, Error> {
        let mut breaks: Vec<Rational> = Vec::new();
        let mut pieces = Vec::new();
        for f in parts {
            if let Some(last) = breaks.last() {
                if last != f.start() {
                    return Err(Error::InvalidScenario(format!(
                        "domains do not abut: {last} vs {}",
                        f.start()
                    )));
                }
                breaks.pop();
            }
            breaks.extend(f.breaks.iter().cloned());
            pieces.extend(f.pieces.iter().cloned());
        }
        Self::new(breaks, pieces, continuous)
    }

    /// Merges adjacent identical pieces.
    pub fn simplified(&self) -> Self {
        let mut breaks = vec![self.breaks[0].clone()];
        let mut pieces: Vec<Poly> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if pieces.last() == Some(p) {
                *breaks.last_mut().unwrap() = self.breaks[i + 1].clone();
            } else {
                pieces.push(p.clone());
                breaks.push(self.breaks[i + 1].clone());
            }
        }
        Self {
            breaks,
            pieces,
            continuous: self.continuous,
        }
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(f).collect(),
            continuous: self.continuous,
        }
    }

    /// Pointwise sum over a common refinement of both breakpoint sets.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.start() != other.start() || self.end() != other.end() {
            return Err(Error::InvalidScenario("adding functions on different domains".into()));
        }
        let mut pts: Vec<Rational> = self.breaks.iter().chain(other.breaks.iter()).cloned().collect();
        pts.sort();
        pts.dedup();
        let pieces = pts
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / Rational::from_integer(2.into());
                self.piece_at(&mid) + other.piece_at(&mid)
            })
            .collect();
        Self::new(pts, pieces, self.continuous && other.continuous)
    }

    fn piece_at(&self, x: &Rational) -> Poly {
        let i = self.breaks[1..]
            .iter()
            .position(|b| x <= b)
            .unwrap_or(self.pieces.len() - 1);
        self.pieces[i].clone()
    }

    /// Convexity for continuous functions whose pieces have degree ≤ 3:
    /// second derivatives are affine, so checking piece endpoints suffices,
    /// and one-sided slopes may only increase across breakpoints.
    pub fn is_convex(&self) -> bool {
        self.curvature_sign_ok(false)
    }

    pub fn is_concave(&self) -> bool {
        self.curvature_sign_ok(true)
    }

    fn curvature_sign_ok(&self, concave: bool) -> bool {
        let sign = |r: Rational| if concave { -r } else { r };
        for (a, b, p) in self.intervals() {
            if p.degree(Var::U) > 3 {
                return false;
            }
            let dd = p.derivative(Var::U).derivative(Var::U);
            if sign(dd.eval1(a)).is_negative() || sign(dd.eval1(b)).is_negative() {
                return false;
            }
        }
        for i in 1..self.pieces.len() {
            let x = &self.breaks[i];
            let left = self.pieces[i - 1].derivative(Var::U).eval1(x);
            let right = self.pieces[i].derivative(Var::U).eval1(x);
            if sign(right - left).is_negative() {
                return false;
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(Poly::is_zero)
    }
}

/// Sum of the exact integrals of all pieces.
pub fn integrate_piecewise(f: &PiecewiseFn) -> Rational {
    f.intervals()
        .map(|(a, b, p)| integrate_interval(p, a, b))
        .fold(Rational::zero(), |acc, x| acc + x)
}
