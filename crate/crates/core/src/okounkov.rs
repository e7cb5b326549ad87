//! Planar Okounkov bodies of surface flags and slice moments of threefold
//! bodies. These give an independent route to the expected vanishing orders.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::exact::{format_rational, int, integrate_interval, integrate_piecewise, PiecewiseFn, Poly, Var};
use crate::invariants::barycenter_bound;
use crate::invariants::Check;
use crate::lattice::{Class, CurveLattice};
use crate::sweep::{cell_pc, sweep};
use crate::{DivClass, Error, Rational, Result};

/// Body `{(t, y) : 0 ≤ t ≤ τ, alpha(t) ≤ y ≤ alpha(t) + length(t)}`.
/// Both boundary functions are written in the variable `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct OkounkovBody2D {
    pub tau: Rational,
    pub alpha: PiecewiseFn,
    pub length: PiecewiseFn,
}

impl OkounkovBody2D {
    pub fn new(alpha: PiecewiseFn, length: PiecewiseFn) -> Result<Self> {
        if alpha.start() != length.start() || alpha.end() != length.end() {
            return Err(Error::InvalidScenario("boundary functions on different ranges".into()));
        }
        Ok(Self {
            tau: length.end().clone(),
            alpha,
            length,
        })
    }

    /// Vertices of the boundary polygon, lower chain left to right then upper
    /// chain right to left. Exact when both boundaries are piecewise affine.
    pub fn vertices(&self) -> Vec<(Rational, Rational)> {
        let upper = self.alpha.add(&self.length).expect("same range");
        let mut xs: Vec<Rational> = self
            .alpha
            .breaks()
            .iter()
            .chain(self.length.breaks())
            .cloned()
            .collect();
        xs.sort();
        xs.dedup();
        let mut out: Vec<(Rational, Rational)> = xs
            .iter()
            .map(|x| (x.clone(), self.alpha.eval(x).expect("in range")))
            .collect();
        for x in xs.iter().rev() {
            let y = upper.eval(x).expect("in range");
            if out.last() != Some(&(x.clone(), y.clone())) {
                out.push((x.clone(), y));
            }
        }
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        drop_collinear(out)
    }

    /// Rows `(t, alpha, alpha + length)` sampled at every breakpoint.
    pub fn plot_csv(&self) -> String {
        let upper = self.alpha.add(&self.length).expect("same range");
        let mut xs: Vec<Rational> = upper.breaks().to_vec();
        xs.dedup();
        let mut s = String::from("t,alpha,alpha_plus_length\n");
        for x in xs {
            s.push_str(&format!(
                "{},{},{}\n",
                format_rational(&x),
                format_rational(&self.alpha.eval(&x).expect("in range")),
                format_rational(&upper.eval(&x).expect("in range"))
            ));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct V {
            tau: String,
            vertices: Vec<[String; 2]>,
        }
        serde_json::to_value(V {
            tau: format_rational(&self.tau),
            vertices: self
                .vertices()
                .iter()
                .map(|(x, y)| [format_rational(x), format_rational(y)])
                .collect(),
        })
        .expect("plain strings serialize")
    }
}

fn drop_collinear(pts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    (0..n)
        .filter(|&i| {
            let (a, b, c) = (&pts[(i + n - 1) % n], &pts[i], &pts[(i + 1) % n]);
            let cross = (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0);
            !cross.is_zero()
        })
        .map(|i| pts[i].clone())
        .collect()
}

/// Body of the flag `(C, p)` for a big class `L` on the surface: the fibre
/// over `t` is `[ord_p N(t)|_C, ord_p N(t)|_C + (P(t)·C)]`.
pub fn body2d(
    lat: &CurveLattice,
    l_class: &DivClass,
    c: usize,
    mults: &DivClass,
) -> Result<OkounkovBody2D> {
    let z = lat.zariski_decompose(l_class)?;
    if !lat.square(&z.p).is_positive() {
        return Err(Error::NotPseudoeffective("class is not big".into()));
    }
    // The sweep variable u is a dummy here; the family depends on v only.
    let q = l_class.map(|x| Poly::constant(x.clone()));
    let nz: Class<Poly> = z.n.map(|x| Poly::constant(x.clone()));
    let zero = Rational::zero();
    if !nz.coeffs().iter().all(Poly::is_zero) {
        return Err(Error::InvalidScenario(
            "body2d expects a nef class; pass the positive part".into(),
        ));
    }
    let sw = sweep(lat, &q, &zero, &int(1), c)?;
    let to_u = |p: &Poly| p.eval_at(Var::U, &zero).subst(Var::V, &Poly::u());
    let mut breaks = vec![zero.clone()];
    let mut alpha = Vec::new();
    let mut length = Vec::new();
    let mut cells: Vec<_> = sw.cells.iter().collect();
    cells.sort_by_key(|a| a.v_lo.c0());
    for cell in cells {
        let hi = cell.v_hi.c0();
        let mut a = Poly::zero();
        for (&i, f) in &cell.n_coeffs {
            a += f.as_poly().scale(mults.get(i));
        }
        alpha.push(to_u(&a));
        length.push(to_u(&cell_pc(lat, cell, c)));
        breaks.push(hi);
    }
    if alpha.is_empty() {
        return Err(Error::ZeroArea);
    }
    OkounkovBody2D::new(
        PiecewiseFn::new(breaks.clone(), alpha, true)?,
        PiecewiseFn::new(breaks, length, true)?,
    )
}

pub fn area(body: &OkounkovBody2D) -> Result<Rational> {
    let a = integrate_piecewise(&body.length);
    if a.is_zero() {
        return Err(Error::ZeroArea);
    }
    Ok(a)
}

pub fn barycenter(body: &OkounkovBody2D) -> Result<(Rational, Rational)> {
    let a = area(body)?;
    let mut mt = Rational::zero();
    let mut my = Rational::zero();
    let upper = body.alpha.add(&body.length)?;
    let mut xs: Vec<Rational> = upper.breaks().to_vec();
    xs.dedup();
    for w in xs.windows(2) {
        let mid = (&w[0] + &w[1]) / int(2);
        let al = piece_at(&body.alpha, &mid);
        let le = piece_at(&body.length, &mid);
        mt += integrate_interval(&(&Poly::u() * &le), &w[0], &w[1]);
        let up = &al + &le;
        let moment = (&(&up * &up) - &(&al * &al)).scale(&Rational::new(1.into(), 2.into()));
        my += integrate_interval(&moment, &w[0], &w[1]);
    }
    Ok((mt / &a, my / a))
}

fn piece_at(f: &PiecewiseFn, x: &Rational) -> Poly {
    f.intervals()
        .find(|(a, b, _)| *a <= x && x <= *b)
        .map(|(_, _, p)| p.clone())
        .expect("point inside range")
}

/// `U + (T−U)/(r+n) ≤ S ≤ T − (T−U)/(r+n)` with `U`, `T` the range of the
/// first coordinate.
pub fn check_bounds(body: &OkounkovBody2D, s: &Rational, r: u32, n: u32) -> Check {
    let lo = body.length.start().clone();
    if body.tau == lo {
        return Check {
            name: "barycenter bound".into(),
            passed: s.is_zero(),
            detail: "degenerate range".into(),
        };
    }
    barycenter_bound("barycenter bound", &lo, &body.tau, s, r + n - 1)
}

/// First barycenter coordinate of the threefold body from its slice areas
/// `area(u) = −vol'(u)/6`.
pub fn slice_barycenter(vol: &PiecewiseFn) -> Result<Rational> {
    let area = vol.map(|p| p.derivative(Var::U).scale(&Rational::new((-1).into(), 6.into())));
    moment_ratio(&area)
}

/// Same coordinate from slice areas `area(u) = Q(u)²/2` computed on the
/// surface.
pub fn slice_barycenter_from_surface(lat: &CurveLattice, q: &[(Rational, Rational, Class<Poly>)]) -> Result<Rational> {
    let mut breaks = vec![q.first().ok_or(Error::ZeroArea)?.0.clone()];
    let mut pieces = Vec::new();
    for (_, hi, class) in q {
        breaks.push(hi.clone());
        pieces.push(lat.square(class).scale(&Rational::new(1.into(), 2.into())));
    }
    moment_ratio(&PiecewiseFn::new(breaks, pieces, false)?)
}

fn moment_ratio(area: &PiecewiseFn) -> Result<Rational> {
    let total = integrate_piecewise(area);
    if !total.is_positive() {
        return Err(Error::ZeroArea);
    }
    let moment = integrate_piecewise(&area.map(|p| &Poly::u() * p));
    Ok(moment / total)
}
