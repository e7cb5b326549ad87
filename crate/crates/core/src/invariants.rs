//! Expected vanishing orders at the threefold, surface and point levels,
//! the point correction `F_p`, the δ-chain, and the identities that
//! cross-check a computation.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::exact::{int, integrate_interval, integrate_piecewise, integrate_strip, PiecewiseFn, Poly, Var};
use crate::lattice::CurveLattice;
use crate::sweep::{cell_pc, cell_psquare, SupportCell, SurfaceChamber, SweepResult};
use crate::{DivClass, Error, ParamClass, Rational, Result};

/// Picard basis with a symmetric triple intersection form.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreefoldModel {
    basis: Vec<String>,
    tensor: BTreeMap<[usize; 3], Rational>,
}

impl ThreefoldModel {
    /// Entries are given once per unordered triple; every permutation is
    /// filled in. Conflicting duplicates are rejected.
    pub fn new(basis: Vec<String>, entries: &[([String; 3], Rational)]) -> Result<Self> {
        let mut tensor = BTreeMap::new();
        for (names, value) in entries {
            let mut key = [0usize; 3];
            for (k, n) in names.iter().enumerate() {
                key[k] = basis.iter().position(|b| b == n).ok_or_else(|| {
                    Error::InvalidScenario(format!("unknown basis element {n:?}"))
                })?;
            }
            key.sort_unstable();
            if let Some(old) = tensor.insert(key, value.clone()) {
                if &old != value {
                    return Err(Error::InvalidScenario(format!(
                        "conflicting intersection numbers for {names:?}"
                    )));
                }
            }
        }
        Ok(Self { basis, tensor })
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    /// Entries keyed by sorted index triples.
    pub fn entries(&self) -> &BTreeMap<[usize; 3], Rational> {
        &self.tensor
    }

    pub fn triple(&self, i: usize, j: usize, k: usize) -> Rational {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.tensor.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// `(a·a·a)` for a class with polynomial coefficients.
    pub fn cube(&self, a: &[Poly]) -> Result<Poly> {
        if a.len() != self.basis.len() {
            return Err(Error::InvalidScenario(format!(
                "class has {} coefficients for a basis of {}",
                a.len(),
                self.basis.len()
            )));
        }
        let n = a.len();
        let mut out = Poly::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let t = self.triple(i, j, k);
                    if !t.is_zero() {
                        out += (&(&a[i] * &a[j]) * &a[k]).scale(&t);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// How a threefold chamber supplies its volume.
#[derive(Clone, Debug, PartialEq)]
pub enum VolumeSource {
    /// Positive part in the Picard basis; volume is its cube.
    Class(Vec<Poly>),
    /// Volume polynomial given directly.
    Poly(Poly),
}

/// Nef and negative parts of the family restricted to the refinement
/// surface.
#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    pub q: ParamClass,
    pub n: ParamClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chamber1D {
    pub lo: Rational,
    pub hi: Rational,
    pub volume: VolumeSource,
    pub restriction: Option<Restriction>,
}

/// A point on the refinement curve.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSpec {
    pub name: String,
    /// Local intersection multiplicity of each curve with the refinement
    /// curve at the point.
    pub mults: DivClass,
    /// Extra term added to the order integrand.
    pub offset: Poly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaLevel {
    pub label: String,
    pub a: Rational,
    pub s: Rational,
}

/// Assembles `u ↦ vol(L − uY)` from the chamber list.
pub fn vol_family(model: Option<&ThreefoldModel>, chambers: &[Chamber1D]) -> Result<PiecewiseFn> {
    if chambers.is_empty() {
        return Err(Error::InvalidScenario("no threefold chambers".into()));
    }
    let mut breaks = vec![chambers[0].lo.clone()];
    let mut pieces = Vec::new();
    for (k, ch) in chambers.iter().enumerate() {
        if k > 0 && chambers[k - 1].hi != ch.lo {
            return Err(Error::InvalidScenario(format!(
                "threefold chambers do not abut at {}",
                ch.lo
            )));
        }
        let vol = match &ch.volume {
            VolumeSource::Poly(p) => p.clone(),
            VolumeSource::Class(c) => model
                .ok_or_else(|| {
                    Error::InvalidScenario("chamber class given without an intersection form".into())
                })?
                .cube(c)?,
        };
        if vol.depends_on(Var::V) || vol.degree(Var::U) > 3 {
            return Err(Error::InvalidScenario(format!(
                "volume on [{}, {}] must be a cubic in u, got {vol}",
                ch.lo, ch.hi
            )));
        }
        breaks.push(ch.hi.clone());
        pieces.push(vol);
    }
    let f = PiecewiseFn::new(breaks, pieces, true)?;
    let end = f.eval(f.end()).expect("endpoint in range");
    if !end.is_zero() {
        return Err(Error::InvalidScenario(format!(
            "volume does not vanish at the end of the range (value {end})"
        )));
    }
    Ok(f)
}

/// `vol(L)`: the volume at the left endpoint.
pub fn normalizer(vol: &PiecewiseFn) -> Result<Rational> {
    let v = vol.eval(vol.start()).expect("start in range");
    if !v.is_positive() {
        return Err(Error::InvalidScenario(format!("vol(L) = {v} is not positive")));
    }
    Ok(v)
}

/// `(1/vol(L)) ∫ vol(L − uY) du`.
pub fn s_divisor(vol: &PiecewiseFn) -> Result<Rational> {
    Ok(integrate_piecewise(vol) / normalizer(vol)?)
}

/// Restriction data of every chamber, as sweep input.
pub fn surface_chambers(chambers: &[Chamber1D]) -> Result<Vec<SurfaceChamber>> {
    chambers
        .iter()
        .map(|ch| {
            let r = ch.restriction.as_ref().ok_or_else(|| {
                Error::InvalidScenario(format!(
                    "chamber [{}, {}] has no surface restriction",
                    ch.lo, ch.hi
                ))
            })?;
            Ok(SurfaceChamber {
                lo: ch.lo.clone(),
                hi: ch.hi.clone(),
                q: r.q.clone(),
                n: r.n.clone(),
            })
        })
        .collect()
}

fn cell_integral(cell: &SupportCell, integrand: &Poly) -> Rational {
    let inner = integrate_strip(integrand, &cell.v_lo, &cell.v_hi);
    integrate_interval(&inner, &cell.u_lo, &cell.u_hi)
}

/// Surface-level expected vanishing order along the sweep curve.
pub fn s_curve(lat: &CurveLattice, sw: &SweepResult, vol: &Rational) -> Rational {
    let mut total = Rational::zero();
    for ch in &sw.chambers {
        let d = ch.n.get(sw.curve);
        if !d.is_zero() {
            let q2 = lat.square(&ch.q);
            total += integrate_interval(&(d * &q2), &ch.lo, &ch.hi);
        }
    }
    for cell in &sw.cells {
        total += cell_integral(cell, &cell_psquare(lat, cell));
    }
    int(3) * total / vol
}

/// `(3/vol) ∫∫ (P·C)²`, the point-independent part of `S(W; p)`.
pub fn base_term(lat: &CurveLattice, sw: &SweepResult, vol: &Rational) -> Rational {
    let total: Rational = sw
        .cells
        .iter()
        .map(|cell| {
            let pc = cell_pc(lat, cell, sw.curve);
            cell_integral(cell, &(&pc * &pc))
        })
        .sum();
    int(3) * total / vol
}

/// Value of `F_p` plus a flag raised when the order integrand is negative
/// somewhere on the region.
#[derive(Clone, Debug, PartialEq)]
pub struct FValue {
    pub value: Rational,
    pub negative_integrand: bool,
}

/// The order integrand `M_p(u, v)` on one cell.
pub fn ord_integrand(
    lat: &CurveLattice,
    sw: &SweepResult,
    cell: &SupportCell,
    sigma: &DivClass,
    point: &PointSpec,
) -> Poly {
    let ch = &sw.chambers[cell.chamber];
    let d = ch.n.get(sw.curve);
    let shift = &Poly::v() + d;
    let mut m = point.offset.clone();
    for i in 0..lat.len() {
        let mult = point.mults.get(i);
        if i == sw.curve || mult.is_zero() {
            continue;
        }
        let mut coeff = ch.n.get(i).clone();
        if let Some(f) = cell.n_coeffs.get(&i) {
            coeff += f.as_poly();
        }
        let s = sigma.get(i);
        if !s.is_zero() {
            coeff = &coeff - &shift.scale(s);
        }
        m += coeff.scale(mult);
    }
    m
}

fn validate_point(lat: &CurveLattice, c: usize, point: &PointSpec) -> Result<()> {
    if point.mults.len() != lat.len() {
        return Err(Error::InvalidScenario(format!(
            "point {} has the wrong number of multiplicities",
            point.name
        )));
    }
    if !point.mults.get(c).is_zero() {
        return Err(Error::InvalidScenario(format!(
            "point {} lists a multiplicity for the refinement curve itself",
            point.name
        )));
    }
    if point.mults.coeffs().iter().any(Signed::is_negative) {
        return Err(Error::InvalidScenario(format!(
            "point {} has a negative multiplicity",
            point.name
        )));
    }
    Ok(())
}

fn cell_vertices(cell: &SupportCell) -> Vec<(Rational, Rational)> {
    let z = Rational::zero();
    let mut out = Vec::new();
    for u in [&cell.u_lo, &cell.u_hi] {
        out.push((u.clone(), cell.v_lo.eval(u, &z)));
        out.push((u.clone(), cell.v_hi.eval(u, &z)));
    }
    out
}

/// `F_p = (6/vol) ∫∫ (P·C)·M_p`.
pub fn f_point(
    lat: &CurveLattice,
    sw: &SweepResult,
    vol: &Rational,
    sigma: &DivClass,
    point: &PointSpec,
) -> Result<FValue> {
    validate_point(lat, sw.curve, point)?;
    let mut total = Rational::zero();
    let mut negative = false;
    for cell in &sw.cells {
        let m = ord_integrand(lat, sw, cell, sigma, point);
        negative |= cell_vertices(cell).iter().any(|(u, v)| m.eval(u, v).is_negative());
        total += cell_integral(cell, &(&cell_pc(lat, cell, sw.curve) * &m));
    }
    Ok(FValue {
        value: int(6) * total / vol,
        negative_integrand: negative,
    })
}

/// `S(W; p) = (3/vol) ∫∫ (P·C)² + F_p`.
pub fn s_point(
    lat: &CurveLattice,
    sw: &SweepResult,
    vol: &Rational,
    sigma: &DivClass,
    point: &PointSpec,
) -> Result<(Rational, FValue)> {
    let f = f_point(lat, sw, vol, sigma, point)?;
    Ok((base_term(lat, sw, vol) + &f.value, f))
}

/// `min A/S` over the levels and the index of the first minimizing level.
pub fn delta_chain(levels: &[DeltaLevel]) -> Result<(Rational, usize)> {
    let mut best: Option<(Rational, usize)> = None;
    for (k, l) in levels.iter().enumerate() {
        if !l.a.is_positive() || !l.s.is_positive() {
            return Err(Error::InvalidScenario(format!(
                "level {} needs positive A and S (got {} and {})",
                l.label, l.a, l.s
            )));
        }
        let r = &l.a / &l.s;
        if best.as_ref().is_none_or(|(b, _)| &r < b) {
            best = Some((r, k));
        }
    }
    best.ok_or_else(|| Error::InvalidScenario("empty δ-chain".into()))
}

/// Outcome of one identity or bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn eq<T: PartialEq + std::fmt::Display>(name: impl Into<String>, lhs: T, rhs: T) -> Self {
        let passed = lhs == rhs;
        Self {
            name: name.into(),
            passed,
            detail: format!("{lhs} vs {rhs}"),
        }
    }

    fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// `lo + (hi−lo)/(n+1) ≤ s ≤ hi − (hi−lo)/(n+1)`, the barycenter bound for a
/// convex body whose coordinate ranges over `[lo, hi]`.
pub fn barycenter_bound(name: &str, lo: &Rational, hi: &Rational, s: &Rational, n: u32) -> Check {
    let gap = (hi - lo) / int(i64::from(n) + 1);
    let lower = lo + &gap;
    let upper = hi - &gap;
    Check::flag(
        name,
        &lower <= s && s <= &upper,
        format!("{lower} <= {s} <= {upper}"),
    )
}

/// Bound for `S(W; p)`: the order coordinate ranges over `[min M, max(M + P·C)]`.
pub fn point_bound(
    lat: &CurveLattice,
    sw: &SweepResult,
    sigma: &DivClass,
    point: &PointSpec,
    s: &Rational,
) -> Check {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for cell in &sw.cells {
        let m = ord_integrand(lat, sw, cell, sigma, point);
        let top = &m + &cell_pc(lat, cell, sw.curve);
        for (u, v) in cell_vertices(cell) {
            let a = m.eval(&u, &v);
            let b = top.eval(&u, &v);
            if lo.as_ref().is_none_or(|x| &a < x) {
                lo = Some(a);
            }
            if hi.as_ref().is_none_or(|x| &b > x) {
                hi = Some(b);
            }
        }
    }
    let name = format!("bound S(W;{})", point.name);
    match (lo, hi) {
        (Some(lo), Some(hi)) => {
            let lower = &lo + (&hi - &lo) / int(4);
            Check::flag(name, &lower <= s && s <= &hi, format!("{lower} <= {s} <= {hi}"))
        }
        _ => Check::flag(name, s.is_zero(), format!("empty region, S = {s}")),
    }
}

/// Polynomial identities and shape properties of a sweep.
pub fn sweep_checks(lat: &CurveLattice, sw: &SweepResult) -> Vec<Check> {
    let c = sw.curve;
    let name = lat.name(c);
    let mut out = Vec::new();
    let z = Rational::zero();

    let mut deriv_ok = true;
    let mut positive_ok = true;
    for cell in &sw.cells {
        let pc = cell_pc(lat, cell, c);
        if cell_psquare(lat, cell).derivative(Var::V) != pc.scale(&int(-2)) {
            deriv_ok = false;
        }
        let um = (&cell.u_lo + &cell.u_hi) / int(2);
        let vm = (cell.v_lo.eval(&um, &z) + cell.v_hi.eval(&um, &z)) / int(2);
        if !pc.eval(&um, &vm).is_positive() {
            positive_ok = false;
        }
    }
    out.push(Check::flag(
        format!("d(P^2)/dv = -2(P.{name})"),
        deriv_ok,
        format!("{} cells", sw.cells.len()),
    ));
    out.push(Check::flag(
        format!("(P.{name}) > 0 inside cells"),
        positive_ok,
        "checked at cell centroids",
    ));

    let mut fiber_ok = true;
    let mut boundary_ok = true;
    let mut detail = String::new();
    for w in sw.u_breaks.windows(2) {
        let cells: Vec<&SupportCell> = sw
            .cells
            .iter()
            .filter(|cl| cl.u_lo == w[0] && cl.u_hi == w[1])
            .collect();
        let k = sw.chamber_at(&((&w[0] + &w[1]) / int(2))).expect("piece inside range");
        let half_q2 = lat.square(&sw.chambers[k].q).scale(&Rational::new(1.into(), 2.into()));
        let lhs = cells.iter().fold(Poly::zero(), |acc, cl| {
            acc + integrate_strip(&cell_pc(lat, cl, c), &cl.v_lo, &cl.v_hi)
        });
        if lhs != half_q2 {
            fiber_ok = false;
            detail = format!("on [{}, {}]: {lhs} vs {half_q2}", w[0], w[1]);
        }
        if let Some(top) = cells.iter().max_by_key(|cl| cl.v_hi.eval(&w[0], &z) + cl.v_hi.eval(&w[1], &z)) {
            let sq = cell_psquare(lat, top).subst(Var::V, top.v_hi.as_poly());
            let pc = cell_pc(lat, top, c).subst(Var::V, top.v_hi.as_poly());
            if !sq.is_zero() && !pc.is_zero() {
                boundary_ok = false;
            }
        }
    }
    out.push(Check::flag(
        format!("fiber identity for {name}"),
        fiber_ok,
        if fiber_ok { "all u-pieces".to_string() } else { detail },
    ));
    out.push(Check::flag(
        format!("boundary certificate at t(u) for {name}"),
        boundary_ok,
        "P^2 or P.C vanishes on the top wall",
    ));
    out.push(Check::flag(
        format!("d convex for {name}"),
        sw.d.is_convex(),
        sw.d.pieces().iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; "),
    ));
    let dt = sw.d_plus_t();
    out.push(Check::flag(
        format!("d + t concave for {name}"),
        dt.as_ref().is_ok_and(PiecewiseFn::is_concave),
        match &dt {
            Ok(f) => f.pieces().iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; "),
            Err(e) => e.to_string(),
        },
    ));
    out
}

/// Identities tying the surface restriction to the threefold volume:
/// `−vol'(u) = 3·Q(u)²` on each chamber, and `6 ∫∫ (P·C) = vol(L)`.
pub fn volume_checks(lat: &CurveLattice, vol: &PiecewiseFn, sw: &SweepResult) -> Vec<Check> {
    let mut out = Vec::new();
    let mut slope_ok = true;
    let mut detail = String::new();
    for ch in &sw.chambers {
        let mid = (&ch.lo + &ch.hi) / int(2);
        let piece = vol
            .intervals()
            .find(|(a, b, _)| *a <= &mid && &mid <= *b)
            .map(|(_, _, p)| p.clone())
            .unwrap_or_else(Poly::zero);
        let lhs = -piece.derivative(Var::U);
        let rhs = lat.square(&ch.q).scale(&int(3));
        if lhs != rhs {
            slope_ok = false;
            detail = format!("on [{}, {}]: {lhs} vs {rhs}", ch.lo, ch.hi);
        }
    }
    out.push(Check::flag(
        "-vol'(u) = 3 Q(u)^2",
        slope_ok,
        if slope_ok { "all chambers".to_string() } else { detail },
    ));
    let covers = sw.start() == vol.start() && sw.end() == vol.end();
    if covers {
        let total: Rational = sw
            .cells
            .iter()
            .map(|cell| cell_integral(cell, &cell_pc(lat, cell, sw.curve)))
            .sum();
        let l = vol.eval(vol.start()).expect("start in range");
        out.push(Check::eq(
            format!("6 * integral of P.{} = vol(L)", lat.name(sw.curve)),
            int(6) * total,
            l,
        ));
    }
    out
}

/// Minimum of `d` and maximum of `d + t` over the sweep range; the order
/// coordinate along the curve ranges over this interval.
pub fn curve_range(sw: &SweepResult) -> Result<(Rational, Rational)> {
    let dt = sw.d_plus_t()?;
    Ok((piecewise_min(&sw.d), piecewise_max(&dt)))
}

fn extreme(f: &PiecewiseFn, max: bool) -> Rational {
    // Candidates: breakpoints and critical points of quadratic pieces.
    let mut best: Option<Rational> = None;
    let mut consider = |x: Rational| {
        if best.as_ref().is_none_or(|b| if max { &x > b } else { &x < b }) {
            best = Some(x);
        }
    };
    for (a, b, p) in f.intervals() {
        consider(p.eval1(a));
        consider(p.eval1(b));
        if p.degree(Var::U) == 2 {
            let crit = -p.coeff(1, 0) / (int(2) * p.coeff(2, 0));
            if &crit > a && &crit < b {
                consider(p.eval1(&crit));
            }
        }
    }
    best.unwrap_or_else(Rational::zero)
}

pub fn piecewise_min(f: &PiecewiseFn) -> Rational {
    extreme(f, false)
}

pub fn piecewise_max(f: &PiecewiseFn) -> Rational {
    extreme(f, true)
}

/// Family under `L ↦ kL`: `Q(u) ↦ k·Q(u/k)`.
pub fn rescale_class(c: &ParamClass, k: &Rational) -> ParamClass {
    c.map(|p| p.rescale_args(k).scale(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::lattice::Class;
    use crate::sweep::sweep_family;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn pc(xs: &[&str]) -> ParamClass {
        Class::from_vec(xs.iter().map(|s| p(s)).collect())
    }

    fn model() -> ThreefoldModel {
        let b = |x: &str| x.to_string();
        let e = |a: &str, bb: &str, c: &str, v: i64| ([b(a), b(bb), b(c)], int(v));
        ThreefoldModel::new(
            vec![b("H1"), b("H2"), b("H3")],
            &[
                e("H1", "H2", "H2", 1),
                e("H1", "H2", "H3", 2),
                e("H1", "H3", "H3", 2),
                e("H2", "H2", "H3", 1),
                e("H2", "H3", "H3", 1),
                e("H3", "H3", "H3", 1),
            ],
        )
        .unwrap()
    }

    fn e2_lattice() -> CurveLattice {
        let g = |r: [i64; 3]| r.iter().map(|&x| int(x)).collect::<Vec<_>>();
        CurveLattice::new(
            vec![("s".into(), true), ("l2".into(), true), ("CE".into(), false)],
            vec![g([-1, 1, 1]), g([1, 0, 2]), g([1, 2, 8])],
        )
        .unwrap()
    }

    fn e2_chambers() -> Vec<Chamber1D> {
        vec![
            Chamber1D {
                lo: int(0),
                hi: int(1),
                volume: VolumeSource::Class(vec![p("1"), p("1 + u"), p("1 - u")]),
                restriction: Some(Restriction {
                    q: pc(&["1 + u", "2 + u", "0"]),
                    n: pc(&["0", "0", "0"]),
                }),
            },
            Chamber1D {
                lo: int(1),
                hi: int(2),
                volume: VolumeSource::Class(vec![p("2 - u"), p("3 - u"), p("0")]),
                restriction: Some(Restriction {
                    q: pc(&["3 - u", "5 - 2*u", "0"]),
                    n: pc(&["0", "0", "u - 1"]),
                }),
            },
        ]
    }

    fn point(name: &str, mults: &[Rational]) -> PointSpec {
        PointSpec {
            name: name.into(),
            mults: Class::from_vec(mults.to_vec()),
            offset: Poly::zero(),
        }
    }

    #[test]
    fn anticanonical_volume_is_28() {
        let m = model();
        assert_eq!(m.cube(&[p("1"), p("1"), p("1")]).unwrap(), p("28"));
        // (H2 + H3)^3 = 3 + 3 + 1.
        assert_eq!(m.cube(&[p("0"), p("1"), p("1")]).unwrap(), p("7"));
    }

    #[test]
    fn e2_threefold_and_surface_values() {
        let m = model();
        let chambers = e2_chambers();
        let vol = vol_family(Some(&m), &chambers).unwrap();
        assert_eq!(vol.eval(&int(0)), Some(int(28)));
        assert_eq!(vol.eval(&int(2)), Some(int(0)));
        assert_eq!(s_divisor(&vol).unwrap(), rat(51, 56));
        let lat = e2_lattice();
        let sw = sweep_family(&lat, &surface_chambers(&chambers).unwrap(), 1).unwrap();
        let l = normalizer(&vol).unwrap();
        assert_eq!(s_curve(&lat, &sw, &l), rat(25, 28));
        assert_eq!(base_term(&lat, &sw, &l), rat(75, 112));
        let sig = Class::zero(3);
        let f_s = f_point(&lat, &sw, &l, &sig, &point("s", &[int(1), int(0), int(0)])).unwrap();
        assert_eq!(f_s.value, rat(15, 56));
        assert!(!f_s.negative_integrand);
        let (s, f) = s_point(&lat, &sw, &l, &sig, &point("t", &[int(0), int(0), int(2)])).unwrap();
        assert_eq!(f.value, rat(17, 56));
        assert_eq!(s, rat(109, 112));
        let (s0, f0) = s_point(&lat, &sw, &l, &sig, &point("g", &[int(0), int(0), int(0)])).unwrap();
        assert_eq!(f0.value, int(0));
        assert_eq!(s0, rat(75, 112));
        for c in sweep_checks(&lat, &sw).into_iter().chain(volume_checks(&lat, &vol, &sw)) {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn refinement_curve_is_rejected_as_point_curve() {
        let lat = e2_lattice();
        let chambers = e2_chambers();
        let sw = sweep_family(&lat, &surface_chambers(&chambers).unwrap(), 1).unwrap();
        let bad = f_point(&lat, &sw, &int(28), &Class::zero(3), &point("x", &[int(0), int(1), int(0)]));
        assert!(matches!(bad, Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn chain_examples() {
        let lv = |a: Rational, s: Rational| DeltaLevel {
            label: "x".into(),
            a,
            s,
        };
        let (d, k) = delta_chain(&[lv(int(1), rat(51, 56)), lv(int(1), rat(25, 28)), lv(int(1), rat(109, 112))]).unwrap();
        assert_eq!((d, k), (rat(112, 109), 2));
        assert_eq!(delta_chain(&[lv(int(4), rat(63, 16))]).unwrap().0, rat(64, 63));
        assert_eq!(delta_chain(&[lv(int(1), int(1))]).unwrap().0, int(1));
        assert!(delta_chain(&[]).is_err());
        assert!(delta_chain(&[lv(int(0), int(1))]).is_err());
    }

    #[test]
    fn volume_must_be_continuous_and_vanish() {
        let jump = vec![
            Chamber1D { lo: int(0), hi: int(1), volume: VolumeSource::Poly(p("2 - u")), restriction: None },
            Chamber1D { lo: int(1), hi: int(2), volume: VolumeSource::Poly(p("3 - u")), restriction: None },
        ];
        assert!(matches!(vol_family(None, &jump), Err(Error::DiscontinuousVolume(_))));
        let open = vec![Chamber1D { lo: int(0), hi: int(1), volume: VolumeSource::Poly(p("2 - u")), restriction: None }];
        assert!(vol_family(None, &open).is_err());
        let class_without_model = vec![Chamber1D {
            lo: int(0),
            hi: int(1),
            volume: VolumeSource::Class(vec![p("1 - u")]),
            restriction: None,
        }];
        assert!(vol_family(None, &class_without_model).is_err());
    }

    #[test]
    fn bounds() {
        assert!(barycenter_bound("x", &int(0), &int(2), &rat(51, 56), 3).passed);
        assert!(!barycenter_bound("x", &int(0), &int(2), &rat(1, 3), 3).passed);
        assert!(barycenter_bound("x", &int(0), &int(0), &int(0), 3).passed);
        let f = PiecewiseFn::new(vec![int(0), int(1), int(2)], vec![p("u"), p("2 - u")], true).unwrap();
        assert_eq!(piecewise_max(&f), int(1));
        assert_eq!(piecewise_min(&f), int(0));
        let q = PiecewiseFn::single(int(0), int(2), p("u*(2 - u)")).unwrap();
        assert_eq!(piecewise_max(&q), int(1));
    }
}
