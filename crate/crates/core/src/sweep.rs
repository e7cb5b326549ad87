//! Parametric Zariski chamber sweep of the family `Q(u) − v·C`.
//!
//! For each rational `u` the support just above a wall is found by running
//! the Zariski decomposition at `v + ε`. Walls are affine in `(u, v)`, so a
//! stack of cells found at the midpoint of a `u`-interval is certified on the
//! whole interval by checking every constraint at the trapezoid vertices.
//! When the check fails the interval is split where a wall crosses a cell
//! boundary.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{int, AffineForm, PiecewiseFn, Poly, Var};
use crate::lattice::{Class, CurveLattice};
use crate::{EpsRational, Error, ParamClass, Rational, Result};

const MAX_DEPTH: usize = 64;

/// Restriction data of one threefold chamber to the sweep surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceChamber {
    pub lo: Rational,
    pub hi: Rational,
    /// Nef part of the restricted family, affine in `u`.
    pub q: ParamClass,
    /// Negative part of the restricted family, affine in `u`.
    pub n: ParamClass,
}

/// One Zariski chamber of the `(u, v)` region.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportCell {
    pub chamber: usize,
    pub support: Vec<usize>,
    pub n_coeffs: BTreeMap<usize, AffineForm>,
    pub p_class: ParamClass,
    pub u_lo: Rational,
    pub u_hi: Rational,
    pub v_lo: AffineForm,
    pub v_hi: AffineForm,
}

impl SupportCell {
    /// Closed containment.
    pub fn contains(&self, u: &Rational, v: &Rational) -> bool {
        let z = Rational::zero();
        u >= &self.u_lo && u <= &self.u_hi && v >= &self.v_lo.eval(u, &z) && v <= &self.v_hi.eval(u, &z)
    }

    /// Open containment.
    pub fn contains_interior(&self, u: &Rational, v: &Rational) -> bool {
        let z = Rational::zero();
        u > &self.u_lo && u < &self.u_hi && v > &self.v_lo.eval(u, &z) && v < &self.v_hi.eval(u, &z)
    }

    /// `N(u, v)` as a class.
    pub fn n_class(&self, len: usize) -> ParamClass {
        let mut n = Class::zero(len);
        for (&i, f) in &self.n_coeffs {
            n.set(i, f.as_poly().clone());
        }
        n
    }
}

/// `(P(u,v)·C)` on a cell.
pub fn cell_pc(lat: &CurveLattice, cell: &SupportCell, c: usize) -> Poly {
    lat.pair_curve(&cell.p_class, c)
}

/// `(P(u,v))²` on a cell.
pub fn cell_psquare(lat: &CurveLattice, cell: &SupportCell) -> Poly {
    lat.pair(&cell.p_class, &cell.p_class)
        .expect("cell classes live on the sweep lattice")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub curve: usize,
    pub chambers: Vec<SurfaceChamber>,
    pub cells: Vec<SupportCell>,
    pub u_breaks: Vec<Rational>,
    /// Pseudoeffective threshold in `v`.
    pub t: PiecewiseFn,
    /// Coefficient of the sweep curve in the incoming negative part.
    pub d: PiecewiseFn,
}

impl SweepResult {
    pub fn start(&self) -> &Rational {
        self.t.start()
    }

    pub fn end(&self) -> &Rational {
        self.t.end()
    }

    /// Indices of cells whose closure contains the point.
    pub fn locate(&self, u: &Rational, v: &Rational) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].contains(u, v))
            .collect()
    }

    /// Index of the chamber containing `u` (the left one at a join).
    pub fn chamber_at(&self, u: &Rational) -> Option<usize> {
        self.chambers.iter().position(|c| u >= &c.lo && u <= &c.hi)
    }

    /// `d + t`.
    pub fn d_plus_t(&self) -> Result<PiecewiseFn> {
        self.d.add(&self.t)
    }
}

/// Cell formulas for a fixed support: `N` solved from the Gram block, `P`
/// the remainder, and the affine functions that must stay nonnegative.
#[derive(Clone, Debug)]
struct Formula {
    support: Vec<usize>,
    n: Vec<Poly>,
    p: ParamClass,
    constraints: Vec<Poly>,
}

impl Formula {
    fn new(lat: &CurveLattice, fam: &ParamClass, support: Vec<usize>) -> Result<Self> {
        let n = lat.solve_on_support(&support, fam).ok_or_else(|| {
            Error::InvariantViolation(format!("singular Gram block on support {support:?}"))
        })?;
        let mut p = fam.clone();
        for (k, &i) in support.iter().enumerate() {
            p.add_curve(i, -n[k].clone());
        }
        let mut constraints = n.clone();
        for d in lat.active_curves().filter(|d| !support.contains(d)) {
            constraints.push(lat.pair_curve(&p, d));
        }
        Ok(Self {
            support,
            n,
            p,
            constraints,
        })
    }
}

#[derive(Clone, Debug)]
struct Stage {
    formula: Formula,
    wall: Poly,
}

fn family(q: &ParamClass, c: usize) -> ParamClass {
    let mut f = q.clone();
    f.add_curve(c, -Poly::v());
    f
}

fn eval_class(p: &ParamClass, u: &Rational, v: &Rational) -> Class<Rational> {
    p.map(|x| x.eval(u, v))
}

/// Walks upward in `v` at fixed `u`, returning the stack of supports and the
/// wall that ends each one. An empty stack means the family is not
/// pseudoeffective for any `v > 0`.
fn sweep_line(lat: &CurveLattice, fam: &ParamClass, u: &Rational) -> Result<Vec<Stage>> {
    let mut v = Rational::zero();
    let mut stages = Vec::new();
    let cap = 4 * lat.len() + 8;
    for _ in 0..cap {
        let above = fam.map(|p| {
            EpsRational::new(p.eval(u, &v), p.derivative(Var::V).eval(u, &v))
        });
        let z = match lat.zariski_decompose(&above) {
            Ok(z) => z,
            Err(Error::NotPseudoeffective(_)) => return Ok(stages),
            Err(e) => return Err(e),
        };
        let formula = Formula::new(lat, fam, z.support)?;
        let mut next: Option<(Rational, &Poly)> = None;
        for g in &formula.constraints {
            let line = g.eval_at(Var::U, u);
            let slope = line.coeff(0, 1);
            if !slope.is_negative() {
                continue;
            }
            let root = -line.coeff(0, 0) / slope;
            if root <= v {
                return Err(Error::InvariantViolation(format!(
                    "constraint {g} already violated above v = {v} at u = {u}"
                )));
            }
            if next.as_ref().is_none_or(|(r, _)| &root < r) {
                next = Some((root, g));
            }
        }
        let Some((root, wall)) = next else {
            return Err(Error::DegenerateFamily(format!(
                "class stays pseudoeffective for all v > {v} at u = {u}"
            )));
        };
        let wall = wall.clone();
        stages.push(Stage { formula, wall });
        v = root;
    }
    Err(Error::InvariantViolation(format!(
        "more than {cap} walls at u = {u}"
    )))
}

#[derive(Clone, Debug)]
struct Piece {
    lo: Rational,
    hi: Rational,
    stack: Vec<(Formula, AffineForm, AffineForm)>,
}

impl Piece {
    fn same_stack(&self, o: &Piece) -> bool {
        self.stack.len() == o.stack.len()
            && self
                .stack
                .iter()
                .zip(&o.stack)
                .all(|(a, b)| a.0.support == b.0.support && a.1 == b.1 && a.2 == b.2)
    }
}

fn affine(p: &Poly) -> Result<AffineForm> {
    AffineForm::new(p.clone())
        .ok_or_else(|| Error::InvariantViolation(format!("wall {p} is not affine")))
}

/// Checks a midpoint stack on `[a, b]`. On failure returns rational `u`
/// values where the structure may change.
fn validate(
    lat: &CurveLattice,
    c: usize,
    a: &Rational,
    b: &Rational,
    stack: &[(Formula, AffineForm, AffineForm)],
) -> std::result::Result<(), Vec<Rational>> {
    let z = Rational::zero();
    let mut ok = true;
    let mut cands = Vec::new();
    let mut check = |f: &AffineForm, ok: &mut bool| {
        if f.eval(a, &z).is_negative() || f.eval(b, &z).is_negative() {
            *ok = false;
            cands.extend(f.root_u());
        }
    };
    for (formula, lo, hi) in stack {
        let width = AffineForm::new(hi.as_poly() - lo.as_poly()).expect("difference of affine forms");
        check(&width, &mut ok);
        for g in &formula.constraints {
            let g = AffineForm::new(g.clone()).expect("cell constraints are affine");
            check(&g.along(lo), &mut ok);
            check(&g.along(hi), &mut ok);
        }
    }
    if let Some((formula, _, top)) = stack.last() {
        let sq = lat.square(&formula.p).subst(Var::V, top.as_poly());
        let pc = lat.pair_curve(&formula.p, c).subst(Var::V, top.as_poly());
        if !sq.is_zero() && !pc.is_zero() {
            ok = false;
            if sq.degree(Var::U) == 1 {
                cands.push(-sq.coeff(0, 0) / sq.coeff(1, 0));
            }
        }
    }
    if ok {
        return Ok(());
    }
    cands.retain(|r| r > a && r < b);
    cands.sort();
    cands.dedup();
    Err(cands)
}

fn assemble(
    lat: &CurveLattice,
    fam: &ParamClass,
    c: usize,
    a: &Rational,
    b: &Rational,
    depth: usize,
) -> Result<Vec<Piece>> {
    if depth > MAX_DEPTH {
        return Err(Error::InvariantViolation(format!(
            "chamber structure did not stabilise on [{a}, {b}]"
        )));
    }
    let mid = (a + b) / int(2);
    let stages = sweep_line(lat, fam, &mid)?;
    let mut stack = Vec::with_capacity(stages.len());
    let mut lo = AffineForm::constant(Rational::zero());
    for st in stages {
        let hi = affine(&st.wall)?.solve_for_v().ok_or_else(|| {
            Error::InvariantViolation(format!("wall {} does not depend on v", st.wall))
        })?;
        stack.push((st.formula, lo, hi.clone()));
        lo = hi;
    }
    match validate(lat, c, a, b, &stack) {
        Ok(()) => Ok(vec![Piece {
            lo: a.clone(),
            hi: b.clone(),
            stack,
        }]),
        Err(mut cuts) => {
            if cuts.is_empty() {
                cuts.push(mid);
            }
            let mut pts = vec![a.clone()];
            pts.extend(cuts);
            pts.push(b.clone());
            let mut out = Vec::new();
            for w in pts.windows(2) {
                out.extend(assemble(lat, fam, c, &w[0], &w[1], depth + 1)?);
            }
            Ok(out)
        }
    }
}

fn check_family(lat: &CurveLattice, q: &ParamClass) -> Result<()> {
    if q.len() != lat.len() {
        return Err(Error::InvalidScenario(format!(
            "class has {} coefficients for {} curves",
            q.len(),
            lat.len()
        )));
    }
    for (i, p) in q.coeffs().iter().enumerate() {
        if p.depends_on(Var::V) || p.degree(Var::U) > 1 {
            return Err(Error::InvalidScenario(format!(
                "coefficient of {} must be affine in u, got {p}",
                lat.name(i)
            )));
        }
    }
    Ok(())
}

/// Sweeps one chamber `[lo, hi]` of a nef family `Q(u)` against curve `c`.
pub fn sweep(
    lat: &CurveLattice,
    q: &ParamClass,
    lo: &Rational,
    hi: &Rational,
    c: usize,
) -> Result<SweepResult> {
    let zero_n = Class::zero(lat.len());
    sweep_family(
        lat,
        &[SurfaceChamber {
            lo: lo.clone(),
            hi: hi.clone(),
            q: q.clone(),
            n: zero_n,
        }],
        c,
    )
}

/// Sweeps consecutive chambers and records `d(u)`, the coefficient of `c`
/// in each chamber's incoming negative part.
pub fn sweep_family(lat: &CurveLattice, chambers: &[SurfaceChamber], c: usize) -> Result<SweepResult> {
    if c >= lat.len() {
        return Err(Error::InvalidScenario(format!("curve index {c} out of range")));
    }
    if chambers.is_empty() {
        return Err(Error::InvalidScenario("no chambers to sweep".into()));
    }
    let mut cells = Vec::new();
    let mut u_breaks = vec![chambers[0].lo.clone()];
    let mut t_pieces: Vec<Poly> = Vec::new();
    let mut d_parts = Vec::new();
    for (k, ch) in chambers.iter().enumerate() {
        if ch.lo >= ch.hi {
            return Err(Error::InvalidScenario(format!(
                "empty chamber [{}, {}]",
                ch.lo, ch.hi
            )));
        }
        if k > 0 && chambers[k - 1].hi != ch.lo {
            return Err(Error::InvalidScenario(format!(
                "chambers do not abut at {}",
                ch.lo
            )));
        }
        check_family(lat, &ch.q)?;
        check_family(lat, &ch.n)?;
        for end in [&ch.lo, &ch.hi] {
            let qe = eval_class(&ch.q, end, &Rational::zero());
            if !lat.is_nef(&qe) {
                return Err(Error::NotNefInput(format!("Q({end}) is not nef")));
            }
        }
        let fam = family(&ch.q, c);
        let mut pieces = assemble(lat, &fam, c, &ch.lo, &ch.hi, 0)?;
        pieces = merge(pieces);
        for piece in pieces {
            for (formula, lo, hi) in &piece.stack {
                if lo == hi {
                    continue;
                }
                let n_coeffs = formula
                    .support
                    .iter()
                    .zip(&formula.n)
                    .map(|(&i, p)| Ok((i, affine(p)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                cells.push(SupportCell {
                    chamber: k,
                    support: formula.support.clone(),
                    n_coeffs,
                    p_class: formula.p.clone(),
                    u_lo: piece.lo.clone(),
                    u_hi: piece.hi.clone(),
                    v_lo: lo.clone(),
                    v_hi: hi.clone(),
                });
            }
            t_pieces.push(
                piece
                    .stack
                    .last()
                    .map_or_else(Poly::zero, |(_, _, top)| top.as_poly().clone()),
            );
            u_breaks.push(piece.hi.clone());
        }
        d_parts.push(PiecewiseFn::single(
            ch.lo.clone(),
            ch.hi.clone(),
            ch.n.get(c).clone(),
        )?);
    }
    let t = PiecewiseFn::new(u_breaks.clone(), t_pieces, true)
        .map_err(|e| match e {
            Error::DiscontinuousVolume(m) => Error::DegenerateFamily(format!("t(u) jumps: {m}")),
            e => e,
        })?
        .simplified();
    let d = PiecewiseFn::concat(&d_parts, true)
        .map_err(|e| match e {
            Error::DiscontinuousVolume(m) => {
                Error::InvalidScenario(format!("incoming negative part jumps: {m}"))
            }
            e => e,
        })?
        .simplified();
    Ok(SweepResult {
        curve: c,
        chambers: chambers.to_vec(),
        cells,
        u_breaks,
        t,
        d,
    })
}

fn merge(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::new();
    for p in pieces {
        match out.last_mut() {
            Some(last) if last.same_stack(&p) => last.hi = p.hi,
            _ => out.push(p),
        }
    }
    out
}

/// Outcome of pointwise verification of a sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleStats {
    pub samples: usize,
    pub oracle_checked: usize,
}

const SAMPLE_DENOM: i64 = 1_000_003;

fn random_between<R: Rng>(rng: &mut R, lo: &Rational, hi: &Rational) -> Rational {
    let k = rng.gen_range(1..SAMPLE_DENOM);
    lo + (hi - lo) * Rational::new(k.into(), SAMPLE_DENOM.into())
}

/// Draws random interior points `(u, v)` with `0 < v < t(u)` and checks that
/// exactly one cell contains each one and that the cell formulas agree with
/// a pointwise Zariski decomposition. With `oracle`, the exhaustive support
/// search is consulted as well.
pub fn verify_samples(
    lat: &CurveLattice,
    res: &SweepResult,
    count: usize,
    seed: u64,
    oracle: bool,
) -> Result<SampleStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SampleStats::default();
    if res.t.is_zero() {
        return Ok(stats);
    }
    let fail = |m: String| Err(Error::InvariantViolation(m));
    let mut attempts = 0;
    while stats.samples < count {
        attempts += 1;
        if attempts > 20 * count {
            return fail("could not draw interior sample points".into());
        }
        let u = random_between(&mut rng, res.start(), res.end());
        let t = res.t.eval(&u).expect("u lies in the sweep range");
        if !t.is_positive() {
            continue;
        }
        let v = random_between(&mut rng, &Rational::zero(), &t);
        let hits: Vec<usize> = (0..res.cells.len())
            .filter(|&i| res.cells[i].contains_interior(&u, &v))
            .collect();
        if hits.len() != 1 {
            return fail(format!("({u}, {v}) lies in {} cells", hits.len()));
        }
        let cell = &res.cells[hits[0]];
        let ch = &res.chambers[cell.chamber];
        let class = eval_class(&family(&ch.q, res.curve), &u, &v);
        let z = lat.zariski_decompose(&class)?;
        let n_cell = eval_class(&cell.n_class(lat.len()), &u, &v);
        let p_cell = eval_class(&cell.p_class, &u, &v);
        if z.support != cell.support || z.n != n_cell || z.p != p_cell {
            return fail(format!(
                "cell formulas disagree with Zariski decomposition at ({u}, {v})"
            ));
        }
        if oracle {
            match lat.zariski_oracle(&class) {
                Some(o) if o == z => stats.oracle_checked += 1,
                _ => return fail(format!("exhaustive oracle disagrees at ({u}, {v})")),
            }
        }
        stats.samples += 1;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn pc(xs: &[&str]) -> ParamClass {
        Class::from_vec(xs.iter().map(|s| p(s)).collect())
    }

    fn e2() -> CurveLattice {
        let g = |r: [i64; 3]| r.iter().map(|&x| int(x)).collect::<Vec<_>>();
        CurveLattice::new(
            vec![("s".into(), true), ("l2".into(), true), ("CE".into(), false)],
            vec![g([-1, 1, 1]), g([1, 0, 2]), g([1, 2, 8])],
        )
        .unwrap()
    }

    fn qp() -> CurveLattice {
        let g = |r: [i64; 4]| r.iter().map(|&x| int(x)).collect::<Vec<_>>();
        // e0, e1, e2 and the nef curve B = e0 + e1.
        CurveLattice::new(
            vec![
                ("e0".into(), true),
                ("e1".into(), true),
                ("e2".into(), true),
                ("B".into(), false),
            ],
            vec![g([-1, 1, 1, 0]), g([1, -1, 0, 0]), g([1, 0, -1, 1]), g([0, 0, 1, 0])],
        )
        .unwrap()
    }

    #[test]
    fn e2_first_chamber() {
        let lat = e2();
        let res = sweep(&lat, &pc(&["1 + u", "2 + u", "0"]), &int(0), &int(1), 1).unwrap();
        assert_eq!(res.cells.len(), 2);
        let (a, b) = (&res.cells[0], &res.cells[1]);
        assert!(a.support.is_empty());
        assert_eq!(a.v_hi.as_poly(), &p("1"));
        assert_eq!(b.support, vec![0]);
        assert_eq!(b.n_coeffs[&0].as_poly(), &p("v - 1"));
        assert_eq!(b.v_hi.as_poly(), &p("2 + u"));
        assert_eq!(res.t.pieces(), &[p("2 + u")]);
        assert_eq!(cell_psquare(&lat, a), p("(1 + u)*(3 + u - 2*v)"));
        assert_eq!(cell_psquare(&lat, b), p("(2 + u - v)^2"));
        assert_eq!(cell_pc(&lat, b, 1), p("2 + u - v"));
    }

    #[test]
    fn e2_second_chamber_has_moving_wall() {
        let lat = e2();
        let res = sweep(&lat, &pc(&["3 - u", "5 - 2*u", "0"]), &int(1), &int(2), 1).unwrap();
        assert_eq!(res.cells.len(), 2);
        assert_eq!(res.cells[0].v_hi.as_poly(), &p("2 - u"));
        assert_eq!(res.cells[1].n_coeffs[&0].as_poly(), &p("-2 + u + v"));
        assert_eq!(res.t.pieces(), &[p("5 - 2*u")]);
    }

    #[test]
    fn qp_nef_refinement_curve() {
        let lat = qp();
        let res = sweep(&lat, &pc(&["3", "2", "2", "0"]), &int(0), &int(1), 3).unwrap();
        assert_eq!(res.cells.len(), 2);
        assert_eq!(cell_pc(&lat, &res.cells[0], 3), p("2"));
        assert_eq!(cell_psquare(&lat, &res.cells[0]), p("7 - 4*v"));
        assert_eq!(cell_psquare(&lat, &res.cells[1]), p("(2 - v)*(4 - v)"));
        assert_eq!(res.t.pieces(), &[p("2")]);
    }

    #[test]
    fn derivative_identity_and_samples() {
        let lat = e2();
        let res = sweep(&lat, &pc(&["1 + u", "2 + u", "0"]), &int(0), &int(1), 1).unwrap();
        for cell in &res.cells {
            let lhs = cell_psquare(&lat, cell).derivative(Var::V);
            assert_eq!(lhs, cell_pc(&lat, cell, 1).scale(&int(-2)));
        }
        let stats = verify_samples(&lat, &res, 200, 7, true).unwrap();
        assert_eq!(stats.samples, 200);
        assert_eq!(stats.oracle_checked, 200);
    }

    #[test]
    fn input_errors() {
        let lat = e2();
        let bad = sweep(&lat, &pc(&["1", "-1", "0"]), &int(0), &int(1), 1);
        assert!(matches!(bad, Err(Error::NotNefInput(_))));
        let curved = sweep(&lat, &pc(&["u^2", "1", "0"]), &int(0), &int(1), 1);
        assert!(matches!(curved, Err(Error::InvalidScenario(_))));
        let inverted = sweep(&lat, &pc(&["1", "1", "0"]), &int(1), &int(0), 1);
        assert!(inverted.is_err());
    }

    #[test]
    fn degenerate_direction() {
        // m meets s negatively and l2 trivially, so Q - v*m stays nef.
        let lat = CurveLattice::new(
            vec![("s".into(), true), ("l2".into(), true), ("m".into(), false)],
            vec![
                vec![int(-1), int(1), int(-1)],
                vec![int(1), int(0), int(0)],
                vec![int(-1), int(0), int(0)],
            ],
        )
        .unwrap();
        let r = sweep(&lat, &pc(&["1", "2", "0"]), &int(0), &int(1), 2);
        assert!(matches!(r, Err(Error::DegenerateFamily(_))), "{r:?}");
    }

    #[test]
    fn zero_threshold_gives_empty_sweep() {
        // The zero class leaves the pseudoeffective cone at once.
        let lat = e2();
        let res = sweep(&lat, &pc(&["0", "0", "0"]), &int(0), &int(1), 1).unwrap();
        assert!(res.cells.is_empty());
        assert!(res.t.is_zero());
        assert_eq!(res.t.eval(&rat(1, 2)), Some(int(0)));
    }
}
