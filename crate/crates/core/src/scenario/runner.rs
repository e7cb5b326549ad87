//! Executes a scenario's tasks and assembles the report.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::format::{class_at, Refinement, Scenario, Task};
use super::report::*;
use crate::exact::{format_rational, int, PiecewiseFn};
use crate::invariants::{
    barycenter_bound, curve_range, delta_chain, f_point, normalizer, point_bound, s_curve, s_divisor, s_point,
    surface_chambers, sweep_checks, vol_family, volume_checks, Check, DeltaLevel,
};
use crate::lattice::{Class, CurveLattice};
use crate::okounkov::{area, barycenter, body2d, check_bounds, slice_barycenter, slice_barycenter_from_surface};
use crate::sweep::{cell_pc, cell_psquare, sweep_family, verify_samples, SweepResult};
use crate::{Error, Rational, Result};

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Overrides the scenario's task list.
    pub tasks: Option<Vec<Task>>,
    /// Cross-checks and expected-value regression.
    pub check: bool,
    /// Consult the exhaustive-support oracle during pointwise verification.
    pub oracle: bool,
    /// Random samples per sweep for pointwise verification.
    pub samples: usize,
    pub seed: u64,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tasks: None,
            check: false,
            oracle: false,
            samples: 1000,
            seed: 0x5eed,
            timing: false,
        }
    }
}

#[derive(Default)]
struct Partial {
    results: Vec<(String, Rational)>,
    levels: Vec<DeltaLevel>,
    tables: Vec<ChamberTable>,
    bodies: Vec<BodyRow>,
    checks: Vec<CheckRow>,
    samples: Vec<SampleRow>,
    warnings: Vec<String>,
    errors: Vec<TaskError>,
}

impl Partial {
    fn check(&mut self, scope: &str, c: Check) {
        self.checks.push(CheckRow {
            scope: scope.into(),
            name: c.name,
            passed: c.passed,
            detail: c.detail,
        });
    }

    fn merge(&mut self, o: Partial) {
        self.results.extend(o.results);
        self.levels.extend(o.levels);
        self.tables.extend(o.tables);
        self.bodies.extend(o.bodies);
        self.checks.extend(o.checks);
        self.samples.extend(o.samples);
        self.warnings.extend(o.warnings);
        self.errors.extend(o.errors);
    }
}

fn r(x: &Rational) -> String {
    format_rational(x)
}

/// Runs every requested task. A failing task is recorded and the others
/// continue.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Report {
    let start = Instant::now();
    let mut tasks = opts.tasks.clone().unwrap_or_else(|| sc.tasks.clone());
    if opts.check && !tasks.contains(&Task::CrossChecks) {
        tasks.push(Task::CrossChecks);
    }
    tasks.sort();
    tasks.dedup();
    let has = |t: Task| tasks.contains(&t);
    let checks = has(Task::CrossChecks);

    let mut out = Partial::default();
    let vol = vol_family(sc.threefold.model.as_ref(), &sc.threefold.chambers)
        .and_then(|v| normalizer(&v).map(|l| (v, l)));
    match &vol {
        Err(e) => out.errors.push(TaskError::new("s_divisor", e)),
        Ok((vf, l)) => {
            let need_sx = has(Task::SDivisor) || checks;
            if need_sx {
                match s_divisor(vf) {
                    Err(e) => out.errors.push(TaskError::new("s_divisor", &e)),
                    Ok(s) => {
                        if has(Task::SDivisor) {
                            out.results.push(("s_divisor".into(), s.clone()));
                            out.levels.push(DeltaLevel {
                                label: sc.threefold.divisor.clone(),
                                a: sc.threefold.a.clone(),
                                s: s.clone(),
                            });
                        }
                        if checks {
                            threefold_checks(sc, vf, &s, &mut out);
                        }
                    }
                }
            }
            let need_sweep = [Task::SCurve, Task::FPoint, Task::SPoint, Task::CrossChecks, Task::Okounkov]
                .iter()
                .any(|t| has(*t));
            if need_sweep {
                if let Some(lat) = sc.lattice() {
                    let parts: Vec<Partial> = sc
                        .refinements
                        .par_iter()
                        .map(|rf| run_refinement(sc, lat, rf, vf, l, &tasks, opts))
                        .collect();
                    for p in parts {
                        out.merge(p);
                    }
                }
            }
        }
    }

    let mut report = Report {
        scenario: sc.name.clone(),
        diagnostic: sc.diagnostic,
        tasks: tasks.iter().map(|t| t.name().to_string()).collect(),
        ..Report::default()
    };
    if has(Task::DeltaChain) {
        report.levels = out
            .levels
            .iter()
            .map(|lv| LevelRow {
                label: lv.label.clone(),
                a: r(&lv.a),
                s: r(&lv.s),
                ratio: if lv.s.is_positive() { r(&(&lv.a / &lv.s)) } else { "-".into() },
            })
            .collect();
        match delta_chain(&out.levels) {
            Ok((d, k)) => {
                out.results.push(("delta_chain".into(), d.clone()));
                report.delta = Some(DeltaRow {
                    value: r(&d),
                    level: k,
                    label: out.levels[k].label.clone(),
                });
            }
            Err(e) => out.errors.push(TaskError::new("delta_chain", &e)),
        }
    }

    let computed: BTreeMap<&str, &Rational> = out.results.iter().map(|(k, v)| (k.as_str(), v)).collect();
    report.results = out
        .results
        .iter()
        .map(|(k, v)| ResultRow {
            key: k.clone(),
            value: r(v),
            anchor: sc.anchors.get(k).cloned(),
        })
        .collect();
    report.comparisons = sc
        .expected
        .iter()
        .filter_map(|(k, e)| {
            computed.get(k.as_str()).map(|c| Comparison {
                key: k.clone(),
                expected: r(e),
                computed: r(c),
                matched: *c == e,
            })
        })
        .collect();
    report.printed = sc
        .printed
        .iter()
        .map(|(k, p)| {
            let c = computed.get(k.as_str());
            PrintedRow {
                key: k.clone(),
                printed: p.clone(),
                computed: c.map(|x| r(x)),
                agrees: c.and_then(|x| crate::exact::parse_rational(p).ok().map(|y| &y == *x)),
            }
        })
        .collect();
    report.tables = out.tables;
    report.bodies = out.bodies;
    report.checks = out.checks;
    report.samples = out.samples;
    report.warnings = out.warnings;
    report.errors = out.errors;
    if opts.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    report
}

fn threefold_checks(sc: &Scenario, vol: &PiecewiseFn, s: &Rational, out: &mut Partial) {
    let scope = "threefold";
    out.check(scope, barycenter_bound("bound S_X", vol.start(), vol.end(), s, 3));
    match slice_barycenter(vol) {
        Ok(b) => out.check(scope, eq_check("barycenter from volume slices = S_X", &b, s)),
        Err(e) => out.errors.push(TaskError::new("cross_checks", &e)),
    }
    let slices: Option<Vec<_>> = sc
        .threefold
        .chambers
        .iter()
        .map(|ch| ch.restriction.as_ref().map(|r| (ch.lo.clone(), ch.hi.clone(), r.q.clone())))
        .collect();
    if let (Some(lat), Some(slices)) = (sc.lattice(), slices) {
        match slice_barycenter_from_surface(lat, &slices) {
            Ok(b) => out.check(scope, eq_check("barycenter from surface slices = S_X", &b, s)),
            Err(e) => out.errors.push(TaskError::new("cross_checks", &e)),
        }
    }
}

fn eq_check(name: &str, a: &Rational, b: &Rational) -> Check {
    Check {
        name: name.into(),
        passed: a == b,
        detail: format!("{a} vs {b}"),
    }
}

fn run_refinement(
    sc: &Scenario,
    lat: &CurveLattice,
    rf: &Refinement,
    vol: &PiecewiseFn,
    l: &Rational,
    tasks: &[Task],
    opts: &RunOptions,
) -> Partial {
    let mut out = Partial::default();
    let has = |t: Task| tasks.contains(&t);
    let cname = lat.name(rf.curve).to_string();
    let scope = format!("curve {cname}");
    let sw = match surface_chambers(&sc.threefold.chambers).and_then(|ch| sweep_family(lat, &ch, rf.curve)) {
        Ok(sw) => sw,
        Err(e) => {
            out.errors.push(TaskError::new(format!("sweep {cname}"), &e));
            return out;
        }
    };
    let checks = has(Task::CrossChecks);
    out.tables.push(chamber_table(lat, &sw));

    let sv = s_curve(lat, &sw, l);
    if has(Task::SCurve) {
        out.results.push((format!("s_curve:{cname}"), sv.clone()));
        out.levels.push(DeltaLevel {
            label: cname.clone(),
            a: rf.a.clone(),
            s: sv.clone(),
        });
    }
    if checks {
        for c in sweep_checks(lat, &sw).into_iter().chain(volume_checks(lat, vol, &sw)) {
            out.check(&scope, c);
        }
        match curve_range(&sw) {
            Ok((lo, hi)) => out.check(&scope, barycenter_bound(&format!("bound S(V;{cname})"), &lo, &hi, &sv, 3)),
            Err(e) => out.errors.push(TaskError::new(format!("cross_checks {cname}"), &e)),
        }
        if opts.samples > 0 {
            match verify_samples(lat, &sw, opts.samples, opts.seed ^ rf.curve as u64, opts.oracle) {
                Ok(st) => out.samples.push(SampleRow {
                    curve: cname.clone(),
                    samples: st.samples,
                    oracle_checked: st.oracle_checked,
                }),
                Err(e) => out.errors.push(TaskError::new(format!("samples {cname}"), &e)),
            }
        }
    }

    if has(Task::FPoint) || has(Task::SPoint) {
        let pts: Vec<Partial> = rf
            .points
            .par_iter()
            .map(|p| {
                let mut o = Partial::default();
                let pname = &p.spec.name;
                match s_point(lat, &sw, l, &rf.sigma, &p.spec) {
                    Err(e) => o.errors.push(TaskError::new(format!("point {cname}:{pname}"), &e)),
                    Ok((s, f)) => {
                        if f.negative_integrand {
                            o.warnings.push(format!("order integrand at {cname}:{pname} is negative somewhere"));
                        }
                        if has(Task::FPoint) {
                            o.results.push((format!("f_point:{cname}:{pname}"), f.value.clone()));
                        }
                        if has(Task::SPoint) {
                            o.results.push((format!("s_point:{cname}:{pname}"), s.clone()));
                            o.levels.push(DeltaLevel {
                                label: format!("{cname}:{pname}"),
                                a: p.a.clone(),
                                s: s.clone(),
                            });
                        }
                        if checks {
                            o.check(&scope, point_bound(lat, &sw, &rf.sigma, &p.spec, &s));
                            let direct = f_point(lat, &sw, l, &rf.sigma, &p.spec).map(|x| x.value);
                            if direct.as_ref() != Ok(&f.value) {
                                o.errors.push(TaskError::new(
                                    format!("point {cname}:{pname}"),
                                    &Error::InvariantViolation("F recomputation differs".into()),
                                ));
                            }
                        }
                    }
                }
                o
            })
            .collect();
        for p in pts {
            out.merge(p);
        }
    }

    if has(Task::Okounkov) {
        if let Err(e) = bodies(sc, lat, rf, &scope, &mut out) {
            out.errors.push(TaskError::new(format!("okounkov {cname}"), &e));
        }
    }
    out
}

/// Bodies of `(C, p)` for the positive part of the restriction at the
/// midpoint of the first chamber.
fn bodies(sc: &Scenario, lat: &CurveLattice, rf: &Refinement, scope: &str, out: &mut Partial) -> Result<()> {
    let ch = &sc.threefold.chambers[0];
    let u0 = (&ch.lo + &ch.hi) / int(2);
    let q = &ch.restriction.as_ref().expect("validated").q;
    let p = lat.zariski_decompose(&class_at(q, &u0))?.p;
    let l2 = lat.square(&p);
    let cname = lat.name(rf.curve);
    let mut flags = vec![("generic".to_string(), Class::zero(lat.len()))];
    flags.extend(rf.points.iter().map(|pt| (pt.spec.name.clone(), pt.spec.mults.clone())));
    for (pname, mults) in flags {
        let body = body2d(lat, &p, rf.curve, &mults)?;
        let a = area(&body)?;
        let (bt, by) = barycenter(&body)?;
        let name = format!("body ({cname}, {pname})");
        out.check(scope, eq_check(&format!("{name}: 2 area = L^2"), &(int(2) * &a), &l2));
        let mut c = check_bounds(&body, &bt, 1, 2);
        c.name = format!("{name}: barycenter bound");
        out.check(scope, c);
        let lo = body.alpha.eval(&bt).expect("barycenter in range");
        let hi = &lo + body.length.eval(&bt).expect("barycenter in range");
        out.check(
            scope,
            Check {
                name: format!("{name}: barycenter inside"),
                passed: lo < by && by < hi,
                detail: format!("{lo} < {by} < {hi}"),
            },
        );
        out.bodies.push(BodyRow {
            curve: cname.to_string(),
            point: pname,
            at_u: r(&u0),
            area: r(&a),
            barycenter: [r(&bt), r(&by)],
            vertices: body.vertices().iter().map(|(x, y)| [r(x), r(y)]).collect(),
        });
    }
    Ok(())
}

fn pieces(f: &PiecewiseFn) -> Vec<[String; 3]> {
    f.intervals().map(|(a, b, p)| [r(a), r(b), p.to_string()]).collect()
}

fn chamber_table(lat: &CurveLattice, sw: &SweepResult) -> ChamberTable {
    let z = Rational::zero();
    let mut cells: Vec<_> = sw.cells.iter().collect();
    cells.sort_by(|a, b| {
        let mid = |c: &&crate::sweep::SupportCell| (&c.u_lo + &c.u_hi) / int(2);
        (&a.u_lo, a.v_lo.eval(&mid(a), &z)).cmp(&(&b.u_lo, b.v_lo.eval(&mid(b), &z)))
    });
    let rows = cells
        .into_iter()
        .map(|cell| {
            let n: BTreeMap<String, String> = cell
                .n_coeffs
                .iter()
                .map(|(&i, f)| (lat.name(i).to_string(), f.to_string()))
                .collect();
            TableRow {
                u: [r(&cell.u_lo), r(&cell.u_hi)],
                v: [cell.v_lo.to_string(), cell.v_hi.to_string()],
                support: cell.support.iter().map(|&i| lat.name(i).to_string()).collect(),
                n,
                p_square: cell_psquare(lat, cell).to_string(),
                p_dot_c: cell_pc(lat, cell, sw.curve).to_string(),
            }
        })
        .collect();
    ChamberTable {
        curve: lat.name(sw.curve).to_string(),
        u_breaks: sw.u_breaks.iter().map(r).collect(),
        t: pieces(&sw.t),
        d: pieces(&sw.d),
        rows,
    }
}

/// Runs several scenarios concurrently; reports keep the input order.
pub fn run_batch(scenarios: &[Scenario], opts: &RunOptions) -> Vec<Report> {
    scenarios.par_iter().map(|s| run(s, opts)).collect()
}
