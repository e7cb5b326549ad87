//! JSON scenario files: raw serde mirror, validation into domain types, and
//! the reverse mapping used for round trips.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, parse_rational, Poly};
use crate::invariants::{rescale_class, Chamber1D, PointSpec, Restriction, ThreefoldModel, VolumeSource};
use crate::lattice::{Class, CurveLattice};
use crate::{DivClass, Error, ParamClass, Rational, Result};

/// Computations a scenario can request, in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    SDivisor,
    SCurve,
    FPoint,
    SPoint,
    DeltaChain,
    CrossChecks,
    Okounkov,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::SDivisor,
        Task::SCurve,
        Task::FPoint,
        Task::SPoint,
        Task::DeltaChain,
        Task::CrossChecks,
        Task::Okounkov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::SDivisor => "s_divisor",
            Task::SCurve => "s_curve",
            Task::FPoint => "f_point",
            Task::SPoint => "s_point",
            Task::DeltaChain => "delta_chain",
            Task::CrossChecks => "cross_checks",
            Task::Okounkov => "okounkov",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown task {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Threefold {
    pub model: Option<ThreefoldModel>,
    /// Label of the divisor `Y` being extracted.
    pub divisor: String,
    /// Log discrepancy `A(Y)`.
    pub a: Rational,
    pub chambers: Vec<Chamber1D>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub spec: PointSpec,
    pub a: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub curve: usize,
    pub a: Rational,
    /// Correction `Σ` with `γ*C = C̄ + Σ`.
    pub sigma: DivClass,
    pub points: Vec<Point>,
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    /// Diagnostic scenarios reproduce printed values that are known to be
    /// unreliable; their mismatches are reported but do not fail a run.
    pub diagnostic: bool,
    /// Human-readable labels keyed like `expected`.
    pub anchors: BTreeMap<String, String>,
    /// Values as printed in the source, recorded but not asserted.
    pub printed: BTreeMap<String, String>,
    pub threefold: Threefold,
    pub surface: Option<CurveLattice>,
    pub refinements: Vec<Refinement>,
    pub tasks: Vec<Task>,
    pub expected: BTreeMap<String, Rational>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn yes() -> bool {
    true
}

fn one() -> String {
    "1".into()
}

type Map = BTreeMap<String, String>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    #[serde(default, skip_serializing_if = "is_false")]
    diagnostic: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    anchors: Map,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    printed: Map,
    threefold: RawThreefold,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    surface: Option<RawSurface>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    refinements: Vec<RawRefinement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tasks: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    expected: Map,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThreefold {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    basis: Vec<String>,
    /// `[a, b, c, value]` for the triple product `a·b·c`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    intersections: Vec<[String; 4]>,
    divisor: String,
    a: String,
    chambers: Vec<RawChamber>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChamber {
    range: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<Map>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    volume: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    restriction: Option<RawRestriction>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRestriction {
    q: Map,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    n: Map,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    curves: Vec<RawCurve>,
    gram: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    name: String,
    #[serde(default = "yes")]
    active: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRefinement {
    curve: String,
    a: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    sigma: Map,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    points: Vec<RawPoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    name: String,
    #[serde(default = "one")]
    a: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    mults: Map,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset: Option<String>,
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidScenario(m) => Error::InvalidScenario(format!("{path}: {m}")),
        other => Error::InvalidScenario(format!("{path}: {other}")),
    }
}

fn rational(path: &str, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| at(path, e))
}

fn positive(path: &str, s: &str) -> Result<Rational> {
    let r = rational(path, s)?;
    if !r.is_positive() {
        return Err(Error::InvalidScenario(format!("{path}: must be positive, got {r}")));
    }
    Ok(r)
}

fn poly(path: &str, s: &str) -> Result<Poly> {
    s.parse::<Poly>().map_err(|e| at(path, e))
}

fn names_to_vec<T: Clone>(
    path: &str,
    names: &[String],
    map: &Map,
    zero: T,
    parse: impl Fn(&str, &str) -> Result<T>,
) -> Result<Vec<T>> {
    let mut out = vec![zero; names.len()];
    for (k, v) in map {
        let i = names
            .iter()
            .position(|n| n == k)
            .ok_or_else(|| Error::InvalidScenario(format!("{path}: unknown name {k:?}")))?;
        out[i] = parse(&format!("{path}.{k}"), v)?;
    }
    Ok(out)
}

fn vec_to_names<T>(names: &[String], xs: &[T], is_zero: impl Fn(&T) -> bool, show: impl Fn(&T) -> String) -> Map {
    names
        .iter()
        .zip(xs)
        .filter(|(_, x)| !is_zero(x))
        .map(|(n, x)| (n.clone(), show(x)))
        .collect()
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| {
        Error::InvalidScenario(format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    validate(raw)
}

fn validate(raw: RawScenario) -> Result<Scenario> {
    let tf = raw.threefold;
    let model = if tf.basis.is_empty() {
        if !tf.intersections.is_empty() {
            return Err(Error::InvalidScenario("threefold.intersections given without a basis".into()));
        }
        None
    } else {
        let mut entries = Vec::new();
        for (k, [a, b, c, val]) in tf.intersections.iter().enumerate() {
            let value = rational(&format!("threefold.intersections[{k}]"), val)?;
            entries.push(([a.clone(), b.clone(), c.clone()], value));
        }
        Some(ThreefoldModel::new(tf.basis.clone(), &entries).map_err(|e| at("threefold.intersections", e))?)
    };

    let surface = match raw.surface {
        None => None,
        Some(s) => {
            let curves: Vec<(String, bool)> = s.curves.into_iter().map(|c| (c.name, c.active)).collect();
            let mut gram = Vec::new();
            for (i, row) in s.gram.iter().enumerate() {
                let r: Result<Vec<Rational>> = row
                    .iter()
                    .enumerate()
                    .map(|(j, x)| rational(&format!("surface.gram[{i}][{j}]"), x))
                    .collect();
                gram.push(r?);
            }
            Some(CurveLattice::new(curves, gram).map_err(|e| at("surface", e))?)
        }
    };
    let curve_names: Vec<String> = surface.as_ref().map(|l| l.names().to_vec()).unwrap_or_default();

    if tf.chambers.is_empty() {
        return Err(Error::InvalidScenario("threefold.chambers: empty".into()));
    }
    let mut chambers = Vec::new();
    for (k, ch) in tf.chambers.iter().enumerate() {
        let path = format!("threefold.chambers[{k}]");
        let lo = rational(&format!("{path}.range[0]"), &ch.range[0])?;
        let hi = rational(&format!("{path}.range[1]"), &ch.range[1])?;
        if lo >= hi {
            return Err(Error::InvalidScenario(format!("{path}: empty range [{lo}, {hi}]")));
        }
        if let Some(prev) = chambers.last().map(|c: &Chamber1D| c.hi.clone()) {
            if prev != lo {
                let what = if lo < prev { "overlaps" } else { "leaves a gap after" };
                return Err(Error::InvalidScenario(format!("{path}: range {what} the previous chamber")));
            }
        }
        let volume = match (&ch.class, &ch.volume) {
            (Some(c), None) => {
                let m = model
                    .as_ref()
                    .ok_or_else(|| Error::InvalidScenario(format!("{path}.class: no threefold basis")))?;
                VolumeSource::Class(names_to_vec(&format!("{path}.class"), m.basis(), c, Poly::zero(), poly)?)
            }
            (None, Some(v)) => VolumeSource::Poly(poly(&format!("{path}.volume"), v)?),
            _ => {
                return Err(Error::InvalidScenario(format!(
                    "{path}: exactly one of class and volume is required"
                )))
            }
        };
        let restriction = match &ch.restriction {
            None => None,
            Some(r) => {
                if surface.is_none() {
                    return Err(Error::InvalidScenario(format!("{path}.restriction: no surface lattice")));
                }
                let q = names_to_vec(&format!("{path}.restriction.q"), &curve_names, &r.q, Poly::zero(), poly)?;
                let n = names_to_vec(&format!("{path}.restriction.n"), &curve_names, &r.n, Poly::zero(), poly)?;
                Some(Restriction {
                    q: Class::from_vec(q),
                    n: Class::from_vec(n),
                })
            }
        };
        chambers.push(Chamber1D {
            lo,
            hi,
            volume,
            restriction,
        });
    }
    let threefold = Threefold {
        model,
        divisor: tf.divisor,
        a: positive("threefold.a", &tf.a)?,
        chambers,
    };

    let mut refinements = Vec::new();
    if !raw.refinements.is_empty() {
        let lat = surface
            .as_ref()
            .ok_or_else(|| Error::InvalidScenario("refinements: no surface lattice".into()))?;
        if threefold.chambers.iter().any(|c| c.restriction.is_none()) {
            return Err(Error::InvalidScenario(
                "refinements: every chamber needs a surface restriction".into(),
            ));
        }
        for (k, r) in raw.refinements.iter().enumerate() {
            let path = format!("refinements[{k}]");
            let curve = lat.require(&r.curve).map_err(|e| at(&path, e))?;
            let sigma = names_to_vec(&format!("{path}.sigma"), &curve_names, &r.sigma, Rational::zero(), rational)?;
            let mut points = Vec::new();
            for (j, p) in r.points.iter().enumerate() {
                let pp = format!("{path}.points[{j}]");
                let mults = names_to_vec(&format!("{pp}.mults"), &curve_names, &p.mults, Rational::zero(), rational)?;
                if !mults[curve].is_zero() {
                    return Err(Error::InvalidScenario(format!(
                        "{pp}.mults: lists the refinement curve itself"
                    )));
                }
                if mults.iter().any(Signed::is_negative) {
                    return Err(Error::InvalidScenario(format!("{pp}.mults: negative multiplicity")));
                }
                if points.iter().any(|q: &Point| q.spec.name == p.name) {
                    return Err(Error::InvalidScenario(format!("{pp}: duplicate point name {:?}", p.name)));
                }
                let offset = match &p.offset {
                    Some(o) => poly(&format!("{pp}.offset"), o)?,
                    None => Poly::zero(),
                };
                points.push(Point {
                    spec: PointSpec {
                        name: p.name.clone(),
                        mults: Class::from_vec(mults),
                        offset,
                    },
                    a: positive(&format!("{pp}.a"), &p.a)?,
                });
            }
            if refinements.iter().any(|q: &Refinement| q.curve == curve) {
                return Err(Error::InvalidScenario(format!("{path}: duplicate refinement curve")));
            }
            refinements.push(Refinement {
                curve,
                a: positive(&format!("{path}.a"), &r.a)?,
                sigma: Class::from_vec(sigma),
                points,
            });
        }
    }

    let mut tasks: Vec<Task> = raw
        .tasks
        .iter()
        .map(|t| t.parse().map_err(|e| at("tasks", e)))
        .collect::<Result<_>>()?;
    if tasks.is_empty() {
        tasks = Task::ALL.to_vec();
    }
    tasks.sort();
    tasks.dedup();

    let mut scenario = Scenario {
        name: raw.name,
        description: raw.description,
        diagnostic: raw.diagnostic,
        anchors: raw.anchors,
        printed: raw.printed,
        threefold,
        surface,
        refinements,
        tasks,
        expected: BTreeMap::new(),
    };
    for (k, v) in &raw.expected {
        scenario.check_key(k).map_err(|e| at("expected", e))?;
        scenario.expected.insert(k.clone(), rational(&format!("expected.{k}"), v)?);
    }
    for k in scenario.anchors.keys().chain(scenario.printed.keys()) {
        scenario.check_key(k).map_err(|e| at("anchors/printed", e))?;
    }
    Ok(scenario)
}

impl Scenario {
    pub fn lattice(&self) -> Option<&CurveLattice> {
        self.surface.as_ref()
    }

    pub fn curve_name(&self, r: &Refinement) -> &str {
        self.surface.as_ref().map_or("", |l| l.name(r.curve))
    }

    /// Accepts `s_divisor`, `delta_chain`, `s_curve:C`, `f_point:C:p` and
    /// `s_point:C:p` with names that resolve.
    fn check_key(&self, key: &str) -> Result<()> {
        let parts: Vec<&str> = key.split(':').collect();
        let bad = || Err(Error::InvalidScenario(format!("unresolved result key {key:?}")));
        let refinement = |c: &str| {
            self.refinements
                .iter()
                .find(|r| self.curve_name(r) == c)
        };
        match parts.as_slice() {
            ["s_divisor"] | ["delta_chain"] => Ok(()),
            ["s_curve", c] => refinement(c).map_or_else(bad, |_| Ok(())),
            ["f_point" | "s_point", c, p] => match refinement(c) {
                Some(r) if r.points.iter().any(|q| q.spec.name == *p) => Ok(()),
                _ => bad(),
            },
            _ => bad(),
        }
    }

    /// Canonical JSON text; parsing it yields an equal scenario.
    pub fn to_json(&self) -> String {
        let raw = self.to_raw();
        let mut s = serde_json::to_string_pretty(&raw).expect("raw scenario serializes");
        s.push('\n');
        s
    }

    fn to_raw(&self) -> RawScenario {
        let show_poly = |p: &Poly| p.to_string();
        let curve_names: Vec<String> = self.surface.as_ref().map(|l| l.names().to_vec()).unwrap_or_default();
        let tf = &self.threefold;
        let (basis, intersections) = match &tf.model {
            None => (Vec::new(), Vec::new()),
            Some(m) => {
                let b = m.basis().to_vec();
                let ents = m
                    .entries()
                    .iter()
                    .map(|([i, j, k], v)| [b[*i].clone(), b[*j].clone(), b[*k].clone(), format_rational(v)])
                    .collect();
                (b, ents)
            }
        };
        let chambers = tf
            .chambers
            .iter()
            .map(|ch| {
                let (class, volume) = match &ch.volume {
                    VolumeSource::Class(c) => (Some(vec_to_names(&basis, c, Poly::is_zero, show_poly)), None),
                    VolumeSource::Poly(p) => (None, Some(p.to_string())),
                };
                RawChamber {
                    range: [format_rational(&ch.lo), format_rational(&ch.hi)],
                    class,
                    volume,
                    restriction: ch.restriction.as_ref().map(|r| RawRestriction {
                        q: vec_to_names(&curve_names, r.q.coeffs(), Poly::is_zero, show_poly),
                        n: vec_to_names(&curve_names, r.n.coeffs(), Poly::is_zero, show_poly),
                    }),
                }
            })
            .collect();
        let surface = self.surface.as_ref().map(|l| RawSurface {
            curves: (0..l.len())
                .map(|i| RawCurve {
                    name: l.name(i).to_string(),
                    active: l.is_active(i),
                })
                .collect(),
            gram: l.gram().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        });
        let refinements = self
            .refinements
            .iter()
            .map(|r| RawRefinement {
                curve: curve_names[r.curve].clone(),
                a: format_rational(&r.a),
                sigma: vec_to_names(&curve_names, r.sigma.coeffs(), Zero::is_zero, format_rational),
                points: r
                    .points
                    .iter()
                    .map(|p| RawPoint {
                        name: p.spec.name.clone(),
                        a: format_rational(&p.a),
                        mults: vec_to_names(&curve_names, p.spec.mults.coeffs(), Zero::is_zero, format_rational),
                        offset: (!p.spec.offset.is_zero()).then(|| p.spec.offset.to_string()),
                    })
                    .collect(),
            })
            .collect();
        RawScenario {
            name: self.name.clone(),
            description: self.description.clone(),
            diagnostic: self.diagnostic,
            anchors: self.anchors.clone(),
            printed: self.printed.clone(),
            threefold: RawThreefold {
                basis,
                intersections,
                divisor: tf.divisor.clone(),
                a: format_rational(&tf.a),
                chambers,
            },
            surface,
            refinements,
            tasks: self.tasks.iter().map(|t| t.name().to_string()).collect(),
            expected: self.expected.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect(),
        }
    }

    /// The scenario for `k·L`: parameters stretch by `k`, classes scale by
    /// `k`, volumes by `k³`. Log discrepancies and multiplicities are fixed.
    /// Expected S and F values scale by `k` and the δ bound by `1/k`;
    /// printed values are dropped.
    pub fn scaled(&self, k: &Rational) -> Scenario {
        assert!(k.is_positive(), "scale factor must be positive");
        let k3 = k * k * k;
        let chambers = self
            .threefold
            .chambers
            .iter()
            .map(|ch| Chamber1D {
                lo: &ch.lo * k,
                hi: &ch.hi * k,
                volume: match &ch.volume {
                    VolumeSource::Class(c) => VolumeSource::Class(c.iter().map(|p| p.rescale_args(k).scale(k)).collect()),
                    VolumeSource::Poly(p) => VolumeSource::Poly(p.rescale_args(k).scale(&k3)),
                },
                restriction: ch.restriction.as_ref().map(|r| Restriction {
                    q: rescale_class(&r.q, k),
                    n: rescale_class(&r.n, k),
                }),
            })
            .collect();
        let refinements = self
            .refinements
            .iter()
            .map(|r| Refinement {
                points: r
                    .points
                    .iter()
                    .map(|p| Point {
                        spec: PointSpec {
                            offset: p.spec.offset.rescale_args(k).scale(k),
                            ..p.spec.clone()
                        },
                        a: p.a.clone(),
                    })
                    .collect(),
                ..r.clone()
            })
            .collect();
        let expected = self
            .expected
            .iter()
            .map(|(key, v)| {
                let w = if key == "delta_chain" { v / k } else { v * k };
                (key.clone(), w)
            })
            .collect();
        Scenario {
            name: format!("{} x{}", self.name, format_rational(k)),
            printed: BTreeMap::new(),
            threefold: Threefold {
                chambers,
                ..self.threefold.clone()
            },
            refinements,
            expected,
            ..self.clone()
        }
    }
}

/// Maps a class given by curve name to a coefficient vector.
pub fn class_by_name(lat: &CurveLattice, map: &[(&str, Rational)]) -> Result<DivClass> {
    let mut c = Class::zero(lat.len());
    for (n, x) in map {
        c.add_curve(lat.require(n)?, x.clone());
    }
    Ok(c)
}

/// Value of a parametrized class at `u`.
pub fn class_at(c: &ParamClass, u: &Rational) -> DivClass {
    let z = Rational::zero();
    c.map(|p| p.eval(u, &z))
}
