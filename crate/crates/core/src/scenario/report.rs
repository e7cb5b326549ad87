//! Run reports and their JSON, Markdown and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::exact::parse_rational;
use crate::{Error, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResultRow {
    pub key: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRow {
    pub label: String,
    pub a: String,
    pub s: String,
    pub ratio: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaRow {
    pub value: String,
    pub level: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub u: [String; 2],
    pub v: [String; 2],
    pub support: Vec<String>,
    pub n: BTreeMap<String, String>,
    pub p_square: String,
    pub p_dot_c: String,
}

/// Support cells of one sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChamberTable {
    pub curve: String,
    pub u_breaks: Vec<String>,
    /// `(lo, hi, t(u))` pieces.
    pub t: Vec<[String; 3]>,
    /// `(lo, hi, d(u))` pieces.
    pub d: Vec<[String; 3]>,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BodyRow {
    pub curve: String,
    pub point: String,
    pub at_u: String,
    pub area: String,
    pub barycenter: [String; 2],
    pub vertices: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub scope: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaskError {
    pub task: String,
    pub kind: String,
    pub message: String,
}

impl TaskError {
    pub fn new(task: impl Into<String>, e: &Error) -> Self {
        let kind = match e {
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::NotPseudoeffective(_) => "not_pseudoeffective",
            Error::NotNefInput(_) => "not_nef_input",
            Error::DegenerateFamily(_) => "degenerate_family",
            Error::DiscontinuousVolume(_) => "discontinuous_volume",
            Error::ZeroArea => "zero_area",
            Error::InvariantViolation(_) => "invariant_violation",
        };
        Self {
            task: task.into(),
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub key: String,
    pub expected: String,
    pub computed: String,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrintedRow {
    pub key: String,
    pub printed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<String>,
    /// `None` when the printed text is not a plain rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleRow {
    pub curve: String,
    pub samples: usize,
    pub oracle_checked: usize,
}

/// Everything a run produced. All numbers are exact rational strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub diagnostic: bool,
    pub tasks: Vec<String>,
    pub results: Vec<ResultRow>,
    pub levels: Vec<LevelRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaRow>,
    pub tables: Vec<ChamberTable>,
    pub bodies: Vec<BodyRow>,
    pub checks: Vec<CheckRow>,
    pub samples: Vec<SampleRow>,
    pub warnings: Vec<String>,
    pub errors: Vec<TaskError>,
    pub comparisons: Vec<Comparison>,
    pub printed: Vec<PrintedRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

impl Report {
    /// Exact value of a result key such as `s_curve:B`.
    pub fn value(&self, key: &str) -> Option<Rational> {
        self.results
            .iter()
            .find(|r| r.key == key)
            .map(|r| parse_rational(&r.value).expect("report values are rationals"))
    }

    pub fn table(&self, curve: &str) -> Option<&ChamberTable> {
        self.tables.iter().find(|t| t.curve == curve)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| !c.matched)
    }

    /// Process exit status. Expected-value mismatches count only with
    /// `check` and never for diagnostic scenarios.
    pub fn exit_code(&self, check: bool) -> i32 {
        if self.errors.iter().any(|e| e.kind == "invariant_violation") || self.failed_checks().next().is_some() {
            EXIT_INVARIANT
        } else if !self.errors.is_empty() {
            EXIT_INVALID
        } else if check && !self.diagnostic && self.mismatches().next().is_some() {
            EXIT_MISMATCH
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "# {}\n", self.scenario);
        if self.diagnostic {
            let _ = writeln!(o, "_Diagnostic scenario: mismatches are informational._\n");
        }
        if !self.results.is_empty() {
            let _ = writeln!(o, "## Results\n\n| quantity | value | label |\n|---|---|---|");
            for r in &self.results {
                let _ = writeln!(o, "| `{}` | {} | {} |", r.key, r.value, r.anchor.as_deref().unwrap_or(""));
            }
            o.push('\n');
        }
        if !self.levels.is_empty() {
            let _ = writeln!(o, "## δ-chain\n\n| level | A | S | A/S |\n|---|---|---|---|");
            for l in &self.levels {
                let _ = writeln!(o, "| {} | {} | {} | {} |", l.label, l.a, l.s, l.ratio);
            }
            if let Some(d) = &self.delta {
                let _ = writeln!(o, "\nδ ≥ **{}** (attained at {})", d.value, d.label);
            }
            o.push('\n');
        }
        for t in &self.tables {
            let _ = writeln!(o, "## Sweep along {}\n", t.curve);
            let pieces = |xs: &[[String; 3]]| {
                xs.iter()
                    .map(|[a, b, p]| format!("{p} on [{a}, {b}]"))
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            let _ = writeln!(o, "t(u): {}\n\nd(u): {}\n", pieces(&t.t), pieces(&t.d));
            let _ = writeln!(o, "| u | v | support | N | P² | P·C |\n|---|---|---|---|---|---|");
            for r in &t.rows {
                let n = r.n.iter().map(|(k, v)| format!("({v})·{k}")).collect::<Vec<_>>().join(" + ");
                let _ = writeln!(
                    o,
                    "| [{}, {}] | [{}, {}] | {} | {} | {} | {} |",
                    r.u[0],
                    r.u[1],
                    r.v[0],
                    r.v[1],
                    if r.support.is_empty() { "∅".to_string() } else { r.support.join(", ") },
                    if n.is_empty() { "0".into() } else { n },
                    r.p_square,
                    r.p_dot_c
                );
            }
            o.push('\n');
        }
        if !self.bodies.is_empty() {
            let _ = writeln!(o, "## Okounkov bodies\n\n| curve | point | u | area | barycenter |\n|---|---|---|---|---|");
            for b in &self.bodies {
                let _ = writeln!(
                    o,
                    "| {} | {} | {} | {} | ({}, {}) |",
                    b.curve, b.point, b.at_u, b.area, b.barycenter[0], b.barycenter[1]
                );
            }
            o.push('\n');
        }
        if !self.checks.is_empty() {
            let _ = writeln!(o, "## Checks\n\n| scope | check | verdict | detail |\n|---|---|---|---|");
            for c in &self.checks {
                let _ = writeln!(
                    o,
                    "| {} | {} | {} | {} |",
                    c.scope,
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.detail
                );
            }
            o.push('\n');
        }
        if !self.samples.is_empty() {
            let _ = writeln!(o, "## Pointwise verification\n\n| curve | samples | oracle |\n|---|---|---|");
            for s in &self.samples {
                let _ = writeln!(o, "| {} | {} | {} |", s.curve, s.samples, s.oracle_checked);
            }
            o.push('\n');
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(o, "## Expected values\n\n| quantity | expected | computed | |\n|---|---|---|---|");
            for c in &self.comparisons {
                let _ = writeln!(
                    o,
                    "| `{}` | {} | {} | {} |",
                    c.key,
                    c.expected,
                    c.computed,
                    if c.matched { "ok" } else { "MISMATCH" }
                );
            }
            o.push('\n');
        }
        if !self.printed.is_empty() {
            let _ = writeln!(o, "## Printed values\n\n| quantity | printed | computed |\n|---|---|---|");
            for p in &self.printed {
                let _ = writeln!(o, "| `{}` | {} | {} |", p.key, p.printed, p.computed.as_deref().unwrap_or("-"));
            }
            o.push('\n');
        }
        for w in &self.warnings {
            let _ = writeln!(o, "- warning: {w}");
        }
        for e in &self.errors {
            let _ = writeln!(o, "- error in {}: {}", e.task, e.message);
        }
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(o, "\nwall time: {ms} ms");
        }
        o
    }

    /// One row per support cell.
    pub fn to_csv(&self, with_header: bool) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        if with_header {
            w.write_record([
                "scenario", "curve", "u_lo", "u_hi", "v_lo", "v_hi", "support", "n_coeffs", "p_square", "p_dot_c",
            ])
            .expect("in-memory write");
        }
        for t in &self.tables {
            for r in &t.rows {
                let n = r.n.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
                w.write_record([
                    self.scenario.as_str(),
                    t.curve.as_str(),
                    &r.u[0],
                    &r.u[1],
                    &r.v[0],
                    &r.v[1],
                    &r.support.join(";"),
                    &n,
                    &r.p_square,
                    &r.p_dot_c,
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
