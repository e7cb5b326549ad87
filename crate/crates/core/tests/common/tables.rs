//! Hand-derived sweep tables: for each cell the u-range, the v-range and
//! every coefficient of the negative part.

use std::collections::BTreeMap;

use deltakit::exact::{parse_rational, Poly};
use deltakit::scenario::Report;

pub struct Cell {
    pub u: [&'static str; 2],
    pub v: [&'static str; 2],
    pub n: Vec<(&'static str, &'static str)>,
}

pub struct HandTable {
    pub scenario: &'static str,
    pub curve: &'static str,
    pub cells: Vec<Cell>,
}

fn cell(u0: &'static str, u1: &'static str, v0: &'static str, v1: &'static str, n: &[(&'static str, &'static str)]) -> Cell {
    Cell {
        u: [u0, u1],
        v: [v0, v1],
        n: n.to_vec(),
    }
}

fn poly(s: &str) -> Result<Poly, String> {
    s.parse().map_err(|e| format!("{s}: {e}"))
}

/// Compares a report table with a hand table; the error names the first
/// differing cell.
pub fn compare(r: &Report, want: &HandTable) -> Result<(), String> {
    let t = r.table(want.curve).ok_or_else(|| format!("no table for {}", want.curve))?;
    if t.rows.len() != want.cells.len() {
        return Err(format!("{}: {} cells, expected {}", want.curve, t.rows.len(), want.cells.len()));
    }
    for (k, (got, c)) in t.rows.iter().zip(&want.cells).enumerate() {
        let ctx = format!("{}/{} cell {k}", want.scenario, want.curve);
        let rat = |s: &str| parse_rational(s).map_err(|e| format!("{ctx}: {e}"));
        if rat(&got.u[0])? != rat(c.u[0])? || rat(&got.u[1])? != rat(c.u[1])? {
            return Err(format!("{ctx}: u-range [{}, {}]", got.u[0], got.u[1]));
        }
        if poly(&got.v[0])? != poly(c.v[0])? || poly(&got.v[1])? != poly(c.v[1])? {
            return Err(format!("{ctx}: v-range [{}, {}]", got.v[0], got.v[1]));
        }
        let got_n: BTreeMap<&str, Poly> =
            got.n.iter().map(|(k, p)| Ok((k.as_str(), poly(p)?))).collect::<Result<_, String>>()?;
        let want_n: BTreeMap<&str, Poly> =
            c.n.iter().map(|(k, p)| Ok((*k, poly(p)?))).collect::<Result<_, String>>()?;
        if got_n != want_n {
            return Err(format!("{ctx}: N = {:?}", got.n));
        }
        let mut s1: Vec<&str> = got.support.iter().map(String::as_str).collect();
        let mut s2: Vec<&str> = want_n.keys().copied().collect();
        s1.sort();
        s2.sort();
        if s1 != s2 {
            return Err(format!("{ctx}: support {s1:?}"));
        }
    }
    Ok(())
}

pub fn hand_tables() -> Vec<HandTable> {
    let mut out = Vec::new();
    out.push(HandTable {
        scenario: "qp",
        curve: "B",
        cells: vec![
            cell("0", "1", "0", "1", &[]),
            cell("0", "1", "1", "2", &[("e2", "v - 1")]),
            cell("1", "2", "0", "2 - u", &[]),
            cell("1", "2", "2 - u", "4 - 2*u", &[("e2", "-2 + u + v")]),
        ],
    });
    out.push(HandTable {
        scenario: "e2",
        curve: "l2",
        cells: vec![
            cell("0", "1", "0", "1", &[]),
            cell("0", "1", "1", "2 + u", &[("s", "v - 1")]),
            cell("1", "2", "0", "2 - u", &[]),
            cell("1", "2", "2 - u", "5 - 2*u", &[("s", "-2 + u + v")]),
        ],
    });

    let l = |x: &'static str| vec![("l01", x), ("l02", x), ("l03", x), ("l04", x)];
    let with = |mut a: Vec<(&'static str, &'static str)>, b: &[(&'static str, &'static str)]| {
        a.extend_from_slice(b);
        a
    };
    out.push(HandTable {
        scenario: "s-h3",
        curve: "e0",
        cells: vec![
            cell("0", "1", "0", "3 - u", &[]),
            cell("0", "1", "3 - u", "4 - 2*u", &l("-3 + u + v")),
            cell("0", "1", "4 - 2*u", "(8 - 3*u)/2", &with(l("-3 + u + v"), &[("conic", "-4 + 2*u + v")])),
            cell("1", "3/2", "0", "6 - 4*u", &[]),
            cell("1", "3/2", "6 - 4*u", "5 - 3*u", &[("conic", "-6 + 4*u + v")]),
            cell("1", "3/2", "5 - 3*u", "(13 - 8*u)/2", &with(l("-5 + 3*u + v"), &[("conic", "-6 + 4*u + v")])),
        ],
    });

    out.push(HandTable {
        scenario: "d1",
        curve: "g",
        cells: vec![
            cell("0", "1", "0", "u", &[("h", "v"), ("l3p", "2*v")]),
            cell("1", "2", "0", "(u - 1)/2", &[]),
            cell("1", "2", "(u - 1)/2", "u", &[("h", "(1 - u + 2*v)/2"), ("l3p", "1 - u + 2*v")]),
            cell("2", "3", "0", "1/2", &[]),
            cell("2", "3", "1/2", "2", &[("h", "(-1 + 2*v)/2"), ("l3p", "-1 + 2*v")]),
            cell("3", "4", "0", "(4 - u)/2", &[]),
            cell("3", "4", "(4 - u)/2", "(u - 2)/2", &[("l3p", "(-4 + u + 2*v)/2")]),
            cell("3", "4", "(u - 2)/2", "2", &[("h", "(2 - u + 2*v)/2"), ("l3p", "-1 + 2*v")]),
        ],
    });
    out.push(HandTable {
        scenario: "d1",
        curve: "l3p",
        cells: vec![
            cell("0", "1", "0", "u", &[("h", "v/2")]),
            cell("0", "1", "u", "2*u", &[("h", "v/2"), ("g", "v - u")]),
            cell("1", "2", "0", "1", &[("h", "v/2")]),
            cell("1", "2", "1", "1 + u", &[("h", "v/2"), ("g", "v - 1")]),
            cell("2", "3", "0", "1", &[("h", "v/2")]),
            cell("2", "3", "1", "3", &[("h", "v/2"), ("g", "v - 1")]),
            cell("3", "4", "0", "u - 3", &[]),
            cell("3", "4", "u - 3", "1", &[("h", "(3 - u + v)/2")]),
            cell("3", "4", "1", "3", &[("h", "(3 - u + v)/2"), ("g", "v - 1")]),
        ],
    });
    out.push(HandTable {
        scenario: "d1",
        curve: "r",
        cells: vec![
            cell("0", "1", "0", "u", &[("h", "v"), ("l3p", "v")]),
            cell("1", "2", "0", "u - 1", &[("h", "v/2")]),
            cell("1", "2", "u - 1", "u", &[("h", "(1 - u + 2*v)/2"), ("l3p", "1 - u + v")]),
            cell("2", "3", "0", "1", &[("h", "v/2")]),
            cell("2", "3", "1", "2", &[("h", "(-1 + 2*v)/2"), ("l3p", "v - 1")]),
            cell("3", "4", "0", "u - 3", &[]),
            cell("3", "4", "u - 3", "1", &[("h", "(3 - u + v)/2")]),
            cell("3", "4", "1", "2", &[("h", "(2 - u + 2*v)/2"), ("l3p", "v - 1")]),
        ],
    });

    out.push(HandTable {
        scenario: "e2-q-case1",
        curve: "e1t",
        cells: vec![
            cell("0", "1", "0", "1", &[]),
            cell("0", "1", "1", "1 + u", &[("st", "(v - 1)/2")]),
            cell("0", "1", "1 + u", "3 + 2*u", &[("l2t", "-1 - u + v"), ("st", "(v - 1)/2")]),
            cell("1", "2", "0", "2 - u", &[]),
            cell("1", "2", "2 - u", "3 - u", &[("st", "(-2 + u + v)/2")]),
            cell("1", "2", "3 - u", "8 - 3*u", &[("l2t", "-3 + u + v"), ("st", "(-2 + u + v)/2")]),
        ],
    });
    let e1_hi = ("e1h", "(-2 + u + 2*v)/3");
    let s_hi = ("sh", "(-4 + 2*u + v)/3");
    out.push(HandTable {
        scenario: "e2-q-case2",
        curve: "e2h",
        cells: vec![
            cell("0", "1", "0", "1 + u", &[("e1h", "v/2")]),
            cell("0", "1", "1 + u", "2", &[("l2h", "(-1 - u + v)/2"), ("e1h", "v/2")]),
            cell(
                "0",
                "1",
                "2",
                "5 + 3*u",
                &[("l2h", "(-1 - u + v)/2"), ("e1h", "(2*v - 1)/3"), ("sh", "(v - 2)/3")],
            ),
            cell("1", "2", "0", "4 - 2*u", &[("e1h", "v/2")]),
            cell("1", "2", "4 - 2*u", "3 - u", &[e1_hi, s_hi]),
            cell("1", "2", "3 - u", "13 - 5*u", &[("l2h", "(-3 + u + v)/2"), e1_hi, s_hi]),
        ],
    });

    let f2 = ("f2", "(2*v - 1)/2");
    let f2b = ("f2", "(-5 + u + 6*v)/6");
    let tp = ("tp", "(2 - u + 3*v)/3");
    let chain = vec![("fR", "3*v - 2"), ("h1", "(-4 + 6*v)/3"), ("h2", "(-2 + 3*v)/3")];
    let top = with(chain.clone(), &[tp, f2b]);
    let mid = with(chain, &[f2b]);
    out.push(HandTable {
        scenario: "r1",
        curve: "sR",
        cells: vec![
            cell("0", "1", "0", "u/2", &[("tp", "v")]),
            cell("1", "2", "0", "1/2", &[("tp", "v")]),
            cell("1", "2", "1/2", "(2 + u)/6", &[("tp", "v"), f2]),
            cell(
                "1",
                "2",
                "(2 + u)/6",
                "u/2",
                &[
                    ("tp", "v"),
                    ("fR", "(-2 - u + 6*v)/2"),
                    ("h1", "(-2 - u + 6*v)/3"),
                    ("h2", "(-2 - u + 6*v)/6"),
                    f2,
                ],
            ),
            cell("2", "3", "0", "(u - 2)/3", &[]),
            cell("2", "3", "(u - 2)/3", "(5 - u)/6", &[tp]),
            cell("2", "3", "(5 - u)/6", "2/3", &[tp, f2b]),
            cell("2", "3", "2/3", "(1 + u)/3", &top),
            cell("3", "4", "0", "(5 - u)/6", &[]),
            cell("3", "4", "(5 - u)/6", "(u - 2)/3", &[f2b]),
            cell("3", "4", "(u - 2)/3", "2/3", &[tp, f2b]),
            cell("3", "4", "2/3", "(11 - u)/6", &top),
            cell("4", "5", "0", "(5 - u)/6", &[]),
            cell("4", "5", "(5 - u)/6", "2/3", &[f2b]),
            cell("4", "5", "2/3", "(u - 2)/3", &mid),
            cell("4", "5", "(u - 2)/3", "(11 - u)/6", &top),
            cell("5", "7", "0", "(13 - u)/12", &[("f2", "v")]),
            cell(
                "5",
                "7",
                "(13 - u)/12",
                "(9 - u)/4",
                &[
                    ("fR", "(-13 + u + 12*v)/4"),
                    ("h1", "(-13 + u + 12*v)/6"),
                    ("h2", "(-13 + u + 12*v)/12"),
                    ("f2", "v"),
                ],
            ),
            cell("7", "9", "0", "(9 - u)/4", &[("f2", "v")]),
        ],
    });
    out
}
