//! Exact rational arithmetic, sparse bivariate polynomials and their integrals.

mod parse;
mod piecewise;
mod poly;

pub use piecewise::{integrate_piecewise, PiecewiseFn};
pub use poly::{integrate_interval, integrate_strip, AffineForm, Poly, Var};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::{Error, Rational};

/// Shorthand constructor `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a leading-minus variant (ASCII `-` or U+2212).
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim().replace('\u{2212}', "-");
    let bad = || Error::InvalidScenario(format!("malformed rational {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t.as_str(), "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub mod serde_rational {
    //! Serde adapters for rational strings.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
