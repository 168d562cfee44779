//! Exact rational arithmetic: univariate and bivariate polynomials over Q,
//! gcds, resultants, content and separable parts, and a small parser.

mod algorithms;
mod bipoly;
mod parse;
mod unipoly;

pub use algorithms::{content, content_and_primitive, poly_gcd, resultant, separable_part, Var};
pub use bipoly::BiPoly;
pub use parse::{parse_bipoly, ParsedPoly};
pub use unipoly::UniPoly;
pub(crate) use unipoly::{format_terms, monomial_str};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of two positive integers.
pub fn lcm_u64(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Exact conversion of a finite f64.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
