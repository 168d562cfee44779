//! Newton polygons and Puiseux expansions of the roots of P(mu, V) at mu = 0.

mod expand;
mod polygon;
mod residual;

use crate::algebraic::AlgebraicNumber;
use num_traits::{One, Zero};

use crate::arith::{fmt_rational, Rational};

pub use expand::{expand, expand_with, ExpandOptions};
pub use polygon::{newton_polygon, Segment};
pub use residual::{expansion_residual, reconstruct_residual, Valuation};

/// `coefficient * mu^exponent`.
#[derive(Clone, Debug)]
pub struct PuiseuxTerm {
    pub coefficient: AlgebraicNumber,
    pub exponent: Rational,
}

#[derive(Clone, Debug)]
pub struct PuiseuxExpansion {
    pub terms: Vec<PuiseuxTerm>,
    /// Common denominator of the exponents.
    pub ramification: u64,
    /// The singular part has separated this branch from all others.
    pub stabilized: bool,
    /// The terms sum to an exact root; no truncation happened.
    pub exact: bool,
    pub iterations_used: usize,
}

/// A conjugacy class of roots sharing one Puiseux series up to mu^(1/q) -> zeta mu^(1/q).
#[derive(Clone, Debug)]
pub struct Branch {
    /// Value of the roots at mu = 0.
    pub center: AlgebraicNumber,
    pub ramification: u64,
    /// Number of roots of P represented by this branch.
    pub conjugate_count: u64,
    pub expansion: PuiseuxExpansion,
}

impl PuiseuxTerm {
    pub fn render(&self, var: &str) -> String {
        let c = self.coefficient.to_string();
        let c = match self.coefficient.to_rational() {
            Some(_) => c,
            None => format!("({c})"),
        };
        if self.exponent.is_zero() {
            return c;
        }
        let x = if self.exponent.is_one() { var.to_string() } else { format!("{var}^{{{}}}", fmt_rational(&self.exponent)) };
        match c.as_str() {
            "1" => x,
            "-1" => format!("-{x}"),
            _ => format!("{c}*{x}"),
        }
    }
}

impl PuiseuxExpansion {
    /// Terms joined by `+`, exponents written as `var^{p/q}`.
    pub fn render(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let r = t.render(var);
            if i == 0 {
                s.push_str(&r);
            } else if let Some(rest) = r.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(&r);
            }
        }
        if !self.exact {
            s.push_str(" + ...");
        }
        s
    }
}

impl Branch {
    pub fn render(&self, var: &str) -> String {
        format!("center={} q={} series={}", self.center, self.ramification, self.expansion.render(var))
    }
}
