use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::{Branch, PuiseuxExpansion};
use crate::algebraic::{Elem, FieldTower};
use crate::arith::{BiPoly, Rational};
use crate::error::Result;

/// mu-adic valuation of a Puiseux series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Valuation {
    Finite(#[serde(serialize_with = "crate::serde_rational")] Rational),
    Infinite,
}

impl Valuation {
    /// Strictly larger than `cap`.
    pub fn exceeds(&self, cap: &Rational) -> bool {
        match self {
            Valuation::Finite(v) => v > cap,
            Valuation::Infinite => true,
        }
    }
}

type Series = BTreeMap<u64, Elem>;

fn mul(t: &FieldTower, a: &Series, b: &Series) -> Series {
    let mut out = Series::new();
    for (i, x) in a {
        for (j, y) in b {
            let v = t.mul(x, y);
            let slot = out.entry(i + j).or_insert_with(Elem::zero);
            *slot = t.add(slot, &v);
        }
    }
    out
}

/// Valuation of P(mu, psi(mu)) where psi is the (truncated) expansion.
pub fn expansion_residual(p: &BiPoly, e: &PuiseuxExpansion) -> Result<Valuation> {
    let q = e.ramification.max(1);
    let mut t = match e.terms.first() {
        Some(term) => term.coefficient.tower().clone(),
        None => FieldTower::new(),
    };
    let mut psi = Series::new();
    for term in &e.terms {
        let k = &term.exponent * Rational::from_integer(q.into());
        debug_assert!(k.is_integer());
        let k = k.to_integer().try_into().unwrap_or(0u64);
        let slot = psi.entry(k).or_insert_with(Elem::zero);
        *slot = t.add(slot, term.coefficient.value());
    }
    let mut acc = Series::new();
    for c in p.coeffs().iter().rev() {
        acc = mul(&t, &acc, &psi);
        for (i, a) in c.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let slot = acc.entry(i as u64 * q).or_insert_with(Elem::zero);
            *slot = t.add(slot, &Elem::Q(a.clone()));
        }
    }
    for (k, c) in &acc {
        if !t.is_zero(c)? {
            return Ok(Valuation::Finite(Rational::new((*k as i64).into(), (q as i64).into())));
        }
    }
    Ok(Valuation::Infinite)
}

/// Smallest residual valuation over the expansions of `branches`.
pub fn reconstruct_residual(p: &BiPoly, branches: &[Branch]) -> Result<Valuation> {
    let mut best = Valuation::Infinite;
    for b in branches {
        if let Valuation::Finite(v) = expansion_residual(p, &b.expansion)? {
            if !matches!(&best, Valuation::Finite(w) if *w <= v) {
                best = Valuation::Finite(v);
            }
        }
    }
    Ok(best)
}
