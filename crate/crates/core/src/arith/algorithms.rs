use num_traits::{One, Signed, Zero};

use super::{BiPoly, Rational, UniPoly};
use crate::error::{Error, Result};

/// Which variable an operation on a [`BiPoly`] acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Mu,
    V,
}

/// Monic gcd in Q[mu] of the V-coefficients. Zero for the zero polynomial.
pub fn content(p: &BiPoly) -> UniPoly {
    let mut g = UniPoly::zero();
    for c in p.coeffs() {
        g = g.gcd(c);
        if g.is_constant() && !g.is_zero() {
            break;
        }
    }
    g
}

/// `(c, P / c)` with `c` the monic content.
pub fn content_and_primitive(p: &BiPoly) -> (UniPoly, BiPoly) {
    let c = content(p);
    if c.is_zero() {
        return (c, BiPoly::zero());
    }
    let q = p.div_uni_exact(&c).expect("content divides every coefficient");
    (c, q)
}

/// Scale so that the top mu-coefficient of the leading V-coefficient is 1.
fn normalize_leading(p: BiPoly) -> BiPoly {
    match p.leading().and_then(|c| c.leading()).cloned() {
        Some(l) => p.scale(&l.recip()),
        None => p,
    }
}

fn primitive(p: &BiPoly) -> BiPoly {
    content_and_primitive(p).1
}

/// Exact quotient h^(1-delta) g^delta used by the subresultant recurrence.
fn next_h(h: &UniPoly, g: &UniPoly, delta: usize) -> UniPoly {
    if delta == 0 {
        return h.clone();
    }
    let num = g.pow(delta as u32);
    let den = h.pow((delta - 1) as u32);
    num.div_exact(&den).expect("subresultant recurrence divides exactly")
}

/// A common factor of positive V-degree survives every specialization mu = c
/// where neither leading coefficient vanishes, so a trivial univariate gcd
/// there proves the bivariate gcd trivial.
fn coprime_at_a_point(a: &BiPoly, b: &BiPoly) -> bool {
    let (la, lb) = (a.leading().unwrap(), b.leading().unwrap());
    for c in [2i64, 3, 5, -7, 11] {
        let c = super::int(c);
        if la.eval(&c).is_zero() || lb.eval(&c).is_zero() {
            continue;
        }
        return a.eval_mu(&c).gcd(&b.eval_mu(&c)).degree() == Some(0);
    }
    false
}

/// Subresultant gcd in Q[mu][V]; the result is primitive with normalized lead.
fn gcd_v(a: &BiPoly, b: &BiPoly) -> BiPoly {
    if a.is_zero() {
        return normalize_leading(primitive(b));
    }
    if b.is_zero() {
        return normalize_leading(primitive(a));
    }
    if coprime_at_a_point(a, b) {
        return BiPoly::constant(UniPoly::one());
    }
    let (mut a, mut b) = if a.deg_v() >= b.deg_v() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    a = primitive(&a);
    b = primitive(&b);
    let mut g = UniPoly::one();
    let mut h = UniPoly::one();
    loop {
        let delta = a.deg_v().unwrap() - b.deg_v().unwrap();
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return normalize_leading(primitive(&b));
        }
        if r.deg_v() == Some(0) {
            return BiPoly::constant(UniPoly::one());
        }
        a = b;
        let denom = &g * &h.pow(delta as u32);
        b = r.div_uni_exact(&denom).expect("subresultant division is exact");
        g = a.leading().unwrap().clone();
        h = next_h(&h, &g, delta);
    }
}

/// Gcd with respect to `var`, over the field of rational functions in the
/// other variable, made primitive and scaled to a unit leading rational.
pub fn poly_gcd(p: &BiPoly, q: &BiPoly, var: Var) -> BiPoly {
    match var {
        Var::V => gcd_v(p, q),
        Var::Mu => gcd_v(&p.transpose(), &q.transpose()).transpose(),
    }
}

/// Square-free part in V after content removal, with positive leading sign.
pub fn separable_part(p: &BiPoly) -> BiPoly {
    let (_, p0) = content_and_primitive(p);
    if p0.is_zero() {
        return p0;
    }
    let g = gcd_v(&p0, &p0.derivative_v());
    let h = if g.deg_v().unwrap_or(0) == 0 {
        p0
    } else {
        primitive(&p0.div_exact(&g).expect("gcd divides the polynomial"))
    };
    if h.leading().and_then(|c| c.leading()).is_some_and(|l| l.is_negative()) {
        -h
    } else {
        h
    }
}

fn resultant_v(a: &BiPoly, b: &BiPoly) -> Result<UniPoly> {
    if a.is_zero() || b.is_zero() {
        return Ok(UniPoly::zero());
    }
    let (da, db) = (a.deg_v().unwrap(), b.deg_v().unwrap());
    if da == 0 && db == 0 {
        return Err(Error::Degenerate("resultant of two polynomials constant in the eliminated variable".into()));
    }
    if db == 0 {
        return Ok(b.coeffs()[0].pow(da as u32));
    }
    if da == 0 {
        return Ok(a.coeffs()[0].pow(db as u32));
    }
    let (ca, pa) = content_and_primitive(a);
    let (cb, pb) = content_and_primitive(b);
    let t = &ca.pow(db as u32) * &cb.pow(da as u32);
    let (mut a, mut b) = (pa, pb);
    let mut s = Rational::one();
    if da < db {
        std::mem::swap(&mut a, &mut b);
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
    }
    let mut g = UniPoly::one();
    let mut h = UniPoly::one();
    loop {
        let (na, nb) = (a.deg_v().unwrap(), b.deg_v().unwrap());
        let delta = na - nb;
        if na % 2 == 1 && nb % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        if r.is_zero() {
            return Ok(UniPoly::zero());
        }
        let denom = &g * &h.pow(delta as u32);
        b = r.div_uni_exact(&denom).expect("subresultant division is exact");
        g = a.leading().unwrap().clone();
        h = next_h(&h, &g, delta);
        if b.deg_v().unwrap() == 0 {
            let na = a.deg_v().unwrap();
            let lb = b.coeffs()[0].clone();
            let hh = if na == 0 {
                h
            } else {
                lb.pow(na as u32).div_exact(&h.pow((na - 1) as u32)).expect("final subresultant step is exact")
            };
            return Ok((&hh * &t).scale(&s));
        }
    }
}

/// Resultant eliminating `var`; a polynomial in the other variable.
pub fn resultant(p: &BiPoly, q: &BiPoly, var: Var) -> Result<UniPoly> {
    match var {
        Var::V => resultant_v(p, q),
        Var::Mu => resultant_v(&p.transpose(), &q.transpose()),
    }
}
