//! Dense polynomials with coefficients in a field tower.

use super::tower::{Elem, FieldTower};
use crate::error::{Error, Result};

pub type TPoly = Vec<Elem>;

fn strip(mut p: TPoly) -> TPoly {
    while p.last().is_some_and(|c| c.is_trivially_zero()) {
        p.pop();
    }
    p
}

/// Drop leading coefficients that are zero in the field.
pub fn trim(t: &mut FieldTower, mut p: TPoly) -> Result<TPoly> {
    while let Some(last) = p.last() {
        if t.is_zero(last)? {
            p.pop();
        } else {
            break;
        }
    }
    Ok(p)
}

pub fn add(t: &FieldTower, a: &[Elem], b: &[Elem]) -> TPoly {
    let n = a.len().max(b.len());
    let z = Elem::zero();
    strip((0..n).map(|k| t.add(a.get(k).unwrap_or(&z), b.get(k).unwrap_or(&z))).collect())
}

pub fn sub(t: &FieldTower, a: &[Elem], b: &[Elem]) -> TPoly {
    let n = a.len().max(b.len());
    let z = Elem::zero();
    strip((0..n).map(|k| t.sub(a.get(k).unwrap_or(&z), b.get(k).unwrap_or(&z))).collect())
}

pub fn mul(t: &FieldTower, a: &[Elem], b: &[Elem]) -> TPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![Elem::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_trivially_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_trivially_zero() {
                v[i + j] = t.add(&v[i + j], &t.mul(x, y));
            }
        }
    }
    strip(v)
}

pub fn scale(t: &FieldTower, a: &[Elem], c: &Elem) -> TPoly {
    strip(a.iter().map(|x| t.mul(x, c)).collect())
}

pub fn deriv(t: &FieldTower, a: &[Elem]) -> TPoly {
    strip(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| t.scale(c, &crate::arith::int(k as i64)))
            .collect(),
    )
}

pub fn eval(t: &FieldTower, p: &[Elem], x: &Elem) -> Elem {
    let mut acc = Elem::zero();
    for c in p.iter().rev() {
        acc = t.add(&t.mul(&acc, x), c);
    }
    acc
}

pub fn monic(t: &mut FieldTower, p: TPoly) -> Result<TPoly> {
    let p = trim(t, p)?;
    let Some(lc) = p.last() else {
        return Ok(p);
    };
    let inv = t.inv(lc)?;
    let mut out = scale(t, &p, &inv);
    if let Some(last) = out.last_mut() {
        *last = Elem::one();
    }
    Ok(out)
}

pub fn divrem(t: &mut FieldTower, a: TPoly, b: TPoly) -> Result<(TPoly, TPoly)> {
    let b = trim(t, b)?;
    let Some(lc) = b.last() else {
        return Err(Error::DivisionByZero);
    };
    let lc_inv = t.inv(lc)?;
    let mut r = trim(t, a)?;
    if r.len() < b.len() {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![Elem::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let coef = t.mul(r.last().unwrap(), &lc_inv);
        for i in 0..b.len() - 1 {
            r[k + i] = t.sub(&r[k + i], &t.mul(&coef, &b[i]));
        }
        r.pop();
        q[k] = coef;
        r = trim(t, r)?;
    }
    Ok((strip(q), r))
}

pub fn div_exact(t: &mut FieldTower, a: &[Elem], b: &[Elem]) -> Result<TPoly> {
    Ok(divrem(t, a.to_vec(), b.to_vec())?.0)
}

/// Monic gcd; empty when both inputs vanish.
pub fn gcd(t: &mut FieldTower, a: TPoly, b: TPoly) -> Result<TPoly> {
    let mut a = trim(t, a)?;
    let mut b = trim(t, b)?;
    while !b.is_empty() {
        let (_, r) = divrem(t, a, b.clone())?;
        a = b;
        b = r;
    }
    monic(t, a)
}

/// `(g, s)` with `g` the monic gcd of `a` and `b` and `s * a = g` modulo `b`.
pub fn xgcd(t: &mut FieldTower, a: TPoly, b: TPoly) -> Result<(TPoly, TPoly)> {
    let (mut r0, mut r1) = (trim(t, a)?, trim(t, b)?);
    let (mut s0, mut s1) = (vec![Elem::one()], Vec::new());
    while !r1.is_empty() {
        let (q, r) = divrem(t, r0, r1.clone())?;
        let s = sub(t, &s0, &mul(t, &q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    let Some(lc) = r0.last() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let inv = t.inv(lc)?;
    let mut g = scale(t, &r0, &inv);
    if let Some(last) = g.last_mut() {
        *last = Elem::one();
    }
    Ok((g, scale(t, &s0, &inv)))
}

/// Square-free decomposition: monic factors with their multiplicities.
pub fn squarefree(t: &mut FieldTower, p: TPoly) -> Result<Vec<(TPoly, usize)>> {
    let f = monic(t, p)?;
    if f.len() <= 1 {
        return Ok(Vec::new());
    }
    let df = deriv(t, &f);
    let a0 = gcd(t, f.clone(), df.clone())?;
    let mut b = div_exact(t, &f, &a0)?;
    let c = div_exact(t, &df, &a0)?;
    let mut d = sub(t, &c, &deriv(t, &b));
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let a = gcd(t, b.clone(), d.clone())?;
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = div_exact(t, &b, &a)?;
        if b.len() <= 1 {
            break;
        }
        let c = div_exact(t, &d, &a)?;
        d = sub(t, &c, &deriv(t, &b));
        i += 1;
    }
    Ok(out)
}
