use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{pow2, CInterval};
use super::isolate;
use super::poly::{self, TPoly};
use super::tower::{Elem, FieldTower};
use crate::arith::{fmt_rational, Rational, UniPoly};
use crate::error::{Error, Result};

/// A root found in some extension of a tower.
#[derive(Clone, Debug)]
pub struct RootOf {
    pub tower: FieldTower,
    pub value: Elem,
    pub multiplicity: usize,
}

/// Simplest rational (smallest denominator) in the closed interval [lo, hi].
pub(crate) fn simplest_rational(lo: &Rational, hi: &Rational) -> Rational {
    if lo.is_positive() || hi.is_negative() {
        if hi.is_negative() {
            return -simplest_rational(&-hi, &-lo);
        }
        let fl = lo.floor();
        if fl == *lo {
            return fl;
        }
        if fl + Rational::one() <= *hi {
            return lo.ceil();
        }
        // lo and hi share the integer part; recurse on reciprocals of the fractional parts
        let ip = lo.floor();
        let r = simplest_rational(&(hi - &ip).recip(), &(lo - &ip).recip());
        return ip + r.recip();
    }
    Rational::zero()
}

/// If the root isolated in `bx` is rational, return it.
fn rational_in_box(t: &mut FieldTower, f: &[Elem], bx: &CInterval) -> Result<Option<Rational>> {
    let mut bx = bx.clone();
    if !bx.im.contains_zero() {
        return Ok(None);
    }
    let target = pow2(-96) * (Rational::one() + bx.mag());
    if bx.width() > target {
        let fc = f.to_vec();
        bx = isolate::refine(|p| t.enclose_poly(&fc, p), &bx, &target)?;
        if !bx.im.contains_zero() {
            return Ok(None);
        }
    }
    let r = simplest_rational(&bx.re.lo, &bx.re.hi);
    if r.denom().bits() > 80 {
        return Ok(None);
    }
    let v = poly::eval(t, f, &Elem::Q(r.clone()));
    Ok(if t.is_zero(&v)? { Some(r) } else { None })
}

fn sort_key(t: &mut FieldTower, e: &Elem) -> Result<(f64, f64)> {
    t.approx(e)
}

/// Roots of `p` with multiplicities. Roots outside the tower get their own
/// copy of the tower with one more level.
pub fn roots_with_multiplicity(t: &mut FieldTower, p: &[Elem]) -> Result<Vec<RootOf>> {
    let factors = poly::squarefree(t, p.to_vec())?;
    let mut out: Vec<(RootOf, (f64, f64))> = Vec::new();
    for (f, m) in factors {
        if f.len() == 2 {
            let v = t.neg(&f[0]);
            let key = sort_key(t, &v)?;
            out.push((RootOf { tower: t.clone(), value: v, multiplicity: m }, key));
            continue;
        }
        let fc = f.clone();
        let boxes = isolate::isolate(|prec| t.enclose_poly(&fc, prec))?;
        for bx in boxes {
            if let Some(r) = rational_in_box(t, &f, &bx)? {
                let key = (r.to_f64().unwrap_or(f64::NAN), 0.0);
                out.push((RootOf { tower: t.clone(), value: Elem::Q(r), multiplicity: m }, key));
                continue;
            }
            let mut t2 = t.clone();
            let lvl = t2.push_level(f.clone(), bx.clone());
            let key = bx.mid().to_f64();
            out.push((RootOf { tower: t2, value: Elem::generator(lvl), multiplicity: m }, key));
        }
    }
    out.sort_by(|a, b| {
        (a.1 .0, a.1 .1).partial_cmp(&(b.1 .0, b.1 .1)).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out.into_iter().map(|(r, _)| r).collect())
}

/// Adjoin the root of `f` closest to `near`, or return it directly when it is rational.
pub(crate) fn adjoin_root_near(t: &mut FieldTower, f: &[Elem], near: (f64, f64)) -> Result<(FieldTower, Elem)> {
    let f = poly::monic(t, f.to_vec())?;
    let fc = f.clone();
    let boxes = isolate::isolate(|prec| t.enclose_poly(&fc, prec))?;
    let i = isolate::nearest_box(&boxes, near)
        .ok_or_else(|| Error::Degenerate("polynomial has no roots".into()))?;
    if let Some(r) = rational_in_box(t, &f, &boxes[i])? {
        return Ok((t.clone(), Elem::Q(r)));
    }
    let mut t2 = t.clone();
    let lvl = t2.push_level(f, boxes[i].clone());
    Ok((t2, Elem::generator(lvl)))
}

fn strides(t: &FieldTower, top: Option<usize>) -> (Vec<usize>, usize) {
    let mut s = Vec::new();
    let mut total = 1;
    if let Some(top) = top {
        for l in 0..=top {
            s.push(total);
            total *= t.degree(l);
        }
    }
    (s, total)
}

fn flatten_into(t: &FieldTower, e: &Elem, st: &[usize], base: usize, out: &mut [Rational]) {
    match e {
        Elem::Q(r) => out[base] += r,
        Elem::Alg { level, coeffs } => match t.reduce(*level, coeffs.clone()) {
            Elem::Q(r) => out[base] += r,
            Elem::Alg { level, coeffs } => {
                for (i, c) in coeffs.iter().enumerate() {
                    flatten_into(t, c, st, base + i * st[level], out);
                }
            }
        },
    }
}

/// A square-free polynomial over Q vanishing at `e`: the first linear
/// relation among its powers in the tower algebra, made square-free.
pub fn minimal_polynomial(t: &FieldTower, e: &Elem) -> UniPoly {
    if let Elem::Q(r) = e {
        return UniPoly::new(vec![-r, Rational::one()]);
    }
    let (st, n) = strides(t, e.level());
    let flat = |x: &Elem| {
        let mut v = vec![Rational::zero(); n];
        flatten_into(t, x, &st, 0, &mut v);
        v
    };
    // rows in echelon form: (vector, pivot, combination of powers)
    let mut rows: Vec<(Vec<Rational>, usize, Vec<Rational>)> = Vec::new();
    let mut power = Elem::one();
    for k in 0..=n {
        let mut w = flat(&power);
        let mut comb = vec![Rational::zero(); k + 1];
        comb[k] = Rational::one();
        for (row, piv, rc) in &rows {
            if w[*piv].is_zero() {
                continue;
            }
            let f = &w[*piv] / &row[*piv];
            for (a, b) in w.iter_mut().zip(row) {
                *a -= &f * b;
            }
            for (a, b) in comb.iter_mut().zip(rc) {
                *a -= &f * b;
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => {
                let m = UniPoly::new(comb);
                let g = m.gcd(&m.derivative());
                return m.div_exact(&g).expect("gcd divides").monic();
            }
            Some(piv) => rows.push((w, piv, comb)),
        }
        power = t.mul(&power, e);
    }
    unreachable!("powers of an element span at most the tower dimension")
}

/// Algebraic number together with the tower it lives in.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    tower: Arc<FieldTower>,
    value: Elem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl AlgebraicNumber {
    pub fn new(tower: FieldTower, value: Elem) -> Self {
        AlgebraicNumber { tower: Arc::new(tower), value }
    }

    pub(crate) fn from_arc(tower: Arc<FieldTower>, value: Elem) -> Self {
        AlgebraicNumber { tower, value }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::new(FieldTower::new(), Elem::Q(r))
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn value(&self) -> &Elem {
        &self.value
    }

    /// Same tower object (not merely isomorphic).
    pub fn same_tower(&self, other: &AlgebraicNumber) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower)
    }

    /// Roots of a polynomial over Q with multiplicities, sorted by real then imaginary part.
    pub fn roots_of(p: &UniPoly) -> Result<Vec<(AlgebraicNumber, usize)>> {
        if p.degree().unwrap_or(0) == 0 {
            return Err(Error::Degenerate("polynomial must have positive degree".into()));
        }
        let mut t = FieldTower::new();
        let coeffs: TPoly = p.coeffs().iter().map(|c| Elem::Q(c.clone())).collect();
        Ok(roots_with_multiplicity(&mut t, &coeffs)?
            .into_iter()
            .map(|r| (AlgebraicNumber::new(r.tower, r.value), r.multiplicity))
            .collect())
    }

    /// The root of `p` closest to `near`.
    pub fn root_near(p: &UniPoly, near: (f64, f64)) -> Result<AlgebraicNumber> {
        let mut t = FieldTower::new();
        let coeffs: TPoly = p.coeffs().iter().map(|c| Elem::Q(c.clone())).collect();
        let sq: TPoly = {
            let f = poly::squarefree(&mut t, coeffs)?;
            f.into_iter().fold(vec![Elem::one()], |acc, (g, _)| poly::mul(&t, &acc, &g))
        };
        if sq.len() < 2 {
            return Err(Error::Degenerate("polynomial must have positive degree".into()));
        }
        let (t2, v) = adjoin_root_near(&mut t, &sq, near)?;
        Ok(AlgebraicNumber::new(t2, v))
    }

    /// Real square root of a nonnegative rational.
    pub fn sqrt(r: &Rational) -> Result<AlgebraicNumber> {
        let p = UniPoly::new(vec![-r, Rational::zero(), Rational::one()]);
        let approx = r.to_f64().unwrap_or(0.0).max(0.0).sqrt();
        Self::root_near(&p, (approx, 0.0))
    }

    pub fn is_zero(&self) -> Result<bool> {
        let mut t = (*self.tower).clone();
        t.is_zero(&self.value)
    }

    /// Exact rational value, if the number is rational.
    pub fn to_rational(&self) -> Option<Rational> {
        if let Elem::Q(r) = &self.value {
            return Some(r.clone());
        }
        let m = self.minimal_polynomial();
        (m.degree() == Some(1)).then(|| -m.coeff(0) / m.coeff(1))
    }

    pub fn minimal_polynomial(&self) -> UniPoly {
        minimal_polynomial(&self.tower, &self.value)
    }

    pub fn enclosure(&self, bits: u32) -> Result<CInterval> {
        let mut t = (*self.tower).clone();
        t.enclose_to(&self.value, bits)
    }

    pub fn approx(&self) -> (f64, f64) {
        if let Elem::Q(r) = &self.value {
            return (r.to_f64().unwrap_or(f64::NAN), 0.0);
        }
        let mut t = (*self.tower).clone();
        t.approx(&self.value).unwrap_or((f64::NAN, f64::NAN))
    }

    /// Both numbers re-expressed over one shared tower.
    pub fn merge(x: &AlgebraicNumber, y: &AlgebraicNumber) -> (AlgebraicNumber, AlgebraicNumber) {
        if x.same_tower(y) {
            return (x.clone(), y.clone());
        }
        let mut t = (*x.tower).clone();
        let off = t.append(&y.tower);
        let t = Arc::new(t);
        (
            AlgebraicNumber { tower: t.clone(), value: x.value.clone() },
            AlgebraicNumber { tower: t, value: y.value.shift_levels(off) },
        )
    }

    /// Exact equality, merging towers first.
    pub fn equals(&self, other: &AlgebraicNumber) -> Result<bool> {
        let (a, b) = Self::merge(self, other);
        let mut t = (*a.tower).clone();
        let d = t.sub(&a.value, &b.value);
        t.is_zero(&d)
    }

    pub fn neg(&self) -> AlgebraicNumber {
        AlgebraicNumber { tower: self.tower.clone(), value: self.tower.neg(&self.value) }
    }

    /// Rational multiple within the same tower.
    pub fn scale(&self, r: &Rational) -> AlgebraicNumber {
        AlgebraicNumber { tower: self.tower.clone(), value: self.tower.scale(&self.value, r) }
    }
}

/// Field operation on two numbers of the same tower.
pub fn field_op(x: &AlgebraicNumber, y: &AlgebraicNumber, op: FieldOp) -> Result<AlgebraicNumber> {
    if !x.same_tower(y) {
        return Err(Error::TowerMismatch);
    }
    let t = &x.tower;
    let value = match op {
        FieldOp::Add => t.add(&x.value, &y.value),
        FieldOp::Sub => t.sub(&x.value, &y.value),
        FieldOp::Mul => t.mul(&x.value, &y.value),
        FieldOp::Div => {
            let mut tm = (**t).clone();
            let v = tm.div(&x.value, &y.value)?;
            return Ok(AlgebraicNumber::new(tm, v));
        }
    };
    Ok(AlgebraicNumber { tower: t.clone(), value })
}

fn squarefree_int(n: &BigInt) -> (BigInt, BigInt) {
    // n = a^2 * b with b square-free (trial division, small inputs only)
    let mut a = BigInt::one();
    let mut b = BigInt::one();
    let mut m = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= m && p < BigInt::from(1_000_000) {
        let mut e = 0;
        while m.is_multiple_of(&p) {
            m /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            a *= &p;
        }
        if e % 2 == 1 {
            b *= &p;
        }
        p += 1;
    }
    b *= m;
    (a, b)
}

/// `(p + q*sqrt(d)) / r` rendering for real quadratic irrationals.
fn quadratic_form(m: &UniPoly, approx: f64) -> Option<String> {
    if m.degree() != Some(2) {
        return None;
    }
    let (c, b, a) = (m.coeff(0), m.coeff(1), m.coeff(2));
    // clear denominators
    let l = [c.denom(), b.denom(), a.denom()].iter().fold(BigInt::one(), |acc, d| acc.lcm(d));
    let s = Rational::from_integer(l);
    let (c, b, a) = ((c * &s).to_integer(), (b * &s).to_integer(), (a * &s).to_integer());
    let disc = &b * &b - BigInt::from(4) * &a * &c;
    if !disc.is_positive() {
        return None;
    }
    let (k, d) = squarefree_int(&disc);
    let root = disc.sqrt();
    if &root * &root == disc {
        return None;
    }
    // roots (-b +- k*sqrt(d)) / (2a); pick the sign matching the approximation
    let two_a = BigInt::from(2) * &a;
    let plus = (-b.to_f64()? + k.to_f64()? * d.to_f64()?.sqrt()) / two_a.to_f64()?;
    let minus = (-b.to_f64()? - k.to_f64()? * d.to_f64()?.sqrt()) / two_a.to_f64()?;
    let sign: i32 = if (plus - approx).abs() <= (minus - approx).abs() { 1 } else { -1 };
    let mut p = -b;
    let mut q = k * sign;
    let mut r = two_a;
    let g = p.gcd(&q).gcd(&r);
    p /= &g;
    q /= &g;
    r /= &g;
    if r.is_negative() {
        p = -p;
        q = -q;
        r = -r;
    }
    let sq = if q.abs().is_one() {
        format!("sqrt({d})")
    } else {
        format!("{}*sqrt({d})", q.abs())
    };
    let body = if p.is_zero() {
        if q.is_negative() { format!("-{sq}") } else { sq }
    } else {
        format!("{p} {} {sq}", if q.is_negative() { "-" } else { "+" })
    };
    Some(if r.is_one() {
        body
    } else if p.is_zero() {
        format!("{body}/{r}")
    } else {
        format!("({body})/{r}")
    })
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return f.write_str(&fmt_rational(&r));
        }
        let m = self.minimal_polynomial();
        let (re, im) = self.approx();
        let real = im.abs() <= 1e-12 * (1.0 + re.abs());
        if real {
            if let Some(s) = quadratic_form(&m, re) {
                return f.write_str(&s);
            }
        }
        let z = if real { format!("{re:.12}") } else { format!("{re:.12}{im:+.12}i") };
        write!(f, "root({} ~ {z})", m.display_with("x"))
    }
}
