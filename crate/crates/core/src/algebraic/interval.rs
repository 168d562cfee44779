//! Rational interval and complex box arithmetic with outward dyadic rounding.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rational;

fn bits(x: &BigInt) -> i64 {
    x.bits() as i64
}

/// Largest dyadic with about `prec` significant bits that is <= x.
pub fn round_down(x: &Rational, prec: u32) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    let e = bits(x.numer()) - bits(x.denom());
    let s = prec as i64 - e;
    if s >= 0 {
        let scale = BigInt::one() << (s as usize);
        let n = (x.numer() * &scale).div_floor(x.denom());
        Rational::new(n, scale)
    } else {
        let scale = BigInt::one() << ((-s) as usize);
        let n = x.numer().div_floor(&(x.denom() * &scale));
        Rational::from_integer(n * scale)
    }
}

pub fn round_up(x: &Rational, prec: u32) -> Rational {
    -round_down(&-x, prec)
}

pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << (e as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// Closed real interval [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn around(c: &Rational, r: &Rational) -> Self {
        Interval { lo: c - r, hi: c + r }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn mag(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn strictly_inside(&self, other: &Interval) -> bool {
        self.lo > other.lo && self.hi < other.hi
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn round(&self, prec: u32) -> Self {
        Interval { lo: round_down(&self.lo, prec), hi: round_up(&self.hi, prec) }
    }

    pub fn add(&self, o: &Interval) -> Self {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Self {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Self {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = p[0].clone();
        let mut hi = p[0].clone();
        for x in &p[1..] {
            if *x < lo {
                lo = x.clone();
            }
            if *x > hi {
                hi = x.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.lo.to_f64().unwrap_or(f64::NAN), self.hi.to_f64().unwrap_or(f64::NAN))
    }
}

/// Exact complex rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRat {
    pub re: Rational,
    pub im: Rational,
}

impl CRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        CRat { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        CRat {
            re: Rational::from_float(re).unwrap_or_else(Rational::zero),
            im: Rational::from_float(im).unwrap_or_else(Rational::zero),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &CRat) -> CRat {
        CRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CRat) -> CRat {
        CRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &CRat) -> CRat {
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn norm2(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact quotient; panics on division by zero.
    pub fn div(&self, o: &CRat) -> CRat {
        let d = o.norm2();
        CRat {
            re: (&self.re * &o.re + &self.im * &o.im) / &d,
            im: (&self.im * &o.re - &self.re * &o.im) / d,
        }
    }

    pub fn norm_inf(&self) -> Rational {
        self.re.abs().max(self.im.abs())
    }

    pub fn round(&self, prec: u32) -> CRat {
        CRat { re: round_down(&self.re, prec), im: round_down(&self.im, prec) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

/// Axis-parallel complex box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn point(z: &CRat) -> Self {
        CInterval { re: Interval::point(z.re.clone()), im: Interval::point(z.im.clone()) }
    }

    pub fn real_point(x: &Rational) -> Self {
        CInterval { re: Interval::point(x.clone()), im: Interval::zero() }
    }

    pub fn around(c: &CRat, r: &Rational) -> Self {
        CInterval { re: Interval::around(&c.re, r), im: Interval::around(&c.im, r) }
    }

    pub fn zero() -> Self {
        Self::point(&CRat::zero())
    }

    pub fn mid(&self) -> CRat {
        CRat { re: self.re.mid(), im: self.im.mid() }
    }

    /// Larger of the two side lengths.
    pub fn width(&self) -> Rational {
        self.re.width().max(self.im.width())
    }

    /// Upper bound on the sup-norm of the points of the box.
    pub fn mag(&self) -> Rational {
        self.re.mag().max(self.im.mag())
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn strictly_inside(&self, o: &CInterval) -> bool {
        self.re.strictly_inside(&o.re) && self.im.strictly_inside(&o.im)
    }

    pub fn subset_of(&self, o: &CInterval) -> bool {
        self.re.subset_of(&o.re) && self.im.subset_of(&o.im)
    }

    pub fn intersects(&self, o: &CInterval) -> bool {
        self.re.intersects(&o.re) && self.im.intersects(&o.im)
    }

    pub fn round(&self, prec: u32) -> Self {
        CInterval { re: self.re.round(prec), im: self.im.round(prec) }
    }

    pub fn add(&self, o: &CInterval) -> Self {
        CInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &CInterval) -> Self {
        CInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        CInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &CInterval) -> Self {
        CInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_point(&self, z: &CRat) -> Self {
        CInterval {
            re: self.re.scale(&z.re).sub(&self.im.scale(&z.im)),
            im: self.re.scale(&z.im).add(&self.im.scale(&z.re)),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CInterval { re: self.re.scale(c), im: self.im.scale(c) }
    }

    pub fn to_f64(&self) -> ((f64, f64), (f64, f64)) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for CInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ((a, b), (c, d)) = self.to_f64();
        if c == 0.0 && d == 0.0 {
            write!(f, "[{a:.6e}, {b:.6e}]")
        } else {
            write!(f, "[{a:.6e}, {b:.6e}] + i[{c:.6e}, {d:.6e}]")
        }
    }
}

/// Evaluate a polynomial with box coefficients at a box, rounding at `prec`.
pub fn eval_boxes(coeffs: &[CInterval], z: &CInterval, prec: u32) -> CInterval {
    let mut acc = CInterval::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c).round(prec);
    }
    acc
}

pub fn deriv_boxes(coeffs: &[CInterval]) -> Vec<CInterval> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.scale(&Rational::from_integer(k.into())))
        .collect()
}

pub fn eval_points(coeffs: &[CRat], z: &CRat, prec: u32) -> CRat {
    let mut acc = CRat::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c).round(prec);
    }
    acc
}

pub fn deriv_points(coeffs: &[CRat]) -> Vec<CRat> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| {
            let k = Rational::from_integer(k.into());
            CRat::new(&c.re * &k, &c.im * &k)
        })
        .collect()
}
