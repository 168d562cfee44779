//! Towers Q(a_0)(a_1)... of simple algebraic extensions, with exact zero
//! tests by dynamic evaluation: a defining polynomial is replaced by the
//! factor that actually vanishes at its generator whenever a gcd splits it.

use num_traits::{One, Zero};

use super::interval::{eval_boxes, pow2, CInterval};
use super::isolate;
use super::poly;
use crate::arith::Rational;
use crate::error::{Error, Result};

/// Element of a [`FieldTower`]: a rational, or a polynomial in the generator
/// of `level` whose coefficients live strictly below that level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Q(Rational),
    Alg { level: usize, coeffs: Vec<Elem> },
}

impl Elem {
    pub fn zero() -> Self {
        Elem::Q(Rational::zero())
    }

    pub fn one() -> Self {
        Elem::Q(Rational::one())
    }

    pub fn rat(r: Rational) -> Self {
        Elem::Q(r)
    }

    pub fn generator(level: usize) -> Self {
        Elem::Alg { level, coeffs: vec![Elem::zero(), Elem::one()] }
    }

    pub fn level(&self) -> Option<usize> {
        match self {
            Elem::Q(_) => None,
            Elem::Alg { level, .. } => Some(*level),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Elem::Q(r) => Some(r),
            _ => None,
        }
    }

    /// True only for the literal rational zero.
    pub fn is_trivially_zero(&self) -> bool {
        matches!(self, Elem::Q(r) if r.is_zero())
    }

    pub(crate) fn make(level: usize, mut coeffs: Vec<Elem>) -> Elem {
        while coeffs.last().is_some_and(|c| c.is_trivially_zero()) {
            coeffs.pop();
        }
        match coeffs.len() {
            0 => Elem::zero(),
            1 => coeffs.pop().unwrap(),
            _ => Elem::Alg { level, coeffs },
        }
    }

    pub(crate) fn shift_levels(&self, off: usize) -> Elem {
        match self {
            Elem::Q(r) => Elem::Q(r.clone()),
            Elem::Alg { level, coeffs } => Elem::Alg {
                level: level + off,
                coeffs: coeffs.iter().map(|c| c.shift_levels(off)).collect(),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Level {
    /// Monic, square-free; coefficients below this level.
    pub(crate) poly: Vec<Elem>,
    /// Box isolating the generator among the roots of `poly`.
    pub(crate) root: CInterval,
}

#[derive(Clone, Debug, Default)]
pub struct FieldTower {
    levels: Vec<Level>,
}

const QUICK_PREC: u32 = 64;

impl FieldTower {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn degree(&self, level: usize) -> usize {
        self.levels[level].poly.len() - 1
    }

    pub fn defining_poly(&self, level: usize) -> &[Elem] {
        &self.levels[level].poly
    }

    pub fn root_box(&self, level: usize) -> &CInterval {
        &self.levels[level].root
    }

    pub(crate) fn push_level(&mut self, poly: Vec<Elem>, root: CInterval) -> usize {
        debug_assert!(poly.last().is_some_and(|c| *c == Elem::one()));
        self.levels.push(Level { poly, root });
        self.levels.len() - 1
    }

    /// Stack the levels of `other` on top of ours; returns the level offset to
    /// apply to elements of `other`.
    pub fn append(&mut self, other: &FieldTower) -> usize {
        let off = self.levels.len();
        for l in &other.levels {
            self.levels.push(Level {
                poly: l.poly.iter().map(|c| c.shift_levels(off)).collect(),
                root: l.root.clone(),
            });
        }
        off
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Q(x), Elem::Q(y)) => Elem::Q(x + y),
            _ => {
                let (la, lb) = (a.level(), b.level());
                if la > lb {
                    self.add_low(a, b)
                } else if lb > la {
                    self.add_low(b, a)
                } else {
                    let (Elem::Alg { level, coeffs: ca }, Elem::Alg { coeffs: cb, .. }) = (a, b) else {
                        unreachable!()
                    };
                    let n = ca.len().max(cb.len());
                    let z = Elem::zero();
                    let v = (0..n)
                        .map(|k| self.add(ca.get(k).unwrap_or(&z), cb.get(k).unwrap_or(&z)))
                        .collect();
                    Elem::make(*level, v)
                }
            }
        }
    }

    // `a` is at a strictly higher level than `b`.
    fn add_low(&self, a: &Elem, b: &Elem) -> Elem {
        let Elem::Alg { level, coeffs } = a else { unreachable!() };
        let mut v = coeffs.clone();
        v[0] = self.add(&v[0], b);
        Elem::make(*level, v)
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Q(x) => Elem::Q(-x),
            Elem::Alg { level, coeffs } => {
                Elem::Alg { level: *level, coeffs: coeffs.iter().map(|c| self.neg(c)).collect() }
            }
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Elem, r: &Rational) -> Elem {
        if r.is_zero() {
            return Elem::zero();
        }
        match a {
            Elem::Q(x) => Elem::Q(x * r),
            Elem::Alg { level, coeffs } => {
                Elem::Alg { level: *level, coeffs: coeffs.iter().map(|c| self.scale(c, r)).collect() }
            }
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Q(x), _) => self.scale(b, x),
            (_, Elem::Q(y)) => self.scale(a, y),
            (Elem::Alg { level: la, coeffs: ca }, Elem::Alg { level: lb, coeffs: cb }) => {
                if la > lb {
                    Elem::make(*la, ca.iter().map(|c| self.mul(c, b)).collect())
                } else if lb > la {
                    Elem::make(*lb, cb.iter().map(|c| self.mul(a, c)).collect())
                } else {
                    let mut v = vec![Elem::zero(); ca.len() + cb.len() - 1];
                    for (i, x) in ca.iter().enumerate() {
                        if x.is_trivially_zero() {
                            continue;
                        }
                        for (j, y) in cb.iter().enumerate() {
                            if !y.is_trivially_zero() {
                                v[i + j] = self.add(&v[i + j], &self.mul(x, y));
                            }
                        }
                    }
                    self.reduce(*la, v)
                }
            }
        }
    }

    pub fn pow(&self, a: &Elem, e: u32) -> Elem {
        let mut acc = Elem::one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Reduce a polynomial in the generator of `level` modulo its defining polynomial.
    pub(crate) fn reduce(&self, level: usize, mut v: Vec<Elem>) -> Elem {
        let d = &self.levels[level].poly;
        let n = d.len() - 1;
        while v.len() > n {
            let top = v.pop().unwrap();
            if top.is_trivially_zero() {
                continue;
            }
            let base = v.len() - n;
            for k in 0..n {
                if !d[k].is_trivially_zero() {
                    v[base + k] = self.sub(&v[base + k], &self.mul(&top, &d[k]));
                }
            }
        }
        Elem::make(level, v)
    }

    /// Exact zero test. May replace defining polynomials by proper factors.
    pub fn is_zero(&mut self, a: &Elem) -> Result<bool> {
        let (level, coeffs) = match a {
            Elem::Q(r) => return Ok(r.is_zero()),
            Elem::Alg { level, coeffs } => (*level, coeffs),
        };
        if !self.enclose(a, QUICK_PREC)?.contains_zero() {
            return Ok(false);
        }
        let c = poly::trim(self, coeffs.clone())?;
        match c.len() {
            0 => return Ok(true),
            1 => return Ok(false),
            _ => {}
        }
        let d = self.levels[level].poly.clone();
        let g = poly::gcd(self, d, c)?;
        if g.len() <= 1 {
            return Ok(false);
        }
        self.split(level, g)
    }

    /// `g` is a monic factor of the defining polynomial at `level`. Keep the
    /// factor whose root set contains the generator; true when that is `g`.
    fn split(&mut self, level: usize, g: Vec<Elem>) -> Result<bool> {
        let d = self.levels[level].poly.clone();
        if g.len() == d.len() {
            return Ok(true);
        }
        let q = poly::div_exact(self, &d, &g)?;
        let h = poly::monic(self, q)?;
        let cap = isolate::refinement_cap();
        let mut prec = QUICK_PREC;
        for _ in 0..cap {
            self.refine_level(level, prec)?;
            let bx = self.levels[level].root.clone();
            let gc = self.enclose_poly(&g, prec + 16)?;
            if !eval_boxes(&gc, &bx, prec + 16).contains_zero() {
                self.levels[level].poly = h;
                return Ok(false);
            }
            let hc = self.enclose_poly(&h, prec + 16)?;
            if !eval_boxes(&hc, &bx, prec + 16).contains_zero() {
                self.levels[level].poly = g;
                return Ok(true);
            }
            prec = prec.saturating_mul(2);
            if prec > 1 << 15 {
                break;
            }
        }
        Err(Error::PrecisionExhausted { rounds: cap, context: "splitting a defining polynomial".into() })
    }

    pub fn inv(&mut self, a: &Elem) -> Result<Elem> {
        let (level, coeffs) = match a {
            Elem::Q(r) if r.is_zero() => return Err(Error::DivisionByZero),
            Elem::Q(r) => return Ok(Elem::Q(r.recip())),
            Elem::Alg { level, coeffs } => (*level, coeffs.clone()),
        };
        loop {
            let d = self.levels[level].poly.clone();
            let (g, s) = poly::xgcd(self, coeffs.clone(), d)?;
            if g.len() == 1 {
                return Ok(self.reduce(level, s));
            }
            if self.split(level, g)? {
                return Err(Error::DivisionByZero);
            }
        }
    }

    pub fn div(&mut self, a: &Elem, b: &Elem) -> Result<Elem> {
        let ib = self.inv(b)?;
        Ok(self.mul(a, &ib))
    }

    pub(crate) fn enclose_poly(&mut self, p: &[Elem], prec: u32) -> Result<Vec<CInterval>> {
        p.iter().map(|c| self.enclose(c, prec)).collect()
    }

    /// Complex box containing the value of `a`, computed at `prec` bits.
    pub fn enclose(&mut self, a: &Elem, prec: u32) -> Result<CInterval> {
        match a {
            Elem::Q(r) => Ok(CInterval::real_point(r).round(prec)),
            Elem::Alg { level, coeffs } => {
                self.refine_level(*level, prec)?;
                let bx = self.levels[*level].root.clone();
                let mut acc = CInterval::zero();
                for c in coeffs.iter().rev() {
                    let e = self.enclose(c, prec)?;
                    acc = acc.mul(&bx).add(&e).round(prec);
                }
                Ok(acc)
            }
        }
    }

    /// Shrink the box of the generator at `level` to width about 2^-bits.
    pub(crate) fn refine_level(&mut self, level: usize, bits: u32) -> Result<()> {
        let old = self.levels[level].root.clone();
        let target = pow2(-(bits as i64)) * (Rational::one() + old.mag());
        if old.width() <= target {
            return Ok(());
        }
        let p = self.levels[level].poly.clone();
        let new = isolate::refine(|pr| self.enclose_poly(&p, pr), &old, &target)?;
        self.levels[level].root = new;
        Ok(())
    }

    /// Enclose until the box is narrower than 2^-bits relative to its size,
    /// or give up at the refinement cap.
    pub fn enclose_to(&mut self, a: &Elem, bits: u32) -> Result<CInterval> {
        let cap = isolate::refinement_cap();
        let mut prec = bits + 8;
        for _ in 0..cap {
            let b = self.enclose(a, prec)?;
            let tol = pow2(-(bits as i64)) * (Rational::one() + b.mag());
            if b.width() <= tol {
                return Ok(b);
            }
            prec = prec.saturating_mul(2);
            if prec > 1 << 15 {
                break;
            }
        }
        Err(Error::PrecisionExhausted { rounds: cap, context: "enclosing an algebraic number".into() })
    }

    pub fn approx(&mut self, a: &Elem) -> Result<(f64, f64)> {
        Ok(self.enclose_to(a, 60)?.mid().to_f64())
    }
}
