//! Complex root isolation: Aberth iteration for approximations, Krawczyk
//! boxes for certification.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, ToPrimitive, Zero};

use super::interval::{deriv_boxes, deriv_points, eval_boxes, eval_points, pow2, CInterval, CRat};
use crate::arith::Rational;
use crate::error::{Error, Result};

static REFINE_CAP: AtomicUsize = AtomicUsize::new(256);
const MAX_PREC: u32 = 1 << 15;

/// Maximum number of precision-raising rounds before giving up.
pub fn refinement_cap() -> usize {
    REFINE_CAP.load(Ordering::Relaxed)
}

pub fn set_refinement_cap(n: usize) {
    REFINE_CAP.store(n.max(1), Ordering::Relaxed);
}

fn exhausted(rounds: usize, context: &str) -> Error {
    Error::PrecisionExhausted { rounds, context: context.to_string() }
}

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
    fn mul(self, o: C64) -> C64 {
        C64 { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64 { re: (self.re * o.re + self.im * o.im) / d, im: (self.im * o.re - self.re * o.im) / d }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn horner64(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64 { re: 0.0, im: 0.0 };
    let mut d = p;
    for a in c.iter().rev() {
        d = d.mul(z).add(p);
        p = p.mul(z).add(*a);
    }
    (p, d)
}

fn circle_start(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let lc = c[n].abs();
    let r = 1.0 + c[..n].iter().map(|a| a.abs() / lc).fold(0.0, f64::max).min(1e6);
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.7;
            C64 { re: r * t.cos(), im: r * t.sin() }
        })
        .collect()
}

/// Double precision Aberth; `None` when the coefficients leave the f64 range.
fn aberth_f64(coeffs: &[CRat]) -> Option<Vec<CRat>> {
    let c: Vec<C64> = coeffs
        .iter()
        .map(|z| {
            let (re, im) = z.to_f64();
            C64 { re, im }
        })
        .collect();
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || c.last()?.abs() == 0.0 {
        return None;
    }
    let mut z = circle_start(&c);
    let n = z.len();
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (p, d) = horner64(&c, z[i]);
            if p.abs() == 0.0 {
                continue;
            }
            let ratio = p.div(d);
            let mut s = C64 { re: 0.0, im: 0.0 };
            for j in 0..n {
                if j != i {
                    s = s.add(C64 { re: 1.0, im: 0.0 }.div(z[i].sub(z[j])));
                }
            }
            let w = ratio.div(C64 { re: 1.0, im: 0.0 }.sub(ratio.mul(s)));
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            z[i] = z[i].sub(w);
            worst = worst.max(w.abs() / (1.0 + z[i].abs()));
        }
        if worst < 1e-14 {
            break;
        }
    }
    Some(z.into_iter().map(|w| CRat::from_f64(w.re, w.im)).collect())
}

/// Aberth sweeps in rounded rational arithmetic.
fn aberth_rat(coeffs: &[CRat], mut z: Vec<CRat>, prec: u32, sweeps: usize) -> Vec<CRat> {
    let d = deriv_points(coeffs);
    let n = z.len();
    let tol = pow2(-(prec as i64) + 4);
    for _ in 0..sweeps {
        let mut worst = Rational::zero();
        for i in 0..n {
            let p = eval_points(coeffs, &z[i], prec + 16);
            if p.is_zero() {
                continue;
            }
            let dp = eval_points(&d, &z[i], prec + 16);
            if dp.is_zero() {
                continue;
            }
            let ratio = p.div(&dp).round(prec + 16);
            let mut s = CRat::zero();
            for j in 0..n {
                if j != i {
                    let diff = z[i].sub(&z[j]);
                    if !diff.is_zero() {
                        s = s.add(&CRat::one().div(&diff)).round(prec + 16);
                    }
                }
            }
            let den = CRat::one().sub(&ratio.mul(&s));
            if den.is_zero() {
                continue;
            }
            let w = ratio.div(&den).round(prec + 16);
            z[i] = z[i].sub(&w).round(prec + 16);
            let rel = w.norm_inf() / (Rational::one() + z[i].norm_inf());
            if rel > worst {
                worst = rel;
            }
        }
        if worst < tol {
            break;
        }
    }
    z
}

fn mids(c: &[CInterval]) -> Vec<CRat> {
    c.iter().map(|b| b.mid()).collect()
}

/// Krawczyk test: every polynomial in the coefficient family has exactly one
/// root in the square box of radius `r` about `center`.
pub(crate) fn krawczyk(coeffs: &[CInterval], center: &CRat, r: &Rational, prec: u32) -> bool {
    let dc = deriv_boxes(coeffs);
    let dmid = eval_points(&mids(&dc), center, prec);
    if dmid.is_zero() {
        return false;
    }
    let y = CRat::one().div(&dmid).round(prec);
    let b = CInterval::around(center, r);
    let c = CInterval::point(center);
    let fz = eval_boxes(coeffs, &c, prec);
    let db = eval_boxes(&dc, &b, prec);
    let slope = CInterval::point(&CRat::one()).sub(&db.mul_point(&y));
    let k = c.sub(&fz.mul_point(&y)).add(&slope.mul(&b.sub(&c))).round(prec);
    k.strictly_inside(&b)
}

/// One Newton step from `z` and a candidate radius around the new point.
fn newton_box(coeffs: &[CInterval], z: &CRat, prec: u32) -> Option<(CRat, Rational)> {
    let m = mids(coeffs);
    let dm = deriv_points(&m);
    let dz = eval_points(&dm, z, prec);
    if dz.is_zero() {
        return None;
    }
    let z1 = z.sub(&eval_points(&m, z, prec).div(&dz)).round(prec);
    let d1 = eval_points(&dm, &z1, prec);
    if d1.is_zero() {
        return None;
    }
    let y = CRat::one().div(&d1).round(prec);
    let f1 = eval_boxes(coeffs, &CInterval::point(&z1), prec);
    let floor = pow2(-(prec as i64) + 2) * (Rational::one() + z1.norm_inf());
    let r = f1.mul_point(&y).mag() * Rational::from_integer(4.into()) + floor;
    Some((z1, r))
}

/// Isolate all roots of a square-free polynomial whose coefficient boxes at
/// precision `p` are produced by `enclose(p)`.
pub(crate) fn isolate<F>(mut enclose: F) -> Result<Vec<CInterval>>
where
    F: FnMut(u32) -> Result<Vec<CInterval>>,
{
    let cap = refinement_cap();
    let mut prec = 64u32;
    let mut approx: Option<Vec<CRat>> = None;
    for _ in 0..cap {
        let cs = enclose(prec)?;
        let n = cs.len() - 1;
        if n == 0 {
            return Ok(Vec::new());
        }
        let m = mids(&cs);
        let start = match approx.take() {
            Some(z) => z,
            None => aberth_f64(&m).unwrap_or_else(|| {
                let r = Rational::one() + m[..n].iter().map(|c| c.norm_inf()).fold(Rational::zero(), |a, b| a.max(b))
                    / m[n].norm_inf();
                let r = r.to_f64().unwrap_or(1e6).min(1e6);
                (0..n)
                    .map(|k| {
                        let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.7;
                        CRat::from_f64(r * t.cos(), r * t.sin())
                    })
                    .collect()
            }),
        };
        let z = aberth_rat(&m, start, prec, 80);
        if let Some(boxes) = certify_all(&cs, &z, prec) {
            return Ok(boxes);
        }
        approx = Some(z);
        prec = prec.saturating_mul(2);
        if prec > MAX_PREC {
            break;
        }
    }
    Err(exhausted(cap, "isolating polynomial roots"))
}

fn certify_all(cs: &[CInterval], z: &[CRat], prec: u32) -> Option<Vec<CInterval>> {
    let mut cand = Vec::with_capacity(z.len());
    for zi in z {
        cand.push(newton_box(cs, zi, prec)?);
    }
    let boxes: Vec<CInterval> = cand.iter().map(|(c, r)| CInterval::around(c, r)).collect();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].intersects(&boxes[j]) {
                return None;
            }
        }
    }
    for (c, r) in &cand {
        if !krawczyk(cs, c, r, prec) {
            return None;
        }
    }
    Some(boxes)
}

/// Shrink an isolating box `old` of a simple root until its width is at most
/// `target`. The returned box stays inside `old`.
pub(crate) fn refine<F>(mut enclose: F, old: &CInterval, target: &Rational) -> Result<CInterval>
where
    F: FnMut(u32) -> Result<Vec<CInterval>>,
{
    let cap = refinement_cap();
    let mut cur = old.clone();
    if cur.width() <= *target {
        return Ok(cur);
    }
    let want = target.denom().bits().saturating_sub(target.numer().bits()).min(MAX_PREC as u64) as u32;
    let mut prec = (want + 32).max(64);
    let mut z = cur.mid();
    for _ in 0..cap {
        let cs = enclose(prec)?;
        match newton_box(&cs, &z, prec) {
            Some((z1, r)) => {
                let b = CInterval::around(&z1, &r);
                if b.subset_of(&cur) && krawczyk(&cs, &z1, &r, prec) {
                    let stalled = b.width() * Rational::from_integer(2.into()) > cur.width();
                    cur = b;
                    z = z1;
                    if cur.width() <= *target {
                        return Ok(cur);
                    }
                    if stalled {
                        prec = prec.saturating_mul(2);
                    }
                } else {
                    if b.subset_of(&cur) {
                        z = z1;
                    } else {
                        z = cur.mid();
                    }
                    prec = prec.saturating_mul(2);
                }
            }
            None => prec = prec.saturating_mul(2),
        }
        if prec > MAX_PREC {
            break;
        }
    }
    Err(exhausted(cap, "refining an isolating box"))
}

/// Isolating box around the root of a square-free polynomial nearest to `near`.
pub(crate) fn nearest_box(boxes: &[CInterval], near: (f64, f64)) -> Option<usize> {
    let target = CRat::from_f64(near.0, near.1);
    boxes
        .iter()
        .enumerate()
        .map(|(i, b)| (i, b.mid().sub(&target).norm2()))
        .min_by(|a, b| a.1.cmp(&b.1))
        .map(|(i, _)| i)
}
