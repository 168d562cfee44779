//! Elimination of all unknowns but one coordinate from the central path
//! equations, by linear substitution and iterated resultants over Z.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dd::to_f64;
use super::{SdoInstance, TraceResult};
use crate::arith::{poly_gcd, separable_part, BiPoly, Rational, Var};
use crate::error::{Error, Result};

type Mono = Vec<u16>;

/// Sparse polynomial with integer coefficients; variable 0 is mu.
#[derive(Clone, Debug, PartialEq, Eq)]
struct MPoly {
    terms: BTreeMap<Mono, BigInt>,
}

impl MPoly {
    fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    fn constant(nv: usize, c: BigInt) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(vec![0; nv], c);
        }
        p
    }

    fn var(nv: usize, v: usize) -> Self {
        let mut m = vec![0; nv];
        m[v] = 1;
        let mut p = Self::zero();
        p.terms.insert(m, BigInt::one());
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    fn neg(&self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    fn mul(&self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let m: Mono = a.iter().zip(b).map(|(i, j)| i + j).collect();
                r.add_term(m, x * y);
            }
        }
        r
    }

    fn scale(&self, c: &BigInt) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    fn pow(&self, nv: usize, k: usize) -> MPoly {
        let mut r = MPoly::constant(nv, BigInt::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    fn degree(&self, v: usize) -> usize {
        self.terms.keys().map(|m| m[v] as usize).max().unwrap_or(0)
    }

    fn max_degree(&self) -> usize {
        self.terms.keys().flat_map(|m| m.iter().map(|&e| e as usize)).max().unwrap_or(0)
    }

    fn has(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m[v] > 0)
    }

    /// Coefficients in `v`, lowest degree first.
    fn coeffs_in(&self, v: usize) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(); self.degree(v) + 1];
        for (m, c) in &self.terms {
            let mut k = m.clone();
            let e = k[v] as usize;
            k[v] = 0;
            out[e].terms.insert(k, c.clone());
        }
        out
    }

    /// Exact quotient; `None` if `d` does not divide.
    fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (lm, lc) = d.terms.iter().next_back()?;
        let mut r = self.clone();
        let mut q = MPoly::zero();
        while let Some((m, c)) = r.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if m.iter().zip(lm).any(|(a, b)| a < b) {
                return None;
            }
            let (qc, rem) = c.div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            let qm: Mono = m.iter().zip(lm).map(|(a, b)| a - b).collect();
            let mut t = MPoly::zero();
            t.terms.insert(qm, qc);
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    /// Divide out the integer content and powers of mu; positive leading coefficient.
    fn normalize(mut self) -> MPoly {
        if self.is_zero() {
            return self;
        }
        let g = self.terms.values().fold(BigInt::zero(), |a, c| a.gcd(c));
        let lead_neg = self.terms.values().next_back().is_some_and(|c| c.is_negative());
        let g = if lead_neg { -g } else { g };
        let mu_min = self.terms.keys().map(|m| m[0]).min().unwrap_or(0);
        self.terms = self
            .terms
            .into_iter()
            .map(|(mut m, c)| {
                m[0] -= mu_min;
                (m, c / &g)
            })
            .collect();
        self
    }
}

/// sum_k e_k (-b)^k a^(d-k): the resultant in `v` of a*v + b and e.
fn res_linear(nv: usize, a: &MPoly, b: &MPoly, e: &[MPoly]) -> MPoly {
    let d = e.len() - 1;
    let nb = b.neg();
    let mut out = MPoly::zero();
    let mut bp = MPoly::constant(nv, BigInt::one());
    for (k, ek) in e.iter().enumerate() {
        if !ek.is_zero() {
            out = out.add(&ek.mul(&bp).mul(&a.pow(nv, d - k)));
        }
        bp = bp.mul(&nb);
    }
    out
}

/// Sylvester determinant by fraction-free elimination.
fn res_bareiss(nv: usize, p: &[MPoly], q: &[MPoly]) -> MPoly {
    let (dp, dq) = (p.len() - 1, q.len() - 1);
    let n = dp + dq;
    let mut m = vec![vec![MPoly::zero(); n]; n];
    for i in 0..dq {
        for (k, c) in p.iter().rev().enumerate() {
            m[i][i + k] = c.clone();
        }
    }
    for i in 0..dp {
        for (k, c) in q.iter().rev().enumerate() {
            m[dq + i][i + k] = c.clone();
        }
    }
    let mut prev = MPoly::constant(nv, BigInt::one());
    let mut sign = false;
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return MPoly::zero();
            };
            m.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = MPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

fn resultant(nv: usize, p: &MPoly, q: &MPoly, v: usize) -> MPoly {
    let (cp, cq) = (p.coeffs_in(v), q.coeffs_in(v));
    if cp.len() == 2 {
        return res_linear(nv, &cp[1], &cp[0], &cq);
    }
    if cq.len() == 2 {
        return res_linear(nv, &cq[1], &cq[0], &cp);
    }
    res_bareiss(nv, &cp, &cq)
}

#[derive(Clone, Debug)]
pub struct ElimOptions {
    /// Largest degree in any variable before giving up.
    pub degree_cap: usize,
    /// Largest number of terms in one intermediate polynomial.
    pub term_cap: usize,
    /// Equations kept per elimination round, smallest first.
    pub keep: usize,
    /// Bound on |P(mu_k, v_k)| / (1 + |P|_1) along the trace.
    pub validation_tol: f64,
}

impl Default for ElimOptions {
    fn default() -> Self {
        ElimOptions { degree_cap: 64, term_cap: 20_000, keep: 6, validation_tol: 1e-6 }
    }
}

struct System {
    nv: usize,
    target: usize,
    eqs: Vec<MPoly>,
}

/// Central path equations with S = C - sum y_i A^i substituted and a
/// fresh variable equal to coordinate `coord`.
fn build(inst: &SdoInstance, coord: usize) -> System {
    let (n, m) = (inst.n, inst.m);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let t = pairs.len();
    let nv = 1 + t + m + 1;
    let target = nv - 1;
    let sym = |i: usize, j: usize| 1 + pairs.iter().position(|&p| p == (i.min(j), i.max(j))).unwrap();
    let x = |i: usize, j: usize| MPoly::var(nv, sym(i, j));
    let s = |i: usize, j: usize| {
        let mut p = MPoly::constant(nv, inst.c[i * n + j].into());
        for l in 0..m {
            let a = inst.a[l][i * n + j];
            if a != 0 {
                p = p.sub(&MPoly::var(nv, 1 + t + l).scale(&a.into()));
            }
        }
        p
    };
    let mut eqs = Vec::new();
    for l in 0..m {
        let mut e = MPoly::constant(nv, (-inst.b[l]).into());
        for i in 0..n {
            for j in 0..n {
                let a = inst.a[l][i * n + j];
                if a != 0 {
                    e = e.add(&x(i, j).scale(&a.into()));
                }
            }
        }
        eqs.push(e);
    }
    for i in 0..n {
        for j in 0..n {
            let mut e = MPoly::zero();
            for k in 0..n {
                e = e.add(&x(i, k).mul(&s(k, j)));
            }
            if i == j {
                e = e.sub(&MPoly::var(nv, 0));
            }
            eqs.push(e);
        }
    }
    let nn = n * n;
    let expr = if coord < nn {
        x(coord / n, coord % n)
    } else if coord < nn + m {
        MPoly::var(nv, 1 + t + coord - nn)
    } else {
        let k = coord - nn - m;
        s(k / n, k % n)
    };
    eqs.push(MPoly::var(nv, target).sub(&expr));
    let mut eqs: Vec<MPoly> = eqs.into_iter().map(MPoly::normalize).filter(|e| !e.is_zero()).collect();
    eqs.sort_by(|a, b| a.terms.cmp(&b.terms));
    eqs.dedup();
    System { nv, target, eqs }
}

fn check_caps(p: &MPoly, opts: &ElimOptions) -> Result<()> {
    if p.max_degree() > opts.degree_cap {
        return Err(Error::EliminationBlowUp(format!("intermediate degree {} exceeds the cap {}", p.max_degree(), opts.degree_cap)));
    }
    if p.terms.len() > opts.term_cap {
        return Err(Error::EliminationBlowUp(format!("intermediate polynomial has {} terms (cap {})", p.terms.len(), opts.term_cap)));
    }
    Ok(())
}

/// Substitute every variable that occurs linearly with a constant coefficient.
fn substitute_linear(sys: &mut System, opts: &ElimOptions) -> Result<()> {
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, e) in sys.eqs.iter().enumerate() {
            for v in 1..sys.nv {
                if v == sys.target || e.degree(v) != 1 {
                    continue;
                }
                let c = e.coeffs_in(v);
                if c[1].terms.len() == 1 && c[1].terms.keys().next().unwrap().iter().all(|&k| k == 0) {
                    let score = e.terms.len();
                    if best.is_none_or(|b| score < b.2) {
                        best = Some((i, v, score));
                    }
                }
            }
        }
        let Some((i, v, _)) = best else { return Ok(()) };
        let e = sys.eqs.remove(i);
        let c = e.coeffs_in(v);
        let mut out = Vec::new();
        for f in &sys.eqs {
            let r = if f.has(v) { res_linear(sys.nv, &c[1], &c[0], &f.coeffs_in(v)).normalize() } else { f.clone() };
            check_caps(&r, opts)?;
            if !r.is_zero() {
                out.push(r);
            }
        }
        out.sort_by(|a, b| a.terms.cmp(&b.terms));
        out.dedup();
        sys.eqs = out;
    }
}

fn eliminate(sys: &mut System, opts: &ElimOptions) -> Result<()> {
    substitute_linear(sys, opts)?;
    loop {
        let vars: Vec<usize> = (1..sys.nv).filter(|&v| v != sys.target && sys.eqs.iter().any(|e| e.has(v))).collect();
        let Some(&v) = vars.iter().min_by_key(|&&v| {
            let with: Vec<&MPoly> = sys.eqs.iter().filter(|e| e.has(v)).collect();
            (with.iter().map(|e| e.degree(v)).max().unwrap_or(0), with.iter().map(|e| e.terms.len()).sum::<usize>())
        }) else {
            return Ok(());
        };
        let (mut with, rest): (Vec<MPoly>, Vec<MPoly>) = sys.eqs.drain(..).partition(|e| e.has(v));
        with.sort_by_key(|e| (e.degree(v), e.terms.len()));
        let pivot = with.remove(0);
        let mut new = rest;
        let mut made = Vec::new();
        for e in &with {
            let r = resultant(sys.nv, &pivot, e, v).normalize();
            check_caps(&r, opts)?;
            if !r.is_zero() {
                made.push(r);
            }
        }
        // keep the smallest equations, separately among those that still carry the coordinate
        made.sort_by_key(|e| (e.terms.len(), e.max_degree()));
        made.dedup();
        let (mut a, mut b): (Vec<MPoly>, Vec<MPoly>) = made.into_iter().partition(|e| e.has(sys.target));
        a.truncate(opts.keep);
        b.truncate(opts.keep);
        new.extend(a);
        new.extend(b);
        new.sort_by(|a, b| a.terms.cmp(&b.terms));
        new.dedup();
        sys.eqs = new;
        substitute_linear(sys, opts)?;
    }
}

fn to_bipoly(p: &MPoly, target: usize) -> BiPoly {
    let mut terms = Vec::new();
    for (m, c) in &p.terms {
        terms.push((Rational::from_integer(c.clone()), m[0] as usize, m[target] as usize));
    }
    BiPoly::from_terms(&terms)
}

/// Relative residual max_k |P(mu_k, v_k)| / (1 + |P|_1) along the trace.
pub fn path_residual(p: &BiPoly, trace: &TraceResult, coord: usize) -> f64 {
    let norm = 1.0 + p.coeff_norm1();
    trace
        .samples
        .iter()
        .map(|s| {
            let v = to_f64(s.point.coords()[coord]);
            p.eval_f64(s.mu, v).abs() / (norm * (1.0 + v.abs()).powi(p.deg_v().unwrap_or(0) as i32))
        })
        .fold(0.0, f64::max)
}

/// A nonzero P in Q[mu, V] vanishing on the graph of coordinate `coord`,
/// after content removal and separable part. With a trace, P is checked
/// against the traced samples.
pub fn eliminate_coordinate(
    inst: &SdoInstance,
    coord: usize,
    trace: Option<&TraceResult>,
    opts: &ElimOptions,
) -> Result<BiPoly> {
    if coord >= inst.dim() {
        return Err(Error::InvalidInstance(format!("coordinate {coord} out of range (dimension {})", inst.dim())));
    }
    let mut sys = build(inst, coord);
    eliminate(&mut sys, opts)?;
    let cands: Vec<BiPoly> = sys
        .eqs
        .iter()
        .filter(|e| e.has(sys.target))
        .map(|e| separable_part(&to_bipoly(e, sys.target)))
        .collect();
    if cands.is_empty() {
        return Err(Error::EliminationBlowUp("no equation involving the coordinate survived elimination".into()));
    }
    let mut g = cands[0].clone();
    for c in &cands[1..] {
        let h = poly_gcd(&g, c, Var::V);
        if h.deg_v().unwrap_or(0) > 0 {
            g = h;
        }
    }
    let p = separable_part(&g);
    if let Some(tr) = trace {
        let r = path_residual(&p, tr, coord);
        if !(r <= opts.validation_tol) {
            // try the candidates one by one before giving up
            for c in &cands {
                if path_residual(c, tr, coord) <= opts.validation_tol {
                    return Ok(c.clone());
                }
            }
            return Err(Error::ExtraneousVanishing(r));
        }
    }
    Ok(p)
}
