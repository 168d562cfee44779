//! Central points by Newton's method on the symmetrized system
//! A vec(X) = b, A^T y + vec(S - C) = 0, (XS + SX)/2 = mu I.

use serde::Serialize;

use super::dd::{d, di, is_pd, matmul, norm_inf, solve, to_f64, D};
use super::SdoInstance;
use crate::error::{Error, Result};

const FRACTION_TO_BOUNDARY: f64 = 0.95;
const MAX_NEWTON: usize = 200;

/// Primal-dual point in double-double precision.
#[derive(Clone, Debug)]
pub struct CentralPoint {
    pub mu: D,
    pub x: Vec<D>,
    pub y: Vec<D>,
    pub s: Vec<D>,
}

impl CentralPoint {
    fn start(inst: &SdoInstance, scale: f64) -> Self {
        let n = inst.n;
        let mut x = vec![d(0.0); n * n];
        for i in 0..n {
            x[i * n + i] = d(scale);
        }
        CentralPoint { mu: d(1.0), s: x.clone(), x, y: vec![d(0.0); inst.m] }
    }

    /// X row-major, y, S row-major.
    pub fn coords(&self) -> Vec<D> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v.extend_from_slice(&self.s);
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralPathSample {
    pub mu: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    /// max(primal / (1 + |b|), dual / (1 + |C|), |XS - mu I| / mu)
    pub residual: f64,
    #[serde(skip)]
    pub point: CentralPoint,
}

impl CentralPathSample {
    fn new(point: CentralPoint, residual: f64) -> Self {
        let f = |v: &[D]| v.iter().map(|&x| to_f64(x)).collect::<Vec<f64>>();
        CentralPathSample { mu: to_f64(point.mu), x: f(&point.x), y: f(&point.y), s: f(&point.s), residual, point }
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v.extend_from_slice(&self.s);
        v
    }

    /// <X, S>, which equals n mu on the central path.
    pub fn duality_gap(&self) -> f64 {
        let p = &self.point;
        to_f64(p.x.iter().zip(&p.s).fold(d(0.0), |a, (&x, &s)| a + x * s))
    }
}

struct Residuals {
    primal: Vec<D>,
    dual: Vec<D>,
    /// mu I - (XS + SX)/2
    comp: Vec<D>,
    scaled: f64,
}

fn residuals(inst: &SdoInstance, p: &CentralPoint, mu: D) -> Residuals {
    let n = inst.n;
    let primal: Vec<D> = (0..inst.m)
        .map(|i| di(inst.b[i]) - inst.a[i].iter().zip(&p.x).fold(d(0.0), |acc, (&a, &x)| if a == 0 { acc } else { acc + di(a) * x }))
        .collect();
    let dual: Vec<D> = (0..n * n)
        .map(|k| {
            let mut r = di(inst.c[k]) - p.s[k];
            for i in 0..inst.m {
                if inst.a[i][k] != 0 {
                    r -= di(inst.a[i][k]) * p.y[i];
                }
            }
            r
        })
        .collect();
    let xs = matmul(&p.x, &p.s, n);
    let mut comp = vec![d(0.0); n * n];
    let mut full: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { mu } else { d(0.0) };
            comp[i * n + j] = target - (xs[i * n + j] + xs[j * n + i]) * 0.5;
            full = full.max(to_f64(super::dd::abs(xs[i * n + j] - target)));
        }
    }
    let bn = 1.0 + inst.b.iter().map(|x| x.abs() as f64).fold(0.0, f64::max);
    let cn = 1.0 + inst.c.iter().map(|x| x.abs() as f64).fold(0.0, f64::max);
    let scaled = (norm_inf(&primal) / bn).max(norm_inf(&dual) / cn).max(full / to_f64(mu));
    Residuals { primal, dual, comp, scaled }
}

/// Newton direction (dX, dy, dS) for the symmetrized system.
fn direction(inst: &SdoInstance, p: &CentralPoint, r: &Residuals) -> Option<(Vec<D>, Vec<D>, Vec<D>)> {
    let (n, m) = (inst.n, inst.m);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let t = pairs.len();
    let mut sym = vec![0usize; n * n];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        sym[i * n + j] = k;
        sym[j * n + i] = k;
    }
    let k = 2 * t + m;
    let (ox, oy, os) = (0, t, t + m);
    let mut a = vec![d(0.0); k * k];
    let mut rhs = vec![d(0.0); k];
    for i in 0..m {
        for (q, &v) in inst.a[i].iter().enumerate() {
            if v != 0 {
                a[i * k + ox + sym[q]] += di(v);
            }
        }
        rhs[i] = r.primal[i];
    }
    for (e, &(i, j)) in pairs.iter().enumerate() {
        let row = m + e;
        for l in 0..m {
            let v = inst.a[l][i * n + j];
            if v != 0 {
                a[row * k + oy + l] += di(v);
            }
        }
        a[row * k + os + e] += d(1.0);
        rhs[row] = r.dual[i * n + j];
    }
    for (e, &(i, j)) in pairs.iter().enumerate() {
        let row = m + t + e;
        // (dX S + X dS + S dX + dS X)_ij / 2
        for q in 0..n {
            let h = d(0.5);
            a[row * k + ox + sym[i * n + q]] += h * p.s[q * n + j];
            a[row * k + os + sym[q * n + j]] += h * p.x[i * n + q];
            a[row * k + ox + sym[q * n + j]] += h * p.s[i * n + q];
            a[row * k + os + sym[i * n + q]] += h * p.x[q * n + j];
        }
        rhs[row] = r.comp[i * n + j];
    }
    let sol = solve(a, rhs)?;
    let unpack = |off: usize| -> Vec<D> { (0..n * n).map(|q| sol[off + sym[q]]).collect() };
    Some((unpack(ox), sol[oy..oy + m].to_vec(), unpack(os)))
}

fn axpy(x: &[D], a: D, dx: &[D]) -> Vec<D> {
    x.iter().zip(dx).map(|(&u, &v)| u + a * v).collect()
}

/// Largest step in (0, 1] that keeps X and S at the fraction-to-boundary margin.
fn step_length(n: usize, p: &CentralPoint, dx: &[D], ds: &[D]) -> f64 {
    let ok = |t: f64| is_pd(&axpy(&p.x, d(t), dx), n) && is_pd(&axpy(&p.s, d(t), ds), n);
    let reach = 1.0 / FRACTION_TO_BOUNDARY;
    if ok(reach) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, reach);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    FRACTION_TO_BOUNDARY * lo
}

/// Newton iteration at fixed `mu` from `p`; `tol` bounds the scaled residual.
fn newton(inst: &SdoInstance, mut p: CentralPoint, mu: D, tol: f64) -> Result<(CentralPoint, f64)> {
    p.mu = mu;
    let mut r = residuals(inst, &p, mu);
    let mut polish = 0;
    for _ in 0..MAX_NEWTON {
        if r.scaled <= tol {
            // a couple of extra full steps reach the double-double floor
            if polish == 2 {
                break;
            }
            polish += 1;
        }
        let Some((dx, dy, ds)) = direction(inst, &p, &r) else { break };
        let alpha = step_length(inst.n, &p, &dx, &ds);
        if alpha < 1e-12 {
            break;
        }
        let a = d(alpha);
        let q = CentralPoint { mu, x: axpy(&p.x, a, &dx), y: axpy(&p.y, a, &dy), s: axpy(&p.s, a, &ds) };
        let rq = residuals(inst, &q, mu);
        if polish > 0 && rq.scaled >= r.scaled {
            break;
        }
        p = q;
        r = rq;
    }
    if r.scaled <= tol {
        Ok((p, r.scaled))
    } else {
        Err(Error::NoConvergence { mu: to_f64(mu), residual: r.scaled })
    }
}

/// Continuation along the central path with warm starts.
#[derive(Clone, Debug)]
pub struct PathTracer<'a> {
    inst: &'a SdoInstance,
    cur: CentralPoint,
    tol: f64,
}

impl<'a> PathTracer<'a> {
    /// Solve at `mu0` from scaled identity starts.
    pub fn start(inst: &'a SdoInstance, mu0: f64, tol: f64) -> Result<Self> {
        let mut last = None;
        for scale in [1.0, 10.0, 100.0, 0.1] {
            match newton(inst, CentralPoint::start(inst, scale), d(mu0), tol) {
                Ok((cur, _)) => return Ok(PathTracer { inst, cur, tol }),
                Err(e) => last = Some(e),
            }
        }
        Err(Error::Infeasible(format!(
            "no interior central point at mu = {mu0} from identity starts ({})",
            last.map(|e| e.to_string()).unwrap_or_default()
        )))
    }

    pub fn current(&self) -> &CentralPoint {
        &self.cur
    }

    /// Move to `mu`, bisecting the step in log mu when Newton fails.
    pub fn advance(&mut self, mu: D) -> Result<CentralPathSample> {
        self.advance_depth(mu, 0)
    }

    fn advance_depth(&mut self, mu: D, depth: usize) -> Result<CentralPathSample> {
        match newton(self.inst, self.cur.clone(), mu, self.tol) {
            Ok((p, res)) => {
                self.cur = p.clone();
                Ok(CentralPathSample::new(p, res))
            }
            Err(e) if depth >= 30 => Err(e),
            Err(_) => {
                let mid = (self.cur.mu * mu).sqrt();
                self.advance_depth(mid, depth + 1)?;
                self.advance_depth(mu, depth + 1)
            }
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-14;

/// The central point at `mu`, reached by continuation from mu = 1.
pub fn central_point(inst: &SdoInstance, mu: f64, tol: f64) -> Result<CentralPathSample> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidInstance(format!("mu must be positive, got {mu}")));
    }
    let mu0 = mu.max(1.0);
    let mut tr = PathTracer::start(inst, mu0, tol)?;
    let mut cur = mu0;
    loop {
        cur = (cur * 0.25).max(mu);
        let s = tr.advance(d(cur))?;
        if cur <= mu {
            return Ok(s);
        }
    }
}
