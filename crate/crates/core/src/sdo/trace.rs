use std::io::Write;

use num_traits::Zero;
use serde::Serialize;

use super::central::{CentralPathSample, PathTracer, DEFAULT_TOL};
use super::dd::{abs, d, to_f64, D};
use super::SdoInstance;
use crate::arith::{fmt_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TraceOptions {
    pub mu_start: f64,
    pub mu_end: f64,
    pub grid_ratio: f64,
    pub tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { mu_start: 1.0, mu_end: 1e-8, grid_ratio: 0.5, tol: DEFAULT_TOL }
    }
}

/// Extrapolated limit of one coordinate with a half-width.
#[derive(Clone, Debug, Serialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub width: f64,
    #[serde(skip)]
    pub exact: D,
}

impl LimitEstimate {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.width
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderFit {
    /// Least-squares slope of log|v - v**| against log mu.
    pub raw: f64,
    #[serde(serialize_with = "crate::serde_rational")]
    pub snapped: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceResult {
    pub samples: Vec<CentralPathSample>,
    pub limit: Vec<LimitEstimate>,
    /// `None` for coordinates that do not move.
    pub order_estimates: Vec<Option<OrderFit>>,
}

/// Follow the path on mu_k = mu_start * grid_ratio^k down to mu_end.
pub fn trace_path(inst: &SdoInstance, opts: &TraceOptions) -> Result<TraceResult> {
    let TraceOptions { mu_start, mu_end, grid_ratio, tol } = *opts;
    if !(mu_end > 0.0 && mu_end < mu_start && grid_ratio > 0.0 && grid_ratio < 1.0) {
        return Err(Error::InvalidInstance(format!(
            "need 0 < mu_end < mu_start and 0 < ratio < 1 (got {mu_end}, {mu_start}, {grid_ratio})"
        )));
    }
    let mut tracer = PathTracer::start(inst, mu_start, tol)?;
    let mut samples = Vec::new();
    let mut mu = d(mu_start);
    let stop = mu_end * (1.0 - 1e-12);
    while to_f64(mu) >= stop {
        samples.push(tracer.advance(mu)?);
        mu = mu * grid_ratio;
    }
    Ok(finish_trace(samples))
}

/// Limits and order fits for samples on a decreasing geometric grid.
pub fn finish_trace(samples: Vec<CentralPathSample>) -> TraceResult {
    let dim = samples.first().map_or(0, |s| s.point.coords().len());
    let cols: Vec<Vec<D>> = {
        let rows: Vec<Vec<D>> = samples.iter().map(|s| s.point.coords()).collect();
        (0..dim).map(|k| rows.iter().map(|r| r[k]).collect()).collect()
    };
    let limit: Vec<LimitEstimate> = cols.iter().map(|c| aitken_limit(c)).collect();
    let mut t = TraceResult { samples, limit, order_estimates: Vec::new() };
    t.order_estimates = (0..dim).map(|k| fit_order(&t, k).ok()).collect();
    t
}

fn aitken(v: &[D], k: usize) -> D {
    let (a, b, c) = (v[k - 2], v[k - 1], v[k]);
    let d1 = c - b;
    let d2 = c - b * 2.0 + a;
    let scale = to_f64(abs(c)) + to_f64(abs(d1)) + 1e-300;
    if to_f64(abs(d2)) <= 1e-28 * scale || to_f64(abs(d1)) <= 1e-30 * scale {
        return c;
    }
    c - d1 * d1 / d2
}

/// Aitken's delta-squared on the last samples; the half-width is twice the
/// largest of the last two disagreements.
pub fn aitken_limit(v: &[D]) -> LimitEstimate {
    let n = v.len();
    let floor = |x: D| 1e-14 * (1.0 + to_f64(abs(x)));
    match n {
        0 => LimitEstimate { value: f64::NAN, width: f64::INFINITY, exact: d(f64::NAN) },
        1 | 2 => {
            let x = v[n - 1];
            let w = if n == 2 { to_f64(abs(v[1] - v[0])) } else { f64::INFINITY };
            LimitEstimate { value: to_f64(x), width: w + floor(x), exact: x }
        }
        _ => {
            let est: Vec<D> = (2..n).map(|k| aitken(v, k)).collect();
            let x = est[est.len() - 1];
            let mut w: f64 = 0.0;
            for k in est.len().saturating_sub(3)..est.len().saturating_sub(1) {
                w = w.max(to_f64(abs(est[k + 1] - est[k])));
            }
            if est.len() == 1 {
                w = to_f64(abs(x - v[n - 1]));
            }
            LimitEstimate { value: to_f64(x), width: 2.0 * w + floor(x), exact: x }
        }
    }
}

/// Smallest denominator q <= 16 with some p/q within 0.05 of x; the nearest
/// such fraction when none is that close.
pub fn snap_exponent(x: f64) -> Rational {
    let cand = |q: i64| {
        let p = (x * q as f64).round() as i64;
        (Rational::new(p.into(), q.into()), (x - p as f64 / q as f64).abs())
    };
    for q in 1..=16 {
        let (r, e) = cand(q);
        if e <= 0.05 {
            return r;
        }
    }
    (1..=16).map(cand).min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).map(|c| c.0).unwrap_or_else(Rational::zero)
}

pub const MIN_FIT_SAMPLES: usize = 6;

/// Convergence order of coordinate `k`, fitted over the second half of the trace.
pub fn fit_order(trace: &TraceResult, k: usize) -> Result<OrderFit> {
    let n = trace.samples.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_FIT_SAMPLES, have: n });
    }
    let lim = trace.limit[k].exact;
    let scale = 1.0 + to_f64(abs(lim));
    let dev: Vec<f64> = trace.samples.iter().map(|s| to_f64(abs(s.point.coords()[k] - lim))).collect();
    if dev.iter().all(|&e| e <= 1e-13 * scale) {
        return Err(Error::ConstantCoordinate(k));
    }
    let from = (n / 2).min(n - MIN_FIT_SAMPLES);
    let pts: Vec<(f64, f64)> = (from..n)
        .filter(|&i| dev[i] > 1e-28 * scale)
        .map(|i| (trace.samples[i].mu.ln(), dev[i].ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::ConstantCoordinate(k));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
    let raw = sxy / sxx;
    Ok(OrderFit { raw, snapped: snap_exponent(raw) })
}

/// CSV with header `mu,coord_0,...,coord_{d-1},residual`.
pub fn write_csv<W: Write>(trace: &TraceResult, mut w: W) -> std::io::Result<()> {
    let dim = trace.limit.len();
    let head: Vec<String> = (0..dim).map(|k| format!("coord_{k}")).collect();
    writeln!(w, "mu,{},residual", head.join(","))?;
    for s in &trace.samples {
        let vals: Vec<String> = s.point.coords().iter().map(|&x| format!("{:e}", to_f64(x))).collect();
        writeln!(w, "{:e},{},{:e}", s.mu, vals.join(","), s.residual)?;
    }
    Ok(())
}

impl OrderFit {
    pub fn denominator(&self) -> u64 {
        num_traits::ToPrimitive::to_u64(self.snapped.denom()).unwrap_or(1)
    }

    pub fn describe(&self) -> String {
        format!("{} (raw {:.4})", fmt_rational(&self.snapped), self.raw)
    }
}
