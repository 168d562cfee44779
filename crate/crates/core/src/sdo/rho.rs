use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::elim::{eliminate_coordinate, path_residual, ElimOptions};
use super::trace::{fit_order, trace_path, TraceOptions, TraceResult};
use super::SdoInstance;
use crate::arith::{rational_from_f64, BiPoly};
use crate::curve::{
    limit_interval, match_indices, normalize_curve, rho_for_coordinate, BranchSummary, CoordinateRho, Method, RhoReport,
};
use crate::error::{Error, Result};
use crate::puiseux::{expand, Branch};

#[derive(Clone, Debug)]
pub struct RhoOptions {
    pub trace: TraceOptions,
    pub elim: ElimOptions,
    /// Slack added around the limit interval when matching branch centers.
    pub match_tol: f64,
    /// Larger instances skip elimination and go straight to the order fit.
    pub max_elim_n: usize,
    /// Curves supplied by the caller, keyed by coordinate index; used instead of elimination.
    pub curves: BTreeMap<usize, BiPoly>,
}

impl Default for RhoOptions {
    fn default() -> Self {
        RhoOptions {
            trace: TraceOptions::default(),
            elim: ElimOptions::default(),
            match_tol: 1e-6,
            max_elim_n: 3,
            curves: BTreeMap::new(),
        }
    }
}

/// One representative per coordinate: the upper triangles of X and S, and all of y.
pub fn unique_coordinates(inst: &SdoInstance) -> Vec<usize> {
    let (n, nn) = (inst.n, inst.n * inst.n);
    let tri = |off: usize| (0..n).flat_map(move |i| (i..n).map(move |j| off + i * n + j));
    tri(0).chain(nn..nn + inst.m).chain(tri(nn + inst.m)).collect()
}

/// Trace the path, then the exponent of every coordinate.
pub fn compute_rho_sdo(inst: &SdoInstance, opts: &RhoOptions) -> Result<RhoReport> {
    let trace = trace_path(inst, &opts.trace)?;
    rho_from_trace(inst, &trace, opts)
}

pub fn rho_from_trace(inst: &SdoInstance, trace: &TraceResult, opts: &RhoOptions) -> Result<RhoReport> {
    let coords = unique_coordinates(inst);
    let results: Vec<Result<CoordinateRho>> = std::thread::scope(|sc| {
        let handles: Vec<_> = coords.iter().map(|&k| sc.spawn(move || coordinate_rho(inst, trace, k, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("coordinate worker panicked")).collect()
    });
    let per = results
        .into_iter()
        .zip(&coords)
        .map(|(r, &index)| r.map_err(|e| Error::Coordinate { index, source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    Ok(RhoReport::new(per))
}

fn curve_for(inst: &SdoInstance, trace: &TraceResult, k: usize, opts: &RhoOptions) -> Result<BiPoly> {
    if let Some(p) = opts.curves.get(&k) {
        let r = path_residual(p, trace, k);
        if !(r <= opts.elim.validation_tol) {
            return Err(Error::ExtraneousVanishing(r));
        }
        return Ok(p.clone());
    }
    if inst.n > opts.max_elim_n {
        return Err(Error::EliminationBlowUp(format!("n = {} exceeds the elimination limit {}", inst.n, opts.max_elim_n)));
    }
    eliminate_coordinate(inst, k, Some(trace), &opts.elim)
}

/// Exponent of coordinate `k` along a traced path.
pub fn coordinate_rho(inst: &SdoInstance, trace: &TraceResult, k: usize, opts: &RhoOptions) -> Result<CoordinateRho> {
    let name = inst.coordinate_name(k);
    let fit = match fit_order(trace, k) {
        Ok(f) => f,
        Err(Error::ConstantCoordinate(_)) => {
            return Ok(CoordinateRho {
                index: k,
                name,
                method: Method::Constant,
                branches: Vec::new(),
                rho_i: 1,
                fitted_exponent: None,
                fit_consistent: None,
            })
        }
        Err(e) => return Err(e),
    };
    let fallback = || CoordinateRho {
        index: k,
        name: name.clone(),
        method: Method::OrderFit,
        branches: Vec::new(),
        rho_i: fit.denominator(),
        fitted_exponent: Some(fit.describe()),
        fit_consistent: None,
    };
    let p = match curve_for(inst, trace, k, opts) {
        Ok(p) => p,
        Err(Error::EliminationBlowUp(_)) | Err(Error::ExtraneousVanishing(_)) => return Ok(fallback()),
        Err(e) => return Err(e),
    };
    let curve = normalize_curve(&p)?;
    let branches = expand(&curve.normalized)?;
    let lim = &trace.limit[k];
    let interval = limit_interval(lim.value, lim.width)
        .ok_or_else(|| Error::Degenerate(format!("limit of {name} is not finite")))?;
    let tol = rational_from_f64(opts.match_tol).ok_or_else(|| Error::Degenerate("bad match tolerance".into()))?;
    let idx = match_indices(&branches, curve.theta, &interval, &tol)?;
    let mut matched: Vec<Branch> = idx.iter().map(|&i| branches[i].clone()).collect();
    let following: Vec<Branch> = matched.iter().filter(|b| follows_trace(b, curve.theta, trace, k)).cloned().collect();
    if !following.is_empty() {
        matched = following;
    }
    let rho_i = rho_for_coordinate(&matched).ok_or(Error::EmptyMatch {
        lo: lim.value - lim.width,
        hi: lim.value + lim.width,
    })?;
    let den = fit.denominator();
    Ok(CoordinateRho {
        index: k,
        name,
        method: Method::Curve,
        branches: matched.iter().map(|b| BranchSummary::new(b, curve.theta, "mu")).collect(),
        rho_i,
        fitted_exponent: Some(fit.describe()),
        fit_consistent: Some(matched.iter().all(|b| b.ramification % den == 0)),
    })
}

/// Whether some conjugate of the truncated series tracks the samples much
/// better than the limit alone does; separates branches sharing a center.
fn follows_trace(b: &Branch, theta: u32, trace: &TraceResult, k: usize) -> bool {
    let n = trace.samples.len();
    let lim = trace.limit[k].value;
    let q = b.ramification as f64;
    let terms: Vec<(f64, (f64, f64))> =
        b.expansion.terms.iter().map(|t| (t.exponent.to_f64().unwrap_or(0.0), t.coefficient.approx())).collect();
    trace.samples[n.saturating_sub(3)..].iter().all(|s| {
        let v = s.coords()[k];
        let dev = (v - lim).abs();
        if dev <= 1e-12 * (1.0 + lim.abs()) {
            return true;
        }
        let scale = s.mu.powi(theta as i32);
        let err = (0..b.ramification)
            .map(|j| {
                let rot = 2.0 * std::f64::consts::PI * j as f64 / q;
                let (mut re, mut im) = (0.0, 0.0);
                for &(e, (cr, ci)) in &terms {
                    let (r, a) = (s.mu.powf(e), rot * e * q);
                    let (wr, wi) = (r * a.cos(), r * a.sin());
                    re += cr * wr - ci * wi;
                    im += cr * wi + ci * wr;
                }
                (re / scale - v).hypot(im / scale)
            })
            .fold(f64::INFINITY, f64::min);
        err <= 0.1 * dev
    })
}
