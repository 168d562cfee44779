//! Finite-difference check that t -> v(t^rho) has bounded derivatives as t -> 0.

use serde::Serialize;

use super::central::{PathTracer, DEFAULT_TOL};
use super::dd::{d, to_f64, D};
use super::rho::unique_coordinates;
use super::SdoInstance;
use crate::error::{Error, Result};

/// Levels needed before a verdict is possible.
pub const MIN_LEVELS: usize = 3;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Relative growth tolerated between consecutive level maxima.
    pub slack: f64,
    /// Maxima below this are treated as zero.
    pub floor: f64,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { slack: 0.1, floor: 1e-9, tol: DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateVerdict {
    pub index: usize,
    pub name: String,
    /// max |d/dt v(t^rho)| on each level.
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub max_d1: f64,
    pub max_d2: f64,
    /// Slope of log max|d1| against log t over the finer half of the levels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_exponent: Option<f64>,
    pub bounded: bool,
}

/// Values of the reparametrized path, for plotting.
#[derive(Clone, Debug, Serialize)]
pub struct ReparamPoint {
    pub t: f64,
    pub mu: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub rho: u32,
    pub window: (f64, f64),
    /// Level boundaries t_hi * 2^-l.
    pub levels: Vec<f64>,
    pub per_coordinate: Vec<CoordinateVerdict>,
    pub bounded: bool,
    #[serde(skip)]
    pub points: Vec<ReparamPoint>,
}

fn non_increasing(m: &[f64], opts: &VerifyOptions) -> bool {
    let tail = &m[m.len().saturating_sub(MIN_LEVELS)..];
    tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + opts.slack) + opts.floor)
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn pow(x: f64, rho: u32) -> D {
    (0..rho).fold(d(1.0), |acc, _| acc * x)
}

/// Centered differences of v(t^rho) at three points inside each dyadic level
/// [t_hi 2^-(l+1), t_hi 2^-l] with t_hi 2^-(l+1) >= t_lo, using step t/8.
pub fn verify_reparametrization(
    inst: &SdoInstance,
    rho: u32,
    window: (f64, f64),
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let (t_lo, t_hi) = window;
    if rho == 0 {
        return Err(Error::Degenerate("rho must be at least 1".into()));
    }
    if !(t_lo > 0.0 && t_lo < t_hi && t_hi <= 1.0) {
        return Err(Error::Degenerate(format!("window must satisfy 0 < t_lo < t_hi <= 1, got ({t_lo}, {t_hi})")));
    }
    let mut levels = vec![t_hi];
    while levels[levels.len() - 1] / 2.0 >= t_lo {
        levels.push(levels[levels.len() - 1] / 2.0);
    }
    let nlev = levels.len() - 1;
    if nlev < MIN_LEVELS {
        return Err(Error::InsufficientSamples { needed: MIN_LEVELS, have: nlev });
    }

    // stencil points per level, visited in decreasing mu for warm starts
    let mut ts = Vec::new();
    for l in 0..nlev {
        let lo = levels[l + 1];
        for f in [1.75, 1.5, 1.25] {
            let s = lo * f;
            let h = s / 8.0;
            ts.push((l, s, h));
        }
    }
    let mut tracer = PathTracer::start(inst, 1.0, opts.tol)?;
    let coords = unique_coordinates(inst);
    let mut vals = |t: f64| -> Result<(D, Vec<D>)> {
        let mu = pow(t, rho);
        let p = tracer.advance(mu)?.point.coords();
        Ok((mu, coords.iter().map(|&k| p[k]).collect()))
    };

    let nc = coords.len();
    let mut d1 = vec![vec![0.0f64; nlev]; nc];
    let mut d2 = vec![vec![0.0f64; nlev]; nc];
    let mut points = Vec::new();
    for &(l, s, h) in &ts {
        let (mu_p, fp) = vals(s + h)?;
        let (mu_0, f0) = vals(s)?;
        let (mu_m, fm) = vals(s - h)?;
        for (t, mu, f) in [(s + h, mu_p, &fp), (s, mu_0, &f0), (s - h, mu_m, &fm)] {
            points.push(ReparamPoint { t, mu: to_f64(mu), values: f.iter().map(|&x| to_f64(x)).collect() });
        }
        for c in 0..nc {
            let a = to_f64((fp[c] - fm[c]) / (2.0 * h)).abs();
            let b = to_f64((fp[c] - f0[c] * 2.0 + fm[c]) / (h * h)).abs();
            d1[c][l] = d1[c][l].max(a);
            d2[c][l] = d2[c][l].max(b);
        }
    }

    let per_coordinate: Vec<CoordinateVerdict> = coords
        .iter()
        .enumerate()
        .map(|(c, &k)| {
            let fine = nlev / 2;
            let pts: Vec<(f64, f64)> = (fine..nlev)
                .filter(|&l| d1[c][l] > opts.floor)
                .map(|l| ((levels[l] * levels[l + 1]).sqrt().ln(), d1[c][l].ln()))
                .collect();
            let growth = if pts.len() == nlev - fine { slope(&pts) } else { None };
            CoordinateVerdict {
                index: k,
                name: inst.coordinate_name(k),
                max_d1: d1[c].iter().cloned().fold(0.0, f64::max),
                max_d2: d2[c].iter().cloned().fold(0.0, f64::max),
                growth_exponent: growth,
                bounded: non_increasing(&d1[c], opts) && non_increasing(&d2[c], opts),
                d1: d1[c].clone(),
                d2: d2[c].clone(),
            }
        })
        .collect();
    let bounded = per_coordinate.iter().all(|c| c.bounded);
    Ok(VerifyReport { rho, window, levels, per_coordinate, bounded, points })
}
