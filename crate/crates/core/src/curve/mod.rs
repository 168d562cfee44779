//! Curve-level pipeline: normalization, irreducibility, matching branch
//! centers against a limit value, and the exponent rho.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::algebraic::interval::{CInterval, Interval};
use crate::algebraic::AlgebraicNumber;
use crate::arith::{content_and_primitive, fmt_rational, lcm_u64, separable_part, BiPoly, Rational, UniPoly};
use crate::error::{Error, Result};
use crate::puiseux::{expand, Branch};

#[derive(Clone, Debug, Serialize)]
pub struct NormalizedCurve {
    #[serde(serialize_with = "crate::serde_display")]
    pub original: BiPoly,
    #[serde(serialize_with = "crate::serde_display")]
    pub normalized: BiPoly,
    /// Roots were rescaled as V -> V / mu^theta.
    pub theta: u32,
    /// The rescaled polynomial was multiplied by mu^alpha.
    pub alpha: u32,
    pub transform_log: Vec<String>,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Content removal, the smallest boundedness rescale, then the separable part.
pub fn normalize_curve(p: &BiPoly) -> Result<NormalizedCurve> {
    let d = match p.deg_v() {
        Some(d) if d > 0 => d,
        _ => return Err(Error::Degenerate("polynomial has degree 0 in V".into())),
    };
    let mut log = Vec::new();
    let (c, mut q) = content_and_primitive(p);
    if !c.is_constant() {
        log.push(format!("divided by the mu-content {c}"));
    }
    let ords: Vec<Option<i64>> = q.coeffs().iter().map(|c| c.order().map(|o| o as i64)).collect();
    let od = ords[d].expect("leading coefficient is nonzero");
    let mut theta = ceil_div(od, d as i64).max(0);
    for (j, o) in ords.iter().enumerate().take(d) {
        if let Some(o) = o {
            theta = theta.max(ceil_div(od - o, (d - j) as i64));
        }
    }
    let alpha = theta * d as i64 - od;
    if theta > 0 || alpha > 0 {
        // p_j -> mu^(alpha - j theta) p_j; every exponent shift keeps the order nonnegative
        let rows: Vec<UniPoly> = q
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let s = alpha - j as i64 * theta;
                if s >= 0 {
                    c.shift_up(s as usize)
                } else {
                    c.shift_down((-s) as usize)
                }
            })
            .collect();
        q = BiPoly::new(rows);
        log.push(format!("rescaled V -> V/mu^{theta} and multiplied by mu^{alpha}"));
    }
    let s = separable_part(&q);
    if s.deg_v() != q.deg_v() {
        log.push(format!("took the separable part (degree {} -> {})", q.deg_v().unwrap_or(0), s.deg_v().unwrap_or(0)));
    } else if s != q {
        log.push("normalized sign and content".into());
    }
    Ok(NormalizedCurve { original: p.clone(), normalized: s, theta: theta as u32, alpha: alpha as u32, transform_log: log })
}

/// Irreducible over the convergent power series ring iff some branch has
/// ramification equal to the V-degree.
pub fn is_irreducible(curve: &NormalizedCurve, branches: &[Branch]) -> bool {
    let d = curve.normalized.deg_v().unwrap_or(0) as u64;
    branches.iter().any(|b| b.ramification == d)
}

/// Center of the branch in the original coordinate V = V' / mu^theta.
/// `None` when the original root is unbounded.
pub fn original_center(b: &Branch, theta: u32) -> Option<AlgebraicNumber> {
    let th = Rational::from_integer(theta.into());
    let terms = &b.expansion.terms;
    match terms.first() {
        None => Some(AlgebraicNumber::from_rational(Rational::zero())),
        Some(t) if t.exponent < th => None,
        Some(_) => Some(
            terms
                .iter()
                .find(|t| t.exponent == th)
                .map(|t| t.coefficient.clone())
                .unwrap_or_else(|| AlgebraicNumber::from_rational(Rational::zero())),
        ),
    }
}

fn center_matches(c: &AlgebraicNumber, target: &CInterval) -> Result<bool> {
    if let Some(r) = c.to_rational() {
        return Ok(target.re.contains(&r) && target.im.contains_zero());
    }
    let mut bits = 64;
    while bits <= 4096 {
        let b = c.enclosure(bits)?;
        if b.subset_of(target) {
            return Ok(true);
        }
        if !b.intersects(target) {
            return Ok(false);
        }
        bits *= 2;
    }
    Err(Error::Ambiguity(format!(
        "center {c} cannot be separated from the boundary of [{}, {}] at 4096 bits",
        fmt_rational(&target.re.lo),
        fmt_rational(&target.re.hi)
    )))
}

/// Indices of the branches whose original center, widened by `tol`, meets `limit`.
pub fn match_indices(branches: &[Branch], theta: u32, limit: &Interval, tol: &Rational) -> Result<Vec<usize>> {
    let target = CInterval {
        re: Interval::new(&limit.lo - tol, &limit.hi + tol),
        im: Interval::new(-tol.clone(), tol.clone()),
    };
    let mut out = Vec::new();
    for (i, b) in branches.iter().enumerate() {
        if let Some(c) = original_center(b, theta) {
            if center_matches(&c, &target)? {
                out.push(i);
            }
        }
    }
    Ok(out)
}

pub fn match_branches(branches: &[Branch], theta: u32, limit: &Interval, tol: &Rational) -> Result<Vec<Branch>> {
    Ok(match_indices(branches, theta, limit, tol)?.into_iter().map(|i| branches[i].clone()).collect())
}

/// Product of the distinct ramification indices among `matched`.
pub fn rho_for_coordinate(matched: &[Branch]) -> Option<u64> {
    if matched.is_empty() {
        return None;
    }
    let mut q: Vec<u64> = matched.iter().map(|b| b.ramification).collect();
    q.sort_unstable();
    q.dedup();
    Some(q.iter().product())
}

/// Least common multiple; 1 for an empty list.
pub fn aggregate_rho(per_coordinate: &[u64]) -> u64 {
    per_coordinate.iter().fold(1, |a, &b| lcm_u64(a, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchSummary {
    pub center: String,
    pub center_approx: (f64, f64),
    pub q: u64,
    pub conjugates: u64,
    pub series: String,
}

impl BranchSummary {
    pub fn new(b: &Branch, theta: u32, var: &str) -> Self {
        let center = original_center(b, theta);
        BranchSummary {
            center: center.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "inf".into()),
            center_approx: center.map(|c| c.approx()).unwrap_or((f64::INFINITY, 0.0)),
            q: b.ramification,
            conjugates: b.conjugate_count,
            series: b.expansion.render(var),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Puiseux branches of an exact curve matched against the limit.
    Curve,
    /// The coordinate does not move along the path.
    Constant,
    /// Denominator of a fitted convergence exponent; heuristic.
    OrderFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateRho {
    pub index: usize,
    pub name: String,
    pub method: Method,
    pub branches: Vec<BranchSummary>,
    pub rho_i: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_exponent: Option<String>,
    /// Whether the fitted denominator divides every matched ramification index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_consistent: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimality {
    /// Every coordinate matched a single branch.
    IrreducibleCertified,
    ProductFallback,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoReport {
    pub per_coordinate: Vec<CoordinateRho>,
    pub rho: u64,
    pub optimality_note: Optimality,
}

impl RhoReport {
    pub fn new(per_coordinate: Vec<CoordinateRho>) -> Self {
        let rho = aggregate_rho(&per_coordinate.iter().map(|c| c.rho_i).collect::<Vec<_>>());
        let certified = per_coordinate.iter().all(|c| match c.method {
            Method::Curve => c.branches.len() == 1,
            Method::Constant => true,
            Method::OrderFit => false,
        });
        let optimality_note = if certified { Optimality::IrreducibleCertified } else { Optimality::ProductFallback };
        RhoReport { per_coordinate, rho, optimality_note }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub curve: NormalizedCurve,
    pub irreducible: bool,
    pub branches: Vec<BranchSummary>,
    /// Indices into `branches`.
    pub matched: Vec<usize>,
    pub rho_i: u64,
}

/// Full curve pipeline for one coordinate with limit value `limit`.
pub fn rho_for_curve(p: &BiPoly, limit: &Interval, tol: &Rational) -> Result<CurveReport> {
    let curve = normalize_curve(p)?;
    let branches = expand(&curve.normalized)?;
    let idx = match_indices(&branches, curve.theta, limit, tol)?;
    let matched: Vec<Branch> = idx.iter().map(|&i| branches[i].clone()).collect();
    let rho_i = rho_for_coordinate(&matched).ok_or_else(|| Error::EmptyMatch {
        lo: limit.lo.to_f64().unwrap_or(f64::NAN),
        hi: limit.hi.to_f64().unwrap_or(f64::NAN),
    })?;
    Ok(CurveReport {
        irreducible: is_irreducible(&curve, &branches),
        branches: branches.iter().map(|b| BranchSummary::new(b, curve.theta, "mu")).collect(),
        matched: idx,
        rho_i,
        curve,
    })
}

/// `value +- halfwidth` as a rational interval.
pub fn limit_interval(value: f64, halfwidth: f64) -> Option<Interval> {
    let v = crate::arith::rational_from_f64(value)?;
    let h = crate::arith::rational_from_f64(halfwidth.abs())?;
    Some(Interval::new(&v - &h, &v + &h))
}
