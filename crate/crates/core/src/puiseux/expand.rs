//! Newton-Puiseux iteration with Duval's rational choice of roots: each edge
//! root z is lifted to one w-th root, so one task stands for a whole
//! conjugacy class of w * (multiplicity) roots.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::polygon::lower_hull;
use super::{Branch, PuiseuxExpansion, PuiseuxTerm};
use crate::algebraic::{adjoin_root_near, roots_with_multiplicity, AlgebraicNumber, Elem, FieldTower};
use crate::arith::{BiPoly, Rational};
use crate::error::{Error, Result};

/// Knobs for [`expand_with`].
#[derive(Clone, Debug)]
pub struct ExpandOptions {
    /// Terms to compute after the singular part has separated the branch.
    pub max_extra_terms: usize,
    /// Keep only branches whose center equals this value.
    pub center_filter: Option<AlgebraicNumber>,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { max_extra_terms: 4, center_filter: None }
    }
}

/// Rows indexed by V-degree; each row maps an exponent of t = mu^(1/grid)
/// to its coefficient.
#[derive(Clone, Debug)]
struct GridPoly {
    rows: Vec<BTreeMap<u64, Elem>>,
}

impl GridPoly {
    fn from_bipoly(p: &BiPoly) -> Self {
        let rows = p
            .coeffs()
            .iter()
            .map(|c| {
                c.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(i, a)| (i as u64, Elem::Q(a.clone())))
                    .collect()
            })
            .collect();
        GridPoly { rows }
    }

    /// Lowest exponent of row j with a nonzero coefficient, purging zeros met on the way.
    fn ord(&mut self, t: &mut FieldTower, j: usize) -> Result<Option<u64>> {
        let row = &mut self.rows[j];
        loop {
            let Some((&k, c)) = row.iter().next() else {
                return Ok(None);
            };
            if t.is_zero(c)? {
                row.remove(&k);
            } else {
                return Ok(Some(k));
            }
        }
    }

    fn coeff(&self, j: usize, k: u64) -> Elem {
        self.rows.get(j).and_then(|r| r.get(&k)).cloned().unwrap_or_else(Elem::zero)
    }

    /// t^(-b) * Q(t^w, t^u (V + a)), exponents of the old grid scaled by w.
    fn transform(&self, t: &FieldTower, u: u64, w: u64, b: u64, a: &Elem) -> GridPoly {
        let d = self.rows.len();
        let scaled: Vec<BTreeMap<u64, Elem>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(j, row)| {
                row.iter()
                    .map(|(&k, c)| {
                        let e = k * w + u * j as u64;
                        debug_assert!(e >= b);
                        (e - b, c.clone())
                    })
                    .collect()
            })
            .collect();
        // Taylor shift V -> V + a: out_i = sum_j binom(j, i) a^(j-i) scaled_j
        let mut apow = vec![Elem::one()];
        for i in 1..d {
            apow.push(t.mul(&apow[i - 1], a));
        }
        let mut rows = vec![BTreeMap::new(); d];
        let mut binom = vec![vec![0u64; d]; d];
        for j in 0..d {
            binom[j][0] = 1;
            for i in 1..=j {
                binom[j][i] = binom[j - 1][i - 1] + if i < j { binom[j - 1][i] } else { 0 };
            }
        }
        for (j, row) in scaled.iter().enumerate() {
            for i in 0..=j {
                let f = t.scale(&apow[j - i], &Rational::from_integer(binom[j][i].into()));
                if f.is_trivially_zero() {
                    continue;
                }
                let out: &mut BTreeMap<u64, Elem> = &mut rows[i];
                for (&k, c) in row {
                    let v = t.mul(c, &f);
                    let slot = out.entry(k).or_insert_with(Elem::zero);
                    *slot = t.add(slot, &v);
                }
            }
        }
        GridPoly { rows }
    }
}

#[derive(Clone)]
struct Task {
    tower: FieldTower,
    poly: GridPoly,
    grid: u64,
    /// (coefficient, exponent in mu)
    terms: Vec<(Elem, Rational)>,
    gamma_total: Rational,
    /// Multiplicity of V = 0 as a root of `poly` that this task must resolve.
    r: usize,
    first: bool,
    iterations: usize,
    extra_left: Option<usize>,
}

struct Ctx {
    bound: usize,
    extra: usize,
    filter: Option<AlgebraicNumber>,
    out: Vec<Branch>,
}

fn principal_root_approx(z: (f64, f64), w: u64) -> (f64, f64) {
    let r = z.0.hypot(z.1).powf(1.0 / w as f64);
    let th = z.1.atan2(z.0) / w as f64;
    (r * th.cos(), r * th.sin())
}

fn finish(task: &Task, exact: bool, ctx: &mut Ctx) {
    let tower = std::sync::Arc::new(task.tower.clone());
    let terms: Vec<PuiseuxTerm> = task
        .terms
        .iter()
        .map(|(c, e)| PuiseuxTerm { coefficient: AlgebraicNumber::from_arc(tower.clone(), c.clone()), exponent: e.clone() })
        .collect();
    let center = terms
        .iter()
        .find(|t| t.exponent.is_zero())
        .map(|t| t.coefficient.clone())
        .unwrap_or_else(|| AlgebraicNumber::from_arc(tower.clone(), Elem::zero()));
    let q = task.grid;
    ctx.out.push(Branch {
        center,
        ramification: q,
        conjugate_count: q,
        expansion: PuiseuxExpansion {
            terms,
            ramification: q,
            stabilized: task.extra_left.is_some() || exact,
            exact,
            iterations_used: task.iterations,
        },
    });
}

fn center_allowed(ctx: &Ctx, tower: &FieldTower, value: &Elem) -> Result<bool> {
    match &ctx.filter {
        None => Ok(true),
        Some(c) => AlgebraicNumber::new(tower.clone(), value.clone()).equals(c),
    }
}

fn step(mut task: Task, ctx: &mut Ctx, stack: &mut Vec<Task>) -> Result<()> {
    let tw = &mut task.tower;
    let top = if task.first { task.poly.rows.len() - 1 } else { task.r };
    let mut pts = Vec::new();
    for j in 0..=top {
        if let Some(k) = task.poly.ord(tw, j)? {
            pts.push((j, k as i64));
        }
    }
    let jmin = pts.first().map(|p| p.0).unwrap_or(0);
    if jmin >= 2 {
        return Err(Error::NotSquareFree(jmin));
    }
    if jmin == 1 {
        // V = 0 is a simple root: the expansion so far is exact
        if !task.first || center_allowed(ctx, &task.tower, &Elem::zero())? {
            finish(&task, true, ctx);
        }
        if task.r == 1 && !task.first {
            return Ok(());
        }
    }
    let hull = lower_hull(&pts);
    for seg in hull.windows(2) {
        let ((j1, k1), (j2, k2)) = (seg[0], seg[1]);
        if k2 > k1 {
            continue; // negative slope in gamma: unbounded roots
        }
        let dj = (j2 - j1) as u64;
        let dk = (k1 - k2) as u64;
        let g = dk.gcd(&dj);
        let (u, w) = (dk / g, dj / g);
        if !task.first && u == 0 {
            continue;
        }
        if task.first {
            if let Some(f) = &ctx.filter {
                let want_zero = f.is_zero()?;
                if want_zero != (u > 0) {
                    continue;
                }
            }
        }
        let mut psi = Vec::new();
        let mut i = 0u64;
        while j1 as u64 + i * w <= j2 as u64 {
            let j = j1 + (i * w) as usize;
            let k = (k1 as u64) - i * u;
            psi.push(task.poly.coeff(j, k));
            i += 1;
        }
        let mut base = task.tower.clone();
        let roots = roots_with_multiplicity(&mut base, &psi)?;
        for root in roots {
            let mut rt = root.tower;
            let z = root.value;
            let (mut nt, a) = if w == 1 {
                (rt, z)
            } else {
                let zapprox = rt.approx(&z)?;
                let mut f = vec![Elem::zero(); w as usize + 1];
                f[0] = rt.neg(&z);
                f[w as usize] = Elem::one();
                adjoin_root_near(&mut rt, &f, principal_root_approx(zapprox, w))?
            };
            if task.first && u == 0 && !center_allowed(ctx, &nt, &a)? {
                continue;
            }
            let new_grid = task.grid * w;
            let gamma = Rational::new((u as i64).into(), (new_grid as i64).into());
            let b = k1 as u64 * w + j1 as u64 * u;
            let exponent = &task.gamma_total + &gamma;
            let mut terms = task.terms.clone();
            terms.push((a.clone(), exponent.clone()));
            let stabilizes = root.multiplicity == 1;
            let iterations = if task.extra_left.is_some() { task.iterations } else { task.iterations + 1 };
            if iterations > ctx.bound {
                return Err(Error::IterationGuard { used: iterations, bound: ctx.bound });
            }
            let extra_left = match task.extra_left {
                Some(e) => Some(e.saturating_sub(1)),
                None if stabilizes => Some(ctx.extra),
                None => None,
            };
            let child = Task {
                poly: if extra_left == Some(0) {
                    GridPoly { rows: Vec::new() }
                } else {
                    task.poly.transform(&nt, u, w, b, &a)
                },
                tower: std::mem::take(&mut nt),
                grid: new_grid,
                terms,
                gamma_total: exponent,
                r: root.multiplicity,
                first: false,
                iterations,
                extra_left,
            };
            if child.extra_left == Some(0) {
                finish(&child, false, ctx);
            } else {
                stack.push(child);
            }
        }
    }
    Ok(())
}

/// Puiseux expansions of all bounded roots of P at mu = 0, grouped into
/// branches (conjugacy classes).
pub fn expand_with(p: &BiPoly, opts: &ExpandOptions) -> Result<Vec<Branch>> {
    let d = p.deg_v().ok_or_else(|| Error::Degenerate("zero polynomial".into()))?;
    if d == 0 {
        return Err(Error::Degenerate("polynomial does not involve V".into()));
    }
    let dm = p.deg_mu().unwrap_or(0).max(1);
    let mut ctx = Ctx { bound: 4 * dm * d * d, extra: opts.max_extra_terms, filter: opts.center_filter.clone(), out: Vec::new() };
    let mut stack = vec![Task {
        tower: FieldTower::new(),
        poly: GridPoly::from_bipoly(p),
        grid: 1,
        terms: Vec::new(),
        gamma_total: Rational::zero(),
        r: d,
        first: true,
        iterations: 0,
        extra_left: None,
    }];
    while let Some(task) = stack.pop() {
        step(task, &mut ctx, &mut stack)?;
    }
    let mut keyed: Vec<(Vec<(f64, f64, f64)>, Branch)> = ctx
        .out
        .into_iter()
        .map(|b| {
            let (cr, ci) = b.center.approx();
            let mut key = vec![(cr, ci, b.ramification as f64)];
            for t in &b.expansion.terms {
                let (re, im) = t.coefficient.approx();
                key.push((t.exponent.to_f64().unwrap_or(0.0), re, im));
            }
            (key, b)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(keyed.into_iter().map(|(_, b)| b).collect())
}

/// [`expand_with`] using default options.
pub fn expand(p: &BiPoly) -> Result<Vec<Branch>> {
    expand_with(p, &ExpandOptions::default())
}
