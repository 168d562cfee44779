//! One PASS/FAIL line per acceptance criterion, with wall-clock limits.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhopath::algebraic::AlgebraicNumber;
use rhopath::arith::{int, rat, BiPoly, Rational};
use rhopath::curve::{aggregate_rho, normalize_curve};
use rhopath::puiseux::{expand, expand_with, expansion_residual, newton_polygon, Branch, ExpandOptions, Valuation};
use rhopath::sdo::{
    compute_rho_sdo, eliminate_coordinate, fit_order, trace_path, verify_reparametrization, ElimOptions, RhoOptions,
    SdoInstance, TraceOptions, VerifyOptions,
};
use rhopath::Error;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn poly(s: &str) -> BiPoly {
    s.parse().unwrap()
}

fn cli(args: &[&str]) -> String {
    let o = Command::new(env!("CARGO_BIN_EXE_rhopath")).args(args).output().expect("binary runs");
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn qs(bs: &[Branch]) -> Vec<u64> {
    let mut q: Vec<u64> = bs.iter().map(|b| b.ramification).collect();
    q.sort_unstable();
    q
}

fn is_rational(a: &AlgebraicNumber, r: Rational) -> bool {
    a.to_rational() == Some(r)
}

fn same(a: &AlgebraicNumber, b: &AlgebraicNumber) -> bool {
    a.equals(b).unwrap_or(false)
}

fn c1_cusp() -> Check {
    let bs = expand(&poly("Y^2 - X^3")).map_err(|e| e.to_string())?;
    ensure!(bs.len() == 1, "expected one branch, got {}", bs.len());
    let b = &bs[0];
    ensure!(b.center.is_zero().unwrap_or(false), "center is {}", b.center);
    ensure!(b.ramification == 2, "q = {}", b.ramification);
    ensure!(b.expansion.exact, "expansion is not exact");
    Ok(format!("one branch, center 0, q = 2, series {}", b.expansion.render("X")))
}

fn c2_nodal() -> Check {
    let bs = expand(&poly("Y^2 - X^3 - X^2")).map_err(|e| e.to_string())?;
    ensure!(qs(&bs) == [1, 1], "ramification {:?}", qs(&bs));
    let binom = [int(1), rat(1, 2), rat(-1, 8)];
    let mut signs = Vec::new();
    for b in &bs {
        let t = &b.expansion.terms;
        ensure!(t.len() >= 3, "only {} terms", t.len());
        let s = t[0].coefficient.to_rational().ok_or("leading coefficient is irrational")?;
        for (k, c) in binom.iter().enumerate() {
            ensure!(t[k].exponent == int(k as i64 + 1), "exponent {} at term {k}", t[k].exponent);
            ensure!(is_rational(&t[k].coefficient, c * &s), "coefficient {} at term {k}", t[k].coefficient);
        }
        signs.push(s);
    }
    signs.sort();
    ensure!(signs == [int(-1), int(1)], "first terms {:?}", signs);
    Ok("two q = 1 branches +-(X + X^2/2 - X^3/8)".into())
}

fn c3_example_curve() -> Check {
    let bs = expand(&poly("Y^5-4*Y^4+4*Y^3+2*X^2*Y^2-X*Y^2+2*X^2*Y+2*X*Y+X^4+X^3")).map_err(|e| e.to_string())?;
    let at0: Vec<Branch> = bs.iter().filter(|b| b.center.is_zero().unwrap_or(false)).cloned().collect();
    ensure!(at0.len() == 2, "{} branches at 0", at0.len());
    ensure!(qs(&at0) == [1, 2], "ramification {:?}", qs(&at0));
    Ok("two branches at 0 with q in {1, 2}".into())
}

fn c4_weierstrass() -> Check {
    let bs = expand(&poly("Y^5 - X^3*Y^3 - X^2*Y^2 + X^5")).map_err(|e| e.to_string())?;
    ensure!(qs(&bs) == [2, 3], "ramification {:?}", qs(&bs));
    for b in &bs {
        let lead = &b.expansion.terms[0];
        let want = if b.ramification == 3 { rat(2, 3) } else { rat(3, 2) };
        ensure!(lead.exponent == want, "q = {} leads with exponent {}", b.ramification, lead.exponent);
        ensure!(is_rational(&lead.coefficient, int(1)), "leading coefficient {}", lead.coefficient);
    }
    Ok("ramification {2, 3}, X^{2/3} and X^{3/2}".into())
}

fn c5_elliptope_curve() -> Check {
    let bs = expand(&poly("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2")).map_err(|e| e.to_string())?;
    let find = |c: i64| bs.iter().find(|b| is_rational(&b.center, int(c)));
    let minus = find(-1).ok_or("no branch at -1")?;
    let plus = find(1).ok_or("no branch at 1")?;
    ensure!(minus.ramification == 2 && plus.ramification == 1, "q = {}, {}", minus.ramification, plus.ramification);
    let s8 = AlgebraicNumber::sqrt(&int(8)).map_err(|e| e.to_string())?;
    let want = [
        AlgebraicNumber::from_rational(int(-1)),
        s8.scale(&rat(1, 8)),
        AlgebraicNumber::from_rational(rat(1, 32)),
        s8.scale(&rat(-11, 2048)),
    ];
    for (k, w) in want.iter().enumerate() {
        let c = &minus.expansion.terms[k].coefficient;
        ensure!(same(c, w), "coefficient {k} is {c}, want {w}");
    }
    let out = cli(&["rho-curve", "--poly", "2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2", "--limit", "-1"]);
    ensure!(out.lines().any(|l| l == "rho_i = 2"), "rho-curve printed:\n{out}");
    Ok("q = 2 at -1, q = 1 at 1, coefficients -1, sqrt8/8, 1/32, -11sqrt8/2048; rho-curve prints rho_i = 2".into())
}

fn c6_elliptope_sdo() -> Check {
    let inst = SdoInstance::elliptope();
    let tr = trace_path(&inst, &TraceOptions { mu_end: 1e-8, ..Default::default() }).map_err(|e| e.to_string())?;
    let x_star = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0];
    let x12 = tr.limit[1].value;
    ensure!((x12 + 1.0).abs() < 1e-5, "X12 limit {x12}");
    let worst = (0..9).map(|k| (tr.limit[k].value - x_star[k]).abs()).fold(0.0, f64::max);
    ensure!(worst < 1e-4, "X limit off by {worst:e}");
    let p = eliminate_coordinate(&inst, 1, Some(&tr), &ElimOptions::default()).map_err(|e| e.to_string())?;
    let cubic = poly("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    ensure!(p.pseudo_rem(&cubic).is_zero(), "eliminated P = {p} is not divisible by the cubic");
    let r = compute_rho_sdo(&inst, &RhoOptions::default()).map_err(|e| e.to_string())?;
    ensure!(r.rho == 2, "rho = {}", r.rho);
    Ok(format!("X12 -> {x12:.9}, max |X - X*| = {worst:.1e}, deg_V P = {}, rho = 2", p.deg_v().unwrap_or(0)))
}

fn c7_order_fits() -> Check {
    let ell = SdoInstance::elliptope();
    let tr = trace_path(&ell, &TraceOptions { mu_end: 1e-8, ..Default::default() }).map_err(|e| e.to_string())?;
    let f = fit_order(&tr, 1).map_err(|e| e.to_string())?;
    ensure!(f.snapped == rat(1, 2) && (f.raw - 0.5).abs() <= 0.05, "elliptope X12 fit {}", f.describe());
    let kl = SdoInstance::kl02(4);
    let opts = TraceOptions { mu_end: 1e-16, ..Default::default() };
    let tr = trace_path(&kl, &opts).map_err(|e| e.to_string())?;
    let y2 = kl.coordinate_index("y2").ok_or("no y2")?;
    let g = fit_order(&tr, y2).map_err(|e| e.to_string())?;
    ensure!(g.snapped == rat(1, 4) && (g.raw - 0.25).abs() <= 0.05, "Kl02 y2 fit {}", g.describe());
    let r = compute_rho_sdo(&kl, &RhoOptions { trace: opts, ..Default::default() }).map_err(|e| e.to_string())?;
    ensure!(r.rho == 4, "Kl02 rho = {}", r.rho);
    Ok(format!("X12 slope {:.4}, y2 slope {:.4}, Kl02 rho = 4 by order fit", f.raw, g.raw))
}

fn c8_verdicts() -> Check {
    let ell = SdoInstance::elliptope();
    let o = VerifyOptions::default();
    let r1 = verify_reparametrization(&ell, 1, (1e-4, 0.25), &o).map_err(|e| e.to_string())?;
    ensure!(!r1.bounded, "rho = 1 judged bounded");
    let x12 = r1.per_coordinate.iter().find(|c| c.name == "X12").ok_or("no X12")?;
    let g = x12.growth_exponent.ok_or("no growth exponent")?;
    ensure!((g + 0.5).abs() <= 0.1, "growth exponent {g}");
    let r2 = verify_reparametrization(&ell, 2, (1e-4, 0.25), &o).map_err(|e| e.to_string())?;
    ensure!(r2.bounded, "rho = 2 judged unbounded");
    let id = verify_reparametrization(&SdoInstance::identity(3), 1, (1e-4, 0.25), &o).map_err(|e| e.to_string())?;
    ensure!(id.bounded, "identity judged unbounded");
    for c in &id.per_coordinate {
        ensure!(c.d1.iter().all(|d| (d - c.d1[0]).abs() <= 1e-10), "identity {} derivative varies", c.name);
    }
    Ok(format!("rho = 1 unbounded (growth {g:.3}), rho = 2 bounded, identity derivative constant"))
}

fn random_bipoly(rng: &mut ChaCha8Rng) -> BiPoly {
    let n = rng.gen_range(2..8);
    let terms: Vec<(i64, usize, usize)> =
        (0..n).map(|_| (rng.gen_range(-10..=10), rng.gen_range(0..=8), rng.gen_range(0..=8))).collect();
    BiPoly::from_int_terms(&terms)
}

fn convex(p: &BiPoly) -> bool {
    let Ok(segs) = newton_polygon(p) else { return true };
    let mut by_x = segs.clone();
    by_x.sort_by_key(|s| s.left.0);
    segs.windows(2).all(|w| w[0].gamma < w[1].gamma)
        && by_x.windows(2).all(|w| {
            let (a, b, c) = (w[0].left, w[0].right, w[1].right);
            w[0].right == w[1].left
                && (b.0 as i64 - a.0 as i64) * (c.1 as i64 - a.1 as i64) - (b.1 as i64 - a.1 as i64) * (c.0 as i64 - a.0 as i64)
                    > 0
        })
}

fn c9_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let corpus: Vec<BiPoly> = (0..200).map(|_| random_bipoly(&mut rng)).collect();
    ensure!(corpus.iter().all(convex), "a Newton polygon is not convex");

    let opts = ExpandOptions { max_extra_terms: 0, ..Default::default() };
    let mut curves = 0;
    for p in corpus.iter().filter(|p| p.deg_v().unwrap_or(0) > 0) {
        let c = normalize_curve(p).map_err(|e| format!("{p}: {e}"))?;
        let bs = expand_with(&c.normalized, &opts).map_err(|e| format!("{p}: {e}"))?;
        let total: u64 = bs.iter().map(|b| b.conjugate_count).sum();
        ensure!(total == c.normalized.deg_v().unwrap_or(0) as u64, "{p}: conjugates sum to {total}");
        curves += 1;
    }

    let golden = [
        "Y^2 - X^3",
        "Y^2 - X^3 - X^2",
        "Y^5-4*Y^4+4*Y^3+2*X^2*Y^2-X*Y^2+2*X^2*Y+2*X*Y+X^4+X^3",
        "Y^5 - X^3*Y^3 - X^2*Y^2 + X^5",
        "2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2",
    ];
    for g in golden {
        let p = poly(g);
        let bs = expand_with(&p, &ExpandOptions { max_extra_terms: 5, ..Default::default() }).map_err(|e| e.to_string())?;
        for b in &bs {
            let mut last: Option<Rational> = None;
            for k in 1..=b.expansion.terms.len() {
                let mut e = b.expansion.clone();
                e.terms.truncate(k);
                match expansion_residual(&p, &e).map_err(|e| e.to_string())? {
                    Valuation::Finite(v) => {
                        ensure!(last.as_ref().map_or(true, |l| v > *l), "{g}: residual order stalls at {k} terms");
                        last = Some(v);
                    }
                    Valuation::Infinite => break,
                }
            }
        }
    }

    let mut samples = 0;
    for (inst, end) in [(SdoInstance::identity(3), 1e-8), (SdoInstance::elliptope(), 1e-8), (SdoInstance::kl02(4), 1e-16)] {
        let tr = trace_path(&inst, &TraceOptions { mu_end: end, ..Default::default() }).map_err(|e| e.to_string())?;
        let n = inst.n as f64;
        for s in &tr.samples {
            ensure!((s.duality_gap() - n * s.mu).abs() <= 1e-8 * n, "<X,S> = {} at mu = {}", s.duality_gap(), s.mu);
        }
        samples += tr.samples.len();
    }

    for _ in 0..200 {
        let mut v: Vec<u64> = (0..rng.gen_range(1..8)).map(|_| rng.gen_range(1..=12)).collect();
        let a = aggregate_rho(&v);
        v.shuffle(&mut rng);
        ensure!(aggregate_rho(&v) == a, "aggregate depends on order for {v:?}");
    }
    Ok(format!("200 polygons convex, {curves} conjugate sums, 5 golden residual chains, {samples} duality gaps, 200 permutations"))
}

fn c10_guard() -> Check {
    match expand(&poly("((1-mu)*V - mu)^2")) {
        Err(Error::IterationGuard { used, bound }) => {
            ensure!(bound == 4 * 2 * 2 * 2, "bound {bound}");
            Ok(format!("guard fired ({used} > {bound}); asymptotic complexity bounds are not measured at desk scale"))
        }
        other => Err(format!("expected the iteration guard, got {other:?}")),
    }
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Check); 10] = [
        (1, "cusp", 1, c1_cusp),
        (2, "nodal cubic", 1, c2_nodal),
        (3, "two branches at 0", 5, c3_example_curve),
        (4, "reducible Weierstrass polynomial", 5, c4_weierstrass),
        (5, "elliptope curve", 10, c5_elliptope_curve),
        (6, "elliptope SDO end to end", 60, c6_elliptope_sdo),
        (7, "order fits", 120, c7_order_fits),
        (8, "derivative verdicts", 30, c8_verdicts),
        (9, "property suites", 600, c9_properties),
        (10, "iteration guard", 5, c10_guard),
    ];
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        let r = match r {
            Ok(m) if dt > Duration::from_secs(limit) => Err(format!("{m}; took {:.2}s, limit {limit}s", dt.as_secs_f64())),
            other => other,
        };
        match r {
            Ok(m) => println!("PASS {n:>2} {name}: {m} ({:.2}s)", dt.as_secs_f64()),
            Err(m) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {m} ({:.2}s)", dt.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
