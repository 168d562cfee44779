use proptest::prelude::*;
use rhopath::arith::*;
use rhopath::curve::{normalize_curve, Method, Optimality};
use rhopath::sdo::*;
use rhopath::Error;

fn poly(s: &str) -> BiPoly {
    s.parse().unwrap()
}

fn cubic() -> BiPoly {
    poly("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2")
}

fn trace(inst: &SdoInstance, mu_end: f64) -> TraceResult {
    trace_path(inst, &TraceOptions { mu_end, ..Default::default() }).unwrap()
}

fn cholesky_ok(m: &[f64], n: usize) -> bool {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = m[i * n + j] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Real roots of f in [lo, hi] by scanning for sign changes, then bisecting.
fn bisect_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let steps = 4000;
    let mut out = Vec::new();
    for i in 0..steps {
        let (mut a, mut b) = (lo + (hi - lo) * i as f64 / steps as f64, lo + (hi - lo) * (i + 1) as f64 / steps as f64);
        if f(a) == 0.0 {
            out.push(a);
            continue;
        }
        if f(a).signum() == f(b).signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a).signum() == f(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

#[test]
fn identity_closed_form() {
    let inst = SdoInstance::identity(3);
    for mu in [1.0, 0.3, 1e-3, 1e-6] {
        let s = central_point(&inst, mu, DEFAULT_TOL).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s.x[i * 3 + j] - e).abs() < 1e-13);
                assert!((s.s[i * 3 + j] - e * mu).abs() < 1e-13 * (1.0 + mu));
            }
        }
        assert!((s.y[0] - (1.0 - mu)).abs() < 1e-13);
        assert!(s.residual <= DEFAULT_TOL);
    }
}

#[test]
fn elliptope_follows_the_cubic() {
    let inst = SdoInstance::elliptope();
    for mu in [0.5, 1e-2, 1e-4, 1e-7] {
        let s = central_point(&inst, mu, DEFAULT_TOL).unwrap();
        let t = s.x[1];
        // the cubic written out by hand
        let f = 2.0 * t.powi(3) + (2.0 - mu / 2.0) * t * t - (mu + 2.0) * t - 2.0;
        assert!(f.abs() < 1e-10, "mu = {mu}: residual {f}");
        assert!((cubic().eval_f64(mu, t) - f).abs() < 1e-12);
    }
}

#[test]
fn elliptope_at_mu_one_by_bisection() {
    let g = |t: f64| 2.0 * t.powi(3) + 1.5 * t * t - 3.0 * t - 2.0;
    let roots = bisect_roots(g, -3.0, 3.0);
    assert_eq!(roots.len(), 3);
    // a correlation matrix needs |X12| < 1
    let inside: Vec<f64> = roots.iter().copied().filter(|r| r.abs() < 1.0).collect();
    assert_eq!(inside.len(), 1);
    let s = central_point(&SdoInstance::elliptope(), 1.0, DEFAULT_TOL).unwrap();
    assert!((s.x[1] - inside[0]).abs() < 1e-12, "{} vs {}", s.x[1], inside[0]);
    assert!(cholesky_ok(&s.x, 3));
    assert!(cholesky_ok(&s.s, 3));
}

#[test]
fn limits() {
    let inst = SdoInstance::elliptope();
    let tr = trace(&inst, 1e-8);
    let want = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0];
    for k in 0..9 {
        assert!((tr.limit[k].value - want[k]).abs() < 1e-4, "X limit {k}: {}", tr.limit[k].value);
    }
    assert!((tr.limit[1].value + 1.0).abs() < 1e-5);
    assert!(tr.limit[1].contains(-1.0));
    for w in tr.samples.windows(2) {
        assert!(w[1].mu < w[0].mu);
    }

    let id = SdoInstance::identity(2);
    let tr = trace(&id, 1e-8);
    let exact = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    for (k, e) in exact.iter().enumerate() {
        assert!((tr.limit[k].value - e).abs() < 1e-12, "identity limit {k}: {}", tr.limit[k].value);
    }

    let kl = SdoInstance::kl02(4);
    let tr = trace(&kl, 1e-16);
    let y2 = kl.coordinate_index("y2").unwrap();
    assert!(tr.limit[y2].value.abs() < 1e-3);
    // sublinear: shrinking mu by 2^16 shrinks y2 only by about 2^4
    let n = tr.samples.len();
    let ratio = tr.samples[n - 17].coords()[y2] / tr.samples[n - 1].coords()[y2];
    assert!(ratio > 10.0 && ratio < 30.0, "ratio {ratio}");
}

#[test]
fn order_fits() {
    let inst = SdoInstance::elliptope();
    let tr = trace(&inst, 1e-8);
    let f = fit_order(&tr, 1).unwrap();
    assert_eq!(f.snapped, rat(1, 2));
    assert!((f.raw - 0.5).abs() < 0.05);
    assert!(matches!(fit_order(&tr, 0), Err(Error::ConstantCoordinate(0))));

    let id = SdoInstance::identity(3);
    let tr = trace(&id, 1e-8);
    let y = id.coordinate_index("y1").unwrap();
    assert_eq!(fit_order(&tr, y).unwrap().snapped, int(1));

    let kl = SdoInstance::kl02(4);
    let tr = trace(&kl, 1e-16);
    let f = fit_order(&tr, kl.coordinate_index("y2").unwrap()).unwrap();
    assert_eq!(f.snapped, rat(1, 4));
    assert!((f.raw - 0.25).abs() < 0.05);

    let short = finish_trace(trace(&id, 1e-2).samples.into_iter().take(4).collect());
    assert!(matches!(fit_order(&short, y), Err(Error::InsufficientSamples { needed: 6, have: 4 })));
}

#[test]
fn snapping() {
    assert_eq!(snap_exponent(0.5001), rat(1, 2));
    assert_eq!(snap_exponent(0.26), rat(1, 4));
    assert_eq!(snap_exponent(0.98), int(1));
    assert_eq!(snap_exponent(0.3333), rat(1, 3));
}

#[test]
fn aitken_on_a_geometric_sequence() {
    use twofloat::TwoFloat;
    let v: Vec<TwoFloat> = (0..10).map(|k| TwoFloat::from(3.0 + 0.5f64.powi(k))).collect();
    let l = aitken_limit(&v);
    assert!((l.value - 3.0).abs() < 1e-14);
    assert!(l.contains(3.0));
}

#[test]
fn elimination_identity() {
    let id = SdoInstance::identity(2);
    let tr = trace(&id, 1e-6);
    let x11 = eliminate_coordinate(&id, 0, Some(&tr), &ElimOptions::default()).unwrap();
    assert_eq!(normalize_curve(&x11).unwrap().normalized, poly("V - 1"));
    let s11 = id.coordinate_index("S11").unwrap();
    let p = eliminate_coordinate(&id, s11, Some(&tr), &ElimOptions::default()).unwrap();
    assert!(p.div_exact(&poly("V - mu")).is_some(), "{p}");
}

#[test]
fn elimination_elliptope_divisible_by_the_cubic() {
    let inst = SdoInstance::elliptope();
    let tr = trace(&inst, 1e-8);
    let p = eliminate_coordinate(&inst, 1, Some(&tr), &ElimOptions::default()).unwrap();
    assert!(p.pseudo_rem(&cubic()).is_zero(), "{p}");
    assert!(p.div_exact(&cubic()).is_some());
    assert!(path_residual(&p, &tr, 1) <= 1e-6);
}

#[test]
fn elimination_caps() {
    let inst = SdoInstance::elliptope();
    let tiny = ElimOptions { degree_cap: 1, ..Default::default() };
    assert!(matches!(eliminate_coordinate(&inst, 1, None, &tiny), Err(Error::EliminationBlowUp(_))));
    assert!(matches!(eliminate_coordinate(&inst, 99, None, &ElimOptions::default()), Err(Error::InvalidInstance(_))));
}

#[test]
fn rho_end_to_end() {
    let r = compute_rho_sdo(&SdoInstance::elliptope(), &RhoOptions::default()).unwrap();
    assert_eq!(r.rho, 2);
    assert_eq!(r.optimality_note, Optimality::IrreducibleCertified);
    for c in &r.per_coordinate {
        if c.method == Method::Curve {
            assert_eq!(c.fit_consistent, Some(true), "{}", c.name);
        }
    }

    let r = compute_rho_sdo(&SdoInstance::identity(3), &RhoOptions::default()).unwrap();
    assert_eq!(r.rho, 1);

    let mut o = RhoOptions::default();
    o.trace.mu_end = 1e-16;
    let r = compute_rho_sdo(&SdoInstance::kl02(4), &o).unwrap();
    assert_eq!(r.rho, 4);
    assert_eq!(r.optimality_note, Optimality::ProductFallback);
    assert!(r.per_coordinate.iter().any(|c| c.method == Method::OrderFit));
}

#[test]
fn rho_with_supplied_curve() {
    let inst = SdoInstance::elliptope();
    let tr = trace(&inst, 1e-8);
    let mut o = RhoOptions { max_elim_n: 0, ..Default::default() };
    o.curves.insert(1, cubic());
    let c = coordinate_rho(&inst, &tr, 1, &o).unwrap();
    assert_eq!((c.method, c.rho_i), (Method::Curve, 2));
    // a curve that misses the path is rejected and the fit takes over
    o.curves.insert(1, poly("V - 7"));
    let c = coordinate_rho(&inst, &tr, 1, &o).unwrap();
    assert_eq!((c.method, c.rho_i), (Method::OrderFit, 2));
}

#[test]
fn unique_coordinates_cover_the_triangles() {
    let inst = SdoInstance::elliptope();
    let names: Vec<String> = unique_coordinates(&inst).iter().map(|&k| inst.coordinate_name(k)).collect();
    assert_eq!(names, ["X11", "X12", "X13", "X22", "X23", "X33", "y1", "y2", "y3", "S11", "S12", "S13", "S22", "S23", "S33"]);
}

#[test]
fn reparametrization_verdicts() {
    let inst = SdoInstance::elliptope();
    let win = (1e-4, 0.25);
    let r1 = verify_reparametrization(&inst, 1, win, &VerifyOptions::default()).unwrap();
    assert!(!r1.bounded);
    let x12 = r1.per_coordinate.iter().find(|c| c.name == "X12").unwrap();
    assert!(!x12.bounded);
    assert!((x12.growth_exponent.unwrap() + 0.5).abs() < 0.1);
    assert!(verify_reparametrization(&inst, 2, win, &VerifyOptions::default()).unwrap().bounded);
    // mu = t^4 stays above 1e-8
    assert!(verify_reparametrization(&inst, 4, (1e-2, 0.5), &VerifyOptions::default()).unwrap().bounded);

    let id = SdoInstance::identity(3);
    let r = verify_reparametrization(&id, 1, win, &VerifyOptions::default()).unwrap();
    assert!(r.bounded);
    for c in &r.per_coordinate {
        let first = c.d1[0];
        assert!(c.d1.iter().all(|d| (d - first).abs() < 1e-10), "{}: {:?}", c.name, c.d1);
        assert!(c.d2.iter().all(|d| d.abs() < 1e-6));
    }

    assert!(matches!(
        verify_reparametrization(&id, 1, (0.1, 0.25), &VerifyOptions::default()),
        Err(Error::InsufficientSamples { .. })
    ));
}

#[test]
fn instance_text_format() {
    for inst in [SdoInstance::elliptope(), SdoInstance::kl02(4), SdoInstance::identity(2)] {
        let back: SdoInstance = inst.to_string().parse().unwrap();
        assert_eq!(back, inst);
    }
    let bad = |s: &str| matches!(s.parse::<SdoInstance>(), Err(Error::InvalidInstance(_)));
    assert!(bad("2 1\n1 2\n0 1\n2\n1 0 0 1"), "asymmetric A");
    assert!(bad("2 1\n1 0\n0 1\n2\n1 0 0"), "short C");
    assert!(bad("2 1\n1 0\n0 x\n2\n1 0 0 1"), "non-integer");
    assert!(bad("2 2\n1 0 0 1\n2 0 0 2\n1 2\n1 0 0 1"), "dependent constraints");
    assert!(bad("2 1\n1 0 0 1\n2\n1 0 0 1 5"), "trailing data");
    assert!(!bad("# comment\n2 1\n1 0 0 1 # A\n2\n1 0 0 1"));
}

#[test]
fn coordinate_names_round_trip() {
    let inst = SdoInstance::kl02(4);
    for k in 0..inst.dim() {
        assert_eq!(inst.coordinate_index(&inst.coordinate_name(k)), Some(k));
    }
    assert_eq!(inst.coordinate_index("y2"), Some(17));
    assert_eq!(inst.coordinate_index("s11"), Some(20));
}

#[test]
fn csv_header_and_rows() {
    let id = SdoInstance::identity(1);
    let tr = trace(&id, 0.1);
    let mut out = Vec::new();
    write_csv(&tr, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mu,coord_0,coord_1,coord_2,residual"));
    assert_eq!(lines.count(), tr.samples.len());
}

fn instance_strategy() -> impl Strategy<Value = SdoInstance> {
    prop_oneof![
        (1usize..=4).prop_map(SdoInstance::identity),
        Just(SdoInstance::elliptope()),
        (3usize..=4).prop_map(SdoInstance::kl02),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn duality_gap_is_n_mu(inst in instance_strategy(), ratio in 0.2f64..0.7, end_exp in 3i32..10) {
        let tr = trace_path(&inst, &TraceOptions { mu_end: 10f64.powi(-end_exp), grid_ratio: ratio, ..Default::default() }).unwrap();
        let n = inst.n as f64;
        for s in &tr.samples {
            prop_assert!((inner(&s.x, &s.s) - n * s.mu).abs() <= 1e-8 * n);
            prop_assert!((s.duality_gap() - n * s.mu).abs() <= 1e-8 * n);
            prop_assert!(s.residual <= DEFAULT_TOL);
            prop_assert!(cholesky_ok(&s.x, inst.n) && cholesky_ok(&s.s, inst.n));
        }
    }
}
