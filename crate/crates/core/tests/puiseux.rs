use proptest::prelude::*;
use rhopath::algebraic::*;
use rhopath::arith::*;
use rhopath::puiseux::*;
use rhopath::Error;

fn poly(s: &str) -> BiPoly {
    s.parse().unwrap()
}

fn sqrt(n: i64) -> AlgebraicNumber {
    AlgebraicNumber::sqrt(&int(n)).unwrap()
}

fn coeff_is(t: &PuiseuxTerm, want: &AlgebraicNumber) -> bool {
    t.coefficient.equals(want).unwrap()
}

fn exps(b: &Branch) -> Vec<Rational> {
    b.expansion.terms.iter().map(|t| t.exponent.clone()).collect()
}

fn qs(bs: &[Branch]) -> Vec<u64> {
    let mut q: Vec<u64> = bs.iter().map(|b| b.ramification).collect();
    q.sort();
    q
}

#[test]
fn cusp_polygon_and_branch() {
    let p = poly("Y^2 - X^3");
    let segs = newton_polygon(&p).unwrap();
    assert_eq!(segs.len(), 1);
    assert_eq!((segs[0].left, segs[0].right), ((0, 3), (2, 0)));
    assert_eq!(segs[0].gamma, rat(3, 2));
    let bs = expand(&p).unwrap();
    assert_eq!(bs.len(), 1);
    let b = &bs[0];
    assert_eq!(b.ramification, 2);
    assert_eq!(b.conjugate_count, 2);
    assert!(b.center.is_zero().unwrap());
    assert_eq!(exps(b), vec![rat(3, 2)]);
    assert_eq!(b.expansion.terms[0].coefficient.to_rational(), Some(int(1)));
    assert!(b.expansion.exact);
    assert_eq!(reconstruct_residual(&p, &bs).unwrap(), Valuation::Infinite);
}

#[test]
fn nodal_cubic_matches_binomial_series() {
    let p = poly("Y^2 - X^3 - X^2");
    let segs = newton_polygon(&p).unwrap();
    assert_eq!(segs.len(), 1);
    assert_eq!(segs[0].gamma, int(1));
    assert_eq!(segs[0].edge_polynomial, UniPoly::from_ints(&[-1, 0, 1]));
    let bs = expand(&p).unwrap();
    assert_eq!(qs(&bs), vec![1, 1]);
    // X*sqrt(1+X) = X + X^2/2 - X^3/8 + ...
    let binom = [int(1), rat(1, 2), rat(-1, 8)];
    for b in &bs {
        let sign = b.expansion.terms[0].coefficient.to_rational().unwrap();
        assert!(sign == int(1) || sign == int(-1));
        for (k, c) in binom.iter().enumerate() {
            let t = &b.expansion.terms[k];
            assert_eq!(t.exponent, int(k as i64 + 1));
            assert_eq!(t.coefficient.to_rational(), Some(c * &sign));
        }
    }
}

#[test]
fn two_branches_share_center_zero() {
    let p = poly("Y^5-4*Y^4+4*Y^3+2*X^2*Y^2-X*Y^2+2*X^2*Y+2*X*Y+X^4+X^3");
    let bs = expand(&p).unwrap();
    let at0: Vec<Branch> = bs.iter().filter(|b| b.center.is_zero().unwrap()).cloned().collect();
    assert_eq!(qs(&at0), vec![1, 2]);
    let total: u64 = bs.iter().map(|b| b.conjugate_count).sum();
    assert_eq!(total, 5);
}

#[test]
fn reducible_weierstrass_polynomial() {
    let p = poly("Y^5 - X^3*Y^3 - X^2*Y^2 + X^5");
    let bs = expand(&p).unwrap();
    assert_eq!(qs(&bs), vec![2, 3]);
    for b in &bs {
        let lead = &b.expansion.terms[0];
        match b.ramification {
            3 => assert_eq!(lead.exponent, rat(2, 3)),
            2 => assert_eq!(lead.exponent, rat(3, 2)),
            _ => unreachable!(),
        }
        assert_eq!(lead.coefficient.to_rational(), Some(int(1)));
    }
}

#[test]
fn elliptope_cubic_branches() {
    let p = poly("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    let bs = expand(&p).unwrap();
    assert_eq!(bs.len(), 2);
    let minus = bs.iter().find(|b| b.center.to_rational() == Some(int(-1))).unwrap();
    let plus = bs.iter().find(|b| b.center.to_rational() == Some(int(1))).unwrap();
    assert_eq!(minus.ramification, 2);
    assert_eq!(plus.ramification, 1);
    let t = &minus.expansion.terms;
    assert_eq!(exps(minus)[..4], [int(0), rat(1, 2), int(1), rat(3, 2)]);
    assert!(coeff_is(&t[0], &AlgebraicNumber::from_rational(int(-1))));
    assert!(coeff_is(&t[1], &sqrt(8).scale(&rat(1, 8))));
    assert!(coeff_is(&t[2], &AlgebraicNumber::from_rational(rat(1, 32))));
    assert!(coeff_is(&t[3], &sqrt(8).scale(&rat(-11, 2048))));
    let t = &plus.expansion.terms;
    assert_eq!(exps(plus)[..3], [int(0), int(1), int(2)]);
    assert_eq!(t[1].coefficient.to_rational(), Some(rat(3, 16)));
    assert_eq!(t[2].coefficient.to_rational(), Some(rat(3, 256)));
}

// Recentred at T = -1 by hand: F(mu, s - 1) = 2s^3 - (4 + mu/2)s^2 + mu/2.
#[test]
fn recentred_elliptope_polygon() {
    let g = poly("2*s^3 - (4 + mu/2)*s^2 + mu/2".replace('s', "V").as_str());
    let f = poly("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    let mut shifted = BiPoly::zero();
    let s_minus_1 = poly("V - 1");
    for c in f.coeffs().iter().rev() {
        shifted = &(&shifted * &s_minus_1) + &BiPoly::constant(c.clone());
    }
    assert_eq!(shifted, g);
    let segs = newton_polygon(&g).unwrap();
    assert_eq!(segs.len(), 2);
    assert_eq!((segs[0].left, segs[0].right), ((2, 0), (3, 0)));
    assert_eq!(segs[0].gamma, int(0));
    assert_eq!((segs[1].left, segs[1].right), ((0, 1), (2, 0)));
    assert_eq!(segs[1].gamma, rat(1, 2));
    assert_eq!(segs[1].edge_polynomial, UniPoly::new(vec![rat(1, 2), int(0), int(-4)]));
}

#[test]
fn residual_grows_with_truncation() {
    let p = poly("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    let bs = expand_with(&p, &ExpandOptions { max_extra_terms: 6, ..Default::default() }).unwrap();
    for b in &bs {
        let mut last = Rational::from_integer((-1).into());
        for k in 1..=b.expansion.terms.len() {
            let mut e = b.expansion.clone();
            e.terms.truncate(k);
            match expansion_residual(&p, &e).unwrap() {
                Valuation::Finite(v) => {
                    assert!(v > last, "residual order did not increase at k = {k}");
                    last = v;
                }
                Valuation::Infinite => break,
            }
        }
    }
    let minus = bs.iter().find(|b| b.ramification == 2).unwrap();
    let mut e = minus.expansion.clone();
    e.terms.truncate(4);
    // four terms leave a residual of order at least 2
    match expansion_residual(&p, &e).unwrap() {
        Valuation::Finite(v) => assert!(v >= int(2), "order {v}"),
        Valuation::Infinite => {}
    }
    assert!(expansion_residual(&p, &e).unwrap().exceeds(&rat(3, 2)));
}

#[test]
fn center_filter_keeps_matching_branches() {
    let p = poly("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    let opts = ExpandOptions { center_filter: Some(AlgebraicNumber::from_rational(int(1))), ..Default::default() };
    let bs = expand_with(&p, &opts).unwrap();
    assert_eq!(bs.len(), 1);
    assert_eq!(bs[0].ramification, 1);
}

#[test]
fn guard_fires_on_a_repeated_factor() {
    // V = mu/(1-mu) is a double root at every stage, so the working root never becomes simple
    let p = poly("((1-mu)*V - mu)^2");
    match expand(&p) {
        Err(Error::IterationGuard { used, bound }) => {
            assert_eq!(bound, 4 * 2 * 2 * 2);
            assert!(used > bound);
        }
        other => panic!("expected the iteration guard, got {other:?}"),
    }
}

#[test]
fn monomial_has_no_polygon() {
    assert!(matches!(newton_polygon(&poly("mu^2*V^3")), Err(Error::Degenerate(_))));
}

fn sparse_bipoly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((-10i64..=10, 0usize..=8, 0usize..=8), 2..12).prop_map(|ts| BiPoly::from_int_terms(&ts))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polygon_is_convex(p in sparse_bipoly()) {
        let Ok(segs) = newton_polygon(&p) else { return Ok(()) };
        let low = p.coeffs().iter().position(|c| !c.is_zero()).unwrap();
        let mut extent = 0;
        for w in segs.windows(2) {
            prop_assert!(w[0].gamma < w[1].gamma);
        }
        // walking left to right the slopes -gamma must increase
        let mut by_x = segs.clone();
        by_x.sort_by_key(|s| s.left.0);
        for w in by_x.windows(2) {
            prop_assert_eq!(w[0].right, w[1].left);
            let (a, b, c) = (w[0].left, w[0].right, w[1].right);
            let cross = (b.0 as i64 - a.0 as i64) * (c.1 as i64 - a.1 as i64)
                - (b.1 as i64 - a.1 as i64) * (c.0 as i64 - a.0 as i64);
            prop_assert!(cross > 0);
        }
        for s in &segs {
            prop_assert_eq!(s.edge_polynomial.degree(), Some(s.right.0 - s.left.0));
            extent += s.right.0 - s.left.0;
            // every support point lies on or above the line through the segment
            for (j, c) in p.coeffs().iter().enumerate() {
                if let Some(o) = c.order() {
                    let line = Rational::from_integer((s.left.1 as i64).into())
                        - &s.gamma * Rational::from_integer((j as i64 - s.left.0 as i64).into());
                    prop_assert!(Rational::from_integer((o as i64).into()) >= line);
                }
            }
        }
        prop_assert_eq!(extent, p.deg_v().unwrap() - low);
    }
}
