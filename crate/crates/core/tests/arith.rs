use proptest::prelude::*;
use rhopath::arith::*;

fn p(s: &str) -> BiPoly {
    s.parse().unwrap()
}

// Laplace expansion of the Sylvester matrix, kept deliberately naive.
fn sylvester_det(a: &BiPoly, b: &BiPoly) -> UniPoly {
    let m = a.deg_v().unwrap();
    let n = b.deg_v().unwrap();
    let size = m + n;
    let mut mat = vec![vec![UniPoly::zero(); size]; size];
    for r in 0..n {
        for k in 0..=m {
            mat[r][r + k] = a.coeff(m - k);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            mat[n + r][r + k] = b.coeff(n - k);
        }
    }
    fn det(mat: &[Vec<UniPoly>]) -> UniPoly {
        if mat.len() == 1 {
            return mat[0][0].clone();
        }
        let mut acc = UniPoly::zero();
        for c in 0..mat.len() {
            if mat[0][c].is_zero() {
                continue;
            }
            let minor: Vec<Vec<UniPoly>> = mat[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| x.clone()).collect())
                .collect();
            let t = &mat[0][c] * &det(&minor);
            acc = if c % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        acc
    }
    det(&mat)
}

fn monic_at(b: &BiPoly, mu: &Rational) -> UniPoly {
    b.eval_mu(mu).monic()
}

#[test]
fn parse_and_display() {
    let f = p("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    assert_eq!(f.deg_v(), Some(3));
    assert_eq!(f.term(1, 2), rat(-1, 2));
    assert_eq!(f.term(0, 0), int(-2));
    let q = parse_bipoly("Y^2 - X^3").unwrap();
    assert_eq!(q.mu_name, "X");
    assert_eq!(q.v_name, "Y");
    assert_eq!(q.poly.display_with("X", "Y"), "Y^2 - X^3");
    assert!(parse_bipoly("V/mu").is_err());
    assert!(parse_bipoly("V^-1").is_err());
    assert!(parse_bipoly("Z + 1").is_err());
    assert!(parse_bipoly("(V + 1").is_err());
    assert!(parse_bipoly("V/0").is_err());
    assert!(parse_bipoly("").is_err());
}

#[test]
fn resultant_small_cases() {
    let r = resultant(&p("Y^2 - X"), &p("Y^2 + X"), Var::V).unwrap();
    assert_eq!(r, UniPoly::from_ints(&[0, 0, 4]));
    // Res_V(V - mu, V^2 + 1) = mu^2 + 1
    let r = resultant(&p("V - mu"), &p("V^2 + 1"), Var::V).unwrap();
    assert_eq!(r, UniPoly::from_ints(&[1, 0, 1]));
    let r = resultant(&p("V^2 - mu"), &p("V - 3"), Var::Mu).unwrap();
    assert_eq!(r, UniPoly::from_ints(&[-3, 1]));
    assert!(resultant(&p("mu + 1"), &p("mu"), Var::V).is_err());
}

#[test]
fn resultant_in_mu_matches_sylvester() {
    let a = p("V^2 - mu");
    let b = p("mu*V - 3 + mu^2");
    let r = resultant(&a, &b, Var::Mu).unwrap();
    assert_eq!(r, sylvester_det(&a.transpose(), &b.transpose()));
}

#[test]
fn gcd_examples() {
    let f = p("(V-1)^2*(V+1)^2");
    let g = poly_gcd(&f, &f.derivative_v(), Var::V);
    assert_eq!(g, p("V^2 - 1"));
    let g = poly_gcd(&p("(V - mu)*(V+2)"), &p("(V - mu)*(mu*V + 1)"), Var::V);
    assert_eq!(g, p("V - mu"));
    let g = poly_gcd(&p("V^2 + 1"), &p("V + mu"), Var::V);
    assert_eq!(g, p("1"));
    let g = poly_gcd(&p("(mu - V)*(mu + 1)"), &p("(mu - V)*(mu - 1)"), Var::Mu);
    assert_eq!(g, p("mu - V"));
}

#[test]
fn content_keeps_unit_content() {
    let f = p("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    let (c, q) = content_and_primitive(&f);
    assert_eq!(c, UniPoly::one());
    assert_eq!(q, f);
    let (c, q) = content_and_primitive(&p("(2*mu^2 + 2*mu)*V + 4*mu"));
    assert_eq!(c, UniPoly::from_ints(&[0, 1]));
    assert_eq!(q, p("(2*mu+2)*V + 4"));
}

#[test]
fn separable_part_examples() {
    assert_eq!(separable_part(&p("(V-mu)^2*(V+1)")), p("(V-mu)*(V+1)"));
    assert_eq!(separable_part(&p("-(V^2 - mu^3)")), p("V^2 - mu^3"));
    assert_eq!(separable_part(&p("mu*(V^3 - mu)^3")), p("V^3 - mu"));
    let f = p("2*T^3+(2-1/2*mu)*T^2-(mu+2)*T-2");
    assert_eq!(separable_part(&f), f);
}

fn arb_bipoly(max_deg: usize, height: i64) -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((-height..=height, 0..=max_deg, 0..=max_deg), 1..8)
        .prop_map(|t| BiPoly::from_int_terms(&t.into_iter().map(|(c, i, j)| (c, i, j)).collect::<Vec<_>>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resultant_matches_sylvester(a in arb_bipoly(3, 5), b in arb_bipoly(3, 5)) {
        prop_assume!(a.deg_v().unwrap_or(0) >= 1 && b.deg_v().unwrap_or(0) >= 1);
        let r = resultant(&a, &b, Var::V).unwrap();
        prop_assert_eq!(r, sylvester_det(&a, &b));
    }

    #[test]
    fn gcd_agrees_with_specializations(
        a in arb_bipoly(3, 5), b in arb_bipoly(3, 5), c in arb_bipoly(2, 4)
    ) {
        prop_assume!(!c.is_zero() && !a.is_zero() && !b.is_zero());
        let (pa, pb) = (&a * &c, &b * &c);
        let g = poly_gcd(&pa, &pb, Var::V);
        // c divides the gcd over Q(mu)
        if c.deg_v().unwrap() > 0 {
            prop_assert!(g.deg_v().unwrap() >= c.deg_v().unwrap());
        }
        prop_assert!(pa.div_exact(&g).is_some());
        prop_assert!(pb.div_exact(&g).is_some());
        // at generic points the specialized gcd is the gcd of the specializations
        let mut agree = 0;
        for k in [3i64, 7, 11, 13, 17, 19] {
            let mu = rat(k, 5);
            let sa = pa.eval_mu(&mu);
            let sb = pb.eval_mu(&mu);
            if sa.degree() != pa.deg_v() || sb.degree() != pb.deg_v() {
                continue;
            }
            if sa.gcd(&sb) == monic_at(&g, &mu) {
                agree += 1;
            }
        }
        prop_assert!(agree >= 3);
    }

    #[test]
    fn separable_part_is_squarefree_and_divides(a in arb_bipoly(3, 5), e in 1u32..3) {
        prop_assume!(a.deg_v().unwrap_or(0) >= 1);
        let mut f = BiPoly::constant(UniPoly::one());
        for _ in 0..e { f = &f * &a; }
        let s = separable_part(&f);
        prop_assert_eq!(poly_gcd(&s, &s.derivative_v(), Var::V).deg_v(), Some(0));
        prop_assert!(content_and_primitive(&f).1.div_exact(&s).is_some());
    }

    #[test]
    fn display_roundtrip(a in arb_bipoly(4, 9)) {
        let back: BiPoly = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn pseudo_remainder_identity() {
    let a = p("mu*V^3 + V - 2");
    let b = p("(mu+1)*V^2 - mu");
    let r = a.pseudo_rem(&b);
    assert!(r.deg_v().unwrap() < 2);
    // lc^2 * a - r is divisible by b
    let lhs = &a.mul_uni(&b.leading().unwrap().pow(2)) - &r;
    assert!(lhs.div_exact(&b).is_some());
}
