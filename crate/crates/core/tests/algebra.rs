use hyperschottky::algebra::*;
use hyperschottky::num::{cabs_f64, rel_diff, Precision};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Integer, Rational};

fn p50() -> Precision {
    Precision::digits(50)
}

fn cpoly(p: Precision, c: &[f64]) -> ComplexPolynomial {
    Poly::new(c.iter().map(|&v| p.complex(v, 0.0)).collect())
}

fn qpoly(c: &[i64]) -> RationalPolynomial {
    Poly::new(c.iter().map(|&v| Rational::from(v)).collect())
}

fn close(a: &Complex, re: f64, im: f64) -> bool {
    (a.real().to_f64() - re).abs() < 1e-40 && (a.imag().to_f64() - im).abs() < 1e-40
}

#[test]
fn roots_of_x2_plus_1() {
    let p = p50();
    let r = poly_roots(&cpoly(p, &[1.0, 0.0, 1.0]), 1e-40).unwrap();
    assert_eq!(r.len(), 2);
    assert!(close(&r[0], 0.0, -1.0));
    assert!(close(&r[1], 0.0, 1.0));
}

#[test]
fn roots_of_x5_minus_x() {
    let p = p50();
    let r = poly_roots(&cpoly(p, &[0.0, -1.0, 0.0, 0.0, 0.0, 1.0]), 1e-40).unwrap();
    let expect = [(-1.0, 0.0), (0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, 0.0)];
    for (z, (re, im)) in r.iter().zip(expect) {
        assert!(close(z, re, im), "{z}");
    }
}

#[test]
fn cubic_residuals() {
    for p in [Precision::binary64(), p50()] {
        let f = cpoly(p, &[2.0, -2.0, 0.0, 1.0]);
        let r = poly_roots(&f, 1e-12).unwrap();
        assert_eq!(r.len(), 3);
        for z in &r {
            assert!(cabs_f64(&f.eval(z)) < 1e-12);
        }
    }
}

#[test]
fn discriminants() {
    let p = p50();
    let d = poly_discriminant(&cpoly(p, &[-1.0, 0.0, 1.0])).unwrap();
    assert!(close(&d, 4.0, 0.0));
    assert_eq!(discriminant_exact(&qpoly(&[-1, 0, 1])).unwrap(), 4);
    // X³ − 2X + 2: −4·19 (independent oracle)
    assert_eq!(discriminant_exact(&qpoly(&[2, -2, 0, 1])).unwrap(), -76);
    assert!(discriminant_exact(&qpoly(&[1, 1])).is_err());
}

#[test]
fn degree7_example_discriminants() {
    let f = qpoly(&[0, 1832265664, 0, -3694084, 0, 961, 0, 1]);
    let thirty_one = Integer::from(Integer::from(31).pow(35u32));
    let plain = discriminant_exact(&f).unwrap();
    assert_eq!(plain, Rational::from(Integer::from(-(Integer::from(1) << 32u32)) * &thirty_one));
    let curve = curve_discriminant(&f).unwrap();
    assert_eq!(curve, Rational::from(Integer::from(-(Integer::from(1) << 44u32)) * &thirty_one));
}

#[test]
fn resultant_examples() {
    let one = Rational::from(1);
    let v = |c: &[i64]| qpoly(c);
    // p = u − v, q = u − 1
    let p = BiPoly::new(vec![v(&[0, -1]), v(&[1])]);
    let q = BiPoly::new(vec![v(&[-1]), v(&[1])]);
    let r = resultant_eliminate(&p, &q).unwrap();
    let m = r.scale(&(one.clone() / r.leading().clone()));
    assert_eq!(m.coeffs(), &[Rational::from(-1), one.clone()]);
    // p = u² − v, q = u − 2
    let p = BiPoly::new(vec![v(&[0, -1]), v(&[0]), v(&[1])]);
    let q = BiPoly::new(vec![v(&[-2]), v(&[1])]);
    let r = resultant_eliminate(&p, &q).unwrap();
    let m = r.scale(&(one.clone() / r.leading().clone()));
    assert_eq!(m.coeffs(), &[Rational::from(-4), one]);
    // constant in u on both sides
    let c = BiPoly::new(vec![v(&[1, 1])]);
    assert!(matches!(resultant_eliminate(&c, &c), Err(AlgebraError::ConstantInEliminated)));
}

#[test]
fn resultant_with_self_vanishes() {
    let f = qpoly(&[3, -1, 4, 1, -5]);
    assert_eq!(f.resultant(&f), 0);
}

#[test]
fn moebius_examples() {
    let p = p50();
    let c = |v: f64| p.complex(v, 0.0);
    let id = MoebiusMap::identity(&p.cone());
    match moebius_apply(&id, &ProjPoint::Finite(c(5.0))) {
        ProjPoint::Finite(z) => assert!(close(&z, 5.0, 0.0)),
        _ => panic!(),
    }
    let inv = MoebiusMap::new(c(0.0), c(1.0), c(1.0), c(0.0)).unwrap();
    match inv.apply(&ProjPoint::Infinity) {
        ProjPoint::Finite(z) => assert!(close(&z, 0.0, 0.0)),
        _ => panic!(),
    }
    let tr = MoebiusMap::new(c(1.0), c(1.0), c(0.0), c(1.0)).unwrap();
    assert!(tr.apply(&ProjPoint::Infinity).is_infinite());
    assert!(MoebiusMap::new(c(1.0), c(2.0), c(2.0), c(4.0)).is_err());
}

#[test]
fn exact_moebius_composition() {
    let q = |a: i64, b: i64| Rational::from((a, b));
    let g1 = MoebiusMap::new(q(2, 1), q(1, 3), q(-1, 1), q(5, 2)).unwrap();
    let g2 = MoebiusMap::new(q(0, 1), q(1, 1), q(1, 1), q(7, 4)).unwrap();
    for x in [ProjPoint::Finite(q(3, 5)), ProjPoint::Finite(q(-7, 4)), ProjPoint::Infinity] {
        let a = g1.compose(&g2).apply(&x);
        let b = g1.apply(&g2.apply(&x));
        match (a, b) {
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => assert_eq!(a, b),
            (ProjPoint::Infinity, ProjPoint::Infinity) => {}
            _ => panic!("composition mismatch"),
        }
    }
}

#[test]
fn gcd_squarefree_rational_roots() {
    // (X−1)²(X+2)(2X−3)
    let f = qpoly(&[1, -2, 1]).mul(&qpoly(&[2, 1])).mul(&qpoly(&[-3, 2]));
    let sf = f.squarefree();
    assert_eq!(sf.degree(), 3);
    let roots = f.rational_roots();
    assert_eq!(roots, vec![Rational::from(-2), Rational::from(1), Rational::from((3, 2))]);
    let g = f.gcd(&qpoly(&[-1, 1]).mul(&qpoly(&[5, 1])));
    assert_eq!(g.coeffs(), &[Rational::from(-1), Rational::from(1)]);
}

#[test]
fn factorization() {
    let n = Integer::from(Integer::from(2).pow(10u32)) * Integer::from(Integer::from(3).pow(4u32)) * Integer::from(1_000_003) * Integer::from(998_244_353);
    let f = factor_integer(&n);
    let expect: Vec<(Integer, u32)> = vec![
        (Integer::from(2), 10),
        (Integer::from(3), 4),
        (Integer::from(1_000_003), 1),
        (Integer::from(998_244_353), 1),
    ];
    assert_eq!(f, expect);
    assert!(factor_integer(&Integer::from(1)).is_empty());
    assert_eq!(valuation(&Rational::from((12, 7)), &Integer::from(2)), 2);
    assert_eq!(valuation(&Rational::from((12, 49)), &Integer::from(7)), -2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roots_rebuild_polynomial(c in proptest::collection::vec(-5i64..=5, 2..8)) {
        let mut c = c;
        *c.last_mut().unwrap() = 1;
        let p = Precision::digits(40);
        let f = cpoly(p, &c.iter().map(|&v| v as f64).collect::<Vec<_>>());
        let r = poly_roots(&f, 1e-30).unwrap();
        prop_assert_eq!(r.len(), f.degree());
        let g = Poly::from_roots(&p.cone(), &r);
        let scale = c.iter().map(|v| v.abs() as f64).fold(1.0, f64::max);
        for k in 0..=f.degree() {
            let d = cabs_f64(&Complex::with_val(p.bits, &f.coeff(k) - &g.coeff(k)));
            // repeated roots lose half the digits
            prop_assert!(d / scale < 1e-15, "k={} d={}", k, d);
        }
    }

    #[test]
    fn discriminant_two_paths(c in proptest::collection::vec(-6i64..=6, 3..7)) {
        let mut c = c;
        *c.last_mut().unwrap() = 1;
        let q = qpoly(&c);
        let exact = discriminant_exact(&q).unwrap();
        prop_assume!(exact != 0);
        let p = Precision::digits(40);
        let r = poly_roots(&q.to_complex(p), 1e-30).unwrap();
        let mut d = p.cone();
        for a in 0..r.len() {
            for b in a + 1..r.len() {
                let x = Complex::with_val(p.bits, &r[a] - &r[b]);
                d *= Complex::with_val(p.bits, x.square_ref());
            }
        }
        prop_assert!(rel_diff(&d, &p.from_rational(&exact), 1e-300) < 1e-8);
    }

    #[test]
    fn float_moebius_composition(v in proptest::collection::vec(-3.0f64..3.0, 10)) {
        let p = Precision::digits(30);
        let c = |k: usize| p.complex(v[k], 0.0);
        let g1 = MoebiusMap::new(c(0), c(1), c(2), c(3));
        let g2 = MoebiusMap::new(c(4), c(5), c(6), c(7));
        prop_assume!(g1.is_ok() && g2.is_ok());
        let (g1, g2) = (g1.unwrap(), g2.unwrap());
        let x = ProjPoint::Finite(p.complex(v[8], v[9]));
        match (g1.compose(&g2).apply(&x), g1.apply(&g2.apply(&x))) {
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => prop_assert!(rel_diff(&a, &b, 1.0) < 1e-20),
            (ProjPoint::Infinity, ProjPoint::Infinity) => {}
            _ => prop_assert!(false),
        }
    }
}
