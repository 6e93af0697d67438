use hyperschottky::algebra::{Poly, ProjPoint};
use hyperschottky::igusa::*;
use hyperschottky::mpoly::MPoly;
use hyperschottky::num::{cabs_f64, Precision};
use hyperschottky::symcurve::{symmetric_model, BranchSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn rand_q(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let n = rng.gen_range(-9i64..=9);
        if n != 0 {
            return q(n, rng.gen_range(1i64..=5));
        }
    }
}

/// A symmetric model with rational quartic roots r1, r2, r3, 1/(r1 r2 r3).
fn rational_model(rng: &mut ChaCha8Rng) -> (SymmetricCoefficients2<Rational>, [Rational; 4]) {
    loop {
        let (a, b, c) = (rand_q(rng), rand_q(rng), rand_q(rng));
        let d = Rational::from(1) / Rational::from(&a * &b) / &c;
        let r = [a, b, c, d];
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| r[i] != r[j]));
        if !distinct {
            continue;
        }
        let quartic = Poly::from_roots(&q(1, 1), &r);
        let k = quartic.coeffs();
        let g = SymmetricCoefficients2::new(k[3].clone(), k[2].clone(), k[1].clone());
        if g.is_nonsingular() {
            return (g, r);
        }
    }
}

fn roots_with_zero_and_infinity(r: &[Rational; 4]) -> Vec<ProjPoint<Rational>> {
    let mut v = vec![ProjPoint::Finite(q(0, 1)), ProjPoint::Infinity];
    v.extend(r.iter().cloned().map(ProjPoint::Finite));
    v
}

fn ints(v: [i64; 4]) -> IgusaClebsch<Rational> {
    IgusaClebsch::from_array(v.map(Rational::from))
}

#[test]
fn zero_model() {
    let g = SymmetricCoefficients2::new(q(0, 1), q(0, 1), q(0, 1));
    assert_eq!(igusa_from_symmetric(&g), ints([40, -80, -320, 256]));
}

#[test]
fn forward_is_symmetric_in_g1_g3() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (g, _) = rational_model(&mut rng);
        let h = SymmetricCoefficients2::new(rand_q(&mut rng), g.g2.clone(), rand_q(&mut rng));
        assert_eq!(igusa_from_symmetric(&h), igusa_from_symmetric(&h.swapped()));
    }
}

#[test]
fn forward_matches_root_oracle_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let (g, r) = rational_model(&mut rng);
        let oracle = igusa_from_roots_oracle(&roots_with_zero_and_infinity(&r), &q(1, 1));
        let fwd = igusa_from_symmetric(&g);
        assert_eq!(fwd, oracle);
    }
}

#[test]
fn oracle_from_branch_set() {
    let b = BranchSet::from_integers(2, &[0, 1, -1, 2, 3], true, Precision::digits(30)).unwrap();
    let exact = igusa_from_branch_set_exact(&b).unwrap();
    let num = igusa_from_branch_set(&b).unwrap();
    assert!(exact.to_complex(Precision::digits(30)).weighted_defect(&num) < 1e-25);
    assert!(igusa_from_branch_set(&BranchSet::from_integers(1, &[0, 1, 2], true, Precision::digits(20)).unwrap()).is_err());
}

#[test]
fn oracle_weighted_homogeneity_and_translation() {
    let roots: Vec<ProjPoint<Rational>> = [-3, -1, 0, 2, 5, 7].iter().map(|&x| ProjPoint::Finite(q(x, 1))).collect();
    let base = igusa_from_roots_oracle(&roots, &q(1, 1));
    let c = q(3, 2);
    let scaled: Vec<_> = [-3, -1, 0, 2, 5, 7].iter().map(|&x| ProjPoint::Finite(Rational::from(q(x, 1) * &c))).collect();
    let s = igusa_from_roots_oracle(&scaled, &q(1, 1));
    // every difference scales by c, every term carries three squared differences per weight unit
    let c3 = Rational::from(&c * &c) * &c;
    let c6 = Rational::from(&c3 * &c3);
    assert_eq!(s, base.rescale(&c6));
    let shifted: Vec<_> = [-3, -1, 0, 2, 5, 7].iter().map(|&x| ProjPoint::Finite(q(4 * x + 1, 4))).collect();
    assert_eq!(igusa_from_roots_oracle(&shifted, &q(1, 1)), base);
}

#[test]
fn s_system_reproduces_forward() {
    let vars = S_VARS;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let g = SymmetricCoefficients2::new(rand_q(&mut rng), rand_q(&mut rng), rand_q(&mut rng));
        let lam = rand_q(&mut rng);
        // target tuple chosen so that the scale is r = lam
        let t = igusa_from_symmetric(&g).rescale(&(Rational::from(1) / &lam));
        let s1 = Rational::from(&g.g1 + &g.g3);
        let s2 = Rational::from(&g.g1 * &g.g3);
        let vals = [g.g2.clone(), s1.clone(), s2, lam.clone(), t.i2.clone(), t.i4.clone(), t.i6.clone(), t.i10.clone()];
        for e in s_system() {
            assert_eq!(e.vars(), vars.map(String::from));
            assert_eq!(e.eval(&vals), q(0, 1));
        }
        if g.g2 != 0 {
            let rv = [g.g2.clone(), lam.clone(), t.i2.clone(), t.i4.clone(), t.i6.clone(), t.i10.clone()];
            let lhs = Rational::from(768 * Rational::from(&g.g2 * &s1) * &s1);
            assert_eq!(s1_squared_numerator().eval(&rv), lhs);
        }
        let u = Rational::from(&g.g2 * &g.g2);
        let rv = [u, lam.clone(), t.i2.clone(), t.i4.clone(), t.i6.clone(), t.i10.clone()];
        for p in g2r_pair() {
            assert_eq!(p.eval(&rv), q(0, 1));
        }
        let z = q(0, 1);
        let rv = [z, lam.clone(), t.i2.clone(), t.i4.clone(), t.i6.clone(), t.i10.clone()];
        assert_eq!(eq_r_polynomial().eval(&rv), q(0, 1));
    }
}

#[test]
fn eq_r_is_weighted_homogeneous() {
    assert!(eq_r_weight_violations().is_empty());
    let e = eq_r_polynomial();
    assert_eq!(e.degree_in(1), 15);
    // every power r^n present carries weight 2n + 10 in the invariants
    for (n, c) in e.coefficients_in(1).iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        assert_eq!(c.weighted_degrees(&[0, 0, 2, 4, 6, 10]), vec![2 * n as u32 + 10]);
    }
}

#[test]
fn eq_r_matches_runtime_resultant() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let t = IgusaClebsch::from_array(std::array::from_fn(|k| {
            let v = rng.gen_range(-60i64..=60);
            Rational::from(if k == 3 && v == 0 { 7 } else { v })
        }));
        let full = pair_resultant(&t).unwrap();
        assert_eq!(full.degree(), 24);
        let (stripped, residue) = stripped_resultant(&t).unwrap();
        assert_eq!(residue, 0.0);
        assert_eq!(stripped.degree(), 15);
        assert_eq!(proportionality_defect(&eq_r(&t), &stripped), 0.0);
    }
}

#[test]
fn zero_model_inverse() {
    let t = ints([40, -80, -320, 256]);
    assert!(eq_r(&t).eval(&q(1, 1)) == 0);
    let inv = symmetric_from_igusa(&t, 0.0).unwrap();
    assert!(inv.r_roots_g2_zero.contains(&q(1, 1)));
    let zero = SymmetricCoefficients2::new(q(0, 1), q(0, 1), q(0, 1));
    assert!(inv.candidates.iter().any(|c| c.g == zero));
    for c in &inv.candidates {
        assert!(igusa_from_symmetric(&c.g).weighted_eq(&t));
    }
}

#[test]
fn exact_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..6 {
        let (g, _) = rational_model(&mut rng);
        let t = igusa_from_symmetric(&g);
        let inv = symmetric_from_igusa(&t, 0.0).unwrap();
        assert_eq!(inv.elimination_defect, 0.0);
        assert_eq!(inv.transcription_defect, 0.0);
        assert!(inv.r_roots.contains(&q(1, 1)));
        assert!(inv.candidates.iter().any(|c| c.g == g || c.g == g.swapped()), "{g:?}");
        for c in &inv.candidates {
            let f = igusa_from_symmetric(&c.g);
            assert_eq!(f, t.rescale(&c.r));
        }
    }
}

#[test]
fn rescaled_target_gives_same_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let (g, _) = rational_model(&mut rng);
    let t = igusa_from_symmetric(&g);
    let a = symmetric_from_igusa(&t, 0.0).unwrap();
    let b = symmetric_from_igusa(&t.rescale(&q(-5, 3)), 0.0).unwrap();
    let key = |v: &IgusaInversion<Rational>| {
        let mut s: Vec<String> = v.candidates.iter().map(|c| format!("{:?}", c.g)).collect();
        s.sort();
        s
    };
    assert_eq!(key(&a), key(&b));
}

#[test]
fn rejects_zero_discriminant() {
    let t = ints([1, 2, 3, 0]);
    assert!(matches!(symmetric_from_igusa(&t, 0.0), Err(IgusaError::ZeroI10)));
}

#[test]
fn numeric_round_trip_from_periods_free_model() {
    // a symmetric model of y² = x(x−1)(x−2)(x−3)(x−4), with irrational G; the
    // extra involution x ↦ 4−x makes the solution double, so G is only good
    // to about half the working digits
    let p = Precision::digits(40);
    let b = BranchSet::from_integers(2, &[0, 1, 2, 3, 4], true, p).unwrap();
    let m = symmetric_model(&b, 0, 5, 1).unwrap();
    let g = SymmetricCoefficients2::from_model(&m).unwrap();
    let t = igusa_from_symmetric(&g);
    let oracle = igusa_from_branch_set(&b).unwrap();
    assert!(t.weighted_defect(&oracle) < 1e-30);
    let inv = symmetric_from_igusa(&t, 1e-20).unwrap();
    assert!(inv.transcription_defect < 1e-25, "{}", inv.transcription_defect);
    let close = |c: &SymmetricCoefficients2<Complex>, h: &SymmetricCoefficients2<Complex>| {
        [(&c.g1, &h.g1), (&c.g2, &h.g2), (&c.g3, &h.g3)]
            .iter()
            .all(|(a, b)| cabs_f64(&Complex::with_val(p.bits, *a - *b)) < 1e-15)
    };
    assert!(inv.candidates.iter().any(|c| close(&c.g, &g) || close(&c.g, &g.swapped())));
    for c in &inv.candidates {
        assert!(igusa_from_symmetric(&c.g).weighted_defect(&t) < 1e-20);
    }
}

#[test]
fn parser_round_trip() {
    let v = ["x", "y"];
    let a = MPoly::parse("(x + 2*y)^3 - x*(x^2 - -6*x*y)", &v).unwrap();
    let b = MPoly::parse("12*x*y^2 + 8*y^3", &v).unwrap();
    assert_eq!(a, b);
    assert!(MPoly::parse("x + z", &v).is_err());
    assert!(MPoly::parse("(x", &v).is_err());
    assert_eq!(MPoly::parse(&b.to_string(), &v).unwrap(), b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rescaling_is_weighted_equal(v in proptest::array::uniform4(-50i64..50), n in 1i64..9, d in 1i64..9) {
        prop_assume!(v[3] != 0);
        let t = ints(v);
        let s = t.rescale(&q(n, d));
        prop_assert!(t.weighted_eq(&s));
        prop_assert_eq!(t.absolute(), s.absolute());
        let bumped = IgusaClebsch::new(Rational::from(&s.i2 + 1), s.i4.clone(), s.i6.clone(), s.i10.clone());
        prop_assert!(!t.weighted_eq(&bumped) || t.i2 == Rational::from(&s.i2 + 1));
    }

    #[test]
    fn oracle_translation_invariance(xs in proptest::collection::btree_set(-20i64..20, 6), shift in -7i64..7) {
        let r: Vec<_> = xs.iter().map(|&x| ProjPoint::Finite(q(x, 1))).collect();
        let s: Vec<_> = xs.iter().map(|&x| ProjPoint::Finite(q(x + shift, 1))).collect();
        prop_assert_eq!(igusa_from_roots_oracle(&r, &q(1, 1)), igusa_from_roots_oracle(&s, &q(1, 1)));
    }
}
