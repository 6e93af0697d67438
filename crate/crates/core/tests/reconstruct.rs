use hyperschottky::num::{cabs_f64, cpow, rel_diff, Precision};
use hyperschottky::periods::{characteristic_dictionary, period_matrix, CharacteristicDictionary, PeriodData};
use hyperschottky::reconstruct::*;
use hyperschottky::symcurve::{mu_invariant, mu_multiset, multiset_distance, BranchSet};
use hyperschottky::theta::{odd_characteristics, Characteristic, NullwerteTable, RiemannMatrix};
use rug::Complex;

struct Curve {
    b: BranchSet,
    pd: PeriodData,
    d: CharacteristicDictionary,
    t: NullwerteTable,
}

fn curve(roots: &[i64], inf: bool, digits: u32) -> Curve {
    let g = if inf { (roots.len() - 1) / 2 } else { (roots.len() - 2) / 2 };
    let p = Precision::digits(digits);
    let b = BranchSet::from_integers(g, roots, inf, p).unwrap();
    let pd = period_matrix(&b).unwrap();
    let d = characteristic_dictionary(&pd).unwrap();
    let t = NullwerteTable::new(&pd.z, p.epsilon()).unwrap();
    Curve { b, pd, d, t }
}

fn quintic() -> Curve {
    curve(&[0, 1, 2, 3, 4], true, 30)
}

fn septic() -> Curve {
    curve(&[0, 1, 2, 3, 4, 5, 6], true, 30)
}

fn ch(top: &[u8], bottom: &[u8]) -> Characteristic {
    Characteristic::from_bits(top, bottom)
}

#[test]
fn genus1_period_basis() {
    let p = Precision::digits(30);
    let z = RiemannMatrix::from_f64(1, &[0.0], &[1.0], p).unwrap();
    let t = NullwerteTable::new(&z, 1e-32).unwrap();
    let w = ch(&[1], &[1]);
    let w0 = ch(&[0], &[0]);
    let b = algebraic_period_basis(&t, &[w], Some(w0)).unwrap();
    let expect = Complex::with_val(p.bits, &t.gradient(&w).unwrap()[0] / Complex::with_val(p.bits, p.two_pi_i() * t.value(&w0)));
    assert!(rel_diff(b.omega1.get(0, 0), &expect, 1e-300) < 1e-28);
    assert!(matches!(algebraic_period_basis(&t, &[w0], None), Err(ReconstructError::Parity(_))));
    assert!(matches!(algebraic_period_basis(&t, &[w], Some(w)), Err(ReconstructError::Parity(_))));
}

#[test]
fn w0_is_a_global_scalar() {
    let c = quintic();
    let odd = odd_characteristics(2);
    let evens: Vec<_> = hyperschottky::theta::even_characteristics(2);
    let a = algebraic_period_basis(&c.t, &odd[..2], Some(evens[0])).unwrap();
    let b = algebraic_period_basis(&c.t, &odd[..2], Some(evens[1])).unwrap();
    let ratio = Complex::with_val(c.t.prec().bits, c.t.value(&evens[1]) / c.t.value(&evens[0]));
    for k in 0..4 {
        let r = Complex::with_val(c.t.prec().bits, a.omega1.data[k].clone() / &b.omega1.data[k]);
        assert!(rel_diff(&r, &ratio, 1e-300) < 1e-20);
    }
    // the vanishing even Nullwert of a genus-3 curve is rejected as w₀
    let s = septic();
    let basis = [s.d.w2(1, 2), s.d.w2(0, 2), s.d.w2(0, 1)];
    assert!(algebraic_period_basis(&s.t, &basis, None).is_ok());
    let bad = algebraic_period_basis(&s.t, &basis, Some(s.d.shift));
    assert!(matches!(bad, Err(ReconstructError::VanishingTheta(_))));
    // w_{18}, w_{28}, w_{38} span only a plane: singular J
    let singular: Vec<_> = (0..3).map(|k| s.d.w2(k, 7)).collect();
    let bad = algebraic_period_basis(&s.t, &singular, None);
    assert!(matches!(bad, Err(ReconstructError::VanishingNullwert(_))));
}

#[test]
fn hyperplane_point_is_independent_of_w0() {
    let c = quintic();
    let odd = odd_characteristics(2);
    let (w1, w2, w) = (odd[0], odd[1], odd[3]);
    let p = c.t.prec();
    let expect = Complex::with_val(p.bits, c.t.jacobian(&[w1, w]) / c.t.jacobian(&[w2, w]));
    for w0 in hyperschottky::theta::even_characteristics(2) {
        let basis = match algebraic_period_basis(&c.t, &[w1, w2], Some(w0)) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let inv = basis.omega1.inverse().unwrap();
        let a = inv.left_mul_vec(c.t.gradient(&w).unwrap());
        // the point (X₁ : X₂) with a₁X₁ + a₂X₂ = 0
        let x = -Complex::with_val(p.bits, &a[1] / &a[0]);
        assert!(rel_diff(&x, &expect, 1e-300) < 1e-20);
    }
}

#[test]
fn canonical_image_and_prop_mus() {
    for c in [quintic(), septic()] {
        let g = c.pd.g;
        let n = 2 * g + 2;
        let dset: Vec<usize> = (0..g).collect();
        let w = |i: usize| c.d.image(&dset.iter().cloned().filter(|&x| x != i).collect::<Vec<_>>());
        // w'_i = Π(D_i + W_x − W_0), i = 1..g−1
        let aux = |x: usize| -> Vec<Characteristic> {
            (1..g)
                .map(|i| {
                    let mut s: Vec<usize> = dset.iter().cloned().filter(|&y| y != i && y != 0).collect();
                    s.push(x);
                    c.d.image(&s)
                })
                .collect()
        };
        let basis: Vec<Characteristic> = (0..g).map(w).collect();
        for (r, s) in [(g, g + 1), (g + 1, n - 1)] {
            let u = canonical_weierstrass_image(&c.t, &basis, &aux(r)).unwrap();
            let v = canonical_weierstrass_image(&c.t, &basis, &aux(s)).unwrap();
            assert!(u.iter().map(cabs_f64).fold(0.0, f64::max) > 0.999);
            for m in 0..g {
                for nn in 0..g {
                    if m == nn {
                        continue;
                    }
                    let p = c.t.prec();
                    let q = Complex::with_val(p.bits, &u[m] * &v[nn]) / Complex::with_val(p.bits, &u[nn] * &v[m]);
                    let mu = mu_invariant(&c.b, m, nn, s, r).unwrap();
                    assert!(rel_diff(&q, &mu, 1e-300) < 1e-15, "g={g} m={m} n={nn}");
                }
            }
        }
        assert!(canonical_weierstrass_image(&c.t, &basis, &aux(g)[..g - 2]).is_err() || g == 1);
    }
}

#[test]
fn genus2_round_trip_quintic() {
    let c = quintic();
    let rec = genus2_symmetric_from_z(&c.pd.z, 1e-32).unwrap();
    rec.model.check(1e-20).unwrap();
    let mb = rec.model.branch_set().unwrap();
    assert!(multiset_distance(&mu_multiset(&c.b), &mu_multiset(&mb)) < 1e-20);
    // ℓ for j = 1 is 0 ([w₁,w₁] = 0) and for j = 2 the denominator vanishes
    let odd = odd_characteristics(2);
    assert!(cabs_f64(&c.t.jacobian(&[odd[0], odd[0]])) == 0.0);
    assert!(cabs_f64(&c.t.jacobian(&[odd[1], odd[1]])) == 0.0);
}

#[test]
fn genus2_discriminant_paths() {
    let c = quintic();
    let odd = odd_characteristics(2);
    let rec = genus2_from_table(&c.t, odd[0], odd[1]).unwrap();
    assert!(rel_diff(&rec.discriminant, &rec.model.discriminant(), 1e-300) < 1e-20);
    let swapped = genus2_from_table(&c.t, odd[1], odd[0]).unwrap();
    assert!(rel_diff(&rec.discriminant, &swapped.discriminant, 1e-300) < 1e-20);
    // ∏_{i≥3}[w₁,w_i] = ±∏_{i≥3}[w₂,w_i]
    let p = c.t.prec();
    let (mut a, mut b) = (p.cone(), p.cone());
    for w in &rec.labels[2..] {
        a *= c.t.jacobian(&[rec.labels[0], *w]);
        b *= c.t.jacobian(&[rec.labels[1], *w]);
    }
    let q = Complex::with_val(p.bits, &a / &b);
    assert!(rel_diff(&cpow(&q, 2), &p.cone(), 1.0) < 1e-20);
}

#[test]
fn genus2_choice_invariance() {
    let c = curve(&[-3, -1, 0, 1, 2, 4], false, 30);
    let odd = odd_characteristics(2);
    let reference = mu_multiset(&c.b);
    for i in 0..6 {
        for j in 0..6 {
            if i == j {
                continue;
            }
            let rec = genus2_from_table(&c.t, odd[i], odd[j]).unwrap();
            let mb = rec.model.branch_set().unwrap();
            assert!(multiset_distance(&reference, &mu_multiset(&mb)) < 1e-18);
        }
    }
}

#[test]
fn genus2_thetanullwerte_route() {
    let c = quintic();
    let odd = odd_characteristics(2);
    let rec = genus2_from_table(&c.t, odd[0], odd[1]).unwrap();
    let th = genus2_roots_from_thetanullwerte(&c.t, &rec.labels).unwrap();
    assert!(th.magnitude_defect < 1e-20);
    assert_eq!(th.touched.len(), 6);
    assert_eq!(th.reads, 24);
    // six of the ten even Nullwerte: a 40% saving
    assert!((1.0 - th.touched.len() as f64 / 10.0 - 0.4).abs() < 1e-12);
    for (a, b) in th.roots.iter().zip(&rec.roots) {
        assert!(rel_diff(a, b, 1e-300) < 1e-20);
    }
}

#[test]
fn genus3_labeling_structure() {
    let c = septic();
    let l = genus3_label(&c.t, VANISHING_THRESHOLD).unwrap();
    assert_eq!(l.companions, 5);
    assert_eq!(l.delta, c.d.shift);
    let mut all = l.all();
    assert!(all.iter().all(|w| w.is_odd()));
    all.sort_by_key(|w| w.index());
    all.dedup();
    assert_eq!(all.len(), 28);
    for j in 1..8 {
        for k in 1..8 {
            if j != k {
                assert!(l.twisted_add(&l.w(0, j), &l.w(0, k)).is_odd());
                assert_eq!(l.twisted_add(&l.w(0, j), &l.w(0, k)), l.w(j, k));
            }
        }
    }
    for a in 0..8 {
        for b in a + 1..8 {
            for cc in b + 1..8 {
                for d in cc + 1..8 {
                    assert!(l.four(a, b, cc, d).is_even());
                }
            }
        }
    }
}

#[test]
fn genus3_mu_matches_cross_ratios() {
    for c in [septic(), curve(&[-5, -2, -1, 0, 2, 3, 4, 7], false, 30)] {
        let l = Genus3Labeling::from_dictionary(&c.d);
        for (m, n, r, s) in [(0, 1, 2, 3), (0, 1, 4, 7), (2, 5, 1, 6), (7, 3, 0, 4)] {
            let free: Vec<usize> = (0..8).filter(|k| ![m, n, r, s].contains(k)).collect();
            let a = genus3_mu(&l, &c.t, m, n, r, s, free[0]).unwrap();
            let b = genus3_mu(&l, &c.t, m, n, r, s, free[1]).unwrap();
            assert!(rel_diff(&a, &b, 1e-300) < 1e-18);
            let mu = mu_invariant(&c.b, m, n, r, s).unwrap();
            assert!(rel_diff(&a, &mu, 1e-300) < 1e-18);
            // reciprocity relations of the μ-invariants
            let swapped = genus3_mu(&l, &c.t, n, m, s, r, free[0]).unwrap();
            assert!(rel_diff(&a, &swapped, 1e-300) < 1e-18);
            let inv = genus3_mu(&l, &c.t, m, n, s, r, free[0]).unwrap();
            let prod = Complex::with_val(c.t.prec().bits, &a * &inv);
            assert!(rel_diff(&prod, &c.t.prec().cone(), 1.0) < 1e-18);
        }
    }
}

#[test]
fn genus3_auxiliary_index_identity() {
    // [w15,w45,w24][w25,w35,w23] / ([w15,w35,w23][w25,w45,w24]) is the same with 5 → 6
    let c = septic();
    let l = genus3_label(&c.t, VANISHING_THRESHOLD).unwrap();
    let j = |a: (usize, usize), b: (usize, usize), d: (usize, usize)| {
        c.t.jacobian(&[l.w(a.0 - 1, a.1 - 1), l.w(b.0 - 1, b.1 - 1), l.w(d.0 - 1, d.1 - 1)])
    };
    let side = |t: usize| {
        let num = Complex::with_val(c.t.prec().bits, j((1, t), (4, t), (2, 4)) * j((2, t), (3, t), (2, 3)));
        let den = Complex::with_val(c.t.prec().bits, j((1, t), (3, t), (2, 3)) * j((2, t), (4, t), (2, 4)));
        num / den
    };
    assert!(rel_diff(&side(5), &side(6), 1e-300) < 1e-18);
}

#[test]
fn genus3_round_trip() {
    for c in [septic(), curve(&[-5, -2, -1, 0, 2, 3, 4, 7], false, 30)] {
        let rec = genus3_symmetric_from_z(&c.pd.z, 1e-32, 1e-15).unwrap();
        assert!(rec.aux_defect < 1e-18);
        rec.model.check(1e-18).unwrap();
        let mb = rec.model.branch_set().unwrap();
        assert!(multiset_distance(&mu_multiset(&c.b), &mu_multiset(&mb)) < 1e-15);
    }
}

#[test]
fn genus3_frobenius_route_for_l123() {
    let c = septic();
    let rec = genus3_from_table(&c.t, VANISHING_THRESHOLD, 1e-15).unwrap();
    let (v, touched) = genus3_l123_cubed_from_thetanullwerte(&rec.labeling, &c.t);
    assert_eq!(touched.len(), 12);
    let p = c.t.prec();
    let lhs = cpow(&rec.roots[0], 12);
    let rhs = cpow(&v, 4);
    assert!(rel_diff(&lhs, &rhs, 1e-300) < 1e-15);
    let _ = p;
}

#[test]
fn random_genus3_is_not_hyperelliptic() {
    let p = Precision::digits(20);
    let re = [0.1, 0.3, -0.2, 0.3, 0.05, 0.1, -0.2, 0.1, 0.4];
    let im = [1.2, 0.3, 0.1, 0.3, 1.1, 0.2, 0.1, 0.2, 1.3];
    let z = RiemannMatrix::from_f64(3, &re, &im, p).unwrap();
    assert!(matches!(
        genus3_symmetric_from_z(&z, 1e-22, 1e-10),
        Err(ReconstructError::NotHyperelliptic { vanishing: 0 })
    ));
    // block-diagonal Z: several vanishing evens
    let z1 = RiemannMatrix::from_f64(1, &[0.0], &[1.0], p).unwrap();
    let z2 = RiemannMatrix::from_f64(2, &[0.0, 0.2, 0.2, 0.0], &[1.0, 0.3, 0.3, 1.4], p).unwrap();
    let zb = z1.block_diag(&z2).unwrap();
    assert!(matches!(genus3_symmetric_from_z(&zb, 1e-22, 1e-10), Err(ReconstructError::NotHyperelliptic { .. })));
    assert!(matches!(genus2_symmetric_from_z(&z, 1e-22), Err(ReconstructError::Genus { .. })));
}
