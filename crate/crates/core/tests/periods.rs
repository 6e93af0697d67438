use hyperschottky::algebra::ProjPoint;
use hyperschottky::num::{cabs_f64, rel_diff, Precision};
use hyperschottky::periods::*;
use hyperschottky::symcurve::BranchSet;
use hyperschottky::theta::{odd_characteristics, NullwerteTable};
use proptest::prelude::*;
use rug::{Complex, Float};

fn curve(roots: &[i64], inf: bool, digits: u32) -> BranchSet {
    let g = if inf { (roots.len() - 1) / 2 } else { (roots.len() - 2) / 2 };
    BranchSet::from_integers(g, roots, inf, Precision::digits(digits)).unwrap()
}

// i·AGM(√(e3−e1), √(e3−e2)) / AGM(√(e3−e1), √(e2−e1)) for y² = (x−e1)(x−e2)(x−e3)
fn agm_tau(e: [f64; 3], p: Precision) -> Complex {
    let f = |x: f64, y: f64| (Float::with_val(p.bits, x) - y).sqrt();
    let a = f(e[2], e[0]).agm(&f(e[2], e[1]));
    let b = f(e[2], e[0]).agm(&f(e[1], e[0]));
    Complex::with_val(p.bits, (0, a / b))
}

#[test]
fn elliptic_x3_minus_x() {
    let b = curve(&[-1, 0, 1], true, 50);
    let pd = period_matrix(&b).unwrap();
    let z = pd.z.entry(0, 0);
    assert!(z.real().to_f64().abs() < 1e-40);
    assert!((z.imag().to_f64() - 1.0).abs() < 1e-40);
    let exact = Complex::with_val(b.prec().bits, (0, 1));
    assert!(rel_diff(z, &exact, 1e-300) < 1e-40);
}

#[test]
fn genus2_riemann_relations() {
    let b = curve(&[0, 1, 2, 3, 4], true, 50);
    let pd = period_matrix(&b).unwrap();
    assert_eq!(pd.g, 2);
    assert!(pd.symmetry_defect < 1e-40, "{}", pd.symmetry_defect);
    assert!(pd.condition.is_finite());
    let b6 = curve(&[-3, -1, 0, 1, 2, 4], false, 30);
    let pd6 = period_matrix(&b6).unwrap();
    assert!(pd6.symmetry_defect < 1e-25);
}

#[test]
fn precision_doubling_is_stable() {
    let lo = period_matrix(&curve(&[0, 1, 2, 3, 4], true, 30)).unwrap();
    let hi = period_matrix(&curve(&[0, 1, 2, 3, 4], true, 60)).unwrap();
    for (a, b) in lo.z.entries().iter().zip(hi.z.entries()) {
        assert!(rel_diff(a, b, 1.0) < 1e-28);
    }
}

#[test]
fn genus2_dictionary() {
    let b = curve(&[0, 1, 2, 3, 4], true, 30);
    let pd = period_matrix(&b).unwrap();
    let d = characteristic_dictionary(&pd).unwrap();
    let ws: Vec<_> = (0..6).map(|i| d.w(i)).collect();
    for (a, w) in ws.iter().enumerate() {
        assert!(w.is_odd());
        assert!(ws[a + 1..].iter().all(|v| v != w));
    }
    let mut sorted = ws.clone();
    sorted.sort_by_key(|c| c.index());
    assert_eq!(sorted, odd_characteristics(2));
    let t = NullwerteTable::new(&pd.z, 1e-35).unwrap();
    for w in &ws {
        assert!(cabs_f64(t.value(w)) < 1e-8 * t.max_even());
    }
    // three-point images are the even characteristics
    for i in 0..6 {
        for j in i + 1..6 {
            for k in j + 1..6 {
                assert!(d.image(&[i, j, k]).is_even());
            }
        }
    }
}

#[test]
fn genus3_dictionary_and_additivity() {
    let b = curve(&[0, 1, 2, 3, 4, 5, 6], true, 30);
    let pd = period_matrix(&b).unwrap();
    let d = characteristic_dictionary(&pd).unwrap();
    let imgs = d.odd_images();
    assert_eq!(imgs.len(), 28);
    let mut cs: Vec<_> = imgs.iter().map(|(_, c)| *c).collect();
    assert!(cs.iter().all(|c| c.is_odd()));
    cs.sort_by_key(|c| c.index());
    cs.dedup();
    assert_eq!(cs.len(), 28);
    assert_eq!(d.additivity_failures(), 0);
    // the shift is the unique vanishing even Nullwert
    let t = NullwerteTable::new(&pd.z, 1e-35).unwrap();
    assert!(d.shift.is_even());
    assert!(cabs_f64(t.value(&d.shift)) < 1e-20 * t.max_even());
}

#[test]
fn even_degree_genus3() {
    let b = curve(&[-5, -2, -1, 0, 2, 3, 4, 7], false, 30);
    let pd = period_matrix(&b).unwrap();
    let d = characteristic_dictionary(&pd).unwrap();
    assert_eq!(d.additivity_failures(), 0);
}

#[test]
fn base_point_shift_leaves_dictionary() {
    let b = curve(&[0, 1, 2, 3, 4], true, 30);
    let pd = period_matrix(&b).unwrap();
    let c = pd.point_characteristics().unwrap();
    let d0 = CharacteristicDictionary::calibrate(2, c.clone()).unwrap();
    for base in 0..6 {
        let shifted: Vec<_> = c.iter().map(|x| x.add(&c[base])).collect();
        let d = CharacteristicDictionary::calibrate(2, shifted).unwrap();
        for i in 0..6 {
            assert_eq!(d.w(i), d0.w(i));
        }
    }
}

#[test]
fn input_order_is_respected() {
    let a = curve(&[0, 1, 2, 3, 4], true, 30);
    let b = curve(&[3, 0, 4, 2, 1], true, 30);
    let da = characteristic_dictionary(&period_matrix(&a).unwrap()).unwrap();
    let db = characteristic_dictionary(&period_matrix(&b).unwrap()).unwrap();
    let perm = [3, 0, 4, 2, 1, 5];
    for (k, &v) in perm.iter().enumerate() {
        let ia = if v == 5 { 5 } else { v as usize };
        assert_eq!(db.w(k), da.w(ia));
    }
}

#[test]
fn rejects_bad_input() {
    let p = Precision::digits(30);
    let pts = vec![
        ProjPoint::Finite(p.complex(0.0, 0.0)),
        ProjPoint::Finite(p.complex(1.0, 0.5)),
        ProjPoint::Finite(p.complex(2.0, 0.0)),
        ProjPoint::Infinity,
    ];
    let b = BranchSet::new(1, pts, p).unwrap();
    assert!(matches!(period_matrix(&b), Err(PeriodError::NonReal(1))));
    let pts = vec![
        ProjPoint::Finite(p.complex(0.0, 0.0)),
        ProjPoint::Finite(p.complex(1e-20, 0.0)),
        ProjPoint::Finite(p.complex(2.0, 0.0)),
        ProjPoint::Infinity,
    ];
    let b = BranchSet::new(1, pts, p).unwrap();
    assert!(matches!(period_matrix(&b), Err(PeriodError::Collision(..))));
}

#[test]
fn subsets_enumeration() {
    assert_eq!(k_subsets(4, 2).len(), 6);
    assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
    assert_eq!(k_subsets(3, 2)[0], vec![0, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn elliptic_agm_oracle(a in -5.0f64..5.0, d1 in 0.2f64..4.0, d2 in 0.2f64..4.0) {
        let p = Precision::digits(30);
        let e = [a, a + d1, a + d1 + d2];
        let pts = vec![
            ProjPoint::Finite(p.complex(e[2], 0.0)),
            ProjPoint::Finite(p.complex(e[0], 0.0)),
            ProjPoint::Infinity,
            ProjPoint::Finite(p.complex(e[1], 0.0)),
        ];
        let b = BranchSet::new(1, pts, p).unwrap();
        let pd = period_matrix(&b).unwrap();
        prop_assert!(rel_diff(pd.z.entry(0, 0), &agm_tau(e, p), 1e-300) < 1e-25);
        let d = characteristic_dictionary(&pd).unwrap();
        prop_assert!(d.shift.is_odd());
    }

    #[test]
    fn random_genus2_in_siegel_space(v in proptest::collection::vec(-10.0f64..10.0, 5)) {
        let mut r = v.clone();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assume!(r.windows(2).all(|w| w[1] - w[0] > 0.1));
        let p = Precision::digits(25);
        let mut pts: Vec<_> = v.iter().map(|&x| ProjPoint::Finite(p.complex(x, 0.0))).collect();
        pts.push(ProjPoint::Infinity);
        let b = BranchSet::new(2, pts, p).unwrap();
        let pd = period_matrix(&b).unwrap();
        prop_assert!(pd.symmetry_defect < 1e-20);
        let d = characteristic_dictionary(&pd).unwrap();
        for i in 0..6 {
            prop_assert!(d.w(i).is_odd());
        }
    }
}
