//! Symmetric models of hyperelliptic curves from a bare normalized period
//! matrix Z, through Jacobian Nullwerte.
//!
//! Genus 2: with the six odd characteristics w₁,…,w₆ (any order),
//! ℓ_{12j} = [w₁,w_j]/[w₂,w_j] are symmetric roots for j = 3..6.
//!
//! Genus 3: the 28 odd characteristics are the images w_{rs} of W_r + W_s.
//! They are labelled from Z alone, the μ-invariants μ_{12rs} are read off
//! triple Jacobian Nullwerte, and the roots follow from
//! ℓ_{123}⁶ = ∏_k μ_{123k}, ℓ_{12k} = ℓ_{123}/μ_{123k}.
//!
//! Labels are 0-based in code: "w_{12}" is `w(0, 1)`.

use std::collections::BTreeSet;

use rug::Complex;
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::periods::CharacteristicDictionary;
use crate::num::{cabs_f64, cpow, croot, rel_diff};
use crate::symcurve::{SymError, SymmetricModel};
use crate::theta::{even_characteristics, odd_characteristics, Characteristic, NullwerteTable, RiemannMatrix, ThetaError};

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("genus {got} not supported here (expected {expected})")]
    Genus { expected: usize, got: usize },
    #[error("characteristic {0} has the wrong parity")]
    Parity(Characteristic),
    #[error("theta[{0}](0) vanishes")]
    VanishingTheta(Characteristic),
    #[error("Jacobian Nullwert vanishes: {0}")]
    VanishingNullwert(String),
    #[error("all canonical coordinates vanish")]
    DegenerateImage,
    #[error("not hyperelliptic: {vanishing} vanishing even Nullwerte (expected 1)")]
    NotHyperelliptic { vanishing: usize },
    #[error("no odd pair with odd sum")]
    NoPair,
    #[error("found {0} companions, expected 5")]
    Companions(usize),
    #[error("mu depends on the auxiliary index (defect {0:e})")]
    AuxiliaryMismatch(f64),
}

/// Ω₁(w₁,…,w_g; w₀; Z) = J[w₁,…,w_g] / (2πi θ[w₀]).
#[derive(Clone, Debug)]
pub struct AlgebraicPeriodBasis {
    pub odd: Vec<Characteristic>,
    pub w0: Characteristic,
    pub omega1: CMatrix,
}

/// Even characteristic with the largest |θ[m](0)|.
pub fn best_even(t: &NullwerteTable) -> Characteristic {
    let mut best = even_characteristics(t.genus())[0];
    let mut bv = -1.0;
    for m in even_characteristics(t.genus()) {
        let v = cabs_f64(t.value(&m));
        if v > bv {
            bv = v;
            best = m;
        }
    }
    best
}

pub fn algebraic_period_basis(
    t: &NullwerteTable,
    odd: &[Characteristic],
    w0: Option<Characteristic>,
) -> Result<AlgebraicPeriodBasis, ReconstructError> {
    let g = t.genus();
    if odd.len() != g {
        return Err(ReconstructError::Genus { expected: g, got: odd.len() });
    }
    if let Some(m) = odd.iter().find(|m| !m.is_odd()) {
        return Err(ReconstructError::Parity(*m));
    }
    let w0 = w0.unwrap_or_else(|| best_even(t));
    if !w0.is_even() {
        return Err(ReconstructError::Parity(w0));
    }
    let th = t.value(&w0);
    if cabs_f64(th) < 1e-8 * t.max_even() {
        return Err(ReconstructError::VanishingTheta(w0));
    }
    let rows: Vec<Vec<Complex>> = odd.iter().map(|m| t.gradient(m).unwrap().to_vec()).collect();
    let j = CMatrix::from_rows(rows);
    let det = j.det();
    let scale = j.max_abs().powi(g as i32).max(1e-300);
    if cabs_f64(&det) < 1e-12 * scale {
        return Err(ReconstructError::VanishingNullwert(format!("{:?}", odd.iter().map(|m| m.to_string()).collect::<Vec<_>>())));
    }
    let p = t.prec();
    let denom = Complex::with_val(p.bits, p.two_pi_i() * th);
    let inv = Complex::with_val(p.bits, denom.recip_ref());
    Ok(AlgebraicPeriodBasis { odd: odd.to_vec(), w0, omega1: j.scale(&inv) })
}

/// Canonical image ([w₁,w₂′,…,w_g′] : … : [w_g,w₂′,…,w_g′]) of the Weierstrass
/// point common to the divisors behind `aux`, scaled so the largest
/// coordinate has modulus 1.
pub fn canonical_weierstrass_image(
    t: &NullwerteTable,
    basis: &[Characteristic],
    aux: &[Characteristic],
) -> Result<Vec<Complex>, ReconstructError> {
    let g = t.genus();
    if basis.len() != g || aux.len() + 1 != g {
        return Err(ReconstructError::Genus { expected: g, got: basis.len() });
    }
    for m in basis.iter().chain(aux) {
        if !m.is_odd() {
            return Err(ReconstructError::Parity(*m));
        }
    }
    let coords: Vec<Complex> = basis
        .iter()
        .map(|w| {
            let mut ms = vec![*w];
            ms.extend_from_slice(aux);
            t.jacobian(&ms)
        })
        .collect();
    let big = coords.iter().max_by(|a, b| cabs_f64(a).partial_cmp(&cabs_f64(b)).unwrap()).unwrap().clone();
    if cabs_f64(&big) == 0.0 {
        return Err(ReconstructError::DegenerateImage);
    }
    let p = t.prec();
    Ok(coords.into_iter().map(|c| Complex::with_val(p.bits, &c / &big)).collect())
}

/// Genus-2 reconstruction.
#[derive(Clone, Debug)]
pub struct Genus2Reconstruction {
    /// w₁,…,w₆: the odd characteristics, w₁ and w₂ first.
    pub labels: Vec<Characteristic>,
    /// ℓ_{12j}, j = 3..6.
    pub roots: Vec<Complex>,
    pub model: SymmetricModel,
    /// [w₁,w₂]¹⁶ / (∏_{k≥3}[w₁,w_k])⁴.
    pub discriminant: Complex,
}

fn g2_labels(first: Characteristic, second: Characteristic) -> Vec<Characteristic> {
    let mut labels = vec![first, second];
    labels.extend(odd_characteristics(2).into_iter().filter(|m| *m != first && *m != second));
    labels
}

/// ℓ_{12j} = [w₁,w_j]/[w₂,w_j] for labels w₁..w₆.
pub fn genus2_roots(t: &NullwerteTable, labels: &[Characteristic]) -> Result<Vec<Complex>, ReconstructError> {
    let p = t.prec();
    let mut roots = Vec::with_capacity(4);
    let scale = t.max_even().powi(6).max(1e-300);
    for w in &labels[2..] {
        let num = t.jacobian(&[labels[0], *w]);
        let den = t.jacobian(&[labels[1], *w]);
        if cabs_f64(&den) < 1e-30 * scale {
            return Err(ReconstructError::VanishingNullwert(format!("[{},{}]", labels[1], w)));
        }
        roots.push(Complex::with_val(p.bits, &num / &den));
    }
    Ok(roots)
}

pub fn genus2_discriminant(t: &NullwerteTable, labels: &[Characteristic]) -> Complex {
    let p = t.prec();
    let top = cpow(&t.jacobian(&labels[0..2]), 16);
    let mut den = p.cone();
    for w in &labels[2..] {
        den *= t.jacobian(&[labels[0], *w]);
    }
    Complex::with_val(p.bits, &top / cpow(&den, 4))
}

/// Reconstruction from a table, with (w₁, w₂) chosen by the caller.
pub fn genus2_from_table(
    t: &NullwerteTable,
    w1: Characteristic,
    w2: Characteristic,
) -> Result<Genus2Reconstruction, ReconstructError> {
    if t.genus() != 2 {
        return Err(ReconstructError::Genus { expected: 2, got: t.genus() });
    }
    for m in [w1, w2] {
        if !m.is_odd() {
            return Err(ReconstructError::Parity(m));
        }
    }
    let labels = g2_labels(w1, w2);
    let roots = genus2_roots(t, &labels)?;
    let model = SymmetricModel::from_roots(2, roots.clone());
    let discriminant = genus2_discriminant(t, &labels);
    Ok(Genus2Reconstruction { labels, roots, model, discriminant })
}

/// Symmetric model from a 2×2 period matrix, with w₁, w₂ the first two odd
/// characteristics in canonical order.
pub fn genus2_symmetric_from_z(z: &RiemannMatrix, eps: f64) -> Result<Genus2Reconstruction, ReconstructError> {
    if z.genus() != 2 {
        return Err(ReconstructError::Genus { expected: 2, got: z.genus() });
    }
    let t = NullwerteTable::new(z, eps)?;
    let odd = odd_characteristics(2);
    genus2_from_table(&t, odd[0], odd[1])
}

pub fn genus2_discriminant_from_z(z: &RiemannMatrix, eps: f64) -> Result<Complex, ReconstructError> {
    Ok(genus2_symmetric_from_z(z, eps)?.discriminant)
}

/// Symmetric roots from even Thetanullwerte,
/// ℓ_{12k} = ±∏_{r≠1,2,k} θ[w₁+w_k+w_r]/θ[w₂+w_k+w_r].
#[derive(Clone, Debug)]
pub struct ThetaRoots {
    /// Sign-resolved roots, matched against the Jacobian route.
    pub roots: Vec<Complex>,
    /// Worst relative gap | |θ-route| − |Jacobian route| |.
    pub magnitude_defect: f64,
    /// Distinct even characteristics touched.
    pub touched: BTreeSet<usize>,
    /// Theta values read (with repetition).
    pub reads: usize,
}

pub fn genus2_roots_from_thetanullwerte(t: &NullwerteTable, labels: &[Characteristic]) -> Result<ThetaRoots, ReconstructError> {
    let p = t.prec();
    let jac = genus2_roots(t, labels)?;
    let mut touched = BTreeSet::new();
    let mut reads = 0;
    let mut roots = Vec::new();
    let mut defect: f64 = 0.0;
    for k in 2..6 {
        let mut v = p.cone();
        for r in 2..6 {
            if r == k {
                continue;
            }
            let a = labels[0].add(&labels[k]).add(&labels[r]);
            let b = labels[1].add(&labels[k]).add(&labels[r]);
            let tb = t.value(&b);
            if cabs_f64(tb) < 1e-8 * t.max_even() {
                return Err(ReconstructError::VanishingTheta(b));
            }
            touched.insert(a.index());
            touched.insert(b.index());
            reads += 2;
            v *= t.value(&a);
            v /= tb;
        }
        let target = &jac[k - 2];
        defect = defect.max((cabs_f64(&v) - cabs_f64(target)).abs() / cabs_f64(target).max(1e-300));
        let neg = Complex::with_val(p.bits, -&v);
        if rel_diff(&neg, target, 1e-300) < rel_diff(&v, target, 1e-300) {
            v = neg;
        }
        roots.push(v);
    }
    Ok(ThetaRoots { roots, magnitude_defect: defect, touched, reads })
}

/// Labelling of the 28 odd characteristics of a hyperelliptic Z ∈ H₃ as
/// images w_{rs} of W_r + W_s, r ≠ s ∈ 0..8.
#[derive(Clone, Debug)]
pub struct Genus3Labeling {
    /// The unique vanishing even characteristic δ.
    pub delta: Characteristic,
    /// Number of companions found (5 for hyperelliptic Z).
    pub companions: usize,
    table: [[Option<Characteristic>; 8]; 8],
}

impl Genus3Labeling {
    /// Labels read off a calibrated dictionary (indices = branch-point indices).
    pub fn from_dictionary(d: &CharacteristicDictionary) -> Genus3Labeling {
        let mut table = [[None; 8]; 8];
        for r in 0..8 {
            for s in 0..8 {
                if r != s {
                    table[r][s] = Some(d.w2(r, s));
                }
            }
        }
        Genus3Labeling { delta: d.shift, companions: 5, table }
    }

    pub fn w(&self, r: usize, s: usize) -> Characteristic {
        self.table[r][s].expect("w_rs needs r != s")
    }

    /// a ⊕ b = a + b + δ. On labels, w_{rs} ⊕ w_{st} = w_{rt}.
    pub fn twisted_add(&self, a: &Characteristic, b: &Characteristic) -> Characteristic {
        a.add(b).add(&self.delta)
    }

    /// The even characteristic of W_a + W_b + W_c + W_d: w_{ab} ⊕ w_{cd}.
    pub fn four(&self, a: usize, b: usize, c: usize, d: usize) -> Characteristic {
        self.twisted_add(&self.w(a, b), &self.w(c, d))
    }

    /// All 28 labels, lexicographic in (r, s), r < s.
    pub fn all(&self) -> Vec<Characteristic> {
        let mut out = Vec::with_capacity(28);
        for r in 0..8 {
            for s in r + 1..8 {
                out.push(self.w(r, s));
            }
        }
        out
    }
}

/// Even characteristics whose Nullwert is below `threshold`·max.
pub fn vanishing_evens(t: &NullwerteTable, threshold: f64) -> Vec<Characteristic> {
    let mx = t.max_even();
    even_characteristics(t.genus()).into_iter().filter(|m| cabs_f64(t.value(m)) < threshold * mx).collect()
}

/// Label the odd characteristics: w_{23}, w_{13} are the first odd pair whose
/// twisted sum w_{12} is odd; the companions w_{1k} (k ≥ 4) are the odd w with
/// w_{13} ⊕ w and w_{12} ⊕ w odd; the rest is w_{jk} = w_{1j} ⊕ w_{1k}.
pub fn genus3_label(t: &NullwerteTable, threshold: f64) -> Result<Genus3Labeling, ReconstructError> {
    if t.genus() != 3 {
        return Err(ReconstructError::Genus { expected: 3, got: t.genus() });
    }
    let van = vanishing_evens(t, threshold);
    if van.len() != 1 {
        return Err(ReconstructError::NotHyperelliptic { vanishing: van.len() });
    }
    let delta = van[0];
    let tw = |a: &Characteristic, b: &Characteristic| a.add(b).add(&delta);
    let odd = odd_characteristics(3);
    let mut pair = None;
    'outer: for (i, a) in odd.iter().enumerate() {
        for b in &odd[i + 1..] {
            if tw(a, b).is_odd() {
                pair = Some((*a, *b));
                break 'outer;
            }
        }
    }
    let (w23, w13) = pair.ok_or(ReconstructError::NoPair)?;
    let w12 = tw(&w23, &w13);
    let comp: Vec<Characteristic> = odd
        .iter()
        .filter(|w| **w != w23 && **w != w13 && **w != w12)
        .filter(|w| tw(&w13, w).is_odd() && tw(&w12, w).is_odd())
        .cloned()
        .collect();
    if comp.len() != 5 {
        return Err(ReconstructError::Companions(comp.len()));
    }
    let mut first = vec![w12, w13];
    first.extend(comp.iter().cloned());
    let mut table = [[None; 8]; 8];
    for k in 1..8 {
        table[0][k] = Some(first[k - 1]);
        table[k][0] = Some(first[k - 1]);
    }
    for j in 1..8 {
        for k in j + 1..8 {
            let v = tw(&first[j - 1], &first[k - 1]);
            table[j][k] = Some(v);
            table[k][j] = Some(v);
        }
    }
    let l = Genus3Labeling { delta, companions: comp.len(), table };
    let mut all = l.all();
    all.sort_by_key(|c| c.index());
    all.dedup();
    if all.len() != 28 || all.iter().any(|c| !c.is_odd()) {
        return Err(ReconstructError::Companions(all.len()));
    }
    Ok(l)
}

/// μ_{mnrs} = [w_mt,w_tr,w_rn][w_nt,w_ts,w_sn] / ([w_mt,w_ts,w_sn][w_nt,w_tr,w_rn]).
pub fn genus3_mu(
    l: &Genus3Labeling,
    t: &NullwerteTable,
    m: usize,
    n: usize,
    r: usize,
    s: usize,
    aux: usize,
) -> Result<Complex, ReconstructError> {
    let idx = [m, n, r, s, aux];
    for a in 0..5 {
        for b in a + 1..5 {
            if idx[a] == idx[b] || idx[a] >= 8 || idx[b] >= 8 {
                return Err(ReconstructError::VanishingNullwert("indices must be distinct and < 8".into()));
            }
        }
    }
    let tt = aux;
    let j = |a: (usize, usize), b: (usize, usize), c: (usize, usize)| t.jacobian(&[l.w(a.0, a.1), l.w(b.0, b.1), l.w(c.0, c.1)]);
    let a = j((m, tt), (tt, r), (r, n));
    let b = j((n, tt), (tt, s), (s, n));
    let c = j((m, tt), (tt, s), (s, n));
    let d = j((n, tt), (tt, r), (r, n));
    let p = t.prec();
    let den = Complex::with_val(p.bits, &c * &d);
    if cabs_f64(&den) == 0.0 {
        return Err(ReconstructError::VanishingNullwert(format!("mu_{m}{n}{r}{s} with t={tt}")));
    }
    Ok(Complex::with_val(p.bits, &a * &b) / den)
}

/// Genus-3 reconstruction.
#[derive(Clone, Debug)]
pub struct Genus3Reconstruction {
    pub labeling: Genus3Labeling,
    /// μ_{123k}, k = 4..8.
    pub mu: Vec<Complex>,
    /// ℓ_{12k}, k = 3..8.
    pub roots: Vec<Complex>,
    pub model: SymmetricModel,
    /// Worst disagreement of μ_{123k} between the two auxiliary indices.
    pub aux_defect: f64,
}

fn two_aux(used: &[usize]) -> (usize, usize) {
    let mut free = (0..8).filter(|k| !used.contains(k));
    (free.next().unwrap(), free.next().unwrap())
}

pub fn genus3_from_table(t: &NullwerteTable, threshold: f64, tol: f64) -> Result<Genus3Reconstruction, ReconstructError> {
    let labeling = genus3_label(t, threshold)?;
    let p = t.prec();
    let mut mu = Vec::with_capacity(5);
    let mut defect: f64 = 0.0;
    for k in 3..8 {
        let (a1, a2) = two_aux(&[0, 1, 2, k]);
        let v = genus3_mu(&labeling, t, 0, 1, 2, k, a1)?;
        let w = genus3_mu(&labeling, t, 0, 1, 2, k, a2)?;
        defect = defect.max(rel_diff(&v, &w, 1e-300));
        mu.push(v);
    }
    if defect > tol {
        return Err(ReconstructError::AuxiliaryMismatch(defect));
    }
    let mut prod = p.cone();
    for m in &mu {
        prod *= m;
    }
    let l123 = croot(&prod, 6);
    let mut roots = vec![l123.clone()];
    for m in &mu {
        roots.push(Complex::with_val(p.bits, &l123 / m));
    }
    let model = SymmetricModel::from_roots(3, roots.clone());
    Ok(Genus3Reconstruction { labeling, mu, roots, model, aux_defect: defect })
}

/// Default threshold for a vanishing even Nullwert, relative to the largest.
pub const VANISHING_THRESHOLD: f64 = 1e-6;

/// Symmetric model from a hyperelliptic 3×3 period matrix.
pub fn genus3_symmetric_from_z(z: &RiemannMatrix, eps: f64, tol: f64) -> Result<Genus3Reconstruction, ReconstructError> {
    if z.genus() != 3 {
        return Err(ReconstructError::Genus { expected: 3, got: z.genus() });
    }
    let t = NullwerteTable::new(z, eps)?;
    genus3_from_table(&t, VANISHING_THRESHOLD, tol)
}

/// ℓ_{123}³ (up to sign) from even Thetanullwerte through Frobenius' formula:
/// θ[1345]³θ[1346]θ[1467]θ[1468]θ[1356]³θ[1378]⁵ /
/// (θ[1456]⁵θ[1478]³θ[1357]θ[1358]θ[1578]θ[1678]³), θ[abcd] the even
/// characteristic of W_a+W_b+W_c+W_d. Returns the value and the distinct
/// characteristics it reads.
pub fn genus3_l123_cubed_from_thetanullwerte(l: &Genus3Labeling, t: &NullwerteTable) -> (Complex, BTreeSet<usize>) {
    const NUM: [([usize; 4], i32); 6] =
        [([1, 3, 4, 5], 3), ([1, 3, 4, 6], 1), ([1, 4, 6, 7], 1), ([1, 4, 6, 8], 1), ([1, 3, 5, 6], 3), ([1, 3, 7, 8], 5)];
    const DEN: [([usize; 4], i32); 6] =
        [([1, 4, 5, 6], 5), ([1, 4, 7, 8], 3), ([1, 3, 5, 7], 1), ([1, 3, 5, 8], 1), ([1, 5, 7, 8], 1), ([1, 6, 7, 8], 3)];
    let p = t.prec();
    let mut touched = BTreeSet::new();
    let mut v = p.cone();
    for (set, e) in NUM.iter().map(|(s, e)| (s, *e)).chain(DEN.iter().map(|(s, e)| (s, -*e))) {
        let c = l.four(set[0] - 1, set[1] - 1, set[2] - 1, set[3] - 1);
        touched.insert(c.index());
        v *= cpow(t.value(&c), e);
    }
    (v, touched)
}
