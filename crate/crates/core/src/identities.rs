//! Numerical checks of the classical theta identities on hyperelliptic period
//! matrices: Thomae (even, Jacobian and quotient forms), Rosenhain, Frobenius,
//! Jacobi, Igusa's product and the eighth-power rationality statement.
//!
//! Identities with an undetermined root or sign are compared at a root-free
//! power (8th or 4th) or up to ±1, and the sign is reported separately.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use thiserror::Error;

use crate::num::{cabs_f64, cpow, Precision};
use crate::periods::{characteristic_dictionary, k_subsets, period_matrix, CharacteristicDictionary, PeriodData, PeriodError};
use crate::symcurve::{mu_invariant, BranchSet};
use crate::theta::{azygetic_sequence, char_add, even_characteristics, is_azygetic, odd_characteristics, Characteristic, NullwerteTable, RiemannMatrix, ThetaError};

/// Reference floor in relative residuals.
pub const FLOOR: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error("bad partition: {0}")]
    Partition(String),
    #[error("characteristic {0} has the wrong parity for {1}")]
    Parity(Characteristic, &'static str),
    #[error("genus {got} not supported here (need {need})")]
    Genus { got: usize, need: &'static str },
    #[error("sequence is not azygetic")]
    NotAzygetic,
    #[error("rational branch points required")]
    NotRational,
    #[error("Im tau must be positive")]
    UpperHalfPlane,
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

/// Outcome of one identity check.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub lhs: Vec<Complex>,
    pub rhs: Vec<Complex>,
    pub residual: f64,
    pub passed: bool,
    pub tol: f64,
    /// Secondary quantities: direction residuals, signs, counts.
    pub details: BTreeMap<String, f64>,
}

impl IdentityReport {
    fn new(name: &str, lhs: Vec<Complex>, rhs: Vec<Complex>, residual: f64, tol: f64) -> Self {
        IdentityReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            residual,
            passed: residual < tol,
            tol,
            details: BTreeMap::new(),
        }
    }

    fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.params.insert(k.to_string(), v.to_string());
        self
    }

    fn detail(mut self, k: &str, v: f64) -> Self {
        self.details.insert(k.to_string(), v);
        self
    }
}

/// |a − b| / max(|a|, |b|, FLOOR).
pub fn residual(a: &Complex, b: &Complex) -> f64 {
    let d = Complex::with_val(a.prec().0, a - b);
    cabs_f64(&d) / cabs_f64(a).max(cabs_f64(b)).max(FLOOR)
}

/// Residual up to sign, and the sign (±1) that attains it.
pub fn residual_pm(a: &Complex, b: &Complex) -> (f64, i32) {
    let plus = residual(a, b);
    let minus = residual(a, &Complex::with_val(b.prec().0, -b));
    if plus <= minus {
        (plus, 1)
    } else {
        (minus, -1)
    }
}

fn modulus_residual(a: &Complex, b: &Complex) -> f64 {
    let (x, y) = (cabs_f64(a), cabs_f64(b));
    (x - y).abs() / x.max(y).max(FLOOR)
}

fn labels(s: &[usize]) -> String {
    format!("{s:?}")
}

/// Everything the curve-based checkers need, computed once.
#[derive(Clone, Debug)]
pub struct CurveData {
    pub branch: BranchSet,
    pub periods: PeriodData,
    pub dict: CharacteristicDictionary,
    pub table: NullwerteTable,
}

impl CurveData {
    pub fn new(branch: BranchSet) -> Result<Self, IdentityError> {
        let periods = period_matrix(&branch)?;
        Self::from_periods(branch, periods)
    }

    pub fn from_periods(branch: BranchSet, periods: PeriodData) -> Result<Self, IdentityError> {
        let dict = characteristic_dictionary(&periods)?;
        let table = NullwerteTable::new(&periods.z, periods.z.prec().epsilon())?;
        Ok(CurveData { branch, periods, dict, table })
    }

    pub fn genus(&self) -> usize {
        self.branch.genus()
    }

    fn prec(&self) -> Precision {
        self.branch.prec()
    }

    fn n(&self) -> usize {
        self.branch.len()
    }

    fn complement(&self, s: &[usize]) -> Vec<usize> {
        (0..self.n()).filter(|i| !s.contains(i)).collect()
    }

    fn check_subset(&self, s: &[usize], size: usize) -> Result<(), IdentityError> {
        if s.len() != size {
            return Err(IdentityError::Partition(format!("expected {size} points, got {}", s.len())));
        }
        for (k, &i) in s.iter().enumerate() {
            if i >= self.n() {
                return Err(IdentityError::Partition(format!("label {i} out of range")));
            }
            if s[..k].contains(&i) {
                return Err(IdentityError::Partition(format!("label {i} repeated")));
            }
        }
        Ok(())
    }

    /// Δ(S) = ∏_{i<j∈S} (α_i − α_j)², differences with ∞ counted as 1.
    fn delta(&self, s: &[usize]) -> Complex {
        let p = self.prec();
        let mut acc = p.cone();
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                let d = self.branch.diff(i, j);
                acc *= Complex::with_val(p.bits, d.square_ref());
            }
        }
        acc
    }

    fn delta_exact(&self, s: &[usize]) -> Option<Rational> {
        let ex = self.branch.exact()?;
        let mut acc = Rational::from(1);
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                if let (Some(x), Some(y)) = (&ex[i], &ex[j]) {
                    let d = Rational::from(x - y);
                    acc *= Rational::from(d.square_ref());
                }
            }
        }
        Some(acc)
    }

    /// ∏_{k∈S} (γ − α_k) at the branch point γ, ∞ factors counted as 1.
    fn eval_at(&self, gamma: usize, s: &[usize]) -> Complex {
        let p = self.prec();
        let mut acc = p.cone();
        for &k in s {
            acc *= self.branch.diff(gamma, k);
        }
        acc
    }

    /// Coefficients of ∏_{i∈S, α_i≠∞}(X − α_i), constant term first, padded to g.
    fn s_vector(&self, s: &[usize]) -> Vec<Complex> {
        let p = self.prec();
        let mut c = vec![p.cone()];
        for &i in s {
            if let Some(a) = self.branch.point(i).finite() {
                let mut next = vec![p.czero(); c.len() + 1];
                for (k, ck) in c.iter().enumerate() {
                    next[k + 1] += ck;
                    next[k] -= Complex::with_val(p.bits, ck * a);
                }
                c = next;
            }
        }
        c.resize(self.genus(), p.czero());
        c
    }

    fn s_vector_exact(&self, s: &[usize]) -> Option<Vec<Rational>> {
        let ex = self.branch.exact()?;
        let mut c = vec![Rational::from(1)];
        for &i in s {
            if let Some(a) = &ex[i] {
                let mut next = vec![Rational::new(); c.len() + 1];
                for (k, ck) in c.iter().enumerate() {
                    next[k + 1] += ck;
                    next[k] -= Rational::from(ck * a);
                }
                c = next;
            }
        }
        c.resize(self.genus(), Rational::new());
        Some(c)
    }

    fn odd_image(&self, s: &[usize]) -> Result<Characteristic, IdentityError> {
        let w = self.dict.image(s);
        if !w.is_odd() {
            return Err(IdentityError::Parity(w, "an odd image"));
        }
        Ok(w)
    }

    fn even_image(&self, s: &[usize]) -> Result<Characteristic, IdentityError> {
        let w = self.dict.image(s);
        if !w.is_even() {
            return Err(IdentityError::Parity(w, "an even image"));
        }
        Ok(w)
    }

    fn det_omega1(&self) -> Complex {
        self.periods.omega1.det()
    }

    fn theta(&self, m: &Characteristic) -> Complex {
        self.table.value(m).clone()
    }

    fn grad(&self, m: &Characteristic) -> Vec<Complex> {
        self.table.gradient(m).expect("odd characteristic").to_vec()
    }
}

/// Proportionality factors a_k / b_k over the components where b is not
/// negligible, and their relative spread.
fn proportionality(a: &[Complex], b: &[Complex]) -> (Complex, f64) {
    let bits = a[0].prec().0;
    let scale = b.iter().map(cabs_f64).fold(0.0, f64::max);
    let ratios: Vec<Complex> = a
        .iter()
        .zip(b)
        .filter(|(_, y)| cabs_f64(y) > 1e-8 * scale)
        .map(|(x, y)| Complex::with_val(bits, x / y))
        .collect();
    let lead = ratios
        .iter()
        .zip(b.iter().filter(|y| cabs_f64(y) > 1e-8 * scale))
        .max_by(|(_, x), (_, y)| cabs_f64(x).partial_cmp(&cabs_f64(y)).unwrap())
        .map(|(r, _)| r.clone())
        .unwrap();
    let spread = ratios.iter().map(|r| residual(r, &lead)).fold(0.0, f64::max);
    (lead, spread)
}

/// θ[w_e]⁸ = (2π)^{−4g} detΩ₁⁴ Δ(T)Δ(T^c) with w_e the image of the
/// (g+1)-set T.
pub fn check_thomae_even(c: &CurveData, t: &[usize], tol: f64) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    c.check_subset(t, g + 1)?;
    let p = c.prec();
    let we = c.even_image(t)?;
    let lhs = cpow(&c.theta(&we), 8);
    let two_pi = Float::with_val(p.bits, p.pi() * 2u32);
    let mut rhs = cpow(&c.det_omega1(), 4) * c.delta(t) * c.delta(&c.complement(t));
    rhs /= Float::with_val(p.bits, two_pi.pow(4 * g as u32));
    let r = residual(&lhs, &rhs);
    Ok(IdentityReport::new("thomae_even", vec![lhs], vec![rhs], r, tol)
        .param("partition", labels(t))
        .param("w_e", we))
}

/// 2(2π)^{g/2} grad θ[w_o] = (Δ(T)Δ(T^c))^{1/8} √detΩ₁ · S(T)·Ω₁ for a
/// (g−1)-set T: proportionality of the two vectors plus the 8th power of the
/// factor.
pub fn check_thomae_jacobian(c: &CurveData, t: &[usize], tol: f64) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    if g < 1 {
        return Err(IdentityError::Genus { got: g, need: "g ≥ 1" });
    }
    c.check_subset(t, g - 1)?;
    let p = c.prec();
    let wo = c.odd_image(t)?;
    let grad = c.grad(&wo);
    let v = c.periods.omega1.left_mul_vec(&c.s_vector(t));
    let (lam, dir) = proportionality(&grad, &v);
    let two_pi = Float::with_val(p.bits, p.pi() * 2u32);
    let k = Float::with_val(p.bits, two_pi.pow(g as u32)).sqrt() * 2u32;
    let lhs = cpow(&Complex::with_val(p.bits, lam * k), 8);
    let rhs = c.delta(t) * c.delta(&c.complement(t)) * cpow(&c.det_omega1(), 4);
    let rhs = Complex::with_val(p.bits, rhs);
    let mag = residual(&lhs, &rhs);
    Ok(IdentityReport::new("thomae_jacobian", vec![lhs], vec![rhs], mag.max(dir), tol)
        .param("partition", labels(t))
        .param("w_o", wo)
        .detail("direction", dir)
        .detail("magnitude", mag))
}

/// The quotient forms: 2 grad θ[w_o] / θ[w_e] = λ · S(T_o)·Ω₁ with
/// λ⁸ = Δ(F₁)Δ(F₂)/(Δ(G₁)Δ(G₂)) and, for T_o ⊂ T_e with T_e∖T_o = {γ₁,γ₂},
/// λ⁴ = G₂(γ₁)G₂(γ₂)/(F₁(γ₁)F₁(γ₂)).
pub fn check_thomae_quotient(c: &CurveData, t_odd: &[usize], t_even: &[usize], tol: f64) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    c.check_subset(t_odd, g - 1)?;
    c.check_subset(t_even, g + 1)?;
    if !t_odd.iter().all(|i| t_even.contains(i)) {
        return Err(IdentityError::Partition("odd set must lie inside the even set".into()));
    }
    let p = c.prec();
    let wo = c.odd_image(t_odd)?;
    let we = c.even_image(t_even)?;
    let th = c.theta(&we);
    let lhs_vec: Vec<Complex> = c.grad(&wo).iter().map(|x| Complex::with_val(p.bits, x * 2u32) / &th).collect();
    let v = c.periods.omega1.left_mul_vec(&c.s_vector(t_odd));
    let (lam, dir) = proportionality(&lhs_vec, &v);

    let r8 = Complex::with_val(
        p.bits,
        c.delta(t_odd) * c.delta(&c.complement(t_odd)) / (c.delta(t_even) * c.delta(&c.complement(t_even))),
    );
    let gam: Vec<usize> = t_even.iter().copied().filter(|i| !t_odd.contains(i)).collect();
    let rest = c.complement(t_even);
    let num = c.eval_at(gam[0], &rest) * c.eval_at(gam[1], &rest);
    let den = c.eval_at(gam[0], t_odd) * c.eval_at(gam[1], t_odd);
    let r4 = Complex::with_val(p.bits, num / den);

    let l8 = cpow(&lam, 8);
    let l4 = cpow(&lam, 4);
    let e8 = residual(&l8, &r8);
    let (e4, sign4) = residual_pm(&l4, &r4);
    let consistency = residual(&cpow(&r4, 2), &r8);
    let worst = e8.max(e4).max(dir);
    Ok(IdentityReport::new("thomae_quotient", vec![l8, l4], vec![r8, r4], worst, tol)
        .param("odd_partition", labels(t_odd))
        .param("even_partition", labels(t_even))
        .param("w_o", wo)
        .param("w_e", we)
        .detail("direction", dir)
        .detail("eighth_root_form", e8)
        .detail("fourth_root_form", e4)
        .detail("fourth_root_sign", sign4 as f64)
        .detail("consistency", consistency))
}

/// Rosenhain: [m₁,m₂] = ±π² ∏ θ[m₁+m₂+m] over the four other odd m, for any
/// Z in the Siegel upper half space of degree 2.
pub fn check_rosenhain(t: &NullwerteTable, m1: &Characteristic, m2: &Characteristic, tol: f64) -> Result<IdentityReport, IdentityError> {
    if t.genus() != 2 {
        return Err(IdentityError::Genus { got: t.genus(), need: "g = 2" });
    }
    for m in [m1, m2] {
        if !m.is_odd() {
            return Err(IdentityError::Parity(*m, "Rosenhain"));
        }
    }
    if m1 == m2 {
        return Err(IdentityError::Partition("m1 = m2".into()));
    }
    let p = t.prec();
    let lhs = t.jacobian(&[*m1, *m2]);
    let pi = p.pi();
    let mut rhs = Complex::with_val(p.bits, Float::with_val(p.bits, pi.square_ref()));
    for m in odd_characteristics(2).iter().filter(|m| *m != m1 && *m != m2) {
        let e = char_add(&char_add(m1, m2), m);
        if !e.is_even() {
            return Err(IdentityError::Parity(e, "Rosenhain"));
        }
        rhs *= t.value(&e);
    }
    let (r, sign) = residual_pm(&lhs, &rhs);
    let modulus = modulus_residual(&lhs, &rhs);
    Ok(IdentityReport::new("rosenhain", vec![lhs], vec![rhs], r, tol)
        .param("m1", m1)
        .param("m2", m2)
        .detail("sign", sign as f64)
        .detail("modulus", modulus))
}

/// All 15 odd pairs of a degree-2 matrix.
pub fn rosenhain_sweep(z: &RiemannMatrix, tol: f64) -> Result<Vec<IdentityReport>, IdentityError> {
    let t = NullwerteTable::new(z, z.prec().epsilon())?;
    let odd = odd_characteristics(2);
    let mut out = Vec::new();
    for a in 0..odd.len() {
        for b in a + 1..odd.len() {
            out.push(check_rosenhain(&t, &odd[a], &odd[b], tol)?);
        }
    }
    Ok(out)
}

/// Signs of all 15 Rosenhain pairs at `steps` + 1 points of the segment from
/// `z0` to `z1` (convex, so it stays in the upper half space). Returns the
/// signs per step and the worst residual met on the way.
pub fn rosenhain_sign_path(z0: &RiemannMatrix, z1: &RiemannMatrix, steps: usize, tol: f64) -> Result<(Vec<Vec<i32>>, f64), IdentityError> {
    let p = z0.prec();
    let results: Vec<Result<(Vec<i32>, f64), IdentityError>> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / steps.max(1) as f64;
            let e: Vec<Complex> = z0
                .entries()
                .iter()
                .zip(z1.entries())
                .map(|(a, b)| Complex::with_val(p.bits, a * (1.0 - s)) + Complex::with_val(p.bits, b * s))
                .collect();
            let z = RiemannMatrix::new(2, e)?;
            let reps = rosenhain_sweep(&z, tol)?;
            let worst = reps.iter().map(|r| r.residual).fold(0.0, f64::max);
            Ok((reps.iter().map(|r| r.details["sign"] as i32).collect(), worst))
        })
        .collect();
    let mut signs = Vec::new();
    let mut worst: f64 = 0.0;
    for r in results {
        let (s, w) = r?;
        signs.push(s);
        worst = worst.max(w);
    }
    Ok((signs, worst))
}

/// Frobenius (g = 3): [w_ik, w_ij, w_jk] = ±π³ ∏_{r∉{i,j,k}} θ[w_ijkr], with
/// w_ijkr = w_ij ⊕ w_kr.
pub fn check_frobenius_g3(c: &CurveData, i: usize, j: usize, k: usize, tol: f64) -> Result<IdentityReport, IdentityError> {
    if c.genus() != 3 {
        return Err(IdentityError::Genus { got: c.genus(), need: "g = 3" });
    }
    c.check_subset(&[i, j, k], 3)?;
    let p = c.prec();
    let (wik, wij, wjk) = (c.dict.w2(i, k), c.dict.w2(i, j), c.dict.w2(j, k));
    let lhs = c.table.jacobian(&[wik, wij, wjk]);
    let pi = p.pi();
    let mut rhs = Complex::with_val(p.bits, Float::with_val(p.bits, pi.pow(3u32)));
    for r in (0..8).filter(|r| ![i, j, k].contains(r)) {
        let e = c.dict.twisted_add(&wij, &c.dict.w2(k, r));
        if !e.is_even() || e != c.dict.image(&[i, j, k, r]) {
            return Err(IdentityError::Parity(e, "Frobenius"));
        }
        rhs *= c.table.value(&e);
    }
    let (r, sign) = residual_pm(&lhs, &rhs);
    Ok(IdentityReport::new("frobenius_g3", vec![lhs], vec![rhs], r, tol)
        .param("triplet", labels(&[i, j, k]))
        .detail("sign", sign as f64))
}

/// All C(8,3) = 56 triplets, run concurrently.
pub fn frobenius_sweep(c: &CurveData, tol: f64) -> Result<Vec<IdentityReport>, IdentityError> {
    k_subsets(8, 3).par_iter().map(|s| check_frobenius_g3(c, s[0], s[1], s[2], tol)).collect()
}

/// The special fundamental system attached to a g-set L of Weierstrass
/// points: images of L∖{i} for i ∈ L (odd), then of L∪{i} for i ∉ L (even).
pub fn fundamental_system(c: &CurveData, l: &[usize]) -> Result<Vec<Characteristic>, IdentityError> {
    let g = c.genus();
    c.check_subset(l, g)?;
    let mut out = Vec::with_capacity(2 * g + 2);
    for &i in l {
        let s: Vec<usize> = l.iter().copied().filter(|&x| x != i).collect();
        out.push(c.odd_image(&s)?);
    }
    for i in c.complement(l) {
        let mut s = l.to_vec();
        s.push(i);
        out.push(c.even_image(&s)?);
    }
    if !azygetic_sequence(&out) {
        return Err(IdentityError::NotAzygetic);
    }
    Ok(out)
}

/// Every set of g+2 even characteristics completing `odd` to a fundamental
/// system (all triples azygetic).
pub fn fundamental_completions(odd: &[Characteristic]) -> Vec<Vec<Characteristic>> {
    let g = odd.len();
    let evens: Vec<Characteristic> = even_characteristics(g)
        .into_iter()
        .filter(|e| {
            (0..g).all(|a| (a + 1..g).all(|b| is_azygetic(&odd[a], &odd[b], e)))
        })
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<Characteristic> = odd.to_vec();
    extend_completions(&evens, 0, g + 2, &mut cur, &mut out, g);
    out
}

fn extend_completions(
    pool: &[Characteristic],
    from: usize,
    need: usize,
    cur: &mut Vec<Characteristic>,
    out: &mut Vec<Vec<Characteristic>>,
    g: usize,
) {
    if need == 0 {
        out.push(cur[g..].to_vec());
        return;
    }
    for k in from..pool.len() {
        let e = pool[k];
        let ok = (0..cur.len()).all(|a| (a + 1..cur.len()).all(|b| is_azygetic(&cur[a], &cur[b], &e)));
        if ok {
            cur.push(e);
            extend_completions(pool, k + 1, need - 1, cur, out, g);
            cur.pop();
        }
    }
}

/// Igusa's product for the fundamental system of `l`:
/// [m₁,…,m_g] = ±π^g θ[m_{g+1}]⋯θ[m_{2g+2}]. Also counts how many of all
/// fundamental completions of m₁,…,m_g have a nonvanishing theta product.
pub fn check_igusa_product(c: &CurveData, l: &[usize], tol: f64) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    if !(1..=3).contains(&g) {
        return Err(IdentityError::Genus { got: g, need: "1 ≤ g ≤ 3" });
    }
    let fs = fundamental_system(c, l)?;
    let p = c.prec();
    let lhs = c.table.jacobian(&fs[..g]);
    let pi = p.pi();
    let mut rhs = Complex::with_val(p.bits, Float::with_val(p.bits, pi.pow(g as u32)));
    for e in &fs[g..] {
        rhs *= c.table.value(e);
    }
    let (r, sign) = residual_pm(&lhs, &rhs);

    let comps = fundamental_completions(&fs[..g]);
    let big = c.table.max_even();
    let mut nonzero = 0usize;
    for comp in &comps {
        let small = comp.iter().any(|e| cabs_f64(c.table.value(e)) < 1e-10 * big);
        if !small {
            nonzero += 1;
        }
    }
    Ok(IdentityReport::new("igusa_product", vec![lhs], vec![rhs], r, tol)
        .param("labels", labels(l))
        .param("system", fs.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "))
        .detail("sign", sign as f64)
        .detail("completions", comps.len() as f64)
        .detail("nonvanishing_completions", nonzero as f64))
}

/// Jacobi: −θ′[½,½](0,τ) = π θ[½,0] θ[0,0] θ[0,½].
pub fn check_jacobi_g1(tau: &Complex, prec: Precision, tol: f64) -> Result<IdentityReport, IdentityError> {
    if tau.imag().is_sign_negative() || tau.imag().is_zero() {
        return Err(IdentityError::UpperHalfPlane);
    }
    let z = RiemannMatrix::new(1, vec![Complex::with_val(prec.bits, tau)])?;
    let t = NullwerteTable::new(&z, prec.epsilon())?;
    let ch = |a: u8, b: u8| Characteristic::from_bits(&[a], &[b]);
    let lhs = Complex::with_val(prec.bits, -&t.gradient(&ch(1, 1)).unwrap()[0]);
    let rhs = Complex::with_val(prec.bits, t.value(&ch(1, 0)) * t.value(&ch(0, 0))) * t.value(&ch(0, 1)) * prec.pi();
    let r = residual(&lhs, &rhs);
    Ok(IdentityReport::new("jacobi_g1", vec![lhs], vec![rhs], r, tol).param("tau", tau.to_string_radix(10, Some(20))))
}

/// X = (2^g/detΩ₁)·[w₁,…,w_g]/(θ[w₁′]⋯θ[w_g′]) has
/// X⁸ = det(S)⁸ ∏Δ(F_k) / ∏Δ(G_k), a rational function of the branch points.
/// `odd_sets` are g sets of g−1 labels, `even_sets` g sets of g+1 labels.
pub fn check_eighth_power_rationality(
    c: &CurveData,
    odd_sets: &[Vec<usize>],
    even_sets: &[Vec<usize>],
    tol: f64,
) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    if odd_sets.len() != g || even_sets.len() != g {
        return Err(IdentityError::Partition(format!("need {g} odd and {g} even sets")));
    }
    for s in odd_sets {
        c.check_subset(s, g - 1)?;
    }
    for s in even_sets {
        c.check_subset(s, g + 1)?;
    }
    c.branch.exact().ok_or(IdentityError::NotRational)?;
    let p = c.prec();

    let odd: Vec<Characteristic> = odd_sets.iter().map(|s| c.odd_image(s)).collect::<Result<_, _>>()?;
    let even: Vec<Characteristic> = even_sets.iter().map(|s| c.even_image(s)).collect::<Result<_, _>>()?;
    let mut x = Complex::with_val(p.bits, c.table.jacobian(&odd) * Float::with_val(p.bits, Float::u_exp(1, g as i32)));
    x /= c.det_omega1();
    for e in &even {
        x /= c.table.value(e);
    }
    let lhs = cpow(&x, 8);

    let rows: Vec<Vec<Rational>> = odd_sets.iter().map(|s| c.s_vector_exact(s).unwrap()).collect();
    let mut value = rational_det(rows);
    value = Rational::from(value.square_ref());
    value = Rational::from(value.square_ref());
    value = Rational::from(value.square_ref());
    for s in odd_sets {
        value *= c.delta_exact(s).unwrap() * c.delta_exact(&c.complement(s)).unwrap();
    }
    for s in even_sets {
        let d = c.delta_exact(s).unwrap() * c.delta_exact(&c.complement(s)).unwrap();
        value /= d;
    }
    let rhs = p.from_rational(&value);
    let r = residual(&lhs, &rhs);
    Ok(IdentityReport::new("eighth_power_rationality", vec![lhs], vec![rhs], r, tol)
        .param("odd_sets", format!("{odd_sets:?}"))
        .param("even_sets", format!("{even_sets:?}"))
        .param("rational_value", value))
}

fn rational_det(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::from(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return Rational::new();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let f = Rational::from(&a[r][col] / &a[col][col]);
            for k in col..n {
                let t = Rational::from(&f * &a[col][k]);
                a[r][k] -= t;
            }
        }
    }
    det
}

/// For a (g−1)-set T, a = grad θ[w_o]·Ω₁⁻¹ defines a hyperplane of the
/// canonical space that contains the canonical images (1, α, …, α^{g−1}) of
/// the points of T.
pub fn check_hyperplane(c: &CurveData, t: &[usize], tol: f64) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    if g < 2 {
        return Err(IdentityError::Genus { got: g, need: "g ≥ 2" });
    }
    c.check_subset(t, g - 1)?;
    let p = c.prec();
    let wo = c.odd_image(t)?;
    let inv = c.periods.omega1.inverse().ok_or(PeriodError::Singular)?;
    let a = inv.left_mul_vec(&c.grad(&wo));
    let amax = a.iter().map(cabs_f64).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut lhs = Vec::new();
    for &i in t {
        let phi: Vec<Complex> = match c.branch.point(i).finite() {
            Some(x) => (0..g).map(|k| cpow(x, k as i32)).collect(),
            None => (0..g).map(|k| if k + 1 == g { p.cone() } else { p.czero() }).collect(),
        };
        let pmax = phi.iter().map(cabs_f64).fold(0.0, f64::max);
        let mut s = p.czero();
        for (ak, fk) in a.iter().zip(&phi) {
            s += Complex::with_val(p.bits, ak * fk);
        }
        worst = worst.max(cabs_f64(&s) / (amax * pmax).max(FLOOR));
        lhs.push(s);
    }
    let rhs = vec![p.czero(); lhs.len()];
    Ok(IdentityReport::new("hyperplane", lhs, rhs, worst, tol).param("points", labels(t)).param("w_o", wo))
}

fn jacobian_double_ratio(c: &CurveData, wm: &Characteristic, wn: &Characteristic, aux1: &[Characteristic], aux2: &[Characteristic]) -> Complex {
    let p = c.prec();
    let j = |w: &Characteristic, aux: &[Characteristic]| {
        let mut ms = vec![*w];
        ms.extend_from_slice(aux);
        c.table.jacobian(&ms)
    };
    let num = Complex::with_val(p.bits, j(wm, aux1) * j(wn, aux2));
    let den = Complex::with_val(p.bits, j(wm, aux2) * j(wn, aux1));
    num / den
}

/// Images w_i = Π(D∖{W_i}) for D = `d`, and the auxiliary families
/// w′_i = Π(D∖{W_i,W_{d₀}} + W_r), w″_i likewise with W_s (i ≠ d₀).
fn j_alfa_families(c: &CurveData, d: &[usize], r: usize, s: usize) -> Result<(Vec<Characteristic>, Vec<Characteristic>, Vec<Characteristic>), IdentityError> {
    let minus = |i: usize| -> Vec<usize> { d.iter().copied().filter(|&x| x != i).collect() };
    let w: Vec<Characteristic> = d.iter().map(|&i| c.odd_image(&minus(i))).collect::<Result<_, _>>()?;
    let fam = |extra: usize| -> Result<Vec<Characteristic>, IdentityError> {
        d[1..]
            .iter()
            .map(|&i| {
                let mut s: Vec<usize> = d.iter().copied().filter(|&x| x != i && x != d[0]).collect();
                s.push(extra);
                c.odd_image(&s)
            })
            .collect()
    };
    Ok((w, fam(r)?, fam(s)?))
}

/// Jacobian double ratio
/// [w_m,w′][w_n,w″] / ([w_m,w″][w_n,w′]) = μ_{mnsr} for m, n ∈ D and r, s ∉ D.
pub fn check_j_alfa(c: &CurveData, d: &[usize], m: usize, n: usize, r: usize, s: usize, tol: f64) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    c.check_subset(d, g)?;
    let (mi, ni) = match (d.iter().position(|&x| x == m), d.iter().position(|&x| x == n)) {
        (Some(a), Some(b)) if a != b => (a, b),
        _ => return Err(IdentityError::Partition("m, n must be distinct members of D".into())),
    };
    if d.contains(&r) || d.contains(&s) || r == s || r >= c.n() || s >= c.n() {
        return Err(IdentityError::Partition("r, s must be distinct points outside D".into()));
    }
    let (w, w1, w2) = j_alfa_families(c, d, r, s)?;
    let lhs = jacobian_double_ratio(c, &w[mi], &w[ni], &w1, &w2);
    let rhs = mu_invariant(&c.branch, m, n, s, r).map_err(|e| IdentityError::Partition(e.to_string()))?;
    let res = residual(&lhs, &rhs);
    Ok(IdentityReport::new("j_alfa", vec![lhs], vec![rhs], res, tol)
        .param("D", labels(d))
        .param("mnrs", labels(&[m, n, r, s])))
}

/// The same double ratio against even Thetanullwerte:
/// (θ[{m,r}∪X] θ[{n,s}∪X] / (θ[{m,s}∪X] θ[{n,r}∪X]))² = ±μ_{mnrs}
/// for a (g−1)-set X avoiding m, n, r, s; so the Jacobian double ratio is the
/// inverse square of this theta ratio.
pub fn check_j_alfa_theta(c: &CurveData, x: &[usize], m: usize, n: usize, r: usize, s: usize, tol: f64) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    c.check_subset(x, g - 1)?;
    c.check_subset(&[m, n, r, s], 4)?;
    if [m, n, r, s].iter().any(|i| x.contains(i)) {
        return Err(IdentityError::Partition("X must avoid m, n, r, s".into()));
    }
    let p = c.prec();
    let th = |a: usize, b: usize| -> Result<Complex, IdentityError> {
        let mut t = x.to_vec();
        t.push(a);
        t.push(b);
        Ok(c.theta(&c.even_image(&t)?))
    };
    let q = Complex::with_val(p.bits, th(m, r)? * th(n, s)?) / Complex::with_val(p.bits, th(m, s)? * th(n, r)?);
    let lhs = cpow(&q, 2);
    let rhs = mu_invariant(&c.branch, m, n, r, s).map_err(|e| IdentityError::Partition(e.to_string()))?;
    let (res, sign) = residual_pm(&lhs, &rhs);
    Ok(IdentityReport::new("j_alfa_theta", vec![lhs], vec![rhs], res, tol)
        .param("X", labels(x))
        .param("mnrs", labels(&[m, n, r, s]))
        .detail("sign", sign as f64))
}

/// The double ratio does not depend on the other points of D: a second g-set
/// D₂ ∋ m, n avoiding r, s gives the same value (auxiliary families from D).
pub fn check_double_ratio_family(
    c: &CurveData,
    d: &[usize],
    d2: &[usize],
    mnrs: [usize; 4],
    tol: f64,
) -> Result<IdentityReport, IdentityError> {
    let g = c.genus();
    let [m, n, r, s] = mnrs;
    c.check_subset(d, g)?;
    c.check_subset(d2, g)?;
    if d2.contains(&r) || d2.contains(&s) {
        return Err(IdentityError::Partition("second family must avoid r, s".into()));
    }
    let pos = |set: &[usize]| match (set.iter().position(|&x| x == m), set.iter().position(|&x| x == n)) {
        (Some(a), Some(b)) if a != b => Ok((a, b)),
        _ => Err(IdentityError::Partition("m, n must be distinct members of both sets".into())),
    };
    let (mi, ni) = pos(d)?;
    let (mj, nj) = pos(d2)?;
    let (w, w1, w2) = j_alfa_families(c, d, r, s)?;
    let minus = |i: usize| -> Vec<usize> { d2.iter().copied().filter(|&x| x != d2[i]).collect() };
    let vm = c.odd_image(&minus(mj))?;
    let vn = c.odd_image(&minus(nj))?;
    let lhs = jacobian_double_ratio(c, &w[mi], &w[ni], &w1, &w2);
    let rhs = jacobian_double_ratio(c, &vm, &vn, &w1, &w2);
    let res = residual(&lhs, &rhs);
    Ok(IdentityReport::new("double_ratio_family", vec![lhs], vec![rhs], res, tol)
        .param("D", labels(d))
        .param("D2", labels(d2))
        .param("mnrs", labels(&mnrs)))
}

/// Thomae's even formula over every partition {T, T^c} (T ∋ 0).
pub fn thomae_even_sweep(c: &CurveData, tol: f64) -> Result<Vec<IdentityReport>, IdentityError> {
    let g = c.genus();
    k_subsets(c.n(), g + 1)
        .into_par_iter()
        .filter(|t| t.contains(&0))
        .map(|t| check_thomae_even(c, &t, tol))
        .collect()
}

/// Thomae's Jacobian formula over every (g−1)-set.
pub fn thomae_jacobian_sweep(c: &CurveData, tol: f64) -> Result<Vec<IdentityReport>, IdentityError> {
    let g = c.genus();
    k_subsets(c.n(), g - 1).into_par_iter().map(|t| check_thomae_jacobian(c, &t, tol)).collect()
}

/// The quotient forms over every nested pair T_o ⊂ T_e.
pub fn thomae_quotient_sweep(c: &CurveData, tol: f64) -> Result<Vec<IdentityReport>, IdentityError> {
    let g = c.genus();
    let mut pairs = Vec::new();
    for to in k_subsets(c.n(), g - 1) {
        let rest: Vec<usize> = c.complement(&to);
        for ex in k_subsets(rest.len(), 2) {
            let mut te = to.clone();
            te.push(rest[ex[0]]);
            te.push(rest[ex[1]]);
            pairs.push((to.clone(), te));
        }
    }
    pairs.into_par_iter().map(|(to, te)| check_thomae_quotient(c, &to, &te, tol)).collect()
}

/// A random matrix in the Siegel upper half space: Re Z entries in [−½,½],
/// Im Z = AᵀA + I/2 for A with entries in [−½,½].
pub fn random_siegel<R: Rng + ?Sized>(g: usize, prec: Precision, rng: &mut R) -> RiemannMatrix {
    let mut re = vec![0.0; g * g];
    for i in 0..g {
        for j in i..g {
            let v = rng.gen_range(-0.5..0.5);
            re[i * g + j] = v;
            re[j * g + i] = v;
        }
    }
    let a: Vec<f64> = (0..g * g).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let mut im = vec![0.0; g * g];
    for i in 0..g {
        for j in 0..g {
            let mut s = if i == j { 0.5 } else { 0.0 };
            for k in 0..g {
                s += a[k * g + i] * a[k * g + j];
            }
            im[i * g + j] = s;
        }
    }
    RiemannMatrix::from_f64(g, &re, &im, prec).expect("positive definite by construction")
}

/// Rosenhain on `count` seeded-random degree-2 matrices, all 15 pairs each.
/// Every report carries the seed and the sample number.
pub fn rosenhain_random_sweep(seed: u64, count: usize, prec: Precision, tol: f64) -> Result<Vec<IdentityReport>, IdentityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs: Vec<RiemannMatrix> = (0..count).map(|_| random_siegel(2, prec, &mut rng)).collect();
    let per: Vec<Result<Vec<IdentityReport>, IdentityError>> = zs
        .par_iter()
        .enumerate()
        .map(|(k, z)| {
            Ok(rosenhain_sweep(z, tol)?
                .into_iter()
                .map(|r| r.param("seed", seed).param("sample", k))
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}
