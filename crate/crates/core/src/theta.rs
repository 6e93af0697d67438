//! Riemann theta functions with half-integer characteristics.
//!
//! θ[m](z, Z) = Σ_n exp(πi (n+m′)·Z·(n+m′) + 2πi (n+m′)·(z+m″)).
//!
//! The series is truncated to the lattice points with ‖n+m′‖ ≤ R in the norm
//! x ↦ π x·Im(Z)·x, with R picked from a packing bound on the Gaussian tail so
//! that the discarded part is below the requested `eps`. Enumeration runs in
//! f64 (Fincke–Pohst); the terms themselves are summed at working precision.

use std::fmt;

use rayon::prelude::*;
use rug::{Complex, Float};
use thiserror::Error;

use crate::linalg::{cholesky_f64, cholesky_mp, sym_eigenvalues, CMatrix};
use crate::num::{cabs_f64, Precision};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("matrix is not symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("imaginary part is not positive definite")]
    NotPositiveDefinite,
    #[error("truncation needs {needed} lattice points, above the cap {cap}")]
    RadiusCap { needed: usize, cap: usize },
    #[error("characteristic {0} is even; an odd one is required")]
    NotOdd(Characteristic),
    #[error("genus mismatch: expected {expected}, got {got}")]
    GenusMismatch { expected: usize, got: usize },
    #[error("expected {expected} characteristics, got {got}")]
    WrongCount { expected: usize, got: usize },
}

/// A theta characteristic m = (m′, m″) with entries in {0, ½}.
///
/// Stored as two bitmasks; bit k set means the k-th entry equals ½.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Characteristic {
    pub g: u8,
    pub top: u8,
    pub bottom: u8,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Characteristic {
    pub fn zero(g: usize) -> Self {
        Characteristic { g: g as u8, top: 0, bottom: 0 }
    }

    /// From explicit 0/1 vectors (1 meaning ½).
    pub fn from_bits(top: &[u8], bottom: &[u8]) -> Self {
        assert_eq!(top.len(), bottom.len());
        let mut t = 0u8;
        let mut b = 0u8;
        for k in 0..top.len() {
            if top[k] & 1 == 1 {
                t |= 1 << k;
            }
            if bottom[k] & 1 == 1 {
                b |= 1 << k;
            }
        }
        Characteristic { g: top.len() as u8, top: t, bottom: b }
    }

    pub fn genus(&self) -> usize {
        self.g as usize
    }

    pub fn top_bit(&self, k: usize) -> u8 {
        (self.top >> k) & 1
    }

    pub fn bottom_bit(&self, k: usize) -> u8 {
        (self.bottom >> k) & 1
    }

    /// Position in the lexicographic order of the 2g bits (m′₁ most significant).
    pub fn index(&self) -> usize {
        let g = self.genus();
        let mut idx = 0usize;
        for k in 0..g {
            idx = (idx << 1) | self.top_bit(k) as usize;
        }
        for k in 0..g {
            idx = (idx << 1) | self.bottom_bit(k) as usize;
        }
        idx
    }

    pub fn from_index(g: usize, idx: usize) -> Self {
        let mut top = 0u8;
        let mut bottom = 0u8;
        for k in 0..g {
            if (idx >> (2 * g - 1 - k)) & 1 == 1 {
                top |= 1 << k;
            }
            if (idx >> (g - 1 - k)) & 1 == 1 {
                bottom |= 1 << k;
            }
        }
        Characteristic { g: g as u8, top, bottom }
    }

    pub fn parity(&self) -> Parity {
        if (self.top & self.bottom).count_ones() % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// e(m) = ±1
    pub fn sign(&self) -> i32 {
        if self.is_odd() {
            -1
        } else {
            1
        }
    }

    /// Componentwise sum mod 1.
    pub fn add(&self, o: &Characteristic) -> Characteristic {
        assert_eq!(self.g, o.g);
        Characteristic { g: self.g, top: self.top ^ o.top, bottom: self.bottom ^ o.bottom }
    }

    pub fn is_zero(&self) -> bool {
        self.top == 0 && self.bottom == 0
    }

    /// Block characteristic for a block-diagonal period matrix diag(Z₁, Z₂).
    pub fn direct_sum(&self, o: &Characteristic) -> Characteristic {
        let g1 = self.g;
        Characteristic {
            g: self.g + o.g,
            top: self.top | (o.top << g1),
            bottom: self.bottom | (o.bottom << g1),
        }
    }

    pub fn all(g: usize) -> impl Iterator<Item = Characteristic> {
        (0..1usize << (2 * g)).map(move |i| Characteristic::from_index(g, i))
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.genus();
        let t: String = (0..g).map(|k| char::from(b'0' + self.top_bit(k))).collect();
        let b: String = (0..g).map(|k| char::from(b'0' + self.bottom_bit(k))).collect();
        write!(f, "[{}|{}]", t, b)
    }
}

pub fn parity(m: &Characteristic) -> Parity {
    m.parity()
}

pub fn char_add(a: &Characteristic, b: &Characteristic) -> Characteristic {
    a.add(b)
}

pub fn odd_characteristics(g: usize) -> Vec<Characteristic> {
    Characteristic::all(g).filter(|m| m.is_odd()).collect()
}

pub fn even_characteristics(g: usize) -> Vec<Characteristic> {
    Characteristic::all(g).filter(|m| m.is_even()).collect()
}

/// e(m₁,m₂,m₃) = e(m₁)e(m₂)e(m₃)e(m₁+m₂+m₃) = −1.
pub fn is_azygetic(a: &Characteristic, b: &Characteristic, c: &Characteristic) -> bool {
    a.sign() * b.sign() * c.sign() * a.add(b).add(c).sign() == -1
}

/// Every triplet of the sequence is azygetic.
pub fn azygetic_sequence(ms: &[Characteristic]) -> bool {
    let n = ms.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !is_azygetic(&ms[i], &ms[j], &ms[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// A point of the Siegel upper half space, together with the data the lattice
/// enumeration needs.
#[derive(Clone, Debug)]
pub struct RiemannMatrix {
    g: usize,
    entries: Vec<Complex>,
    prec: Precision,
    /// π·Im Z in f64.
    quad: Vec<f64>,
    /// Upper-triangular Fincke–Pohst coefficients of `quad`.
    fp: Vec<f64>,
    /// Shortest nonzero vector length of the lattice in the `quad` norm.
    rho: f64,
    /// Smallest eigenvalue of `quad`.
    lambda_min: f64,
}

/// Default bound on the number of lattice points in one truncated sum.
pub const DEFAULT_POINT_CAP: usize = 4_000_000;

impl RiemannMatrix {
    /// Validate and symmetrize. Entries are row-major.
    pub fn new(g: usize, entries: Vec<Complex>) -> Result<Self, ThetaError> {
        if entries.len() != g * g {
            return Err(ThetaError::GenusMismatch { expected: g * g, got: entries.len() });
        }
        let bits = entries.iter().map(|z| z.prec().0).max().unwrap_or(53);
        let prec = Precision::bits(bits);
        let mut e: Vec<Complex> = entries.into_iter().map(|z| Complex::with_val(prec.bits, z)).collect();
        let scale = e.iter().map(cabs_f64).fold(0.0, f64::max).max(1e-300);
        let mut defect: f64 = 0.0;
        for i in 0..g {
            for j in i + 1..g {
                let d = Complex::with_val(prec.bits, &e[i * g + j] - &e[j * g + i]);
                defect = defect.max(cabs_f64(&d) / scale);
                let avg = Complex::with_val(prec.bits, &e[i * g + j] + &e[j * g + i]) / 2u32;
                e[i * g + j] = avg.clone();
                e[j * g + i] = avg;
            }
        }
        let sym_tol = (prec.epsilon() * 1e6).max(1e-9);
        if defect > sym_tol {
            return Err(ThetaError::NotSymmetric(defect));
        }
        let y: Vec<Float> = e.iter().map(|z| z.imag().clone()).collect();
        if cholesky_mp(&y, g).is_none() {
            return Err(ThetaError::NotPositiveDefinite);
        }
        let pi = std::f64::consts::PI;
        let quad: Vec<f64> = y.iter().map(|v| pi * v.to_f64()).collect();
        let l = cholesky_f64(&quad, g).ok_or(ThetaError::NotPositiveDefinite)?;
        let lambda_min = sym_eigenvalues(&quad, g)[0];
        if lambda_min <= 0.0 {
            return Err(ThetaError::NotPositiveDefinite);
        }
        // U = Lᵀ; Q(x) = Σ_i U_ii² (x_i + Σ_{j>i} U_ij/U_ii x_j)²
        let mut fp = vec![0.0; g * g];
        for i in 0..g {
            let uii = l[i * g + i];
            fp[i * g + i] = uii * uii;
            for j in i + 1..g {
                fp[i * g + j] = l[j * g + i] / uii;
            }
        }
        let mut z = RiemannMatrix { g, entries: e, prec, quad, fp, rho: 0.0, lambda_min };
        z.rho = z.shortest_vector();
        Ok(z)
    }

    pub fn from_f64(g: usize, re: &[f64], im: &[f64], prec: Precision) -> Result<Self, ThetaError> {
        let entries = (0..g * g).map(|k| prec.complex(re[k], im[k])).collect();
        Self::new(g, entries)
    }

    pub fn from_cmatrix(m: &CMatrix) -> Result<Self, ThetaError> {
        Self::new(m.rows, m.data.clone())
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn entry(&self, i: usize, j: usize) -> &Complex {
        &self.entries[i * self.g + j]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix { rows: self.g, cols: self.g, data: self.entries.clone() }
    }

    /// Block-diagonal matrix diag(self, other).
    pub fn block_diag(&self, other: &RiemannMatrix) -> Result<RiemannMatrix, ThetaError> {
        let g = self.g + other.g;
        let p = Precision::bits(self.prec.bits.max(other.prec.bits));
        let mut e = vec![p.czero(); g * g];
        for i in 0..self.g {
            for j in 0..self.g {
                e[i * g + j] = Complex::with_val(p.bits, self.entry(i, j));
            }
        }
        for i in 0..other.g {
            for j in 0..other.g {
                e[(i + self.g) * g + j + self.g] = Complex::with_val(p.bits, other.entry(i, j));
            }
        }
        RiemannMatrix::new(g, e)
    }

    fn quad_form(&self, x: &[f64]) -> f64 {
        let g = self.g;
        let mut s = 0.0;
        for i in 0..g {
            for j in 0..g {
                s += x[i] * self.quad[i * g + j] * x[j];
            }
        }
        s
    }

    fn shortest_vector(&self) -> f64 {
        let g = self.g;
        let r2 = (0..g).map(|i| self.quad[i * g + i]).fold(f64::INFINITY, f64::min);
        let mut best = r2;
        let zero = vec![0.0; g];
        self.enumerate(&zero, r2 * (1.0 + 1e-9), usize::MAX, &mut |n: &[i64], q| {
            if n.iter().any(|&v| v != 0) && q < best {
                best = q;
            }
        })
        .ok();
        best.sqrt()
    }

    /// Visit every x = n + c with Q(x) ≤ r2; callback gets (n, Q(x)).
    fn enumerate(
        &self,
        c: &[f64],
        r2: f64,
        cap: usize,
        f: &mut dyn FnMut(&[i64], f64),
    ) -> Result<usize, ThetaError> {
        let g = self.g;
        let mut n = vec![0i64; g];
        let mut count = 0usize;
        self.enum_level(g as isize - 1, c, r2, 0.0, &mut n, &mut count, cap, f)?;
        Ok(count)
    }

    #[allow(clippy::too_many_arguments)]
    fn enum_level(
        &self,
        level: isize,
        c: &[f64],
        r2: f64,
        acc: f64,
        n: &mut Vec<i64>,
        count: &mut usize,
        cap: usize,
        f: &mut dyn FnMut(&[i64], f64),
    ) -> Result<(), ThetaError> {
        if level < 0 {
            *count += 1;
            if *count > cap {
                return Err(ThetaError::RadiusCap { needed: *count, cap });
            }
            f(n, acc);
            return Ok(());
        }
        let g = self.g;
        let i = level as usize;
        let mut center = 0.0;
        for j in i + 1..g {
            center -= self.fp[i * g + j] * (n[j] as f64 + c[j]);
        }
        let qii = self.fp[i * g + i];
        let rem = (r2 - acc).max(0.0);
        let w = (rem / qii).sqrt();
        let lo = (center - c[i] - w).ceil() as i64;
        let hi = (center - c[i] + w).floor() as i64;
        for v in lo..=hi {
            let d = v as f64 + c[i] - center;
            let t = acc + qii * d * d;
            if t <= r2 {
                n[i] = v;
                self.enum_level(level - 1, c, r2, t, n, count, cap, f)?;
            }
        }
        n[i] = 0;
        Ok(())
    }
}

/// Upper bound for Σ_{x ∈ L+c, ‖x‖ > R} exp(−‖x‖²) over a translated lattice
/// whose minimal distance is `rho` (valid for R ≥ 3ρ/2).
///
/// Balls of radius ρ/2 around the points are disjoint, and on each ball the
/// integrand exp(−(|u|−ρ/2)²) dominates the point's term. Integrating over
/// |u| ≥ R−ρ/2 and using r ≤ 2(r−ρ/2) for r ≥ ρ gives
/// g·2^{g−2}(2/ρ)^g Γ(g/2, (R−ρ)²).
fn gaussian_tail(g: usize, rho: f64, r: f64) -> f64 {
    if r < 1.5 * rho {
        return f64::INFINITY;
    }
    let s = (r - rho) * (r - rho);
    let a = Float::with_val(64, g as f64 / 2.0);
    let x = Float::with_val(64, s);
    let gam = a.gamma_inc(&x).to_f64();
    g as f64 * 2f64.powi(g as i32 - 2) * (2.0 / rho).powi(g as i32) * gam
}

/// Smallest radius whose tail bound is below `eps` (bisection on R).
fn radius_for(g: usize, rho: f64, eps: f64) -> f64 {
    let mut lo = 1.5 * rho;
    let mut hi = lo.max(1.0);
    while gaussian_tail(g, rho, hi) > eps {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if gaussian_tail(g, rho, mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Truncation radii for values and for gradients at the same `eps`.
fn radii(z: &RiemannMatrix, eps: f64, gradient: bool, shift_factor: f64) -> f64 {
    let g = z.g;
    let eps_v = eps / shift_factor;
    let r_val = radius_for(g, z.rho, eps_v);
    if !gradient {
        return r_val;
    }
    // |2πx| ≤ 2π ‖x‖/√λmin and t·e^{−t²} ≤ e^{−1/2}·e^{−t²/2}
    let c = 2.0 * std::f64::consts::PI / z.lambda_min.sqrt() * (-0.5f64).exp();
    let r_grad = std::f64::consts::SQRT_2 * radius_for(g, z.rho / std::f64::consts::SQRT_2, eps_v / c);
    r_val.max(r_grad)
}

/// Theta evaluation options.
#[derive(Clone, Copy, Debug)]
pub struct ThetaConfig {
    pub point_cap: usize,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        ThetaConfig { point_cap: DEFAULT_POINT_CAP }
    }
}

/// i^k · z
fn times_i_pow(z: &Complex, k: i64) -> Complex {
    let p = z.prec().0;
    match k.rem_euclid(4) {
        0 => z.clone(),
        1 => Complex::with_val(p, (-z.imag().clone(), z.real().clone())),
        2 => Complex::with_val(p, -z),
        _ => Complex::with_val(p, (z.imag().clone(), -z.real().clone())),
    }
}

/// exp(πi x·Z·x) for half-integer vectors x given as 2x ∈ ℤ^g.
fn gauss_term(z: &RiemannMatrix, twice_x: &[i64], bits: u32) -> Complex {
    let g = z.g;
    let mut s = Complex::new(bits);
    for i in 0..g {
        if twice_x[i] == 0 {
            continue;
        }
        // diagonal plus twice the upper triangle
        let d = twice_x[i] * twice_x[i];
        s += Complex::with_val(bits, z.entry(i, i) * d);
        for j in i + 1..g {
            let c = 2 * twice_x[i] * twice_x[j];
            if c != 0 {
                s += Complex::with_val(bits, z.entry(i, j) * c);
            }
        }
    }
    // x·Z·x = s/4; exponent πi s/4
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let arg = Complex::with_val(bits, &s * &pi) / 4u32;
    let arg = Complex::with_val(bits, (-arg.imag().clone(), arg.real().clone()));
    arg.exp()
}

/// θ[m](z, Z) with absolute truncation error below `eps`.
pub fn theta_value(m: &Characteristic, z: &[Complex], zm: &RiemannMatrix, eps: f64) -> Result<Complex, ThetaError> {
    theta_value_with(m, z, zm, eps, ThetaConfig::default())
}

pub fn theta_value_with(
    m: &Characteristic,
    z: &[Complex],
    zm: &RiemannMatrix,
    eps: f64,
    cfg: ThetaConfig,
) -> Result<Complex, ThetaError> {
    let g = zm.g;
    check_genus(m, g)?;
    if z.len() != g {
        return Err(ThetaError::GenusMismatch { expected: g, got: z.len() });
    }
    let bits = zm.prec.bits + 10;
    // Peak of |term| sits at x = −Y⁻¹ Im z; magnitude picks up exp(π a·Y·a).
    let y: Vec<f64> = zm.entries.iter().map(|v| v.imag().to_f64()).collect();
    let imz: Vec<f64> = z.iter().map(|v| v.imag().to_f64()).collect();
    let a = solve_f64(&y, &imz, g);
    let mut ya = 0.0;
    for i in 0..g {
        for j in 0..g {
            ya += a[i] * y[i * g + j] * a[j];
        }
    }
    let shift_factor = (std::f64::consts::PI * ya).exp().max(1.0);
    let r = radii(zm, eps, false, shift_factor);
    let c: Vec<f64> = (0..g).map(|k| 0.5 * m.top_bit(k) as f64 + a[k]).collect();
    let mut pts: Vec<Vec<i64>> = Vec::new();
    zm.enumerate(&c, r * r, cfg.point_cap, &mut |n: &[i64], _| pts.push(n.to_vec()))?;
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let zz: Vec<Complex> = z.iter().map(|v| Complex::with_val(bits, v)).collect();
    let sum = pts
        .par_iter()
        .map(|n| {
            let tx: Vec<i64> = (0..g).map(|k| 2 * n[k] + m.top_bit(k) as i64).collect();
            let e = gauss_term(zm, &tx, bits);
            // 2πi x·(z + m″) = πi (2x)·z + πi Σ x_k m″_k·2/… handled as i-powers
            let mut lin = Complex::new(bits);
            for k in 0..g {
                lin += Complex::with_val(bits, &zz[k] * tx[k]);
            }
            let lin = Complex::with_val(bits, &lin * &pi);
            let lin = Complex::with_val(bits, (-lin.imag().clone(), lin.real().clone())).exp();
            let k4: i64 = (0..g).map(|k| tx[k] * m.bottom_bit(k) as i64).sum();
            // exp(2πi x·m″) = exp(πi/2 · (2x)·(2m″)) = i^{k4}
            times_i_pow(&Complex::with_val(bits, &e * &lin), k4)
        })
        .reduce(|| Complex::new(bits), |a, b| a + b);
    Ok(Complex::with_val(zm.prec.bits, sum))
}

/// ∂θ[m]/∂z_k(0, Z) for odd m, by termwise differentiation.
pub fn theta_gradient0(m: &Characteristic, zm: &RiemannMatrix, eps: f64) -> Result<Vec<Complex>, ThetaError> {
    check_genus(m, zm.g)?;
    if !m.is_odd() {
        return Err(ThetaError::NotOdd(*m));
    }
    let table = NullwerteTable::for_tops(zm, eps, &[m.top], ThetaConfig::default())?;
    Ok(table.gradient(m).unwrap().to_vec())
}

/// det J[m₁,…,m_g](Z).
pub fn jacobian_nullwerte(ms: &[Characteristic], zm: &RiemannMatrix, eps: f64) -> Result<Complex, ThetaError> {
    if ms.len() != zm.g {
        return Err(ThetaError::WrongCount { expected: zm.g, got: ms.len() });
    }
    for m in ms {
        check_genus(m, zm.g)?;
        if !m.is_odd() {
            return Err(ThetaError::NotOdd(*m));
        }
    }
    let mut tops: Vec<u8> = ms.iter().map(|m| m.top).collect();
    tops.sort();
    tops.dedup();
    let table = NullwerteTable::for_tops(zm, eps, &tops, ThetaConfig::default())?;
    Ok(table.jacobian(ms))
}

fn check_genus(m: &Characteristic, g: usize) -> Result<(), ThetaError> {
    if m.genus() != g {
        return Err(ThetaError::GenusMismatch { expected: g, got: m.genus() });
    }
    Ok(())
}

fn solve_f64(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let l = cholesky_f64(a, n).expect("positive definite");
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// All Thetanullwerte θ[m](0,Z) and all odd gradients at 0 for one Z.
///
/// Terms exp(πi x·Z·x) depend only on m′, so each lattice sum is shared by the
/// 2^g characteristics with that m′; the m″ dependence is a power of i.
#[derive(Clone, Debug)]
pub struct NullwerteTable {
    g: usize,
    prec: Precision,
    values: Vec<Option<Complex>>,
    gradients: Vec<Option<Vec<Complex>>>,
}

impl NullwerteTable {
    pub fn new(zm: &RiemannMatrix, eps: f64) -> Result<Self, ThetaError> {
        let tops: Vec<u8> = (0..1u8 << zm.g).collect();
        Self::for_tops(zm, eps, &tops, ThetaConfig::default())
    }

    pub fn with_config(zm: &RiemannMatrix, eps: f64, cfg: ThetaConfig) -> Result<Self, ThetaError> {
        let tops: Vec<u8> = (0..1u8 << zm.g).collect();
        Self::for_tops(zm, eps, &tops, cfg)
    }

    fn for_tops(zm: &RiemannMatrix, eps: f64, tops: &[u8], cfg: ThetaConfig) -> Result<Self, ThetaError> {
        let g = zm.g;
        let bits = zm.prec.bits + 10;
        let r = radii(zm, eps, true, 1.0);
        let per_top: Vec<Result<(u8, Vec<Complex>, Vec<Vec<Complex>>), ThetaError>> = tops
            .par_iter()
            .map(|&top| {
                let c: Vec<f64> = (0..g).map(|k| 0.5 * ((top >> k) & 1) as f64).collect();
                let mut pts: Vec<Vec<i64>> = Vec::new();
                zm.enumerate(&c, r * r, cfg.point_cap, &mut |n: &[i64], _| pts.push(n.to_vec()))?;
                let nb = 1usize << g;
                let partial: Vec<(Vec<Complex>, Vec<Vec<Complex>>)> = pts
                    .par_chunks(256)
                    .map(|chunk| {
                        let mut vals = vec![Complex::new(bits); nb];
                        let mut grads = vec![vec![Complex::new(bits); g]; nb];
                        for n in chunk {
                            let tx: Vec<i64> = (0..g).map(|k| 2 * n[k] + ((top >> k) & 1) as i64).collect();
                            let e = gauss_term(zm, &tx, bits);
                            for bottom in 0..nb {
                                let k4: i64 = (0..g).map(|k| tx[k] * ((bottom >> k) & 1) as i64).sum();
                                let t = times_i_pow(&e, k4);
                                let odd = ((top as usize) & bottom).count_ones() % 2 == 1;
                                if odd {
                                    // 2πi x_k = πi (2x)_k
                                    for k in 0..g {
                                        if tx[k] != 0 {
                                            grads[bottom][k] += Complex::with_val(bits, &t * tx[k]);
                                        }
                                    }
                                }
                                vals[bottom] += t;
                            }
                        }
                        (vals, grads)
                    })
                    .collect();
                let mut vals = vec![Complex::new(bits); nb];
                let mut grads = vec![vec![Complex::new(bits); g]; nb];
                for (v, gr) in partial {
                    for b in 0..nb {
                        vals[b] += &v[b];
                        for k in 0..g {
                            grads[b][k] += &gr[b][k];
                        }
                    }
                }
                let pi_i = Complex::with_val(bits, (0, Float::with_val(bits, rug::float::Constant::Pi)));
                for gr in grads.iter_mut() {
                    for v in gr.iter_mut() {
                        *v = Complex::with_val(zm.prec.bits, &*v * &pi_i);
                    }
                }
                let vals = vals.into_iter().map(|v| Complex::with_val(zm.prec.bits, v)).collect();
                Ok((top, vals, grads))
            })
            .collect();
        let n = 1usize << (2 * g);
        let mut values = vec![None; n];
        let mut gradients = vec![None; n];
        for res in per_top {
            let (top, vals, grads) = res?;
            for (bottom, (v, gr)) in vals.into_iter().zip(grads).enumerate() {
                let m = Characteristic { g: g as u8, top, bottom: bottom as u8 };
                let idx = m.index();
                if m.is_odd() {
                    gradients[idx] = Some(gr);
                }
                values[idx] = Some(v);
            }
        }
        Ok(NullwerteTable { g, prec: zm.prec, values, gradients })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// θ[m](0,Z); for odd m this is the raw (cancelling) lattice sum.
    pub fn value(&self, m: &Characteristic) -> &Complex {
        self.values[m.index()].as_ref().expect("characteristic not in table")
    }

    pub fn gradient(&self, m: &Characteristic) -> Option<&[Complex]> {
        self.gradients[m.index()].as_deref()
    }

    /// Jacobian Nullwert [m₁,…,m_g].
    pub fn jacobian(&self, ms: &[Characteristic]) -> Complex {
        let rows: Vec<Vec<Complex>> = ms.iter().map(|m| self.gradient(m).expect("odd characteristic").to_vec()).collect();
        CMatrix::from_rows(rows).det()
    }

    /// max |θ[m](0)| over even m.
    pub fn max_even(&self) -> f64 {
        even_characteristics(self.g).iter().map(|m| cabs_f64(self.value(m))).fold(0.0, f64::max)
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }
}

/// Tail bound exposed for tests and diagnostics: the radius used for `eps`.
pub fn truncation_radius(zm: &RiemannMatrix, eps: f64) -> f64 {
    radii(zm, eps, true, 1.0)
}

/// Quadratic form value π x·Y·x (f64), handy for tests of the enumeration.
pub fn lattice_norm2(zm: &RiemannMatrix, x: &[f64]) -> f64 {
    zm.quad_form(x)
}
