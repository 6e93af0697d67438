//! Period matrices of hyperelliptic curves with real branch points, and the
//! dictionary between Weierstrass points and theta characteristics.
//!
//! Conventions (every Nullwert sign downstream inherits them):
//!
//! * the curve is Y² = ∏(X − e) over the finite branch points, sorted
//!   increasingly as e₁ < … < e_n; a branch point at ∞ makes n = 2g+1;
//! * y on the real axis is the boundary value from the upper half plane,
//!   y(x + i0) = i^{#{e > x}} · √|f(x)|;
//! * c_j is twice the integral of x^k dx / y over [e_j, e_{j+1}];
//!   a_k = c_{2k−1}, b_k = c_{2k} + c_{2k+2} + … + c_{2g}, i.e.
//!   Ω₁[j][k] = ∫_{a_k} x^j dx/y and Ω₂ collects the b-cycles;
//! * if Im(Ω₁⁻¹Ω₂) comes out negative definite, Ω₂ is negated (orientation);
//! * the Abel–Jacobi image of e_{j+1} − e₁ is Σ_{i≤j} c_i/2 and of ∞ − e₁ the
//!   extra ray integral from e_n.
//!
//! Integrals use Gauss–Chebyshev nodes, which absorb the inverse square-root
//! endpoint singularities; the node count doubles until two successive values
//! agree to working precision.

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float};
use thiserror::Error;

use crate::algebra::ProjPoint;
use crate::linalg::CMatrix;
use crate::num::cabs_f64;
use crate::symcurve::BranchSet;
use crate::theta::{Characteristic, ThetaError};
use crate::theta::RiemannMatrix;

#[derive(Debug, Error)]
pub enum PeriodError {
    #[error("real branch points required (point {0} is not real)")]
    NonReal(usize),
    #[error("branch points {0} and {1} are too close ({2:e})")]
    Collision(usize, usize, f64),
    #[error("quadrature did not converge with {nodes} nodes")]
    NonConvergence { nodes: usize },
    #[error("period matrix Omega1 is singular")]
    Singular,
    #[error("imaginary part of the period matrix is indefinite")]
    Indefinite,
    #[error("half-period off the half-lattice by {0:e}")]
    NotHalfPeriod(f64),
    #[error("no calibration shift makes every image odd")]
    NoShift,
    #[error("calibration shift is ambiguous: {0:?}")]
    AmbiguousShift(Vec<String>),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

/// Maximum node count per segment.
pub const MAX_NODES: usize = 1 << 16;

/// Periods Ω₁, Ω₂ and Z = Ω₁⁻¹Ω₂ of a curve, plus the Abel–Jacobi images of
/// its Weierstrass points.
#[derive(Clone, Debug)]
pub struct PeriodData {
    pub g: usize,
    pub omega1: CMatrix,
    pub omega2: CMatrix,
    pub z: RiemannMatrix,
    /// Condition number of Ω₁ in the max-entry norm.
    pub condition: f64,
    /// Relative asymmetry of Ω₁⁻¹Ω₂ before symmetrization.
    pub symmetry_defect: f64,
    /// `order[k]` is the input index of the k-th smallest branch point (∞ last).
    pub order: Vec<usize>,
    /// Abel–Jacobi vector (∫ from the smallest branch point) per input index.
    pub abel_jacobi: Vec<Vec<Complex>>,
    /// Largest node count used on any segment.
    pub nodes: usize,
}

/// Characteristic of a half period c_i per Weierstrass point, and the shift Δ
/// making Δ + Σ_{i∈S} c_i odd for every (g−1)-subset S of points.
#[derive(Clone, Debug)]
pub struct CharacteristicDictionary {
    pub g: usize,
    pub shift: Characteristic,
    pub points: Vec<Characteristic>,
}

fn real_points(b: &BranchSet) -> Result<(Vec<Float>, Vec<usize>, Option<usize>), PeriodError> {
    let prec = b.prec();
    let mut finite: Vec<(Float, usize)> = Vec::new();
    let mut inf = None;
    for (k, p) in b.points().iter().enumerate() {
        match p {
            ProjPoint::Infinity => inf = Some(k),
            ProjPoint::Finite(z) => {
                let scale = cabs_f64(z).max(1.0);
                if z.imag().to_f64().abs() > prec.epsilon() * 1e3 * scale {
                    return Err(PeriodError::NonReal(k));
                }
                finite.push((z.real().clone(), k));
            }
        }
    }
    finite.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let scale = finite.iter().map(|(x, _)| x.to_f64().abs()).fold(1.0, f64::max);
    let gap_tol = prec.epsilon().sqrt() * scale;
    for w in finite.windows(2) {
        let gap = Float::with_val(prec.bits, &w[1].0 - &w[0].0).to_f64();
        if gap < gap_tol {
            return Err(PeriodError::Collision(w[0].1, w[1].1, gap));
        }
    }
    let order: Vec<usize> = finite.iter().map(|(_, k)| *k).chain(inf).collect();
    Ok((finite.into_iter().map(|(x, _)| x).collect(), order, inf))
}

fn chebyshev_cos(bits: u32, n: usize, l: usize) -> Float {
    let pi = Float::with_val(bits, Constant::Pi);
    let th = pi * (2 * l + 1) as u32 / (2 * n) as u32;
    th.cos()
}

/// (π/N) Σ_l F(node_l) for k = 0..g, with F a vector-valued integrand.
fn chebyshev_sum<F>(bits: u32, n: usize, g: usize, f: F) -> Vec<Float>
where
    F: Fn(&Float) -> Vec<Float> + Sync,
{
    let parts: Vec<Vec<Float>> = (0..n)
        .into_par_iter()
        .with_min_len(16)
        .map(|l| f(&chebyshev_cos(bits, n, l)))
        .collect();
    let pi = Float::with_val(bits, Constant::Pi);
    (0..g)
        .map(|k| {
            let mut s = Float::new(bits);
            for p in &parts {
                s += &p[k];
            }
            s * &pi / n as u32
        })
        .collect()
}

/// Adaptive driver: doubles N until all components agree to `tol` relative.
fn converge<F>(bits: u32, g: usize, tol: f64, f: F) -> Result<(Vec<Float>, usize), PeriodError>
where
    F: Fn(&Float) -> Vec<Float> + Sync,
{
    let mut n = 16;
    let mut prev = chebyshev_sum(bits, n, g, &f);
    loop {
        n *= 2;
        let cur = chebyshev_sum(bits, n, g, &f);
        let scale = cur.iter().map(|v| v.to_f64().abs()).fold(1e-300, f64::max);
        let err = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| Float::with_val(bits, a - b).to_f64().abs())
            .fold(0.0, f64::max);
        if err <= tol * scale {
            return Ok((cur, n));
        }
        if n >= MAX_NODES {
            return Err(PeriodError::NonConvergence { nodes: n });
        }
        prev = cur;
    }
}

/// ∫_{e_j}^{e_{j+1}} x^k / √|f(x)| dx for k < g (real, unsigned).
fn segment(roots: &[Float], j: usize, g: usize, bits: u32, tol: f64) -> Result<(Vec<Float>, usize), PeriodError> {
    let a = &roots[j];
    let b = &roots[j + 1];
    let mid = Float::with_val(bits, a + b) / 2u32;
    let half = Float::with_val(bits, b - a) / 2u32;
    let others: Vec<&Float> = roots.iter().enumerate().filter(|(i, _)| *i != j && *i != j + 1).map(|(_, r)| r).collect();
    converge(bits, g, tol, |c| {
        let x = Float::with_val(bits, &half * c) + &mid;
        let mut h = Float::with_val(bits, 1);
        for r in &others {
            h *= Float::with_val(bits, &x - *r);
        }
        let w = h.abs().sqrt().recip();
        let mut out = Vec::with_capacity(g);
        let mut xp = Float::with_val(bits, 1);
        for _ in 0..g {
            out.push(Float::with_val(bits, &xp * &w));
            xp *= &x;
        }
        out
    })
}

/// ∫_{e_n}^{∞} x^k / √f(x) dx via x = e_n + s/(1−s).
fn ray(roots: &[Float], g: usize, bits: u32, tol: f64) -> Result<(Vec<Float>, usize), PeriodError> {
    let e = roots.last().unwrap();
    let others = &roots[..roots.len() - 1];
    converge(bits, g, tol, |c| {
        let s = Float::with_val(bits, c + 1u32) / 2u32;
        let one_minus = Float::with_val(bits, 1u32 - &s);
        let x = Float::with_val(bits, &s / &one_minus) + e;
        let mut h = Float::with_val(bits, 1);
        for r in others {
            h *= Float::with_val(bits, &x - r);
        }
        let w = (h.sqrt() * &one_minus).recip();
        let mut out = Vec::with_capacity(g);
        let mut xp = Float::with_val(bits, 1);
        for _ in 0..g {
            out.push(Float::with_val(bits, &xp * &w));
            xp *= &x;
        }
        out
    })
}

/// i^{-q} · v for real v.
fn rotate(v: &Float, q: usize, bits: u32) -> Complex {
    let z = Complex::with_val(bits, (v, 0));
    match q % 4 {
        0 => z,
        1 => Complex::with_val(bits, (0, -v.clone())),
        2 => -z,
        _ => Complex::with_val(bits, (0, v)),
    }
}

/// Periods of x^k dx/y (k < g) on Y² = ∏(X − α) over the branch points of `b`,
/// all of which must be real or ∞. Works at the branch set's precision.
pub fn period_matrix(b: &BranchSet) -> Result<PeriodData, PeriodError> {
    let g = b.genus();
    let prec = b.prec();
    let (roots, order, inf) = real_points(b)?;
    let n = roots.len();
    let wbits = prec.bits + 32;
    let roots: Vec<Float> = roots.into_iter().map(|r| Float::with_val(wbits, r)).collect();
    let tol = prec.epsilon();

    let segs: Vec<Result<(Vec<Float>, usize), PeriodError>> =
        (0..n - 1).into_par_iter().map(|j| segment(&roots, j, g, wbits, tol)).collect();
    let mut nodes = 0;
    let mut c: Vec<Vec<Complex>> = Vec::with_capacity(n - 1);
    for (j, s) in segs.into_iter().enumerate() {
        let (vals, nn) = s?;
        nodes = nodes.max(nn);
        // roots above the segment: n − j − 1
        let q = n - j - 1;
        c.push(vals.iter().map(|v| rotate(&(v.clone() * 2u32), q, wbits)).collect());
    }

    let sum_cols = |from: usize| -> Vec<Complex> {
        let mut acc = vec![Complex::new(wbits); g];
        let mut m = from;
        while 2 * m + 1 < 2 * g {
            for k in 0..g {
                acc[k] += &c[2 * m + 1][k];
            }
            m += 1;
        }
        acc
    };
    let a_cols: Vec<Vec<Complex>> = (0..g).map(|k| c[2 * k].clone()).collect();
    let b_cols: Vec<Vec<Complex>> = (0..g).map(sum_cols).collect();
    let omega1 = CMatrix::from_columns(&a_cols);
    let mut omega2 = CMatrix::from_columns(&b_cols);
    let mut zm = omega1.solve(&omega2).ok_or(PeriodError::Singular)?;

    let im: Vec<f64> = zm.data.iter().map(|v| v.imag().to_f64()).collect();
    let ev = crate::linalg::sym_eigenvalues(&symmetrized(&im, g), g);
    if ev.iter().all(|&l| l < 0.0) {
        omega2 = omega2.neg();
        zm = zm.neg();
    } else if !ev.iter().all(|&l| l > 0.0) {
        return Err(PeriodError::Indefinite);
    }
    let scale = zm.max_abs().max(1e-300);
    let mut defect: f64 = 0.0;
    for i in 0..g {
        for j in i + 1..g {
            let d = Complex::with_val(wbits, zm.get(i, j) - zm.get(j, i));
            defect = defect.max(cabs_f64(&d) / scale);
        }
    }

    // Abel–Jacobi images in sorted order, then scattered to input indices
    let mut aj_sorted: Vec<Vec<Complex>> = vec![vec![Complex::new(wbits); g]];
    for cj in &c {
        let last = aj_sorted.last().unwrap();
        aj_sorted.push((0..g).map(|k| Complex::with_val(wbits, &cj[k] / 2u32) + &last[k]).collect());
    }
    if inf.is_some() {
        let (vals, nn) = ray(&roots, g, wbits, tol)?;
        nodes = nodes.max(nn);
        let last = aj_sorted.last().unwrap();
        let v = (0..g).map(|k| Complex::with_val(wbits, &last[k] + &vals[k])).collect();
        aj_sorted.push(v);
    }
    let mut abel_jacobi = vec![Vec::new(); order.len()];
    for (pos, &k) in order.iter().enumerate() {
        abel_jacobi[k] = aj_sorted[pos].iter().map(|v| Complex::with_val(prec.bits, v)).collect();
    }

    let round = |m: &CMatrix| CMatrix {
        rows: m.rows,
        cols: m.cols,
        data: m.data.iter().map(|v| Complex::with_val(prec.bits, v)).collect(),
    };
    let omega1 = round(&omega1);
    let omega2 = round(&omega2);
    let z = RiemannMatrix::from_cmatrix(&round(&zm))?;
    let condition = omega1.condition();
    Ok(PeriodData { g, omega1, omega2, z, condition, symmetry_defect: defect, order, abel_jacobi, nodes })
}

fn symmetrized(a: &[f64], g: usize) -> Vec<f64> {
    let mut s = a.to_vec();
    for i in 0..g {
        for j in 0..g {
            s[i * g + j] = (a[i * g + j] + a[j * g + i]) / 2.0;
        }
    }
    s
}

impl PeriodData {
    /// Reduce a vector v ∈ ℂ^g, assumed to be a half period of the lattice
    /// Ω₁ℤ^g + Ω₂ℤ^g, to its characteristic: Ω₁⁻¹v = Z m′ + m″.
    pub fn characteristic_of(&self, v: &[Complex]) -> Result<Characteristic, PeriodError> {
        let g = self.g;
        let p = self.z.prec();
        let col = CMatrix::from_columns(&[v.to_vec()]);
        let u = self.omega1.solve(&col).ok_or(PeriodError::Singular)?;
        let y = CMatrix {
            rows: g,
            cols: g,
            data: self.z.entries().iter().map(|e| Complex::with_val(p.bits, (e.imag(), 0))).collect(),
        };
        let ui = CMatrix::from_columns(&[u.data.iter().map(|e| Complex::with_val(p.bits, (e.imag(), 0))).collect()]);
        let mp = y.solve(&ui).ok_or(PeriodError::Singular)?;
        let x = CMatrix {
            rows: g,
            cols: g,
            data: self.z.entries().iter().map(|e| Complex::with_val(p.bits, (e.real(), 0))).collect(),
        };
        let xm = x.mul(&mp);
        let mut top = Vec::with_capacity(g);
        let mut bottom = Vec::with_capacity(g);
        let mut off: f64 = 0.0;
        for k in 0..g {
            let a = 2.0 * mp.data[k].real().to_f64();
            let b = 2.0 * (u.data[k].real().to_f64() - xm.data[k].real().to_f64());
            off = off.max((a - a.round()).abs()).max((b - b.round()).abs());
            top.push((a.round() as i64).rem_euclid(2) as u8);
            bottom.push((b.round() as i64).rem_euclid(2) as u8);
        }
        if off > 1e-6 {
            return Err(PeriodError::NotHalfPeriod(off));
        }
        Ok(Characteristic::from_bits(&top, &bottom))
    }

    /// Characteristics c_i of the Weierstrass points (input order), relative to
    /// the smallest finite branch point.
    pub fn point_characteristics(&self) -> Result<Vec<Characteristic>, PeriodError> {
        self.abel_jacobi.iter().map(|v| self.characteristic_of(v)).collect()
    }
}

/// All k-subsets of 0..n in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl CharacteristicDictionary {
    /// Exhaustive search for the shift Δ. Fails if none or several work.
    pub fn calibrate(g: usize, points: Vec<Characteristic>) -> Result<Self, PeriodError> {
        let subs = k_subsets(points.len(), g - 1);
        let ok: Vec<Characteristic> = Characteristic::all(g)
            .filter(|d| {
                subs.iter().all(|s| s.iter().fold(*d, |acc, &i| acc.add(&points[i])).is_odd())
            })
            .collect();
        match ok.len() {
            0 => Err(PeriodError::NoShift),
            1 => Ok(CharacteristicDictionary { g, shift: ok[0], points }),
            _ => Err(PeriodError::AmbiguousShift(ok.iter().map(|c| c.to_string()).collect())),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Δ + Σ_{i∈S} c_i: the characteristic of Π(Σ_{i∈S} W_i) in the
    /// normalization where (g−1)-point divisors land on odd characteristics.
    pub fn image(&self, s: &[usize]) -> Characteristic {
        s.iter().fold(self.shift, |acc, &i| acc.add(&self.points[i]))
    }

    /// w_i for g = 2.
    pub fn w(&self, i: usize) -> Characteristic {
        self.image(&[i])
    }

    /// w_{ij} for g = 3.
    pub fn w2(&self, i: usize, j: usize) -> Characteristic {
        self.image(&[i, j])
    }

    /// a ⊕ b = a + b + Δ; on images, image(S) ⊕ image(T) = image(S △ T).
    pub fn twisted_add(&self, a: &Characteristic, b: &Characteristic) -> Characteristic {
        a.add(b).add(&self.shift)
    }

    /// The odd images of all (g−1)-subsets, in lexicographic subset order.
    pub fn odd_images(&self) -> Vec<(Vec<usize>, Characteristic)> {
        k_subsets(self.len(), self.g - 1).into_iter().map(|s| {
            let c = self.image(&s);
            (s, c)
        }).collect()
    }

    /// Largest violation count of w_{rs} ⊕ w_{st} = w_{rt} (g = 3; 0 otherwise).
    pub fn additivity_failures(&self) -> usize {
        if self.g != 3 {
            return 0;
        }
        let n = self.len();
        let mut bad = 0;
        for r in 0..n {
            for s in 0..n {
                for t in 0..n {
                    if r == s || s == t || r == t {
                        continue;
                    }
                    if self.twisted_add(&self.w2(r, s), &self.w2(s, t)) != self.w2(r, t) {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }
}

/// Dictionary for a curve from its period data.
pub fn characteristic_dictionary(p: &PeriodData) -> Result<CharacteristicDictionary, PeriodError> {
    CharacteristicDictionary::calibrate(p.g, p.point_characteristics()?)
}
