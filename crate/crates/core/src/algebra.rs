//! Polynomial arithmetic over exact rationals and working-precision complex
//! numbers: roots, discriminants, resultants (including elimination of one
//! variable from a bivariate pair) and Möbius maps on the projective line.

use std::fmt;

use rug::{Complex, Float, Integer, Rational};
use thiserror::Error;

use crate::num::{cabs, cmp_re_im, Precision};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("polynomial of degree {0} is too small for this operation")]
    DegreeTooSmall(usize),
    #[error("root finder did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        partial: Vec<Complex>,
    },
    #[error("both polynomials are constant in the eliminated variable")]
    ConstantInEliminated,
    #[error("degenerate Möbius map (AD - BC = 0)")]
    DegenerateMoebius,
    #[error("zero polynomial")]
    ZeroPolynomial,
}

/// The minimal field interface the generic polynomial code needs.
///
/// Implemented for exact rationals and for MPFR complex numbers. Every method
/// takes `&self` as a template so that complex values inherit the precision of
/// the operands.
pub trait Field: Clone + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn from_i64_like(&self, v: i64) -> Self;
    fn from_integer_like(&self, v: &Integer) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Size used to choose pivots; exact fields may return anything nonzero.
    fn magnitude(&self) -> f64;

    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }

    /// Sample points for evaluation/interpolation of a polynomial of degree < n.
    fn nodes(&self, n: usize) -> Vec<Self> {
        (0..n as i64).map(|k| self.from_i64_like(k)).collect()
    }

    /// Polynomial through `(nodes[k], values[k])` (Newton divided differences).
    fn interpolate(nodes: &[Self], values: &[Self]) -> Poly<Self> {
        newton_interpolate(nodes, values)
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
    fn from_integer_like(&self, v: &Integer) -> Self {
        Rational::from(v)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl Field for Complex {
    fn zero_like(&self) -> Self {
        Complex::new(self.prec())
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Complex::with_val(self.prec(), v)
    }
    fn from_integer_like(&self, v: &Integer) -> Self {
        Complex::with_val(self.prec(), v)
    }
    fn is_zero(&self) -> bool {
        Complex::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self / o)
    }
    fn neg(&self) -> Self {
        Complex::with_val(self.prec(), -self)
    }
    fn magnitude(&self) -> f64 {
        cabs(self).to_f64()
    }

    // Roots of unity keep the evaluation/interpolation step well conditioned.
    fn nodes(&self, n: usize) -> Vec<Self> {
        let p = Precision::bits(self.prec().0);
        (0..n as i64).map(|k| p.root_of_unity(k, n as i64)).collect()
    }

    fn interpolate(nodes: &[Self], values: &[Self]) -> Poly<Self> {
        // Inverse DFT: nodes are assumed to be the n-th roots of unity in order.
        let n = values.len();
        let p = Precision::bits(values[0].prec().0);
        let inv_n = Complex::with_val(p.bits, 1) / n as u32;
        let mut c = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = p.czero();
            for (k, v) in values.iter().enumerate() {
                let w = p.root_of_unity(-((j * k % n) as i64), n as i64);
                acc += Complex::with_val(p.bits, v * &w);
            }
            c.push(Complex::with_val(p.bits, &acc * &inv_n));
        }
        let _ = nodes;
        Poly::new(c)
    }
}

fn newton_interpolate<F: Field>(x: &[F], y: &[F]) -> Poly<F> {
    let n = x.len();
    let mut dd: Vec<F> = y.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = dd[i].sub(&dd[i - 1]);
            let den = x[i].sub(&x[i - j]);
            dd[i] = num.div(&den);
        }
    }
    // Horner-style expansion of the Newton form.
    let mut poly = Poly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = Poly::new(vec![x[i].neg(), x[i].one_like()]);
        poly = poly.mul(&lin).add(&Poly::constant(dd[i].clone()));
    }
    poly
}

/// Dense univariate polynomial, coefficients lowest degree first.
///
/// The representation keeps at least one coefficient so that complex
/// polynomials always carry their precision; exact-zero leading coefficients
/// are trimmed.
#[derive(Clone, Debug)]
pub struct Poly<F: Field> {
    c: Vec<F>,
}

pub type ComplexPolynomial = Poly<Complex>;
pub type RationalPolynomial = Poly<Rational>;

impl<F: Field> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        assert!(!c.is_empty(), "polynomial needs at least one coefficient");
        while c.len() > 1 && c.last().unwrap().is_zero() {
            c.pop();
        }
        Poly { c }
    }

    pub fn constant(a: F) -> Self {
        Poly { c: vec![a] }
    }

    /// Keeps trailing zeros: used when a formal degree matters (Sylvester
    /// matrices of specialised bivariate polynomials).
    pub fn with_formal_degree(c: Vec<F>) -> Self {
        assert!(!c.is_empty());
        Poly { c }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(template: &F, roots: &[F]) -> Self {
        let mut p = Poly::constant(template.one_like());
        for r in roots {
            p = p.mul(&Poly::new(vec![r.neg(), template.one_like()]));
        }
        p
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    /// Degree; the zero polynomial reports 0 (check `is_zero` separately).
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn leading(&self) -> &F {
        self.c.last().unwrap()
    }

    pub fn coeff(&self, k: usize) -> F {
        self.c.get(k).cloned().unwrap_or_else(|| self.c[0].zero_like())
    }

    fn trimmed(mut self) -> Self {
        while self.c.len() > 1 && self.c.last().unwrap().is_zero() {
            self.c.pop();
        }
        self
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = self.c.last().unwrap().clone();
        for a in self.c.iter().rev().skip(1) {
            acc = acc.mul(x).add(a);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.c.len() == 1 {
            return Poly::constant(self.c[0].zero_like());
        }
        let c = self.c.iter().enumerate().skip(1).map(|(k, a)| a.mul(&a.from_i64_like(k as i64))).collect();
        Poly::new(c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect();
        Poly::new(c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|k| self.coeff(k).sub(&o.coeff(k))).collect();
        Poly::new(c)
    }

    pub fn scale(&self, s: &F) -> Self {
        Poly::new(self.c.iter().map(|a| a.mul(s)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let z = self.c[0].zero_like();
        let mut c = vec![z; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Poly::constant(self.c[0].one_like());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Euclidean division; `None` when dividing by the zero polynomial.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        if d.is_zero() {
            return None;
        }
        let d = d.clone().trimmed();
        let dl = d.leading().clone();
        let mut r = self.clone().trimmed();
        let z = self.c[0].zero_like();
        if r.c.len() < d.c.len() {
            return Some((Poly::constant(z), r));
        }
        let mut q = vec![z; r.c.len() - d.c.len() + 1];
        while !r.is_zero() && r.c.len() >= d.c.len() {
            let shift = r.c.len() - d.c.len();
            let f = r.leading().div(&dl);
            for (k, b) in d.c.iter().enumerate() {
                r.c[k + shift] = r.c[k + shift].sub(&f.mul(b));
            }
            q[shift] = f;
            // The leading term cancels exactly in exact arithmetic; force it in
            // floating point so the loop always shrinks.
            r.c.pop();
            if r.c.is_empty() {
                r.c.push(self.c[0].zero_like());
            }
            r = r.trimmed();
        }
        Some((Poly::new(q), r))
    }

    pub fn monic(&self) -> Self {
        let l = self.leading().clone();
        Poly::new(self.c.iter().map(|a| a.div(&l)).collect())
    }

    /// Resultant via the determinant of the Sylvester matrix built from the
    /// stored (formal) degrees.
    pub fn resultant(&self, o: &Self) -> F {
        let m = self.c.len() - 1;
        let n = o.c.len() - 1;
        let z = self.c[0].zero_like();
        if m == 0 && n == 0 {
            return self.c[0].one_like();
        }
        if m == 0 {
            return pow_f(&self.c[0], n);
        }
        if n == 0 {
            return pow_f(&o.c[0], m);
        }
        let size = m + n;
        let mut a = vec![vec![z; size]; size];
        for i in 0..n {
            for k in 0..=m {
                a[i][i + k] = self.c[m - k].clone();
            }
        }
        for i in 0..m {
            for k in 0..=n {
                a[n + i][i + k] = o.c[n - k].clone();
            }
        }
        determinant(a)
    }

    /// Discriminant with the usual normalisation
    /// `(-1)^{n(n-1)/2} Res(p, p') / lc(p)`, equal to `lc^{2n-2} ∏_{r<s}(ρ_r-ρ_s)^2`.
    pub fn discriminant(&self) -> Result<F, AlgebraError> {
        let p = self.clone().trimmed();
        let n = p.degree();
        if n < 2 {
            return Err(AlgebraError::DegreeTooSmall(n));
        }
        let dp = Poly::with_formal_degree({
            let mut c: Vec<F> = p.derivative().c;
            c.resize(n, p.c[0].zero_like());
            c
        });
        let res = p.resultant(&dp);
        let sign_neg = (n * (n - 1) / 2) % 2 == 1;
        let v = res.div(p.leading());
        Ok(if sign_neg { v.neg() } else { v })
    }
}

impl RationalPolynomial {
    /// Monic gcd over ℚ.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone().trimmed();
        let mut b = o.clone().trimmed();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).unwrap();
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Product of the distinct irreducible factors (p / gcd(p, p')).
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).unwrap().0.monic()
    }

    /// Scale to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<Integer> {
        let mut den = Integer::from(1);
        for a in &self.c {
            den.lcm_mut(a.denom());
        }
        let mut v: Vec<Integer> = self.c.iter().map(|a| Integer::from(a.numer() * (&den / Integer::from(a.denom())))).collect();
        let mut g = Integer::new();
        for a in &v {
            g.gcd_mut(a);
        }
        if g != 0 {
            for a in v.iter_mut() {
                *a /= &g;
            }
        }
        if v.last().map(|l| *l < 0).unwrap_or(false) {
            for a in v.iter_mut() {
                *a = Integer::from(-&*a);
            }
        }
        v
    }

    pub fn to_complex(&self, prec: Precision) -> ComplexPolynomial {
        Poly::new(self.c.iter().map(|q| prec.from_rational(q)).collect())
    }

    /// Rational roots, found by high-precision numerical roots followed by
    /// continued-fraction reconstruction and an exact check.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let p = self.clone().trimmed();
        if p.degree() == 0 {
            return vec![];
        }
        let sf = p.squarefree();
        let coeffs = sf.primitive_integer();
        let bound_bits: u32 = coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(1);
        let prec = Precision::bits(4 * bound_bits + 256);
        let cp = sf.to_complex(prec);
        let roots = match poly_roots(&cp, 1e-30) {
            Ok(r) => r,
            Err(AlgebraError::NoConvergence { partial, .. }) => partial,
            Err(_) => return vec![],
        };
        let mut out: Vec<Rational> = Vec::new();
        for r in roots {
            let im = r.imag().clone().abs();
            let re = r.real().clone();
            if im > Float::with_val(prec.bits, re.abs_ref()).max(&Float::with_val(prec.bits, 1)) * Float::with_val(prec.bits, 1e-20) {
                continue;
            }
            if let Some(q) = best_rational(&r.real().clone(), bound_bits + 8) {
                if sf.eval(&q).is_zero() && !out.contains(&q) {
                    out.push(q);
                }
            }
        }
        out.sort();
        out
    }
}

/// Continued-fraction reconstruction of a real with denominators up to `2^bits`.
fn best_rational(x: &Float, bits: u32) -> Option<Rational> {
    let limit = Integer::from(1) << bits;
    let mut h0 = Integer::from(0);
    let mut h1 = Integer::from(1);
    let mut k0 = Integer::from(1);
    let mut k1 = Integer::from(0);
    let mut y = x.clone();
    let mut best = None;
    for _ in 0..(4 * bits + 16) {
        let a = y.clone().floor();
        let ai = a.to_integer()?;
        let h2 = Integer::from(&ai * &h1) + &h0;
        let k2 = Integer::from(&ai * &k1) + &k0;
        if k2 > limit {
            break;
        }
        best = Some(Rational::from((h2.clone(), k2.clone())));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = Float::with_val(y.prec(), &y - &a);
        let tiny = Float::with_val(y.prec(), Float::i_exp(1, -(y.prec() as i32 - 32)));
        if frac.is_zero() || frac < tiny {
            break;
        }
        y = Float::with_val(y.prec(), 1) / frac;
    }
    best
}

fn pow_f<F: Field>(a: &F, e: usize) -> F {
    let mut r = a.one_like();
    for _ in 0..e {
        r = r.mul(a);
    }
    r
}

/// Determinant by Gaussian elimination with pivoting on magnitude.
pub fn determinant<F: Field>(mut a: Vec<Vec<F>>) -> F {
    let n = a.len();
    let one = a[0][0].one_like();
    let mut det = one;
    for col in 0..n {
        let mut piv = None;
        let mut best = -1.0;
        for (r, row) in a.iter().enumerate().skip(col) {
            if row[col].is_zero() {
                continue;
            }
            let m = row[col].magnitude();
            if m > best {
                best = m;
                piv = Some(r);
            }
        }
        let Some(p) = piv else {
            return a[0][0].zero_like();
        };
        if p != col {
            a.swap(p, col);
            det = det.neg();
        }
        let pv = a[col][col].clone();
        det = det.mul(&pv);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].div(&pv);
            for c in col..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
    }
    det
}

/// Roots of a complex polynomial (Aberth–Ehrlich simultaneous iteration with
/// a final Newton polish), sorted lexicographically by (re, im).
///
/// Converged roots satisfy `|p(r)| <= tol * Σ|a_k||r|^k`.
pub fn poly_roots(p: &ComplexPolynomial, tol: f64) -> Result<Vec<Complex>, AlgebraError> {
    let p = p.clone().trimmed();
    let n = p.degree();
    if n < 1 {
        return Err(AlgebraError::DegreeTooSmall(n));
    }
    let prec = Precision::bits(p.coeffs()[0].prec().0);
    let bits = prec.bits;
    let m = p.monic();
    let dm = m.derivative();

    // Exact zero roots are split off first: Aberth handles them, but this keeps
    // them exact.
    let mut zeros = 0;
    while zeros < n && m.coeffs()[zeros].is_zero() {
        zeros += 1;
    }
    let red = Poly::new(m.coeffs()[zeros..].to_vec());
    let nr = red.degree();
    let mut z: Vec<Complex> = Vec::new();
    if nr > 0 {
        let dred = red.derivative();
        // Initial guesses on a circle whose radius is the geometric mean of the
        // roots, nudged off symmetric positions.
        let c0 = cabs(&red.coeffs()[0]).to_f64();
        let rad = if c0 > 0.0 { c0.powf(1.0 / nr as f64) } else { 1.0 };
        let rad = if rad.is_finite() && rad > 0.0 { rad } else { 1.0 };
        for k in 0..nr {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / nr as f64 + 0.4;
            z.push(prec.complex(rad * ang.cos(), rad * ang.sin()));
        }
        let stop = Float::with_val(bits, 2f64.powi(-(bits as i32) + 6));
        let mut converged = vec![false; nr];
        let max_iter = 400 + 4 * bits as usize;
        let mut it = 0;
        while it < max_iter {
            it += 1;
            let mut all = true;
            for k in 0..nr {
                if converged[k] {
                    continue;
                }
                let pv = red.eval(&z[k]);
                if pv.is_zero() {
                    converged[k] = true;
                    continue;
                }
                let dv = dred.eval(&z[k]);
                let ratio = Complex::with_val(bits, &pv / &dv);
                let mut s = prec.czero();
                for j in 0..nr {
                    if j != k {
                        let d = Complex::with_val(bits, &z[k] - &z[j]);
                        s += Complex::with_val(bits, 1) / d;
                    }
                }
                let den = Complex::with_val(bits, 1) - Complex::with_val(bits, &ratio * &s);
                let w = Complex::with_val(bits, &ratio / &den);
                if !crate::num::is_finite(&w) {
                    all = false;
                    continue;
                }
                z[k] -= &w;
                let scale = Float::with_val(bits, cabs(&z[k]).max(&Float::with_val(bits, 1)));
                if cabs(&w) <= Float::with_val(bits, &stop * &scale) {
                    converged[k] = true;
                } else {
                    all = false;
                }
            }
            if all {
                break;
            }
            // Multiple roots stall below full precision; accept once every
            // residual is at the requested tolerance and progress has stopped.
            if it > 60 && it % 20 == 0 && residuals_ok(&red, &z, tol) {
                break;
            }
        }
        // Newton polish on the full polynomial.
        for zk in z.iter_mut() {
            for _ in 0..3 {
                let pv = m.eval(zk);
                let dv = dm.eval(zk);
                if dv.is_zero() || pv.is_zero() {
                    break;
                }
                let step = Complex::with_val(bits, &pv / &dv);
                let cand = Complex::with_val(bits, &*zk - &step);
                if cabs(&m.eval(&cand)) < cabs(&pv) {
                    *zk = cand;
                } else {
                    break;
                }
            }
        }
        if !residuals_ok(&red, &z, tol) {
            let mut partial = z.clone();
            partial.extend((0..zeros).map(|_| prec.czero()));
            return Err(AlgebraError::NoConvergence {
                iterations: it,
                residual: worst_residual(&red, &z),
                partial,
            });
        }
    }
    for _ in 0..zeros {
        z.push(prec.czero());
    }
    let rel = 2f64.powi(-(bits as i32) + 12);
    for zk in z.iter_mut() {
        let s = cabs(zk).to_f64();
        crate::num::clean(zk, rel, s.max(1.0));
    }
    z.sort_by(cmp_re_im);
    Ok(z)
}

fn residual_scale(p: &ComplexPolynomial, x: &Complex) -> Float {
    let bits = x.prec().0;
    let ax = cabs(x);
    let mut acc = Float::new(bits);
    for a in p.coeffs().iter().rev() {
        acc = Float::with_val(bits, &acc * &ax) + cabs(a);
    }
    acc
}

fn worst_residual(p: &ComplexPolynomial, z: &[Complex]) -> f64 {
    z.iter()
        .map(|x| {
            let r = cabs(&p.eval(x));
            let s = residual_scale(p, x);
            (r / s).to_f64()
        })
        .fold(0.0, f64::max)
}

fn residuals_ok(p: &ComplexPolynomial, z: &[Complex], tol: f64) -> bool {
    z.iter().all(|x| {
        let r = cabs(&p.eval(x));
        let s = residual_scale(p, x);
        r <= s * tol
    })
}

/// Discriminant of a complex polynomial (resultant route).
pub fn poly_discriminant(p: &ComplexPolynomial) -> Result<Complex, AlgebraError> {
    p.discriminant()
}

/// Exact discriminant of a rational polynomial.
pub fn discriminant_exact(p: &RationalPolynomial) -> Result<Rational, AlgebraError> {
    p.discriminant()
}

/// Polynomial in `u` whose coefficients are polynomials in `v`;
/// `coeffs[k]` multiplies `u^k`.
#[derive(Clone, Debug)]
pub struct BiPoly<F: Field> {
    pub coeffs: Vec<Poly<F>>,
}

impl<F: Field> BiPoly<F> {
    pub fn new(mut coeffs: Vec<Poly<F>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
            coeffs.pop();
        }
        BiPoly { coeffs }
    }

    pub fn degree_u(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree_v(&self) -> usize {
        self.coeffs.iter().map(|c| if c.is_zero() { 0 } else { c.degree() }).max().unwrap_or(0)
    }

    /// Substitute `v = x`, keeping the formal `u`-degree.
    pub fn specialize_v(&self, x: &F) -> Poly<F> {
        Poly::with_formal_degree(self.coeffs.iter().map(|c| c.eval(x)).collect())
    }

    /// Substitute `u = x`, giving a polynomial in `v`.
    pub fn specialize_u(&self, x: &F) -> Poly<F> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.scale(x).add(c);
        }
        acc
    }
}

/// `Res_u(p, q)` as a polynomial in `v`, computed by evaluating at
/// `deg_u p · deg_v q + deg_u q · deg_v p + 1` points and interpolating.
///
/// Sylvester matrices use the formal `u`-degrees, so specialisations where a
/// leading coefficient vanishes still agree with the generic resultant.
pub fn resultant_eliminate<F: Field>(p: &BiPoly<F>, q: &BiPoly<F>) -> Result<Poly<F>, AlgebraError> {
    let (m, n) = (p.degree_u(), q.degree_u());
    if m == 0 && n == 0 {
        return Err(AlgebraError::ConstantInEliminated);
    }
    let bound = m * q.degree_v() + n * p.degree_v();
    let template = p.coeffs[0].coeffs()[0].clone();
    let nodes = template.nodes(bound + 1);
    let values: Vec<F> = nodes.iter().map(|x| p.specialize_v(x).resultant(&q.specialize_v(x))).collect();
    let r = F::interpolate(&nodes, &values);
    Ok(r)
}

/// A point of the projective line.
#[derive(Clone, Debug)]
pub enum ProjPoint<F: Field> {
    Finite(F),
    Infinity,
}

impl<F: Field> ProjPoint<F> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn finite(&self) -> Option<&F> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }
}

/// x ↦ (Ax+B)/(Cx+D)
#[derive(Clone, Debug)]
pub struct MoebiusMap<F: Field> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
}

impl<F: Field> MoebiusMap<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Result<Self, AlgebraError> {
        let det = a.mul(&d).sub(&b.mul(&c));
        if det.is_zero() {
            return Err(AlgebraError::DegenerateMoebius);
        }
        Ok(MoebiusMap { a, b, c, d })
    }

    pub fn identity(template: &F) -> Self {
        MoebiusMap {
            a: template.one_like(),
            b: template.zero_like(),
            c: template.zero_like(),
            d: template.one_like(),
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, o: &Self) -> Self {
        MoebiusMap {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    pub fn apply(&self, x: &ProjPoint<F>) -> ProjPoint<F> {
        let (num, den) = match x {
            ProjPoint::Infinity => (self.a.clone(), self.c.clone()),
            ProjPoint::Finite(x) => (self.a.mul(x).add(&self.b), self.c.mul(x).add(&self.d)),
        };
        if den.is_zero() {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(num.div(&den))
        }
    }
}

/// Apply a Möbius map (free-function form).
pub fn moebius_apply<F: Field>(g: &MoebiusMap<F>, x: &ProjPoint<F>) -> ProjPoint<F> {
    g.apply(x)
}

/// Discriminant of the hyperelliptic curve Y² = f(X):
/// 2^{4g}·disc(f) for deg f = 2g+2 and 2^{4g}·lc(f)²·disc(f) for deg f = 2g+1.
pub fn curve_discriminant(f: &RationalPolynomial) -> Result<Rational, AlgebraError> {
    let n = f.degree();
    if n < 3 {
        return Err(AlgebraError::DegreeTooSmall(n));
    }
    let g = (n - 1) / 2;
    let mut d = f.discriminant()?;
    d *= Rational::from(Integer::from(1) << (4 * g as u32));
    if n % 2 == 1 {
        let lc = f.leading().clone();
        d *= Rational::from(&lc * &lc);
    }
    Ok(d)
}

/// Prime factorization of |n| as (prime, exponent) pairs in increasing order.
/// Trial division by small primes, then Pollard's rho (Brent variant).
pub fn factor_integer(n: &Integer) -> Vec<(Integer, u32)> {
    let mut n = Integer::from(n.abs_ref());
    let mut out: Vec<(Integer, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in 2u32..1000 {
        if n.is_divisible_u(p) {
            let mut e = 0;
            while n.is_divisible_u(p) {
                n /= p;
                e += 1;
            }
            out.push((Integer::from(p), e));
        }
    }
    let mut stack = vec![n];
    let mut primes: Vec<Integer> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if m.is_probably_prime(40) != rug::integer::IsPrime::No {
            primes.push(m);
            continue;
        }
        let d = pollard_brent(&m);
        let q = Integer::from(&m / &d);
        stack.push(d);
        stack.push(q);
    }
    primes.sort();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn pollard_brent(n: &Integer) -> Integer {
    if n.is_even() {
        return Integer::from(2);
    }
    if let Some(r) = perfect_square_root(n) {
        return r;
    }
    let mut c = Integer::from(1);
    loop {
        let f = |x: &Integer| -> Integer { (Integer::from(x * x) + &c) % n };
        let mut y = Integer::from(2);
        let mut r: u64 = 1;
        let mut q = Integer::from(1);
        let mut g = Integer::from(1);
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 64u64;
        while g == 1 {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * Integer::from(&x - &y).abs()) % n;
                }
                g = Integer::from(q.gcd_ref(n));
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = Integer::from(Integer::from(&x - &ys).abs().gcd_ref(n));
                if g > 1 {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1;
    }
}

fn perfect_square_root(n: &Integer) -> Option<Integer> {
    if n.is_perfect_square() {
        Some(Integer::from(n.sqrt_ref()))
    } else {
        None
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(q: &Rational, p: &Integer) -> i64 {
    let mut v = 0i64;
    let mut a = Integer::from(q.numer());
    while a != 0 && a.is_divisible(p) {
        a /= p;
        v += 1;
    }
    let mut b = Integer::from(q.denom());
    while b.is_divisible(p) {
        b /= p;
        v -= 1;
    }
    v
}
