//! Symmetric invariants of a hyperelliptic curve Y² = f(X) read off its branch
//! points: symmetric ratios p_{ijt}, symmetric roots ℓ_{ijtk}, symmetric models
//! X·∏(X − ℓ_{ijtk}), symmetric discriminants, the cross-ratios μ_{ijrs}, and
//! the primes where some symmetric discriminant has negative valuation.
//!
//! A branch point at infinity is explicit: every factor (α_a − α_b) involving it
//! is replaced by 1.

use std::collections::{BTreeMap, BTreeSet};

use rug::{Complex, Integer, Rational};
use thiserror::Error;

use crate::algebra::{factor_integer, poly_roots, valuation, AlgebraError, ComplexPolynomial, Poly, ProjPoint, RationalPolynomial};
use crate::num::{cabs_f64, clean, cmp_re_im, croot, rel_diff, Precision};

#[derive(Debug, Error)]
pub enum SymError {
    #[error("genus {g} needs {expected} branch points, got {got}")]
    WrongCount { g: usize, expected: usize, got: usize },
    #[error("branch points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("more than one branch point at infinity")]
    TooManyInfinities,
    #[error("indices must be pairwise distinct and below {n}")]
    BadIndices { n: usize },
    #[error("root-of-unity index t={t} outside 1..={max}")]
    TOutOfRange { t: usize, max: usize },
    #[error("branch points are not all rational")]
    NotRational,
    #[error("mu family is inconsistent (ratio defect {0:e})")]
    Inconsistent(f64),
    #[error("symmetric model invariant violated: {0}")]
    ModelInvariant(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Point = ProjPoint<Complex>;

/// The 2g+2 branch points of a hyperelliptic curve, at most one at infinity.
#[derive(Clone, Debug)]
pub struct BranchSet {
    g: usize,
    points: Vec<Point>,
    exact: Option<Vec<Option<Rational>>>,
    prec: Precision,
}

impl BranchSet {
    pub fn new(g: usize, points: Vec<Point>, prec: Precision) -> Result<Self, SymError> {
        let n = 2 * g + 2;
        if points.len() != n {
            return Err(SymError::WrongCount { g, expected: n, got: points.len() });
        }
        if points.iter().filter(|p| p.is_infinite()).count() > 1 {
            return Err(SymError::TooManyInfinities);
        }
        let scale = points.iter().filter_map(|p| p.finite()).map(cabs_f64).fold(1.0, f64::max);
        let tol = prec.epsilon() * 64.0 * scale;
        for a in 0..n {
            for b in a + 1..n {
                if let (Some(x), Some(y)) = (points[a].finite(), points[b].finite()) {
                    if cabs_f64(&Complex::with_val(prec.bits, x - y)) <= tol {
                        return Err(SymError::Duplicate(a, b));
                    }
                }
            }
        }
        let points = points
            .into_iter()
            .map(|p| match p {
                ProjPoint::Finite(x) => ProjPoint::Finite(Complex::with_val(prec.bits, x)),
                ProjPoint::Infinity => ProjPoint::Infinity,
            })
            .collect();
        Ok(BranchSet { g, points, exact: None, prec })
    }

    /// Rational branch points, optionally followed by ∞.
    pub fn from_rationals(g: usize, roots: &[Rational], infinity: bool, prec: Precision) -> Result<Self, SymError> {
        let mut pts: Vec<Point> = roots.iter().map(|q| ProjPoint::Finite(prec.from_rational(q))).collect();
        let mut ex: Vec<Option<Rational>> = roots.iter().cloned().map(Some).collect();
        if infinity {
            pts.push(ProjPoint::Infinity);
            ex.push(None);
        }
        for a in 0..roots.len() {
            for b in a + 1..roots.len() {
                if roots[a] == roots[b] {
                    return Err(SymError::Duplicate(a, b));
                }
            }
        }
        let mut b = BranchSet::new(g, pts, prec)?;
        b.exact = Some(ex);
        Ok(b)
    }

    pub fn from_integers(g: usize, roots: &[i64], infinity: bool, prec: Precision) -> Result<Self, SymError> {
        let q: Vec<Rational> = roots.iter().map(|&v| Rational::from(v)).collect();
        Self::from_rationals(g, &q, infinity, prec)
    }

    /// Branch points of Y² = f(X): the roots of f, plus ∞ when deg f is odd.
    /// Rational roots are kept exactly when every root is rational.
    pub fn from_polynomial(f: &RationalPolynomial, prec: Precision) -> Result<Self, SymError> {
        let n = f.degree();
        let g = (n - 1) / 2;
        let infinity = n % 2 == 1;
        let rr = f.rational_roots();
        if rr.len() == n {
            return Self::from_rationals(g, &rr, infinity, prec);
        }
        let roots = poly_roots(&f.to_complex(prec), prec.epsilon() * 1e6)?;
        let mut pts: Vec<Point> = roots.into_iter().map(ProjPoint::Finite).collect();
        if infinity {
            pts.push(ProjPoint::Infinity);
        }
        Self::new(g, pts, prec)
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &Point {
        &self.points[k]
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn exact(&self) -> Option<&[Option<Rational>]> {
        self.exact.as_deref()
    }

    pub fn infinity_index(&self) -> Option<usize> {
        self.points.iter().position(|p| p.is_infinite())
    }

    /// Finite points as complex numbers, in input order.
    pub fn finite_points(&self) -> Vec<Complex> {
        self.points.iter().filter_map(|p| p.finite().cloned()).collect()
    }

    /// α_a − α_b, or 1 when either point is ∞.
    pub fn diff(&self, a: usize, b: usize) -> Complex {
        match (&self.points[a], &self.points[b]) {
            (ProjPoint::Finite(x), ProjPoint::Finite(y)) => Complex::with_val(self.prec.bits, x - y),
            _ => self.prec.cone(),
        }
    }

    fn diff_exact(&self, a: usize, b: usize) -> Option<Rational> {
        let ex = self.exact.as_ref()?;
        Some(match (&ex[a], &ex[b]) {
            (Some(x), Some(y)) => Rational::from(x - y),
            _ => Rational::from(1),
        })
    }

    /// The branch set after a Möbius map, with ∞ tracked projectively.
    pub fn transform(&self, m: &crate::algebra::MoebiusMap<Complex>) -> Result<BranchSet, SymError> {
        let pts = self.points.iter().map(|p| m.apply(p)).collect();
        BranchSet::new(self.g, pts, self.prec)
    }

    /// The polynomial ∏(X − α) over the finite points.
    pub fn polynomial(&self) -> ComplexPolynomial {
        Poly::from_roots(&self.prec.cone(), &self.finite_points())
    }

    pub fn polynomial_exact(&self) -> Option<RationalPolynomial> {
        let ex = self.exact.as_ref()?;
        let roots: Vec<Rational> = ex.iter().flatten().cloned().collect();
        Some(Poly::from_roots(&Rational::from(1), &roots))
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(), SymError> {
        let n = self.len();
        if i >= n || j >= n || i == j {
            return Err(SymError::BadIndices { n });
        }
        Ok(())
    }

    fn check_t(&self, t: usize) -> Result<(), SymError> {
        let max = 4 * self.g;
        if t == 0 || t > max {
            return Err(SymError::TOutOfRange { t, max });
        }
        Ok(())
    }

    /// Indices other than i and j, in input order.
    pub fn others(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.len()).filter(|&k| k != i && k != j).collect()
    }
}

/// p_{ijt} = ζ_t · (∏_{k≠i,j} (α_j−α_k)/(α_i−α_k))^{1/2g}, ζ_t = e^{2πit/4g}.
/// t = 4g gives the principal root.
pub fn symmetric_ratio(b: &BranchSet, i: usize, j: usize, t: usize) -> Result<Complex, SymError> {
    b.check_pair(i, j)?;
    b.check_t(t)?;
    let p = b.prec;
    let mut q = p.cone();
    for k in b.others(i, j) {
        q *= b.diff(j, k);
        q /= b.diff(i, k);
    }
    let root = croot(&q, 2 * b.g as u32);
    let zeta = p.root_of_unity(t as i64, 4 * b.g as i64);
    Ok(Complex::with_val(p.bits, root * zeta))
}

/// ℓ_{ijtk} = p_{ijt}(α_i−α_k)/(α_j−α_k) for k ∉ {i,j} in input order.
pub fn symmetric_roots(b: &BranchSet, i: usize, j: usize, t: usize) -> Result<Vec<Complex>, SymError> {
    let pr = symmetric_ratio(b, i, j, t)?;
    let p = b.prec;
    Ok(b
        .others(i, j)
        .into_iter()
        .map(|k| {
            let mut v = Complex::with_val(p.bits, &pr * b.diff(i, k));
            v /= b.diff(j, k);
            v
        })
        .collect())
}

/// Y² = X^{2g+1} + G₁X^{2g} + ⋯ + G_{2g−1}X² ± X.
#[derive(Clone, Debug)]
pub struct SymmetricModel {
    pub g: usize,
    /// G₁, …, G_{2g−1}.
    pub coefficients: Vec<Complex>,
    /// The X coefficient (±1 up to rounding).
    pub linear: Complex,
    /// Nonzero roots ℓ.
    pub roots: Vec<Complex>,
}

impl SymmetricModel {
    /// Expand X·∏(X − ℓ).
    pub fn from_roots(g: usize, roots: Vec<Complex>) -> SymmetricModel {
        assert_eq!(roots.len(), 2 * g);
        let prec = Precision::bits(roots[0].prec().0);
        let poly = Poly::from_roots(&prec.cone(), &roots);
        let c = poly.coeffs();
        // c[k] multiplies X^k in ∏(X−ℓ); the model is X times that.
        let scale = roots.iter().map(cabs_f64).fold(1.0, f64::max).powi(2 * g as i32);
        let coefficients: Vec<Complex> = (1..2 * g)
            .map(|k| {
                let mut v = c[2 * g - k].clone();
                clean(&mut v, prec.epsilon() * 1e3, scale);
                v
            })
            .collect();
        let mut linear = c[0].clone();
        clean(&mut linear, prec.epsilon() * 1e3, scale);
        SymmetricModel { g, coefficients, linear, roots }
    }

    /// Model from coefficients G₁..G_{2g−1} and linear coefficient.
    pub fn from_coefficients(g: usize, coefficients: Vec<Complex>, linear: Complex) -> Result<SymmetricModel, SymError> {
        let prec = Precision::bits(linear.prec().0);
        let mut c = vec![linear.clone()];
        for k in (1..2 * g).rev() {
            c.push(coefficients[k - 1].clone());
        }
        c.push(prec.cone());
        let roots = poly_roots(&Poly::new(c), prec.epsilon() * 1e6)?;
        Ok(SymmetricModel { g, coefficients, linear, roots })
    }

    /// Sign of the linear term.
    pub fn sign(&self) -> i32 {
        if self.linear.real().is_sign_negative() {
            -1
        } else {
            1
        }
    }

    /// Monic polynomial of degree 2g+1, lowest degree first.
    pub fn polynomial(&self) -> ComplexPolynomial {
        let prec = Precision::bits(self.linear.prec().0);
        let mut c = vec![prec.czero(), self.linear.clone()];
        for k in (1..2 * self.g).rev() {
            c.push(self.coefficients[k - 1].clone());
        }
        c.push(prec.cone());
        Poly::new(c)
    }

    /// The branch set {0, ℓ…, ∞} of the model.
    pub fn branch_set(&self) -> Result<BranchSet, SymError> {
        let prec = Precision::bits(self.linear.prec().0);
        let mut pts: Vec<Point> = vec![ProjPoint::Finite(prec.czero())];
        pts.extend(self.roots.iter().cloned().map(ProjPoint::Finite));
        pts.push(ProjPoint::Infinity);
        BranchSet::new(self.g, pts, prec)
    }

    /// Literal discriminant ∏_{r<s}(ρ_r − ρ_s)² over the roots 0, ℓ….
    pub fn discriminant(&self) -> Complex {
        let prec = Precision::bits(self.linear.prec().0);
        let mut all = vec![prec.czero()];
        all.extend(self.roots.iter().cloned());
        let mut d = prec.cone();
        for a in 0..all.len() {
            for b in a + 1..all.len() {
                let x = Complex::with_val(prec.bits, &all[a] - &all[b]);
                d *= Complex::with_val(prec.bits, x.square_ref());
            }
        }
        d
    }

    /// Check: linear coefficient ±1 and ∏ℓ = ±1, both to `tol`.
    pub fn check(&self, tol: f64) -> Result<(), SymError> {
        let prec = Precision::bits(self.linear.prec().0);
        let one = prec.cone();
        let m_one = Complex::with_val(prec.bits, -&one);
        let lin_ok = rel_diff(&self.linear, &one, 1.0) < tol || rel_diff(&self.linear, &m_one, 1.0) < tol;
        if !lin_ok {
            return Err(SymError::ModelInvariant(format!("linear coefficient {}", self.linear)));
        }
        let mut prod = prec.cone();
        for r in &self.roots {
            prod *= r;
        }
        if rel_diff(&prod, &one, 1.0) >= tol && rel_diff(&prod, &m_one, 1.0) >= tol {
            return Err(SymError::ModelInvariant(format!("product of roots {}", prod)));
        }
        Ok(())
    }
}

pub fn symmetric_model(b: &BranchSet, i: usize, j: usize, t: usize) -> Result<SymmetricModel, SymError> {
    let roots = symmetric_roots(b, i, j, t)?;
    Ok(SymmetricModel::from_roots(b.g, roots))
}

/// Both evaluations of the symmetric discriminant 𝓓_{ijt}.
#[derive(Clone, Debug)]
pub struct SymmetricDiscriminant {
    /// ∏_{r<s}(ℓ_r − ℓ_s)² over 0 and the symmetric roots.
    pub product: Complex,
    /// (α_i−α_j)^{2g(2g+1)} Δ(f) / (f′(α_i) f′(α_j))^{2g+1}.
    pub closed: Complex,
    /// product / closed rounded to ±1.
    pub sign: i32,
}

pub fn symmetric_discriminant(b: &BranchSet, i: usize, j: usize, t: usize) -> Result<SymmetricDiscriminant, SymError> {
    let product = symmetric_model(b, i, j, t)?.discriminant();
    let closed = closed_discriminant(b, i, j)?;
    let ratio = Complex::with_val(b.prec.bits, &product / &closed);
    let sign = if ratio.real().is_sign_negative() { -1 } else { 1 };
    Ok(SymmetricDiscriminant { product, closed, sign })
}

fn fprime(b: &BranchSet, i: usize) -> Complex {
    let mut v = b.prec.cone();
    for k in 0..b.len() {
        if k != i {
            v *= b.diff(i, k);
        }
    }
    v
}

fn closed_discriminant(b: &BranchSet, i: usize, j: usize) -> Result<Complex, SymError> {
    b.check_pair(i, j)?;
    let p = b.prec;
    let n = 2 * b.g + 1;
    let mut delta = p.cone();
    for r in 0..b.len() {
        for s in r + 1..b.len() {
            let d = b.diff(r, s);
            delta *= Complex::with_val(p.bits, d.square_ref());
        }
    }
    let lead = crate::num::cpow(&b.diff(i, j), (2 * b.g * n) as i32);
    let den = crate::num::cpow(&Complex::with_val(p.bits, fprime(b, i) * fprime(b, j)), n as i32);
    Ok(Complex::with_val(p.bits, lead * delta / den))
}

/// Exact closed-form 𝓓_{ij} for rational branch sets.
pub fn symmetric_discriminant_exact(b: &BranchSet, i: usize, j: usize) -> Result<Rational, SymError> {
    b.check_pair(i, j)?;
    if b.exact.is_none() {
        return Err(SymError::NotRational);
    }
    let n = 2 * b.g + 1;
    let d = |r: usize, s: usize| b.diff_exact(r, s).unwrap();
    let mut delta = Rational::from(1);
    for r in 0..b.len() {
        for s in r + 1..b.len() {
            let x = d(r, s);
            delta *= Rational::from(&x * &x);
        }
    }
    let mut fi = Rational::from(1);
    let mut fj = Rational::from(1);
    for k in 0..b.len() {
        if k != i {
            fi *= d(i, k);
        }
        if k != j {
            fj *= d(j, k);
        }
    }
    let lead = pow_q(&d(i, j), (2 * b.g * n) as u32);
    let den = pow_q(&Rational::from(fi * fj), n as u32);
    Ok(lead * delta / den)
}

fn pow_q(q: &Rational, e: u32) -> Rational {
    use rug::ops::Pow;
    Rational::from(q.pow(e))
}

/// μ_{ijrs} = (α_i−α_r)(α_j−α_s) / ((α_i−α_s)(α_j−α_r)).
pub fn mu_invariant(b: &BranchSet, i: usize, j: usize, r: usize, s: usize) -> Result<Complex, SymError> {
    let n = b.len();
    let idx = [i, j, r, s];
    if idx.iter().any(|&x| x >= n) || (0..4).any(|a| (a + 1..4).any(|c| idx[a] == idx[c])) {
        return Err(SymError::BadIndices { n });
    }
    let p = b.prec;
    let num = Complex::with_val(p.bits, b.diff(i, r) * b.diff(j, s));
    let den = Complex::with_val(p.bits, b.diff(i, s) * b.diff(j, r));
    Ok(Complex::with_val(p.bits, num / den))
}

/// The cross-ratios μ_{ijrs} for a fixed pair (i,j) and all r ≠ s outside it.
#[derive(Clone, Debug)]
pub struct MuFamily {
    pub i: usize,
    pub j: usize,
    /// The 2g indices other than i and j, in order.
    pub indices: Vec<usize>,
    pub values: BTreeMap<(usize, usize), Complex>,
}

impl MuFamily {
    pub fn from_branch_set(b: &BranchSet, i: usize, j: usize) -> Result<MuFamily, SymError> {
        b.check_pair(i, j)?;
        let indices = b.others(i, j);
        let mut values = BTreeMap::new();
        for &r in &indices {
            for &s in &indices {
                if r != s {
                    values.insert((r, s), mu_invariant(b, i, j, r, s)?);
                }
            }
        }
        Ok(MuFamily { i, j, indices, values })
    }

    pub fn get(&self, r: usize, s: usize) -> &Complex {
        &self.values[&(r, s)]
    }

    /// Largest |μ_{rs}·μ_{sr} − 1|.
    pub fn reciprocity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(r, s), v) in &self.values {
            let w = &self.values[&(s, r)];
            let p = v.prec().0;
            let prod = Complex::with_val(p, v * w) - 1u32;
            worst = worst.max(cabs_f64(&prod));
        }
        worst
    }
}

/// Rebuild a symmetric model from a μ-family: ℓ_{k₀}^{2g} = ∏_{r≠k₀} μ_{k₀r}
/// fixes the pivot up to a root of unity, then ℓ_s = ℓ_{k₀}/μ_{k₀s}.
pub fn symmetric_model_from_mu(fam: &MuFamily, g: usize, tol: f64) -> Result<SymmetricModel, SymError> {
    if fam.indices.len() != 2 * g {
        return Err(SymError::WrongCount { g, expected: 2 * g, got: fam.indices.len() });
    }
    let k0 = fam.indices[0];
    let prec = Precision::bits(fam.get(k0, fam.indices[1]).prec().0);
    let mut prod = prec.cone();
    for &r in &fam.indices[1..] {
        prod *= fam.get(k0, r);
    }
    let pivot = croot(&prod, 2 * g as u32);
    let mut roots = vec![pivot.clone()];
    for &s in &fam.indices[1..] {
        roots.push(Complex::with_val(prec.bits, &pivot / fam.get(k0, s)));
    }
    let mut worst: f64 = 0.0;
    for (a, &r) in fam.indices.iter().enumerate() {
        for (c, &s) in fam.indices.iter().enumerate() {
            if r != s {
                let ratio = Complex::with_val(prec.bits, &roots[a] / &roots[c]);
                worst = worst.max(rel_diff(&ratio, fam.get(r, s), 1e-300));
            }
        }
    }
    if worst > tol {
        return Err(SymError::Inconsistent(worst));
    }
    let model = SymmetricModel::from_roots(g, roots);
    model.check(tol.max(1e-12) * 10.0)?;
    Ok(model)
}

/// All μ_{ijrs} over ordered 4-tuples of distinct indices.
pub fn mu_multiset(b: &BranchSet) -> Vec<Complex> {
    let n = b.len();
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) * (n - 3));
    for i in 0..n {
        for j in 0..n {
            for r in 0..n {
                for s in 0..n {
                    if i != j && i != r && i != s && j != r && j != s && r != s {
                        out.push(mu_invariant(b, i, j, r, s).unwrap());
                    }
                }
            }
        }
    }
    out.sort_by(cmp_re_im);
    out
}

/// Greedy matching distance between two multisets of cross-ratios: for each
/// element of `a` the nearest unused element of `b` (relative distance), and
/// the worst such match. Infinite when sizes differ. Matching runs in f64,
/// the matched distances are measured at full precision.
pub fn multiset_distance(a: &[Complex], b: &[Complex]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let av: Vec<(f64, f64)> = a.iter().map(|z| (z.real().to_f64(), z.imag().to_f64())).collect();
    let bv: Vec<(f64, f64)> = b.iter().map(|z| (z.real().to_f64(), z.imag().to_f64())).collect();
    let mut used = vec![false; bv.len()];
    let mut worst: f64 = 0.0;
    for (ai, x) in av.iter().enumerate() {
        let mut best = f64::INFINITY;
        let mut bi = usize::MAX;
        for (k, y) in bv.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt() / (x.0.hypot(x.1)).max(y.0.hypot(y.1)).max(1.0);
            if d < best {
                best = d;
                bi = k;
            }
        }
        used[bi] = true;
        worst = worst.max(rel_diff(&a[ai], &b[bi], 1.0));
    }
    worst
}

/// Primes p with v_p(𝓓_{ij}) < 0 for some pair, from exact valuations of the
/// branch-point differences.
pub fn bad_reduction_locus_odd(b: &BranchSet) -> Result<BTreeSet<Integer>, SymError> {
    let pairs = discriminant_valuations(b)?;
    let mut out = BTreeSet::new();
    for (_, vals) in pairs {
        for (p, v) in vals {
            if v < 0 {
                out.insert(p);
            }
        }
    }
    Ok(out)
}

/// For each unordered pair (i,j), the nonzero valuations v_p(𝓓_{ij}).
pub fn discriminant_valuations(b: &BranchSet) -> Result<Vec<((usize, usize), BTreeMap<Integer, i64>)>, SymError> {
    if b.exact.is_none() {
        return Err(SymError::NotRational);
    }
    let n = b.len();
    let g = b.g;
    let mut primes: BTreeSet<Integer> = BTreeSet::new();
    let mut diffs = vec![vec![Rational::from(1); n]; n];
    for r in 0..n {
        for s in 0..n {
            if r != s {
                let d = b.diff_exact(r, s).unwrap();
                if r < s {
                    for (p, _) in factor_integer(d.numer()).into_iter().chain(factor_integer(d.denom())) {
                        primes.insert(p);
                    }
                }
                diffs[r][s] = d;
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut vals = BTreeMap::new();
            for p in &primes {
                let v = |r: usize, s: usize| valuation(&diffs[r][s], p);
                let mut total = (2 * g * (2 * g + 1)) as i64 * v(i, j);
                for r in 0..n {
                    for s in r + 1..n {
                        total += 2 * v(r, s);
                    }
                }
                let mut fi = 0;
                let mut fj = 0;
                for k in 0..n {
                    if k != i {
                        fi += v(i, k);
                    }
                    if k != j {
                        fj += v(j, k);
                    }
                }
                total -= (2 * g + 1) as i64 * (fi + fj);
                if total != 0 {
                    vals.insert(p.clone(), total);
                }
            }
            out.push(((i, j), vals));
        }
    }
    Ok(out)
}
