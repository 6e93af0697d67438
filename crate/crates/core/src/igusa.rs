//! Igusa–Clebsch invariants of genus-2 curves in symmetric form
//! `Y² = X(X⁴ + G₁X³ + G₂X² + G₃X + 1)`.
//!
//! The forward map is a closed polynomial formula. The inverse goes through
//! the symmetric functions `S₁ = G₁+G₃`, `S₂ = G₁G₃` and an unknown weighted
//! scale `r` (the target invariants are matched as `I_{2k} = rᵏ𝓘_{2k}`):
//! `S₂` is linear, `S₁²` rational in `G₂`, and eliminating `u = G₂²` from the
//! remaining pair leaves a univariate equation in `r`.
//!
//! All long formulas live here as text and are parsed once into [`MPoly`].

use std::sync::OnceLock;

use rayon::prelude::*;
use rug::{Complex, Integer, Rational};
use thiserror::Error;

use crate::algebra::{poly_roots, resultant_eliminate, AlgebraError, Field, Poly, ProjPoint};
use crate::linalg::CMatrix;
use crate::mpoly::MPoly;
use crate::num::{cabs_f64, croot, Precision};
use crate::symcurve::{BranchSet, SymmetricModel};

#[derive(Debug, Error)]
pub enum IgusaError {
    #[error("expected a genus-2 branch set, got genus {0}")]
    Genus(usize),
    #[error("I10 vanishes: the tuple does not come from a smooth curve")]
    ZeroI10,
    #[error("symmetric model is singular (I10 = 0)")]
    Singular,
    #[error("elimination residue does not factor as expected (defect {0:e})")]
    Elimination(f64),
    #[error("no candidate survives forward verification")]
    NoCandidate,
    #[error("branch set has no exact rational roots")]
    NotExact,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Weights of (I₂, I₄, I₆, I₁₀) in units of 2.
pub const WEIGHTS: [u32; 4] = [1, 2, 3, 5];

fn powf<F: Field>(a: &F, e: u32) -> F {
    let mut r = a.one_like();
    for _ in 0..e {
        r = r.mul(a);
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct IgusaClebsch<F> {
    pub i2: F,
    pub i4: F,
    pub i6: F,
    pub i10: F,
}

impl<F: Field> IgusaClebsch<F> {
    pub fn new(i2: F, i4: F, i6: F, i10: F) -> Self {
        IgusaClebsch { i2, i4, i6, i10 }
    }

    pub fn from_array([i2, i4, i6, i10]: [F; 4]) -> Self {
        IgusaClebsch { i2, i4, i6, i10 }
    }

    pub fn values(&self) -> [&F; 4] {
        [&self.i2, &self.i4, &self.i6, &self.i10]
    }

    /// `I_{2k} ↦ rᵏ I_{2k}`.
    pub fn rescale(&self, r: &F) -> Self {
        let v = self.values();
        IgusaClebsch::from_array(std::array::from_fn(|k| v[k].mul(&powf(r, WEIGHTS[k]))))
    }

    /// `(I₂⁵/I₁₀, I₄⁵/I₁₀², I₆⁵/I₁₀³)`; `None` when `I₁₀ = 0`.
    pub fn absolute(&self) -> Option<[F; 3]> {
        if self.i10.is_zero() {
            return None;
        }
        let v = self.values();
        Some(std::array::from_fn(|k| powf(v[k], 5).div(&powf(&self.i10, WEIGHTS[k]))))
    }

    /// Pairs `(aᵢ^{wⱼ} bⱼ^{wᵢ}, aⱼ^{wᵢ} bᵢ^{wⱼ})`: all equal exactly when the two
    /// tuples differ by a weighted scaling.
    fn cross(&self, o: &Self) -> Vec<(F, F)> {
        let (a, b) = (self.values(), o.values());
        let mut out = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                let l = powf(a[i], WEIGHTS[j]).mul(&powf(b[j], WEIGHTS[i]));
                let r = powf(a[j], WEIGHTS[i]).mul(&powf(b[i], WEIGHTS[j]));
                out.push((l, r));
            }
        }
        out
    }
}

impl IgusaClebsch<Rational> {
    /// Equality up to weighted scaling, exact.
    pub fn weighted_eq(&self, o: &Self) -> bool {
        self.cross(o).iter().all(|(l, r)| l == r)
    }

    pub fn to_complex(&self, p: Precision) -> IgusaClebsch<Complex> {
        let v = self.values();
        IgusaClebsch::from_array(std::array::from_fn(|k| p.from_rational(v[k])))
    }
}

impl IgusaClebsch<Complex> {
    /// Largest relative mismatch of the weighted cross products.
    pub fn weighted_defect(&self, o: &Self) -> f64 {
        self.cross(o)
            .iter()
            .map(|(l, r)| {
                let s = cabs_f64(l).max(cabs_f64(r));
                if s == 0.0 {
                    0.0
                } else {
                    cabs_f64(&Complex::with_val(l.prec(), l - r)) / s
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `(G₁, G₂, G₃)` of `Y² = X(X⁴ + G₁X³ + G₂X² + G₃X + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricCoefficients2<F> {
    pub g1: F,
    pub g2: F,
    pub g3: F,
}

impl<F: Field> SymmetricCoefficients2<F> {
    pub fn new(g1: F, g2: F, g3: F) -> Self {
        SymmetricCoefficients2 { g1, g2, g3 }
    }

    pub fn swapped(&self) -> Self {
        SymmetricCoefficients2 { g1: self.g3.clone(), g2: self.g2.clone(), g3: self.g1.clone() }
    }

    /// `X⁵ + G₁X⁴ + G₂X³ + G₃X² + X`, lowest degree first.
    pub fn polynomial(&self) -> Poly<F> {
        let z = self.g1.zero_like();
        let one = self.g1.one_like();
        Poly::new(vec![z, one.clone(), self.g3.clone(), self.g2.clone(), self.g1.clone(), one])
    }

    pub fn is_nonsingular(&self) -> bool {
        !igusa_from_symmetric(self).i10.is_zero()
    }
}

impl SymmetricCoefficients2<Complex> {
    /// From a genus-2 symmetric model. A linear term `−X` is moved to `+X` by
    /// `X ↦ cX` with `c⁴ = −1`, which only twists the curve.
    pub fn from_model(m: &SymmetricModel) -> Result<Self, IgusaError> {
        if m.g != 2 {
            return Err(IgusaError::Genus(m.g));
        }
        let g = &m.coefficients;
        if m.sign() > 0 {
            return Ok(SymmetricCoefficients2::new(g[0].clone(), g[1].clone(), g[2].clone()));
        }
        let p = Precision::bits(g[0].prec().0);
        let c = p.root_of_unity(1, 8);
        let c2 = Complex::with_val(p.bits, &c * &c);
        let c3 = Complex::with_val(p.bits, &c2 * &c);
        Ok(SymmetricCoefficients2::new(g[0].mul(&c3).neg(), g[1].mul(&c2).neg(), g[2].mul(&c).neg()))
    }
}

const G_VARS: [&str; 3] = ["G1", "G2", "G3"];

const FORWARD_SRC: [&str; 4] = [
    "2*(20 + 3*G2^2 - 8*G1*G3)",
    "-4*(20 + 3*G1^2*G2 - 9*G2^2 - G1*G3 - G1^2*G3^2 + 3*G2*G3^2)",
    "-2*(160 + 18*G1^4 - 13*G1^2*G2 - 88*G2^2 + 12*G1^2*G2^3 - 36*G2^4 - 32*G1*G3 - 38*G1^3*G2*G3 \
     + 119*G1*G2^2*G3 - 14*G1^2*G3^2 - 13*G2*G3^2 - 4*G1^2*G2^2*G3^2 + 12*G2^3*G3^2 + 12*G1^3*G3^3 \
     - 38*G1*G2*G3^3 + 18*G3^4)",
    "-27*G1^4 + 144*G1^2*G2 - 128*G2^2 - 4*G1^2*G2^3 + 16*G2^4 - 192*G1*G3 + 18*G1^3*G2*G3 \
     - 80*G1*G2^2*G3 - 6*G1^2*G3^2 + 144*G2*G3^2 + G1^2*G2^2*G3^2 - 4*G2^3*G3^2 - 4*G1^3*G3^3 \
     + 18*G1*G2*G3^3 - 27*G3^4 + 256",
];

/// Variables of the scaled system: `S1` only occurs squared.
pub const S_VARS: [&str; 8] = ["G2", "S1", "S2", "r", "I2", "I4", "I6", "I10"];

/// `I_{2k}` written in `S₁, S₂` minus `rᵏ𝓘_{2k}`.
const S_SYSTEM_SRC: [&str; 4] = [
    "2*(20 + 3*G2^2 - 8*S2) - r*I2",
    "4*(-20 + 9*G2^2 - 3*G2*S1^2 + S2 + 6*G2*S2 + S2^2) - r^2*I4",
    "2*(-160 + 88*G2^2 + 36*G2^4 + 13*G2*S1^2 - 12*G2^3*S1^2 - 18*S1^4 + 32*S2 - 26*G2*S2 \
     - 119*G2^2*S2 + 24*G2^3*S2 + 72*S1^2*S2 + 38*G2*S1^2*S2 - 22*S2^2 - 76*G2*S2^2 + 4*G2^2*S2^2 \
     - 12*S2^3) - r^3*I6",
    "-128*G2^2 + 16*G2^4 + 144*G2*S1^2 - 4*G2^3*S1^2 - 27*S1^4 - 192*S2 - 288*G2*S2 - 80*G2^2*S2 \
     + 8*G2^3*S2 + 108*S1^2*S2 + 18*G2*S1^2*S2 - 60*S2^2 - 36*G2*S2^2 + G2^2*S2^2 - 4*S2^3 + 256 \
     - r^5*I10",
];

/// Variables of the (G₂, r) pair and of the final equation in `r`.
pub const R_VARS: [&str; 6] = ["G2", "r", "I2", "I4", "I6", "I10"];

/// `768·G₂·S₁²`. The `I₂` term carries its factor `r`.
const S1_SQUARED_SRC: &str =
    "36*G2^4 + 576*G2^3 - 12*(r*I2 - 240)*G2^2 - 96*(r*I2 - 40)*G2 + r^2*I2^2 - 96*r*I2 - 64*r^2*I4 - 2880";

/// The I₆ and I₁₀ equations after substituting S₂ and S₁².
const G2R_SRC: [&str; 2] = [
    "432*G2^8 - 864*G2^6*(48 + r*I2) + 72*G2^4*(18240 + 672*r*I2 + 5*r^2*I2^2 + 64*r^2*I4) \
     - 8*G2^2*(1797120 + 81216*r*I2 + 432*r^2*I2^2 + 7*r^3*I2^3 + 27648*r^2*I4 + 1856*r^3*I2*I4 - 6144*r^3*I6) \
     + 2^12*3^4*5*r*I2 - 576*r^3*I2*(I2^2 - 64*I4) + 3*r^4*(I2^2 - 64*I4)^2 + 3456*r^2*(3*I2^2 + 320*I4) \
     + 2^12*3^5*5^2",
    "144*G2^8 - 96*G2^6*(176 + 5*r*I2) + 8*G2^4*(89280 + 4704*r*I2 + 59*r^2*I2^2 + 448*r^2*I4) \
     + 24*G2^2*(-525312 - 36288*r*I2 - 720*r^2*I2^2 - 5*r^3*I2^3 - 9216*r^2*I4 - 192*r^3*I2*I4 + 8192*r^5*I10) \
     + 2^12*3^5*5*r*I2 - 1728*r^3*I2*(I2^2 - 64*I4) + 9*r^4*(I2^2 - 64*I4)^2 + 10368*r^2*(3*I2^2 + 320*I4) \
     + 2^12*3^6*5^2",
];

/// The degree-15 equation in `r`.
const EQ_R_SRC: &str = "2^8*3^6*r^15*I10^4 + 2^6*3^6*r^13*I10^3*(I2*I4 - 4*I6) - 2^6*3^5*r^12*I10^3*(I2^2 - 16*I4)
 + 108*r^11*I10^2*(19*I2^2*I4^2 + 8*I4^3 - 168*I2*I4*I6 + 360*I6^2 + 5616*I2*I10)
 - 216*r^10*I10^2*(11*I2^3*I4 + 16*I2*I4^2 - 36*I2^2*I6 - 192*I4*I6 - 105408*I10)
 + 2*r^9*I10*(I2^5*I4^2 + 25*I2^3*I4^3 - 26*I2*I4^4 - 6*I2^4*I4*I6 - 324*I2^2*I4^2*I6 + 168*I4^3*I6
   + 9*I2^3*I6^2 + 1242*I2*I4*I6^2 - 1512*I6^3 - 270*I2^4*I10 - 11556*I2^2*I4*I10 + 92016*I4^2*I10
   + 37584*I2*I6*I10)
 + 36*r^8*I10*(I2^4*I4^2 - 17*I2^2*I4^3 + 16*I4^4 - 6*I2^3*I4*I6 + 96*I2*I4^2*I6 + 9*I2^2*I6^2
   - 144*I4*I6^2 - 1350*I2^3*I10 + 23544*I2*I4*I10 - 54432*I6*I10)
 + r^7*(I2^4*I4^4 - 2*I2^2*I4^5 + I4^6 - 12*I2^3*I4^3*I6 + 12*I2*I4^4*I6 + 54*I2^2*I4^2*I6^2
   - 18*I4^3*I6^2 - 108*I2*I4*I6^3 + 81*I6^4 + 30*I2^5*I4*I10 + 156*I2^3*I4^2*I10 + 1272*I2*I4^3*I10
   - 72*I2^4*I6*I10 - 3672*I2^2*I4*I6*I10 + 2448*I4^2*I6*I10 + 7236*I2*I6^2*I10
   - 1202364*I2^2*I10^2 + 4167936*I4*I10^2)
 - 4*r^6*I10*(I2^6 - 218*I2^4*I4 - 512*I2^2*I4^2 - 5832*I4^3 + 312*I2^3*I6 + 18480*I2*I4*I6
   - 28152*I6^2 + 2^4*3^7*67*I2*I10)
 - 3*r^5*(-5*I2^4*I4^3 + 19*I2^2*I4^4 - 14*I4^5 + 42*I2^3*I4^2*I6 - 96*I2*I4^3*I6 - 117*I2^2*I4*I6^2
   + 126*I4^2*I6^2 + 108*I2*I6^3 + 48*I2^5*I10 - 906*I2^3*I4*I10 + 372*I2*I4^2*I10
   - 6120*I2^2*I6*I10 + 85824*I4*I6*I10 + 7589376*I10^2)
 - 2*r^4*(I2^5*I4^2 - 110*I2^3*I4^3 + 109*I2*I4^4 - 6*I2^4*I4*I6 + 810*I2^2*I4^2*I6 - 156*I4^3*I6
   + 9*I2^3*I6^2 - 1917*I2*I4*I6^2 + 1404*I6^3 + 594*I2^4*I10 + 24678*I2^2*I4*I10 + 27216*I4^2*I10
   - 140616*I2*I6*I10)
 - 9*r^3*(4*I2^4*I4^2 - 116*I2^2*I4^3 + 31*I4^4 - 24*I2^3*I4*I6 + 672*I2*I4^2*I6 + 36*I2^2*I6^2
   - 1008*I4*I6^2 - 24*I2^3*I10 + 36960*I2*I4*I10 - 94464*I6*I10)
 - 54*r^2*(4*I2^3*I4^2 - 31*I2*I4^3 - 24*I2^2*I4*I6 + 108*I4^2*I6 + 36*I2*I6^2 - 504*I2^2*I10
   + 9792*I4*I10)
 - 432*r*(I2^2*I4^2 - I4^3 - 6*I2*I4*I6 + 9*I6^2 - 54*I2*I10)
 - 2^8*3^6*I10";

/// Spurious factor of the elimination: `768·G₂·S₁²` at `G₂ = 0`.
const SPURIOUS_SRC: &str = "r^2*I2^2 - 96*r*I2 - 64*r^2*I4 - 2880";

struct Formulas {
    forward: [MPoly; 4],
    forward_grad: [[MPoly; 3]; 4],
    s_system: [MPoly; 4],
    s1_squared: MPoly,
    /// The pair in `u = G₂²` (the `G2` slot of [`R_VARS`] now holds `u`).
    pair: [MPoly; 2],
    eq_r: MPoly,
    spurious: MPoly,
}

fn formulas() -> &'static Formulas {
    static F: OnceLock<Formulas> = OnceLock::new();
    F.get_or_init(|| {
        let parse = |s: &str, v: &[&str]| MPoly::parse(s, v).expect("built-in transcription parses");
        let forward: [MPoly; 4] = std::array::from_fn(|k| parse(FORWARD_SRC[k], &G_VARS));
        let forward_grad = std::array::from_fn(|k| std::array::from_fn(|i| forward[k].derivative(i)));
        let pair = std::array::from_fn(|k| parse(G2R_SRC[k], &R_VARS).halve(0).expect("pair is even in G2"));
        Formulas {
            forward,
            forward_grad,
            s_system: std::array::from_fn(|k| parse(S_SYSTEM_SRC[k], &S_VARS)),
            s1_squared: parse(S1_SQUARED_SRC, &R_VARS),
            pair,
            eq_r: parse(EQ_R_SRC, &R_VARS),
            spurious: parse(SPURIOUS_SRC, &R_VARS),
        }
    })
}

/// The forward formulas as polynomials in `(G1, G2, G3)`.
pub fn forward_polynomials() -> &'static [MPoly; 4] {
    &formulas().forward
}

/// `I_{2k}` in `(G2, S1, S2)` minus `rᵏ𝓘_{2k}`, variables [`S_VARS`].
pub fn s_system() -> &'static [MPoly; 4] {
    &formulas().s_system
}

/// The `(G₂, r)` pair with `G₂²` renamed `u`, variables [`R_VARS`].
pub fn g2r_pair() -> &'static [MPoly; 2] {
    &formulas().pair
}

/// `768·G₂·S₁²` as a polynomial in [`R_VARS`].
pub fn s1_squared_numerator() -> &'static MPoly {
    &formulas().s1_squared
}

/// The transcribed equation in `r`, variables [`R_VARS`] (the `G2` slot is unused).
pub fn eq_r_polynomial() -> &'static MPoly {
    &formulas().eq_r
}

/// Monomials of the equation in `r` whose weight in `(I₂, I₄, I₆, I₁₀)` is
/// not `2n + 10` for their power `rⁿ`.
pub fn eq_r_weight_violations() -> Vec<(u32, u32)> {
    let e = eq_r_polynomial();
    let mut bad = Vec::new();
    for (ex, _) in e.terms() {
        let n = ex[1];
        let w = 2 * ex[2] + 4 * ex[3] + 6 * ex[4] + 10 * ex[5];
        if w != 2 * n + 10 {
            bad.push((n, w));
        }
    }
    bad
}

fn r_vals<F: Field>(t: &IgusaClebsch<F>, g2: &F, r: &F) -> [F; 6] {
    [g2.clone(), r.clone(), t.i2.clone(), t.i4.clone(), t.i6.clone(), t.i10.clone()]
}

/// Igusa–Clebsch invariants of a symmetric genus-2 model.
pub fn igusa_from_symmetric<F: Field>(c: &SymmetricCoefficients2<F>) -> IgusaClebsch<F> {
    let v = [c.g1.clone(), c.g2.clone(), c.g3.clone()];
    let f = &formulas().forward;
    IgusaClebsch::from_array(std::array::from_fn(|k| f[k].eval(&v)))
}

/// Root-difference definitions: with `(ij)` the difference of roots `i, j`
/// (taken as 1 when one of them is `∞`) and `a` the leading coefficient,
/// `I₂ = a²Σ₁₅(12)²(34)²(56)²`, `I₄ = a⁴Σ₁₀(12)²(23)²(31)²(45)²(56)²(64)²`,
/// `I₆ = a⁶Σ₆₀(12)²(23)²(31)²(45)²(56)²(64)²(14)²(25)²(36)²`, `I₁₀ = a¹⁰∏(ij)²`.
pub fn igusa_from_roots_oracle<F: Field>(roots: &[ProjPoint<F>], leading: &F) -> IgusaClebsch<F> {
    assert_eq!(roots.len(), 6, "genus 2 needs six branch points");
    let one = leading.one_like();
    let d2 = |a: usize, b: usize| -> F {
        match (&roots[a], &roots[b]) {
            (ProjPoint::Finite(x), ProjPoint::Finite(y)) => {
                let d = x.sub(y);
                d.mul(&d)
            }
            _ => one.clone(),
        }
    };
    let tri = |t: [usize; 3]| d2(t[0], t[1]).mul(&d2(t[1], t[2])).mul(&d2(t[2], t[0]));

    let mut i2 = leading.zero_like();
    for b in 1..6 {
        let rest: Vec<usize> = (1..6).filter(|&x| x != b).collect();
        let (c, others) = (rest[0], &rest[1..]);
        for k in 0..3 {
            let (d, e): (usize, Vec<usize>) = (others[k], others.iter().copied().filter(|&x| x != others[k]).collect());
            i2 = i2.add(&d2(0, b).mul(&d2(c, d)).mul(&d2(e[0], e[1])));
        }
    }
    let mut i4 = leading.zero_like();
    let mut i6 = leading.zero_like();
    for a in 1..6 {
        for b in a + 1..6 {
            let t = [0, a, b];
            let u: Vec<usize> = (1..6).filter(|&x| x != a && x != b).collect();
            let base = tri(t).mul(&tri([u[0], u[1], u[2]]));
            i4 = i4.add(&base);
            for p in PERMS3 {
                let m = d2(t[0], u[p[0]]).mul(&d2(t[1], u[p[1]])).mul(&d2(t[2], u[p[2]]));
                i6 = i6.add(&base.mul(&m));
            }
        }
    }
    let mut i10 = one.clone();
    for a in 0..6 {
        for b in a + 1..6 {
            i10 = i10.mul(&d2(a, b));
        }
    }
    let a2 = leading.mul(leading);
    IgusaClebsch::new(i2.mul(&a2), i4.mul(&powf(&a2, 2)), i6.mul(&powf(&a2, 3)), i10.mul(&powf(&a2, 5)))
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Oracle invariants of a genus-2 branch set with monic polynomial.
pub fn igusa_from_branch_set(b: &BranchSet) -> Result<IgusaClebsch<Complex>, IgusaError> {
    if b.genus() != 2 {
        return Err(IgusaError::Genus(b.genus()));
    }
    Ok(igusa_from_roots_oracle(b.points(), &b.prec().cone()))
}

/// Exact oracle invariants of a rational genus-2 branch set.
pub fn igusa_from_branch_set_exact(b: &BranchSet) -> Result<IgusaClebsch<Rational>, IgusaError> {
    if b.genus() != 2 {
        return Err(IgusaError::Genus(b.genus()));
    }
    let ex = b.exact().ok_or(IgusaError::NotExact)?;
    let pts: Vec<ProjPoint<Rational>> = ex
        .iter()
        .map(|q| match q {
            Some(q) => ProjPoint::Finite(q.clone()),
            None => ProjPoint::Infinity,
        })
        .collect();
    Ok(igusa_from_roots_oracle(&pts, &Rational::from(1)))
}

/// Scalar-specific steps of the inversion.
pub trait InversionField: Field {
    /// Roots to follow: every complex root, or the rational ones in exact mode.
    fn roots_of(p: &Poly<Self>) -> Vec<Self>;
    /// Roots shared by two univariate polynomials (candidates in complex mode).
    fn common_roots(p: &Poly<Self>, q: &Poly<Self>) -> Vec<Self>;
    /// Both square roots, or none when they leave the field.
    fn square_roots(&self) -> Vec<Self>;
    /// Refine `(G, r)` against the target and report whether it matches.
    fn verify(c: SymmetricCoefficients2<Self>, r: Self, t: &IgusaClebsch<Self>, tol: f64) -> Option<(SymmetricCoefficients2<Self>, Self)>;
    fn same(a: &Self, b: &Self, tol: f64) -> bool;
    /// Magnitude normalised so that exact fields report 0 or 1.
    fn rel(&self, scale: f64) -> f64 {
        if scale == 0.0 {
            self.magnitude()
        } else {
            self.magnitude() / scale
        }
    }
}

impl InversionField for Rational {
    fn roots_of(p: &Poly<Self>) -> Vec<Self> {
        p.rational_roots()
    }

    fn common_roots(p: &Poly<Self>, q: &Poly<Self>) -> Vec<Self> {
        let g = p.gcd(q);
        if g.is_zero() || g.degree() == 0 {
            return vec![];
        }
        g.rational_roots()
    }

    fn square_roots(&self) -> Vec<Self> {
        if self.cmp0() == std::cmp::Ordering::Less {
            return vec![];
        }
        let (n, d) = (self.numer(), self.denom());
        if !n.is_perfect_square() || !d.is_perfect_square() {
            return vec![];
        }
        let s = Rational::from((Integer::from(n.sqrt_ref()), Integer::from(d.sqrt_ref())));
        if s == 0 {
            vec![s]
        } else {
            vec![s.clone(), -s]
        }
    }

    fn verify(c: SymmetricCoefficients2<Self>, r: Self, t: &IgusaClebsch<Self>, _tol: f64) -> Option<(SymmetricCoefficients2<Self>, Self)> {
        let f = igusa_from_symmetric(&c);
        (!f.i10.is_zero() && f.weighted_eq(t)).then_some((c, r))
    }

    fn same(a: &Self, b: &Self, _tol: f64) -> bool {
        a == b
    }
}

impl InversionField for Complex {
    fn roots_of(p: &Poly<Self>) -> Vec<Self> {
        if p.degree() == 0 {
            return vec![];
        }
        let prec = Precision::bits(p.coeffs()[0].prec().0);
        let roots = match poly_roots(p, prec.epsilon() * 1e6) {
            Ok(r) => r,
            Err(AlgebraError::NoConvergence { partial, .. }) => partial,
            Err(_) => vec![],
        };
        cluster_centroids(roots, prec.epsilon().powf(1.0 / 8.0))
    }

    // A numerical gcd is fragile near repeated roots. Roots of `p` are kept
    // when `q` is small there on a loose relative scale (repeated roots of the
    // equation in `r` only come with reduced accuracy); forward verification
    // does the real filtering.
    fn common_roots(p: &Poly<Self>, q: &Poly<Self>) -> Vec<Self> {
        Self::roots_of(p)
            .into_iter()
            .filter(|u| {
                let au = cabs_f64(u);
                let size: f64 = q.coeffs().iter().enumerate().map(|(k, c)| cabs_f64(c) * au.powi(k as i32)).sum();
                cabs_f64(&q.eval(u)) <= 1e-3 * size
            })
            .collect()
    }

    fn square_roots(&self) -> Vec<Self> {
        let s = croot(self, 2);
        if s.is_zero() {
            vec![s]
        } else {
            let m = Complex::with_val(s.prec(), -&s);
            vec![s, m]
        }
    }

    fn verify(c: SymmetricCoefficients2<Self>, r: Self, t: &IgusaClebsch<Self>, tol: f64) -> Option<(SymmetricCoefficients2<Self>, Self)> {
        let (c, r) = newton_polish(c, r, t);
        let f = igusa_from_symmetric(&c);
        if cabs_f64(&f.i10) == 0.0 || !is_finite_coeffs(&c) {
            return None;
        }
        (f.weighted_defect(t) < tol).then_some((c, r))
    }

    fn same(a: &Self, b: &Self, tol: f64) -> bool {
        let d = cabs_f64(&Complex::with_val(a.prec(), a - b));
        d <= tol.sqrt() * (1.0 + cabs_f64(a).max(cabs_f64(b)))
    }
}

/// Merge roots closer than `rel·(1 + |z|)`. An m-fold root comes out of the
/// root finder as a cluster of radius ~ε^{1/m}, whose mean is accurate to ~ε.
fn cluster_centroids(roots: Vec<Complex>, rel: f64) -> Vec<Complex> {
    let mut groups: Vec<Vec<Complex>> = Vec::new();
    for z in roots {
        let near = groups.iter_mut().find(|g| {
            let d = cabs_f64(&Complex::with_val(z.prec(), &g[0] - &z));
            d <= rel * (1.0 + cabs_f64(&z))
        });
        match near {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let n = g.len() as u32;
            let mut s = g[0].zero_like();
            for z in &g {
                s = s.add(z);
            }
            Complex::with_val(s.prec(), &s / n)
        })
        .collect()
}

fn is_finite_coeffs(c: &SymmetricCoefficients2<Complex>) -> bool {
    [&c.g1, &c.g2, &c.g3].iter().all(|z| crate::num::is_finite(z))
}

/// Newton on `forward(G) = r^w·t` in the unknowns `(G₁, G₂, G₃, r)`.
///
/// Curves with extra automorphisms give double solutions, where plain Newton
/// is only linear; each step is also tried doubled and the better one kept.
fn newton_polish(
    c: SymmetricCoefficients2<Complex>,
    r: Complex,
    t: &IgusaClebsch<Complex>,
) -> (SymmetricCoefficients2<Complex>, Complex) {
    let p = Precision::bits(r.prec().0);
    let fm = formulas();
    let tv = t.values();
    let residual = |x: &[Complex; 4]| -> (Vec<Complex>, f64) {
        let v = [x[0].clone(), x[1].clone(), x[2].clone()];
        let res: Vec<Complex> = (0..4).map(|k| fm.forward[k].eval(&v).sub(&tv[k].mul(&powf(&x[3], WEIGHTS[k])))).collect();
        let scale: f64 = (0..4).map(|k| cabs_f64(&tv[k].mul(&powf(&x[3], WEIGHTS[k])))).fold(1e-300, f64::max);
        let norm = res.iter().map(cabs_f64).fold(0.0, f64::max) / scale;
        (res, if norm.is_finite() { norm } else { f64::INFINITY })
    };
    let mut x = [c.g1, c.g2, c.g3, r];
    let (mut res, mut norm) = residual(&x);
    for _ in 0..200 {
        if norm < p.epsilon() * 16.0 {
            break;
        }
        let v = [x[0].clone(), x[1].clone(), x[2].clone()];
        let rows: Vec<Vec<Complex>> = (0..4)
            .map(|k| {
                let mut row: Vec<Complex> = (0..3).map(|i| fm.forward_grad[k][i].eval(&v)).collect();
                let w = WEIGHTS[k];
                let dr = tv[k].mul(&powf(&x[3], w - 1)).mul(&x[3].from_i64_like(w as i64));
                row.push(dr.neg());
                row
            })
            .collect();
        let Some(step) = CMatrix::from_rows(rows).solve(&CMatrix::from_columns(&[res.clone()])) else { break };
        let trial = |m: i64| -> [Complex; 4] {
            std::array::from_fn(|i| x[i].sub(&step.get(i, 0).mul(&x[i].from_i64_like(m))))
        };
        let (x1, x2) = (trial(1), trial(2));
        let (r1, n1) = residual(&x1);
        let (r2, n2) = residual(&x2);
        let (xn, rn, nn) = if n2 < n1 { (x2, r2, n2) } else { (x1, r1, n1) };
        if nn >= norm {
            break;
        }
        x = xn;
        res = rn;
        norm = nn;
    }
    let [g1, g2, g3, r] = x;
    (SymmetricCoefficients2::new(g1, g2, g3), r)
}

/// The equation in `r` from the transcription.
pub fn eq_r<F: Field>(t: &IgusaClebsch<F>) -> Poly<F> {
    let z = t.i2.zero_like();
    eq_r_polynomial().univariate(1, &r_vals(t, &z, &z))
}

/// The elimination recomputed: `Res_u` of the pair, a polynomial in `r`.
pub fn pair_resultant<F: Field>(t: &IgusaClebsch<F>) -> Result<Poly<F>, IgusaError> {
    let z = t.i2.zero_like();
    let vals = r_vals(t, &z, &z);
    let [p, q] = g2r_pair();
    Ok(resultant_eliminate(&p.bivariate(0, 1, &vals), &q.bivariate(0, 1, &vals))?)
}

/// `Res_u / (r⁵·q(r)²)` with `q` the spurious `G₂ = 0` factor, and the
/// relative size of what was discarded (0 when exact).
pub fn stripped_resultant<F: InversionField>(t: &IgusaClebsch<F>) -> Result<(Poly<F>, f64), IgusaError> {
    let res = pair_resultant(t)?;
    let scale = res.coeffs().iter().map(|c| c.magnitude()).fold(0.0, f64::max);
    let low = res.coeffs().iter().take(5).map(|c| c.rel(scale)).fold(0.0, f64::max);
    let shifted = Poly::new(res.coeffs().iter().skip(5).cloned().collect());
    let z = t.i2.zero_like();
    let q = formulas().spurious.univariate(1, &r_vals(t, &z, &z));
    let (quot, rem_size) = exact_divide(&shifted, &q.mul(&q), scale).ok_or(IgusaError::Elimination(f64::INFINITY))?;
    Ok((quot, low.max(rem_size)))
}

/// Quotient of a division expected to be exact, and the relative size of the
/// leftover. Runs from the low end when the divisor's roots are large, where
/// the top-down recurrence would amplify rounding by |root| per step.
fn exact_divide<F: InversionField>(p: &Poly<F>, d: &Poly<F>, scale: f64) -> Option<(Poly<F>, f64)> {
    if d.is_zero() || p.degree() < d.degree() {
        return None;
    }
    let d0 = d.coeff(0);
    if d0.is_zero() || d0.magnitude() < d.leading().magnitude() {
        let (quot, rem) = p.div_rem(d)?;
        return Some((quot, rem.coeffs().iter().map(|c| c.rel(scale)).fold(0.0, f64::max)));
    }
    let (n, m) = (p.degree(), d.degree());
    let mut c: Vec<F> = Vec::with_capacity(n - m + 1);
    let conv = |c: &[F], k: usize| {
        let mut acc = p.coeff(k);
        for j in 1..=m.min(k) {
            if k - j < c.len() {
                acc = acc.sub(&d.coeff(j).mul(&c[k - j]));
            }
        }
        acc
    };
    for k in 0..=n - m {
        let v = conv(&c, k).div(&d0);
        c.push(v);
    }
    let left = (n - m + 1..=n).map(|k| conv(&c, k).rel(scale)).fold(0.0, f64::max);
    Some((Poly::new(c), left))
}

/// Largest coefficient mismatch between `a` and the best multiple of `b`,
/// relative to the size of `a`.
pub fn proportionality_defect<F: InversionField>(a: &Poly<F>, b: &Poly<F>) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    let (k, _) = (0..n).map(|k| (k, a.coeff(k).magnitude())).fold((0, -1.0), |m, x| if x.1 > m.1 { x } else { m });
    if b.coeff(k).is_zero() {
        return f64::INFINITY;
    }
    let lambda = a.coeff(k).div(&b.coeff(k));
    let scale = a.coeffs().iter().map(|c| c.magnitude()).fold(0.0, f64::max);
    (0..n).map(|j| a.coeff(j).sub(&b.coeff(j).mul(&lambda)).rel(scale)).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct IgusaCandidate<F> {
    pub g: SymmetricCoefficients2<F>,
    /// Scale with `forward(G) = r^w·𝓘`.
    pub r: F,
}

#[derive(Clone, Debug)]
pub struct IgusaInversion<F> {
    pub candidates: Vec<IgusaCandidate<F>>,
    /// Roots of the equation in `r` that were followed.
    pub r_roots: Vec<F>,
    /// Roots of the spurious factor, used for the `G₂ = 0` branch.
    pub r_roots_g2_zero: Vec<F>,
    /// Residue left after stripping `r⁵q(r)²` from the runtime resultant.
    pub elimination_defect: f64,
    /// Mismatch between the runtime polynomial and the transcription.
    pub transcription_defect: f64,
}

/// All symmetric models `(G₁, G₂, G₃)` whose invariants equal `t` up to
/// weighted scaling. In exact mode only rational candidates are returned.
pub fn symmetric_from_igusa<F: InversionField>(t: &IgusaClebsch<F>, tol: f64) -> Result<IgusaInversion<F>, IgusaError> {
    if t.i10.is_zero() {
        return Err(IgusaError::ZeroI10);
    }
    let (runtime, elimination_defect) = stripped_resultant(t)?;
    let transcription_defect = proportionality_defect(&eq_r(t), &runtime);
    let r_roots = F::roots_of(&runtime);
    let z = t.i2.zero_like();
    let spurious = formulas().spurious.univariate(1, &r_vals(t, &z, &z));
    let r_roots_g2_zero = F::roots_of(&spurious);

    let generic: Vec<Vec<IgusaCandidate<F>>> = r_roots.par_iter().map(|r| generic_branch(t, r, tol)).collect();
    let special: Vec<Vec<IgusaCandidate<F>>> = r_roots_g2_zero.par_iter().map(|r| g2_zero_branch(t, r, tol)).collect();

    let mut candidates: Vec<IgusaCandidate<F>> = Vec::new();
    for c in generic.into_iter().chain(special).flatten() {
        let dup = candidates
            .iter()
            .any(|d| F::same(&d.g.g1, &c.g.g1, tol) && F::same(&d.g.g2, &c.g.g2, tol) && F::same(&d.g.g3, &c.g.g3, tol));
        if !dup {
            candidates.push(c);
        }
    }
    if candidates.is_empty() {
        return Err(IgusaError::NoCandidate);
    }
    Ok(IgusaInversion { candidates, r_roots, r_roots_g2_zero, elimination_defect, transcription_defect })
}

fn s2_of<F: Field>(t: &IgusaClebsch<F>, g2: &F, r: &F) -> F {
    // S₂ = (6G₂² + 40 − r𝓘₂)/16
    let six = g2.from_i64_like(6);
    six.mul(g2).mul(g2).add(&g2.from_i64_like(40)).sub(&r.mul(&t.i2)).div(&g2.from_i64_like(16))
}

fn assemble<F: InversionField>(t: &IgusaClebsch<F>, r: &F, g2: &F, s1sq: &F, tol: f64, out: &mut Vec<IgusaCandidate<F>>) {
    let s2 = s2_of(t, g2, r);
    let two = g2.from_i64_like(2);
    for s1 in s1sq.square_roots() {
        let disc = s1.mul(&s1).sub(&s2.mul(&g2.from_i64_like(4)));
        for d in disc.square_roots() {
            let g1 = s1.add(&d).div(&two);
            let g3 = s1.sub(&d).div(&two);
            let c = SymmetricCoefficients2::new(g1, g2.clone(), g3);
            if let Some((c, r)) = F::verify(c, r.clone(), t, tol) {
                out.push(IgusaCandidate { g: c, r });
            }
        }
    }
}

fn generic_branch<F: InversionField>(t: &IgusaClebsch<F>, r: &F, tol: f64) -> Vec<IgusaCandidate<F>> {
    let fm = formulas();
    let z = r.zero_like();
    let vals = r_vals(t, &z, r);
    let p = fm.pair[0].univariate(0, &vals);
    let q = fm.pair[1].univariate(0, &vals);
    let mut out = Vec::new();
    for u in F::common_roots(&p, &q) {
        if u.is_zero() {
            continue;
        }
        for g2 in u.square_roots() {
            let num = fm.s1_squared.eval(&r_vals(t, &g2, r));
            let s1sq = num.div(&g2.mul(&g2.from_i64_like(768)));
            assemble(t, r, &g2, &s1sq, tol, &mut out);
        }
    }
    out
}

fn g2_zero_branch<F: InversionField>(t: &IgusaClebsch<F>, r: &F, tol: f64) -> Vec<IgusaCandidate<F>> {
    let fm = formulas();
    let z = r.zero_like();
    let s2 = s2_of(t, &z, r);
    let vals = [z.clone(), z.clone(), s2, r.clone(), t.i2.clone(), t.i4.clone(), t.i6.clone(), t.i10.clone()];
    let e6 = fm.s_system[2].halve(1).expect("S1 occurs squared");
    let quad = e6.univariate(1, &vals);
    let mut out = Vec::new();
    for s1sq in F::roots_of(&quad) {
        assemble(t, r, &z, &s1sq, tol, &mut out);
    }
    out
}

/// Complex inversion of rational input at working precision `p`.
pub fn symmetric_from_igusa_numeric(t: &IgusaClebsch<Rational>, p: Precision, tol: f64) -> Result<IgusaInversion<Complex>, IgusaError> {
    symmetric_from_igusa(&t.to_complex(p), tol)
}
