//! Working-precision scalars.
//!
//! Everything numeric runs on MPFR floats (`rug::Float` / `rug::Complex`) whose
//! mantissa width is chosen at runtime. `Precision::binary64()` gives a 53-bit
//! mantissa, matching IEEE double rounding; `Precision::digits(n)` gives roughly
//! `n` correct decimal digits plus guard bits.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Mantissa width used for every float created by a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    pub bits: u32,
}

const GUARD_BITS: u32 = 16;

impl Precision {
    pub fn bits(bits: u32) -> Self {
        Precision { bits: bits.max(24) }
    }

    pub fn binary64() -> Self {
        Precision { bits: 53 }
    }

    /// Enough bits for `d` decimal digits, with a few guard bits on top.
    pub fn digits(d: u32) -> Self {
        let b = (d as f64 * std::f64::consts::LOG2_10).ceil() as u32;
        Precision { bits: b + GUARD_BITS }
    }

    /// Approximate number of trustworthy decimal digits.
    pub fn decimal_digits(&self) -> u32 {
        let b = self.bits.saturating_sub(if self.bits > 53 { GUARD_BITS } else { 0 });
        (b as f64 / std::f64::consts::LOG2_10).floor() as u32
    }

    /// A relative epsilon a few ulps above the unit roundoff.
    pub fn epsilon(&self) -> f64 {
        2f64.powi(-(self.bits as i32) + 4)
    }

    pub fn with_extra(&self, extra: u32) -> Self {
        Precision { bits: self.bits + extra }
    }

    pub fn real(&self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn real_zero(&self) -> Float {
        Float::new(self.bits)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.bits, (re, im))
    }

    pub fn czero(&self) -> Complex {
        Complex::new(self.bits)
    }

    pub fn cone(&self) -> Complex {
        Complex::with_val(self.bits, 1)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// `2πi` as a complex number.
    pub fn two_pi_i(&self) -> Complex {
        let tp = self.pi() * 2u32;
        Complex::with_val(self.bits, (0, tp))
    }

    /// exp(2πi k / n)
    pub fn root_of_unity(&self, k: i64, n: i64) -> Complex {
        let ang = self.pi() * 2u32 * Float::with_val(self.bits, k) / Float::with_val(self.bits, n);
        let (s, c) = ang.sin_cos(Float::new(self.bits));
        Complex::with_val(self.bits, (c, s))
    }

    pub fn from_rational(&self, q: &rug::Rational) -> Complex {
        Complex::with_val(self.bits, (Float::with_val(self.bits, q), 0))
    }

    /// Parse a decimal string (e.g. `"1.25e-3"`) at this precision.
    pub fn parse_real(&self, s: &str) -> Option<Float> {
        Float::parse(s.trim()).ok().map(|p| Float::with_val(self.bits, p))
    }
}

/// |z| as a Float.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// |z| as f64 (saturating to 0/inf outside the double range).
pub fn cabs_f64(z: &Complex) -> f64 {
    cabs(z).to_f64()
}

/// Relative distance `|a-b| / max(|a|,|b|,floor)` as f64.
pub fn rel_diff(a: &Complex, b: &Complex, floor: f64) -> f64 {
    let p = a.prec().0.max(b.prec().0);
    let d = cabs(&Complex::with_val(p, a - b)).to_f64();
    let m = cabs_f64(a).max(cabs_f64(b)).max(floor);
    d / m
}

/// Integer power of a complex number (negative exponents allowed).
pub fn cpow(z: &Complex, e: i32) -> Complex {
    let p = z.prec().0;
    Complex::with_val(p, z.pow(e))
}

/// Principal n-th root.
pub fn croot(z: &Complex, n: u32) -> Complex {
    let p = z.prec().0;
    if z.is_zero() {
        return Complex::new(p);
    }
    let l = Complex::with_val(p, z.ln_ref());
    Complex::with_val(p, l / n).exp()
}

/// Round tiny real or imaginary parts (relative to `scale`) to exact zero, so
/// that values which are mathematically real or imaginary print cleanly and
/// sort deterministically.
pub fn clean(z: &mut Complex, rel: f64, scale: f64) {
    let thr = rel * scale.max(1e-300);
    if z.real().to_f64().abs() < thr {
        *z.mut_real() = Float::new(z.prec().0);
    }
    if z.imag().to_f64().abs() < thr {
        *z.mut_imag() = Float::new(z.prec().1);
    }
}

/// Lexicographic (re, im) comparison used for deterministic root ordering.
pub fn cmp_re_im(a: &Complex, b: &Complex) -> std::cmp::Ordering {
    a.real()
        .partial_cmp(b.real())
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.imag().partial_cmp(b.imag()).unwrap_or(std::cmp::Ordering::Equal))
}

/// Decimal rendering with `digits` significant digits; used by the JSON layer.
pub fn float_to_string(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

pub fn is_finite(z: &Complex) -> bool {
    z.real().is_finite() && z.imag().is_finite()
}
