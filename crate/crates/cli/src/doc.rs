//! JSON documents. Every number travels as a decimal string so nothing is
//! lost to binary64; numbers are accepted on input too.

use std::collections::BTreeMap;
use std::str::FromStr;

use hyperschottky::algebra::{Poly, ProjPoint, RationalPolynomial};
use hyperschottky::identities::IdentityReport;
use hyperschottky::linalg::CMatrix;
use hyperschottky::num::{float_to_string, Precision};
use hyperschottky::symcurve::BranchSet;
use hyperschottky::theta::RiemannMatrix;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Str(String),
    Num(serde_json::Number),
}

impl Scalar {
    pub fn text(&self) -> String {
        match self {
            Scalar::Str(s) => s.trim().to_string(),
            Scalar::Num(n) => n.to_string(),
        }
    }

    pub fn real(&self, p: Precision) -> Result<Float, CliError> {
        p.parse_real(&self.text()).ok_or_else(|| CliError::input(format!("not a number: {}", self.text())))
    }

    pub fn rational(&self) -> Result<Rational, CliError> {
        parse_rational(&self.text())
    }
}

/// "3", "-7/4", "1.25", "2.5e-3" as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::input(format!("not a rational number: {s}"));
    if let Ok(q) = Rational::from_str(s) {
        return Ok(q);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = Integer::from_str(&format!("{int}{frac}0")).map_err(|_| bad())? / 10;
    let shift = exp - frac.len() as i32;
    let scale = Integer::from(Integer::u_pow_u(10, shift.unsigned_abs()));
    let mut q = Rational::from(digits);
    if shift >= 0 {
        q *= scale;
    } else {
        q /= scale;
    }
    Ok(if neg { -q } else { q })
}

/// A complex number as `[re, im]`, or a bare real.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CScalar {
    Pair([Scalar; 2]),
    Real(Scalar),
}

impl CScalar {
    pub fn complex(&self, p: Precision) -> Result<Complex, CliError> {
        match self {
            CScalar::Pair([a, b]) => Ok(Complex::with_val(p.bits, (a.real(p)?, b.real(p)?))),
            CScalar::Real(a) => Ok(Complex::with_val(p.bits, (a.real(p)?, 0))),
        }
    }
}

pub fn dec(x: &Float, p: Precision) -> String {
    float_to_string(x, p.decimal_digits() as usize)
}

pub fn cjson(z: &Complex, p: Precision) -> Value {
    json!([dec(z.real(), p), dec(z.imag(), p)])
}

pub fn cvec(v: &[Complex], p: Precision) -> Value {
    Value::Array(v.iter().map(|z| cjson(z, p)).collect())
}

/// Curve given by branch points (or a rational polynomial f with Y² = f).
#[derive(Clone, Debug, Deserialize)]
pub struct CurveDocument {
    pub genus: Option<usize>,
    #[serde(default)]
    pub roots: Vec<CScalar>,
    #[serde(default)]
    pub has_infinity: bool,
    pub exact_roots: Option<Vec<Scalar>>,
    /// Coefficients of f, constant term first.
    pub polynomial: Option<Vec<Scalar>>,
}

impl CurveDocument {
    pub fn exact_polynomial(&self) -> Result<Option<RationalPolynomial>, CliError> {
        match &self.polynomial {
            None => Ok(None),
            Some(c) => Ok(Some(Poly::new(c.iter().map(|s| s.rational()).collect::<Result<_, _>>()?))),
        }
    }

    pub fn branch_set(&self, p: Precision) -> Result<BranchSet, CliError> {
        if let Some(f) = self.exact_polynomial()? {
            if f.degree() < 3 {
                return Err(CliError::input("polynomial degree must be at least 3"));
            }
            let b = BranchSet::from_polynomial(&f, p).map_err(CliError::from_sym)?;
            self.check_genus(b.genus())?;
            return Ok(b);
        }
        let n = self.exact_roots.as_ref().map(|r| r.len()).unwrap_or(self.roots.len()) + self.has_infinity as usize;
        if n < 4 || n % 2 == 1 {
            return Err(CliError::input(format!("{n} branch points do not define a hyperelliptic curve")));
        }
        let g = (n - 2) / 2;
        self.check_genus(g)?;
        if let Some(ex) = &self.exact_roots {
            let q: Vec<Rational> = ex.iter().map(|s| s.rational()).collect::<Result<_, _>>()?;
            return BranchSet::from_rationals(g, &q, self.has_infinity, p).map_err(CliError::from_sym);
        }
        let mut pts: Vec<ProjPoint<Complex>> = self.roots.iter().map(|r| r.complex(p).map(ProjPoint::Finite)).collect::<Result<_, _>>()?;
        if self.has_infinity {
            pts.push(ProjPoint::Infinity);
        }
        BranchSet::new(g, pts, p).map_err(CliError::from_sym)
    }

    fn check_genus(&self, g: usize) -> Result<(), CliError> {
        match self.genus {
            Some(d) if d != g => Err(CliError::input(format!("declared genus {d} but the branch points give genus {g}"))),
            _ => Ok(()),
        }
    }
}

/// Symmetric model Y² = X^{2g+1} + G₁X^{2g} + ⋯ + G_{2g−1}X² ± X.
#[derive(Clone, Debug, Deserialize)]
pub struct ModelDocument {
    pub genus: usize,
    #[serde(default)]
    pub coefficients: Vec<CScalar>,
    pub linear: Option<CScalar>,
    pub exact_coefficients: Option<Vec<Scalar>>,
}

/// g×g matrix as decimal-string arrays.
#[derive(Clone, Debug, Deserialize)]
pub struct MatrixDocument {
    pub g: usize,
    pub re: Vec<Vec<Scalar>>,
    pub im: Vec<Vec<Scalar>>,
}

impl MatrixDocument {
    pub fn riemann(&self, p: Precision) -> Result<RiemannMatrix, CliError> {
        let g = self.g;
        if self.re.len() != g || self.im.len() != g || self.re.iter().chain(&self.im).any(|r| r.len() != g) {
            return Err(CliError::input(format!("matrix must be {g}×{g}")));
        }
        let mut e = Vec::with_capacity(g * g);
        for i in 0..g {
            for j in 0..g {
                e.push(Complex::with_val(p.bits, (self.re[i][j].real(p)?, self.im[i][j].real(p)?)));
            }
        }
        RiemannMatrix::new(g, e).map_err(|e| CliError::input(e.to_string()))
    }
}

pub fn matrix_json(m: &CMatrix, p: Precision) -> Value {
    let rows = m.rows;
    let cols = m.cols;
    let part = |f: &dyn Fn(&Complex) -> String| -> Value {
        Value::Array((0..rows).map(|i| Value::Array((0..cols).map(|j| Value::String(f(m.get(i, j)))).collect())).collect())
    };
    json!({
        "g": rows,
        "re": part(&|z| dec(z.real(), p)),
        "im": part(&|z| dec(z.imag(), p)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportJson {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub lhs: Value,
    pub rhs: Value,
    pub residual: String,
    pub passed: bool,
    pub tol: String,
    pub details: BTreeMap<String, String>,
}

impl ReportJson {
    pub fn new(r: &IdentityReport, p: Precision) -> Self {
        ReportJson {
            name: r.name.clone(),
            params: r.params.clone(),
            lhs: cvec(&r.lhs, p),
            rhs: cvec(&r.rhs, p),
            residual: format!("{:e}", r.residual),
            passed: r.passed,
            tol: format!("{:e}", r.tol),
            details: r.details.iter().map(|(k, v)| (k.clone(), format!("{v:e}"))).collect(),
        }
    }
}
