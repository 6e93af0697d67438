//! Sparse multivariate polynomials with integer coefficients.
//!
//! Long closed formulas are kept as text and parsed once, so the source of a
//! transcription stays readable and can be checked term by term (weights,
//! symmetry) before it is evaluated over any [`Field`].

use std::collections::BTreeMap;
use std::fmt;

use rug::Integer;

use crate::algebra::{BiPoly, Field, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Integer>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expression parse error: {}", self.0)
    }
}

impl std::error::Error for ParseError {}

impl MPoly {
    pub fn zero(vars: &[&str]) -> Self {
        MPoly { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: Integer) -> Self {
        let mut p = Self::zero(vars);
        if c != 0 {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn var(vars: &[&str], i: usize) -> Self {
        let mut p = Self::zero(vars);
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        p.terms.insert(e, Integer::from(1));
        p
    }

    /// Parse `+ - * ^ ( )`, integer literals and the given variable names.
    /// Exponents must be non-negative integer literals.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self, ParseError> {
        let toks = tokenize(src)?;
        let mut p = Parser { toks, pos: 0, vars };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(ParseError(format!("trailing input at token {}", p.pos)));
        }
        Ok(e)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Integer)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn insert(&mut self, e: Vec<u32>, c: Integer) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if c != 0 {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = Integer::from(-&*c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                r.insert(e, Integer::from(ca * cb));
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = MPoly::constant(&self.var_refs(), Integer::from(1));
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn scale(&self, s: &Integer) -> Self {
        let mut r = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            r.insert(e.clone(), Integer::from(c * s));
        }
        r
    }

    fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut r = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            r.insert(f, Integer::from(c * e[i]));
        }
        r
    }

    /// Highest power of variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// `coefficients_in(i)[k]` multiplies `x_i^k`.
    pub fn coefficients_in(&self, i: usize) -> Vec<MPoly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![MPoly { vars: self.vars.clone(), terms: BTreeMap::new() }; d + 1];
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[i] = 0;
            out[e[i] as usize].insert(f, c.clone());
        }
        out
    }

    /// Replace `x_i^(2k)` by `x_i^k`; `None` if an odd power of `x_i` occurs.
    pub fn halve(&self, i: usize) -> Option<Self> {
        let mut r = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            if e[i] % 2 == 1 {
                return None;
            }
            let mut f = e.clone();
            f[i] /= 2;
            r.insert(f, c.clone());
        }
        Some(r)
    }

    /// Set of `Σ weights[k]·e_k` over all monomials.
    pub fn weighted_degrees(&self, weights: &[u32]) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|e| e.iter().zip(weights).map(|(a, w)| a * w).sum()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Evaluate at `vals` (one value per variable).
    pub fn eval<F: Field>(&self, vals: &[F]) -> F {
        assert_eq!(vals.len(), self.vars.len());
        let t = &vals[0];
        let mut powers: Vec<Vec<F>> = Vec::with_capacity(vals.len());
        for (i, v) in vals.iter().enumerate() {
            let d = self.degree_in(i) as usize;
            let mut p = vec![t.one_like()];
            for k in 1..=d {
                let next = p[k - 1].mul(v);
                p.push(next);
            }
            powers.push(p);
        }
        let mut acc = t.zero_like();
        for (e, c) in &self.terms {
            let mut m = t.from_integer_like(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m = m.mul(&powers[i][k as usize]);
                }
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// Univariate polynomial in `x_i`, other variables taken from `vals`
    /// (the entry at `i` is ignored).
    pub fn univariate<F: Field>(&self, i: usize, vals: &[F]) -> Poly<F> {
        let c: Vec<F> = self.coefficients_in(i).iter().map(|p| p.eval(vals)).collect();
        Poly::new(c)
    }

    /// Bivariate polynomial in `(x_u, x_v)` with the remaining variables
    /// substituted from `vals`.
    pub fn bivariate<F: Field>(&self, u: usize, v: usize, vals: &[F]) -> BiPoly<F> {
        BiPoly::new(self.coefficients_in(u).iter().map(|c| c.univariate(v, vals)).collect())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if *c < 0 { "-" } else if n > 0 { "+" } else { "" };
            let a = Integer::from(c.abs_ref());
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            if mono.is_empty() {
                write!(f, "{sign}{a}")?;
            } else if a == 1 {
                write!(f, "{sign}{}", mono.join("*"))?;
            } else {
                write!(f, "{sign}{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Integer),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ParseError> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse::<Integer>().map_err(|e| ParseError(e.to_string()))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ParseError(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MPoly, ParseError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<MPoly, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e = n.to_u32().ok_or_else(|| ParseError("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(ParseError("exponent must be an integer literal".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MPoly, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MPoly::constant(self.vars, n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self.vars.iter().position(|v| *v == name).ok_or_else(|| ParseError(format!("unknown variable {name}")))?;
                Ok(MPoly::var(self.vars, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError("missing ')'".into()));
                }
                Ok(e)
            }
            t => Err(ParseError(format!("unexpected token {t:?}"))),
        }
    }
}
