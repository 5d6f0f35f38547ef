//! Exact multivariate polynomials in the fixed variables `(x, y, z, λ, t)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Coeff, GaussianRational};

pub const NVARS: usize = 5;

/// Dense exponent vector over `(x, y, z, λ, t)`.
pub type Exps = [u32; NVARS];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X = 0,
    Y = 1,
    Z = 2,
    L = 3,
    T = 4,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::X, Var::Y, Var::Z, Var::L, Var::T];
    pub const PARAMS: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn idx(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z", "l", "t"][self as usize]
    }

    pub fn from_idx(i: usize) -> Var {
        Var::ALL[i]
    }
}

pub fn total_degree(e: &Exps) -> u32 {
    e.iter().sum()
}

/// Graded ordering key with `x < y < z < λ < t` inside each degree.
pub fn graded_key(e: &Exps) -> (u32, u32, u32, u32, u32, u32) {
    (total_degree(e), e[4], e[3], e[2], e[1], e[0])
}

pub fn monomial_string(e: &Exps) -> String {
    let parts: Vec<String> = Var::ALL
        .iter()
        .filter(|v| e[v.idx()] > 0)
        .map(|v| match e[v.idx()] {
            1 => v.name().to_string(),
            p => format!("{}^{}", v.name(), p),
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

pub fn var_exps(v: Var) -> Exps {
    let mut e = [0; NVARS];
    e[v.idx()] = 1;
    e
}

/// All monomials of total degree `d` in the given variables, sorted by
/// [`graded_key`].
pub fn monomials_of_degree(vars: &[Var], d: u32) -> Vec<Exps> {
    fn rec(vars: &[Var], d: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        match vars {
            [] => {
                if d == 0 {
                    out.push(*cur);
                }
            }
            [v, rest @ ..] => {
                for p in 0..=d {
                    cur[v.idx()] = p;
                    rec(rest, d - p, cur, out);
                }
                cur[v.idx()] = 0;
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, d, &mut [0; NVARS], &mut out);
    out.sort_by_key(graded_key);
    out
}

/// All monomials of total degree `≤ d`, graded order.
pub fn monomials_up_to(vars: &[Var], d: u32) -> Vec<Exps> {
    (0..=d).flat_map(|k| monomials_of_degree(vars, k)).collect()
}

/// Exact polynomial with [`Coeff`] coefficients. No zero coefficient is
/// ever stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exps, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term([0; NVARS], c);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(var_exps(v), Coeff::one())
    }

    pub fn monomial(e: Exps, c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exps, Coeff)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exps, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exps) -> Coeff {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| total_degree(e) == 0)
    }

    /// Highest total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(total_degree).max()
    }

    /// Lowest total degree; `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(total_degree).min()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.idx()]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.order()
    }

    /// No variable outside `vars` occurs.
    pub fn uses_only(&self, vars: &[Var]) -> bool {
        self.terms
            .keys()
            .all(|e| Var::ALL.iter().all(|v| vars.contains(v) || e[v.idx()] == 0))
    }

    pub fn variables(&self) -> Vec<Var> {
        Var::ALL
            .iter()
            .copied()
            .filter(|v| self.terms.keys().any(|e| e[v.idx()] > 0))
            .collect()
    }

    /// Homogeneous component of degree `d`.
    pub fn component(&self, d: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) == d)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Drop all terms of total degree above `d`.
    pub fn truncate(&self, d: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) <= d)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Coefficientwise complex conjugate.
    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.conj())).collect(),
        }
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.terms.values().all(Coeff::is_real)
    }

    pub fn is_gaussian(&self) -> bool {
        self.terms.values().all(Coeff::is_gaussian)
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Exps) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = *e;
                    for i in 0..NVARS {
                        f[i] += m[i];
                    }
                    (f, c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let i = v.idx();
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                out.add_term(f, c.scale_int(e[i] as i64));
            }
        }
        out
    }

    /// Simultaneous substitution `v ↦ images[v]`.
    pub fn compose(&self, images: &[Poly; NVARS]) -> Poly {
        let mut cache: Vec<Vec<Poly>> = (0..NVARS).map(|_| vec![Poly::one()]).collect();
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for i in 0..NVARS {
                let p = e[i] as usize;
                while cache[i].len() <= p {
                    let next = cache[i].last().unwrap() * &images[i];
                    cache[i].push(next);
                }
                if p > 0 {
                    term = &term * &cache[i][p];
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Substitute a single variable.
    pub fn subs(&self, v: Var, image: &Poly) -> Poly {
        let mut images: [Poly; NVARS] = std::array::from_fn(|i| Poly::var(Var::from_idx(i)));
        images[v.idx()] = image.clone();
        self.compose(&images)
    }

    pub fn eval_exact(&self, point: &[Coeff; NVARS]) -> Coeff {
        let mut acc = Coeff::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for i in 0..NVARS {
                for _ in 0..e[i] {
                    term = &term * &point[i];
                }
            }
            acc += &term;
        }
        acc
    }

    pub fn eval(&self, point: &[Complex64; NVARS]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_complex() * eval_monomial(e, point))
            .sum()
    }

    pub fn to_num(&self) -> NumPoly {
        NumPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.to_complex())).collect(),
        }
    }

    /// Parse the text form, e.g. `"x - i*y + 1/2*sqrt(3)*z^2"`.
    pub fn parse(s: &str) -> Result<Poly> {
        Parser::new(s).parse_all()
    }
}

fn eval_monomial(e: &Exps, point: &[Complex64; NVARS]) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for i in 0..NVARS {
        if e[i] > 0 {
            v *= point[i].powu(e[i]);
        }
    }
    v
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut items: Vec<(&Exps, &Coeff)> = self.terms.iter().collect();
        items.sort_by_key(|(e, _)| std::cmp::Reverse((total_degree(e), **e)));
        let mut first = true;
        for (e, c) in items {
            let mono = monomial_string(e);
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(['+', '-']) => (true, rest.to_string()),
                _ => (false, cs),
            };
            let term = if mono == "1" {
                body
            } else if body == "1" {
                mono
            } else {
                format!("{body}*{mono}")
            };
            match (first, neg) {
                (true, true) => write!(f, "-{term}")?,
                (true, false) => write!(f, "{term}")?,
                (false, true) => write!(f, " - {term}")?,
                (false, false) => write!(f, " + {term}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Poly::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let mut e = *ea;
                for i in 0..NVARS {
                    e[i] += eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

macro_rules! poly_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                (&self).$m(o)
            }
        }
    };
}
poly_owned!(Add, add);
poly_owned!(Sub, sub);
poly_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl From<Coeff> for Poly {
    fn from(c: Coeff) -> Self {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Self {
        Poly::constant(Coeff::from_int(n))
    }
}

/// Floating-point copy of a [`Poly`] for fast evaluation.
#[derive(Clone, Debug, Default)]
pub struct NumPoly {
    terms: Vec<(Exps, Complex64)>,
}

impl NumPoly {
    pub fn eval(&self, point: &[Complex64; NVARS]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * eval_monomial(e, point))
            .sum()
    }

    pub fn derivative(&self, v: Var) -> NumPoly {
        let i = v.idx();
        NumPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[i] > 0)
                .map(|(e, c)| {
                    let mut f = *e;
                    f[i] -= 1;
                    (f, c * e[i] as f64)
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            chars: src.char_indices().collect(),
            pos: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let col = self
            .chars
            .get(self.pos)
            .map(|(b, _)| self.src[..*b].chars().count() + 1)
            .unwrap_or(self.chars.len() + 1);
        Error::Parse {
            col,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Poly> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(self.err("division only by nonzero constants"));
                }
                let c = d.coeff(&[0; NVARS]);
                acc = acc.scale(&c.inv().expect("nonzero"));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.primary()?;
        if self.eat('^') {
            let n = self.integer()?;
            let n: u32 = n
                .try_into()
                .map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        s.parse().map_err(|_| self.err("integer out of range"))
    }

    fn primary(&mut self) -> Result<Poly> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        if c == '(' {
            self.pos += 1;
            let p = self.expr()?;
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(p);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_alphabetic() {
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].1.is_alphanumeric() {
                self.pos += 1;
            }
            let word: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
            return match word.as_str() {
                "x" => Ok(Poly::var(Var::X)),
                "y" => Ok(Poly::var(Var::Y)),
                "z" => Ok(Poly::var(Var::Z)),
                "l" | "λ" | "lambda" => Ok(Poly::var(Var::L)),
                "t" => Ok(Poly::var(Var::T)),
                "i" => Ok(Poly::constant(Coeff::i())),
                "sqrt" => {
                    if !self.eat('(') {
                        return Err(self.err("expected '(' after sqrt"));
                    }
                    let n = self.integer()?;
                    let mut den = 1u64;
                    if self.eat('/') {
                        den = self.integer()?;
                        if den == 0 {
                            return Err(self.err("zero denominator"));
                        }
                    }
                    if !self.eat(')') {
                        return Err(self.err("expected ')'"));
                    }
                    let q = BigRational::new(BigInt::from(n), BigInt::from(den));
                    Ok(Poly::constant(Coeff::sqrt_rational(&q).ok_or_else(|| {
                        self.err("sqrt argument out of range")
                    })?))
                }
                _ => {
                    self.pos = start;
                    Err(self.err(format!("unknown identifier '{word}'")))
                }
            };
        }
        Err(self.err(format!("unexpected character '{c}'")))
    }

    fn number(&mut self) -> Result<Poly> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].1.is_ascii_digit() || self.chars[self.pos].1 == '.')
        {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        let q = parse_decimal(&s).ok_or_else(|| {
            self.pos = start;
            self.err(format!("bad number '{s}'"))
        })?;
        Ok(Poly::constant(Coeff::from_rational(q)))
    }
}

/// Exact value of a decimal literal such as `"0.125"`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(n, den))
}

/// Parse an exact rational scalar: `"3/4"`, `"-0.1"`, `"2"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let p = Poly::parse(s)?;
    if !p.is_constant() {
        return Err(Error::InvalidArgument(format!("'{s}' is not a constant")));
    }
    let c = p.coeff(&[0; NVARS]);
    match c.as_gaussian() {
        Some(GaussianRational { re, im }) if im.is_zero() => Ok(re),
        _ => Err(Error::InvalidArgument(format!("'{s}' is not rational"))),
    }
}

pub fn rational_poly(q: &BigRational) -> Poly {
    Poly::constant(Coeff::from_rational(q.clone()))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn parse_and_print_roundtrip() {
        for s in ["x - i*y", "z^2 - 2*x*y + 1/2", "sqrt(3)*x + l*t", "(1+i)*x^3 - t"] {
            let a = p(s);
            let b = p(&a.to_string());
            assert_eq!(a, b, "{s} -> {a}");
        }
        assert_eq!(p("x - i*y").to_string(), "x - i*y");
        assert_eq!(p("0.25*x"), p("x/4"));
    }

    #[test]
    fn parse_errors_carry_column() {
        match Poly::parse("x + w") {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 5),
            other => panic!("{other:?}"),
        }
        assert!(Poly::parse("x +").is_err());
        assert!(Poly::parse("(x").is_err());
        assert!(Poly::parse("x/y").is_err());
    }

    #[test]
    fn order_and_degree_are_additive() {
        let a = p("x^2 + y^3");
        let b = p("z + x*y");
        let c = &a * &b;
        assert_eq!(c.order(), Some(3));
        assert_eq!(c.degree(), Some(5));
        assert!(Poly::zero().order().is_none());
    }

    #[test]
    fn derivative_and_compose() {
        let f = p("x^2*y + 3*z");
        assert_eq!(f.derivative(Var::X), p("2*x*y"));
        let g = f.subs(Var::X, &p("y + t"));
        assert_eq!(g, p("(y+t)^2*y + 3*z"));
    }

    #[test]
    fn monomial_enumeration_graded() {
        let m = monomials_of_degree(&[Var::X, Var::Y, Var::Z, Var::L], 2);
        assert_eq!(m.len(), 10);
        assert_eq!(monomial_string(&m[0]), "x^2");
        assert_eq!(monomial_string(&m[9]), "l^2");
        let all = monomials_up_to(&[Var::X, Var::L], 2);
        let names: Vec<String> = all.iter().map(monomial_string).collect();
        assert_eq!(names, ["1", "x", "l", "x^2", "x*l", "l^2"]);
    }

    #[test]
    fn numeric_eval_matches_exact() {
        let f = p("(1+i)*x^2 - sqrt(2)*y*z + l/3 - t");
        let pt = [
            Coeff::from_ratio(1, 2),
            Coeff::from_ratio(-2, 3),
            Coeff::from_int(3),
            Coeff::from_ratio(5, 7),
            Coeff::from_ratio(1, 10),
        ];
        let exact = f.eval_exact(&pt).to_complex();
        let num: [Complex64; NVARS] = std::array::from_fn(|i| pt[i].to_complex());
        assert!((exact - f.eval(&num)).norm() < 1e-12);
        assert!((exact - f.to_num().eval(&num)).norm() < 1e-12);
    }
}
