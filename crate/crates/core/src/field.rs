//! Exact coefficient fields.
//!
//! [`GaussianRational`] is `Q(i)`. [`Coeff`] extends it by square roots of
//! positive squarefree integers, i.e. elements of `Q(i)(√r₁, √r₂, …)`. This is
//! what the spin ladder coefficients and the band-structure family need; every
//! operation stays exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_to_f64(q: &BigRational) -> f64 {
    // numerator/denominator may exceed f64 range separately
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

/// A complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::new(rat(n, d), BigRational::zero())
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Exact binary expansion of a finite double.
    pub fn from_f64(re: f64, im: f64) -> Option<Self> {
        Some(Self::new(
            BigRational::from_float(re)?,
            BigRational::from_float(im)?,
        ))
    }
}

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", fmt_rat(&self.im))
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                let a = self.im.abs();
                if a.is_one() {
                    write!(f, "({}{}i)", fmt_rat(&self.re), sign)
                } else {
                    write!(f, "({}{}{}*i)", fmt_rat(&self.re), sign, fmt_rat(&a))
                }
            }
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::new(&self.re * &o.re, BigRational::zero());
        }
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(GaussianRational, Add, add);
forward_owned!(GaussianRational, Sub, sub);
forward_owned!(GaussianRational, Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

/// Squarefree decomposition `n = s² · r` for `n > 0`.
pub fn squarefree_split(mut n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= n;
    (square, free)
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 1;
    }
    n
}

/// Element of the multiquadratic extension `Q(i)(√r : r squarefree)`.
///
/// Stored as a sparse combination `Σ c_r √r` over squarefree radicands `r`,
/// sorted by radicand, with no zero coefficients. Radicand 1 is the
/// Gaussian-rational part.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Coeff {
    terms: Vec<(u64, GaussianRational)>,
}

impl Coeff {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_gaussian(GaussianRational::one())
    }

    pub fn i() -> Self {
        Self::from_gaussian(GaussianRational::i())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_gaussian(GaussianRational::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_gaussian(GaussianRational::from_ratio(n, d))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_gaussian(GaussianRational::new(q, BigRational::zero()))
    }

    pub fn from_gaussian(g: GaussianRational) -> Self {
        if g.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(1, g)] }
        }
    }

    /// `c · √r` with `r` reduced to squarefree form.
    pub fn radical(c: GaussianRational, r: u64) -> Self {
        if r == 0 || c.is_zero() {
            return Self::zero();
        }
        let (s, free) = squarefree_split(r);
        let c = &c * &GaussianRational::from_int(s as i64);
        Self { terms: vec![(free, c)] }
    }

    /// Exact `√q` for a nonnegative rational `q`.
    pub fn sqrt_rational(q: &BigRational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        if q.is_zero() {
            return Some(Self::zero());
        }
        // √(n/d) = √(n·d) / d
        let nd = (q.numer() * q.denom()).to_u64()?;
        let d = q.denom().clone();
        let (s, free) = squarefree_split(nd);
        let c = GaussianRational::new(
            BigRational::new(BigInt::from(s), d),
            BigRational::zero(),
        );
        Some(Self { terms: vec![(free, c)] })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 1 && self.terms[0].1.is_one()
    }

    /// True when the element lies in `Q(i)`.
    pub fn is_gaussian(&self) -> bool {
        self.terms.iter().all(|(r, _)| *r == 1)
    }

    pub fn as_gaussian(&self) -> Option<GaussianRational> {
        match self.terms.as_slice() {
            [] => Some(GaussianRational::zero()),
            [(1, g)] => Some(g.clone()),
            _ => None,
        }
    }

    /// True when every coefficient is real (so the element is a real number).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_real())
    }

    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|(r, _)| *r)
    }

    pub fn terms(&self) -> &[(u64, GaussianRational)] {
        &self.terms
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(r, c)| (*r, c.conj())).collect(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(r, c)| c.to_complex() * (*r as f64).sqrt())
            .sum()
    }

    fn from_map(map: BTreeMap<u64, GaussianRational>) -> Self {
        Self {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Galois automorphism `√p ↦ −√p`.
    fn flip_prime(&self, p: u64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| if r % p == 0 { (*r, -c) } else { (*r, c.clone()) })
                .collect(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(g) = self.as_gaussian() {
            return g.inv().map(Self::from_gaussian);
        }
        if self.terms.len() == 1 {
            // (c√r)⁻¹ = √r / (c·r)
            let (r, c) = &self.terms[0];
            let denom = c * &GaussianRational::from_int(*r as i64);
            let inv = denom.inv()?;
            return Some(Self { terms: vec![(*r, inv)] });
        }
        let p = self
            .terms
            .iter()
            .map(|(r, _)| *r)
            .filter(|r| *r > 1)
            .map(smallest_prime_factor)
            .min()?;
        let conj = self.flip_prime(p);
        let reduced = self * &conj;
        Some(&conj * &reduced.inv()?)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self * &Coeff::from_int(k)
    }

    /// Exact value of a double, used only at trusted boundaries.
    pub fn from_f64(re: f64, im: f64) -> Option<Self> {
        GaussianRational::from_f64(re, im).map(Self::from_gaussian)
    }

    /// Best rational approximation with bounded denominator (real and
    /// imaginary part separately) within `tol`.
    pub fn approximate(z: Complex64, max_den: u64, tol: f64) -> Option<Self> {
        let re = approx_rational(z.re, max_den, tol)?;
        let im = approx_rational(z.im, max_den, tol)?;
        Some(Self::from_gaussian(GaussianRational::new(re, im)))
    }
}

/// Continued-fraction approximation of `x` with denominator `≤ max_den`.
pub fn approx_rational(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = v - a;
        if frac.abs() < 1e-300 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 != 0 && ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
        Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
    } else {
        None
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, c)| {
                if *r == 1 {
                    c.to_string()
                } else if c.is_one() {
                    format!("sqrt({r})")
                } else {
                    format!("{c}*sqrt({r})")
                }
            })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join("+"))
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            let ord = match (self.terms.get(i), o.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(o.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &self.terms[i].1 + &o.terms[j].1;
                    if !s.is_zero() {
                        out.push((self.terms[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Coeff { terms: out }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            terms: self.terms.iter().map(|(r, c)| (*r, -c)).collect(),
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        self + &(-o)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        if self.is_zero() || o.is_zero() {
            return Coeff::zero();
        }
        if self.terms.len() == 1 && o.terms.len() == 1 && self.terms[0].0 == 1 && o.terms[0].0 == 1
        {
            return Coeff::from_gaussian(&self.terms[0].1 * &o.terms[0].1);
        }
        let mut map: BTreeMap<u64, GaussianRational> = BTreeMap::new();
        for (ra, ca) in &self.terms {
            for (rb, cb) in &o.terms {
                let g = ra.gcd(rb);
                let r = (ra / g) * (rb / g);
                let c = &(ca * cb) * &GaussianRational::from_int(g as i64);
                let e = map.entry(r).or_default();
                *e = &*e + &c;
            }
        }
        Coeff::from_map(map)
    }
}

impl Div for &Coeff {
    type Output = Coeff;
    fn div(self, o: &Coeff) -> Coeff {
        self * &o.inv().expect("division by zero coefficient")
    }
}

forward_owned!(Coeff, Add, add);
forward_owned!(Coeff, Sub, sub);
forward_owned!(Coeff, Mul, mul);
forward_owned!(Coeff, Div, div);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, o: &Coeff) {
        *self = &*self + o;
    }
}

impl SubAssign<&Coeff> for Coeff {
    fn sub_assign(&mut self, o: &Coeff) {
        *self = &*self - o;
    }
}

impl MulAssign<&Coeff> for Coeff {
    fn mul_assign(&mut self, o: &Coeff) {
        *self = &*self * o;
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

impl From<GaussianRational> for Coeff {
    fn from(g: GaussianRational) -> Self {
        Coeff::from_gaussian(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_field_ops() {
        let a = GaussianRational::new(rat(1, 2), rat(-3, 4));
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(a.conj().conj(), a);
        assert_eq!(a.norm_sqr(), rat(1, 4) + rat(9, 16));
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn radicals_multiply_exactly() {
        let s2 = Coeff::radical(GaussianRational::one(), 2);
        let s3 = Coeff::radical(GaussianRational::one(), 3);
        let s6 = &s2 * &s3;
        assert_eq!(s6, Coeff::radical(GaussianRational::one(), 6));
        assert_eq!(&s2 * &s2, Coeff::from_int(2));
        assert_eq!(&s6 * &s3, Coeff::radical(GaussianRational::from_int(3), 2));
        assert_eq!(Coeff::radical(GaussianRational::one(), 8), s2.scale_int(2));
    }

    #[test]
    fn multiquadratic_inverse() {
        // 1 + √2 + i√3 + √6/2
        let x = Coeff::from_int(1)
            + Coeff::radical(GaussianRational::one(), 2)
            + Coeff::radical(GaussianRational::i(), 3)
            + Coeff::radical(GaussianRational::from_ratio(1, 2), 6);
        let inv = x.inv().unwrap();
        assert!((&x * &inv).is_one());
        let v = x.to_complex() * inv.to_complex();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_rationals() {
        let q = rat(15, 4);
        let r = Coeff::sqrt_rational(&q).unwrap();
        assert_eq!(&r * &r, Coeff::from_rational(q));
        assert_eq!(Coeff::sqrt_rational(&rat(9, 4)).unwrap(), Coeff::from_ratio(3, 2));
        assert!(Coeff::sqrt_rational(&rat(-1, 1)).is_none());
    }

    #[test]
    fn continued_fraction_recovers_small_rationals() {
        assert_eq!(approx_rational(-0.25000000001, 1000, 1e-8), Some(rat(-1, 4)));
        assert_eq!(approx_rational(2.0 / 3.0, 1000, 1e-12), Some(rat(2, 3)));
        assert!(approx_rational(std::f64::consts::PI, 10, 1e-9).is_none());
    }
}
