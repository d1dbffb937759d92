//! Gaussian rationals `a + b·i` with `a, b ∈ ℚ`: the computable subfield of ℂ
//! every scalar in this crate lives in.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;
use crate::scalar::{denominator_lcm, factor_integer, Rational, Scalar};

/// Exact complex number with rational real and imaginary parts.
///
/// Both parts are kept in lowest terms with positive denominators, so derived
/// equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GaussianRational {
            re: Rational::new(re_num.into(), re_den.into()),
            im: Rational::new(im_num.into(), im_den.into()),
        }
    }

    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|²`
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        GaussianRational::new(Rational::from_i64(v), Rational::zero())
    }
}

impl From<Rational> for GaussianRational {
    fn from(re: Rational) -> Self {
        GaussianRational::new(re, Rational::zero())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::new(&self.re * &rhs.re, Rational::zero());
        }
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        assert!(!rhs.is_zero(), "division by zero");
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::new(&self.re / &rhs.re, Rational::zero());
        }
        let n = rhs.norm_sqr();
        let num = self * &rhs.conj();
        GaussianRational::new(num.re / &n, num.im / n)
    }
}

macro_rules! forward_by_value {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_by_value!(Add add, Sub sub, Mul mul, Div div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::from(1)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => write!(f, "{}-{}i", self.re, -&self.im),
            (false, false) => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid scalar literal {0:?}")]
pub struct ParseScalarError(pub String);

/// `p` or `p/q` with an optional leading `-` and `q > 0`.
pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let value = match body.split_once('/') {
        None if digits(body) => Rational::from_integer(body.parse::<BigInt>().ok()?),
        Some((p, q)) if digits(p) && digits(q) => {
            let den: BigInt = q.parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Rational::new(p.parse().ok()?, den)
        }
        _ => return None,
    };
    Some(if neg { -value } else { value })
}

impl FromStr for GaussianRational {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(s.to_string());
        let Some(body) = s.strip_suffix('i') else {
            return parse_rational(s).map(GaussianRational::from).ok_or_else(err);
        };
        // split point: a sign that is not the leading one
        match body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
        {
            None => {
                let im = parse_rational(body).ok_or_else(err)?;
                Ok(GaussianRational::new(Rational::zero(), im))
            }
            Some((at, sign)) => {
                let re = parse_rational(&body[..at]).ok_or_else(err)?;
                let q = &body[at + 1..];
                if q.starts_with('-') || q.starts_with('+') {
                    return Err(err());
                }
                let mut im = parse_rational(q).ok_or_else(err)?;
                if sign == '-' {
                    im = -im;
                }
                Ok(GaussianRational::new(re, im))
            }
        }
    }
}

impl Scalar for GaussianRational {
    fn from_i64(v: i64) -> Self {
        GaussianRational::from(v)
    }

    fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    fn root_of_unity(order: u32) -> Option<Self> {
        match order {
            1 => Some(Self::one()),
            2 => Some(-Self::one()),
            4 => Some(Self::i()),
            _ => None,
        }
    }

    fn roots_in_field(p: &Poly<Self>) -> Vec<Self> {
        gaussian_roots(p)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// Gaussian integer `(re, im)`.
type GaussInt = (BigInt, BigInt);

fn gi_mul(a: &GaussInt, b: &GaussInt) -> GaussInt {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

/// `a / b` when the quotient is a Gaussian integer.
fn gi_exact_div(a: &GaussInt, b: &GaussInt) -> Option<GaussInt> {
    let n = &b.0 * &b.0 + &b.1 * &b.1;
    let num = gi_mul(a, &(b.0.clone(), -&b.1));
    if (&num.0 % &n).is_zero() && (&num.1 % &n).is_zero() {
        Some((num.0 / &n, num.1 / &n))
    } else {
        None
    }
}

fn integer_sqrt_exact(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Gaussian primes dividing `z` with multiplicity, up to associates.
fn gaussian_factor(z: &GaussInt) -> Vec<(GaussInt, u32)> {
    let norm = &z.0 * &z.0 + &z.1 * &z.1;
    let mut out = Vec::new();
    let four = BigInt::from(4u32);
    for (p, e) in factor_integer(&norm) {
        if p == BigInt::from(2u32) {
            out.push(((BigInt::one(), BigInt::one()), e));
        } else if p.mod_floor(&four) == BigInt::from(3u32) {
            out.push(((p, BigInt::zero()), e / 2));
        } else {
            let mut x = BigInt::one();
            let pi = loop {
                if let Some(y) = integer_sqrt_exact(&(&p - &x * &x)) {
                    break (x, y);
                }
                x += 1u32;
            };
            let mut rest = z.clone();
            let mut k = 0;
            while k < e {
                match gi_exact_div(&rest, &pi) {
                    Some(q) => {
                        rest = q;
                        k += 1;
                    }
                    None => break,
                }
            }
            let conj = (pi.0.clone(), -&pi.1);
            if k > 0 {
                out.push((pi, k));
            }
            if e > k {
                out.push((conj, e - k));
            }
        }
    }
    out
}

/// Divisors of a nonzero Gaussian integer, one representative per associate class.
fn gaussian_divisors(z: &GaussInt) -> Vec<GaussInt> {
    let mut divs: Vec<GaussInt> = vec![(BigInt::one(), BigInt::zero())];
    for (prime, e) in gaussian_factor(z) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = gi_mul(&acc, &prime);
                next.push(acc.clone());
            }
        }
        divs = next;
    }
    divs
}

/// Roots in ℚ(i) by the rational root theorem over the UFD ℤ[i]: after clearing
/// denominators every root is `unit · u / w` with `u | c₀` and `w | c_d`.
fn gaussian_roots(p: &Poly<GaussianRational>) -> Vec<GaussianRational> {
    let mut p = p.clone();
    p.trim();
    let mut roots = Vec::new();
    if p.degree().is_none_or(|d| d == 0) {
        return roots;
    }
    if p.coeffs[0].is_zero() {
        roots.push(GaussianRational::zero());
        while p.coeffs.len() > 1 && p.coeffs[0].is_zero() {
            p.coeffs.remove(0);
        }
    }
    if p.degree() != Some(0) {
        let scale = Rational::from_integer(denominator_lcm(
            p.coeffs.iter().flat_map(|c| [&c.re, &c.im]),
        ));
        let to_gi = |c: &GaussianRational| -> GaussInt {
            ((&c.re * &scale).to_integer(), (&c.im * &scale).to_integer())
        };
        let constant = to_gi(&p.coeffs[0]);
        let lead = to_gi(p.coeffs.last().unwrap());
        let nums = gaussian_divisors(&constant);
        let dens = gaussian_divisors(&lead);
        let units = [
            GaussianRational::one(),
            GaussianRational::i(),
            -GaussianRational::one(),
            -GaussianRational::i(),
        ];
        let mut seen = HashSet::new();
        for u in &nums {
            let u = GaussianRational::new(u.0.clone().into(), u.1.clone().into());
            for w in &dens {
                let w = GaussianRational::new(w.0.clone().into(), w.1.clone().into());
                let base = &u / &w;
                for unit in &units {
                    let cand = &base * unit;
                    if seen.insert(cand.clone()) && p.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort_by(|a, b| a.canonical_cmp(b));
    roots
}
