//! The exact scalar fields the algebra is generic over.
//!
//! Everything downstream of [`DenseMatrix`](crate::DenseMatrix) only needs the
//! operations of [`Scalar`]: field arithmetic, a conjugation, the roots of unity
//! the field contains, and a way to find every root of a polynomial that lies in
//! the field. Floating-point types are deliberately not implementors; every rank
//! and every equality in this crate is exact.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + FromStr
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Complex conjugate; the identity on real fields.
    fn conj(&self) -> Self;

    /// A primitive root of unity of the given order, if the field has one.
    fn root_of_unity(order: u32) -> Option<Self>;

    /// All distinct roots of `p` lying in the field, in [`Scalar::canonical_cmp`] order.
    fn roots_in_field(p: &Poly<Self>) -> Vec<Self>;

    /// Deterministic total order used to sort eigenvalues.
    fn canonical_cmp(&self, other: &Self) -> Ordering;

    fn add_ref(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }
    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn root_of_unity(order: u32) -> Option<Self> {
        match order {
            1 => Some(Self::one()),
            2 => Some(-Self::one()),
            _ => None,
        }
    }

    fn roots_in_field(p: &Poly<Self>) -> Vec<Self> {
        rational_roots(p)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
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
    fn recip(&self) -> Self {
        BigRational::recip(self)
    }
}

/// Least common multiple of the denominators of `values`.
pub(crate) fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Prime factorisation of `|n|` by trial division; `n` must be nonzero.
pub(crate) fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut e = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if rest > BigInt::one() {
        out.push((rest, 1));
    }
    out
}

/// Positive divisors of a nonzero integer.
pub(crate) fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factor_integer(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

fn rational_roots(p: &Poly<Rational>) -> Vec<Rational> {
    let mut p = p.clone();
    p.trim();
    let mut roots = Vec::new();
    if p.degree().is_none_or(|d| d == 0) {
        return roots;
    }
    if p.coeffs[0].is_zero() {
        roots.push(Rational::zero());
        while p.coeffs.len() > 1 && p.coeffs[0].is_zero() {
            p.coeffs.remove(0);
        }
    }
    if p.degree() == Some(0) {
        return roots;
    }
    let scale = denominator_lcm(p.coeffs.iter());
    let ints: Vec<BigInt> = p
        .coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(scale.clone())).to_integer())
        .collect();
    let lead = ints.last().unwrap();
    let constant = &ints[0];
    let nums = positive_divisors(constant);
    let dens = positive_divisors(lead);
    let mut seen = std::collections::HashSet::new();
    for num in &nums {
        for den in &dens {
            for sign in [1i32, -1] {
                let cand = BigRational::new(num * BigInt::from(sign), den.clone());
                if seen.insert(cand.clone()) && p.eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}
