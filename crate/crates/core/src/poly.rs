//! Dense univariate polynomials over a [`Scalar`] field, lowest degree first.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn one() -> Self {
        Poly::new(vec![T::one()])
    }

    /// `x - root`
    pub fn linear(root: &T) -> Self {
        Poly::new(vec![-root.clone(), T::one()])
    }

    pub fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn lead(&self) -> Option<&T> {
        self.degree().map(|d| &self.coeffs[d])
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc.mul_ref(x).add_ref(c))
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul_ref(&T::from_i64(k as i64)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => {
                let inv = l.recip();
                Poly::new(self.coeffs.iter().map(|c| c.mul_ref(&inv)).collect())
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::new(vec![]);
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.clone();
        rem.trim();
        let mut quot = vec![T::zero(); rem.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.coeffs[rd].mul_ref(&lead_inv);
            let shift = rd - dd;
            for (k, c) in divisor.coeffs.iter().enumerate() {
                rem.coeffs[shift + k] = rem.coeffs[shift + k].sub_ref(&factor.mul_ref(c));
            }
            rem.trim();
            quot[shift] = factor;
        }
        (Poly::new(quot), rem)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// True when the polynomial has no repeated root over the algebraic closure.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&c| Rational::from_i64(c)).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)(x-2) = x^2 - 3x + 2
        let p = q(&[2, -3, 1]);
        let (quot, rem) = p.div_rem(&q(&[-1, 1]));
        assert_eq!(quot, q(&[-2, 1]));
        assert!(rem.is_zero());
        assert_eq!(p.gcd(&q(&[-2, 1])), q(&[-2, 1]));
        assert!(p.is_squarefree());
        assert!(!q(&[1, -2, 1]).is_squarefree());
    }

    #[test]
    fn rational_roots_found() {
        // 2x^2 - 3x + 1 = (2x - 1)(x - 1)
        let roots = Rational::roots_in_field(&q(&[1, -3, 2]));
        assert_eq!(roots, vec![Rational::from_ratio(1, 2), Rational::from_i64(1)]);
        assert!(Rational::roots_in_field(&q(&[-2, 0, 1])).is_empty());
        assert_eq!(Rational::roots_in_field(&q(&[0, 0, 1])), vec![Rational::from_i64(0)]);
    }
}
