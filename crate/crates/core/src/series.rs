//! Truncated formal power series with exact rational coefficients.

use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::exact::{factorial, Rational};
use crate::transforms::Sequence;

/// `c_0 + c_1 x + ... + c_K x^K + O(x^{K+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Truncation order is `coeffs.len() - 1`; an empty vector is order 0.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// `e^{c x}` through `order`.
    pub fn exp(c: &Rational, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = Rational::one();
        for k in 0..=order {
            coeffs.push(term.clone());
            term = term * c / Rational::from(k as u64 + 1);
        }
        PowerSeries { coeffs }
    }

    /// `1 / (1 - c x)` through `order`.
    pub fn geometric(c: &Rational, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = Rational::one();
        for _ in 0..=order {
            coeffs.push(term.clone());
            term *= c;
        }
        PowerSeries { coeffs }
    }

    /// Exponential generating function `Σ s_n x^n / n!` through `order`.
    /// Panics if `order` exceeds the last index of `s`.
    pub fn egf(s: &Sequence, order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|n| &s[n] / Rational::from(factorial(n as u64)))
            .collect();
        PowerSeries { coeffs }
    }

    /// Recovers `s_n = n! c_n`.
    pub fn egf_values(&self) -> Vec<Rational> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * Rational::from(factorial(n as u64)))
            .collect()
    }

    /// `f(-x)`.
    pub fn negate_argument(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
            .collect();
        PowerSeries { coeffs }
    }

    /// `x f(x)`, dropping the coefficient that falls past the order.
    pub fn shift(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs[..self.order()].iter().cloned());
        PowerSeries { coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn truncate(&self, order: usize) -> Self {
        PowerSeries { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        PowerSeries { coeffs: (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect() }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        PowerSeries { coeffs: (0..=order).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect() }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    /// Cauchy product truncated to the smaller order.
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|k| (0..=k).map(|i| &self.coeffs[i] * &rhs.coeffs[k - i]).sum())
            .collect();
        PowerSeries { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn exp_times_exp_neg_is_one() {
        for order in [0, 1, 5, 20] {
            let one = Rational::one();
            let p = &PowerSeries::exp(&one, order) * &PowerSeries::exp(&-&one, order);
            assert_eq!(p, PowerSeries::one(order));
        }
    }

    #[test]
    fn geometric_inverts_linear_factor() {
        let c = q("2/7");
        let lin = PowerSeries::new(vec![Rational::one(), -&c, Rational::zero(), Rational::zero()]);
        assert_eq!(&lin * &PowerSeries::geometric(&c, 3), PowerSeries::one(3));
    }

    #[test]
    fn egf_round_trip_and_shift() {
        let s = Sequence::from_ints(&[1, 1, 2, 6, 24, 120]);
        let f = PowerSeries::egf(&s, 5);
        assert!(f.coeffs().iter().all(Rational::is_one));
        assert_eq!(f.egf_values(), s.values());
        let g = PowerSeries::egf(&s, 2).shift();
        assert_eq!(g.coeffs(), &[Rational::zero(), Rational::one(), Rational::one()]);
        assert_eq!(f.negate_argument().coeff(3), &Rational::from(-1));
        assert_eq!(f.truncate(2).order(), 2);
    }

    #[test]
    fn mixed_orders_truncate_to_smaller() {
        let a = PowerSeries::one(5);
        let b = PowerSeries::one(2);
        assert_eq!((&a * &b).order(), 2);
        assert_eq!((&a + &b).order(), 2);
        assert_eq!((&a - &b), PowerSeries::zero(2));
    }

    proptest! {
        #[test]
        fn product_commutes(a in prop::collection::vec(-20i64..20, 1..10), b in prop::collection::vec(-20i64..20, 1..10)) {
            let a = PowerSeries::new(a.into_iter().map(Rational::from).collect());
            let b = PowerSeries::new(b.into_iter().map(Rational::from).collect());
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn exp_is_multiplicative(n1 in -9i64..9, n2 in -9i64..9, d in 1i64..5) {
            let (c1, c2) = (Rational::new(n1, d).unwrap(), Rational::new(n2, d).unwrap());
            let lhs = &PowerSeries::exp(&c1, 12) * &PowerSeries::exp(&c2, 12);
            prop_assert_eq!(lhs, PowerSeries::exp(&(&c1 + &c2), 12));
        }
    }
}
