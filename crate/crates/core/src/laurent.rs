//! Laurent polynomials over Z/2 and the degree/action bookkeeping of monomials.
//!
//! A [`LaurentGF2`] is stored as the sorted set of exponents whose coefficient
//! is 1. Addition is symmetric difference; multiplication is convolution of
//! exponent sets with coefficients reduced mod 2.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Comparison tolerance for actions (spectrum membership, tie detection).
pub const ACTION_EPS: f64 = 1e-9;

/// A Laurent polynomial in `t` with coefficients in Z/2.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentGF2 {
    exponents: BTreeSet<i64>,
}

impl LaurentGF2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `t^k`.
    pub fn monomial(k: i64) -> Self {
        let mut exponents = BTreeSet::new();
        exponents.insert(k);
        Self { exponents }
    }

    /// Builds a polynomial from a list of exponents. Repeated exponents cancel
    /// in pairs.
    pub fn from_exponents<I: IntoIterator<Item = i64>>(exps: I) -> Self {
        let mut p = Self::zero();
        for k in exps {
            p.toggle(k);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, k: i64) -> bool {
        self.exponents.contains(&k)
    }

    /// Exponents in increasing order.
    pub fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        self.exponents.iter().copied()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.exponents.first().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.exponents.last().copied()
    }

    /// Adds `t^k` in place (flipping its coefficient).
    pub fn toggle(&mut self, k: i64) {
        if !self.exponents.remove(&k) {
            self.exponents.insert(k);
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            exponents: self.exponents.iter().map(|e| e + k).collect(),
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for &k in &other.exponents {
            self.toggle(k);
        }
    }
}

/// Sum in characteristic 2: symmetric difference of exponent sets.
pub fn lp_add(p: &LaurentGF2, q: &LaurentGF2) -> LaurentGF2 {
    LaurentGF2 {
        exponents: p.exponents.symmetric_difference(&q.exponents).copied().collect(),
    }
}

/// Product: convolution of exponent sets, coefficients reduced mod 2.
pub fn lp_mul(p: &LaurentGF2, q: &LaurentGF2) -> LaurentGF2 {
    let mut out = LaurentGF2::zero();
    for &a in &p.exponents {
        for &b in &q.exponents {
            out.toggle(a + b);
        }
    }
    out
}

impl Add for &LaurentGF2 {
    type Output = LaurentGF2;
    fn add(self, rhs: Self) -> LaurentGF2 {
        lp_add(self, rhs)
    }
}

impl Add for LaurentGF2 {
    type Output = LaurentGF2;
    fn add(self, rhs: Self) -> LaurentGF2 {
        lp_add(&self, &rhs)
    }
}

impl Mul for &LaurentGF2 {
    type Output = LaurentGF2;
    fn mul(self, rhs: Self) -> LaurentGF2 {
        lp_mul(self, rhs)
    }
}

impl Mul for LaurentGF2 {
    type Output = LaurentGF2;
    fn mul(self, rhs: Self) -> LaurentGF2 {
        lp_mul(&self, &rhs)
    }
}

impl fmt::Debug for LaurentGF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentGF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in self.exponents() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "1")?,
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Minimal Maslov number `N_L`, monotonicity constant `tau`, and the derived
/// minimal disk area `a0 = tau * N_L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradingParams {
    n_l: u32,
    tau: f64,
    a0: f64,
}

impl GradingParams {
    pub fn new(n_l: u32, tau: f64) -> Result<Self> {
        if n_l < 2 {
            return Err(Error::InvalidParams(format!("N_L must be at least 2, got {n_l}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParams(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { n_l, tau, a0: tau * f64::from(n_l) })
    }

    pub fn n_l(&self) -> u32 {
        self.n_l
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }
}

/// Degree of `g t^r`: `gen_degree - r * N_L`.
pub fn monomial_degree(gen_degree: i64, r: i64, params: &GradingParams) -> i64 {
    gen_degree - r * i64::from(params.n_l)
}

/// Action of `g t^r`: `gen_action - r * a0`.
pub fn monomial_action(gen_action: f64, r: i64, params: &GradingParams) -> f64 {
    gen_action - r as f64 * params.a0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(e: &[i64]) -> LaurentGF2 {
        LaurentGF2::from_exponents(e.iter().copied())
    }

    #[test]
    fn addition_examples() {
        assert_eq!(lp_add(&lp(&[0, 1]), &lp(&[1])), lp(&[0]));
        let p = lp(&[-3, 2, 7]);
        assert_eq!(lp_add(&LaurentGF2::zero(), &p), p);
        assert_eq!(lp_add(&lp(&[-1, 2]), &lp(&[2, 3])), lp(&[-1, 3]));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(lp_mul(&lp(&[0, 1]), &lp(&[0, 1])), lp(&[0, 2]));
        assert_eq!(lp_mul(&LaurentGF2::monomial(4), &LaurentGF2::monomial(-7)), LaurentGF2::monomial(-3));
        assert!(lp_mul(&lp(&[1, 5]), &LaurentGF2::zero()).is_zero());
    }

    #[test]
    fn repeated_exponents_cancel() {
        assert!(lp(&[2, 2]).is_zero());
        assert_eq!(lp(&[1, 2, 1]), lp(&[2]));
    }

    #[test]
    fn display() {
        assert_eq!(lp(&[-1, 0, 1, 3]).to_string(), "t^-1 + 1 + t + t^3");
        assert_eq!(LaurentGF2::zero().to_string(), "0");
    }

    #[test]
    fn grading_examples() {
        let p = GradingParams::new(2, 0.5).unwrap();
        assert_eq!(p.a0(), 1.0);
        assert_eq!(monomial_degree(3, 2, &p), -1);
        assert_eq!(monomial_degree(5, 0, &p), 5);
        assert_eq!(monomial_degree(0, -1, &p), 2);
        assert_eq!(monomial_action(0.0, 1, &p), -1.0);
        assert_eq!(monomial_action(0.3, 0, &p), 0.3);
        assert_eq!(monomial_action(0.0, -1, &p), 1.0);
    }

    #[test]
    fn params_rejected() {
        assert!(GradingParams::new(1, 0.5).is_err());
        assert!(GradingParams::new(2, 0.0).is_err());
        assert!(GradingParams::new(2, f64::NAN).is_err());
    }
}
