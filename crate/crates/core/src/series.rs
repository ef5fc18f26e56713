//! Truncated power series with complex coefficients.
//!
//! A [`PowerSeries`] of order `N` stores the coefficients of `z^0 .. z^{N-1}`.
//! Every operation truncates its result back to the operand order, so the
//! arithmetic is exact modulo `z^N` up to floating-point rounding.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of retained coefficients.
pub const DEFAULT_ORDER: usize = 32;

/// Largest order accepted from user-facing configuration.
pub const MAX_ORDER: usize = 256;

/// `|a_0|` at or below this value makes a series non-invertible.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SeriesError {
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("series order must be positive")]
    ZeroOrder,
    #[error("constant term {modulus:e} is too small to invert")]
    Singular { modulus: f64 },
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from its coefficients; the order is the slice length.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::ZeroOrder);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(SeriesError::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, SeriesError> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Zero-pads or truncates `coeffs` to exactly `order` entries.
    pub fn with_order(coeffs: &[Complex64], order: usize) -> Result<Self, SeriesError> {
        let mut v: Vec<Complex64> = coeffs.iter().copied().take(order).collect();
        v.resize(order, Complex64::new(0.0, 0.0));
        Self::new(v)
    }

    pub fn zero(order: usize) -> Self {
        assert!(order > 0, "series order must be positive");
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); order],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series of `z` (zero when `order == 1`).
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { coeffs })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let n = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Ok(Self { coeffs })
    }

    /// Multiplicative inverse modulo `z^N`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0];
        if a0.norm() <= SINGULAR_THRESHOLD {
            return Err(SeriesError::Singular { modulus: a0.norm() });
        }
        let inv0 = a0.inv();
        let n = self.order();
        let mut b = Vec::with_capacity(n);
        b.push(inv0);
        for k in 1..n {
            let acc: Complex64 = (1..=k).map(|j| self.coeffs[j] * b[k - j]).sum();
            b.push(-inv0 * acc);
        }
        Self::new(b)
    }

    /// `self / other` modulo `z^N`.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.mul(&other.reciprocal()?)
    }

    /// Multiplication by `z`; the top coefficient falls off.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.order());
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs[..self.order() - 1]);
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut coeffs: Vec<Complex64> = (1..n).map(|k| self.coeffs[k] * k as f64).collect();
        coeffs.push(Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let n = self.order();
        let mut coeffs = Vec::with_capacity(n);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend((1..n).map(|k| self.coeffs[k - 1] / k as f64));
        Self { coeffs }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Largest coefficientwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, SeriesError> {
        self.check_order(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl TryFrom<Vec<Complex64>> for PowerSeries {
    type Error = SeriesError;

    fn try_from(coeffs: Vec<Complex64>) -> Result<Self, Self::Error> {
        Self::new(coeffs)
    }
}

impl From<PowerSeries> for Vec<Complex64> {
    fn from(s: PowerSeries) -> Self {
        s.coeffs
    }
}

/// Free-function spellings of the series operations.
pub fn ps_add(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    a.add(b)
}

pub fn ps_mul(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    a.mul(b)
}

pub fn ps_reciprocal(a: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    a.reciprocal()
}

pub fn ps_derivative(a: &PowerSeries) -> PowerSeries {
    a.derivative()
}

pub fn ps_antiderivative(a: &PowerSeries) -> PowerSeries {
    a.antiderivative()
}

pub fn ps_eval(a: &PowerSeries, z: Complex64) -> Complex64 {
    a.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> PowerSeries {
        PowerSeries::from_real(v).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(ps_add(&real(&[1.0, 2.0]), &real(&[0.0, -2.0])).unwrap(), real(&[1.0, 0.0]));
        assert_eq!(ps_add(&real(&[0.0, 0.0]), &real(&[0.0, 0.0])).unwrap(), real(&[0.0, 0.0]));
        let a = PowerSeries::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let b = PowerSeries::new(vec![c(1.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert_eq!(ps_add(&a, &b).unwrap(), real(&[2.0, 0.0]));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let err = ps_add(&real(&[1.0]), &real(&[1.0, 2.0])).unwrap_err();
        assert_eq!(err, SeriesError::OrderMismatch { left: 1, right: 2 });
        assert!(ps_mul(&real(&[1.0]), &real(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(PowerSeries::new(vec![]).unwrap_err(), SeriesError::ZeroOrder);
        assert_eq!(
            PowerSeries::from_real(&[1.0, f64::NAN]).unwrap_err(),
            SeriesError::NonFinite { index: 1 }
        );
    }

    #[test]
    fn mul_examples() {
        let one_plus_z = real(&[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(ps_mul(&one_plus_z, &one_plus_z).unwrap(), real(&[1.0, 2.0, 1.0, 0.0]));
        let b = PowerSeries::new(vec![c(0.5, 1.0), c(-2.0, 0.25), c(3.0, 0.0), c(0.0, -1.0)])
            .unwrap();
        assert_eq!(ps_mul(&PowerSeries::one(4), &b).unwrap(), b);
        let z = real(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(ps_mul(&z, &z).unwrap(), real(&[0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(
            ps_reciprocal(&real(&[1.0, -1.0, 0.0, 0.0])).unwrap(),
            real(&[1.0, 1.0, 1.0, 1.0])
        );
        assert_eq!(ps_reciprocal(&real(&[2.0, 0.0, 0.0])).unwrap(), real(&[0.5, 0.0, 0.0]));

        // 1/(1 - λp z) with λ = 1, p = 0.5, against direct powers of λp.
        let ratio: f64 = 0.5;
        let inv = ps_reciprocal(&real(&[1.0, -ratio, 0.0, 0.0, 0.0, 0.0])).unwrap();
        for (k, b) in inv.coeffs().iter().enumerate() {
            assert!((b - c(ratio.powi(k as i32), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn reciprocal_rejects_small_constant() {
        let err = ps_reciprocal(&real(&[1e-13, 1.0])).unwrap_err();
        assert!(matches!(err, SeriesError::Singular { .. }));
        assert!(ps_reciprocal(&real(&[1e-12, 1.0])).is_err());
    }

    #[test]
    fn calculus_examples() {
        assert_eq!(ps_derivative(&real(&[0.0, 0.0, 1.0])), real(&[0.0, 2.0, 0.0]));
        assert_eq!(ps_antiderivative(&real(&[1.0, 0.0, 0.0])), real(&[0.0, 1.0, 0.0]));
        let a = PowerSeries::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(0.0, 0.0)]).unwrap();
        assert_eq!(ps_derivative(&ps_antiderivative(&a)), a);
    }

    #[test]
    fn eval_examples() {
        let ones = real(&[1.0; 8]);
        assert_eq!(ps_eval(&ones, c(0.0, 0.0)), c(1.0, 0.0));
        let z = c(0.3, 0.4);
        assert_eq!(ps_eval(&real(&[0.0, 1.0]), z), z);

        let q = c(0.6, -0.2);
        let n = 24;
        let geo = PowerSeries::new((0..n).map(|k| q.powi(k)).collect()).unwrap();
        let z = c(-0.5, 0.7);
        let exact = (c(1.0, 0.0) - q * z).inv();
        let tail = (q * z).norm().powi(n) / (1.0 - (q * z).norm());
        assert!((ps_eval(&geo, z) - exact).norm() <= tail * (1.0 + 1e-9));
    }

    #[test]
    fn shift_and_identity() {
        let a = real(&[1.0, 2.0, 3.0]);
        assert_eq!(a.shift_up(), real(&[0.0, 1.0, 2.0]));
        assert_eq!(a.shift_up(), ps_mul(&PowerSeries::identity(3), &a).unwrap());
    }

    #[test]
    fn serde_round_trip() {
        let a = PowerSeries::new(vec![c(0.25, -1.5), c(3.0, 0.0)]).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        let back: PowerSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
        assert!(serde_json::from_str::<PowerSeries>("[]").is_err());
    }

    fn arb_series(order: usize) -> impl Strategy<Value = PowerSeries> {
        proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), order).prop_map(|v| {
            let mut coeffs: Vec<Complex64> = v
                .into_iter()
                .map(|(re, im)| {
                    let z = c(re, im);
                    if z.norm() > 10.0 { z * (10.0 / z.norm()) } else { z }
                })
                .collect();
            // Keep the constant term comfortably invertible.
            if coeffs[0].norm() < 0.5 {
                coeffs[0] += c(1.0, 0.0);
            }
            PowerSeries::new(coeffs).unwrap()
        })
    }

    fn arb_pair() -> impl Strategy<Value = (PowerSeries, PowerSeries)> {
        (1usize..=64).prop_flat_map(|n| (arb_series(n), arb_series(n)))
    }

    fn arb_triple() -> impl Strategy<Value = (PowerSeries, PowerSeries, PowerSeries)> {
        (1usize..=24).prop_flat_map(|n| (arb_series(n), arb_series(n), arb_series(n)))
    }

    proptest! {
        #[test]
        fn reciprocal_is_inverse(a in (1usize..=64).prop_flat_map(arb_series)) {
            // Cancellation in the product is bounded by the magnitude of the
            // terms being summed, not by 1: for |a_k| up to 10 the reciprocal
            // grows geometrically, so the check is relative to that sum.
            let b = ps_reciprocal(&a).unwrap();
            let prod = ps_mul(&a, &b).unwrap();
            for n in 0..a.order() {
                let scale: f64 = (0..=n).map(|k| a.coeff(k).norm() * b.coeff(n - k).norm()).sum();
                let target = if n == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
                prop_assert!((prod.coeff(n) - target).norm() <= 1e-12 * scale.max(1.0));
            }
        }

        #[test]
        fn reciprocal_is_inverse_on_unit_constant_series(
            v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 0..64),
            ratio in 0.0f64..0.5,
        ) {
            // 1 - ratio*z*w(z) with |w| < 2 on the disc never vanishes there.
            let mut coeffs = vec![c(1.0, 0.0)];
            coeffs.extend(v.iter().enumerate().map(|(k, &(re, im))| -c(re, im) * ratio * 0.5f64.powi(k as i32)));
            let a = PowerSeries::new(coeffs).unwrap();
            let prod = ps_mul(&a, &ps_reciprocal(&a).unwrap()).unwrap();
            let err = prod.max_abs_diff(&PowerSeries::one(a.order())).unwrap();
            prop_assert!(err <= 1e-12, "err = {err:e}");
        }

        #[test]
        fn mul_commutes((a, b) in arb_pair()) {
            let ab = ps_mul(&a, &b).unwrap();
            let ba = ps_mul(&b, &a).unwrap();
            prop_assert!(ab.max_abs_diff(&ba).unwrap() <= 1e-12 * (1.0 + ab.coeffs().iter().map(|x| x.norm()).fold(0.0, f64::max)));
        }

        #[test]
        fn mul_associates((a, b, c3) in arb_triple()) {
            let l = ps_mul(&ps_mul(&a, &b).unwrap(), &c3).unwrap();
            let r = ps_mul(&a, &ps_mul(&b, &c3).unwrap()).unwrap();
            let scale = l.coeffs().iter().map(|x| x.norm()).fold(1.0, f64::max);
            prop_assert!(l.max_abs_diff(&r).unwrap() <= 1e-12 * scale);
        }

        #[test]
        fn derivative_undoes_antiderivative(a in (2usize..=64).prop_flat_map(arb_series)) {
            let back = ps_derivative(&ps_antiderivative(&a));
            let n = a.order();
            for k in 0..n - 1 {
                prop_assert!((back.coeff(k) - a.coeff(k)).norm() <= 1e-12 * (1.0 + a.coeff(k).norm()));
            }
            prop_assert_eq!(back.coeff(n - 1), c(0.0, 0.0));
        }
    }
}
