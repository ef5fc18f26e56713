//! Construction and checking of candidate members of the family `V_p(λ)`.
//!
//! A member is a function `f` on the unit disc with `f(0) = 0`, `f'(0) = 1`,
//! a single simple pole at `z = p` and `|U_f(z)| < λ`, where
//! `U_f = (z/f)² f' − 1`. All work is done on `G = z/f`, which is analytic on
//! the whole disc: the pole of `f` is a zero of `G`, and
//! `U_f = G − z G' − 1`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schur::{schur_to_series, SchurError, SchurParams};
use crate::series::{PowerSeries, SeriesError};

/// Tie band for the strict inequality `|U_f| < λ`.
pub const MEMBER_EPSILON: f64 = 1e-9;

/// Samples used for the argument-principle pole count.
pub const WINDING_SAMPLES: usize = 4096;

/// Largest pole location accepted by [`build_from_w1`].
pub const MAX_W1_POLE: f64 = 0.95;

/// Target for the truncation tail of `∫_0^p w_1` in [`build_from_w1`].
pub const INTEGRAL_TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VClassError {
    #[error("pole location p = {0} must lie in (0, 1)")]
    InvalidPole(f64),
    #[error("level λ = {0} must lie in (0, 1]")]
    InvalidLevel(f64),
    #[error("series order {0} is too small (need at least 3)")]
    OrderTooSmall(usize),
    #[error("p = {p} exceeds {max} for the integral representation")]
    PoleTooCloseToBoundary { p: f64, max: f64 },
    #[error("contour radius {r_max} must satisfy p = {p} < r_max < 1")]
    ContourRadius { r_max: f64, p: f64 },
    #[error("winding sum {value} is not within 0.1 of an integer")]
    NonIntegerWinding { value: f64 },
    #[error("z/f vanishes on the contour |z| = {radius}")]
    ZeroOnContour { radius: f64 },
    #[error("coefficient index {index} needs series order > {needed}, have {order}")]
    TruncationOrder {
        index: usize,
        needed: usize,
        order: usize,
    },
    #[error("a2 from the series ({series}) disagrees with the closed form ({closed})")]
    A2Mismatch { series: Complex64, closed: Complex64 },
    #[error("operation needs a generator w, but the member was built from w1")]
    WrongSource,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Schur(#[from] SchurError),
}

/// The pair `(p, λ)` selecting the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    p: f64,
    lambda: f64,
}

impl ClassParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self, VClassError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(VClassError::InvalidPole(p));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(VClassError::InvalidLevel(lambda));
        }
        Ok(Self { p, lambda })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `λp`, the ratio of the majorant `1/(1 − λpz)`.
    pub fn lambda_p(&self) -> f64 {
        self.lambda * self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Source {
    FromW,
    FromW1,
    Extremal,
}

/// A constructed candidate, carrying both `G = z/f` and `f` as series.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberFunction {
    pub class_params: ClassParams,
    pub source: Source,
    pub generator: SchurParams,
    pub g: PowerSeries,
    pub f: PowerSeries,
    pub a2: Complex64,
}

impl MemberFunction {
    pub fn order(&self) -> usize {
        self.f.order()
    }

    /// Taylor coefficient `a_n(f)`.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.f.coeff(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MembershipStatus {
    Member,
    Boundary,
    NonMember,
    ExtraPole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub sup_u: f64,
    pub margin: f64,
    pub pole_count: i64,
    pub status: MembershipStatus,
}

impl MembershipVerdict {
    pub fn classify(sup_u: f64, lambda: f64, pole_count: i64) -> Self {
        let margin = lambda - sup_u;
        let status = if pole_count != 1 {
            MembershipStatus::ExtraPole
        } else if margin > MEMBER_EPSILON {
            MembershipStatus::Member
        } else if margin.abs() <= MEMBER_EPSILON {
            MembershipStatus::Boundary
        } else {
            MembershipStatus::NonMember
        };
        Self {
            sup_u,
            margin,
            pole_count,
            status,
        }
    }

    pub fn is_member(&self) -> bool {
        self.status == MembershipStatus::Member
    }
}

fn check_order(order: usize) -> Result<(), VClassError> {
    if order < 3 {
        return Err(VClassError::OrderTooSmall(order));
    }
    Ok(())
}

/// `f = z / G` modulo `z^N`.
fn f_from_g(g: &PowerSeries) -> Result<PowerSeries, VClassError> {
    Ok(g.reciprocal()?.shift_up())
}

/// Smallest order `N` with `p^N / (1 − p) ≤ 1e−12`, the tail bound for a
/// bounded-coefficient series evaluated at `z = p`.
pub fn required_order_for_pole(p: f64) -> usize {
    let n = ((INTEGRAL_TAIL_TOLERANCE * (1.0 - p)).ln() / p.ln()).ceil();
    n.max(1.0) as usize
}

/// `G = (1 − z/p)(1 − λp z w(z))`, the product representation.
pub fn build_from_w(
    cp: ClassParams,
    w: &SchurParams,
    order: usize,
) -> Result<MemberFunction, VClassError> {
    build_from_w_tagged(cp, w, order, Source::FromW)
}

fn build_from_w_tagged(
    cp: ClassParams,
    w: &SchurParams,
    order: usize,
    source: Source,
) -> Result<MemberFunction, VClassError> {
    check_order(order)?;
    let ws = schur_to_series(w, order)?;
    let pole_factor = PowerSeries::with_order(
        &[Complex64::new(1.0, 0.0), Complex64::new(-1.0 / cp.p, 0.0)],
        order,
    )?;
    let majorant = PowerSeries::one(order).sub(&ws.shift_up().scale(cp.lambda_p().into()))?;
    let g = pole_factor.mul(&majorant)?;
    let f = f_from_g(&g)?;
    let a2 = f.coeff(2);
    Ok(MemberFunction {
        class_params: cp,
        source,
        generator: w.clone(),
        g,
        f,
        a2,
    })
}

/// The conjectured extremal `k_p^λ(z) = −pz / ((z − p)(1 − λpz))`, i.e. the
/// product representation with `w ≡ 1`.
pub fn extremal_member(cp: ClassParams, order: usize) -> Result<MemberFunction, VClassError> {
    let one = SchurParams::constant(Complex64::new(1.0, 0.0))?;
    build_from_w_tagged(cp, &one, order, Source::Extremal)
}

/// `G(z) = 1 − (z/p)(1 + λp ∫_0^p w_1) + λz ∫_0^z w_1`.
///
/// The integral at `p` is read off the truncated antiderivative, so the
/// working order is raised to [`required_order_for_pole`] when the requested
/// one is too short to resolve it.
pub fn build_from_w1(
    cp: ClassParams,
    w1: &SchurParams,
    order: usize,
) -> Result<MemberFunction, VClassError> {
    check_order(order)?;
    if cp.p > MAX_W1_POLE {
        return Err(VClassError::PoleTooCloseToBoundary {
            p: cp.p,
            max: MAX_W1_POLE,
        });
    }
    let order = order.max(required_order_for_pole(cp.p));
    let (p, lambda) = (cp.p, cp.lambda);

    let w1s = schur_to_series(w1, order)?;
    let integral = w1s.antiderivative();
    let i_p = integral.eval(Complex64::new(p, 0.0));
    let a2_closed = (1.0 + lambda * p * i_p) / p;

    let linear = PowerSeries::with_order(&[Complex64::new(1.0, 0.0), -a2_closed], order)?;
    let g = linear.add(&integral.shift_up().scale(lambda.into()))?;
    let f = f_from_g(&g)?;

    let a2 = f.coeff(2);
    if (a2 - a2_closed).norm() > 1e-10 * a2_closed.norm().max(1.0) {
        return Err(VClassError::A2Mismatch {
            series: a2,
            closed: a2_closed,
        });
    }
    Ok(MemberFunction {
        class_params: cp,
        source: Source::FromW1,
        generator: w1.clone(),
        g,
        f,
        a2: a2_closed,
    })
}

/// Series of `U_f = (z/f)² f' − 1`, computed as `G − z G' − 1`.
pub fn u_residual(m: &MemberFunction) -> PowerSeries {
    let zg_prime = m.g.derivative().shift_up();
    let mut coeffs = m.g.sub(&zg_prime).expect("same order").into_coeffs();
    coeffs[0] -= 1.0;
    PowerSeries::new(coeffs).expect("finite")
}

/// Default contour for the pole count: halfway between `p` and the unit
/// circle, capped at 0.99.
pub fn default_contour_radius(p: f64) -> f64 {
    ((1.0 + p) / 2.0).min(0.99)
}

/// Winding number of the series `g` around the origin along `|z| = radius`,
/// by trapezoidal accumulation of phase increments.
pub fn winding_number(g: &PowerSeries, radius: f64, samples: usize) -> Result<i64, VClassError> {
    let point = |k: usize| Complex64::from_polar(radius, TAU * k as f64 / samples as f64);
    let values: Vec<Complex64> = (0..samples).map(|k| g.eval(point(k))).collect();
    if values.iter().any(|v| v.norm() == 0.0 || !v.is_finite()) {
        return Err(VClassError::ZeroOnContour { radius });
    }
    let total: f64 = (0..samples)
        .map(|k| (values[(k + 1) % samples] / values[k]).arg())
        .sum();
    let turns = total / TAU;
    let nearest = turns.round();
    if (turns - nearest).abs() > 0.1 {
        return Err(VClassError::NonIntegerWinding { value: turns });
    }
    Ok(nearest as i64)
}

/// Samples `|U_f|` on circles of radius `r_max`, `0.9 r_max` and `0.5`, and
/// counts the zeros of `z/f` inside `|z| = r_max`.
pub fn membership_check(
    m: &MemberFunction,
    r_max: f64,
    angles: usize,
) -> Result<MembershipVerdict, VClassError> {
    let p = m.class_params.p;
    if !(r_max > p && r_max < 1.0) {
        return Err(VClassError::ContourRadius { r_max, p });
    }
    let u = u_residual(m);
    let angles = angles.max(1);
    let sup_u = [r_max, 0.9 * r_max, 0.5]
        .iter()
        .flat_map(|&r| {
            (0..angles).map(move |k| Complex64::from_polar(r, TAU * k as f64 / angles as f64))
        })
        .map(|z| u.eval(z).norm())
        .fold(0.0, f64::max);
    let pole_count = winding_number(&m.g, r_max, WINDING_SAMPLES)?;
    Ok(MembershipVerdict::classify(
        sup_u,
        m.class_params.lambda,
        pole_count,
    ))
}

/// [`membership_check`] on the default contour.
pub fn membership_check_default(
    m: &MemberFunction,
    angles: usize,
) -> Result<MembershipVerdict, VClassError> {
    membership_check(m, default_contour_radius(m.class_params.p), angles)
}

/// Largest deviation of `G·f` from `z`, each coefficient measured relative
/// to the magnitude of the terms in its Cauchy sum.
pub fn product_identity_error(m: &MemberFunction) -> f64 {
    let prod = m.g.mul(&m.f).expect("same order");
    (0..m.order())
        .map(|n| {
            let scale: f64 = (0..=n).map(|k| m.g.coeff(k).norm() * m.f.coeff(n - k).norm()).sum();
            let target = if n == 1 { 1.0 } else { 0.0 };
            (prod.coeff(n) - target).norm() / scale.max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Signed slack of `|a_2 − 1/p| ≤ λp`.
pub fn a2_region_margin(m: &MemberFunction) -> f64 {
    let cp = m.class_params;
    cp.lambda_p() - (m.a2 - 1.0 / cp.p).norm()
}

pub fn a2_region_check(m: &MemberFunction) -> bool {
    a2_region_margin(m) >= -1e-9
}

/// `u = (1 − λp) / (1 − λp z w(z))`, the normalized bounded factor with
/// `f = −pz u / ((z − p)(1 − λp))`.
pub fn u_normalized_form(m: &MemberFunction) -> Result<PowerSeries, VClassError> {
    if m.source == Source::FromW1 {
        return Err(VClassError::WrongSource);
    }
    let cp = m.class_params;
    let order = m.order();
    let w = schur_to_series(&m.generator, order)?;
    let den = PowerSeries::one(order).sub(&w.shift_up().scale(cp.lambda_p().into()))?;
    Ok(den.reciprocal()?.scale((1.0 - cp.lambda_p()).into()))
}

/// `(1 − (λp²)^n) / (p^{n−1}(1 − λp²))`, the n-th coefficient of `k_p^λ`.
pub fn extremal_coeffs(cp: ClassParams, n: u32) -> f64 {
    let q = cp.lambda * cp.p * cp.p;
    (1.0 - q.powi(n as i32)) / (cp.p.powi(n as i32 - 1) * (1.0 - q))
}

/// Conjectured sharp bound for `|a_n(f)|`; the extremal attains it.
pub fn conjectured_bound(cp: ClassParams, n: u32) -> f64 {
    extremal_coeffs(cp, n)
}

/// `a_3` in terms of the Taylor coefficients `c_k` of `w`.
pub fn closed_form_a3(cp: ClassParams, c0: Complex64, c1: Complex64) -> Complex64 {
    let (p, l) = (cp.p, cp.lambda);
    l * p * c1 + l * l * p * p * c0 * c0 + l * c0 + 1.0 / (p * p)
}

pub fn closed_form_a4(cp: ClassParams, c0: Complex64, c1: Complex64, c2: Complex64) -> Complex64 {
    let (p, l) = (cp.p, cp.lambda);
    l * p * c2
        + 2.0 * l.powi(2) * p.powi(2) * c0 * c1
        + l.powi(3) * p.powi(3) * c0.powi(3)
        + l * c1
        + l.powi(2) * p * c0 * c0
        + l * c0 / p
        + 1.0 / p.powi(3)
}

pub fn closed_form_a5(
    cp: ClassParams,
    c0: Complex64,
    c1: Complex64,
    c2: Complex64,
    c3: Complex64,
) -> Complex64 {
    let (p, l) = (cp.p, cp.lambda);
    l * p * c3
        + l.powi(2) * p.powi(2) * c1 * c1
        + 2.0 * c0 * c2 * l.powi(2) * p.powi(2)
        + 3.0 * c0 * c0 * c1 * l.powi(3) * p.powi(3)
        + l.powi(4) * p.powi(4) * c0.powi(4)
        + l * c2
        + 2.0 * c0 * c1 * l.powi(2) * p
        + l.powi(3) * p.powi(2) * c0.powi(3)
        + l * c1 / p
        + l.powi(2) * c0 * c0
        + l * c0 / p.powi(2)
        + 1.0 / p.powi(4)
}

/// Cauchy–Schwarz bound for `|a_n(f)|`, `n ≥ 3`.
pub fn nonsharp_bound(cp: ClassParams, n: u32) -> f64 {
    let (p, l) = (cp.p, cp.lambda);
    let majorant: f64 = (1..n).map(|k| (l * p).powi(2 * k as i32)).sum();
    let geometric: f64 = (1..n).map(|k| p.powi(-2 * (n - k - 1) as i32)).sum();
    p.powi(-(n as i32 - 1)) + majorant.sqrt() * geometric.sqrt()
}

/// `max_{2 ≤ n ≤ n_max} |a_{n+1} − a_n/p| / (λp)`.
pub fn diff_bound_check(m: &MemberFunction, n_max: usize) -> Result<f64, VClassError> {
    if n_max + 1 >= m.order() {
        return Err(VClassError::TruncationOrder {
            index: n_max + 1,
            needed: n_max + 1,
            order: m.order(),
        });
    }
    let cp = m.class_params;
    Ok((2..=n_max)
        .map(|n| (m.coeff(n + 1) - m.coeff(n) / cp.p).norm() / cp.lambda_p())
        .fold(0.0, f64::max))
}

/// `(Σ_{k=1}^{n−1} |B_k|², Σ_{k=1}^{n−1} (λp)^{2k})` where `B_k` are the
/// coefficients of `1/(1 − λp z w(z))`.
pub fn rogosinski_l2_check(
    cp: ClassParams,
    w: &SchurParams,
    n: usize,
) -> Result<(f64, f64), VClassError> {
    let order = n.max(2);
    let ws = schur_to_series(w, order)?;
    let den = PowerSeries::one(order).sub(&ws.shift_up().scale(cp.lambda_p().into()))?;
    let b = den.reciprocal()?;
    let lhs = (1..n).map(|k| b.coeff(k).norm_sqr()).sum();
    let rhs = (1..n).map(|k| cp.lambda_p().powi(2 * k as i32)).sum();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::random_schur;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_rel_diff(a: &PowerSeries, b: &PowerSeries) -> f64 {
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
            .fold(0.0, f64::max)
    }

    fn cp(p: f64, lambda: f64) -> ClassParams {
        ClassParams::new(p, lambda).unwrap()
    }

    fn constant(g: f64) -> SchurParams {
        SchurParams::constant(c(g, 0.0)).unwrap()
    }

    #[test]
    fn class_params_validation() {
        assert!(ClassParams::new(0.0, 0.5).is_err());
        assert!(ClassParams::new(1.0, 0.5).is_err());
        assert!(ClassParams::new(0.5, 0.0).is_err());
        assert!(ClassParams::new(0.5, 1.0 + 1e-15).is_err());
        assert!(ClassParams::new(f64::NAN, 0.5).is_err());
        assert!(ClassParams::new(0.5, 1.0).is_ok());
    }

    #[test]
    fn w_one_gives_extremal_coefficients() {
        for &(p, l) in &[(0.5, 1.0), (0.3, 0.7), (0.9, 0.2)] {
            let m = build_from_w(cp(p, l), &constant(1.0), 32).unwrap();
            for n in 1..=20u32 {
                let expect = (1.0 - (l * p * p).powi(n as i32)) / (p.powi(n as i32 - 1) * (1.0 - l * p * p));
                let got = m.coeff(n as usize);
                assert!((got - c(expect, 0.0)).norm() <= 1e-12 * expect, "p={p} l={l} n={n}");
            }
        }
        let m = build_from_w(cp(0.5, 1.0), &constant(1.0), 8).unwrap();
        assert_eq!(m.coeff(3), c(5.25, 0.0));
        assert_eq!(m.a2, c(2.5, 0.0));
    }

    #[test]
    fn w_zero_gives_geometric_member() {
        let p = 0.4;
        let m = build_from_w(cp(p, 0.6), &constant(0.0), 16).unwrap();
        for n in 1..16 {
            assert!((m.coeff(n) - c(p.powi(1 - n as i32), 0.0)).norm() < 1e-9);
        }
        assert_eq!(m.coeff(0), c(0.0, 0.0));
        assert!(u_residual(&m).coeffs().iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn normalization_and_product_identity() {
        for seed in 0..20 {
            let params = random_schur(3, seed);
            let m = build_from_w(cp(0.35, 0.8), &params, 24).unwrap();
            assert_eq!(m.g.coeff(0), c(1.0, 0.0));
            assert_eq!(m.coeff(0), c(0.0, 0.0));
            assert_eq!(m.coeff(1), c(1.0, 0.0));
            assert!(product_identity_error(&m) < 1e-10);
        }
    }

    #[test]
    fn from_w1_with_constant_one_is_extremal() {
        let class = cp(0.6, 0.9);
        let m1 = build_from_w1(class, &constant(1.0), 32).unwrap();
        let m = build_from_w(class, &constant(1.0), m1.order()).unwrap();
        assert!((m1.a2 - c((1.0 + 0.9 * 0.36) / 0.6, 0.0)).norm() < 1e-14);
        assert!(max_rel_diff(&m1.f, &m.f) < 1e-10);
    }

    #[test]
    fn from_w1_with_zero_is_geometric() {
        let m = build_from_w1(cp(0.3, 0.5), &constant(0.0), 32).unwrap();
        assert_eq!(m.a2, c(1.0 / 0.3, 0.0));
        assert!((m.coeff(5) - c(0.3f64.powi(-4), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn from_w1_a2_stays_in_disc() {
        let class = cp(0.5, 0.8);
        for seed in 0..50 {
            let m = build_from_w1(class, &random_schur(4, seed), 32).unwrap();
            assert!((m.a2 - c(2.0, 0.0)).norm() <= 0.4 + 1e-9);
        }
    }

    #[test]
    fn from_w1_raises_order_and_rejects_large_p() {
        let m = build_from_w1(cp(0.9, 1.0), &constant(0.5), 32).unwrap();
        assert_eq!(m.order(), required_order_for_pole(0.9));
        assert!(0.9f64.powi(m.order() as i32) / 0.1 <= 1e-12);
        assert!(0.9f64.powi(m.order() as i32 - 1) / 0.1 > 1e-12);
        assert!(matches!(
            build_from_w1(cp(0.96, 1.0), &constant(0.5), 32),
            Err(VClassError::PoleTooCloseToBoundary { .. })
        ));
        assert!(matches!(
            build_from_w(cp(0.5, 1.0), &constant(0.5), 2),
            Err(VClassError::OrderTooSmall(2))
        ));
    }

    #[test]
    fn pole_condition_for_w1_members() {
        for seed in 0..30 {
            let class = cp(0.05 + 0.03 * seed as f64, 1.0 - 0.02 * seed as f64);
            let m = build_from_w1(class, &random_schur(3, seed), 32).unwrap();
            assert!(m.g.eval(c(class.p(), 0.0)).norm() <= 1e-10);
        }
    }

    #[test]
    fn u_residual_matches_pointwise_definition() {
        // Inside |z| < p the Taylor series of f converges, so (z/f)² f' − 1
        // can be evaluated directly from f without using G.
        for seed in 0..10 {
            let class = cp(0.6, 0.7);
            let m = build_from_w(class, &random_schur(3, seed), 64).unwrap();
            let u = u_residual(&m);
            let fp = m.f.derivative();
            for k in 0..10 {
                let z = Complex64::from_polar(0.2, TAU * k as f64 / 10.0);
                let fz = m.f.eval(z);
                let direct = (z / fz).powi(2) * fp.eval(z) - 1.0;
                assert!((direct - u.eval(z)).norm() < 1e-10, "{direct} vs {}", u.eval(z));
            }
        }
    }

    #[test]
    fn u_residual_of_w1_member_is_scaled_w1() {
        let class = cp(0.4, 0.75);
        let params = random_schur(4, 9);
        let m = build_from_w1(class, &params, 32).unwrap();
        let w1 = schur_to_series(&params, m.order()).unwrap();
        let expect = w1.shift_up().shift_up().scale((-class.lambda()).into());
        assert!(u_residual(&m).max_abs_diff(&expect).unwrap() <= 1e-12);

        let ext = extremal_member(class, 16).unwrap();
        let u = u_residual(&ext);
        assert!((u.coeff(2) + c(0.75, 0.0)).norm() < 1e-15);
        assert!(u.coeffs().iter().enumerate().all(|(k, x)| k == 2 || x.norm() < 1e-12));
    }

    #[test]
    fn extremal_membership() {
        let m = extremal_member(cp(0.5, 1.0), 32).unwrap();
        let v = membership_check(&m, 0.99, 512).unwrap();
        assert!((v.sup_u - 0.9801).abs() < 1e-12);
        assert_eq!(v.pole_count, 1);
        assert_eq!(v.status, MembershipStatus::Member);
    }

    #[test]
    fn geometric_member_has_zero_residual() {
        let m = build_from_w(cp(0.5, 0.3), &constant(0.0), 32).unwrap();
        let v = membership_check(&m, 0.9, 64).unwrap();
        assert_eq!(v.sup_u, 0.0);
        assert_eq!(v.status, MembershipStatus::Member);
    }

    #[test]
    fn w1_members_with_one_pole_are_members() {
        let class = cp(0.45, 0.9);
        let r = 0.7;
        for seed in 0..20 {
            let m = build_from_w1(class, &random_schur(3, 50 + seed), 32).unwrap();
            let v = membership_check(&m, r, 256).unwrap();
            if v.pole_count == 1 {
                assert_eq!(v.status, MembershipStatus::Member);
                assert!(v.margin >= class.lambda() * (1.0 - r * r) - 1e-9);
            }
        }
    }

    #[test]
    fn membership_contour_must_enclose_pole() {
        let m = extremal_member(cp(0.5, 1.0), 16).unwrap();
        assert!(matches!(
            membership_check(&m, 0.5, 64),
            Err(VClassError::ContourRadius { .. })
        ));
        assert!(membership_check(&m, 1.0, 64).is_err());
    }

    #[test]
    fn winding_counts_zeros() {
        // (z - 0.3)(z + 0.2i)(z - 2): two zeros inside |z| = 0.5.
        let a = PowerSeries::from_real(&[-0.3, 1.0, 0.0, 0.0]).unwrap();
        let b = PowerSeries::new(vec![c(0.0, 0.2), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let d = PowerSeries::from_real(&[-2.0, 1.0, 0.0, 0.0]).unwrap();
        let g = a.mul(&b).unwrap().mul(&d).unwrap();
        assert_eq!(winding_number(&g, 0.5, 4096).unwrap(), 2);
        assert_eq!(winding_number(&g, 0.25, 4096).unwrap(), 1);
        assert_eq!(winding_number(&g, 0.1, 4096).unwrap(), 0);
        assert_eq!(winding_number(&g, 3.0, 4096).unwrap(), 3);
    }

    #[test]
    fn classify_statuses() {
        use MembershipStatus::*;
        assert_eq!(MembershipVerdict::classify(0.5, 1.0, 1).status, Member);
        assert_eq!(MembershipVerdict::classify(1.0 - 1e-10, 1.0, 1).status, Boundary);
        assert_eq!(MembershipVerdict::classify(1.0 + 1e-10, 1.0, 1).status, Boundary);
        assert_eq!(MembershipVerdict::classify(1.1, 1.0, 1).status, NonMember);
        assert_eq!(MembershipVerdict::classify(0.1, 1.0, 2).status, ExtraPole);
        assert_eq!(MembershipVerdict::classify(0.1, 1.0, 0).status, ExtraPole);
    }

    #[test]
    fn extremal_and_conjectured_examples() {
        let class = cp(0.5, 1.0);
        assert_eq!(extremal_coeffs(class, 1), 1.0);
        assert!((extremal_coeffs(class, 2) - 2.5).abs() < 1e-15);
        assert!((extremal_coeffs(class, 3) - 5.25).abs() < 1e-14);
        let other = cp(0.37, 0.61);
        for n in 1..12 {
            assert_eq!(conjectured_bound(other, n), extremal_coeffs(other, n));
        }
        let near = cp(0.9, 1.0);
        assert!((conjectured_bound(near, 3) - 0.468559 / 0.1539).abs() < 1e-12);
        assert!((conjectured_bound(near, 3) - (1.0 / 0.81 + 1.0 + 0.81)).abs() < 1e-12);
        let edge = cp(1.0 - 1e-9, 0.6);
        assert!((conjectured_bound(edge, 3) - (1.0 + 0.6 + 0.36)).abs() < 1e-6);
    }

    #[test]
    fn closed_forms_at_special_points() {
        let class = cp(0.3, 0.8);
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        assert!((closed_form_a3(class, one, zero).re - extremal_coeffs(class, 3)).abs() < 1e-12);
        let p: f64 = 0.3;
        assert!((closed_form_a3(class, zero, zero) - c(p.powi(-2), 0.0)).norm() < 1e-12);
        assert!((closed_form_a4(class, zero, zero, zero) - c(p.powi(-3), 0.0)).norm() < 1e-11);
        assert!((closed_form_a5(class, zero, zero, zero, zero) - c(p.powi(-4), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn closed_forms_match_series() {
        for seed in 0..100 {
            let p = 0.05 + 0.9 * ((seed * 37 % 100) as f64 / 100.0);
            let lambda = 0.05 + 0.95 * ((seed * 53 % 100) as f64 / 100.0);
            let class = cp(p, lambda);
            let params = random_schur((seed % 5) as usize, seed);
            let m = build_from_w(class, &params, 16).unwrap();
            let w = schur_to_series(&params, 16).unwrap();
            let (c0, c1, c2, c3) = (w.coeff(0), w.coeff(1), w.coeff(2), w.coeff(3));
            let checks = [
                (m.coeff(3), closed_form_a3(class, c0, c1)),
                (m.coeff(4), closed_form_a4(class, c0, c1, c2)),
                (m.coeff(5), closed_form_a5(class, c0, c1, c2, c3)),
            ];
            for (series, closed) in checks {
                assert!((series - closed).norm() <= 1e-10 * closed.norm().max(1.0), "seed {seed}");
            }
        }
    }

    #[test]
    fn nonsharp_examples() {
        assert!((nonsharp_bound(cp(0.5, 1.0), 3) - 5.25).abs() < 1e-12);
        let l: f64 = 0.5;
        let limit = 1.0 + l * 3f64.sqrt() * (1.0 + l * l + l.powi(4)).sqrt();
        assert!((nonsharp_bound(cp(0.999, l), 4) - limit).abs() < 1e-2);
        let tiny = cp(0.4, 1e-12);
        assert!((nonsharp_bound(tiny, 5) - 0.4f64.powi(-4)).abs() < 1e-9);
    }

    #[test]
    fn diff_bound_examples() {
        let class = cp(0.6, 0.7);
        let ext = extremal_member(class, 32).unwrap();
        let ratio = diff_bound_check(&ext, 10).unwrap();
        assert!((ratio - class.lambda_p()).abs() < 1e-12);
        let geo = build_from_w(class, &constant(0.0), 32).unwrap();
        assert!(diff_bound_check(&geo, 10).unwrap() < 1e-12);
        assert!(matches!(
            diff_bound_check(&geo, 31),
            Err(VClassError::TruncationOrder { .. })
        ));
    }

    #[test]
    fn rogosinski_examples() {
        let class = cp(0.7, 0.9);
        let (lhs, rhs) = rogosinski_l2_check(class, &constant(1.0), 8).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        let (lhs, _) = rogosinski_l2_check(class, &constant(0.0), 8).unwrap();
        assert_eq!(lhs, 0.0);
        for seed in 0..50 {
            let (lhs, rhs) = rogosinski_l2_check(class, &random_schur(4, seed), 12).unwrap();
            assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn u_form_consistency() {
        let class = cp(0.45, 0.85);
        let m = build_from_w(class, &random_schur(3, 4), 32).unwrap();
        let u = u_normalized_form(&m).unwrap();
        assert!((u.coeff(0) - c(1.0 - class.lambda_p(), 0.0)).norm() < 1e-15);
        assert!(crate::schur::schur_validate(&u, &[0.5, 0.9], 128) <= 1.0 + 1e-9);
        // f = z u / ((1 - z/p)(1 - λp)).
        let pole = PowerSeries::with_order(&[c(1.0, 0.0), c(-1.0 / class.p(), 0.0)], 32).unwrap();
        let f = u.div(&pole).unwrap().shift_up().scale((1.0 / (1.0 - class.lambda_p())).into());
        assert!(max_rel_diff(&f, &m.f) < 1e-10);
        let m1 = build_from_w1(class, &random_schur(3, 4), 32).unwrap();
        assert_eq!(u_normalized_form(&m1), Err(VClassError::WrongSource));
    }

    #[test]
    fn a2_region_margin_on_extremal_is_zero() {
        let m = extremal_member(cp(0.3, 0.6), 16).unwrap();
        assert!(a2_region_margin(&m).abs() < 1e-12);
        assert!(a2_region_check(&m));
    }
}
