//! Majorant polynomials for `|a_3|`, `|a_4|`, `|a_5|` and the checks built on
//! them.
//!
//! Writing `x = |c_0|` for the constant term of the generator `w` and using
//! `|c_k| ≤ 1 − x²` (k ≥ 1), the triangle inequality turns the closed forms of
//! `a_3, a_4, a_5` into real polynomials `h, g, q` in `x`. On the proven
//! ranges of `p` each polynomial is nondecreasing on `[0, 1]`, so its maximum
//! is the value at `x = 1`, which equals the conjectured bound.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schur::uniform_disc;
use crate::vclass::{closed_form_a3, closed_form_a4, closed_form_a5, conjectured_bound, ClassParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("no majorant polynomial for n = {0} (only 3, 4, 5)")]
    UnsupportedIndex(u32),
}

/// One of the three coefficient indices with a majorant polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyCase {
    n: u32,
}

impl PolyCase {
    pub fn new(n: u32) -> Result<Self, BoundsError> {
        match n {
            3..=5 => Ok(Self { n }),
            _ => Err(BoundsError::UnsupportedIndex(n)),
        }
    }

    pub fn all() -> [PolyCase; 3] {
        [Self { n: 3 }, Self { n: 4 }, Self { n: 5 }]
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Largest `p` for which monotonicity on `[0, 1]` is proven.
    pub fn threshold(&self) -> f64 {
        match self.n {
            3 => 0.5,
            4 => (3f64.sqrt() - 1.0) / 2.0,
            _ => (5f64.sqrt() - 1.0) / 4.0,
        }
    }

    pub fn in_proven_range(&self, p: f64) -> bool {
        p <= self.threshold()
    }

    pub fn value(&self, cp: ClassParams, x: f64) -> f64 {
        match self.n {
            3 => poly_h(cp, x),
            4 => poly_g(cp, x),
            _ => poly_q(cp, x),
        }
    }

    pub fn derivative(&self, cp: ClassParams, x: f64) -> f64 {
        match self.n {
            3 => poly_h_d(cp, x),
            4 => poly_g_d(cp, x),
            _ => poly_q_d(cp, x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RangeTag {
    Proven,
    OutOfProvenRange,
}

pub fn poly_h(cp: ClassParams, x: f64) -> f64 {
    let (p, l) = (cp.p(), cp.lambda());
    l * p * (1.0 - x * x) + l * x + l * l * p * p * x * x + 1.0 / (p * p)
}

pub fn poly_h_d(cp: ClassParams, x: f64) -> f64 {
    let (p, l) = (cp.p(), cp.lambda());
    l * (1.0 - 2.0 * p * x) + 2.0 * l * l * p * p * x
}

/// Cubic, quadratic, linear and constant coefficients of `g`.
fn g_coeffs(cp: ClassParams) -> [f64; 4] {
    let (p, l) = (cp.p(), cp.lambda());
    [
        -2.0 * l.powi(2) * p.powi(2) + l.powi(3) * p.powi(3),
        -l * p - l + l.powi(2) * p,
        2.0 * l.powi(2) * p.powi(2) + l / p,
        l * p + l + 1.0 / p.powi(3),
    ]
}

pub fn poly_g(cp: ClassParams, x: f64) -> f64 {
    let [a3, a2, a1, a0] = g_coeffs(cp);
    ((a3 * x + a2) * x + a1) * x + a0
}

pub fn poly_g_d(cp: ClassParams, x: f64) -> f64 {
    let [a3, a2, a1, _] = g_coeffs(cp);
    (3.0 * a3 * x + 2.0 * a2) * x + a1
}

/// Quartic down to constant coefficients of `q`.
fn q_coeffs(cp: ClassParams) -> [f64; 5] {
    let (p, l) = (cp.p(), cp.lambda());
    [
        l.powi(4) * p.powi(4) + l.powi(2) * p.powi(2) - 3.0 * l.powi(3) * p.powi(3),
        -2.0 * l.powi(2) * p.powi(2) - 2.0 * l.powi(2) * p + l.powi(3) * p.powi(2),
        -l * p - 2.0 * l.powi(2) * p.powi(2) + 3.0 * l.powi(3) * p.powi(3) - l + l.powi(2) - l / p,
        2.0 * l.powi(2) * p.powi(2) + 2.0 * l.powi(2) * p + l / p.powi(2),
        l * p + l.powi(2) * p.powi(2) + l + l / p + 1.0 / p.powi(4),
    ]
}

pub fn poly_q(cp: ClassParams, x: f64) -> f64 {
    let [a4, a3, a2, a1, a0] = q_coeffs(cp);
    (((a4 * x + a3) * x + a2) * x + a1) * x + a0
}

pub fn poly_q_d(cp: ClassParams, x: f64) -> f64 {
    let [a4, a3, a2, a1, _] = q_coeffs(cp);
    ((4.0 * a4 * x + 3.0 * a3) * x + 2.0 * a2) * x + a1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub n: u32,
    pub min_derivative: f64,
    pub argmin: f64,
    pub range: RangeTag,
}

/// Minimum of the majorant's derivative over `grid_size` equally spaced
/// points of `[0, 1]` (endpoints included).
pub fn monotone_check(case: PolyCase, cp: ClassParams, grid_size: usize) -> MonotoneReport {
    let steps = grid_size.max(2) - 1;
    let (argmin, min_derivative) = (0..=steps)
        .map(|i| {
            let x = i as f64 / steps as f64;
            (x, case.derivative(cp, x))
        })
        .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let range = if case.in_proven_range(cp.p()) {
        RangeTag::Proven
    } else {
        RangeTag::OutOfProvenRange
    };
    MonotoneReport {
        n: case.n,
        min_derivative,
        argmin,
        range,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantOptions {
    pub grid_size: usize,
    pub tuples: usize,
    pub seed: u64,
    pub derivative_tolerance: f64,
    pub value_tolerance: f64,
    pub sweep_tolerance: f64,
}

impl Default for MajorantOptions {
    fn default() -> Self {
        Self {
            grid_size: 1000,
            tuples: 10_000,
            seed: 0x5eed,
            derivative_tolerance: 1e-12,
            value_tolerance: 1e-12,
            sweep_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantVerdict {
    pub n: u32,
    pub p: f64,
    pub lambda: f64,
    pub range: RangeTag,
    pub min_derivative: f64,
    pub poly_at_one: f64,
    pub bound: f64,
    /// `|poly(1) − bound| / bound`.
    pub value_error: f64,
    pub tuples: usize,
    pub sweep_max_abs: f64,
    /// `max |a_n| − bound` over the sweep; negative when the bound holds.
    pub sweep_max_excess: f64,
    /// Every sampled tuple obeyed `|c_k| ≤ 1 − |c_0|²`.
    pub sweep_respects_constraint: bool,
    pub passed: bool,
}

pub fn verify_majorant_bound(cp: ClassParams, n: u32) -> Result<MajorantVerdict, BoundsError> {
    verify_majorant_bound_with(cp, n, MajorantOptions::default())
}

pub fn verify_majorant_bound_with(
    cp: ClassParams,
    n: u32,
    opts: MajorantOptions,
) -> Result<MajorantVerdict, BoundsError> {
    let case = PolyCase::new(n)?;
    let mono = monotone_check(case, cp, opts.grid_size);
    let bound = conjectured_bound(cp, n);
    let poly_at_one = case.value(cp, 1.0);
    let value_error = (poly_at_one - bound).abs() / bound;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sweep_max_abs: f64 = 0.0;
    let mut respects = true;
    for _ in 0..opts.tuples {
        let c0 = uniform_disc(&mut rng, 1.0);
        let cap = 1.0 - c0.norm_sqr();
        let rest: Vec<Complex64> = (1..n - 1).map(|_| uniform_disc(&mut rng, cap)).collect();
        respects &= rest.iter().all(|c| c.norm() <= cap);
        let a = match n {
            3 => closed_form_a3(cp, c0, rest[0]),
            4 => closed_form_a4(cp, c0, rest[0], rest[1]),
            _ => closed_form_a5(cp, c0, rest[0], rest[1], rest[2]),
        };
        sweep_max_abs = sweep_max_abs.max(a.norm());
    }
    let sweep_max_excess = sweep_max_abs - bound;

    let passed = mono.min_derivative >= -opts.derivative_tolerance
        && value_error <= opts.value_tolerance
        && sweep_max_excess <= opts.sweep_tolerance
        && respects;
    Ok(MajorantVerdict {
        n,
        p: cp.p(),
        lambda: cp.lambda(),
        range: mono.range,
        min_derivative: mono.min_derivative,
        poly_at_one,
        bound,
        value_error,
        tuples: opts.tuples,
        sweep_max_abs,
        sweep_max_excess,
        sweep_respects_constraint: respects,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(p: f64, lambda: f64) -> ClassParams {
        ClassParams::new(p, lambda).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn thresholds() {
        assert_eq!(PolyCase::new(3).unwrap().threshold(), 0.5);
        assert!((PolyCase::new(4).unwrap().threshold() - 0.36602540378443865).abs() < 1e-16);
        assert!((PolyCase::new(5).unwrap().threshold() - 0.30901699437494745).abs() < 1e-16);
        assert!(PolyCase::new(2).is_err());
        assert!(PolyCase::new(6).is_err());
    }

    #[test]
    fn values_at_one() {
        for &(p, l) in &[(0.2, 0.3), (0.5, 1.0), (0.8, 0.9)] {
            let c = cp(p, l);
            assert!(rel(poly_h(c, 1.0), l + l * l * p * p + 1.0 / (p * p)) < 1e-14);
            let g1 = (1.0 + l * p * p + l * l * p.powi(4) + l.powi(3) * p.powi(6)) / p.powi(3);
            assert!(rel(poly_g(c, 1.0), g1) < 1e-14);
            let q1 = (1.0 + l * p * p + l * l * p.powi(4) + l.powi(3) * p.powi(6) + l.powi(4) * p.powi(8))
                / p.powi(4);
            assert!(rel(poly_q(c, 1.0), q1) < 1e-14);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let c = cp(0.37, 0.83);
        let h = 1e-6;
        for case in PolyCase::all() {
            for i in 1..10 {
                let x = i as f64 / 10.0;
                let fd = (case.value(c, x + h) - case.value(c, x - h)) / (2.0 * h);
                assert!((fd - case.derivative(c, x)).abs() < 1e-6, "n={} x={x}", case.n());
            }
        }
    }

    #[test]
    fn majorants_dominate_closed_forms() {
        // With |c_0| = x and |c_k| = 1 − x² all aligned positive, the closed
        // forms reach the majorant exactly.
        let c = cp(0.3, 0.7);
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let c0 = Complex64::new(x, 0.0);
            let ck = Complex64::new(1.0 - x * x, 0.0);
            assert!(closed_form_a3(c, c0, ck).norm() <= poly_h(c, x) * (1.0 + 1e-14));
            assert!(closed_form_a4(c, c0, ck, ck).norm() <= poly_g(c, x) * (1.0 + 1e-14));
            assert!(closed_form_a5(c, c0, ck, ck, ck).norm() <= poly_q(c, x) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn monotone_examples() {
        let h = monotone_check(PolyCase::new(3).unwrap(), cp(0.5, 1.0), 1001);
        assert!((h.min_derivative - 0.5).abs() < 1e-15);
        assert_eq!(h.argmin, 1.0);
        assert_eq!(h.range, RangeTag::Proven);

        let t4 = PolyCase::new(4).unwrap();
        let t5 = PolyCase::new(5).unwrap();
        for i in 1..=10 {
            let l = i as f64 / 10.0;
            assert!(monotone_check(t4, cp(t4.threshold(), l), 1000).min_derivative >= 0.0);
            assert!(monotone_check(t5, cp(t5.threshold(), l), 1000).min_derivative >= 0.0);
        }
        let out = monotone_check(PolyCase::new(3).unwrap(), cp(0.9, 1.0), 100);
        assert_eq!(out.range, RangeTag::OutOfProvenRange);
    }

    #[test]
    fn verify_examples() {
        let v = verify_majorant_bound(cp(0.3, 0.7), 4).unwrap();
        assert!(v.passed, "{v:?}");
        assert!(v.sweep_respects_constraint);
        let v = verify_majorant_bound(cp(0.5, 1.0), 3).unwrap();
        assert!(v.passed);
        assert!((v.bound - 5.25).abs() < 1e-14);
        let v = verify_majorant_bound(cp(0.6, 1.0), 3).unwrap();
        assert_eq!(v.range, RangeTag::OutOfProvenRange);
        assert_eq!(v.tuples, 10_000);
        assert!(verify_majorant_bound(cp(0.3, 0.7), 6).is_err());
    }
}
