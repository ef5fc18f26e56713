//! Schur-class functions generated from finite Schur parameter sequences.
//!
//! A sequence `γ_0, …, γ_m` in the closed unit disc defines a rational
//! function bounded by one on the disc through the backward recursion
//!
//! ```text
//! f_m = γ_m,    f_k(z) = (γ_k + z f_{k+1}(z)) / (1 + conj(γ_k) z f_{k+1}(z)).
//! ```
//!
//! Every parameter choice yields a valid Schur function, which makes the
//! parameter space a closed polydisc.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{PowerSeries, SeriesError};

/// Slack allowed on `|γ_k| ≤ 1`.
pub const PARAM_TOLERANCE: f64 = 1e-12;

/// Slack used by [`schur_coeff_inequality_check`].
pub const COEFF_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchurError {
    #[error("Schur parameter list is empty")]
    Empty,
    #[error("Schur parameter {index} has modulus {modulus} > 1")]
    OutsideDisc { index: usize, modulus: f64 },
    #[error("Schur parameter {index} is not finite")]
    NonFinite { index: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Parameters `γ_0, …, γ_m` of a rational Schur function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct SchurParams {
    gammas: Vec<Complex64>,
}

impl SchurParams {
    pub fn new(gammas: Vec<Complex64>) -> Result<Self, SchurError> {
        if gammas.is_empty() {
            return Err(SchurError::Empty);
        }
        for (index, g) in gammas.iter().enumerate() {
            if !g.is_finite() {
                return Err(SchurError::NonFinite { index });
            }
            let modulus = g.norm();
            if modulus > 1.0 + PARAM_TOLERANCE {
                return Err(SchurError::OutsideDisc { index, modulus });
            }
        }
        Ok(Self { gammas })
    }

    /// The constant function `w ≡ c`.
    pub fn constant(c: Complex64) -> Result<Self, SchurError> {
        Self::new(vec![c])
    }

    /// Builds parameters from interleaved `(re, im)` coordinates, projecting
    /// every point radially onto the closed unit disc.
    pub fn from_coords_clamped(coords: &[f64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len().is_multiple_of(2),
            "coordinate vector must hold (re, im) pairs"
        );
        let gammas = coords
            .chunks_exact(2)
            .map(|xy| {
                let g = Complex64::new(xy[0], xy[1]);
                let r = g.norm();
                if r > 1.0 { g / r } else { g }
            })
            .collect();
        Self { gammas }
    }

    pub fn to_coords(&self) -> Vec<f64> {
        self.gammas.iter().flat_map(|g| [g.re, g.im]).collect()
    }

    pub fn gammas(&self) -> &[Complex64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Taylor series of the generated Schur function, truncated to `order`.
    pub fn to_series(&self, order: usize) -> Result<PowerSeries, SchurError> {
        schur_to_series(self, order)
    }
}

impl TryFrom<Vec<[f64; 2]>> for SchurParams {
    type Error = SchurError;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Self::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<SchurParams> for Vec<[f64; 2]> {
    fn from(p: SchurParams) -> Self {
        p.gammas.into_iter().map(|g| [g.re, g.im]).collect()
    }
}

/// Runs the backward Schur recursion on truncated series.
pub fn schur_to_series(params: &SchurParams, order: usize) -> Result<PowerSeries, SchurError> {
    // Re-check in case the value was assembled without `new`.
    let params = SchurParams::new(params.gammas.clone())?;
    let (last, rest) = params.gammas.split_last().ok_or(SchurError::Empty)?;
    let one = PowerSeries::one(order);
    let mut f = PowerSeries::constant(*last, order);
    for &gamma in rest.iter().rev() {
        let zf = f.shift_up();
        let num = PowerSeries::constant(gamma, order).add(&zf)?;
        let den = one.add(&zf.scale(gamma.conj()))?;
        f = num.div(&den)?;
    }
    Ok(f)
}

/// Largest `|w(z)|` over circles of the given radii, `angles_per_radius`
/// equally spaced samples each.
pub fn schur_validate(w: &PowerSeries, radii: &[f64], angles_per_radius: usize) -> f64 {
    radii
        .iter()
        .flat_map(|&r| {
            (0..angles_per_radius).map(move |k| {
                Complex64::from_polar(r, TAU * k as f64 / angles_per_radius as f64)
            })
        })
        .map(|z| w.eval(z).norm())
        .fold(0.0, f64::max)
}

/// Checks `|c_0| ≤ 1` and `|c_n| ≤ 1 − |c_0|²` for `n ≥ 1`, one verdict per
/// coefficient.
pub fn schur_coeff_inequality_check(w: &PowerSeries) -> Vec<bool> {
    schur_coeff_inequality_check_with(w, COEFF_TOLERANCE)
}

pub fn schur_coeff_inequality_check_with(w: &PowerSeries, tol: f64) -> Vec<bool> {
    let margins = schur_coeff_margins(w);
    margins.iter().map(|&m| m >= -tol).collect()
}

/// Signed slack of each coefficient inequality (negative means violated).
pub fn schur_coeff_margins(w: &PowerSeries) -> Vec<f64> {
    let c0 = w.coeff(0).norm();
    let cap = 1.0 - c0 * c0;
    w.coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| if n == 0 { 1.0 - c0 } else { cap - c.norm() })
        .collect()
}

/// Draws `m + 1` parameters uniformly on the closed unit disc.
///
/// Each parameter consumes two `f64` draws from a ChaCha8 stream seeded with
/// `rng_seed`: first `u_r` (radius `sqrt(u_r)`), then `u_θ` (angle `2π u_θ`).
pub fn random_schur(m: usize, rng_seed: u64) -> SchurParams {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    random_schur_with(m, &mut rng)
}

pub fn random_schur_with<R: Rng + ?Sized>(m: usize, rng: &mut R) -> SchurParams {
    let gammas = (0..=m).map(|_| uniform_disc(rng, 1.0)).collect();
    SchurParams { gammas }
}

/// A point uniform on the disc of the given radius.
pub fn uniform_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = TAU * rng.gen::<f64>();
    Complex64::from_polar(r, theta)
}
