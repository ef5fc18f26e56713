//! Coefficient tools for normalized meromorphic functions `f` on the unit
//! disc with a simple pole at `p ∈ (0, 1)` and `|(z/f)² f' − 1| < λ`.
//!
//! The crate builds such functions from bounded analytic generators, extracts
//! their Taylor coefficients, evaluates the known coefficient bounds, and
//! searches Schur-parameter space for coefficients exceeding the conjectured
//! sharp bound.

pub mod bounds;
pub mod cli;
pub mod schur;
pub mod search;
pub mod suite;
pub mod series;
pub mod vclass;

pub use schur::{random_schur, schur_to_series, SchurParams};
pub use series::PowerSeries;
pub use vclass::{ClassParams, MemberFunction, MembershipStatus, MembershipVerdict, Source};
