//! Multi-start simplex search for large Taylor coefficients.
//!
//! The search maximizes `|a_n(f)|` over the Schur parameters of the generator,
//! treating the `2·param_count` real coordinates as the search space. Points
//! leaving the closed unit polydisc are projected back radially before they
//! are evaluated, so every evaluated candidate is feasible.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schur::{random_schur, SchurParams};
use crate::vclass::{
    build_from_w, build_from_w1, conjectured_bound, membership_check_default, ClassParams,
    MemberFunction, MembershipStatus, MembershipVerdict, VClassError,
};

/// A report is a violation when the ratio exceeds `1 + VIOLATION_TOLERANCE`
/// on a validated member.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("coefficient index must be at least 2, got {0}")]
    IndexTooSmall(u32),
    #[error("need at least one Schur parameter and one restart")]
    EmptySearch,
    #[error(transparent)]
    Class(#[from] VClassError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Parameterization {
    #[value(name = "from-w")]
    FromW,
    #[value(name = "from-w1")]
    FromW1,
}

impl Parameterization {
    pub fn build(
        self,
        cp: ClassParams,
        params: &SchurParams,
        order: usize,
    ) -> Result<MemberFunction, VClassError> {
        match self {
            Self::FromW => build_from_w(cp, params, order),
            Self::FromW1 => build_from_w1(cp, params, order),
        }
    }
}

/// Knobs of a single conjecture search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub n: u32,
    pub param_count: usize,
    pub restarts: usize,
    pub budget: usize,
    pub seed: u64,
    pub parameterization: Parameterization,
    /// Series order of the reported member (raised to at least `n + 2`).
    pub order: usize,
    /// Samples per circle in the membership check.
    pub angles: usize,
}

impl SearchConfig {
    pub fn new(n: u32, seed: u64) -> Self {
        Self {
            n,
            param_count: 6,
            restarts: 64,
            budget: 10_000,
            seed,
            parameterization: Parameterization::FromW1,
            order: crate::series::DEFAULT_ORDER,
            angles: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: u32,
    pub p: f64,
    pub lambda: f64,
    pub parameterization: Parameterization,
    pub best_abs_coeff: f64,
    pub witness: SchurParams,
    pub bound: f64,
    pub ratio: f64,
    pub membership: MembershipVerdict,
    pub evals: usize,
    pub seed: u64,
    pub order: usize,
    pub violation: bool,
}

impl SearchReport {
    pub fn is_violation(&self) -> bool {
        self.ratio > 1.0 + VIOLATION_TOLERANCE && self.membership.status == MembershipStatus::Member
    }
}

/// Result of a bounded simplex minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Nelder–Mead with standard coefficients and radial projection of trial
/// points. When the simplex collapses before the budget is spent, it is
/// rebuilt around the incumbent with half the previous step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// Collapse test on the spread of simplex values.
    pub value_tolerance: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.25,
            min_step: 1e-9,
            value_tolerance: 1e-15,
        }
    }
}

impl NelderMead {
    pub fn minimize<F, P>(&self, mut objective: F, project: P, x0: &[f64], budget: usize) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
        P: Fn(&mut [f64]),
    {
        let dim = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = objective(x);
            if v.is_nan() { f64::INFINITY } else { v }
        };

        let mut best_x = x0.to_vec();
        project(&mut best_x);
        let mut best_v = eval(&best_x, &mut evals);
        let mut step = self.initial_step;

        while evals + dim < budget && step >= self.min_step {
            // Axis-aligned simplex around the incumbent.
            let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
            simplex.push((best_x.clone(), best_v));
            for i in 0..dim {
                let mut x = best_x.clone();
                x[i] += step;
                project(&mut x);
                let v = eval(&x, &mut evals);
                simplex.push((x, v));
            }

            while evals < budget {
                simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
                let spread = simplex[dim].1 - simplex[0].1;
                let size = simplex[1..]
                    .iter()
                    .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                    .fold(0.0, f64::max);
                if spread <= self.value_tolerance * (1.0 + simplex[0].1.abs()) || size < self.min_step
                {
                    break;
                }

                let centroid: Vec<f64> = (0..dim)
                    .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
                    .collect();
                let along = |t: f64| -> Vec<f64> {
                    let mut x: Vec<f64> = centroid
                        .iter()
                        .zip(&simplex[dim].0)
                        .map(|(c, w)| c + t * (c - w))
                        .collect();
                    project(&mut x);
                    x
                };

                let xr = along(self.reflection);
                let vr = eval(&xr, &mut evals);
                if vr < simplex[0].1 {
                    let xe = along(self.reflection * self.expansion);
                    let ve = eval(&xe, &mut evals);
                    simplex[dim] = if ve < vr { (xe, ve) } else { (xr, vr) };
                } else if vr < simplex[dim - 1].1 {
                    simplex[dim] = (xr, vr);
                } else {
                    let (xc, vc) = if vr < simplex[dim].1 {
                        let x = along(self.reflection * self.contraction);
                        let v = eval(&x, &mut evals);
                        (x, v)
                    } else {
                        let x = along(-self.contraction);
                        let v = eval(&x, &mut evals);
                        (x, v)
                    };
                    if vc < simplex[dim].1.min(vr) {
                        simplex[dim] = (xc, vc);
                    } else {
                        let anchor = simplex[0].0.clone();
                        for vertex in simplex[1..].iter_mut() {
                            if evals >= budget {
                                break;
                            }
                            let mut x: Vec<f64> = anchor
                                .iter()
                                .zip(&vertex.0)
                                .map(|(a, v)| a + self.shrink * (v - a))
                                .collect();
                            project(&mut x);
                            let v = eval(&x, &mut evals);
                            *vertex = (x, v);
                        }
                    }
                }
            }

            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best_v {
                best_x = simplex[0].0.clone();
                best_v = simplex[0].1;
            }
            step *= 0.5;
        }

        Minimum {
            x: best_x,
            value: best_v,
            evals,
        }
    }
}

fn project_to_polydisc(x: &mut [f64]) {
    for xy in x.chunks_exact_mut(2) {
        let r = xy[0].hypot(xy[1]);
        if r > 1.0 {
            xy[0] /= r;
            xy[1] /= r;
        }
    }
}

/// Order used while searching: just enough to read coefficient `n`
/// (the integral representation raises it further on its own).
fn working_order(n: u32) -> usize {
    (n as usize + 2).max(3)
}

fn abs_coeff(cp: ClassParams, cfg: &SearchConfig, coords: &[f64], order: usize) -> f64 {
    let params = SchurParams::from_coords_clamped(coords);
    match cfg.parameterization.build(cp, &params, order) {
        Ok(m) => m.coeff(cfg.n as usize).norm(),
        Err(e) => {
            debug!("objective evaluation failed: {e}");
            f64::NAN
        }
    }
}

fn witness_key(params: &SchurParams) -> String {
    serde_json::to_string(params).expect("finite parameters serialize")
}

struct Candidate {
    coords: Vec<f64>,
    value: f64,
    key: String,
}

impl Candidate {
    fn new(coords: Vec<f64>, value: f64) -> Self {
        let key = witness_key(&SchurParams::from_coords_clamped(&coords));
        Self { coords, value, key }
    }
}

/// Larger value first; ties broken by the lexicographic witness string.
fn rank(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    b.value.total_cmp(&a.value).then_with(|| a.key.cmp(&b.key))
}

/// Validated member plus its verdict, or `None` if the witness was
/// infeasible.
fn validate(
    cp: ClassParams,
    cfg: &SearchConfig,
    coords: &[f64],
) -> Result<(MemberFunction, MembershipVerdict), SearchError> {
    let params = SchurParams::from_coords_clamped(coords);
    let order = cfg.order.max(working_order(cfg.n));
    let m = cfg.parameterization.build(cp, &params, order)?;
    let verdict = membership_check_default(&m, cfg.angles)?;
    Ok((m, verdict))
}

fn accepted(cfg: &SearchConfig, verdict: &MembershipVerdict) -> bool {
    match cfg.parameterization {
        // The differential inequality holds by construction; only the pole
        // count can fail.
        Parameterization::FromW1 => verdict.status != MembershipStatus::ExtraPole,
        Parameterization::FromW => verdict.status == MembershipStatus::Member,
    }
}

/// Maximizes `|a_n|` over Schur generators with `cfg.param_count` parameters.
pub fn search(cp: ClassParams, cfg: &SearchConfig) -> Result<SearchReport, SearchError> {
    if cfg.n < 2 {
        return Err(SearchError::IndexTooSmall(cfg.n));
    }
    if cfg.param_count == 0 || cfg.restarts == 0 {
        return Err(SearchError::EmptySearch);
    }
    let nm = NelderMead::default();
    let order = working_order(cfg.n);
    let objective = |x: &[f64]| -abs_coeff(cp, cfg, x, order);

    // Half the budget explores from independent random starts, the rest
    // polishes the best feasible start.
    let explore_each = (cfg.budget / 2 / cfg.restarts).max(1);
    let mut starts: Vec<(Candidate, usize)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let x0 = random_schur(cfg.param_count - 1, cfg.seed.wrapping_add(i as u64)).to_coords();
            let min = nm.minimize(objective, project_to_polydisc, &x0, explore_each);
            (Candidate::new(min.x, -min.value), min.evals)
        })
        .collect();
    let mut evals: usize = starts.iter().map(|(_, e)| e).sum();
    starts.sort_by(|a, b| rank(&a.0, &b.0));

    let mut chosen: Option<(Candidate, MemberFunction, MembershipVerdict)> = None;
    let mut fallback: Option<(Candidate, MemberFunction, MembershipVerdict)> = None;
    for (cand, _) in starts {
        let (m, verdict) = validate(cp, cfg, &cand.coords)?;
        if accepted(cfg, &verdict) {
            chosen = Some((cand, m, verdict));
            break;
        }
        warn!(
            "discarding infeasible witness {} for p={} lambda={} n={}: {:?}",
            cand.key,
            cp.p(),
            cp.lambda(),
            cfg.n,
            verdict.status
        );
        if fallback.is_none() {
            fallback = Some((cand, m, verdict));
        }
    }

    let (best, member, verdict) = match chosen {
        Some((cand, m, v)) => {
            let remaining = cfg.budget.saturating_sub(evals);
            let polished = nm.minimize(objective, project_to_polydisc, &cand.coords, remaining);
            evals += polished.evals;
            let polished = Candidate::new(polished.x, -polished.value);
            if rank(&polished, &cand).is_lt() {
                let (pm, pv) = validate(cp, cfg, &polished.coords)?;
                if accepted(cfg, &pv) {
                    (polished, pm, pv)
                } else {
                    warn!("polished witness {} is infeasible, keeping the start", polished.key);
                    (cand, m, v)
                }
            } else {
                (cand, m, v)
            }
        }
        None => fallback.expect("at least one restart"),
    };

    let witness = SchurParams::from_coords_clamped(&best.coords);
    let best_abs_coeff = member.coeff(cfg.n as usize).norm();
    let bound = conjectured_bound(cp, cfg.n);
    let mut report = SearchReport {
        n: cfg.n,
        p: cp.p(),
        lambda: cp.lambda(),
        parameterization: cfg.parameterization,
        best_abs_coeff,
        witness,
        bound,
        ratio: best_abs_coeff / bound,
        membership: verdict,
        evals,
        seed: cfg.seed,
        order: member.order(),
        violation: false,
    };
    report.violation = report.is_violation();
    Ok(report)
}

/// Positional form of [`search`] with the default order and sampling.
#[allow(clippy::too_many_arguments)]
pub fn search_max_coeff(
    cp: ClassParams,
    n: u32,
    param_count: usize,
    restarts: usize,
    budget: usize,
    seed: u64,
    parameterization: Parameterization,
) -> Result<SearchReport, SearchError> {
    let cfg = SearchConfig {
        param_count,
        restarts,
        budget,
        parameterization,
        ..SearchConfig::new(n, seed)
    };
    search(cp, &cfg)
}
