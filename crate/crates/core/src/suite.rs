//! Named invariant checks run by the `verify` command.
//!
//! Each check reports the worst observed margin, where the margin of a single
//! case is `tolerance − error` (or `bound − value`); a check passes when its
//! worst margin is nonnegative.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{monotone_check, verify_majorant_bound_with, PolyCase, MajorantOptions};
use crate::schur::{
    random_schur_with, schur_coeff_margins, schur_to_series, schur_validate, SchurParams,
};
use crate::series::PowerSeries;
use crate::vclass::{
    a2_region_margin, build_from_w, build_from_w1, closed_form_a3, closed_form_a4,
    closed_form_a5, conjectured_bound, diff_bound_check, extremal_coeffs, extremal_member,
    membership_check, membership_check_default, nonsharp_bound, product_identity_error,
    rogosinski_l2_check, u_residual, ClassParams, MembershipStatus,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Sizes and grids for a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub p_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub n_max: u32,
    pub order: usize,
    pub cases: usize,
    pub sweep_tuples: usize,
    pub seed: u64,
    /// Multiplies every tolerance; 0 turns the suite into an exact-equality
    /// harness.
    pub tolerance_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            p_grid: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            lambda_grid: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            n_max: 20,
            order: crate::series::DEFAULT_ORDER,
            cases: 200,
            sweep_tuples: 10_000,
            seed: 0,
            tolerance_scale: 1.0,
        }
    }
}

struct Check {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
    detail: Option<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: f64::INFINITY,
            cases: 0,
            detail: None,
        }
    }

    /// Records one case whose error must not exceed the tolerance.
    fn error(&mut self, err: f64, what: impl FnOnce() -> String) {
        self.margin(self.tolerance - err, what);
    }

    fn margin(&mut self, margin: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if margin < self.worst {
            self.worst = margin;
            if margin < 0.0 {
                self.detail = Some(what());
            }
        }
    }

    fn fail(&mut self, msg: String) {
        self.cases += 1;
        self.worst = f64::NEG_INFINITY;
        self.detail = Some(msg);
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.worst >= 0.0,
            worst_margin: self.worst,
            tolerance: self.tolerance,
            cases: self.cases,
            detail: self.detail,
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `p ∈ [0.05, 0.95]`, `λ ∈ (0, 1]`, up to `max_m + 1` Schur parameters.
fn random_case(rng: &mut ChaCha8Rng, max_m: usize) -> (ClassParams, SchurParams) {
    let p = 0.05 + 0.9 * rng.gen::<f64>();
    let lambda = 1.0 - rng.gen::<f64>();
    let m = rng.gen_range(0..=max_m);
    let cp = ClassParams::new(p, lambda).expect("sampled in range");
    (cp, random_schur_with(m, rng))
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let s = cfg.tolerance_scale;
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let needed = cfg.n_max as usize + 2;
    let mut guard = Check::new("truncation_order", 0.0);
    guard.margin(cfg.order as f64 - needed as f64, || {
        format!(
            "series order {} cannot resolve coefficient a_{} and its successor; need order >= {needed}",
            cfg.order,
            cfg.n_max
        )
    });
    let order_ok = guard.worst >= 0.0;
    checks.push(guard.finish());

    // series
    let mut recip = Check::new("series.reciprocal_identity", 1e-12 * s);
    let mut comm = Check::new("series.mul_commutative", 1e-12 * s);
    let mut calc = Check::new("series.derivative_antiderivative", 1e-12 * s);
    for _ in 0..cfg.cases {
        let n = rng.gen_range(1..=64);
        let ratio = 0.5 * rng.gen::<f64>();
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        coeffs.extend((1..n).map(|k| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                * (-ratio * 0.5f64.powi(k as i32 - 1))
        }));
        let a = PowerSeries::new(coeffs).expect("finite");
        let b = PowerSeries::new(
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)))
                .collect(),
        )
        .expect("finite");
        let inv = a.reciprocal().expect("unit constant term");
        let err = a.mul(&inv).unwrap().max_abs_diff(&PowerSeries::one(n)).unwrap();
        recip.error(err, || format!("order {n}: |a·(1/a) − 1| = {err:e}"));
        let ab = a.mul(&b).unwrap();
        let scale = ab.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
        let err = ab.max_abs_diff(&b.mul(&a).unwrap()).unwrap() / scale;
        comm.error(err, || format!("order {n}: ab − ba = {err:e}"));
        let back = b.antiderivative().derivative();
        let err = (0..n.saturating_sub(1))
            .map(|k| rel(back.coeff(k), b.coeff(k)))
            .fold(0.0, f64::max);
        calc.error(err, || format!("order {n}: d/dz ∫ deviates by {err:e}"));
    }
    checks.extend([recip.finish(), comm.finish(), calc.finish()]);

    // schur
    let mut ineq = Check::new("schur.coeff_inequality", 1e-10 * s);
    let mut sup5 = Check::new("schur.sup_norm_r0.5", 1e-8 * s);
    let mut sup9 = Check::new("schur.sup_norm_r0.9", 1e-2 * s);
    let mut c0 = Check::new("schur.c0_equals_gamma0", 0.0);
    for _ in 0..cfg.cases {
        let m = rng.gen_range(0..=6);
        let params = random_schur_with(m, &mut rng);
        let w = schur_to_series(&params, 64).expect("valid parameters");
        let worst = schur_coeff_margins(&w).into_iter().fold(f64::INFINITY, f64::min);
        ineq.margin(worst + ineq.tolerance, || format!("{params:?}: margin {worst:e}"));
        let v = schur_validate(&w, &[0.5], 64) - 1.0;
        sup5.error(v, || format!("{params:?}: sup at 0.5 exceeds 1 by {v:e}"));
        let v = schur_validate(&w, &[0.9], 64) - 1.0;
        sup9.error(v, || format!("{params:?}: sup at 0.9 exceeds 1 by {v:e}"));
        let d = (w.coeff(0) - params.gammas()[0]).norm();
        c0.error(d, || format!("{params:?}: c0 differs by {d:e}"));
    }
    checks.extend([ineq.finish(), sup5.finish(), sup9.finish(), c0.finish()]);

    // grid checks on the extremal
    let grid: Vec<ClassParams> = cfg
        .p_grid
        .iter()
        .flat_map(|&p| cfg.lambda_grid.iter().map(move |&l| (p, l)))
        .filter_map(|(p, l)| ClassParams::new(p, l).ok())
        .collect();
    let mut sat = Check::new("vclass.extremal_saturation", 1e-12 * s);
    let mut ext_member = Check::new("vclass.extremal_membership", 0.0);
    let mut nonsharp = Check::new("vclass.nonsharp_dominates_extremal", 1e-12 * s);
    if order_ok {
        for &cp in &grid {
            match extremal_member(cp, cfg.order) {
                Ok(m) => {
                    for n in 1..=cfg.n_max {
                        let bound = conjectured_bound(cp, n);
                        let got = m.coeff(n as usize);
                        let err = rel(got, bound.into()).max(
                            (extremal_coeffs(cp, n) - bound).abs() / bound,
                        );
                        sat.error(err, || format!("p={} λ={} n={n}: rel err {err:e}", cp.p(), cp.lambda()));
                        if n >= 3 {
                            let slack = (nonsharp_bound(cp, n) - got.norm()) / bound;
                            nonsharp.margin(slack + nonsharp.tolerance, || {
                                format!("p={} λ={} n={n}: nonsharp below |a_n| by {:e}", cp.p(), cp.lambda(), -slack)
                            });
                        }
                    }
                    match membership_check(&m, 0.99, 512) {
                        Ok(v) => ext_member.margin(
                            if v.status == MembershipStatus::Member { v.margin } else { -1.0 },
                            || format!("p={} λ={}: {:?}", cp.p(), cp.lambda(), v),
                        ),
                        Err(e) => ext_member.fail(e.to_string()),
                    }
                }
                Err(e) => sat.fail(e.to_string()),
            }
        }
    } else {
        for c in [&mut sat, &mut ext_member, &mut nonsharp] {
            c.fail("skipped: series order too small for the requested n range".into());
        }
    }
    checks.extend([sat.finish(), ext_member.finish(), nonsharp.finish()]);

    // closed forms, identities and the Cauchy–Schwarz bounds on random members
    let mut closed = Check::new("vclass.closed_form_equivalence", 1e-10 * s);
    let mut product = Check::new("vclass.product_identity", 1e-10 * s);
    let mut rogo = Check::new("vclass.rogosinski_l2", 1e-10 * s);
    let mut rogo_eq = Check::new("vclass.rogosinski_l2_equality", 1e-12 * s);
    for _ in 0..cfg.cases {
        let (cp, params) = random_case(&mut rng, 4);
        let Ok(m) = build_from_w(cp, &params, 16) else {
            closed.fail(format!("build_from_w failed for {params:?}"));
            continue;
        };
        let w = schur_to_series(&params, 16).expect("valid parameters");
        let c = |k| w.coeff(k);
        let pairs = [
            (m.coeff(3), closed_form_a3(cp, c(0), c(1))),
            (m.coeff(4), closed_form_a4(cp, c(0), c(1), c(2))),
            (m.coeff(5), closed_form_a5(cp, c(0), c(1), c(2), c(3))),
        ];
        for (k, (series, formula)) in pairs.into_iter().enumerate() {
            let err = rel(series, formula);
            closed.error(err, || format!("a_{} at p={} λ={}: {err:e}", k + 3, cp.p(), cp.lambda()));
        }
        let err = product_identity_error(&m);
        product.error(err, || format!("p={} λ={}: G·f − z = {err:e}", cp.p(), cp.lambda()));
        let n = rng.gen_range(2..=12);
        match rogosinski_l2_check(cp, &params, n) {
            Ok((lhs, rhs)) => rogo.margin(rhs - lhs + rogo.tolerance, || {
                format!("p={} λ={} n={n}: lhs {lhs} > rhs {rhs}", cp.p(), cp.lambda())
            }),
            Err(e) => rogo.fail(e.to_string()),
        }
        let one = SchurParams::constant(Complex64::new(1.0, 0.0)).expect("unit constant");
        match rogosinski_l2_check(cp, &one, n) {
            Ok((lhs, rhs)) => rogo_eq.error((lhs - rhs).abs(), || format!("w ≡ 1: {lhs} vs {rhs}")),
            Err(e) => rogo_eq.fail(e.to_string()),
        }
    }
    checks.extend([closed.finish(), product.finish(), rogo.finish(), rogo_eq.finish()]);

    let mut uid = Check::new("vclass.u_identity", 1e-12 * s);
    let mut pole = Check::new("vclass.pole_condition", 1e-10 * s);
    let mut a2 = Check::new("vclass.a2_region", 1e-9 * s);
    let mut diff = Check::new("vclass.diff_bound", 1e-9 * s);
    let mut validated = 0usize;
    for _ in 0..cfg.cases {
        let (cp, params) = random_case(&mut rng, 4);
        let m = match build_from_w1(cp, &params, cfg.order.max(3)) {
            Ok(m) => m,
            Err(e) => {
                uid.fail(e.to_string());
                continue;
            }
        };
        let w1 = schur_to_series(&params, m.order()).expect("valid parameters");
        let expect = w1.shift_up().shift_up().scale((-cp.lambda()).into());
        let err = u_residual(&m).max_abs_diff(&expect).expect("same order");
        uid.error(err, || format!("p={} λ={}: {err:e}", cp.p(), cp.lambda()));
        let gp = m.g.eval(Complex64::new(cp.p(), 0.0)).norm();
        pole.error(gp, || format!("p={} λ={}: |G(p)| = {gp:e}", cp.p(), cp.lambda()));
        match membership_check_default(&m, 128) {
            Ok(v) if v.status == MembershipStatus::Member => {
                validated += 1;
                let margin = a2_region_margin(&m);
                a2.margin(margin + a2.tolerance, || {
                    format!("p={} λ={}: |a2 − 1/p| exceeds λp by {:e}", cp.p(), cp.lambda(), -margin)
                });
                let n_max = 10.min(m.order() - 2);
                match diff_bound_check(&m, n_max) {
                    Ok(r) => diff.error(r - 1.0, || format!("p={} λ={}: ratio {r}", cp.p(), cp.lambda())),
                    Err(e) => diff.fail(e.to_string()),
                }
            }
            Ok(_) => {}
            Err(e) => a2.fail(e.to_string()),
        }
    }
    if validated == 0 && cfg.cases > 0 {
        a2.fail("no validated members".into());
    }
    checks.extend([uid.finish(), pole.finish(), a2.finish(), diff.finish()]);

    // majorant polynomials on the proven ranges
    let mut mono = Check::new("bounds.monotone", 1e-12 * s);
    let mut at_one = Check::new("bounds.poly_at_one", 1e-12 * s);
    let mut sweep = Check::new("bounds.majorant_sweep", 1e-9 * s);
    for case in PolyCase::all() {
        let mut ps: Vec<f64> = cfg
            .p_grid
            .iter()
            .copied()
            .filter(|&p| p > 0.0 && case.in_proven_range(p))
            .collect();
        ps.push(case.threshold());
        for &p in &ps {
            for &l in &cfg.lambda_grid {
                let Ok(cp) = ClassParams::new(p, l) else { continue };
                let r = monotone_check(case, cp, 1000);
                mono.margin(r.min_derivative + mono.tolerance, || {
                    format!("n={} p={p} λ={l}: min derivative {:e}", case.n(), r.min_derivative)
                });
                let opts = MajorantOptions {
                    tuples: cfg.sweep_tuples,
                    seed: cfg.seed.wrapping_add(case.n() as u64),
                    ..MajorantOptions::default()
                };
                let v = verify_majorant_bound_with(cp, case.n(), opts).expect("supported index");
                at_one.error(v.value_error, || {
                    format!("n={} p={p} λ={l}: poly(1) off by {:e}", case.n(), v.value_error)
                });
                if v.sweep_respects_constraint {
                    sweep.margin(sweep.tolerance - v.sweep_max_excess, || {
                        format!("n={} p={p} λ={l}: sweep exceeds bound by {:e}", case.n(), v.sweep_max_excess)
                    });
                } else {
                    sweep.fail(format!("n={} p={p} λ={l}: sweep left the constraint set", case.n()));
                }
            }
        }
    }
    checks.extend([mono.finish(), at_one.finish(), sweep.finish()]);

    // pointwise U_f check against the definition, inside |z| < p
    let mut pointwise = Check::new("vclass.u_residual_pointwise", 1e-9 * s);
    for _ in 0..cfg.cases.min(50) {
        let (cp, params) = random_case(&mut rng, 3);
        let Ok(m) = build_from_w(cp, &params, 64) else { continue };
        let u = u_residual(&m);
        let fp = m.f.derivative();
        for k in 0..8 {
            let z = Complex64::from_polar(0.3 * cp.p(), TAU * k as f64 / 8.0);
            let fz = m.f.eval(z);
            let direct = (z / fz).powi(2) * fp.eval(z) - 1.0;
            let err = (direct - u.eval(z)).norm();
            pointwise.error(err, || format!("p={} z={z}: {err:e}", cp.p()));
        }
    }
    checks.push(pointwise.finish());

    SuiteReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
