//! Embedded self-test: the invariant suites behind `ltaylor selftest`.
//!
//! Each suite checks one leg of the numeric stack over the fixture catalog.
//! The configuration exposes two deliberate injection points — the gamma
//! constant and a forced functional-equation sign — so the canary tests can
//! verify that a perturbed build actually fails.

use rayon::prelude::*;

use crate::analytic::{
    analytic_rank, detect_sign, f_and_fprime, lambda_at, lambda_derivatives, taylor_of_l,
    CompletedLParams, LambdaDerivatives, Sign, TaylorReport, RANK_SCALE_TOL,
};
use crate::coeffs::{choose_truncation, curve_coefficients, truncation_tail_bound, CoefficientTable};
use crate::curve::conductor_with_local_data;
use crate::error::Result;
use crate::fixtures::{FixtureCurve, CATALOG};
use crate::pipeline::{DEFAULT_QUAD_TOL, DEFAULT_TAIL_TARGET};
use crate::quad::log_power_exp_integral;
use crate::ratio::{predicted_ratio, verify_ratio, FieldInvariants, EULER_GAMMA, PI_SQ_OVER_6};

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    /// Euler gamma fed to the ratio formula (perturb to test the canary).
    pub gamma: f64,
    /// Force the functional-equation sign instead of detecting it.
    pub force_epsilon: Option<Sign>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            gamma: EULER_GAMMA,
            force_epsilon: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub fn all_pass(results: &[SuiteResult]) -> bool {
    results.iter().all(|r| r.pass)
}

struct FixtureRun {
    fx: &'static FixtureCurve,
    n: u64,
    m: usize,
    coeffs: CoefficientTable,
    detected: Result<Sign>,
    params: CompletedLParams,
    derivs: LambdaDerivatives,
    derivs_t0_alt: LambdaDerivatives,
    rank: Result<usize>,
    taylor: Option<TaylorReport>,
}

fn run_fixture(fx: &'static FixtureCurve, config: &SelftestConfig) -> Result<FixtureRun> {
    let e = fx.curve();
    let (cond, locals) = conductor_with_local_data(&e)?;
    let n = cond.to_u64().expect("fixture conductor fits u64");
    let m = choose_truncation(n, DEFAULT_TAIL_TARGET, 1.0);
    let coeffs = curve_coefficients(&e, &locals, m)?;
    let tail = truncation_tail_bound(n, m, 1.0);
    let detected = detect_sign(n, &coeffs, m, DEFAULT_QUAD_TOL, tail).map(|d| d.sign);
    let epsilon = match config.force_epsilon {
        Some(s) => s,
        None => *detected.as_ref().unwrap_or(&Sign::Plus),
    };
    let params = CompletedLParams::new(n, epsilon, 1.0, m, DEFAULT_QUAD_TOL, tail);
    let derivs = lambda_derivatives(&params, &coeffs, 6)?;

    let m_alt = choose_truncation(n, DEFAULT_TAIL_TARGET, 1.25);
    let coeffs_alt;
    let coeffs_alt_ref = if m_alt <= m {
        &coeffs
    } else {
        coeffs_alt = curve_coefficients(&e, &locals, m_alt)?;
        &coeffs_alt
    };
    let tail_alt = truncation_tail_bound(n, m_alt, 1.25);
    let params_alt = CompletedLParams::new(n, epsilon, 1.25, m_alt, DEFAULT_QUAD_TOL, tail_alt);
    let derivs_t0_alt = lambda_derivatives(&params_alt, coeffs_alt_ref, 4)?;

    let rank = analytic_rank(&derivs, epsilon, RANK_SCALE_TOL);
    let taylor = match &rank {
        Ok(r) => {
            let (f1, fp1) = f_and_fprime(params.b, 1);
            taylor_of_l(&derivs, f1, fp1, *r).ok()
        }
        Err(_) => None,
    };
    Ok(FixtureRun {
        fx,
        n,
        m,
        coeffs,
        detected,
        params,
        derivs,
        derivs_t0_alt,
        rank,
        taylor,
    })
}

/// Run every suite and return the scoreboard.
pub fn run_selftest(config: &SelftestConfig) -> Vec<SuiteResult> {
    let mut results = Vec::new();

    results.push(suite_constants());
    results.push(suite_conductors());

    let runs: Vec<FixtureRun> = CATALOG
        .par_iter()
        .map(|fx| run_fixture(fx, config).unwrap_or_else(|e| panic!("{}: {e}", fx.label)))
        .collect();

    results.push(suite_coefficients(&runs));
    results.push(suite_quadrature());
    results.push(suite_afe_symmetry(&runs));
    results.push(suite_t0_invariance(&runs));
    results.push(suite_parity(&runs));
    results.push(suite_sign_and_rank(&runs));
    results.push(suite_special_values(&runs));
    results.push(suite_ratio_residual(&runs, config));
    results.push(suite_cross_module(config));
    results
}

fn suite_constants() -> SuiteResult {
    let dev = crate::ratio::validate_constants();
    SuiteResult {
        name: "constants",
        pass: dev < 1e-10,
        detail: format!("worst deviation from recomputation {dev:.2e}"),
    }
}

fn suite_conductors() -> SuiteResult {
    let mut bad = Vec::new();
    for fx in CATALOG {
        match conductor_with_local_data(&fx.curve()) {
            Ok((cond, _)) => {
                if cond.to_u64() != Some(fx.conductor) {
                    bad.push(format!("{}: got {}", fx.label, cond.value));
                }
            }
            Err(e) => bad.push(format!("{}: {e}", fx.label)),
        }
    }
    SuiteResult {
        name: "conductors",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} fixtures match", CATALOG.len())
        } else {
            bad.join("; ")
        },
    }
}

fn suite_coefficients(runs: &[FixtureRun]) -> SuiteResult {
    let mut issues = Vec::new();
    // 11a prefix against the level-11 newform.
    if let Some(run) = runs.iter().find(|r| r.fx.label == "11a") {
        if run.coeffs.values()[..5] != [1, -2, -1, 2, 1] {
            issues.push("11a q-expansion prefix mismatch".to_string());
        }
    }
    // Hasse bound and spot multiplicativity across the catalog.
    for run in runs {
        for &p in crate::arith::primes_up_to(run.m).iter() {
            let ap = run.coeffs.get(p as usize);
            if ap * ap > 4 * p as i64 {
                issues.push(format!("{}: Hasse violated at {p}", run.fx.label));
            }
        }
        let m = run.m;
        for (u, v) in [(2usize, 3usize), (3, 5), (4, 9), (5, 8), (7, 10)] {
            if u * v <= m && crate::arith::gcd_u64(u as u64, v as u64) == 1 {
                let (au, av, auv) = (
                    run.coeffs.get(u),
                    run.coeffs.get(v),
                    run.coeffs.get(u * v),
                );
                if auv != au * av {
                    issues.push(format!("{}: a_{} != a_{u} a_{v}", run.fx.label, u * v));
                }
            }
        }
    }
    SuiteResult {
        name: "coefficients",
        pass: issues.is_empty(),
        detail: if issues.is_empty() {
            "newform prefix, Hasse bound, multiplicativity".into()
        } else {
            issues.join("; ")
        },
    }
}

fn suite_quadrature() -> SuiteResult {
    let mut worst = 0.0f64;
    let e1 = log_power_exp_integral(1, 0.0, 1e-12).unwrap();
    worst = worst.max((e1 + EULER_GAMMA).abs());
    let e2 = log_power_exp_integral(2, 0.0, 1e-12).unwrap();
    worst = worst.max((e2 - (EULER_GAMMA * EULER_GAMMA + PI_SQ_OVER_6)).abs());
    for y in [0.03, 0.9, 4.0, 17.0] {
        let e0 = log_power_exp_integral(0, y, 1e-12).unwrap();
        worst = worst.max((e0 - (-y).exp()).abs());
    }
    SuiteResult {
        name: "quadrature",
        pass: worst < 1e-10,
        detail: format!("kernel limits worst abs error {worst:.2e}"),
    }
}

fn suite_afe_symmetry(runs: &[FixtureRun]) -> SuiteResult {
    let worst: f64 = runs
        .par_iter()
        .map(|run| {
            let mut w = 0.0f64;
            for t in [0.05, 0.1, 0.2, 0.3] {
                let plus = lambda_at(&run.params, &run.coeffs, 1.0 + t).unwrap();
                let minus = lambda_at(&run.params, &run.coeffs, 1.0 - t).unwrap();
                let resid =
                    (plus - run.params.epsilon.as_f64() * minus).abs() / plus.abs().max(1.0);
                w = w.max(resid);
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    SuiteResult {
        name: "afe-symmetry",
        pass: worst <= 1e-9,
        detail: format!("worst |Λ(1+t) − εΛ(1−t)| (rel) = {worst:.2e}"),
    }
}

fn suite_t0_invariance(runs: &[FixtureRun]) -> SuiteResult {
    let mut worst = 0.0f64;
    let mut where_ = "";
    for run in runs {
        for k in 0..=4usize {
            let dev = (run.derivs.values[k] - run.derivs_t0_alt.values[k]).abs()
                / run.derivs.values[k].abs().max(1.0);
            if dev > worst {
                worst = dev;
                where_ = run.fx.label;
            }
        }
    }
    SuiteResult {
        name: "t0-invariance",
        pass: worst <= 1e-8,
        detail: format!("worst rel deviation t0=1.0 vs 1.25: {worst:.2e} ({where_})"),
    }
}

fn suite_parity(runs: &[FixtureRun]) -> SuiteResult {
    // At t0 = 1 the wrong-parity terms cancel identically whatever sign is
    // assumed, so the t0 = 1.25 derivatives are checked as well: there the
    // cancellation only happens for the true sign.
    let mut worst = 0.0f64;
    let mut where_ = "";
    for run in runs {
        let dead = 1 - run.params.epsilon.surviving_parity();
        for values in [&run.derivs.values, &run.derivs_t0_alt.values] {
            let mut k = dead;
            while k < values.len() {
                let v = values[k].abs();
                if v > worst {
                    worst = v;
                    where_ = run.fx.label;
                }
                k += 2;
            }
        }
    }
    SuiteResult {
        name: "parity",
        pass: worst <= 1e-8,
        detail: format!("largest wrong-parity |Λ^(k)(1)| = {worst:.2e} ({where_})"),
    }
}

fn suite_sign_and_rank(runs: &[FixtureRun]) -> SuiteResult {
    let mut bad = Vec::new();
    for run in runs {
        match &run.detected {
            Ok(sign) => {
                if sign.as_i8() != run.fx.root_number {
                    bad.push(format!("{}: sign {}", run.fx.label, sign.as_i8()));
                }
            }
            Err(e) => bad.push(format!("{}: {e}", run.fx.label)),
        }
        match &run.rank {
            Ok(r) => {
                if *r as u32 != run.fx.rank {
                    bad.push(format!("{}: rank {r}", run.fx.label));
                }
            }
            Err(e) => bad.push(format!("{}: {e}", run.fx.label)),
        }
    }
    SuiteResult {
        name: "sign-and-rank",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} fixtures: root numbers and ranks recovered", runs.len())
        } else {
            bad.join("; ")
        },
    }
}

fn suite_special_values(runs: &[FixtureRun]) -> SuiteResult {
    let mut bad = Vec::new();
    let mut checked = 0;
    for run in runs {
        let (Some(published), Some(taylor)) = (run.fx.leading, run.taylor.as_ref()) else {
            continue;
        };
        checked += 1;
        let dev = (taylor.a_r - published).abs();
        if dev > run.fx.leading_tol {
            bad.push(format!(
                "{}: a_r = {} vs published {published} (dev {dev:.2e})",
                run.fx.label, taylor.a_r
            ));
        }
    }
    SuiteResult {
        name: "special-values",
        pass: bad.is_empty() && checked >= 2,
        detail: if bad.is_empty() {
            format!("{checked} published leading coefficients matched")
        } else {
            bad.join("; ")
        },
    }
}

fn suite_ratio_residual(runs: &[FixtureRun], config: &SelftestConfig) -> SuiteResult {
    let mut worst = 0.0f64;
    let mut where_ = "";
    let mut bad = Vec::new();
    for run in runs {
        let Some(taylor) = run.taylor.as_ref() else {
            bad.push(format!("{}: no Taylor data", run.fx.label));
            continue;
        };
        let inv = FieldInvariants {
            euler_gamma: config.gamma,
            ..FieldInvariants::rational(run.n)
        };
        let check = verify_ratio(taylor.a_r, taylor.a_r1, &inv, 1e-6);
        let resid = if check.rho.abs() < 1e-3 {
            check.abs_residual
        } else {
            check.rel_residual
        };
        if resid > worst {
            worst = resid;
            where_ = run.fx.label;
        }
        if !check.pass {
            bad.push(format!("{}: residual {resid:.2e}", run.fx.label));
        }
    }
    SuiteResult {
        name: "ratio-residual",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("worst residual {worst:.2e} ({where_}) at tol 1e-6")
        } else {
            bad.join("; ")
        },
    }
}

fn suite_cross_module(config: &SelftestConfig) -> SuiteResult {
    // predicted_ratio must equal -f'(1)/f(1) to machine precision.
    let mut worst = 0.0f64;
    let mut state = 0xc0ffee123456789u64;
    for _ in 0..100 {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let n = 1 + state % 1_000_000;
        let inv = FieldInvariants {
            euler_gamma: config.gamma,
            ..FieldInvariants::rational(n)
        };
        let rho = predicted_ratio(&inv);
        let b = (n as f64).sqrt() / (2.0 * std::f64::consts::PI);
        let (f1, fp1) = f_and_fprime(b, 1);
        let dev = (rho - (-fp1 / f1)).abs() / rho.abs().max(1.0);
        worst = worst.max(dev);
    }
    SuiteResult {
        name: "cross-module",
        pass: worst < 1e-13,
        detail: format!("worst |ρ + f'(1)/f(1)| (rel) over 100 N: {worst:.2e}"),
    }
}
