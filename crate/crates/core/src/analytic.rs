//! Evaluation of the completed L-function Lambda(s) = B^s Gamma(s) L(E, s)
//! and its derivatives at s = 1 through the approximate functional equation
//!
//! ```text
//! Lambda(s) = sum_{n <= M} a_n [ x_n^{-s}    Gamma(s,     x_n * t0)
//!                              + eps x_n^{s-2} Gamma(2 - s, x_n / t0) ]
//! ```
//!
//! with x_n = n / B = 2 pi n / sqrt(N). Both halves are entire in s, the
//! split point t0 is arbitrary (a strong self-check: the value must not
//! depend on it), and differentiating term-wise at s = 1 turns the incomplete
//! gamma factors into the kernels E_j of [`crate::quad`].
//!
//! From the derivatives: the functional-equation sign, the analytic rank r,
//! and the Taylor coefficients a_r, a_{r+1} of L(E, s) itself.

use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::CoefficientTable;
use crate::error::{Error, Result};
use crate::quad::{log_power_exp_integral, upper_incomplete_gamma};
use crate::ratio::EULER_GAMMA;

/// Sign of the functional equation Lambda(s) = eps Lambda(2 - s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Parity of the derivative orders that survive: even for +1, odd for -1.
    pub fn surviving_parity(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("sign must be +1 or -1, got {other:?}"))),
        }
    }
}

/// Configuration of one completed-L evaluation.
#[derive(Debug, Clone)]
pub struct CompletedLParams {
    /// Conductor N.
    pub conductor: u64,
    /// B = sqrt(N) / (2 pi) for the degree-1 gamma factor.
    pub b: f64,
    /// Sign of the functional equation.
    pub epsilon: Sign,
    /// Split point of the approximate functional equation.
    pub t0: f64,
    /// Series truncation length.
    pub m: usize,
    /// Per-term absolute quadrature tolerance.
    pub quad_tol: f64,
    /// Bound on the omitted n > M tail.
    pub tail_error: f64,
}

impl CompletedLParams {
    pub fn new(
        conductor: u64,
        epsilon: Sign,
        t0: f64,
        m: usize,
        quad_tol: f64,
        tail_error: f64,
    ) -> Self {
        assert!(conductor >= 1);
        assert!((0.5..=2.0).contains(&t0), "t0 restricted to [0.5, 2]");
        assert!(m >= 1 && quad_tol > 0.0 && tail_error >= 0.0);
        let b = (conductor as f64).sqrt() / (2.0 * std::f64::consts::PI);
        CompletedLParams {
            conductor,
            b,
            epsilon,
            t0,
            m,
            quad_tol,
            tail_error,
        }
    }

    /// Total absolute error budget of one Lambda evaluation.
    pub fn error_budget(&self) -> f64 {
        self.tail_error + self.quad_tol * self.m as f64
    }
}

/// Lambda^{(k)}(1) for k = 0..=K with the error budget they carry.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaDerivatives {
    pub values: Vec<f64>,
    pub tail_error: f64,
    pub quad_error: f64,
}

/// Rank, Taylor coefficients and diagnostics extracted from the derivatives.
#[derive(Debug, Clone, Serialize)]
pub struct TaylorReport {
    pub rank: usize,
    pub a_r: f64,
    pub a_r1: f64,
    pub f1: f64,
    pub fprime1: f64,
    /// |Lambda^{(r+1)}(1)| / (f(1) r! |a_r|): how far the measured
    /// wrong-parity derivative is from the exact zero it should be.
    pub residual: f64,
}

/// The two halves of the split: Lambda(s) = H1 + eps * H2 for the given t0,
/// exposed separately so sign detection can evaluate both signs cheaply.
fn lambda_halves(
    conductor: u64,
    coeffs: &CoefficientTable,
    m: usize,
    s: f64,
    t0: f64,
    quad_tol: f64,
) -> Result<(f64, f64)> {
    assert!((0.0..=2.0).contains(&s), "s restricted to [0, 2]");
    let b = (conductor as f64).sqrt() / (2.0 * std::f64::consts::PI);
    let a = &coeffs.values()[..m];
    let per_term_tol = quad_tol;
    let h1 = try_chunked_sum(a, |i, &an| {
        if an == 0 {
            return Ok(0.0);
        }
        let x = (i + 1) as f64 / b;
        let g = upper_incomplete_gamma(s, x * t0, per_term_tol)?;
        Ok(an as f64 * (-s * x.ln()).exp() * g)
    })?;
    let h2 = try_chunked_sum(a, |i, &an| {
        if an == 0 {
            return Ok(0.0);
        }
        let x = (i + 1) as f64 / b;
        let g = upper_incomplete_gamma(2.0 - s, x / t0, per_term_tol)?;
        Ok(an as f64 * ((s - 2.0) * x.ln()).exp() * g)
    })?;
    Ok((h1, h2))
}

/// Deterministic chunked parallel sum: fixed-size chunks reduced
/// sequentially, chunk results combined in order, so the total is
/// independent of thread count.
fn try_chunked_sum<T: Sync, F: Fn(usize, &T) -> Result<f64> + Sync>(
    items: &[T],
    f: F,
) -> Result<f64> {
    const CHUNK: usize = 32;
    let partials: Vec<f64> = items
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut acc = 0.0;
            for (i, item) in chunk.iter().enumerate() {
                acc += f(ci * CHUNK + i, item)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(partials.iter().sum())
}

/// Lambda(s) for real s in [0, 2] under the given parameters.
pub fn lambda_at(params: &CompletedLParams, coeffs: &CoefficientTable, s: f64) -> Result<f64> {
    assert!(coeffs.len() >= params.m, "coefficient table shorter than M");
    let (h1, h2) = lambda_halves(
        params.conductor,
        coeffs,
        params.m,
        s,
        params.t0,
        params.quad_tol,
    )?;
    Ok(h1 + params.epsilon.as_f64() * h2)
}

/// All derivatives Lambda^{(k)}(1), k = 0..=k_max, by term-wise
/// differentiation of the split under the binomial expansion
///
///   d^k/ds^k [x^{-s} Gamma(s, y)]|_{s=1}
///       = x^{-1} sum_j C(k, j) (-ln x)^{k-j} E_j(y).
pub fn lambda_derivatives(
    params: &CompletedLParams,
    coeffs: &CoefficientTable,
    k_max: usize,
) -> Result<LambdaDerivatives> {
    assert!(k_max <= 6, "engine limit: derivative order <= 6");
    assert!(coeffs.len() >= params.m, "coefficient table shorter than M");
    let a = &coeffs.values()[..params.m];
    let b = params.b;
    let t0 = params.t0;
    let eps = params.epsilon.as_f64();
    let tol = params.quad_tol;

    // Per-term contribution to every k at once: the E_j tables dominate the
    // cost and are shared across k.
    let per_term = |i: usize, an: i64| -> Result<Vec<f64>> {
        let mut out = vec![0.0; k_max + 1];
        if an == 0 {
            return Ok(out);
        }
        let x = (i + 1) as f64 / b;
        let ln_x = x.ln();
        let mut e_lo = [0.0f64; 7]; // E_j(x t0)
        let mut e_hi = [0.0f64; 7]; // E_j(x / t0)
        for j in 0..=k_max {
            e_lo[j] = log_power_exp_integral(j as u32, x * t0, tol)?;
            e_hi[j] = if t0 == 1.0 {
                e_lo[j]
            } else {
                log_power_exp_integral(j as u32, x / t0, tol)?
            };
        }
        let weight = an as f64 / x;
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..=k {
                let c = binomial(k, j);
                let pow = (k - j) as i32;
                let first = (-ln_x).powi(pow) * e_lo[j];
                let second = eps * ln_x.powi(pow) * neg_one_pow(j) * e_hi[j];
                acc += c * (first + second);
            }
            *slot = weight * acc;
        }
        Ok(out)
    };

    const CHUNK: usize = 32;
    let partials: Vec<Vec<f64>> = a
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut acc = vec![0.0; k_max + 1];
            for (i, &an) in chunk.iter().enumerate() {
                let term = per_term(ci * CHUNK + i, an)?;
                for (slot, t) in acc.iter_mut().zip(term) {
                    *slot += t;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mut values = vec![0.0; k_max + 1];
    for part in partials {
        for (slot, v) in values.iter_mut().zip(part) {
            *slot += v;
        }
    }
    Ok(LambdaDerivatives {
        values,
        tail_error: params.tail_error,
        quad_error: params.quad_tol,
    })
}

/// Single derivative, as a thin wrapper over the bulk computation.
pub fn lambda_derivative(
    params: &CompletedLParams,
    coeffs: &CoefficientTable,
    k: usize,
) -> Result<f64> {
    Ok(lambda_derivatives(params, coeffs, k)?.values[k])
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut num = 1.0;
    for i in 0..k {
        num = num * (n - i) as f64 / (i + 1) as f64;
    }
    num
}

fn neg_one_pow(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagnostics of a sign determination.
#[derive(Debug, Clone, Serialize)]
pub struct SignDetection {
    pub sign: Sign,
    /// Worst relative t0-discrepancy assuming +1.
    pub discrepancy_plus: f64,
    /// Worst relative t0-discrepancy assuming -1.
    pub discrepancy_minus: f64,
    pub threshold: f64,
}

/// Determine the functional-equation sign from t0-invariance: evaluate
/// Lambda at s = 1.1 and s = 0.9 with t0 = 1.0 and t0 = 1.3; only the true
/// sign makes the two split points agree. Threshold: 10x the error budget.
pub fn detect_sign(
    conductor: u64,
    coeffs: &CoefficientTable,
    m: usize,
    quad_tol: f64,
    tail_error: f64,
) -> Result<SignDetection> {
    assert!(coeffs.len() >= m, "coefficient table shorter than M");
    let budget = tail_error + quad_tol * m as f64;
    let threshold = 10.0 * budget;
    let s_points = [1.1, 0.9];
    let t0s = [1.0, 1.3];
    let mut halves = Vec::new(); // (s, t0) -> (h1, h2)
    for &s in &s_points {
        for &t0 in &t0s {
            halves.push(lambda_halves(conductor, coeffs, m, s, t0, quad_tol)?);
        }
    }
    let worst = |eps: f64| -> f64 {
        let mut worst = 0.0f64;
        for si in 0..s_points.len() {
            let (h1a, h2a) = halves[si * 2];
            let (h1b, h2b) = halves[si * 2 + 1];
            let va = h1a + eps * h2a;
            let vb = h1b + eps * h2b;
            let scale = va.abs().max(vb.abs()).max(1.0);
            worst = worst.max((va - vb).abs() / scale);
        }
        worst
    };
    let d_plus = worst(1.0);
    let d_minus = worst(-1.0);
    let plus_ok = d_plus <= threshold;
    let minus_ok = d_minus <= threshold;
    match (plus_ok, minus_ok) {
        (true, false) => Ok(SignDetection {
            sign: Sign::Plus,
            discrepancy_plus: d_plus,
            discrepancy_minus: d_minus,
            threshold,
        }),
        (false, true) => Ok(SignDetection {
            sign: Sign::Minus,
            discrepancy_plus: d_plus,
            discrepancy_minus: d_minus,
            threshold,
        }),
        _ => Err(Error::AmbiguousSign {
            plus: d_plus,
            minus: d_minus,
            threshold,
        }),
    }
}

/// Default relative threshold for rank detection.
pub const RANK_SCALE_TOL: f64 = 1e-5;

/// Smallest parity-consistent k with |Lambda^{(k)}(1)| above
/// scale_tol * max(1, max_k |Lambda^{(k)}(1)|).
pub fn analytic_rank(
    derivs: &LambdaDerivatives,
    epsilon: Sign,
    scale_tol: f64,
) -> Result<usize> {
    let max_abs = derivs
        .values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let threshold = scale_tol * max_abs.max(1.0);
    let start = epsilon.surviving_parity();
    let mut k = start;
    while k < derivs.values.len() {
        if derivs.values[k].abs() > threshold {
            return Ok(k);
        }
        k += 2;
    }
    Err(Error::RankNotResolved {
        max_order: derivs.values.len() - 1,
    })
}

/// f(1) = B and f'(1) = B (ln B - n gamma) for f(s) = B^s Gamma(s)^n.
pub fn f_and_fprime(b: f64, n: u32) -> (f64, f64) {
    assert!(b > 0.0 && n >= 1);
    (b, b * (b.ln() - n as f64 * EULER_GAMMA))
}

/// Taylor coefficients of L itself from the Lambda derivatives:
///
///   a_r     = Lambda^{(r)}(1) / (r! f(1)),
///   a_{r+1} = (Lambda^{(r+1)}(1) - (r+1) f'(1) r! a_r) / (f(1) (r+1)!).
///
/// The measured Lambda^{(r+1)}(1) vanishes by parity; keeping it in the
/// formula instead of assuming zero turns it into the residual diagnostic.
pub fn taylor_of_l(
    derivs: &LambdaDerivatives,
    f1: f64,
    fprime1: f64,
    rank: usize,
) -> Result<TaylorReport> {
    if rank + 1 >= derivs.values.len() {
        return Err(Error::InvalidRequest(format!(
            "need derivatives up to order {} for rank {rank}",
            rank + 1
        )));
    }
    let r_fact = factorial(rank);
    let r1_fact = factorial(rank + 1);
    let a_r = derivs.values[rank] / (r_fact * f1);
    if a_r == 0.0 {
        return Err(Error::RankNotResolved {
            max_order: derivs.values.len() - 1,
        });
    }
    let a_r1 = (derivs.values[rank + 1] - (rank + 1) as f64 * fprime1 * r_fact * a_r)
        / (f1 * r1_fact);
    let residual = derivs.values[rank + 1].abs() / (f1 * r_fact * a_r.abs());
    Ok(TaylorReport {
        rank,
        a_r,
        a_r1,
        f1,
        fprime1,
        residual,
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
