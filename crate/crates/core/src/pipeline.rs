//! End-to-end analysis: curve or coefficient file in, JSON-ready report out,
//! plus the batch runner used by the CLI.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analytic::{
    analytic_rank, detect_sign, f_and_fprime, lambda_derivatives, taylor_of_l, CompletedLParams,
    Sign, SignDetection, TaylorReport, RANK_SCALE_TOL,
};
use crate::coeffs::{
    choose_truncation, curve_coefficients, truncation_tail_bound, CoeffSource, CoefficientTable,
};
use crate::curve::{conductor_with_local_data, minimal_model, parse_curve, LocalData};
use crate::error::{Error, Result};
use crate::ratio::{verify_ratio, FieldInvariants, RatioCheck};

/// Default absolute target for the omitted series tail.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-12;
/// Default per-term quadrature tolerance.
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;
/// Default tolerance of the ratio verdict.
pub const DEFAULT_RATIO_TOL: f64 = 1e-6;

/// What to analyze and how.
#[derive(Debug, Clone)]
pub struct AnalysisRequest {
    /// "a1,a2,a3,a4,a6".
    pub curve: Option<String>,
    /// File with one integer a_n per line (line number = n).
    pub coeff_file: Option<PathBuf>,
    pub conductor_override: Option<u64>,
    pub sign_override: Option<Sign>,
    /// Significant digits in the JSON output.
    pub digits: usize,
    pub t0: f64,
    pub max_derivative: usize,
    pub ratio_tol: f64,
    pub include_timings: bool,
}

impl Default for AnalysisRequest {
    fn default() -> Self {
        AnalysisRequest {
            curve: None,
            coeff_file: None,
            conductor_override: None,
            sign_override: None,
            digits: 10,
            t0: 1.0,
            max_derivative: 6,
            ratio_tol: DEFAULT_RATIO_TOL,
            include_timings: false,
        }
    }
}

impl AnalysisRequest {
    pub fn for_curve(spec: &str) -> Self {
        AnalysisRequest {
            curve: Some(spec.to_string()),
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        match (&self.curve, &self.coeff_file) {
            (Some(_), Some(_)) => Err(Error::InvalidRequest(
                "exactly one of --curve and --coeffs must be given, not both".into(),
            )),
            (None, None) => Err(Error::InvalidRequest(
                "one of --curve or --coeffs is required".into(),
            )),
            (None, Some(_)) => {
                if self.conductor_override.is_none() || self.sign_override.is_none() {
                    Err(Error::InvalidRequest(
                        "coefficient mode requires --conductor and --sign".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            (Some(_), None) => Ok(()),
        }
    }
}

/// Everything the CLI prints about one analysis.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub mode: &'static str,
    /// a-invariants of the input curve, as decimal strings.
    pub curve: Option<Vec<String>>,
    /// a-invariants of the minimal model.
    pub minimal_model: Option<Vec<String>>,
    /// (u, r, s, t) carrying the input to the minimal model.
    pub transform: Option<Vec<String>>,
    pub conductor: u64,
    pub conductor_factorization: Vec<(u64, u32)>,
    pub local_data: Vec<LocalDataReport>,
    pub epsilon: i8,
    pub sign_detection: Option<SignDetection>,
    pub analytic_rank: usize,
    pub a_r: f64,
    pub a_r1: f64,
    pub lambda_derivatives: Vec<f64>,
    pub taylor: TaylorReport,
    pub ratio: RatioCheck,
    pub error_budget: ErrorBudget,
    pub coefficients_source: CoeffSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Timings>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalDataReport {
    pub p: u64,
    pub kind: crate::curve::ReductionKind,
    pub exponent: u32,
    pub kodaira: String,
    pub bad_ap: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBudget {
    pub m: usize,
    pub t0: f64,
    pub quad_tol: f64,
    pub tail_error: f64,
    pub max_derivative: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub conductor: f64,
    pub coefficients: f64,
    pub sign: f64,
    pub derivatives: f64,
    pub total: f64,
}

fn ms(from: Instant) -> f64 {
    from.elapsed().as_secs_f64() * 1e3
}

/// Read a coefficient file: one integer per line, line number = n.
fn read_coeff_file(path: &PathBuf) -> Result<CoefficientTable> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: i64 = trimmed.parse().map_err(|_| {
            Error::Parse(format!(
                "{}:{}: not an integer: {trimmed:?}",
                path.display(),
                line_no + 1
            ))
        })?;
        values.push(v);
    }
    CoefficientTable::from_user_values(values)
}

/// Run the full pipeline for one request.
pub fn analyze(req: &AnalysisRequest) -> Result<AnalysisReport> {
    req.validate()?;
    let t_total = Instant::now();

    // Stage 1: conductor and coefficients.
    let t_stage = Instant::now();
    let (mode, curve_echo, minimal_echo, transform_echo, n, factorization, locals, source);
    let coeffs: CoefficientTable;
    let m: usize;
    let t_conductor;
    let t_coeffs;
    match &req.curve {
        Some(spec) => {
            let e = parse_curve(spec)?;
            let mm = minimal_model(&e)?;
            let (cond, local_data) = conductor_with_local_data(&e)?;
            t_conductor = ms(t_stage);
            n = cond.to_u64().ok_or_else(|| {
                Error::InvalidRequest("conductor exceeds the supported 64-bit range".into())
            })?;
            let t_c = Instant::now();
            m = choose_truncation(n, DEFAULT_TAIL_TARGET, req.t0);
            coeffs = curve_coefficients(&mm.curve, &local_data, m)?;
            t_coeffs = ms(t_c);
            mode = "curve";
            curve_echo = Some(e.a_invariants().map(|x| x.to_string()).to_vec());
            minimal_echo = Some(mm.curve.a_invariants().map(|x| x.to_string()).to_vec());
            transform_echo = Some(vec![
                mm.transform.u.to_string(),
                mm.transform.r.to_string(),
                mm.transform.s.to_string(),
                mm.transform.t.to_string(),
            ]);
            factorization = cond.factorization.clone();
            locals = local_data;
            source = CoeffSource::CurveDerived;
        }
        None => {
            let path = req.coeff_file.as_ref().expect("validated");
            let table = read_coeff_file(path)?;
            t_conductor = ms(t_stage);
            n = req.conductor_override.expect("validated");
            if n == 0 {
                return Err(Error::InvalidRequest("conductor must be positive".into()));
            }
            let t_c = Instant::now();
            let target_m = choose_truncation(n, DEFAULT_TAIL_TARGET, req.t0);
            m = target_m.min(table.len());
            coeffs = table;
            t_coeffs = ms(t_c);
            mode = "coefficients";
            curve_echo = None;
            minimal_echo = None;
            transform_echo = None;
            factorization = crate::arith::factor_u64(n);
            locals = Vec::new();
            source = CoeffSource::UserSupplied;
        }
    }
    let tail_error = truncation_tail_bound(n, m, req.t0);

    // Stage 2: sign.
    let t_sign = Instant::now();
    let (epsilon, detection) = match req.sign_override {
        Some(s) => (s, None),
        None => {
            let det = detect_sign(n, &coeffs, m, DEFAULT_QUAD_TOL, tail_error)?;
            (det.sign, Some(det))
        }
    };
    let t_sign = ms(t_sign);

    // Stage 3: derivatives, rank, Taylor coefficients, ratio verdict.
    let t_deriv = Instant::now();
    let params = CompletedLParams::new(n, epsilon, req.t0, m, DEFAULT_QUAD_TOL, tail_error);
    let derivs = lambda_derivatives(&params, &coeffs, req.max_derivative)?;
    let rank = analytic_rank(&derivs, epsilon, RANK_SCALE_TOL)?;
    let (f1, fp1) = f_and_fprime(params.b, 1);
    let taylor = taylor_of_l(&derivs, f1, fp1, rank)?;
    let inv = FieldInvariants::rational(n);
    let ratio = verify_ratio(taylor.a_r, taylor.a_r1, &inv, req.ratio_tol);
    let t_deriv = ms(t_deriv);

    let local_reports = locals
        .iter()
        .map(|d: &LocalData| LocalDataReport {
            p: d.p,
            kind: d.kind,
            exponent: d.exponent,
            kodaira: d.kodaira.to_string(),
            bad_ap: d.bad_ap(),
        })
        .collect();

    Ok(AnalysisReport {
        mode,
        curve: curve_echo,
        minimal_model: minimal_echo,
        transform: transform_echo,
        conductor: n,
        conductor_factorization: factorization,
        local_data: local_reports,
        epsilon: epsilon.as_i8(),
        sign_detection: detection,
        analytic_rank: rank,
        a_r: taylor.a_r,
        a_r1: taylor.a_r1,
        lambda_derivatives: derivs.values.clone(),
        taylor,
        ratio,
        error_budget: ErrorBudget {
            m,
            t0: req.t0,
            quad_tol: DEFAULT_QUAD_TOL,
            tail_error,
            max_derivative: req.max_derivative,
        },
        coefficients_source: source,
        timings_ms: req.include_timings.then_some(Timings {
            conductor: t_conductor,
            coefficients: t_coeffs,
            sign: t_sign,
            derivatives: t_deriv,
            total: ms(t_total),
        }),
    })
}

/// Round to `digits` significant decimal digits; deterministic via decimal
/// formatting round-trip.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses back")
}

/// Walk a JSON value rounding every float to `digits` significant digits.
fn round_floats(value: &mut Value, digits: usize) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap();
                if let Some(num) = serde_json::Number::from_f64(round_sig(x, digits)) {
                    *value = Value::Number(num);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| round_floats(v, digits)),
        Value::Object(map) => map.values_mut().for_each(|v| round_floats(v, digits)),
        _ => {}
    }
}

/// Serialize a report deterministically: keys sorted (serde_json maps are
/// BTree-backed), floats at fixed significant digits, one trailing newline.
pub fn report_to_json<T: Serialize>(report: &T, digits: usize) -> String {
    let mut value = serde_json::to_value(report).expect("report serializes");
    round_floats(&mut value, digits);
    let mut out = serde_json::to_string_pretty(&value).expect("value prints");
    out.push('\n');
    out
}

/// JSON error object for the CLI.
pub fn error_to_json(err: &Error) -> String {
    let value = json!({
        "error": {
            "code": err.code(),
            "message": err.to_string(),
        }
    });
    let mut out = serde_json::to_string_pretty(&value).expect("error prints");
    out.push('\n');
    out
}

/// One parsed batch row.
#[derive(Debug, Clone)]
pub struct BatchRow {
    pub label: String,
    pub curve_spec: String,
}

/// Outcome of one batch row.
#[derive(Debug)]
pub enum RowOutcome {
    Done(Box<AnalysisReport>),
    Failed(Error),
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

/// Parse batch CSV: columns a1..a6 or label + a-invariants, optional header.
pub fn parse_batch_csv(text: &str) -> Result<Vec<BatchRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let is_header = fields
            .iter()
            .any(|f| f.eq_ignore_ascii_case("a1") || f.eq_ignore_ascii_case("label"));
        if is_header {
            if idx == 0 {
                continue;
            }
            return Err(Error::Parse(format!("unexpected header at line {}", idx + 1)));
        }
        match fields.len() {
            5 => rows.push(BatchRow {
                label: format!("row{}", rows.len() + 1),
                curve_spec: fields.join(","),
            }),
            6 => rows.push(BatchRow {
                label: fields[0].to_string(),
                curve_spec: fields[1..].join(","),
            }),
            n => {
                return Err(Error::Parse(format!(
                    "line {}: expected 5 or 6 comma-separated fields, got {n}",
                    idx + 1
                )))
            }
        }
    }
    Ok(rows)
}

/// Run every row (rows in parallel, output order = input order), render the
/// output CSV, and count outcomes. Row failures are recorded in the row and
/// never abort the batch.
pub fn run_batch(rows: &[BatchRow], base: &AnalysisRequest) -> (String, BatchSummary) {
    let outcomes: Vec<RowOutcome> = rows
        .par_iter()
        .map(|row| {
            let req = AnalysisRequest {
                curve: Some(row.curve_spec.clone()),
                coeff_file: None,
                conductor_override: None,
                sign_override: None,
                include_timings: false,
                ..base.clone()
            };
            match analyze(&req) {
                Ok(rep) => RowOutcome::Done(Box::new(rep)),
                Err(e) => RowOutcome::Failed(e),
            }
        })
        .collect();

    let mut summary = BatchSummary::default();
    let mut out = String::from(
        "label,status,error_code,conductor,epsilon,rank,a_r,a_r1,rho,measured,rel_residual\n",
    );
    let d = base.digits;
    for (row, outcome) in rows.iter().zip(&outcomes) {
        match outcome {
            RowOutcome::Done(rep) => {
                let status = if rep.ratio.pass {
                    summary.pass += 1;
                    "pass"
                } else {
                    summary.fail += 1;
                    "fail"
                };
                out.push_str(&format!(
                    "{},{},,{},{},{},{},{},{},{},{}\n",
                    row.label,
                    status,
                    rep.conductor,
                    rep.epsilon,
                    rep.analytic_rank,
                    round_sig(rep.a_r, d),
                    round_sig(rep.a_r1, d),
                    round_sig(rep.ratio.rho, d),
                    round_sig(rep.ratio.measured, d),
                    round_sig(rep.ratio.rel_residual, 3),
                ));
            }
            RowOutcome::Failed(e) => {
                summary.error += 1;
                out.push_str(&format!("{},error,{},,,,,,,,\n", row.label, e.code()));
            }
        }
    }
    (out, summary)
}
