//! The closed-form ratio between the sub-leading and leading Taylor
//! coefficients of the L-series at the central point,
//!
//! ```text
//! rho = n (gamma + ln 2 pi) - ln(N) / 2 - ln |Delta_K|
//! ```
//!
//! where n is the field degree, N the conductor norm and Delta_K the field
//! discriminant, together with the sign-flip threshold in N and the verdict
//! comparing rho against a measured ratio.

// Constants are stored at 20 significant digits and validated at runtime.
#![allow(clippy::excessive_precision)]

use serde::Serialize;

/// Euler's constant, 20 significant digits.
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// ln(2 pi), 20 significant digits.
pub const LN_TWO_PI: f64 = 1.8378770664093454836;

/// pi^2 / 6, 20 significant digits.
pub const PI_SQ_OVER_6: f64 = 1.6449340668482264365;

/// Degree, discriminant and conductor norm of the setting the ratio formula
/// is evaluated in, plus the gamma constant in use (swappable so the
/// self-test canaries can verify that a perturbed constant is caught).
#[derive(Debug, Clone, Copy)]
pub struct FieldInvariants {
    pub degree: u32,
    pub disc_k: i64,
    pub conductor_norm: u64,
    pub euler_gamma: f64,
}

impl FieldInvariants {
    /// The rational setting: degree 1, |Delta| = 1.
    pub fn rational(conductor_norm: u64) -> Self {
        FieldInvariants {
            degree: 1,
            disc_k: 1,
            conductor_norm,
            euler_gamma: EULER_GAMMA,
        }
    }

    pub fn new(degree: u32, disc_k: i64, conductor_norm: u64) -> Self {
        assert!(degree >= 1, "degree must be at least 1");
        assert!(disc_k != 0, "field discriminant cannot vanish");
        assert!(conductor_norm >= 1, "conductor norm must be positive");
        if degree == 1 {
            assert!(disc_k.unsigned_abs() == 1, "degree 1 forces |Delta| = 1");
        }
        FieldInvariants {
            degree,
            disc_k,
            conductor_norm,
            euler_gamma: EULER_GAMMA,
        }
    }
}

/// rho = n (gamma + ln 2 pi) - ln(N)/2 - ln |Delta_K|.
pub fn predicted_ratio(inv: &FieldInvariants) -> f64 {
    let n = inv.degree as f64;
    let log_n = (inv.conductor_norm as f64).ln();
    let log_disc = (inv.disc_k.unsigned_abs() as f64).ln();
    n * (inv.euler_gamma + LN_TWO_PI) - 0.5 * log_n - log_disc
}

/// The smallest conductor norm at which rho turns negative, or a symbolic
/// description when it would overflow u64.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignThreshold {
    Exact(u64),
    Symbolic(String),
}

/// Smallest integer N with predicted_ratio(n, disc, N) < 0, i.e. the first
/// conductor norm past exp(2n(gamma + ln 2 pi)) / Delta^2, pinned down by
/// direct evaluation around the analytic root.
pub fn sign_threshold(degree: u32, abs_disc: u64) -> SignThreshold {
    assert!(degree >= 1 && abs_disc >= 1);
    let n = degree as f64;
    let root = (2.0 * n * (EULER_GAMMA + LN_TWO_PI) - 2.0 * (abs_disc as f64).ln()).exp();
    if !(1.0..9.0e18).contains(&root) {
        if root < 1.0 {
            // Huge discriminant: rho < 0 already at N = 1.
            return SignThreshold::Exact(1);
        }
        return SignThreshold::Symbolic(format!(
            "ceil(exp({}·(γ + ln 2π))/{}²) ≈ {:.6e}",
            2 * degree,
            abs_disc,
            root
        ));
    }
    let mut candidate = root.floor() as u64;
    candidate = candidate.max(1);
    let rho_at = |n_val: u64| {
        predicted_ratio(&FieldInvariants {
            degree,
            disc_k: abs_disc as i64,
            conductor_norm: n_val,
            euler_gamma: EULER_GAMMA,
        })
    };
    while rho_at(candidate) < 0.0 && candidate > 1 {
        candidate -= 1;
    }
    while rho_at(candidate) >= 0.0 {
        candidate += 1;
    }
    SignThreshold::Exact(candidate)
}

/// Outcome of comparing a measured ratio against rho.
#[derive(Debug, Clone, Serialize)]
pub struct RatioCheck {
    pub rho: f64,
    pub measured: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub pass: bool,
    /// Whether the sub-leading coefficient flips sign against the leading
    /// one, and whether that matches the sign of rho.
    pub sign_flip_expected: bool,
    pub sign_flip_observed: bool,
    pub sign_consistent: bool,
}

/// Compare the measured ratio a_{r+1}/a_r against rho at the given
/// tolerance. Relative residual is used unless |rho| < 1e-3, where the
/// absolute residual takes over to avoid dividing by a near-zero prediction.
pub fn verify_ratio(a_r: f64, a_r1: f64, inv: &FieldInvariants, tol: f64) -> RatioCheck {
    assert!(a_r != 0.0, "leading coefficient must be nonzero");
    let rho = predicted_ratio(inv);
    let measured = a_r1 / a_r;
    let abs_residual = (measured - rho).abs();
    let rel_residual = abs_residual / rho.abs().max(f64::MIN_POSITIVE);
    let pass = if rho.abs() < 1e-3 {
        abs_residual <= tol
    } else {
        rel_residual <= tol
    };
    let sign_flip_expected = rho < 0.0;
    let sign_flip_observed = (a_r1 * a_r) < 0.0;
    RatioCheck {
        rho,
        measured,
        abs_residual,
        rel_residual,
        pass,
        sign_flip_expected,
        sign_flip_observed,
        sign_consistent: sign_flip_expected == sign_flip_observed,
    }
}

/// Diagnostic recomputation of the stored constants from scratch: pi by the
/// BBP series, gamma by an Euler-Maclaurin-corrected harmonic limit, ln 2 pi
/// from the recomputed pi. Returns the worst absolute deviation.
pub fn validate_constants() -> f64 {
    // BBP: pi = sum 16^-k (4/(8k+1) - 2/(8k+4) - 1/(8k+5) - 1/(8k+6)).
    let mut pi = 0.0;
    let mut scale = 1.0;
    for k in 0..16 {
        let k8 = 8.0 * k as f64;
        pi += scale * (4.0 / (k8 + 1.0) - 2.0 / (k8 + 4.0) - 1.0 / (k8 + 5.0) - 1.0 / (k8 + 6.0));
        scale /= 16.0;
    }
    // gamma = lim H_n - ln n, accelerated: H_n - ln n - 1/(2n) + 1/(12 n^2).
    let n = 100_000u64;
    let mut h = 0.0;
    for k in 1..=n {
        h += 1.0 / k as f64;
    }
    let nf = n as f64;
    let gamma_est = h - nf.ln() - 0.5 / nf + 1.0 / (12.0 * nf * nf);
    let ln_two_pi_est = (2.0 * pi).ln();

    let d_pi = (pi - std::f64::consts::PI).abs();
    let d_gamma = (gamma_est - EULER_GAMMA).abs();
    let d_l2p = (ln_two_pi_est - LN_TWO_PI).abs();
    let d_pisq = (pi * pi / 6.0 - PI_SQ_OVER_6).abs();
    d_pi.max(d_gamma).max(d_l2p).max(d_pisq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rho_for_conductor_11() {
        let rho = predicted_ratio(&FieldInvariants::rational(11));
        assert_abs_diff_eq!(rho, 1.2161450949, epsilon = 1e-9);
    }

    #[test]
    fn rho_at_one_is_gamma_plus_ln_two_pi() {
        let rho = predicted_ratio(&FieldInvariants::rational(1));
        assert_abs_diff_eq!(rho, EULER_GAMMA + LN_TWO_PI, epsilon = 0.0);
    }

    #[test]
    fn degree_two_example() {
        // n = 2, Delta = -4, N = 1: rho = 2(gamma + ln 2 pi) - ln 4.
        let inv = FieldInvariants::new(2, -4, 1);
        let rho = predicted_ratio(&inv);
        assert_abs_diff_eq!(
            rho,
            2.0 * (EULER_GAMMA + LN_TWO_PI) - 4.0f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn sign_flip_boundary() {
        assert!(predicted_ratio(&FieldInvariants::rational(125)) > 0.0);
        assert!(predicted_ratio(&FieldInvariants::rational(126)) < 0.0);
        assert_eq!(sign_threshold(1, 1), SignThreshold::Exact(126));
        // Analytic root e^{2(gamma + ln 2 pi)} sits inside (125, 126).
        let root = (2.0 * (EULER_GAMMA + LN_TWO_PI)).exp();
        assert!(root > 125.0 && root < 126.0, "root = {root}");
    }

    #[test]
    fn threshold_overflows_symbolically() {
        match sign_threshold(12, 1) {
            SignThreshold::Symbolic(s) => assert!(s.contains("exp")),
            other => panic!("expected symbolic threshold, got {other:?}"),
        }
        match sign_threshold(2, 1) {
            SignThreshold::Exact(n) => {
                // e^{4(gamma + ln 2 pi)} ~ 15694.4
                assert!(predicted_ratio(&FieldInvariants::new(2, 1, n)) < 0.0);
                assert!(predicted_ratio(&FieldInvariants::new(2, 1, n - 1)) >= 0.0);
            }
            other => panic!("expected exact threshold, got {other:?}"),
        }
    }

    #[test]
    fn monotonicity_grids() {
        // Decreasing in N.
        let mut last = f64::INFINITY;
        for n in [1u64, 2, 5, 11, 50, 125, 126, 1000, 100_000] {
            let rho = predicted_ratio(&FieldInvariants::rational(n));
            assert!(rho < last);
            last = rho;
        }
        // Increasing in degree, decreasing in |Delta|.
        for d in 1..6u32 {
            let lo = predicted_ratio(&FieldInvariants::new(d, 1, 37));
            let hi = predicted_ratio(&FieldInvariants::new(d + 1, 1, 37));
            assert!(hi > lo);
        }
        for delta in [1i64, -2, 3, -10, 100] {
            let base = predicted_ratio(&FieldInvariants::new(2, delta, 37));
            let further = predicted_ratio(&FieldInvariants::new(2, delta * 7, 37));
            assert!(further < base);
        }
    }

    #[test]
    fn verdict_identity_input() {
        let inv = FieldInvariants::rational(37);
        let rho = predicted_ratio(&inv);
        let check = verify_ratio(0.3059997738, rho * 0.3059997738, &inv, 1e-6);
        assert!(check.pass);
        assert_eq!(check.rel_residual, 0.0);
        assert!(!check.sign_flip_expected);
        assert!(check.sign_consistent);
    }

    #[test]
    fn constants_agree_with_recomputation() {
        assert!(validate_constants() < 1e-10);
    }
}
