//! Integral Weierstrass models over the rationals: invariant computation,
//! admissible changes of variables, global minimal models, per-prime
//! reduction data (Tate's algorithm), and the conductor.

mod conductor;
mod minimal;
mod tate;

pub use conductor::{conductor, conductor_with_local_data, Conductor};
pub use minimal::{minimal_model, MinimalModel, Transform};
pub use tate::{tate_local, tate_local_full, Kodaira, LocalData, ReductionKind};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A long Weierstrass equation
/// `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6`
/// with integer coefficients and nonzero discriminant, together with the
/// standard derived quantities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
}

impl WeierstrassCurve {
    /// Build a curve from its a-invariants, deriving b2..b8, c4, c6 and the
    /// discriminant. Fails with [`Error::SingularCurve`] when the
    /// discriminant vanishes.
    pub fn new<T: Into<BigInt> + Clone>(a: [T; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        Self::from_bigints(a1.into(), a2.into(), a3.into(), a4.into(), a6.into())
    }

    pub fn from_bigints(a1: BigInt, a2: BigInt, a3: BigInt, a4: BigInt, a6: BigInt) -> Result<Self> {
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let c4 = &b2 * &b2 - 24 * &b4;
        let b2_cubed: BigInt = &b2 * &b2 * &b2;
        let c6 = -b2_cubed + 36 * &b2 * &b4 - 216 * &b6;
        let b2sq_b8: BigInt = &b2 * &b2 * &b8;
        let b4_cubed: BigInt = &b4 * &b4 * &b4;
        let b6_sq: BigInt = &b6 * &b6;
        let disc: BigInt = -b2sq_b8 - 8 * b4_cubed - 27 * b6_sq + 9 * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        debug_assert_eq!(BigInt::from(4) * &b8, &b2 * &b6 - &b4 * &b4);
        debug_assert_eq!(
            BigInt::from(1728) * &disc,
            &c4 * &c4 * &c4 - &c6 * &c6
        );
        Ok(WeierstrassCurve {
            a1,
            a2,
            a3,
            a4,
            a6,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
        })
    }

    /// The a-invariants as a slice-friendly array of references.
    pub fn a_invariants(&self) -> [&BigInt; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    /// Apply the substitution x = u^2 x' + r, y = u^3 y' + s u^2 x' + t with
    /// u = 1. Integral translations always yield integral models, so this is
    /// the workhorse for Tate's algorithm and for building test curves.
    pub fn translate(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> WeierstrassCurve {
        let a1 = &self.a1 + 2 * s;
        let a2 = &self.a2 - s * &self.a1 + 3 * r - s * s;
        let a3 = &self.a3 + r * &self.a1 + 2 * t;
        let a4 = &self.a4 - s * &self.a3 + 2 * r * &self.a2 - (t + r * s) * &self.a1
            + 3 * r * r
            - 2 * s * t;
        let a6 = &self.a6 + r * &self.a4 + r * r * &self.a2 + r * r * r
            - t * &self.a3
            - t * t
            - r * t * &self.a1;
        WeierstrassCurve::from_bigints(a1, a2, a3, a4, a6)
            .expect("translation preserves nonsingularity")
    }

    /// Inverse scaling a_i -> k^i a_i (the image of this curve under the
    /// substitution with u = 1/k). Always integral; multiplies the
    /// discriminant by k^12.
    pub fn scale_up(&self, k: &BigInt) -> WeierstrassCurve {
        let k2 = k * k;
        let k3 = &k2 * k;
        let k4 = &k2 * &k2;
        let k6 = &k3 * &k3;
        WeierstrassCurve::from_bigints(
            k * &self.a1,
            &k2 * &self.a2,
            &k3 * &self.a3,
            &k4 * &self.a4,
            &k6 * &self.a6,
        )
        .expect("scaling preserves nonsingularity")
    }

    /// Divide a_i by u^i. Panics if any division is inexact; callers check
    /// admissibility first.
    fn scale_down_exact(&self, u: &BigInt) -> WeierstrassCurve {
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        for (ai, ui) in [
            (&self.a1, u),
            (&self.a2, &u2),
            (&self.a3, &u3),
            (&self.a4, &u4),
            (&self.a6, &u6),
        ] {
            assert!((ai % ui).is_zero(), "inexact u-descaling");
        }
        WeierstrassCurve::from_bigints(
            &self.a1 / u,
            &self.a2 / &u2,
            &self.a3 / &u3,
            &self.a4 / &u4,
            &self.a6 / &u6,
        )
        .expect("descaling preserves nonsingularity")
    }

    pub(crate) fn scale_down_checked(&self, u: &BigInt) -> Option<WeierstrassCurve> {
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        let ok = (&self.a1 % u).is_zero()
            && (&self.a2 % &u2).is_zero()
            && (&self.a3 % &u3).is_zero()
            && (&self.a4 % &u4).is_zero()
            && (&self.a6 % &u6).is_zero();
        ok.then(|| self.scale_down_exact(u))
    }
}

impl std::fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{},{},{},{},{}]",
            self.a1, self.a2, self.a3, self.a4, self.a6
        )
    }
}

/// Parse "a1,a2,a3,a4,a6" into a curve.
pub fn parse_curve(s: &str) -> Result<WeierstrassCurve> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(Error::Parse(format!(
            "expected 5 comma-separated integers a1,a2,a3,a4,a6, got {} fields",
            parts.len()
        )));
    }
    let mut vals = Vec::with_capacity(5);
    for p in parts {
        let v: BigInt = p
            .parse()
            .map_err(|_| Error::Parse(format!("not an integer: {p:?}")))?;
        vals.push(v);
    }
    WeierstrassCurve::from_bigints(
        vals[0].clone(),
        vals[1].clone(),
        vals[2].clone(),
        vals[3].clone(),
        vals[4].clone(),
    )
}
