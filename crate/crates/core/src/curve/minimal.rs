//! Global minimal models over the rationals via the Laska-Kraus-Connell
//! reduction: scale (c4, c6) down by the largest admissible u, then rebuild
//! the reduced model from the scaled invariants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::WeierstrassCurve;
use crate::arith::{factor_bigint, valuation};
use crate::error::Result;

/// The change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t carrying
/// a curve to its minimal model. Over the rationals with integral input the
/// scaling u is a positive integer and r, s, t are integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transform {
    pub u: BigInt,
    pub r: BigInt,
    pub s: BigInt,
    pub t: BigInt,
}

impl Transform {
    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.r.is_zero() && self.s.is_zero() && self.t.is_zero()
    }
}

/// A globally minimal model together with the transform that produced it.
#[derive(Debug, Clone)]
pub struct MinimalModel {
    pub curve: WeierstrassCurve,
    pub transform: Transform,
}

/// Kraus' criterion at 2 and 3 for a (c4, c6) pair to come from an integral
/// Weierstrass model. The defining relation c4^3 - c6^2 = 1728 disc with
/// integral nonzero disc is checked separately by the caller.
fn kraus_at_2(c4: &BigInt, c6: &BigInt) -> bool {
    let c6_mod4 = c6.mod_floor(&BigInt::from(4));
    if c6_mod4 == BigInt::from(3) {
        return true;
    }
    let c4_mod16 = c4.mod_floor(&BigInt::from(16));
    let c6_mod32 = c6.mod_floor(&BigInt::from(32));
    c4_mod16.is_zero() && (c6_mod32.is_zero() || c6_mod32 == BigInt::from(8))
}

fn kraus_at_3(c6: &BigInt) -> bool {
    if c6.is_zero() {
        return true;
    }
    valuation(c6, 3) != 2
}

fn val_or_large(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        u32::MAX
    } else {
        valuation(x, p)
    }
}

/// Compute the global minimal model of an integral curve.
///
/// The discriminant ratio satisfies disc = disc_min * u^12, the returned
/// model has a1, a3 in {0, 1} and a2 in {-1, 0, 1}, and running the
/// reduction again yields the identity transform.
pub fn minimal_model(e: &WeierstrassCurve) -> Result<MinimalModel> {
    let disc_factors = factor_bigint(&e.disc)?;

    // Largest per-prime exponent allowed by divisibility of (c4, c6, disc).
    let mut exps: Vec<(u64, u32)> = Vec::new();
    for &(p, vd) in &disc_factors {
        if vd < 12 {
            continue;
        }
        let cap = (val_or_large(&e.c4, p) / 4)
            .min(val_or_large(&e.c6, p) / 6)
            .min(vd / 12);
        if cap > 0 {
            exps.push((p, cap));
        }
    }

    // Kraus conditions at 2 and 3 are p-adically local, so decrementing one
    // prime's exponent never disturbs the other's condition.
    let scaled = |exps: &[(u64, u32)]| -> (BigInt, BigInt, BigInt) {
        let mut u = BigInt::one();
        for &(p, ep) in exps {
            u *= BigInt::from(p).pow(ep);
        }
        let c4 = &e.c4 / u.pow(4);
        let c6 = &e.c6 / u.pow(6);
        (u, c4, c6)
    };
    loop {
        let (_, c4s, c6s) = scaled(&exps);
        if !kraus_at_2(&c4s, &c6s) {
            let e2 = exps.iter_mut().find(|(p, _)| *p == 2);
            let slot = e2.expect("kraus failure at 2 implies a 2-exponent to lower");
            slot.1 -= 1;
        } else if !kraus_at_3(&c6s) {
            let e3 = exps.iter_mut().find(|(p, _)| *p == 3);
            let slot = e3.expect("kraus failure at 3 implies a 3-exponent to lower");
            slot.1 -= 1;
        } else {
            break;
        }
        exps.retain(|&(_, ep)| ep > 0);
    }

    let (u, c4_min, c6_min) = scaled(&exps);
    let minimal = model_from_c_invariants(&c4_min, &c6_min);
    debug_assert_eq!(minimal.c4, c4_min);
    debug_assert_eq!(minimal.c6, c6_min);
    debug_assert_eq!(&e.disc, &(&minimal.disc * u.pow(12)));

    // Solve for (r, s, t) from the a1, a2, a3 relations; the divisions are
    // exact for admissible pairs and we verify the result end to end.
    let s = (&u * &minimal.a1 - &e.a1) / 2;
    let r = (&u * &u * &minimal.a2 - &e.a2 + &s * &e.a1 + &s * &s) / 3;
    let t = (&u * &u * &u * &minimal.a3 - &e.a3 - &r * &e.a1) / 2;
    let check = e
        .translate(&r, &s, &t)
        .scale_down_checked(&u)
        .expect("minimal transform must descale exactly");
    assert_eq!(
        check, minimal,
        "transform recovery failed for {e}; this is a bug"
    );

    Ok(MinimalModel {
        curve: minimal,
        transform: Transform { u, r, s, t },
    })
}

/// Rebuild the reduced integral model from admissible (c4, c6): pick b2 from
/// -c6 mod 12, then peel off b4, b6 and the a-invariants.
fn model_from_c_invariants(c4: &BigInt, c6: &BigInt) -> WeierstrassCurve {
    let r = (-c6).mod_floor(&BigInt::from(12));
    let r64 = i64::try_from(&r).expect("residue fits");
    let b2 = BigInt::from(match r64 {
        0 | 1 | 4 | 5 => r64,
        8 => -4,
        9 => -3,
        other => panic!("inadmissible c6 residue {other} mod 12; Kraus check should have caught this"),
    });
    let b4_num: BigInt = &b2 * &b2 - c4;
    assert!((&b4_num % BigInt::from(24)).is_zero(), "b4 not integral");
    let b4: BigInt = b4_num / 24;
    let b2_cubed: BigInt = &b2 * &b2 * &b2;
    let b6_num: BigInt = -b2_cubed + 36 * &b2 * &b4 - c6;
    assert!((&b6_num % BigInt::from(216)).is_zero(), "b6 not integral");
    let b6: BigInt = b6_num / 216;

    let a1 = b2.mod_floor(&BigInt::from(2));
    let a2 = (&b2 - &a1) / 4;
    let a3 = b6.mod_floor(&BigInt::from(2));
    let a6 = (&b6 - &a3) / 4;
    let a4 = (&b4 - &a1 * &a3) / 2;
    WeierstrassCurve::from_bigints(a1, a2, a3, a4, a6)
        .expect("reconstructed minimal model is nonsingular")
}
