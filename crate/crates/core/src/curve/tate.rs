//! Reduction types and conductor exponents at a prime.
//!
//! Two routes are provided: the full step-by-step Tate algorithm, valid at
//! every prime and used in production at p = 2, 3, and a fast path for
//! p >= 5 that classifies directly from valuations of c4, c6 and the
//! discriminant. The two routes are cross-checked against each other in the
//! property suite.

use num_bigint::BigInt;
use num_traits::Zero;

use super::WeierstrassCurve;
use crate::arith::{bigint_mod_u64, inv_mod, legendre, valuation};
use crate::error::{Error, Result};

/// Reduction behaviour of a minimal model at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

/// Kodaira symbol of the special fibre. Recorded for diagnostics; nothing
/// downstream depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl std::fmt::Display for Kodaira {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

/// Per-prime local data: reduction kind, conductor exponent, Kodaira symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub p: u64,
    pub kind: ReductionKind,
    pub exponent: u32,
    pub kodaira: Kodaira,
}

impl LocalData {
    /// The coefficient a_p of the L-series at a bad prime: +1 for split
    /// multiplicative, -1 for nonsplit, 0 for additive. None at good primes
    /// (use the point count instead).
    pub fn bad_ap(&self) -> Option<i64> {
        match self.kind {
            ReductionKind::Good => None,
            ReductionKind::SplitMultiplicative => Some(1),
            ReductionKind::NonsplitMultiplicative => Some(-1),
            ReductionKind::Additive => Some(0),
        }
    }

    fn validate(self) -> Self {
        match self.kind {
            ReductionKind::Good => debug_assert_eq!(self.exponent, 0),
            ReductionKind::SplitMultiplicative | ReductionKind::NonsplitMultiplicative => {
                debug_assert_eq!(self.exponent, 1)
            }
            ReductionKind::Additive => {
                let cap = match self.p {
                    2 => 8,
                    3 => 5,
                    _ => 2,
                };
                debug_assert!(
                    self.exponent >= 2 && self.exponent <= cap,
                    "conductor exponent {} out of range at p = {}",
                    self.exponent,
                    self.p
                );
            }
        }
        self
    }
}

fn val_or_inf(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        u32::MAX
    } else {
        valuation(x, p)
    }
}

/// Local reduction data of a model minimal at p. Dispatches to the fast
/// valuation-based classification for p >= 5 and the full algorithm at 2, 3.
pub fn tate_local(e: &WeierstrassCurve, p: u64) -> Result<LocalData> {
    if p >= 5 {
        tate_local_fast(e, p)
    } else {
        tate_local_full(e, p)
    }
}

/// Fast path for p >= 5: good iff p does not divide disc; multiplicative iff
/// p | disc and p does not divide c4, split decided by whether -c6 is a
/// quadratic residue mod p; additive otherwise with exponent 2.
fn tate_local_fast(e: &WeierstrassCurve, p: u64) -> Result<LocalData> {
    debug_assert!(p >= 5);
    let vd = val_or_inf(&e.disc, p);
    if vd == 0 {
        return Ok(LocalData {
            p,
            kind: ReductionKind::Good,
            exponent: 0,
            kodaira: Kodaira::I0,
        }
        .validate());
    }
    let vc4 = val_or_inf(&e.c4, p);
    if vc4 == 0 {
        let minus_c6 = bigint_mod_u64(&-(&e.c6), p);
        let kind = if legendre(minus_c6, p) == 1 {
            ReductionKind::SplitMultiplicative
        } else {
            ReductionKind::NonsplitMultiplicative
        };
        return Ok(LocalData {
            p,
            kind,
            exponent: 1,
            kodaira: Kodaira::In(vd),
        }
        .validate());
    }
    // Additive. A scaling by u = p would need p^4 | c4, p^6 | c6, p^12 | disc.
    let vc6 = val_or_inf(&e.c6, p);
    if vd >= 12 && vc4 >= 4 && vc6 >= 6 {
        return Err(Error::NotMinimalAtP { p });
    }
    let kodaira = match vd {
        2 => Kodaira::II,
        3 => Kodaira::III,
        4 => Kodaira::IV,
        6 => Kodaira::IStar(0),
        7 => Kodaira::IStar(1),
        8 => {
            if vc4 >= 3 {
                Kodaira::IVStar
            } else {
                Kodaira::IStar(2)
            }
        }
        9 => {
            if vc4 >= 3 {
                Kodaira::IIIStar
            } else {
                Kodaira::IStar(3)
            }
        }
        10 => {
            if vc4 >= 3 {
                Kodaira::IIStar
            } else {
                Kodaira::IStar(4)
            }
        }
        n if n >= 11 => Kodaira::IStar(n - 6),
        n => unreachable!("impossible additive discriminant valuation {n} at p = {p}"),
    };
    Ok(LocalData {
        p,
        kind: ReductionKind::Additive,
        exponent: 2,
        kodaira,
    }
    .validate())
}

/// Reduce a curve's a-invariants mod p.
fn a_mod(e: &WeierstrassCurve, p: u64) -> [u64; 5] {
    [
        bigint_mod_u64(&e.a1, p),
        bigint_mod_u64(&e.a2, p),
        bigint_mod_u64(&e.a3, p),
        bigint_mod_u64(&e.a4, p),
        bigint_mod_u64(&e.a6, p),
    ]
}

/// Locate the unique singular point of the reduced curve mod p.
fn singular_point(e: &WeierstrassCurve, p: u64) -> (u64, u64) {
    let [a1, a2, a3, a4, a6] = a_mod(e, p);
    let eval = |x: u64, y: u64| -> (u64, u64, u64) {
        // F = y^2 + a1 x y + a3 y - x^3 - a2 x^2 - a4 x - a6
        let x2 = x * x % p;
        let x3 = x2 * x % p;
        let f = (y * y % p + a1 * x % p * y % p + a3 * y % p + 5 * p * p
            - x3
            - a2 * x2 % p
            - a4 * x % p
            - a6)
            % p;
        // F_x = a1 y - 3 x^2 - 2 a2 x - a4
        let fx = (a1 * y % p + 6 * p * p - 3 * x2 % p - 2 * a2 % p * x % p - a4) % p;
        // F_y = 2 y + a1 x + a3
        let fy = (2 * y + a1 * x % p + a3) % p;
        (f, fx, fy)
    };
    if p == 2 {
        for x in 0..2 {
            for y in 0..2 {
                let (f, fx, fy) = eval(x, y);
                if f == 0 && fx == 0 && fy == 0 {
                    return (x, y);
                }
            }
        }
    } else {
        let inv2 = inv_mod(2, p);
        for x in 0..p {
            // F_y = 0 forces y = -(a1 x + a3) / 2.
            let y = (p - (a1 * x % p + a3) % p) % p * inv2 % p;
            let (f, fx, _) = eval(x, y);
            if f == 0 && fx == 0 {
                return (x, y);
            }
        }
    }
    panic!("no singular point mod {p} although p divides the discriminant");
}

/// Root structure of the cubic T^3 + A T^2 + B T + C over F_p, found by
/// exhaustive evaluation with multiplicities via synthetic division.
enum CubicRoots {
    Separable,
    DoubleSimple { double: u64 },
    Triple { root: u64 },
}

fn cubic_roots(a: u64, b: u64, c: u64, p: u64) -> CubicRoots {
    for t in 0..p {
        // Divide out (T - t) as long as it is a root.
        let mut coeffs = [1u64, a % p, b % p, c % p];
        let mut mult = 0u32;
        loop {
            // Synthetic division of the degree-(3 - mult) polynomial by (T - t).
            let deg = 3 - mult as usize;
            let mut rem = 0u64;
            let mut quotient = [0u64; 4];
            for (i, item) in coeffs.iter().enumerate().take(deg + 1) {
                rem = (rem * t + item) % p;
                quotient[i] = rem;
            }
            if rem != 0 {
                break;
            }
            mult += 1;
            // quotient[0..deg] holds the new coefficients, highest first.
            coeffs = [0; 4];
            coeffs[..deg].copy_from_slice(&quotient[..deg]);
            if mult == 3 {
                break;
            }
        }
        match mult {
            2 => return CubicRoots::DoubleSimple { double: t },
            3 => return CubicRoots::Triple { root: t },
            _ => {}
        }
    }
    CubicRoots::Separable
}

/// Does Y^2 + A Y - B have distinct roots over the algebraic closure of F_p?
fn quadratic_separable_y(a: u64, b: u64, p: u64) -> bool {
    if p == 2 {
        a % 2 == 1
    } else {
        // discriminant A^2 + 4B
        (a * a % p + 4 * b % p) % p != 0
    }
}

/// Double root of Y^2 + A Y - B mod p, assuming it is not separable.
fn quadratic_double_root_y(a: u64, b: u64, p: u64) -> u64 {
    if p == 2 {
        b % 2
    } else {
        (p - a % p) % p * inv_mod(2, p) % p
    }
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// The full Tate algorithm at an arbitrary prime.
///
/// Production path for p = 2, 3; doubles as the independent oracle the fast
/// path is tested against at p >= 5.
pub fn tate_local_full(e: &WeierstrassCurve, p: u64) -> Result<LocalData> {
    let vd = val_or_inf(&e.disc, p);
    if vd == 0 {
        return Ok(LocalData {
            p,
            kind: ReductionKind::Good,
            exponent: 0,
            kodaira: Kodaira::I0,
        }
        .validate());
    }

    // Step 2: move the singular point to the origin, so p | a3, a4, a6.
    let (x0, y0) = singular_point(e, p);
    let mut e = e.translate(&big(x0), &BigInt::zero(), &big(y0));
    debug_assert!(bigint_mod_u64(&e.a3, p) == 0);
    debug_assert!(bigint_mod_u64(&e.a4, p) == 0);
    debug_assert!(bigint_mod_u64(&e.a6, p) == 0);

    if bigint_mod_u64(&e.b2, p) != 0 {
        // Multiplicative: the tangent directions at the node are rational
        // exactly when T^2 + a1 T - a2 splits mod p.
        let split = if p == 2 {
            bigint_mod_u64(&e.a2, 2) == 0
        } else {
            legendre(bigint_mod_u64(&e.b2, p), p) == 1
        };
        let kind = if split {
            ReductionKind::SplitMultiplicative
        } else {
            ReductionKind::NonsplitMultiplicative
        };
        return Ok(LocalData {
            p,
            kind,
            exponent: 1,
            kodaira: Kodaira::In(vd),
        }
        .validate());
    }

    let additive = |exponent: u32, kodaira: Kodaira| {
        Ok(LocalData {
            p,
            kind: ReductionKind::Additive,
            exponent,
            kodaira,
        }
        .validate())
    };

    // Step 3.
    if val_or_inf(&e.a6, p) < 2 {
        return additive(vd, Kodaira::II);
    }
    // Step 4.
    if val_or_inf(&e.b8, p) < 3 {
        return additive(vd - 1, Kodaira::III);
    }
    // Step 5.
    if val_or_inf(&e.b6, p) < 3 {
        return additive(vd - 2, Kodaira::IV);
    }

    // Step 6 normalization: p | a1, a2; p^2 | a3, a4; p^3 | a6.
    let p2 = p * p;
    if p == 2 {
        let mut found = false;
        'search: for s in 0..2u64 {
            for t in 0..8u64 {
                let cand = e.translate(&BigInt::zero(), &big(s), &big(t));
                if val_or_inf(&cand.a1, 2) >= 1
                    && val_or_inf(&cand.a2, 2) >= 1
                    && val_or_inf(&cand.a3, 2) >= 2
                    && val_or_inf(&cand.a4, 2) >= 2
                    && val_or_inf(&cand.a6, 2) >= 3
                {
                    e = cand;
                    found = true;
                    break 'search;
                }
            }
        }
        assert!(found, "step-6 normalization failed at p = 2 for {e}");
    } else {
        let inv2 = inv_mod(2, p);
        let s = (p - bigint_mod_u64(&e.a1, p)) % p * inv2 % p;
        e = e.translate(&BigInt::zero(), &big(s), &BigInt::zero());
        let inv2_p2 = inv_mod(2, p2);
        let t = (p2 - bigint_mod_u64(&e.a3, p2)) % p2 * inv2_p2 % p2;
        e = e.translate(&BigInt::zero(), &BigInt::zero(), &big(t));
        debug_assert!(val_or_inf(&e.a1, p) >= 1);
        debug_assert!(val_or_inf(&e.a2, p) >= 1);
        debug_assert!(val_or_inf(&e.a3, p) >= 2);
        debug_assert!(val_or_inf(&e.a4, p) >= 2, "v(a4) too small at {e}");
        debug_assert!(val_or_inf(&e.a6, p) >= 3, "v(a6) too small at {e}");
    }

    // Step 6 test: the cubic T^3 + (a2/p) T^2 + (a4/p^2) T + (a6/p^3) mod p.
    let a21 = bigint_mod_u64(&(&e.a2 / big(p)), p);
    let a42 = bigint_mod_u64(&(&e.a4 / big(p2)), p);
    let a63 = bigint_mod_u64(&(&e.a6 / big(p2 * p)), p);
    match cubic_roots(a21, a42, a63, p) {
        CubicRoots::Separable => additive(vd - 4, Kodaira::IStar(0)),
        CubicRoots::DoubleSimple { double } => {
            // Step 7: type I_n* for some n >= 1.
            e = e.translate(&(big(p) * big(double)), &BigInt::zero(), &BigInt::zero());
            let n = i_star_index(&mut e, p, vd)?;
            additive(vd - 4 - n, Kodaira::IStar(n))
        }
        CubicRoots::Triple { root } => {
            // Step 8: translate the triple root to zero.
            e = e.translate(&(big(p) * big(root)), &BigInt::zero(), &BigInt::zero());
            debug_assert!(val_or_inf(&e.a2, p) >= 2);
            debug_assert!(val_or_inf(&e.a4, p) >= 3);
            debug_assert!(val_or_inf(&e.a6, p) >= 4);
            let a32 = bigint_mod_u64(&(&e.a3 / big(p2)), p);
            let a64 = bigint_mod_u64(&(&e.a6 / (big(p2) * big(p2))), p);
            if quadratic_separable_y(a32, a64, p) {
                return additive(vd - 6, Kodaira::IVStar);
            }
            let y0 = quadratic_double_root_y(a32, a64, p);
            e = e.translate(&BigInt::zero(), &BigInt::zero(), &(big(p2) * big(y0)));
            // Step 9.
            if val_or_inf(&e.a4, p) < 4 {
                return additive(vd - 7, Kodaira::IIIStar);
            }
            // Step 10.
            if val_or_inf(&e.a6, p) < 6 {
                return additive(vd - 8, Kodaira::IIStar);
            }
            // Step 11: the model can be rescaled by u = p.
            Err(Error::NotMinimalAtP { p })
        }
    }
}

/// Sub-loop of step 7: alternately test the Y- and X-quadratics at rising
/// levels until one is separable; the level at which that happens gives the
/// index n of I_n*.
fn i_star_index(e: &mut WeierstrassCurve, p: u64, vd: u32) -> Result<u32> {
    // Entering: the cubic had a double root at 0 and a simple nonzero root,
    // so v(a2) = 1, v(a4) >= 3, v(a6) >= 4.
    debug_assert_eq!(val_or_inf(&e.a2, p), 1);
    debug_assert!(val_or_inf(&e.a4, p) >= 3);
    debug_assert!(val_or_inf(&e.a6, p) >= 4);
    let mut k = 2u32;
    loop {
        // Y-quadratic: Y^2 + (a3/p^k) Y - (a6/p^2k) mod p.
        let pk = BigInt::from(p).pow(k);
        let p2k = BigInt::from(p).pow(2 * k);
        debug_assert!((&e.a3 % &pk).is_zero());
        debug_assert!((&e.a6 % &p2k).is_zero());
        let ay = bigint_mod_u64(&(&e.a3 / &pk), p);
        let by = bigint_mod_u64(&(&e.a6 / &p2k), p);
        if quadratic_separable_y(ay, by, p) {
            return Ok(2 * k - 3);
        }
        let y0 = quadratic_double_root_y(ay, by, p);
        *e = e.translate(&BigInt::zero(), &BigInt::zero(), &(&pk * big(y0)));

        // X-quadratic: (a2/p) X^2 + (a4/p^{k+1}) X + (a6/p^{2k+1}) mod p.
        let pk1 = BigInt::from(p).pow(k + 1);
        let p2k1 = BigInt::from(p).pow(2 * k + 1);
        debug_assert!((&e.a4 % &pk1).is_zero());
        debug_assert!((&e.a6 % &p2k1).is_zero());
        let ax = bigint_mod_u64(&(&e.a2 / big(p)), p);
        let bx = bigint_mod_u64(&(&e.a4 / &pk1), p);
        let cx = bigint_mod_u64(&(&e.a6 / &p2k1), p);
        let separable = if p == 2 {
            bx % 2 == 1
        } else {
            (bx * bx % p + p - 4 * ax % p * cx % p % p) % p != 0
        };
        if separable {
            return Ok(2 * k - 2);
        }
        let x0 = if p == 2 {
            cx * ax % 2
        } else {
            (p - bx) % p * inv_mod(2 * ax % p, p) % p
        };
        *e = e.translate(&(BigInt::from(p).pow(k) * big(x0)), &BigInt::zero(), &BigInt::zero());

        k += 1;
        if 2 * k > vd + 4 {
            // The loop consumes discriminant valuation; running past it
            // means the model was not minimal at p after all.
            return Err(Error::NotMinimalAtP { p });
        }
    }
}
