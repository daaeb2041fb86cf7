//! Dirichlet coefficients a_n of the L-series: point counts at good primes,
//! bad-prime coefficients from local data, and multiplicative extension.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arith::{bigint_mod_u64, legendre, primes_up_to, smallest_prime_factor};
use crate::curve::{LocalData, WeierstrassCurve};
use crate::error::{Error, Result};

/// Where a coefficient table came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffSource {
    CurveDerived,
    UserSupplied,
}

/// The coefficients a_1..a_M, 64-bit; |a_n| <= d(n) sqrt(n) keeps this far
/// from overflow at any desk-scale M.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    a: Vec<i64>, // index 0 unused
    pub source: CoeffSource,
}

impl CoefficientTable {
    pub fn len(&self) -> usize {
        self.a.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// a_n for 1 <= n <= M.
    pub fn get(&self, n: usize) -> i64 {
        self.a[n]
    }

    pub fn values(&self) -> &[i64] {
        &self.a[1..]
    }

    /// Validate and wrap user-supplied coefficients (one per line elsewhere;
    /// here already parsed). Checks a_1 = 1, the Hasse bound at every prime
    /// index, and full multiplicativity over coprime pairs.
    pub fn from_user_values(values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidRequest("empty coefficient list".into()));
        }
        if values[0] != 1 {
            return Err(Error::InvalidRequest(format!(
                "a_1 must be 1, got {}",
                values[0]
            )));
        }
        let mut a = Vec::with_capacity(values.len() + 1);
        a.push(0);
        a.extend_from_slice(&values);
        let table = CoefficientTable {
            a,
            source: CoeffSource::UserSupplied,
        };
        table.check_invariants()?;
        Ok(table)
    }

    fn check_invariants(&self) -> Result<()> {
        let m = self.len();
        for &p in &primes_up_to(m) {
            let ap = self.get(p as usize);
            // At bad primes a_p is 0 or +/-1, which also obeys the bound.
            if ap * ap > 4 * p as i64 {
                return Err(Error::InvalidRequest(format!(
                    "Hasse bound violated at p = {p}: a_p = {ap}"
                )));
            }
        }
        for small in 2..=m {
            for n in 2..=m / small {
                if gcd(small as u64, n as u64) == 1 {
                    let (am, an, amn) = (self.get(small), self.get(n), self.get(small * n));
                    if amn != am * an {
                        return Err(Error::InvalidRequest(format!(
                            "multiplicativity violated: a_{} != a_{} * a_{}",
                            small * n,
                            small,
                            n
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    crate::arith::gcd_u64(a, b)
}

/// a_p = p + 1 - #E(F_p) at a good prime.
///
/// For p > 3 this is the character sum -sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6)
/// over the completed-square cubic; for p = 2, 3 the points of the long model
/// are enumerated directly.
pub fn ap_good(e: &WeierstrassCurve, p: u64) -> Result<i64> {
    if bigint_mod_u64(&e.disc, p) == 0 {
        return Err(Error::BadReductionPrime { p });
    }
    let ap = if p <= 3 {
        p as i64 + 1 - count_points_naive(e, p) as i64
    } else {
        let b2 = bigint_mod_u64(&e.b2, p);
        let b4 = bigint_mod_u64(&e.b4, p);
        let b6 = bigint_mod_u64(&e.b6, p);
        let mut sum = 0i64;
        for x in 0..p {
            // g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6
            let x2 = x * x % p;
            let g = (4 * (x2 * x % p) % p + b2 * x2 % p + 2 * b4 % p * x % p + b6) % p;
            sum += legendre(g, p);
        }
        -sum
    };
    debug_assert!(ap * ap <= 4 * p as i64, "Hasse bound violated: a_{p} = {ap}");
    Ok(ap)
}

/// Brute-force point count of the long model over F_p, including the point
/// at infinity. O(p^2): the independent oracle for `ap_good`.
pub fn count_points_naive(e: &WeierstrassCurve, p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = [
        bigint_mod_u64(&e.a1, p),
        bigint_mod_u64(&e.a2, p),
        bigint_mod_u64(&e.a3, p),
        bigint_mod_u64(&e.a4, p),
        bigint_mod_u64(&e.a6, p),
    ];
    let mut count = 1u64; // infinity
    for x in 0..p {
        let x2 = x * x % p;
        let rhs = (x2 * x % p + a2 * x2 % p + a4 * x % p + a6) % p;
        for y in 0..p {
            let lhs = (y * y % p + a1 * x % p * y % p + a3 * y % p) % p;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

/// Expand local data into the full coefficient table a_1..a_M using the Hecke
/// recursion at good primes, a_{p^k} = a_p^k at bad primes, and
/// multiplicativity across coprime indices.
///
/// `local_aps` must cover every good prime <= M; `bad_data` every prime
/// dividing the conductor (its other entries are ignored).
pub fn extend_multiplicative(
    local_aps: &BTreeMap<u64, i64>,
    bad_data: &[LocalData],
    m: usize,
) -> Result<CoefficientTable> {
    let bad: BTreeMap<u64, i64> = bad_data
        .iter()
        .filter_map(|d| d.bad_ap().map(|ap| (d.p, ap)))
        .collect();
    let primes = primes_up_to(m);
    let mut a = vec![0i64; m + 1];
    if m >= 1 {
        a[1] = 1;
    }
    for &p in &primes {
        let pu = p as usize;
        if let Some(&ap) = bad.get(&p) {
            // a_{p^k} = a_p^k
            let mut pk = pu;
            let mut apk = 1i64;
            while pk <= m {
                apk *= ap;
                a[pk] = apk;
                pk = match pk.checked_mul(pu) {
                    Some(v) => v,
                    None => break,
                };
            }
        } else if let Some(&ap) = local_aps.get(&p) {
            // a_{p^{k+1}} = a_p a_{p^k} - p a_{p^{k-1}}
            let mut prev = 1i64; // a_{p^0}
            let mut cur = ap; // a_{p^1}
            let mut pk = pu;
            while pk <= m {
                a[pk] = cur;
                let next = ap * cur - p as i64 * prev;
                prev = cur;
                cur = next;
                pk = match pk.checked_mul(pu) {
                    Some(v) => v,
                    None => break,
                };
            }
        } else {
            return Err(Error::MissingPrime { p });
        }
    }
    // Multiplicative fill: n = p^k * rest with p the smallest prime factor.
    let spf = smallest_prime_factor(m);
    for n in 2..=m {
        let p = spf[n] as usize;
        let mut pk = p;
        let mut rest = n / p;
        while rest % p == 0 {
            pk *= p;
            rest /= p;
        }
        if rest > 1 {
            a[n] = a[pk] * a[rest];
        }
    }
    Ok(CoefficientTable {
        a,
        source: CoeffSource::CurveDerived,
    })
}

/// Coefficient table for a curve: point counts at the good primes up to M
/// (parallel over primes), bad coefficients from the local data.
pub fn curve_coefficients(
    minimal: &WeierstrassCurve,
    locals: &[LocalData],
    m: usize,
) -> Result<CoefficientTable> {
    let bad_primes: Vec<u64> = locals.iter().map(|d| d.p).collect();
    let good: Vec<u64> = primes_up_to(m)
        .into_iter()
        .filter(|p| !bad_primes.contains(p))
        .collect();
    let aps: Vec<(u64, i64)> = good
        .par_iter()
        .map(|&p| ap_good(minimal, p).map(|ap| (p, ap)))
        .collect::<Result<_>>()?;
    let map: BTreeMap<u64, i64> = aps.into_iter().collect();
    extend_multiplicative(&map, locals, m)
}

/// Smallest M such that the crude coefficient tail bound
/// sum_{n>M} 2 d(n) sqrt(n) exp(-2 pi n min(t0, 1/t0) / sqrt(N))
/// with d(n) <= n^0.6 falls below `target_abs_error`, then doubled as a
/// safety factor.
pub fn choose_truncation(conductor: u64, target_abs_error: f64, t0: f64) -> usize {
    assert!(target_abs_error > 0.0 && t0 > 0.0);
    let c = 2.0 * std::f64::consts::PI * t0.min(1.0 / t0) / (conductor as f64).sqrt();
    let term = |n: f64| 2.0 * n.powf(1.1) * (-c * n).exp();
    // The terms decay by at least e^{-c}; bound the remainder geometrically.
    let tail = |m: usize| -> f64 {
        let mut sum = 0.0;
        let mut n = m as f64 + 1.0;
        loop {
            let t = term(n);
            sum += t;
            if t < target_abs_error * 1e-6 && n > m as f64 + 4.0 / c {
                let ratio = (-c).exp() * ((n + 1.0) / n).powf(1.1);
                sum += t * ratio / (1.0 - ratio);
                return sum;
            }
            n += 1.0;
        }
    };
    let mut m = 1usize;
    while tail(m) >= target_abs_error {
        m += 1;
        assert!(m < 100_000_000, "truncation bound exploded");
    }
    2 * m
}

/// The tail bound achieved by a given M (used to report the honest error
/// budget when a user-supplied table is shorter than requested).
pub fn truncation_tail_bound(conductor: u64, m: usize, t0: f64) -> f64 {
    let c = 2.0 * std::f64::consts::PI * t0.min(1.0 / t0) / (conductor as f64).sqrt();
    let mut sum = 0.0;
    let mut n = m as f64 + 1.0;
    let mut last;
    loop {
        last = 2.0 * n.powf(1.1) * (-c * n).exp();
        sum += last;
        if last < sum * 1e-17 + 1e-300 || n > m as f64 + 200.0 / c {
            break;
        }
        n += 1.0;
    }
    sum
}
