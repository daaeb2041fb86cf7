//! Integer utilities: modular arithmetic on machine words, deterministic
//! Miller-Rabin, Pollard rho (Brent variant), prime sieves, and factorization
//! of big-integer discriminants via trial division plus rho.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division bound used before handing the cofactor to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// (a * b) mod m without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a^e mod m by square-and-multiply.
pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Modular inverse of `a` mod prime `p` via Fermat.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Legendre symbol (a/p) for odd prime p, computed by Euler's criterion.
pub fn legendre(a: u64, p: u64) -> i64 {
    debug_assert!(p > 2);
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let r = pow_mod(a, (p - 1) / 2, p);
    if r == 1 {
        1
    } else {
        debug_assert_eq!(r, p - 1);
        -1
    }
}

/// Deterministic Miller-Rabin for u64.
///
/// The base set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to be
/// correct for all n < 3.3e24, which covers the full u64 range.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'bases: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with Brent's cycle detection. Returns a nontrivial factor of
/// composite odd `n`, or None if this parameterization failed.
fn rho_brent(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut ys);
    let mut y = 2u64;
    let mut d = 1u64;
    let mut q = 1u64;
    let mut r = 1u64;
    let m = 128;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        ys = y;
        while k < r && d == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            d = gcd_u64(q, n);
            k += m;
        }
        r *= 2;
        if d != 1 {
            break;
        }
        if r > 1 << 24 {
            return None;
        }
    }
    if d == n {
        // backtrack
        loop {
            ys = f(ys);
            d = gcd_u64(x.abs_diff(ys), n);
            if d > 1 {
                break;
            }
        }
    }
    if d > 1 && d < n {
        Some(d)
    } else {
        None
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Fully factor a u64 into (prime, exponent) pairs, sorted by prime.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut d = 7u64;
    let wheel = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut wi = 0;
    while d <= 1000 && d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += wheel[wi];
        wi = (wi + 1) % wheel.len();
    }
    // Remaining cofactor handled by recursive rho splitting.
    let mut stack = vec![n];
    let mut primes: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            primes.push(m);
            continue;
        }
        let mut split = None;
        for c in 1..32 {
            if let Some(d) = rho_brent(m, c) {
                split = Some(d);
                break;
            }
        }
        let d = split.expect("pollard rho failed on a 64-bit composite");
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    for p in primes {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => out.push((p, 1)),
        }
    }
    out.sort_unstable_by_key(|&(p, _)| p);
    out
}

/// Factor the absolute value of a big integer: trial division up to
/// [`TRIAL_DIVISION_BOUND`], then Miller-Rabin plus Pollard rho on the
/// cofactor. Errors with `FactorizationIncomplete` if the cofactor is larger
/// than 64 bits (never the case for the desk-scale discriminants this crate
/// targets).
pub fn factor_bigint(value: &BigInt) -> Result<Vec<(u64, u32)>> {
    let mut n: BigUint = value.abs().to_biguint().expect("abs is non-negative");
    if n.is_zero() {
        return Err(Error::InvalidRequest("cannot factor zero".into()));
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, e: u32, out: &mut Vec<(u64, u32)>| {
        if e > 0 {
            out.push((p, e));
        }
    };
    for p in small_primes_iter(TRIAL_DIVISION_BOUND) {
        if n.to_u64() == Some(1) {
            break;
        }
        let bp = BigUint::from(p);
        let mut e = 0u32;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        push(p, e, &mut out);
        // No factor below the bound can remain once p^2 exceeds n.
        if BigUint::from(p) * BigUint::from(p) > n {
            break;
        }
    }
    if let Some(rest) = n.to_u64() {
        if rest > 1 {
            for (p, e) in factor_u64(rest) {
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, acc)) => *acc += e,
                    None => out.push((p, e)),
                }
            }
        }
    } else {
        return Err(Error::FactorizationIncomplete {
            value: value.to_string(),
            cofactor: n.to_string(),
        });
    }
    out.sort_unstable_by_key(|&(p, _)| p);
    Ok(out)
}

/// Iterator over primes up to `bound` (inclusive), by incremental trial
/// division against the already-produced primes. Fine for the 1e6 bound used
/// in factorization.
fn small_primes_iter(bound: u64) -> impl Iterator<Item = u64> {
    let mut found: Vec<u64> = Vec::new();
    let mut next = 2u64;
    std::iter::from_fn(move || loop {
        if next > bound {
            return None;
        }
        let n = next;
        next += if n == 2 { 1 } else { 2 };
        if found
            .iter()
            .take_while(|&&p| p * p <= n)
            .all(|&p| n % p != 0)
        {
            found.push(n);
            return Some(n);
        }
    })
}

/// Sieve of Eratosthenes: primes up to `m` inclusive.
pub fn primes_up_to(m: usize) -> Vec<u64> {
    if m < 2 {
        return vec![];
    }
    let mut is_comp = vec![false; m + 1];
    let mut out = Vec::new();
    for i in 2..=m {
        if !is_comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= m {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for 0..=m (spf[0] = spf[1] = 0).
pub fn smallest_prime_factor(m: usize) -> Vec<u32> {
    let mut spf = vec![0u32; m + 1];
    for i in 2..=m {
        if spf[i] == 0 {
            let mut j = i;
            while j <= m {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Reduce a big integer into [0, p).
pub fn bigint_mod_u64(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((x % &m) + &m) % &m;
    r.to_u64().expect("residue fits in u64")
}

/// p-adic valuation of a nonzero big integer.
pub fn valuation(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero(), "valuation of zero is infinite");
    let bp = BigInt::from(p);
    let mut n = x.clone();
    let mut v = 0;
    while (&n % &bp).is_zero() {
        n /= &bp;
        v += 1;
    }
    v
}
