//! Assemble the conductor from per-prime local data of the minimal model.

use num_bigint::BigUint;

use super::{minimal_model, tate_local, LocalData, WeierstrassCurve};
use crate::arith::factor_bigint;
use crate::error::Result;

/// The conductor N = prod p^{f_p}, with its factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conductor {
    pub value: BigUint,
    pub factorization: Vec<(u64, u32)>,
}

impl Conductor {
    /// N as a u64; desk-scale conductors always fit.
    pub fn to_u64(&self) -> Option<u64> {
        use num_traits::ToPrimitive;
        self.value.to_u64()
    }
}

/// Conductor of an arbitrary integral model (reduced to its minimal model
/// internally).
pub fn conductor(e: &WeierstrassCurve) -> Result<Conductor> {
    conductor_with_local_data(e).map(|(c, _)| c)
}

/// Conductor plus the per-prime local data it was assembled from. The local
/// data covers exactly the primes dividing the minimal discriminant.
pub fn conductor_with_local_data(e: &WeierstrassCurve) -> Result<(Conductor, Vec<LocalData>)> {
    let minimal = minimal_model(e)?;
    let disc_primes = factor_bigint(&minimal.curve.disc)?;
    let mut value = BigUint::from(1u32);
    let mut factorization = Vec::new();
    let mut locals = Vec::new();
    for (p, _) in disc_primes {
        let data = tate_local(&minimal.curve, p)?;
        if data.exponent > 0 {
            value *= BigUint::from(p).pow(data.exponent);
            factorization.push((p, data.exponent));
        }
        locals.push(data);
    }
    Ok((
        Conductor {
            value,
            factorization,
        },
        locals,
    ))
}
