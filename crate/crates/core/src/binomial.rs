//! Exact rational checks of the binomial sums behind the minus-branch
//! normalization and the proportionality factor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `sum_k C(l,k) / C(n,k) = (n+1)/(n-l+1)`
    A,
    /// `sum_k C(l,k) / C(n,k+1) = (n+1)/((n-l)(n+1-l))`
    B,
    /// `sum_k (n-k) C(l,k) / C(n,k+1) = (n+1)(n+2)/((l-n-1)(l-n-2))`
    C,
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Both sides of the identity in exact arithmetic.
pub fn binomial_identity(variant: Variant, n: i64, l: i64) -> Result<(BigRational, BigRational)> {
    if l < 0 || l > n {
        return Err(Error::Domain(format!("binomial identity needs 0 <= l <= n (n = {n}, l = {l})")));
    }
    if variant != Variant::A && l == n {
        return Err(Error::Domain(format!("variant {variant:?} needs n > l (n = {n}, l = {l})")));
    }
    let (nu, lu) = (n as u64, l as u64);
    let lhs = (0..=lu).fold(BigRational::zero(), |acc, k| {
        let term = match variant {
            Variant::A => ratio(binomial(lu, k), binomial(nu, k)),
            Variant::B => ratio(binomial(lu, k), binomial(nu, k + 1)),
            Variant::C => ratio(BigInt::from(nu - k) * binomial(lu, k), binomial(nu, k + 1)),
        };
        acc + term
    });
    let rhs = match variant {
        Variant::A => ratio(n + 1, n - l + 1),
        Variant::B => ratio(n + 1, (n - l) * (n + 1 - l)),
        Variant::C => ratio((n + 1) * (n + 2), (l - n - 1) * (l - n - 2)),
    };
    Ok((lhs, rhs))
}
