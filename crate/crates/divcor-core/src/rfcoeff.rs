//! Ramanujan expansion coefficients of the k-fold divisor function and the
//! exact local quantities derived from them: the multiplicative part M_k(q),
//! the normalized coefficients A_{k,l}(q), and the sigma factors that appear
//! in the Ng-Thom form of the singular series.
//!
//! Every infinite p-adic series here is a tail of the binomial generating
//! function sum_a binom(k+a-2, k-2) x^a = (1-x)^(-(k-1)) at x = 1/p, so it
//! is evaluated exactly as the full series minus a finite partial sum. No
//! floating point enters until a coefficient is converted for output.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::arith::{is_prime, Factorization};
use crate::{fmath, Error, Result, SignMode};

/// Largest k or l the rational layer accepts. The binomial weights grow so
/// fast that anything near this bound is already far outside sensible use;
/// the cap keeps internal loops short and failure modes explicit.
pub const MAX_ORDER: u32 = 64;

pub(crate) fn check_order(k: u32) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidArgument("order k must be >= 1"))
    } else if k > MAX_ORDER {
        Err(Error::InvalidArgument("order k exceeds MAX_ORDER"))
    } else {
        Ok(())
    }
}

/// (p - 1) / p as an exact rational.
pub(crate) fn one_minus_inv(p: u64) -> BigRational {
    BigRational::new(BigInt::from(p - 1), BigInt::from(p))
}

/// base^exp for small exponents of either sign. base must be nonzero when
/// exp < 0.
pub(crate) fn ratio_pow(base: &BigRational, exp: i32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc.recip()
    } else {
        acc
    }
}

pub(crate) fn big_pow(p: u64, e: u32) -> BigInt {
    Pow::pow(BigInt::from(p), e)
}

/// binom(n, r) exactly; requires n >= r.
pub(crate) fn big_binomial(n: u64, r: u64) -> BigInt {
    debug_assert!(n >= r);
    binomial(BigInt::from(n), BigInt::from(r))
}

/// Nearest-f64 view of an exact rational, for reporting and plotting.
///
/// Every rational this crate produces has modest magnitude; the conversion
/// only fails outside f64 range, which we treat as a programming error.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// One coefficient of the Ramanujan expansion of tau_k.
///
/// `mult_part` is the exact rational M_k(q); `value` is the real coefficient
/// sign * (log q)^(k-1) / ((k-1)! q) * M_k(q) with the sign supplied by the
/// chosen [`SignMode`].
#[derive(Debug, Clone, PartialEq)]
pub struct RfCoefficient {
    pub k: u32,
    pub q: u64,
    pub mult_part: BigRational,
    pub value: f64,
}

/// The tail sum_{a >= j} binom(k+a-2, k-2) p^(j-a), exactly.
///
/// Closed form: p^j * ((1-1/p)^(-(k-1)) - sum_{a < j} binom(k+a-2, k-2) p^(-a)).
pub fn tail_sum(k: u32, p: u64, j: u32) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "tail_sum: k must be >= 2 (lower k is handled by convention at the call sites)",
        ));
    }
    check_order(k)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(tail_sum_inner(k, p, j))
}

pub(crate) fn tail_sum_inner(k: u32, p: u64, j: u32) -> BigRational {
    debug_assert!((2..=MAX_ORDER).contains(&k));
    let x = BigRational::new(BigInt::one(), BigInt::from(p));
    let full = ratio_pow(&one_minus_inv(p), -((k - 1) as i32));
    let mut partial = BigRational::zero();
    let mut xpow = BigRational::one();
    for a in 0..j {
        let b = big_binomial(k as u64 + a as u64 - 2, k as u64 - 2);
        partial += BigRational::from_integer(b) * &xpow;
        xpow *= &x;
    }
    BigRational::from_integer(big_pow(p, j)) * (full - partial)
}

/// The multiplicative part M_k(q) = prod_{p^v || q} (1-1/p)^(k-1) tail_sum(k, p, v).
///
/// M_1(q) is 1 at q = 1 and 0 otherwise (the binomial convention empties the
/// tail), and M_2 is identically 1: each local factor telescopes to
/// (1-1/p) * p/(p-1).
pub fn mult_part(k: u32, q: &Factorization) -> Result<BigRational> {
    check_order(k)?;
    if k == 1 {
        return Ok(if q.is_one() {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    let mut acc = BigRational::one();
    for &(p, v) in q.factors() {
        acc *= ratio_pow(&one_minus_inv(p), (k - 1) as i32) * tail_sum_inner(k, p, v);
    }
    Ok(acc)
}

/// The q-th coefficient of the Ramanujan expansion of tau_k.
///
/// For k >= 2 the value at q = 1 is 0 because of the log factor; the k = 1
/// expansion is the single term at q = 1.
pub fn rf_coefficient(k: u32, q: u64, mode: SignMode) -> Result<RfCoefficient> {
    if q == 0 {
        return Err(Error::InvalidArgument("rf_coefficient: q must be >= 1"));
    }
    let fq = Factorization::of(q)?;
    let m = mult_part(k, &fq)?;
    // (log q)^(k-1) / (k-1)! as a product of log(q)/i factors, which stays
    // finite for any k instead of overflowing numerator and denominator
    // separately.
    let lq = fmath::ln(q as f64);
    let mut scale = 1.0 / q as f64;
    for i in 1..k {
        scale *= lq / i as f64;
    }
    let value = mode.coefficient_sign(k) * scale * ratio_to_f64(&m);
    // The q = 1, k >= 2 coefficient is an exact zero; drop the sign bit the
    // product left on it.
    let value = if value == 0.0 { 0.0 } else { value };
    Ok(RfCoefficient {
        k,
        q,
        mult_part: m,
        value,
    })
}

/// The local sigma factor sigma_k(p^j, 1) = (1-1/p)^k sum_{i>=0} tau_k(p^(j+i)) p^(-i).
///
/// Evaluated through its own closed form
/// p^j * (1 - (1-1/p)^k sum_{a < j} binom(k+a-1, k-1) p^(-a)), deliberately
/// not routed through [`tail_sum`], so agreement between the two singular
/// series forms is a check of independently coded expressions.
pub fn sigma_local(k: u32, p: u64, j: u32) -> Result<BigRational> {
    if k > MAX_ORDER {
        return Err(Error::InvalidArgument("order k exceeds MAX_ORDER"));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(sigma_local_inner(k, p, j))
}

pub(crate) fn sigma_local_inner(k: u32, p: u64, j: u32) -> BigRational {
    if k == 0 {
        // tau_0 vanishes away from 1, so only j = 0 survives.
        return if j == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    let x = BigRational::new(BigInt::one(), BigInt::from(p));
    let mut partial = BigRational::zero();
    let mut xpow = BigRational::one();
    for a in 0..j {
        let b = big_binomial(k as u64 + a as u64 - 1, k as u64 - 1);
        partial += BigRational::from_integer(b) * &xpow;
        xpow *= &x;
    }
    let scaled = ratio_pow(&one_minus_inv(p), k as i32) * partial;
    BigRational::from_integer(big_pow(p, j)) * (BigRational::one() - scaled)
}

/// The normalized coefficient A_{k,l}(p^j) = (1-1/p)^(k+l-2) tail_sum(k, p, j) tail_sum(l, p, j).
///
/// Zero when k = 1 or l = 1 (the corresponding expansion has no terms past
/// q = 1). Satisfies A_{k,l}(p^j) = sigma_{k-1}(p^j, 1) sigma_{l-1}(p^j, 1).
pub fn a_local(k: u32, l: u32, p: u64, j: u32) -> Result<BigRational> {
    check_order(k)?;
    check_order(l)?;
    if j == 0 {
        return Err(Error::InvalidArgument("a_local: j must be >= 1"));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(a_local_inner(k, l, p, j))
}

pub(crate) fn a_local_inner(k: u32, l: u32, p: u64, j: u32) -> BigRational {
    debug_assert!(j >= 1);
    if k == 1 || l == 1 {
        return BigRational::zero();
    }
    ratio_pow(&one_minus_inv(p), (k + l - 2) as i32)
        * tail_sum_inner(k, p, j)
        * tail_sum_inner(l, p, j)
}

/// A_{k,l}(q) as the product of [`a_local`] over the prime powers of q.
pub fn a_of_q(k: u32, l: u32, q: &Factorization) -> Result<BigRational> {
    check_order(k)?;
    check_order(l)?;
    let mut acc = BigRational::one();
    for &(p, v) in q.factors() {
        acc *= a_local_inner(k, l, p, v);
    }
    Ok(acc)
}
