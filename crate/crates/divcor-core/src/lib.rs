//! Exact arithmetic for shifted divisor correlations.
//!
//! The library computes the three sides of the correlation story for the
//! k-fold divisor function tau_k:
//!
//! * [`arith`]: sieves, factorization, tau_k, and Ramanujan sums c_q(n),
//!   all in exact integer arithmetic.
//! * [`rfcoeff`]: the Ramanujan-Fourier expansion coefficients of tau_k and
//!   the normalized coefficient products A_{k,l}(q), with exact rational
//!   multiplicative parts.
//! * [`singular`]: the singular series B_{k,l}(h) = C_{k,l} * f_{k,l}(h) in
//!   two independently published forms (a Ramanujan-sum expansion form and
//!   the Ng-Thom form), compared in exact rational arithmetic, plus the
//!   leading-term prediction for the correlation sum.
//! * [`correl`]: exact brute-force correlation sums over sieved ranges and
//!   Carmichael-style orthogonality sums of two Ramanujan sums.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature to use it in that mode. Floating point only enters where a
//! value is genuinely real (logarithms, the truncated Euler product); every
//! local factor and every empirical sum is exact.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod correl;
pub mod rfcoeff;
pub mod singular;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use rfcoeff::ratio_to_f64;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside a function's documented domain.
    InvalidArgument(&'static str),
    /// A parameter that must be prime is not.
    NotPrime(u64),
    /// An allocation would exceed the configured memory budget.
    Capacity {
        requested_bytes: u128,
        budget_bytes: u64,
    },
    /// Tolerances must lie in (0, 0.1].
    ToleranceOutOfRange(f64),
    /// An exact integer result no longer fits its cell type.
    Overflow(&'static str),
    /// The Euler product cutoff hit its hard maximum before reaching the
    /// requested tolerance. Carries the partial result.
    CutoffExceeded {
        cutoff: u64,
        partial_value: f64,
        achieved_bound: f64,
    },
}

impl Error {
    /// True for resource-limit errors, which the CLI maps to a distinct
    /// exit status.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. } | Error::CutoffExceeded { .. })
    }
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::Capacity {
                requested_bytes,
                budget_bytes,
            } => write!(
                f,
                "allocation of {requested_bytes} bytes exceeds the memory budget of {budget_bytes} bytes"
            ),
            Error::ToleranceOutOfRange(tol) => {
                write!(f, "tolerance {tol} is outside (0, 0.1]")
            }
            Error::Overflow(what) => write!(f, "arithmetic overflow: {what}"),
            Error::CutoffExceeded {
                cutoff,
                partial_value,
                achieved_bound,
            } => write!(
                f,
                "prime cutoff limit reached at {cutoff} (partial value {partial_value}, tail bound {achieved_bound})"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

/// Cap on transient sieve allocations. The default (2 GiB) admits the
/// largest ranges the acceptance tests use with plenty of headroom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    pub max_bytes: u64,
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget {
            max_bytes: 2 * 1024 * 1024 * 1024,
        }
    }
}

impl MemoryBudget {
    pub fn new(max_bytes: u64) -> Self {
        MemoryBudget { max_bytes }
    }

    pub(crate) fn check(&self, requested_bytes: u128) -> Result<()> {
        if requested_bytes > self.max_bytes as u128 {
            Err(Error::Capacity {
                requested_bytes,
                budget_bytes: self.max_bytes,
            })
        } else {
            Ok(())
        }
    }
}

/// Sign convention for the expansion coefficients of tau_k.
///
/// `Corrected` is the convention under which the coefficient of c_q(n) is
/// (-1)^(k-1) (log q)^(k-1) / ((k-1)! q) times the multiplicative part; it
/// reproduces Ramanujan's classical expansion of the ordinary divisor
/// function at k = 2 and makes the two singular-series forms agree exactly.
/// `LuchtOriginal` keeps the sign (-1)^k found in the older literature; the
/// uncanceled sign propagates into every local factor of the singular
/// series, which is precisely what `verify_theorem1` and the correlation
/// ratios expose as wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignMode {
    #[default]
    Corrected,
    LuchtOriginal,
}

impl SignMode {
    /// Sign of the coefficient prefactor: (-1)^(k-1) or (-1)^k.
    pub fn coefficient_sign(self, k: u32) -> f64 {
        let exponent = match self {
            SignMode::Corrected => k + 1,
            SignMode::LuchtOriginal => k,
        };
        if exponent % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Sign carried into each local factor A_{k,l}(p^j) of the
    /// Ramanujan-sum-derived singular series.
    pub(crate) fn local_sign(self) -> i64 {
        match self {
            SignMode::Corrected => 1,
            SignMode::LuchtOriginal => -1,
        }
    }
}

/// Float helpers that resolve through num-traits, so the same code builds
/// with and without std (libm supplies the implementations when std is off).
pub(crate) mod fmath {
    use num_traits::Float;

    #[inline]
    pub(crate) fn ln(x: f64) -> f64 {
        Float::ln(x)
    }

    #[inline]
    pub(crate) fn powi(x: f64, e: i32) -> f64 {
        Float::powi(x, e)
    }

    #[inline]
    pub(crate) fn abs(x: f64) -> f64 {
        Float::abs(x)
    }
}
