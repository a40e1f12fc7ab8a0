//! The singular series of the shifted divisor correlation: the global
//! constant C_{k,l}, the local correction f_{k,l}(h) at primes dividing the
//! shift, and their product B_{k,l}(h), in two independently coded forms.
//!
//! The first form assembles each Euler factor from Ramanujan-sum values and
//! the normalized coefficients A_{k,l}(p^j); the second is the Ng-Thom form
//! built from sigma factors. `verify_theorem1` checks the two against each
//! other in exact rational arithmetic over a parameter grid; under the
//! corrected sign convention they agree identically, under the original
//! Lucht sign they do not, which is the point of the comparison switch.
//!
//! C_{k,l} is a convergent but generally irrational Euler product, so it is
//! the one quantity here that is reported as a float truncation with an
//! explicit tail bound instead of an exact rational.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{
    factorize, first_n_primes, is_prime, mobius_table, ramanujan_sum, sieve_primes,
    smallest_prime_factors, Factorization,
};
use crate::rfcoeff::{
    a_local_inner, a_of_q, big_pow, check_order, one_minus_inv, ratio_pow, ratio_to_f64,
    sigma_local_inner,
};
use crate::{fmath, Error, Result, SignMode};

/// Hard ceiling for the Euler-product cutoff search in [`c_constant`].
pub const MAX_PRIME_CUTOFF: u64 = 1 << 27;

/// Which of the two equivalent singular-series expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Rf,
    NgThom,
}

/// The exact local data of the singular series at one prime.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactorValue {
    pub p: u64,
    pub form: Form,
    /// The p-factor of C_{k,l}. Always in (0, 1] under the corrected sign;
    /// exactly 1 when k = 1 or l = 1.
    pub c_factor: BigRational,
    /// The p-factor of f_{k,l}(h); present only when p divides h.
    pub f_factor: Option<BigRational>,
}

/// Truncated Euler-product value of C_{k,l} with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CConstant {
    pub value: f64,
    pub tail_bound: f64,
    pub prime_cutoff: u64,
}

/// B_{k,l}(h) = C_{k,l} * f_{k,l}(h) with the exact and truncated parts kept
/// separate.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSeriesResult {
    pub k: u32,
    pub l: u32,
    pub h: u64,
    pub c_truncated: f64,
    pub c_tail_bound: f64,
    pub f_exact: BigRational,
    pub b: f64,
    pub prime_cutoff: u64,
}

/// One grid point where the two singular-series forms disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub k: u32,
    pub l: u32,
    pub p: u64,
    /// `None` for a C-factor row (no shift valuation involved), `Some(a)`
    /// for the f-factor at nu_p(h) = a.
    pub alpha: Option<u32>,
    pub kind: MismatchKind,
    pub rf: BigRational,
    pub ng_thom: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchKind {
    CFactor,
    FFactor,
}

/// Outcome of an exact equivalence sweep between the two forms.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremOneReport {
    pub checks: u64,
    pub mismatches: Vec<Mismatch>,
}

impl TheoremOneReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The p-factor of C_{k,l} assembled from Ramanujan-sum data:
/// 1 - S * (1 - (1-1/p)^(k-1)) (1 - (1-1/p)^(l-1)), where S is the local
/// sign of `mode` (so +1 corrected, -1 original).
pub fn c_factor_rf(k: u32, l: u32, p: u64, mode: SignMode) -> Result<BigRational> {
    check_order(k)?;
    check_order(l)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(c_factor_rf_inner(k, l, p, mode))
}

fn c_factor_rf_inner(k: u32, l: u32, p: u64, mode: SignMode) -> BigRational {
    let w = one_minus_inv(p);
    let t = (BigRational::one() - ratio_pow(&w, (k - 1) as i32))
        * (BigRational::one() - ratio_pow(&w, (l - 1) as i32));
    let signed = if mode.local_sign() < 0 { -t } else { t };
    BigRational::one() - signed
}

/// The p-factor of C_{k,l} in the Ng-Thom form:
/// (1-1/p)^(k-1) + (1-1/p)^(l-1) - (1-1/p)^(k+l-2).
pub fn c_factor_ngthom(k: u32, l: u32, p: u64) -> Result<BigRational> {
    check_order(k)?;
    check_order(l)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(c_factor_ngthom_inner(k, l, p))
}

fn c_factor_ngthom_inner(k: u32, l: u32, p: u64) -> BigRational {
    let w = one_minus_inv(p);
    ratio_pow(&w, (k - 1) as i32) + ratio_pow(&w, (l - 1) as i32)
        - ratio_pow(&w, (k + l - 2) as i32)
}

/// Float Euler product of the C factors over primes up to `cutoff`,
/// multiplied in ascending prime order so repeated runs are bit-identical.
fn euler_product(k: u32, l: u32, cutoff: u64, mode: SignMode) -> Result<f64> {
    let sign = mode.local_sign() as f64;
    let mut product = 1.0f64;
    for p in sieve_primes(cutoff)? {
        let w = 1.0 - 1.0 / p as f64;
        let t = (1.0 - fmath::powi(w, (k - 1) as i32)) * (1.0 - fmath::powi(w, (l - 1) as i32));
        product *= 1.0 - sign * t;
    }
    Ok(product)
}

/// C_{k,l} as a truncated Euler product.
///
/// Each omitted factor differs from 1 by theta_p with
/// theta_p <= (k-1)(l-1)/p^2 (Bernoulli on both inner factors), and
/// sum_{p > P} theta_p <= (k-1)(l-1)/P =: s by integral comparison. The
/// multiplicative tail then sits within value * s * (1+s) of the truncation
/// once s <= 1, in both sign modes. The cutoff starts at 100 and doubles
/// until the bound drops below `tol`.
pub fn c_constant(k: u32, l: u32, tol: f64, mode: SignMode) -> Result<CConstant> {
    check_order(k)?;
    check_order(l)?;
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::ToleranceOutOfRange(tol));
    }
    if k == 1 || l == 1 {
        // Every factor is exactly 1.
        return Ok(CConstant {
            value: 1.0,
            tail_bound: 0.0,
            prime_cutoff: 2,
        });
    }
    let strength = (k - 1) as f64 * (l - 1) as f64;
    let mut cutoff = 100u64;
    loop {
        let value = euler_product(k, l, cutoff, mode)?;
        let s = strength / cutoff as f64;
        let bound = fmath::abs(value) * s * (1.0 + s);
        if s <= 1.0 && bound <= tol {
            return Ok(CConstant {
                value,
                tail_bound: bound,
                prime_cutoff: cutoff,
            });
        }
        if cutoff >= MAX_PRIME_CUTOFF {
            return Err(Error::CutoffExceeded {
                cutoff,
                partial_value: value,
                achieved_bound: bound,
            });
        }
        cutoff = (cutoff * 2).min(MAX_PRIME_CUTOFF);
    }
}

/// The p-factor of f_{k,l}(h) for p^alpha || h, assembled from
/// Ramanujan-sum values c_{p^j}(h) and the normalized coefficients:
///
///   (1 + sum_{1<=j<=alpha} (p^j - p^(j-1)) S A(p^j) / p^(2j)
///      - p^alpha S A(p^(alpha+1)) / p^(2(alpha+1))) / c_factor_rf.
pub fn f_factor_rf(k: u32, l: u32, p: u64, alpha: u32, mode: SignMode) -> Result<BigRational> {
    check_order(k)?;
    check_order(l)?;
    if alpha == 0 {
        return Err(Error::InvalidArgument("f_factor_rf: alpha must be >= 1"));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(f_factor_rf_inner(k, l, p, alpha, mode))
}

fn f_factor_rf_inner(k: u32, l: u32, p: u64, alpha: u32, mode: SignMode) -> BigRational {
    let sign = BigRational::from_integer(mode.local_sign().into());
    let mut numerator = BigRational::one();
    for j in 1..=alpha {
        let phi = big_pow(p, j) - big_pow(p, j - 1);
        let weight = BigRational::new(phi, big_pow(p, 2 * j));
        numerator += weight * &sign * a_local_inner(k, l, p, j);
    }
    let last = BigRational::new(big_pow(p, alpha), big_pow(p, 2 * (alpha + 1)));
    numerator -= last * &sign * a_local_inner(k, l, p, alpha + 1);
    numerator / c_factor_rf_inner(k, l, p, mode)
}

/// The p-factor of f_{k,l}(h) in the Ng-Thom form, a telescoping sum of
/// sigma-factor products:
///
///   sum_{j=0}^{alpha} (sigma_{k-1}(p^j) sigma_{l-1}(p^j) / p^j
///                      - sigma_{k-1}(p^(j+1)) sigma_{l-1}(p^(j+1)) / p^(j+2))
///   / c_factor_ngthom.
pub fn f_factor_ngthom(k: u32, l: u32, p: u64, alpha: u32) -> Result<BigRational> {
    check_order(k)?;
    check_order(l)?;
    if alpha == 0 {
        return Err(Error::InvalidArgument(
            "f_factor_ngthom: alpha must be >= 1",
        ));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(f_factor_ngthom_inner(k, l, p, alpha))
}

fn f_factor_ngthom_inner(k: u32, l: u32, p: u64, alpha: u32) -> BigRational {
    let mut numerator = BigRational::zero();
    for j in 0..=alpha {
        let head = sigma_local_inner(k - 1, p, j) * sigma_local_inner(l - 1, p, j);
        let tail = sigma_local_inner(k - 1, p, j + 1) * sigma_local_inner(l - 1, p, j + 1);
        numerator += head / BigRational::from_integer(big_pow(p, j))
            - tail / BigRational::from_integer(big_pow(p, j + 2));
    }
    numerator / c_factor_ngthom_inner(k, l, p)
}

/// Exact local data at one prime; `h_valuation` is nu_p(h).
pub fn local_factor_value(
    k: u32,
    l: u32,
    p: u64,
    h_valuation: u32,
    form: Form,
    mode: SignMode,
) -> Result<LocalFactorValue> {
    check_order(k)?;
    check_order(l)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let c_factor = match form {
        Form::Rf => c_factor_rf_inner(k, l, p, mode),
        Form::NgThom => c_factor_ngthom_inner(k, l, p),
    };
    let f_factor = if h_valuation >= 1 {
        Some(match form {
            Form::Rf => f_factor_rf_inner(k, l, p, h_valuation, mode),
            Form::NgThom => f_factor_ngthom_inner(k, l, p, h_valuation),
        })
    } else {
        None
    };
    Ok(LocalFactorValue {
        p,
        form,
        c_factor,
        f_factor,
    })
}

/// f_{k,l}(h) as the product of the chosen form's local factors over the
/// prime powers of h. The sign mode only reaches the `Rf` form; the Ng-Thom
/// expression has no sign ambiguity.
pub fn f_of_h(k: u32, l: u32, h: &Factorization, form: Form, mode: SignMode) -> Result<BigRational> {
    check_order(k)?;
    check_order(l)?;
    let mut acc = BigRational::one();
    for &(p, alpha) in h.factors() {
        acc *= match form {
            Form::Rf => f_factor_rf_inner(k, l, p, alpha, mode),
            Form::NgThom => f_factor_ngthom_inner(k, l, p, alpha),
        };
    }
    Ok(acc)
}

/// Exact equivalence sweep of the two singular-series forms over
/// k <= k_max, l <= l_max, the first `prime_count` primes, and f-factor
/// valuations up to `alpha_max`. Disagreements come back as data, not
/// errors; under the corrected sign the list is empty.
pub fn verify_theorem1(
    k_max: u32,
    l_max: u32,
    prime_count: usize,
    alpha_max: u32,
    mode: SignMode,
) -> Result<TheoremOneReport> {
    check_order(k_max)?;
    check_order(l_max)?;
    let primes = first_n_primes(prime_count)?;
    let mut checks = 0u64;
    let mut mismatches = Vec::new();
    for k in 1..=k_max {
        for l in 1..=l_max {
            for &p in &primes {
                let c_rf = c_factor_rf_inner(k, l, p, mode);
                let c_ng = c_factor_ngthom_inner(k, l, p);
                checks += 1;
                if c_rf != c_ng {
                    mismatches.push(Mismatch {
                        k,
                        l,
                        p,
                        alpha: None,
                        kind: MismatchKind::CFactor,
                        rf: c_rf,
                        ng_thom: c_ng,
                    });
                }
                for alpha in 1..=alpha_max {
                    let f_rf = f_factor_rf_inner(k, l, p, alpha, mode);
                    let f_ng = f_factor_ngthom_inner(k, l, p, alpha);
                    checks += 1;
                    if f_rf != f_ng {
                        mismatches.push(Mismatch {
                            k,
                            l,
                            p,
                            alpha: Some(alpha),
                            kind: MismatchKind::FFactor,
                            rf: f_rf,
                            ng_thom: f_ng,
                        });
                    }
                }
            }
        }
    }
    Ok(TheoremOneReport { checks, mismatches })
}

/// B_{k,l}(h) = C_{k,l} * f_{k,l}(h) with C truncated to tolerance `tol`
/// and f exact.
pub fn b_via_euler(k: u32, l: u32, h: u64, tol: f64, mode: SignMode) -> Result<SingularSeriesResult> {
    if h == 0 {
        return Err(Error::InvalidArgument("b_via_euler: h must be >= 1"));
    }
    let c = c_constant(k, l, tol, mode)?;
    let f_exact = f_of_h(k, l, &factorize(h)?, Form::Rf, mode)?;
    let b = c.value * ratio_to_f64(&f_exact);
    Ok(SingularSeriesResult {
        k,
        l,
        h,
        c_truncated: c.value,
        c_tail_bound: c.tail_bound,
        f_exact,
        b,
        prime_cutoff: c.prime_cutoff,
    })
}

/// Divisors of prod p_i^(e_i) that do not exceed `cap`, ascending. The
/// product itself may overflow u64; the capped enumeration never does.
fn capped_divisors(factors: &[(u64, u32)], cap: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in factors {
        let base = out.clone();
        let mut pw = 1u64;
        for _ in 0..e {
            pw = match pw.checked_mul(p) {
                Some(v) if v <= cap => v,
                _ => break,
            };
            out.extend(base.iter().map(|&d| d * pw).filter(|&d| d <= cap));
        }
    }
    out.sort_unstable();
    out
}

/// B_{k,l}(h) as the partial sum over q <= q_max of
/// c_q(h) * A_{k,l}(q) / q^2, with A carrying one local sign per prime in
/// the original-sign mode.
///
/// Only q in the support of c_q(h) contribute: q = d * s with
/// d | prod_{p|h} p^(nu_p(h)+1) and s squarefree and coprime to h, in which
/// case c_q(h) = c_d(h) * mu(s). Terms are accumulated in ascending q order,
/// so a fixed argument list always reproduces the same float.
pub fn b_via_qsum(k: u32, l: u32, h: u64, q_max: u64, mode: SignMode) -> Result<f64> {
    check_order(k)?;
    check_order(l)?;
    if h == 0 {
        return Err(Error::InvalidArgument("b_via_qsum: h must be >= 1"));
    }
    if q_max == 0 {
        return Err(Error::InvalidArgument("b_via_qsum: q_max must be >= 1"));
    }
    let fh = factorize(h)?;
    let sign = mode.local_sign() as f64;
    let mu = mobius_table(q_max as usize);
    let spf = smallest_prime_factors(q_max as usize);

    // Local A values at single primes away from h, as floats; these carry
    // the q-dependence of the squarefree part.
    let a1 = |p: u64| -> f64 {
        let w = 1.0 - 1.0 / p as f64;
        let t = (1.0 - fmath::powi(w, (k - 1) as i32)) * (1.0 - fmath::powi(w, (l - 1) as i32));
        sign * (p * p) as f64 * t
    };

    let saturated: Vec<(u64, u32)> = fh
        .factors()
        .iter()
        .map(|&(p, e)| (p, e + 1))
        .collect();
    let mut terms: Vec<(u64, f64)> = Vec::new();
    for d in capped_divisors(&saturated, q_max) {
        let fd = factorize(d)?;
        let c_d = ramanujan_sum(d, h)? as f64;
        let a_d = ratio_to_f64(&a_of_q(k, l, &fd)?)
            * if fd.factors().len() % 2 == 1 { sign } else { 1.0 };
        if c_d == 0.0 {
            continue;
        }
        // s runs over squarefree integers coprime to h with d*s <= q_max;
        // build its A contribution prime by prime off the spf table.
        let s_cap = q_max / d;
        for s in 1..=s_cap {
            if mu[s as usize] == 0 {
                continue;
            }
            let mut a_s = 1.0f64;
            let mut rest = s as usize;
            let mut coprime = true;
            while rest > 1 {
                let p = spf[rest] as u64;
                if h % p == 0 {
                    coprime = false;
                    break;
                }
                a_s *= a1(p);
                // s is squarefree, so each prime divides rest exactly once.
                rest /= p as usize;
            }
            if !coprime {
                continue;
            }
            let q = d * s;
            let term = c_d * mu[s as usize] as f64 * a_d * a_s / (q as f64 * q as f64);
            terms.push((q, term));
        }
    }
    terms.sort_unstable_by_key(|&(q, _)| q);
    Ok(terms.into_iter().map(|(_, t)| t).sum())
}

/// X * (log X)^(k+l-2) / ((k-1)! (l-1)!), accumulated as a product of
/// log(X)/i factors so neither the power nor the factorial is formed alone.
pub(crate) fn main_term_scale(k: u32, l: u32, x: f64) -> f64 {
    let lx = fmath::ln(x);
    let mut main = x;
    for i in 1..k {
        main *= lx / i as f64;
    }
    for i in 1..l {
        main *= lx / i as f64;
    }
    main
}

/// The conjectured main term
/// B_{k,l}(h) * X * (log X)^(k+l-2) / ((k-1)! (l-1)!).
pub fn predict_main_term(k: u32, l: u32, h: u64, x: f64, tol: f64, mode: SignMode) -> Result<f64> {
    if !(x > core::f64::consts::E) {
        return Err(Error::InvalidArgument(
            "predict_main_term: X must exceed e",
        ));
    }
    let series = b_via_euler(k, l, h, tol, mode)?;
    Ok(series.b * main_term_scale(k, l, x))
}
