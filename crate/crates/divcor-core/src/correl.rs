//! Brute-force empirical side of the correlation conjecture: exact shifted
//! divisor sums over sieved tau tables, Carmichael orthogonality sums of two
//! Ramanujan sums, ratio reports against the predicted main term, and a
//! deliberately diagnostic truncated Ramanujan expansion.
//!
//! Everything empirical is exact integer arithmetic; floats appear only when
//! an exact sum is finally compared against a prediction.

use alloc::vec::Vec;

use num_integer::Integer;

use crate::arith::{ramanujan_sum, tau_k_sieve};
use crate::rfcoeff::rf_coefficient;
use crate::singular::{b_via_euler, main_term_scale};
use crate::{Error, MemoryBudget, Result, SignMode};

/// One empirical checkpoint: the exact correlation sum at X next to the
/// predicted main term.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub k: u32,
    pub l: u32,
    pub h: u64,
    pub x: u64,
    /// Exact sum over n <= X of tau_k(n) tau_l(n+h).
    pub empirical: u128,
    pub predicted: f64,
    pub ratio: f64,
}

/// A sweep over an ascending list of X values, with the deviation trend
/// statistic taken at the two endpoints. Intermediate X values are
/// informational.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRun {
    pub reports: Vec<CorrelationReport>,
    /// |ratio - 1| at the smallest X.
    pub deviation_at_x_min: f64,
    /// |ratio - 1| at the largest X.
    pub deviation_at_x_max: f64,
}

impl CorrelationRun {
    /// Whether the endpoint deviations shrank, i.e. the empirical/predicted
    /// ratio moved toward 1 as X grew.
    pub fn trend_improved(&self) -> bool {
        self.deviation_at_x_max < self.deviation_at_x_min
    }
}

/// The exact correlation sum sum_{n<=X} tau_k(n) tau_l(n+h).
///
/// Sieves tau_l out to X+h (reusing a single table when k = l) and
/// accumulates in 128 bits; every intermediate value is exact.
pub fn shifted_divisor_sum(
    k: u32,
    l: u32,
    x: u64,
    h: u64,
    budget: MemoryBudget,
) -> Result<u128> {
    if x == 0 {
        return Err(Error::InvalidArgument(
            "shifted_divisor_sum: X must be >= 1",
        ));
    }
    if h == 0 {
        return Err(Error::InvalidArgument(
            "shifted_divisor_sum: h must be >= 1",
        ));
    }
    let tables = TauTables::build(k, l, x, h, budget)?;
    let mut acc: u128 = 0;
    for n in 1..=x as usize {
        acc += tables.product_at(n, h as usize);
    }
    Ok(acc)
}

/// The sieved tau tables backing one correlation run. `shifted` covers
/// 1..=X+h for tau_l; `plain` covers 1..=X for tau_k and is omitted when
/// k = l, in which case `shifted` serves both roles.
struct TauTables {
    plain: Option<Vec<u32>>,
    shifted: Vec<u32>,
}

impl TauTables {
    fn build(k: u32, l: u32, x: u64, h: u64, budget: MemoryBudget) -> Result<Self> {
        let long = x + h + 1;
        // Peak residency: the convolution holds two u32 arrays of its own
        // length, and the k-sieve additionally runs beside the finished
        // l-table.
        let peak = if k == l {
            8 * long as u128
        } else {
            12 * long as u128
        };
        budget.check(peak)?;
        let shifted = tau_k_sieve(l, x + h, budget)?;
        let plain = if k == l {
            None
        } else {
            Some(tau_k_sieve(k, x, budget)?)
        };
        Ok(TauTables { plain, shifted })
    }

    #[inline]
    fn product_at(&self, n: usize, h: usize) -> u128 {
        let tk = match &self.plain {
            Some(table) => table[n],
            None => self.shifted[n],
        };
        tk as u128 * self.shifted[n + h] as u128
    }
}

/// The exact sum sum_{n<=X} c_{q1}(n) c_{q2}(n+h).
///
/// Ramanujan sums are periodic in n with period q, so both factors are
/// tabulated over one period and the sum is split into whole periods of
/// length lcm(q1, q2) plus a remainder. A whole period contributes exactly
/// q * c_q(h) when q1 = q2 = q and exactly 0 otherwise.
pub fn carmichael_sum(q1: u64, q2: u64, x: u64, h: u64, budget: MemoryBudget) -> Result<i128> {
    if q1 == 0 || q2 == 0 {
        return Err(Error::InvalidArgument(
            "carmichael_sum: moduli must be >= 1",
        ));
    }
    if x == 0 {
        return Err(Error::InvalidArgument("carmichael_sum: X must be >= 1"));
    }
    budget.check(8 * (q1 as u128 + q2 as u128 + 2))?;
    let table1 = ramanujan_period_table(q1)?;
    let table2 = ramanujan_period_table(q2)?;

    let g = q1.gcd(&q2);
    let (whole_periods, remainder) = match (q1 / g).checked_mul(q2) {
        Some(period) if period <= x => (x / period, x % period),
        _ => (0, x),
    };

    let mut acc: i128 = 0;
    if whole_periods > 0 && q1 == q2 {
        let c_h = ramanujan_sum(q1, h % q1)?;
        acc = whole_periods as i128 * q1 as i128 * c_h as i128;
    }
    // The remainder indices sit after the whole periods, but periodicity
    // lets them be folded down to 1..=remainder.
    for n in 1..=remainder {
        let a = table1[(n % q1) as usize];
        let b = table2[((n % q2 + h % q2) % q2) as usize];
        acc += a as i128 * b as i128;
    }
    Ok(acc)
}

/// c_q(r) for r in 0..q.
fn ramanujan_period_table(q: u64) -> Result<Vec<i64>> {
    let mut table = Vec::with_capacity(q as usize);
    for r in 0..q {
        table.push(ramanujan_sum(q, r)?);
    }
    Ok(table)
}

/// Exact correlation sums at each checkpoint in `x_list` (strictly
/// ascending), each compared against the predicted main term. One sieve
/// pass serves all checkpoints, and one singular-series evaluation serves
/// all predictions.
pub fn correlation_report(
    k: u32,
    l: u32,
    h: u64,
    x_list: &[u64],
    tol: f64,
    mode: SignMode,
    budget: MemoryBudget,
) -> Result<CorrelationRun> {
    let Some((&x_min, &x_max)) = x_list.first().zip(x_list.last()) else {
        return Err(Error::InvalidArgument(
            "correlation_report: X list must be nonempty",
        ));
    };
    if x_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "correlation_report: X list must be strictly ascending",
        ));
    }
    if x_min < 3 {
        return Err(Error::InvalidArgument(
            "correlation_report: every X must exceed e",
        ));
    }
    if h == 0 {
        return Err(Error::InvalidArgument("correlation_report: h must be >= 1"));
    }

    let series = b_via_euler(k, l, h, tol, mode)?;
    let tables = TauTables::build(k, l, x_max, h, budget)?;

    let mut reports = Vec::with_capacity(x_list.len());
    let mut acc: u128 = 0;
    let mut next = 0usize;
    for n in 1..=x_max as usize {
        acc += tables.product_at(n, h as usize);
        if n as u64 == x_list[next] {
            let x = x_list[next];
            let predicted = series.b * main_term_scale(k, l, x as f64);
            reports.push(CorrelationReport {
                k,
                l,
                h,
                x,
                empirical: acc,
                predicted,
                ratio: acc as f64 / predicted,
            });
            next += 1;
        }
    }
    debug_assert_eq!(next, x_list.len());

    let deviation = |r: &CorrelationReport| (r.ratio - 1.0).abs();
    Ok(CorrelationRun {
        deviation_at_x_min: deviation(&reports[0]),
        deviation_at_x_max: deviation(reports.last().expect("nonempty by validation")),
        reports,
    })
}

/// Partial Ramanujan expansion sum_{q<=Q} tau_k-coefficient(q) * c_q(n),
/// accumulated in ascending q order. The expansion converges only
/// conditionally, so the summation order is part of the definition; this is
/// a diagnostic, not an approximation with a guarantee.
pub fn rf_truncated(k: u32, n: u64, q_max: u64, mode: SignMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("rf_truncated: n must be >= 1"));
    }
    if q_max == 0 {
        return Err(Error::InvalidArgument("rf_truncated: Q must be >= 1"));
    }
    let mut total = 0.0f64;
    for q in 1..=q_max {
        let coeff = rf_coefficient(k, q, mode)?;
        if coeff.value != 0.0 {
            total += coeff.value * ramanujan_sum(q, n)? as f64;
        }
    }
    Ok(total)
}
