//! Elementary multiplicative number theory in exact integer arithmetic:
//! prime sieves, factorization, the k-fold divisor function tau_k, Euler's
//! phi, the Moebius function, and Ramanujan sums.
//!
//! Ramanujan sums are evaluated with Hoelder's formula
//! c_q(n) = mu(q/g) * phi(q) / phi(q/g) with g = gcd(q, n); the
//! root-of-unity definition appears only as a test oracle. tau_k values come
//! either from a factorization (tau_k(p^j) = binom(k+j-1, k-1)) or from a
//! sieve that applies k-1 divisor-convolution passes to a table of ones.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::{binomial, Integer};

use crate::{Error, MemoryBudget, Result};

/// Hard cap on `sieve_primes` ranges, to catch nonsense requests before
/// attempting a multi-gigabyte allocation.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 31;

/// A positive integer together with its sorted prime factorization.
///
/// Invariants: primes strictly increasing, every exponent at least 1, the
/// product of the prime powers equals `value`, and `value == 1` exactly when
/// the factor list is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Factor `n` by trial division. `n = 0` is a domain error.
    pub fn of(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("factorize: n must be positive"));
        }
        let mut rest = n;
        let mut factors = Vec::new();
        let mut d = 2u64;
        while d.saturating_mul(d) <= rest {
            if rest % d == 0 {
                let mut e = 0u32;
                while rest % d == 0 {
                    rest /= d;
                    e += 1;
                }
                factors.push((d, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Ok(Factorization { value: n, factors })
    }

    pub fn one() -> Self {
        Factorization {
            value: 1,
            factors: Vec::new(),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Prime-exponent pairs in increasing prime order.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// nu_p(value): the exponent of `p` in `value`.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// All divisors of `value`, sorted ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let base = out.clone();
            let mut pw = 1u64;
            for _ in 0..e {
                pw *= p;
                out.extend(base.iter().map(|&d| d * pw));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Factor `n`. See [`Factorization::of`].
pub fn factorize(n: u64) -> Result<Factorization> {
    Factorization::of(n)
}

/// All primes `<= limit`, ascending. Limits below 2 yield an empty list.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Ok(Vec::new());
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Capacity {
            requested_bytes: limit as u128 + 1,
            budget_bytes: MAX_SIEVE_LIMIT,
        });
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut m = i * i;
            while m <= n {
                composite[m] = true;
                m += i;
            }
        }
    }
    Ok(primes)
}

/// The first `count` primes.
pub fn first_n_primes(count: usize) -> Result<Vec<u64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    // p_n < n (ln n + ln ln n) for n >= 6; pad generously below that.
    let n = count as f64;
    let mut limit = if count < 6 {
        16
    } else {
        (n * (crate::fmath::ln(n) + crate::fmath::ln(crate::fmath::ln(n)))) as u64 + 16
    };
    loop {
        let mut primes = sieve_primes(limit)?;
        if primes.len() >= count {
            primes.truncate(count);
            return Ok(primes);
        }
        limit *= 2;
    }
}

/// Smallest-prime-factor table for 0..=limit (entries 0 and 1 are 0), built
/// with a linear sieve. Used for bulk factorization.
pub(crate) fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i);
        }
        for &p in &primes {
            if p > spf[i] as usize || i * p > limit {
                break;
            }
            spf[i * p] = p as u32;
        }
    }
    spf
}

/// Moebius table for 0..=limit derived from a smallest-prime-factor table.
pub(crate) fn mobius_table(limit: usize) -> Vec<i8> {
    let spf = smallest_prime_factors(limit);
    let mut mu = vec![0i8; limit + 1];
    if limit >= 1 {
        mu[1] = 1;
    }
    for i in 2..=limit {
        let p = spf[i] as usize;
        let rest = i / p;
        mu[i] = if rest % p == 0 { 0 } else { -mu[rest] };
    }
    mu
}

/// Euler's totient from a factorization.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product()
}

/// Moebius mu from a factorization.
pub fn moebius(f: &Factorization) -> i64 {
    let mut sign = 1i64;
    for &(_, e) in f.factors() {
        if e >= 2 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// Deterministic primality by trial division. Intended for parameter
/// validation, not for bulk work.
pub fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// tau_k(n) from a factorization: the number of ordered k-tuples of positive
/// integers with product n, so tau_k(p^j) = binom(k+j-1, k-1).
///
/// k = 0 follows the convention tau_0(1) = 1 and tau_0(n) = 0 otherwise,
/// which the sigma factors of the singular series rely on.
pub fn tau_k_at(k: u32, f: &Factorization) -> u64 {
    if k == 0 {
        return if f.is_one() { 1 } else { 0 };
    }
    f.factors()
        .iter()
        .map(|&(_, j)| binomial(k as u64 + j as u64 - 1, k as u64 - 1))
        .product()
}

/// Sieve tau_k(n) for 1 <= n <= n_max; entry 0 of the result is unused and
/// holds 0. Applies k-1 divisor-convolution passes, each O(n log n), using
/// two u32 arrays. For k <= 5 and n_max around 10^7 the values stay far
/// inside u32.
pub fn tau_k_sieve(k: u32, n_max: u64, budget: MemoryBudget) -> Result<Vec<u32>> {
    if k == 0 {
        return Err(Error::InvalidArgument("tau_k_sieve: k must be >= 1"));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("tau_k_sieve: n_max must be >= 1"));
    }
    let bytes = 8u128 * (n_max as u128 + 1);
    budget.check(bytes)?;
    let len = usize::try_from(n_max).map_err(|_| Error::Capacity {
        requested_bytes: bytes,
        budget_bytes: budget.max_bytes,
    })? + 1;
    let mut tau = vec![1u32; len];
    tau[0] = 0;
    for _ in 1..k {
        let mut next = vec![0u32; len];
        for d in 1..len {
            let t = tau[d];
            let mut m = d;
            while m < len {
                // Checked even in release builds: for large k the values
                // genuinely outgrow the 32-bit cells.
                next[m] = next[m].checked_add(t).ok_or(Error::Overflow(
                    "tau_k_sieve: tau value exceeds the 32-bit table cell",
                ))?;
                m += d;
            }
        }
        tau = next;
    }
    Ok(tau)
}

/// Ramanujan sum c_q(n) by Hoelder's formula. n = 0 is allowed and gives
/// phi(q). q = 0 is a domain error.
pub fn ramanujan_sum(q: u64, n: u64) -> Result<i64> {
    if q == 0 {
        return Err(Error::InvalidArgument("ramanujan_sum: q must be >= 1"));
    }
    if q > i64::MAX as u64 {
        return Err(Error::InvalidArgument("ramanujan_sum: q exceeds i64 range"));
    }
    let g = q.gcd(&n);
    let d = q / g;
    let fd = Factorization::of(d)?;
    let mu = moebius(&fd);
    if mu == 0 {
        return Ok(0);
    }
    let fq = Factorization::of(q)?;
    // d | q, so phi(d) | phi(q) and the division is exact.
    let quotient = euler_phi(&fq) / euler_phi(&fd);
    Ok(mu * quotient as i64)
}

/// c_{p^j}(h) by the closed prime-power evaluation: with nu = nu_p(h),
/// the value is p^j - p^(j-1) for j <= nu, -p^nu for j = nu + 1, and 0
/// beyond. Requires p prime, j >= 1, h >= 1.
pub fn ramanujan_sum_prime_power(p: u64, j: u32, h: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if j == 0 {
        return Err(Error::InvalidArgument(
            "ramanujan_sum_prime_power: j must be >= 1",
        ));
    }
    if h == 0 {
        return Err(Error::InvalidArgument(
            "ramanujan_sum_prime_power: h must be >= 1",
        ));
    }
    if h > i64::MAX as u64 {
        return Err(Error::InvalidArgument(
            "ramanujan_sum_prime_power: h exceeds i64 range",
        ));
    }
    let nu = valuation_u64(h, p);
    Ok(if j <= nu {
        // p^j <= p^nu <= h, so these powers fit.
        (p.pow(j) - p.pow(j - 1)) as i64
    } else if j == nu + 1 {
        -(p.pow(nu) as i64)
    } else {
        0
    })
}

/// Exponent of `p` in `n` (n >= 1).
pub(crate) fn valuation_u64(n: u64, p: u64) -> u32 {
    debug_assert!(n >= 1 && p >= 2);
    let mut rest = n;
    let mut e = 0u32;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Test oracle: c_q(n) straight from the definition as a sum of
    /// primitive q-th roots of unity.
    fn ramanujan_exp_sum(q: u64, n: u64) -> i64 {
        let mut re = 0f64;
        let mut im = 0f64;
        for a in 1..=q {
            if a.gcd(&q) == 1 {
                let theta = core::f64::consts::TAU * (a as f64) * (n as f64) / (q as f64);
                re += theta.cos();
                im += theta.sin();
            }
        }
        assert!(
            im.abs() < 1e-9,
            "imaginary part {im} too large for q={q}, n={n}"
        );
        re.round() as i64
    }

    /// Test oracle: primality by exhaustive trial division.
    fn is_prime_naive(n: u64) -> bool {
        n >= 2 && (2..n).all(|d| n % d != 0)
    }

    #[test]
    fn sieve_matches_naive_primality_up_to_300() {
        let primes = sieve_primes(300).unwrap();
        let expected: Vec<u64> = (2..=300).filter(|&n| is_prime_naive(n)).collect();
        assert_eq!(primes, expected);
        assert_eq!(primes.iter().filter(|&&p| p <= 100).count(), 25);
    }

    #[test]
    fn sieve_small_limits() {
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert!(sieve_primes(1).unwrap().is_empty());
        assert!(sieve_primes(0).unwrap().is_empty());
    }

    #[test]
    fn sieve_limit_cap() {
        assert!(matches!(
            sieve_primes(MAX_SIEVE_LIMIT + 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn first_n_primes_prefixes() {
        assert_eq!(first_n_primes(0).unwrap(), Vec::<u64>::new());
        assert_eq!(first_n_primes(1).unwrap(), vec![2]);
        assert_eq!(
            first_n_primes(15).unwrap(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
        );
        assert_eq!(first_n_primes(1000).unwrap().len(), 1000);
        assert_eq!(*first_n_primes(1000).unwrap().last().unwrap(), 7919);
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(12).unwrap();
        assert_eq!(f.factors(), &[(2, 2), (3, 1)]);
        assert_eq!(f.value(), 12);
        assert!(factorize(1).unwrap().is_one());
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorization_invariants_hold_up_to_5000() {
        for n in 1..=5000u64 {
            let f = factorize(n).unwrap();
            let mut product = 1u64;
            let mut last_prime = 0u64;
            for &(p, e) in f.factors() {
                assert!(p > last_prime, "primes not strictly increasing for {n}");
                assert!(is_prime(p), "non-prime factor {p} of {n}");
                assert!(e >= 1);
                product *= p.pow(e);
                last_prime = p;
            }
            assert_eq!(product, n);
            assert_eq!(f.is_one(), n == 1);
        }
    }

    #[test]
    fn spf_table_yields_smallest_prime_factors() {
        let spf = smallest_prime_factors(2000);
        for n in 2..=2000usize {
            let smallest = (2..=n).find(|d| n % d == 0).unwrap();
            assert_eq!(spf[n] as usize, smallest, "n={n}");
        }
    }

    #[test]
    fn mobius_table_agrees_with_factorization() {
        let mu = mobius_table(2000);
        for n in 1..=2000u64 {
            assert_eq!(mu[n as usize] as i64, moebius(&factorize(n).unwrap()));
        }
    }

    #[test]
    fn divisors_are_sorted_and_complete() {
        let f = factorize(60).unwrap();
        assert_eq!(
            f.divisors(),
            vec![1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]
        );
        assert_eq!(factorize(1).unwrap().divisors(), vec![1]);
    }

    #[test]
    fn valuation_reads_exponents() {
        let f = factorize(360).unwrap();
        assert_eq!(f.valuation(2), 3);
        assert_eq!(f.valuation(3), 2);
        assert_eq!(f.valuation(5), 1);
        assert_eq!(f.valuation(7), 0);
    }

    #[test]
    fn tau_k_at_examples() {
        // tau_3(4) = binom(4, 2) = 6
        assert_eq!(tau_k_at(3, &factorize(4).unwrap()), 6);
        assert_eq!(tau_k_at(1, &factorize(360).unwrap()), 1);
        assert_eq!(tau_k_at(2, &factorize(6).unwrap()), 4);
        assert_eq!(tau_k_at(2, &factorize(1).unwrap()), 1);
        // tau_0 convention
        assert_eq!(tau_k_at(0, &factorize(1).unwrap()), 1);
        assert_eq!(tau_k_at(0, &factorize(4).unwrap()), 0);
    }

    /// Test oracle: tau_k by recursive divisor enumeration,
    /// tau_k = tau_{k-1} * 1 under Dirichlet convolution.
    fn tau_k_naive(k: u32, n: u64) -> u64 {
        if k == 0 {
            return (n == 1) as u64;
        }
        if k == 1 {
            return 1;
        }
        (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| tau_k_naive(k - 1, d))
            .sum()
    }

    #[test]
    fn tau_k_at_matches_divisor_enumeration() {
        for k in 0..=4u32 {
            for n in 1..=120u64 {
                assert_eq!(
                    tau_k_at(k, &factorize(n).unwrap()),
                    tau_k_naive(k, n),
                    "k={k}, n={n}"
                );
            }
        }
    }

    #[test]
    fn tau_k_is_multiplicative_on_coprime_pairs() {
        for k in 1..=4u32 {
            for m in 1..=100u64 {
                for n in 1..=100u64 {
                    if m.gcd(&n) == 1 {
                        let lhs = tau_k_at(k, &factorize(m * n).unwrap());
                        let rhs = tau_k_at(k, &factorize(m).unwrap())
                            * tau_k_at(k, &factorize(n).unwrap());
                        assert_eq!(lhs, rhs, "k={k}, m={m}, n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn tau_sieve_small_tables() {
        let budget = MemoryBudget::default();
        assert_eq!(tau_k_sieve(2, 6, budget).unwrap()[1..], [1, 2, 2, 3, 2, 4]);
        assert_eq!(tau_k_sieve(1, 4, budget).unwrap()[1..], [1, 1, 1, 1]);
    }

    #[test]
    fn tau_sieve_matches_pointwise_values_at_random_indices() {
        let budget = MemoryBudget::default();
        let table = tau_k_sieve(3, 100_000, budget).unwrap();
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..100 {
            let n = rng.gen_range(1..=100_000u64);
            assert_eq!(
                table[n as usize] as u64,
                tau_k_at(3, &factorize(n).unwrap()),
                "n={n}"
            );
        }
        for k in [1u32, 2, 4, 5] {
            let table = tau_k_sieve(k, 2_000, budget).unwrap();
            for n in 1..=2_000u64 {
                assert_eq!(table[n as usize] as u64, tau_k_at(k, &factorize(n).unwrap()));
            }
        }
    }

    #[test]
    fn tau_sieve_domain_and_capacity_errors() {
        let budget = MemoryBudget::default();
        assert!(tau_k_sieve(0, 10, budget).is_err());
        assert!(tau_k_sieve(2, 0, budget).is_err());
        let tiny = MemoryBudget::new(64);
        assert!(matches!(
            tau_k_sieve(2, 1000, tiny),
            Err(Error::Capacity { .. })
        ));
        // tau_30(2^16) = binom(45, 16) overflows the 32-bit cells long
        // before the last convolution pass.
        assert!(matches!(
            tau_k_sieve(30, 1 << 16, budget),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn phi_and_mu_examples() {
        assert_eq!(euler_phi(&factorize(1).unwrap()), 1);
        assert_eq!(euler_phi(&factorize(6).unwrap()), 2);
        assert_eq!(euler_phi(&factorize(360).unwrap()), 96);
        assert_eq!(moebius(&factorize(1).unwrap()), 1);
        assert_eq!(moebius(&factorize(30).unwrap()), -1);
        assert_eq!(moebius(&factorize(12).unwrap()), 0);
    }

    #[test]
    fn ramanujan_sum_examples() {
        assert_eq!(ramanujan_sum(1, 5).unwrap(), 1);
        // c_q(0) = phi(q)
        assert_eq!(ramanujan_sum(6, 0).unwrap(), 2);
        assert_eq!(ramanujan_sum(4, 2).unwrap(), -2);
        assert_eq!(ramanujan_sum(5, 5).unwrap(), 4);
        assert_eq!(ramanujan_sum(9, 3).unwrap(), -3);
        assert!(ramanujan_sum(0, 3).is_err());
    }

    #[test]
    fn ramanujan_sum_matches_exponential_sum_up_to_200() {
        for q in 1..=200u64 {
            for n in 0..=200u64 {
                assert_eq!(
                    ramanujan_sum(q, n).unwrap(),
                    ramanujan_exp_sum(q, n),
                    "q={q}, n={n}"
                );
            }
        }
    }

    #[test]
    fn ramanujan_sum_is_multiplicative_in_q() {
        for q1 in 1..=50u64 {
            for q2 in 1..=50u64 {
                if q1.gcd(&q2) != 1 {
                    continue;
                }
                for n in 0..=50u64 {
                    let lhs = ramanujan_sum(q1 * q2, n).unwrap();
                    let rhs = ramanujan_sum(q1, n).unwrap() * ramanujan_sum(q2, n).unwrap();
                    assert_eq!(lhs, rhs, "q1={q1}, q2={q2}, n={n}");
                }
            }
        }
    }

    #[test]
    fn prime_power_formula_examples() {
        // p does not divide h
        assert_eq!(ramanujan_sum_prime_power(2, 1, 3).unwrap(), -1);
        assert_eq!(ramanujan_sum_prime_power(2, 3, 3).unwrap(), 0);
        // p divides h
        assert_eq!(ramanujan_sum_prime_power(2, 2, 4).unwrap(), 2);
        assert_eq!(ramanujan_sum_prime_power(3, 2, 3).unwrap(), -3);
        assert_eq!(ramanujan_sum_prime_power(3, 1, 3).unwrap(), 2);
        assert_eq!(ramanujan_sum_prime_power(3, 5, 9).unwrap(), 0);
        // domain errors
        assert!(matches!(
            ramanujan_sum_prime_power(6, 1, 3),
            Err(Error::NotPrime(6))
        ));
        assert!(ramanujan_sum_prime_power(3, 0, 3).is_err());
        assert!(ramanujan_sum_prime_power(3, 1, 0).is_err());
    }

    #[test]
    fn prime_power_formula_agrees_with_hoelder() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for j in 1..=5u32 {
                for h in 1..=64u64 {
                    assert_eq!(
                        ramanujan_sum_prime_power(p, j, h).unwrap(),
                        ramanujan_sum(p.pow(j), h).unwrap(),
                        "p={p}, j={j}, h={h}"
                    );
                }
            }
        }
    }

    #[test]
    fn is_prime_matches_naive_up_to_2000() {
        for n in 0..=2000u64 {
            assert_eq!(is_prime(n), is_prime_naive(n), "n={n}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_ramanujan_sum_multiplicative(q1 in 1u64..120, q2 in 1u64..120, n in 0u64..200) {
            prop_assume!(q1.gcd(&q2) == 1);
            let lhs = ramanujan_sum(q1 * q2, n).unwrap();
            let rhs = ramanujan_sum(q1, n).unwrap() * ramanujan_sum(q2, n).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn prop_tau_k_multiplicative(k in 1u32..6, m in 1u64..400, n in 1u64..400) {
            prop_assume!(m.gcd(&n) == 1);
            let lhs = tau_k_at(k, &factorize(m * n).unwrap());
            let rhs = tau_k_at(k, &factorize(m).unwrap()) * tau_k_at(k, &factorize(n).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn prop_divisor_count_is_tau_2(n in 1u64..5000) {
            let count = (1..=n).filter(|d| n % d == 0).count() as u64;
            prop_assert_eq!(tau_k_at(2, &factorize(n).unwrap()), count);
        }
    }
}
