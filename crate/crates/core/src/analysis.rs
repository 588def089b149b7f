//! Average cost model for truncated propagation.
//!
//! With `N` rotations, each commuting with a term with probability ½, the
//! average number of order-`k` terms is `M^(k) = C(N,k) / 2^k` and the total
//! `(3/2)^N`. Absolute coefficient mass at order `k` is bounded by
//! `|sin θ / 2|^k C(N,k)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `M_N^(k)` from the recursion `M_i^(k) = M_{i-1}^(k) + ½ M_{i-1}^(k-1)`,
/// `M_0^(k) = δ_{k0}`. Returns zero for `k > n`.
pub fn mk_recursive(n: usize, k: usize) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut row = vec![BigRational::zero(); k + 1];
    row[0] = BigRational::one();
    for _ in 0..n {
        for j in (1..=k).rev() {
            let prev = &row[j - 1] * &half;
            row[j] += prev;
        }
    }
    row.swap_remove(k)
}

/// `C(n, k) / 2^k`.
pub fn mk_closed(n: usize, k: usize) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    BigRational::new(binomial(n, k), BigInt::one() << k)
}

/// `Σ_{k ≤ kmax} M^(k)`.
pub fn mk_cumulative(n: usize, kmax: usize) -> BigRational {
    (0..=kmax.min(n)).fold(BigRational::zero(), |acc, k| acc + mk_closed(n, k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `Σ_{k ≤ kmax} |sin θ / 2|^k C(n, k)`.
pub fn abs_series(n: usize, theta: f64, kmax: usize) -> f64 {
    let a = (theta.sin() / 2.0).abs();
    let mut term = 1.0;
    let mut total = 1.0;
    for k in 0..kmax.min(n) {
        term *= a * (n - k) as f64 / (k + 1) as f64;
        total += term;
    }
    total
}

/// Smallest `K` with `(|O| - |O|^(K)) / |O| < δ`.
///
/// The normalised terms form a binomial distribution with success
/// probability `a / (1 + a)`, so the relative tail is evaluated in log space
/// and summed from the top to avoid cancellation.
pub fn min_order_for_bound(n: usize, theta: f64, delta: f64) -> usize {
    let a = (theta.sin() / 2.0).abs();
    if a == 0.0 || n == 0 {
        return 0;
    }
    let ln_p = (a / (1.0 + a)).ln();
    let ln_q = (1.0 / (1.0 + a)).ln();
    let mut ln_binom = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_binom[k] = ln_binom[k - 1] + ((n - k + 1) as f64).ln() - (k as f64).ln();
    }
    let pmf: Vec<f64> = (0..=n)
        .map(|k| (ln_binom[k] + k as f64 * ln_p + (n - k) as f64 * ln_q).exp())
        .collect();
    // tail[k] = Σ_{j > k} pmf[j]
    let mut tail = vec![0.0f64; n + 1];
    for k in (0..n).rev() {
        tail[k] = tail[k + 1] + pmf[k + 1];
    }
    tail.iter().position(|&t| t < delta).unwrap_or(n)
}

/// One row of the order-bound table.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderBoundRow {
    pub n: usize,
    /// `K_min` for each requested δ.
    pub k_min: Vec<usize>,
    /// `Σ_{k ≤ K_min} M^(k)` for each requested δ.
    pub cumulative_m: Vec<f64>,
}

pub fn order_bound_table(ns: impl IntoIterator<Item = usize>, theta: f64, deltas: &[f64]) -> Vec<OrderBoundRow> {
    ns.into_iter()
        .map(|n| {
            let k_min: Vec<usize> = deltas.iter().map(|&d| min_order_for_bound(n, theta, d)).collect();
            let cumulative_m = k_min.iter().map(|&k| rational_to_f64(&mk_cumulative(n, k))).collect();
            OrderBoundRow { n, k_min, cumulative_m }
        })
        .collect()
}
