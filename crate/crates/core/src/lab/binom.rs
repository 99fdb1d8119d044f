//! Binomial-coefficient and entropy inequalities.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use super::report::VerificationReport;
use crate::error::{Error, Result};
use crate::mass::{binomial_row, log2_biguint, pow2};

/// Largest `n` handled with exact big integers; log-domain floats beyond.
pub const EXACT_MAX_N: usize = 200;

/// Absolute slack for log-domain comparisons.
pub const LOG_SLACK: f64 = 1e-9;

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// `ln C(n, b)` for `b = 0..=n`, by the multiplicative recurrence.
fn ln_binomial_row(n: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    row.push(0.0);
    for b in 0..n {
        acc += ((n - b) as f64).ln() - ((b + 1) as f64).ln();
        row.push(acc);
    }
    row
}

fn sweep<F>(suite: &str, range: serde_json::Value, ns: std::ops::RangeInclusive<usize>, per_n: F) -> VerificationReport
where
    F: Fn(usize, &mut VerificationReport) + Sync,
{
    let parts: Vec<VerificationReport> = ns
        .into_par_iter()
        .map(|n| {
            let mut r = VerificationReport::new(suite, serde_json::Value::Null);
            per_n(n, &mut r);
            r
        })
        .collect();
    let mut rep = parts.into_iter().fold(VerificationReport::new(suite, range.clone()), VerificationReport::merge).finish();
    rep.range = range;
    rep
}

/// `2^{-n}(C(n,b) − C(n,b+1)) ≤ 7/n` for all `1 ≤ n ≤ n_max`, `1 ≤ b ≤ n`.
///
/// For `b > n` both coefficients vanish, so `b ≤ n` covers every nontrivial case.
pub fn verify_nearby_binom(n_max: usize) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be ≥ 1"));
    }
    let range = json!({ "n": [1, n_max], "b": "1..=n", "exact_up_to": EXACT_MAX_N, "log_slack": LOG_SLACK });
    Ok(sweep("nearby-binom", range, 1..=n_max, |n, r| {
        if n <= EXACT_MAX_N {
            let row = binomial_row(n as u64);
            let rhs = pow2(n as u64) * 7u32;
            let bound = 7.0 / n as f64;
            for b in 1..=n {
                let hi = &row[b];
                let lo = row.get(b + 1).cloned().unwrap_or_else(BigUint::zero);
                // n·(C(n,b) − C(n,b+1)) ≤ 7·2^n, skipping the trivially true negative case
                let (ok, value) = if *hi <= lo {
                    (true, -(((&lo - hi).to_f64().unwrap_or(f64::INFINITY)) / 2f64.powi(n as i32)))
                } else {
                    let diff = hi - &lo;
                    let ok = &diff * n as u64 <= rhs;
                    (ok, crate::mass::biguint_ratio_f64(&diff, &pow2(n as u64)))
                };
                r.record(bound - value, ok, || json!({ "n": n, "b": b, "value": value }));
            }
        } else {
            let ln = ln_binomial_row(n);
            let bound = 7.0 / n as f64;
            let ln_half = n as f64 * LN_2;
            for b in 1..=n {
                let ratio = if b < n { (n - b) as f64 / (b + 1) as f64 } else { 0.0 };
                let value = (ln[b] - ln_half).exp() * (1.0 - ratio);
                r.check(value, bound, LOG_SLACK, || json!({ "n": n, "b": b, "value": value }));
            }
        }
    }))
}

/// `1 − x² ≤ H((1+x)/2) ≤ 1 − x²/(2 ln 2)` at `x = k/grid` for `|k| ≤ grid`,
/// plus agreement of `H((1+x)/2)` with its power series on `|x| ≤ 9/10`.
pub fn verify_entropy(grid: usize) -> Result<VerificationReport> {
    if grid == 0 {
        return Err(Error::invalid("grid must be ≥ 1"));
    }
    let mut r = VerificationReport::new("entropy", json!({ "x": [-1, 1], "step": format!("1/{grid}") }));
    for k in -(grid as i64)..=grid as i64 {
        let x = k as f64 / grid as f64;
        let h = entropy((1.0 + x) / 2.0);
        let lower = 1.0 - x * x;
        let upper = 1.0 - x * x / (2.0 * LN_2);
        r.check(lower, h, 1e-12, || json!({ "x": x, "side": "lower", "h": h }));
        r.check(h, upper, 1e-12, || json!({ "x": x, "side": "upper", "h": h }));
        if x.abs() <= 0.9 {
            let series: f64 = (1..=400)
                .map(|j| {
                    let j = j as f64;
                    x.powf(2.0 * j) / (j * (2.0 * j - 1.0))
                })
                .sum();
            let s = 1.0 - series / (2.0 * LN_2);
            r.check((s - h).abs(), 0.0, 1e-12, || json!({ "x": x, "side": "series", "h": h, "series": s }));
        }
    }
    Ok(r.finish())
}

/// `2^{nH(k/n)}/√(8k(1−k/n)) ≤ C(n,k) ≤ 2^{nH(k/n)}/√(πk(1−k/n))` for
/// `1 ≤ k ≤ n−1`, compared in log2.
pub fn verify_individual_binom(n_max: usize) -> Result<VerificationReport> {
    let range = json!({ "n": [2, n_max], "k": "1..n", "exact_up_to": EXACT_MAX_N, "log_slack": LOG_SLACK });
    Ok(sweep("individual-binom", range, 2..=n_max.max(1), |n, r| {
        let logs: Vec<f64> = if n <= EXACT_MAX_N {
            binomial_row(n as u64).iter().map(log2_biguint).collect()
        } else {
            ln_binomial_row(n).into_iter().map(|v| v / LN_2).collect()
        };
        for k in 1..n {
            let frac = k as f64 / n as f64;
            let nh = n as f64 * entropy(frac);
            let core = k as f64 * (1.0 - frac);
            let lo = nh - 0.5 * (8.0 * core).log2();
            let hi = nh - 0.5 * (PI * core).log2();
            let c = logs[k];
            r.check(lo, c, LOG_SLACK, || json!({ "n": n, "k": k, "side": "lower", "log2_c": c, "log2_bound": lo }));
            r.check(c, hi, LOG_SLACK, || json!({ "n": n, "k": k, "side": "upper", "log2_c": c, "log2_bound": hi }));
        }
    }))
}

/// `Σ_{i≤k} C(n,i) ≤ min(2^{nH(k/n)}, C(n,k)(n−k+1)/(n−2k+1))` for `1 ≤ k ≤ n/2`.
///
/// The second bound is checked exactly, the first in log2.
pub fn verify_binom_tail(n_max: usize) -> Result<VerificationReport> {
    let range = json!({ "n": [2, n_max], "k": "1..=n/2", "log_slack": LOG_SLACK });
    Ok(sweep("binom-tail", range, 2..=n_max.max(1), |n, r| {
        let row = binomial_row(n as u64);
        let mut sum = BigUint::zero();
        for (k, c) in row.iter().enumerate().take(n / 2 + 1) {
            sum += c;
            if k == 0 {
                continue;
            }
            let ls = log2_biguint(&sum);
            let nh = n as f64 * entropy(k as f64 / n as f64);
            r.check(ls, nh, LOG_SLACK, || json!({ "n": n, "k": k, "side": "entropy", "log2_sum": ls }));
            let lhs = &sum * (n - 2 * k + 1) as u64;
            let rhs = c * (n - k + 1) as u64;
            let slack = log2_biguint(&rhs) - log2_biguint(&lhs);
            r.record(slack, lhs <= rhs, || json!({ "n": n, "k": k, "side": "ratio", "log2_gap": slack }));
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::binomial;

    #[test]
    fn nearby_examples() {
        let r = verify_nearby_binom(4).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 1 + 2 + 3 + 4);
        // n=4, b=2: (6 − 4)/16 = 1/8 against 7/4
        let r = verify_nearby_binom(260).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 260 * 261 / 2);
    }

    #[test]
    fn float_row_matches_exact() {
        let n = 150;
        let ln = ln_binomial_row(n);
        for (b, c) in binomial_row(n as u64).iter().enumerate() {
            assert!((ln[b] / LN_2 - log2_biguint(c)).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(0.5), 1.0);
        assert_eq!(entropy(0.0), 0.0);
        let r = verify_entropy(200).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert!(r.max_slack.unwrap().abs() < 1e-12); // equality at x = 0
    }

    #[test]
    fn individual_examples() {
        let c = binomial(10, 5).to_f64().unwrap();
        assert_eq!(c, 252.0);
        assert!(1024.0 / 20f64.sqrt() <= c && c <= 1024.0 / (PI * 2.5).sqrt());
        let r = verify_individual_binom(300).unwrap();
        assert!(r.passed, "{:?}", r.violations);
    }

    #[test]
    fn tail_examples() {
        let row = binomial_row(100);
        let s: BigUint = row[..=30].iter().sum();
        assert!(&s * 41u32 <= &row[30] * 71u32);
        assert!(log2_biguint(&s) <= 100.0 * entropy(0.3));
        let r = verify_binom_tail(150).unwrap();
        assert!(r.passed, "{:?}", r.violations);
    }
}
