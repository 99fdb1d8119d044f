//! Moment inequalities for low-degree multilinear polynomials on `{±1}^n`.

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde_json::json;

use super::report::{SweepRow, VerificationReport};
use crate::error::{Error, Result};
use crate::rng;

/// Largest variable count for exhaustive expectations.
pub const MAX_VARS: usize = 20;

/// `Σ_S c_S Π_{i∈S} x_i` with integer coefficients; monomials are bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    terms: Vec<(u32, i64)>,
}

impl MultilinearPoly {
    pub fn new(n: usize, terms: Vec<(u32, i64)>) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::limit(format!("n = {n} exceeds {MAX_VARS} variables")));
        }
        let mut terms: Vec<(u32, i64)> = terms.into_iter().filter(|t| t.1 != 0).collect();
        terms.sort_unstable();
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("repeated monomial"));
        }
        if terms.iter().any(|&(s, _)| n < 32 && s >> n != 0) {
            return Err(Error::invalid("monomial uses a variable ≥ n"));
        }
        Ok(MultilinearPoly { n, terms })
    }

    /// `±1` coefficients on a random nonempty set of monomials of degree `≤ d`.
    pub fn random(r: &mut rng::Rng, n: usize, d: usize) -> Self {
        let mut monos: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize <= d).collect();
        monos.shuffle(r);
        let count = r.gen_range(1..=monos.len());
        let terms = monos[..count].iter().map(|&s| (s, if r.gen_bool(0.5) { 1 } else { -1 })).collect();
        MultilinearPoly::new(n, terms).expect("valid by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(u32, i64)] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.0.count_ones() as usize).max().unwrap_or(0)
    }

    /// `E[p²] = Σ c_S²` by Parseval.
    pub fn second_moment(&self) -> i128 {
        self.terms.iter().map(|t| (t.1 as i128) * (t.1 as i128)).sum()
    }

    /// Values at every point; bit `i` of the index set means `x_i = −1`.
    pub fn values(&self) -> Vec<i64> {
        let mut v = vec![0i64; 1 << self.n];
        for &(s, c) in &self.terms {
            v[s as usize] = c;
        }
        // Walsh–Hadamard transform turns coefficients into values
        let mut h = 1;
        while h < v.len() {
            for block in v.chunks_mut(2 * h) {
                let (a, b) = block.split_at_mut(h);
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (s, t) = (*x + *y, *x - *y);
                    *x = s;
                    *y = t;
                }
            }
            h *= 2;
        }
        v
    }
}

/// `Σ_x p(x)^q`, exactly.
fn power_sum(values: &[i64], q: u32) -> BigInt {
    values.iter().map(|&v| BigInt::from(v).pow(q)).sum()
}

fn check_q(q: u32) -> Result<()> {
    if q < 2 || q % 2 == 1 {
        return Err(Error::invalid(format!("q must be even and ≥ 2, got {q}")));
    }
    Ok(())
}

/// `‖p‖_q ≤ (q−1)^{d/2}‖p‖₂`, i.e. `E[p^q] ≤ (q−1)^{qd/2}·E[p²]^{q/2}`, exactly.
pub fn hypercontractivity_holds(p: &MultilinearPoly, q: u32) -> Result<(bool, f64)> {
    check_q(q)?;
    let d = p.degree() as u32;
    let lhs = power_sum(&p.values(), q);
    let rhs = (BigInt::from(q - 1).pow(q * d / 2) * BigInt::from(p.second_moment()).pow(q / 2)) << p.n;
    let ratio = lhs.to_f64().unwrap_or(f64::INFINITY) / rhs.to_f64().unwrap_or(f64::INFINITY);
    Ok((lhs <= rhs, ratio))
}

/// `Pr[|p| ≥ ‖p‖₂/2] ≥ 9^{−d}/2`, i.e. `2·9^d·#{x : 4p(x)² ≥ E[p²]} ≥ 2^n`.
pub fn weak_anticoncentration_holds(p: &MultilinearPoly) -> (bool, f64) {
    let m2 = p.second_moment();
    let count = p.values().iter().filter(|&&v| 4 * (v as i128) * (v as i128) >= m2).count() as u128;
    let d = p.degree() as u32;
    let lhs = 2 * 9u128.pow(d) * count;
    let rhs = 1u128 << p.n;
    (lhs >= rhs, count as f64 / rhs as f64 - 0.5 * 9f64.powi(-(d as i32)))
}

/// The polynomial used by trial `t` of a suite run with `seed`.
pub fn trial_poly(seed: u64, t: u64, n_max: usize, d_max: usize) -> MultilinearPoly {
    let mut r = rng::stream(seed, t);
    let n = r.gen_range(1..=n_max);
    let d = r.gen_range(0..=d_max.min(n));
    MultilinearPoly::random(&mut r, n, d)
}

fn params_ok(n_max: usize, d_max: usize) -> Result<()> {
    if n_max == 0 || n_max > MAX_VARS {
        return Err(Error::invalid(format!("n_max must lie in 1..={MAX_VARS}")));
    }
    if d_max > n_max {
        return Err(Error::invalid("d_max exceeds n_max"));
    }
    Ok(())
}

pub fn verify_hypercontractivity(trials: u64, n_max: usize, d_max: usize, q_set: &[u32], seed: u64) -> Result<VerificationReport> {
    params_ok(n_max, d_max)?;
    for &q in q_set {
        check_q(q)?;
    }
    let range = json!({ "trials": trials, "n_max": n_max, "d_max": d_max, "q": q_set, "seed": seed });
    let parts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = trial_poly(seed, t, n_max, d_max);
            let mut r = VerificationReport::new("hypercontractivity", json!(null));
            for &q in q_set {
                let (ok, ratio) = hypercontractivity_holds(&p, q)?;
                r.record(1.0 - ratio, ok, || json!({ "trial": t, "n": p.n(), "degree": p.degree(), "q": q, "ratio": ratio }));
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = parts.into_iter().fold(VerificationReport::new("hypercontractivity", range.clone()), VerificationReport::merge).finish();
    rep.range = range;
    Ok(rep)
}

pub fn verify_weak_anticoncentration(trials: u64, n_max: usize, d_max: usize, seed: u64) -> Result<VerificationReport> {
    params_ok(n_max, d_max)?;
    let range = json!({ "trials": trials, "n_max": n_max, "d_max": d_max, "seed": seed });
    let parts: Vec<VerificationReport> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = trial_poly(seed, t, n_max, d_max);
            let mut r = VerificationReport::new("weak-anticoncentration", json!(null));
            let (ok, slack) = weak_anticoncentration_holds(&p);
            r.record(slack, ok, || json!({ "trial": t, "n": p.n(), "degree": p.degree() }));
            r
        })
        .collect();
    let mut rep = parts.into_iter().fold(VerificationReport::new("weak-anticoncentration", range.clone()), VerificationReport::merge).finish();
    rep.range = range;
    Ok(rep)
}

/// Report-only: the tail `Pr[|p| > K‖p‖₂]` for each `K`, averaged over random
/// polynomials. The inequality behind it has an unspecified constant, so
/// nothing is asserted; rows are `(K, mean tail, 2^{−(K/2)^{2/d_max}})`.
pub fn poly_anticoncentration_report(trials: u64, n_max: usize, d_max: usize, ks: &[f64], seed: u64) -> Result<VerificationReport> {
    params_ok(n_max, d_max)?;
    let tails: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = trial_poly(seed, t, n_max, d_max);
            let m2 = p.second_moment() as f64;
            let vals = p.values();
            ks.iter()
                .map(|&k| vals.iter().filter(|&&v| (v as f64) * (v as f64) > k * k * m2).count() as f64 / vals.len() as f64)
                .collect()
        })
        .collect();
    let mut rep = VerificationReport::new("poly-anticoncentration", json!({ "trials": trials, "n_max": n_max, "d_max": d_max, "k": ks, "seed": seed }));
    let mut means = Vec::new();
    for (j, &k) in ks.iter().enumerate() {
        let mean = tails.iter().map(|t| t[j]).sum::<f64>() / trials.max(1) as f64;
        let shape = 2f64.powf(-(k / 2.0).powf(2.0 / d_max.max(1) as f64));
        means.push(mean);
        rep.rows.push(SweepRow { case: format!("K={k}"), value: mean, bound: shape });
    }
    let decreasing = means.windows(2).zip(ks.windows(2)).all(|(m, k)| k[1] < k[0] || m[1] <= m[0]);
    rep.notes = json!({ "report_only": true, "tail_nonincreasing_in_k": decreasing });
    Ok(rep)
}
