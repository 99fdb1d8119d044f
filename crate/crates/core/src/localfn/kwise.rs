//! Fourier biases of output subsets and k-wise independence.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::LocalFn;
use crate::error::{Error, Result};
use crate::mass::{render_rational, Rational};

/// Largest number of inputs feeding a subset that `monomial_bias` enumerates.
pub const BIAS_MAX_INPUTS: usize = 26;

/// `E[Π_{i∈s} (−1)^{f_i(x)}]`, enumerating only the inputs that feed `s`.
pub fn monomial_bias(f: &LocalFn, s: &[usize]) -> Result<Rational> {
    if s.is_empty() {
        return Err(Error::invalid("monomial_bias needs a nonempty output subset"));
    }
    if let Some(&bad) = s.iter().find(|&&i| i >= f.n()) {
        return Err(Error::invalid(format!("output {bad} out of range")));
    }
    let vars = f.inputs_of(s.iter().copied());
    if vars.len() > BIAS_MAX_INPUTS {
        return Err(Error::limit(format!("{} inputs feed the subset (limit {BIAS_MAX_INPUTS})", vars.len())));
    }
    let gates: Vec<(Vec<usize>, &[bool])> = s
        .iter()
        .map(|&i| {
            let g = f.gate(i);
            let pos = g.inputs().iter().map(|x| vars.binary_search(x).expect("feeds s")).collect();
            (pos, g.table())
        })
        .collect();
    let k = vars.len();
    let odd: u64 = (0..1u64 << k)
        .into_par_iter()
        .filter(|&a| {
            gates.iter().fold(false, |acc, (pos, table)| {
                let idx = pos.iter().enumerate().fold(0usize, |t, (j, &q)| t | ((a >> q & 1) as usize) << j);
                acc ^ table[idx]
            })
        })
        .count() as u64;
    let total = 1u64 << k;
    Ok(Rational::new(BigInt::from(total) - BigInt::from(2 * odd), BigInt::from(total)))
}

#[derive(Debug, Clone, Serialize)]
pub struct KwiseReport {
    pub k: usize,
    pub passed: bool,
    pub subsets_checked: u64,
    /// Up to ten subsets with nonzero bias, as `(subset, "num/den")`.
    pub violations: Vec<(Vec<usize>, String)>,
}

/// Checks that every output subset of size `1..=k` has zero bias.
pub fn kwise_check(f: &LocalFn, k: usize) -> Result<KwiseReport> {
    let n = f.n();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    fn extend(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    extend(0, n, k.min(n), &mut Vec::new(), &mut subsets);
    let biases = subsets
        .par_iter()
        .map(|s| monomial_bias(f, s).map(|b| (s, b)))
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<(Vec<usize>, String)> = biases
        .into_iter()
        .filter(|(_, b)| !b.is_zero())
        .take(10)
        .map(|(s, b)| (s.clone(), render_rational(&b)))
        .collect();
    Ok(KwiseReport { k, passed: violations.is_empty(), subsets_checked: subsets.len() as u64, violations })
}
