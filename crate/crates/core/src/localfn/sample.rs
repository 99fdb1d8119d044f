use std::collections::HashMap;

use rand::RngCore;
use rayon::prelude::*;

use super::LocalFn;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::rng;

/// Samples per RNG stream.
pub const SHARD: usize = 4096;

fn shard(f: &LocalFn, seed: u64, k: usize, len: usize) -> Vec<Vec<bool>> {
    let mut r = rng::stream(seed, k as u64);
    let words = f.m().div_ceil(64);
    let mut buf = vec![0u64; words];
    (0..len)
        .map(|_| {
            buf.iter_mut().for_each(|w| *w = r.next_u64());
            f.gates()
                .iter()
                .map(|g| g.eval_with(|i| buf[i / 64] >> (i % 64) & 1 == 1))
                .collect()
        })
        .collect()
}

/// `count` outputs of `f` on uniform inputs. Sample `j` comes from stream
/// `j / SHARD`, so the result does not depend on the thread count.
pub fn sample(f: &LocalFn, seed: u64, count: usize) -> Vec<Vec<bool>> {
    let shards = count.div_ceil(SHARD);
    (0..shards)
        .into_par_iter()
        .flat_map_iter(|k| shard(f, seed, k, SHARD.min(count - k * SHARD)))
        .collect()
}

/// Empirical distribution of `count` samples (`n ≤ 64`).
pub fn empirical_distribution(f: &LocalFn, seed: u64, count: usize) -> Result<Dist<f64>> {
    if f.n() > 64 || count == 0 {
        return Err(Error::invalid("empirical distribution needs n ≤ 64 and count ≥ 1"));
    }
    let mut h: HashMap<u64, usize> = HashMap::new();
    for s in sample(f, seed, count) {
        let x = s.iter().enumerate().fold(0u64, |a, (i, &b)| a | (b as u64) << i);
        *h.entry(x).or_insert(0) += 1;
    }
    Dist::new(f.n(), h.into_iter().map(|(x, c)| (x, c as f64 / count as f64)))
}
