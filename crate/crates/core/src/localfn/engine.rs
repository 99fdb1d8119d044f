//! Exact output distributions.
//!
//! Two independent engines:
//! - naive enumeration of all `2^m` inputs (`m ≤ NAIVE_MAX_INPUTS`);
//! - a component/frontier DP. Gates are grouped into connected components
//!   (gates sharing an input), each component is swept one input at a time
//!   keeping counts over `(live input assignment, accumulator)`, and the
//!   components are combined by product or convolution.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::LocalFn;
use crate::dist::{Dist, WDist, MAX_SUPPORT};
use crate::error::{Error, Result};
use crate::mass::{pow2, Mass};

/// Largest input count the naive engine accepts.
pub const NAIVE_MAX_INPUTS: usize = 26;

/// Default cap on live DP states per component.
pub const DP_STATE_BUDGET: usize = 1 << 22;

/// Below this many inputs `Engine::Auto` enumerates directly.
const AUTO_NAIVE_BELOW: usize = 16;

const CHUNK_BITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Naive for small `m`, otherwise the DP with a naive fallback.
    #[default]
    Auto,
    Naive,
    Frontier,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Naive => "naive",
            Engine::Frontier => "frontier",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Engine::Auto),
            "naive" => Ok(Engine::Naive),
            "frontier" | "dp" => Ok(Engine::Frontier),
            _ => Err(Error::Parse(format!("unknown engine {s:?} (auto, naive, frontier)"))),
        }
    }
}

/// What the DP tracks besides the live inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accumulator {
    /// Output bits, placed at their gate index (gate indices must be < 64).
    Pattern,
    /// Number of ones among the evaluated gates.
    Weight,
}

impl Accumulator {
    #[inline]
    fn apply(self, acc: u64, gate: usize, out: bool) -> u64 {
        match self {
            Accumulator::Pattern => acc | (out as u64) << gate,
            Accumulator::Weight => acc + out as u64,
        }
    }
}

/// Union-find over gates: two gates are joined when they share an input.
/// Constant gates form singleton groups.
pub(crate) fn gate_components(f: &LocalFn) -> Vec<Vec<usize>> {
    let n = f.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (g, gate) in f.gates().iter().enumerate() {
        for &i in gate.inputs() {
            match owner.get(&i) {
                Some(&h) => {
                    let (a, b) = (find(&mut parent, g), find(&mut parent, h));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    owner.insert(i, g);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for g in 0..n {
        let r = find(&mut parent, g);
        let k = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(g);
    }
    groups
}

struct Sweep<'a> {
    f: &'a LocalFn,
    gates: &'a [usize],
    vars: Vec<usize>,
    gates_of: Vec<Vec<usize>>,
    pending: Vec<usize>,
    uses: Vec<usize>,
    assigned: Vec<bool>,
    frontier: Vec<usize>,
    pos: Vec<usize>,
}

impl Sweep<'_> {
    fn local(&self, input: usize) -> usize {
        self.vars.binary_search(&input).expect("input belongs to block")
    }

    /// Frontier size after assigning `u` (evaluating the gates it completes and
    /// dropping inputs that no longer feed a pending gate), the number of gates
    /// completed, and the fewest inputs still missing from any gate `u` feeds.
    fn frontier_after(&self, u: usize) -> (usize, usize, usize) {
        let mut dec: Vec<(usize, usize)> = Vec::new();
        let mut ready = 0;
        let mut closest = usize::MAX;
        for &gi in &self.gates_of[u] {
            closest = closest.min(self.pending[gi] - 1);
            if self.pending[gi] == 1 {
                ready += 1;
                for &i in self.f.gate(self.gates[gi]).inputs() {
                    let w = self.local(i);
                    match dec.iter_mut().find(|(x, _)| *x == w) {
                        Some(e) => e.1 += 1,
                        None => dec.push((w, 1)),
                    }
                }
            }
        }
        let dead = dec.iter().filter(|&&(w, c)| self.uses[w] == c).count();
        (self.frontier.len() + 1 - dead, ready, closest)
    }

    fn choose(&self) -> usize {
        (0..self.vars.len())
            .filter(|&u| !self.assigned[u])
            .min_by_key(|&u| {
                let (size, ready, closest) = self.frontier_after(u);
                (size, usize::MAX - ready, closest, u)
            })
            .expect("unassigned input remains")
    }
}

/// Exact counts of the accumulator over all assignments of the inputs read by
/// `gates`, treated as one block. Returns `(acc, count)` pairs sorted by `acc`
/// and the number of inputs swept (counts sum to `2^inputs`).
pub fn frontier_dp(
    f: &LocalFn,
    gates: &[usize],
    acc_kind: Accumulator,
    budget: usize,
) -> Result<(Vec<(u64, BigUint)>, usize)> {
    if acc_kind == Accumulator::Pattern && gates.iter().any(|&g| g >= 64) {
        return Err(Error::invalid("pattern accumulator needs gate indices below 64"));
    }
    let vars = f.inputs_of(gates.iter().copied());
    let nv = vars.len();
    let mut sw = Sweep {
        f,
        gates,
        vars,
        gates_of: vec![Vec::new(); nv],
        pending: vec![0; gates.len()],
        uses: vec![0; nv],
        assigned: vec![false; nv],
        frontier: Vec::new(),
        pos: vec![usize::MAX; nv],
    };
    let mut acc0 = 0u64;
    for (gi, &g) in gates.iter().enumerate() {
        let gate = f.gate(g);
        sw.pending[gi] = gate.arity();
        if gate.arity() == 0 {
            acc0 = acc_kind.apply(acc0, g, gate.table()[0]);
        }
        for &i in gate.inputs() {
            let v = sw.local(i);
            sw.gates_of[v].push(gi);
            sw.uses[v] += 1;
        }
    }

    let mut states: HashMap<(u64, u64), BigUint> = HashMap::from([((0, acc0), BigUint::one())]);
    for _ in 0..nv {
        let v = sw.choose();
        sw.assigned[v] = true;
        let p = sw.frontier.len();
        if p >= 64 {
            return Err(Error::limit("DP frontier exceeds 64 live inputs"));
        }
        sw.frontier.push(v);
        sw.pos[v] = p;

        let mut ready = Vec::new();
        for &gi in &sw.gates_of[v] {
            sw.pending[gi] -= 1;
            if sw.pending[gi] == 0 {
                ready.push(gi);
            }
        }
        // Per ready gate: the frontier bit positions of its inputs.
        let ready_pos: Vec<(usize, Vec<usize>)> = ready
            .iter()
            .map(|&gi| {
                let g = gates[gi];
                (g, f.gate(g).inputs().iter().map(|&i| sw.pos[sw.local(i)]).collect())
            })
            .collect();
        for &gi in &ready {
            for &i in f.gate(gates[gi]).inputs() {
                let w = sw.local(i);
                sw.uses[w] -= 1;
            }
        }
        let keep: Vec<usize> = (0..sw.frontier.len()).filter(|&q| sw.uses[sw.frontier[q]] > 0).collect();

        let mut next: HashMap<(u64, u64), BigUint> = HashMap::with_capacity(states.len() * 2);
        for ((a, acc), c) in states {
            for b in 0..2u64 {
                let a1 = a | b << p;
                let mut acc1 = acc;
                for (g, positions) in &ready_pos {
                    let idx = positions.iter().enumerate().fold(0usize, |s, (j, &q)| s | ((a1 >> q & 1) as usize) << j);
                    acc1 = acc_kind.apply(acc1, *g, f.gate(*g).table()[idx]);
                }
                let a2 = keep.iter().enumerate().fold(0u64, |s, (j, &q)| s | (a1 >> q & 1) << j);
                *next.entry((a2, acc1)).or_insert_with(BigUint::zero) += &c;
            }
        }
        let new_frontier: Vec<usize> = keep.iter().map(|&q| sw.frontier[q]).collect();
        for (j, &w) in new_frontier.iter().enumerate() {
            sw.pos[w] = j;
        }
        sw.frontier = new_frontier;
        states = next;
        if states.len() > budget {
            return Err(Error::limit(format!("DP state count {} exceeds budget {budget}", states.len())));
        }
    }
    debug_assert!(sw.frontier.is_empty());
    let mut out: HashMap<u64, BigUint> = HashMap::new();
    for ((_, acc), c) in states {
        *out.entry(acc).or_insert_with(BigUint::zero) += c;
    }
    let mut out: Vec<(u64, BigUint)> = out.into_iter().collect();
    out.sort_by_key(|e| e.0);
    Ok((out, nv))
}

fn naive_precheck(f: &LocalFn) -> Result<()> {
    if f.m() > NAIVE_MAX_INPUTS {
        return Err(Error::limit(format!("naive engine needs m ≤ {NAIVE_MAX_INPUTS}, got m = {}", f.m())));
    }
    Ok(())
}

fn naive_patterns(f: &LocalFn) -> Result<Vec<(u64, BigUint)>> {
    naive_precheck(f)?;
    let total = 1u64 << f.m();
    let chunk = 1u64 << CHUNK_BITS.min(f.m());
    let merged = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let mut h: HashMap<u64, u64> = HashMap::new();
            for x in c * chunk..(c + 1) * chunk {
                *h.entry(f.eval_word(x)).or_insert(0) += 1;
            }
            h
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let mut v: Vec<(u64, BigUint)> = merged.into_iter().map(|(k, c)| (k, BigUint::from(c))).collect();
    v.sort_by_key(|e| e.0);
    Ok(v)
}

fn naive_weights(f: &LocalFn) -> Result<Vec<BigUint>> {
    naive_precheck(f)?;
    let n = f.n();
    let total = 1u64 << f.m();
    let chunk = 1u64 << CHUNK_BITS.min(f.m());
    let counts = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; n + 1];
            let mut bits = vec![false; f.m()];
            for x in c * chunk..(c + 1) * chunk {
                for (j, b) in bits.iter_mut().enumerate() {
                    *b = x >> j & 1 == 1;
                }
                let w = f.gates().iter().filter(|g| g.eval_with(|i| bits[i])).count();
                h[w] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts.into_iter().map(BigUint::from).collect())
}

fn dp_patterns(f: &LocalFn, budget: usize) -> Result<(Vec<(u64, BigUint)>, usize)> {
    let comps = gate_components(f);
    let parts = comps
        .par_iter()
        .map(|gates| frontier_dp(f, gates, Accumulator::Pattern, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut acc: Vec<(u64, BigUint)> = vec![(0, BigUint::one())];
    let mut swept = 0;
    for (part, nv) in parts {
        swept += nv;
        if (acc.len() as u64).saturating_mul(part.len() as u64) > MAX_SUPPORT {
            return Err(Error::limit(format!("output support exceeds {MAX_SUPPORT}")));
        }
        acc = acc
            .iter()
            .flat_map(|(x, c)| part.iter().map(move |(y, d)| (x | y, c * d)))
            .collect();
    }
    acc.sort_by_key(|e| e.0);
    Ok((acc, swept))
}

fn dp_weights(f: &LocalFn, budget: usize) -> Result<(Vec<BigUint>, usize)> {
    let comps = gate_components(f);
    let parts = comps
        .par_iter()
        .map(|gates| frontier_dp(f, gates, Accumulator::Weight, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = vec![BigUint::one()];
    let mut swept = 0;
    for (part, nv) in parts {
        swept += nv;
        let width = part.last().map_or(0, |e| e.0 as usize);
        let mut next = vec![BigUint::zero(); acc.len() + width];
        for (i, c) in acc.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (w, d) in &part {
                next[i + *w as usize] += c * d;
            }
        }
        acc = next;
    }
    acc.resize(f.n() + 1, BigUint::zero());
    Ok((acc, swept))
}

impl LocalFn {
    /// Exact distribution of `f(U_m)` over `{0,1}^n` (`n ≤ 64`).
    pub fn output_distribution<M: Mass>(&self, engine: Engine) -> Result<Dist<M>> {
        if self.n() > 64 {
            return Err(Error::invalid(format!("string-level distribution needs n ≤ 64, got {}", self.n())));
        }
        let (counts, swept) = match engine {
            Engine::Naive => (naive_patterns(self)?, self.m()),
            Engine::Frontier => dp_patterns(self, DP_STATE_BUDGET)?,
            Engine::Auto if self.m() < AUTO_NAIVE_BELOW => (naive_patterns(self)?, self.m()),
            Engine::Auto => match dp_patterns(self, DP_STATE_BUDGET) {
                Err(Error::ResourceLimit(_)) if self.m() <= NAIVE_MAX_INPUTS => (naive_patterns(self)?, self.m()),
                r => r?,
            },
        };
        Dist::from_counts(self.n(), counts, swept as u64)
    }

    /// Exact distribution of the Hamming weight of `f(U_m)`.
    pub fn weight_distribution<M: Mass>(&self, engine: Engine) -> Result<WDist<M>> {
        let (counts, swept) = match engine {
            Engine::Naive => (naive_weights(self)?, self.m()),
            Engine::Frontier => dp_weights(self, DP_STATE_BUDGET)?,
            Engine::Auto if self.m() < AUTO_NAIVE_BELOW => (naive_weights(self)?, self.m()),
            Engine::Auto => match dp_weights(self, DP_STATE_BUDGET) {
                Err(Error::ResourceLimit(_)) if self.m() <= NAIVE_MAX_INPUTS => (naive_weights(self)?, self.m()),
                r => r?,
            },
        };
        let den = pow2(swept as u64);
        WDist::new(counts.iter().map(|c| M::from_ratio(c, &den)).collect())
    }
}
