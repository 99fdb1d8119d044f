//! d-local functions `f: {0,1}^m -> {0,1}^n`.
//!
//! Each output bit is an [`OutputGate`]: a list of distinct input indices and
//! a truth table whose entry `b` is the output when
//! `b = Σ_j x[inputs[j]] · 2^j` (LSB-first on `inputs[0]`).

mod anf;
mod engine;
mod kwise;
mod sample;
mod samplers;

pub use anf::{anf_parity, anf_parity_mobius, Anf};
pub use engine::{frontier_dp, Accumulator, Engine, DP_STATE_BUDGET, NAIVE_MAX_INPUTS};
pub use kwise::{kwise_check, monomial_bias, KwiseReport, BIAS_MAX_INPUTS};
pub use sample::{empirical_distribution, sample, SHARD};
pub use samplers::{canonical, evens_with_flips, mixture_evens_odds};

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One output bit: the inputs it reads and its truth table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputGate {
    inputs: Vec<usize>,
    table: Vec<bool>,
}

impl OutputGate {
    pub fn new(inputs: Vec<usize>, table: Vec<bool>) -> Result<Self> {
        if inputs.len() >= 32 {
            return Err(Error::invalid(format!("gate arity {} too large", inputs.len())));
        }
        if table.len() != 1 << inputs.len() {
            return Err(Error::invalid(format!(
                "table length {} does not match arity {} (expected {})",
                table.len(),
                inputs.len(),
                1usize << inputs.len()
            )));
        }
        let mut sorted = inputs.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate input index in {inputs:?}")));
        }
        Ok(OutputGate { inputs, table })
    }

    /// Gate computing `g(x[inputs[0]], x[inputs[1]], ...)`.
    pub fn from_fn(inputs: Vec<usize>, g: impl Fn(&[bool]) -> bool) -> Result<Self> {
        let k = inputs.len();
        let table = (0..1usize << k)
            .map(|b| {
                let bits: Vec<bool> = (0..k).map(|j| b >> j & 1 == 1).collect();
                g(&bits)
            })
            .collect();
        OutputGate::new(inputs, table)
    }

    pub fn constant(bit: bool) -> Self {
        OutputGate { inputs: vec![], table: vec![bit] }
    }

    pub fn copy(input: usize) -> Self {
        OutputGate { inputs: vec![input], table: vec![false, true] }
    }

    /// XOR of the listed inputs.
    pub fn parity(inputs: Vec<usize>) -> Result<Self> {
        OutputGate::from_fn(inputs, |b| b.iter().filter(|&&v| v).count() % 2 == 1)
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// Output given a bit accessor for the global inputs.
    #[inline]
    pub fn eval_with(&self, bit: impl Fn(usize) -> bool) -> bool {
        let idx = self
            .inputs
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &i)| acc | (bit(i) as usize) << j);
        self.table[idx]
    }

    pub fn table_string(&self) -> String {
        self.table.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// A function `{0,1}^m -> {0,1}^n` whose gates read at most `d` inputs each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalFn {
    m: usize,
    d: usize,
    gates: Vec<OutputGate>,
}

/// A partial assignment of input bits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subcube {
    fixed: BTreeMap<usize, bool>,
}

impl Subcube {
    pub fn new(fixed: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, b) in fixed {
            if map.insert(i, b).is_some() {
                return Err(Error::invalid(format!("input {i} fixed twice")));
            }
        }
        Ok(Subcube { fixed: map })
    }

    /// Fixes `inputs[j]` to bit `j` of `bits`.
    pub fn from_bits(inputs: &[usize], bits: u64) -> Result<Self> {
        Subcube::new(inputs.iter().enumerate().map(|(j, &i)| (i, bits >> j & 1 == 1)))
    }

    pub fn fixed(&self) -> &BTreeMap<usize, bool> {
        &self.fixed
    }

    pub fn len(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }
}

impl LocalFn {
    pub fn new(m: usize, d: usize, gates: Vec<OutputGate>) -> Result<Self> {
        for (i, g) in gates.iter().enumerate() {
            if g.arity() > d {
                return Err(Error::invalid(format!("output {i} reads {} inputs, locality bound is {d}", g.arity())));
            }
            if let Some(&bad) = g.inputs.iter().find(|&&j| j >= m) {
                return Err(Error::invalid(format!("output {i} reads input {bad} but m = {m}")));
            }
        }
        Ok(LocalFn { m, d, gates })
    }

    /// Input count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Output count.
    pub fn n(&self) -> usize {
        self.gates.len()
    }

    /// Declared locality bound.
    pub fn declared_d(&self) -> usize {
        self.d
    }

    /// Largest gate arity.
    pub fn locality(&self) -> usize {
        self.gates.iter().map(OutputGate::arity).max().unwrap_or(0)
    }

    pub fn gates(&self) -> &[OutputGate] {
        &self.gates
    }

    pub fn gate(&self, i: usize) -> &OutputGate {
        &self.gates[i]
    }

    /// Output bits for input bits `x` (length `m`).
    pub fn evaluate(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.m {
            return Err(Error::mismatch(format!("input has {} bits, expected m = {}", x.len(), self.m)));
        }
        Ok(self.gates.iter().map(|g| g.eval_with(|i| x[i])).collect())
    }

    /// Packed evaluation: input bit `i` is bit `i` of `x`; output bit `i` is bit `i` of the result.
    /// Requires `m ≤ 64` and `n ≤ 64`.
    #[inline]
    pub fn eval_word(&self, x: u64) -> u64 {
        self.gates
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, g)| acc | (g.eval_with(|j| x >> j & 1 == 1) as u64) << i)
    }

    /// Substitutes the fixed inputs into every table. Remaining inputs are
    /// renumbered `0..m'` in increasing order of their original index.
    pub fn restrict(&self, cube: &Subcube) -> Result<LocalFn> {
        if let Some((&bad, _)) = cube.fixed.iter().find(|(&i, _)| i >= self.m) {
            return Err(Error::invalid(format!("subcube fixes input {bad} but m = {}", self.m)));
        }
        let mut renumber = vec![usize::MAX; self.m];
        let mut next = 0;
        for (i, slot) in renumber.iter_mut().enumerate() {
            if !cube.fixed.contains_key(&i) {
                *slot = next;
                next += 1;
            }
        }
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let free: Vec<usize> = (0..g.arity()).filter(|&j| !cube.fixed.contains_key(&g.inputs[j])).collect();
                let base = g.inputs.iter().enumerate().fold(0usize, |acc, (j, i)| {
                    acc | (cube.fixed.get(i).copied().unwrap_or(false) as usize) << j
                });
                let table = (0..1usize << free.len())
                    .map(|b| {
                        let idx = free.iter().enumerate().fold(base, |acc, (k, &j)| acc | (b >> k & 1) << j);
                        g.table[idx]
                    })
                    .collect();
                let inputs = free.iter().map(|&j| renumber[g.inputs[j]]).collect();
                OutputGate { inputs, table }
            })
            .collect();
        Ok(LocalFn { m: next, d: self.d, gates })
    }

    /// The function restricted to the listed outputs (in that order), same inputs.
    pub fn select_outputs(&self, outputs: &[usize]) -> Result<LocalFn> {
        let gates = outputs
            .iter()
            .map(|&i| {
                self.gates
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("output {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalFn { m: self.m, d: self.d, gates })
    }

    /// Inputs read by at least one of `outputs`, sorted.
    pub fn inputs_of(&self, outputs: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut v: Vec<usize> = outputs.into_iter().flat_map(|i| self.gates[i].inputs.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Random function: each gate reads a uniformly random number (≤ `d`) of
    /// distinct random inputs and has a uniformly random table.
    pub fn random(rng: &mut impl Rng, n: usize, m: usize, d: usize) -> LocalFn {
        let gates = (0..n)
            .map(|_| {
                let k = rng.gen_range(0..=d.min(m));
                let inputs = rand::seq::index::sample(rng, m, k).into_vec();
                let table = (0..1usize << k).map(|_| rng.gen()).collect();
                OutputGate { inputs, table }
            })
            .collect();
        LocalFn { m, d, gates }
    }

    pub fn to_file(&self) -> LocalFnFile {
        LocalFnFile {
            m: self.m,
            n: self.n(),
            d: self.d,
            outputs: self
                .gates
                .iter()
                .map(|g| GateFile { inputs: g.inputs.clone(), table: g.table_string() })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("serializable")
    }

    pub fn from_file(file: &LocalFnFile) -> Result<Self> {
        if file.outputs.len() != file.n {
            return Err(Error::Parse(format!("n = {} but {} outputs listed", file.n, file.outputs.len())));
        }
        let gates = file
            .outputs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let table = g
                    .table
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Parse(format!("outputs[{i}].table: bad character {c:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                OutputGate::new(g.inputs.clone(), table).map_err(|e| Error::Parse(format!("outputs[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        LocalFn::new(file.m, file.d, gates).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: LocalFnFile = serde_json::from_str(s)?;
        LocalFn::from_file(&file)
    }
}

/// JSON layout: `{"m":5,"n":4,"d":2,"outputs":[{"inputs":[0,1],"table":"0110"},...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalFnFile {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub outputs: Vec<GateFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateFile {
    pub inputs: Vec<usize>,
    pub table: String,
}

#[cfg(test)]
mod tests;
