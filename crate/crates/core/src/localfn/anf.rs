//! GF(2) algebraic normal form of the output parity `⊕_i f_i(x)`.

use std::collections::BTreeSet;
use std::fmt;

use super::{LocalFn, NAIVE_MAX_INPUTS};
use crate::error::{Error, Result};

/// A multilinear GF(2) polynomial in `m` variables; each monomial is a sorted
/// list of variable indices (the empty list is the constant 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anf {
    m: usize,
    monomials: BTreeSet<Vec<usize>>,
}

impl Anf {
    pub fn zero(m: usize) -> Self {
        Anf { m, monomials: BTreeSet::new() }
    }

    /// Adds (XORs) a monomial.
    pub fn toggle(&mut self, mut mono: Vec<usize>) {
        mono.sort_unstable();
        if !self.monomials.remove(&mono) {
            self.monomials.insert(mono);
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn monomials(&self) -> impl Iterator<Item = &[usize]> {
        self.monomials.iter().map(Vec::as_slice)
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Largest monomial size; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.monomials.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[bool]) -> bool {
        self.monomials.iter().filter(|mono| mono.iter().all(|&i| x[i])).count() % 2 == 1
    }

    /// Sum of monomials such as `x3 + x0*x3`, or `0`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.monomials
            .iter()
            .map(|mono| {
                if mono.is_empty() {
                    "1".to_string()
                } else {
                    mono.iter().map(|i| format!("x{i}")).collect::<Vec<_>>().join("*")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// In-place Möbius transform over GF(2): truth table -> ANF coefficients.
fn mobius(table: &mut [bool]) {
    let mut step = 1;
    while step < table.len() {
        for i in 0..table.len() {
            if i & step != 0 {
                table[i] ^= table[i ^ step];
            }
        }
        step <<= 1;
    }
}

/// Output-parity ANF, built gate by gate from each gate's own ANF.
pub fn anf_parity(f: &LocalFn) -> Anf {
    let mut p = Anf::zero(f.m());
    for g in f.gates() {
        let mut coeffs = g.table().to_vec();
        mobius(&mut coeffs);
        for (s, &c) in coeffs.iter().enumerate() {
            if c {
                let mono = (0..g.arity()).filter(|j| s >> j & 1 == 1).map(|j| g.inputs()[j]).collect();
                p.toggle(mono);
            }
        }
    }
    p
}

/// Output-parity ANF by a Möbius transform of the full `2^m` parity table.
pub fn anf_parity_mobius(f: &LocalFn) -> Result<Anf> {
    if f.m() > NAIVE_MAX_INPUTS {
        return Err(Error::limit(format!("Möbius transform needs m ≤ {NAIVE_MAX_INPUTS}")));
    }
    let mut table: Vec<bool> = (0..1u64 << f.m()).map(|x| f.eval_word_parity(x)).collect();
    mobius(&mut table);
    let mut p = Anf::zero(f.m());
    for (s, &c) in table.iter().enumerate() {
        if c {
            p.monomials.insert((0..f.m()).filter(|j| s >> j & 1 == 1).collect());
        }
    }
    Ok(p)
}

impl LocalFn {
    /// Parity of all outputs for packed input `x` (`m ≤ 64`, any `n`).
    pub(crate) fn eval_word_parity(&self, x: u64) -> bool {
        self.gates().iter().fold(false, |acc, g| acc ^ g.eval_with(|j| x >> j & 1 == 1))
    }
}
