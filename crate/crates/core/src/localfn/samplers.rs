//! Explicit local samplers.

use super::{LocalFn, OutputGate};
use crate::dist::SpecialKind;
use crate::error::{Error, Result};

fn xor2(a: usize, b: usize) -> OutputGate {
    OutputGate::parity(vec![a, b]).expect("distinct inputs")
}

fn negate(g: &OutputGate) -> OutputGate {
    OutputGate::new(g.inputs().to_vec(), g.table().iter().map(|b| !b).collect()).expect("same shape")
}

/// Cyclic XOR gates `x_i ⊕ x_{i+1 mod n}` (a constant 0 when `n = 1`).
fn cyclic_xor(n: usize) -> Vec<OutputGate> {
    if n == 1 {
        return vec![OutputGate::constant(false)];
    }
    (0..n).map(|i| xor2(i, (i + 1) % n)).collect()
}

/// The canonical local sampler of a special distribution.
///
/// zeros/ones use constant gates (locality 0), zerones copies input 0 to
/// every output and all is the identity (locality 1), evens is the cyclic
/// XOR and odds additionally negates output 0 (locality 2).
pub fn canonical(kind: SpecialKind, n: usize) -> Result<LocalFn> {
    if n == 0 {
        return Err(Error::invalid("canonical sampler needs n ≥ 1"));
    }
    match kind {
        SpecialKind::Zeros => LocalFn::new(0, 0, vec![OutputGate::constant(false); n]),
        SpecialKind::Ones => LocalFn::new(0, 0, vec![OutputGate::constant(true); n]),
        SpecialKind::Zerones => LocalFn::new(1, 1, vec![OutputGate::copy(0); n]),
        SpecialKind::All => LocalFn::new(n, 1, (0..n).map(OutputGate::copy).collect()),
        SpecialKind::Evens => LocalFn::new(n, 2, cyclic_xor(n)),
        SpecialKind::Odds => {
            let mut gates = cyclic_xor(n);
            gates[0] = negate(&gates[0]);
            LocalFn::new(n, 2, gates)
        }
    }
}

/// Evens with the first `c` outputs each flipped with probability 1/4:
/// gate `i < c` is `x_i ⊕ x_{i+1} ⊕ (a_i ∧ b_i)` with fresh inputs
/// `a_i = n + 2i`, `b_i = n + 2i + 1`. Locality 4, `m = n + 2c`.
pub fn evens_with_flips(n: usize, c: usize) -> Result<LocalFn> {
    if n < 2 {
        return Err(Error::invalid("evens_with_flips needs n ≥ 2"));
    }
    if c == 0 || c > n {
        return Err(Error::invalid(format!("c = {c} out of range 1..={n}")));
    }
    let gates = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            if i < c {
                OutputGate::from_fn(vec![i, j, n + 2 * i, n + 2 * i + 1], |b| b[0] ^ b[1] ^ (b[2] & b[3]))
            } else {
                Ok(xor2(i, j))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LocalFn::new(n + 2 * c, 4, gates)
}

/// The 3-local sampler of `¾·evens + ¼·odds`: gates `x_i ⊕ x_{i+1}` for
/// `i < n − 1` and `x_{n−1} ⊕ (x_0 ∨ r)` with `r` = input `n`.
pub fn mixture_evens_odds(n: usize) -> Result<LocalFn> {
    if n < 2 {
        return Err(Error::invalid("mixture_evens_odds needs n ≥ 2"));
    }
    let mut gates: Vec<OutputGate> = (0..n - 1).map(|i| xor2(i, i + 1)).collect();
    gates.push(OutputGate::from_fn(vec![n - 1, 0, n], |b| b[0] ^ (b[1] | b[2]))?);
    LocalFn::new(n + 1, 3, gates)
}
