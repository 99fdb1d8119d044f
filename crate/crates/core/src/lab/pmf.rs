//! Probability mass functions on a contiguous integer range.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mass::{parse_rational, render_rational, Mass, Rational};

/// `Pr[X = offset + j] = masses[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntPmf<M = Rational> {
    offset: i64,
    masses: Vec<M>,
}

impl<M: Mass> IntPmf<M> {
    pub fn new(offset: i64, masses: Vec<M>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::invalid("pmf needs at least one value"));
        }
        if let Some(j) = masses.iter().position(Mass::is_negative) {
            return Err(Error::invalid(format!("negative mass at {}", offset + j as i64)));
        }
        let total = masses.iter().fold(M::zero(), |a, m| a + m.clone());
        if !total.close_to(&M::one()) {
            return Err(Error::invalid(format!("masses sum to {total:?}, expected 1")));
        }
        Ok(IntPmf { offset, masses }.trimmed())
    }

    pub fn point(v: i64) -> Self {
        IntPmf { offset: v, masses: vec![M::one()] }
    }

    /// Uniform over the listed values (repeats add mass).
    pub fn uniform(values: &[i64]) -> Result<Self> {
        let lo = *values.iter().min().ok_or_else(|| Error::invalid("no values"))?;
        let hi = *values.iter().max().expect("nonempty");
        let mut masses = vec![M::zero(); (hi - lo + 1) as usize];
        let each = M::from_u64_ratio(1, values.len() as u64);
        for &v in values {
            let j = (v - lo) as usize;
            masses[j] = masses[j].clone() + each.clone();
        }
        IntPmf::new(lo, masses)
    }

    fn trimmed(mut self) -> Self {
        while self.masses.len() > 1 && self.masses.last().is_some_and(Mass::is_zero) {
            self.masses.pop();
        }
        let lead = self.masses.iter().take_while(|m| m.is_zero()).count().min(self.masses.len() - 1);
        if lead > 0 {
            self.masses.drain(..lead);
            self.offset += lead as i64;
        }
        self
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn masses(&self) -> &[M] {
        &self.masses
    }

    /// Smallest and largest value with nonzero mass.
    pub fn range(&self) -> (i64, i64) {
        (self.offset, self.offset + self.masses.len() as i64 - 1)
    }

    pub fn mass(&self, v: i64) -> M {
        let j = v - self.offset;
        if j < 0 {
            return M::zero();
        }
        self.masses.get(j as usize).cloned().unwrap_or_else(M::zero)
    }

    /// `max_x Pr[X ≡ x (mod r)]`.
    pub fn max_residue_mass(&self, r: u64) -> M {
        let mut acc = vec![M::zero(); r as usize];
        for (j, m) in self.masses.iter().enumerate() {
            let res = (self.offset + j as i64).rem_euclid(r as i64) as usize;
            acc[res] = acc[res].clone() + m.clone();
        }
        acc.into_iter().fold(M::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn negate(&self) -> Self {
        let mut masses = self.masses.clone();
        masses.reverse();
        IntPmf { offset: -(self.offset + self.masses.len() as i64 - 1), masses }
    }

    fn convolve_pair(&self, other: &Self) -> Self {
        let mut out = vec![M::zero(); self.masses.len() + other.masses.len() - 1];
        for (i, a) in self.masses.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.masses.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        IntPmf { offset: self.offset + other.offset, masses: out }.trimmed()
    }
}

impl IntPmf<Rational> {
    /// Distribution of the sum of independent variables, exactly.
    ///
    /// Works on integer numerators over a running common denominator, so no
    /// gcd is taken until the end.
    pub fn convolve(ps: &[IntPmf<Rational>]) -> Result<IntPmf<Rational>> {
        let first = ps.first().ok_or_else(|| Error::invalid("nothing to convolve"))?;
        let (mut nums, mut den) = scaled(first);
        let mut offset = first.offset;
        for p in &ps[1..] {
            let (pn, pd) = scaled(p);
            let mut out = vec![BigUint::zero(); nums.len() + pn.len() - 1];
            for (i, a) in nums.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in pn.iter().enumerate() {
                    if !b.is_zero() {
                        out[i + j] += a * b;
                    }
                }
            }
            nums = out;
            den *= pd;
            offset += p.offset;
        }
        let den = BigInt::from(den);
        let masses = nums.into_iter().map(|n| Rational::new(BigInt::from(n), den.clone())).collect();
        Ok(IntPmf { offset, masses }.trimmed())
    }

    pub fn to_float(&self) -> IntPmf<f64> {
        IntPmf { offset: self.offset, masses: self.masses.iter().map(Mass::to_f64).collect() }
    }

    pub fn to_file(&self) -> IntPmfFile {
        IntPmfFile { offset: self.offset, masses: self.masses.iter().map(render_rational).collect() }
    }

    pub fn from_file(f: &IntPmfFile) -> Result<Self> {
        let masses = f.masses.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        IntPmf::new(f.offset, masses)
    }
}

impl IntPmf<f64> {
    pub fn convolve_float(ps: &[IntPmf<f64>]) -> Result<IntPmf<f64>> {
        let first = ps.first().ok_or_else(|| Error::invalid("nothing to convolve"))?;
        Ok(ps[1..].iter().fold(first.clone(), |acc, p| acc.convolve_pair(p)))
    }
}

/// Integer numerators over the lcm of the denominators.
fn scaled(p: &IntPmf<Rational>) -> (Vec<BigUint>, BigUint) {
    let den = p.masses.iter().fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
    let nums = p
        .masses
        .iter()
        .map(|m| (m.numer() * (&den / m.denom())).to_biguint().expect("nonnegative"))
        .collect();
    (nums, den.to_biguint().expect("positive"))
}

/// JSON layout: `{"offset":0,"masses":["1/2","1/2"]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntPmfFile {
    pub offset: i64,
    pub masses: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::{binomial, rat};

    #[test]
    fn convolve_examples() {
        let coin = IntPmf::<Rational>::uniform(&[0, 1]).unwrap();
        let two = IntPmf::convolve(&[coin.clone(), coin.clone()]).unwrap();
        assert_eq!(two.masses(), &[rat(1, 4), rat(1, 2), rat(1, 4)]);
        let pts = IntPmf::convolve(&[IntPmf::point(3), IntPmf::point(4)]).unwrap();
        assert_eq!(pts, IntPmf::point(7));
        let b = IntPmf::convolve(&vec![coin; 20]).unwrap();
        for k in 0..=20 {
            assert_eq!(b.mass(k), Rational::new(binomial(20, k as u64).into(), BigInt::from(1u64 << 20)));
        }
        assert_eq!(b.masses().iter().fold(rat(0, 1), |a, m| a + m), rat(1, 1));
    }

    #[test]
    fn float_matches_exact() {
        let p = IntPmf::new(-2, vec![rat(3, 10), rat(0, 1), rat(3, 10), rat(2, 5)]).unwrap();
        let e = IntPmf::convolve(&vec![p.clone(); 7]).unwrap();
        let f = IntPmf::convolve_float(&vec![p.to_float(); 7]).unwrap();
        assert_eq!(e.range(), f.range());
        for v in e.range().0..=e.range().1 {
            assert!((e.mass(v).to_f64() - f.mass(v)).abs() < 1e-12);
        }
    }

    #[test]
    fn residues_and_shape() {
        let u = IntPmf::<Rational>::uniform(&[0, 1, 2]).unwrap();
        assert_eq!(u.max_residue_mass(2), rat(2, 3));
        assert_eq!(u.max_residue_mass(3), rat(1, 3));
        assert_eq!(IntPmf::<Rational>::point(0).max_residue_mass(5), rat(1, 1));
        let p = IntPmf::new(0, vec![rat(0, 1), rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(p, IntPmf::point(1));
        assert_eq!(u.negate().range(), (-2, 0));
        assert!(IntPmf::new(0, vec![rat(1, 2)]).is_err());
        let f = u.to_file();
        assert_eq!(IntPmf::from_file(&f).unwrap(), u);
    }
}
