//! Exact univariate polynomials and the Chebyshev-based bump `p(y) = (T_r(y/r)/y)²`.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;

use super::report::VerificationReport;
use crate::error::{Error, Result};
use crate::mass::{rational_to_f64, render_rational, Rational};

/// Rational coefficients in ascending degree, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        RationalPoly::new(vec![c])
    }

    /// The monomial `c·y^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        RationalPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `p(c·y)`.
    pub fn scale_arg(&self, c: &Rational) -> Self {
        let mut pow = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pow);
            pow *= c;
        }
        RationalPoly::new(out)
    }

    /// `p(y)/y`; fails unless the constant term is zero.
    pub fn div_by_y(&self) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::precondition("constant term is nonzero; y does not divide p"));
        }
        Ok(RationalPoly::new(self.coeffs.iter().skip(1).cloned().collect()))
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, a| acc * y + a)
    }

    /// `p(num/den)` via integer Horner over one common denominator.
    pub fn eval_ratio(&self, num: &BigInt, den: &BigInt) -> Rational {
        let Some(deg) = self.degree() else {
            return Rational::zero();
        };
        let cd = self.coeffs.iter().fold(BigInt::one(), |a, c| a.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer() * (&cd / c.denom())).collect();
        // acc = Σ a_j num^j den^{deg−j}
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for a in ints.iter().rev() {
            acc = acc * num + a * &den_pow;
            den_pow *= den;
        }
        Rational::new(acc, cd * den.pow(deg as u32))
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, o: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(o.coeffs.len());
        RationalPoly::new((0..len).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, o: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(o.coeffs.len());
        RationalPoly::new((0..len).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, o: &RationalPoly) -> RationalPoly {
        if self.is_zero() || o.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

/// Chebyshev polynomial of the first kind, `T_r(z)`.
pub fn chebyshev_t(r: usize) -> RationalPoly {
    let two_z = RationalPoly::monomial(Rational::from_integer(2.into()), 1);
    let mut prev = RationalPoly::constant(Rational::one());
    let mut cur = RationalPoly::monomial(Rational::one(), 1);
    if r == 0 {
        return prev;
    }
    for _ in 1..r {
        let next = &(&two_z * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `p(y) = (T_r(y/r)/y)²` for odd `r`, exactly.
pub fn chebyshev_p_coeffs(r: usize) -> Result<RationalPoly> {
    if r % 2 == 0 {
        return Err(Error::invalid(format!("r must be odd, got {r}")));
    }
    let inv_r = Rational::new(BigInt::one(), BigInt::from(r as u64));
    let q = chebyshev_t(r).scale_arg(&inv_r).div_by_y()?;
    Ok(&q * &q)
}

/// Checks the five properties of `p` for each odd `r` in `r_set` at
/// `y = k/step_den` for `|y| ≤ span·r`.
///
/// The properties: degree at most `2r` (exactly `2r − 2`, even powers only);
/// `p ≥ 1/2` on `|y| ≤ 1/10`; `p ≤ min(1, 1/y²)` on `|y| ≤ r`;
/// `p ≤ (2y/r)^{2r}` on `|y| ≥ r`; `p ≥ 0`.
pub fn verify_p_facts(r_set: &[usize], step_den: u64, span: u64) -> Result<VerificationReport> {
    if step_den == 0 {
        return Err(Error::invalid("grid step denominator must be ≥ 1"));
    }
    let polys = r_set.iter().map(|&r| chebyshev_p_coeffs(r).map(|p| (r, p))).collect::<Result<Vec<_>>>()?;
    let range = json!({ "r": r_set, "y": format!("k/{step_den}, |y| <= {span}r") });
    let parts: Vec<VerificationReport> = polys
        .par_iter()
        .map(|(r, p)| {
            let r = *r;
            let mut rep = VerificationReport::new("p-facts", json!(null));
            let deg = p.degree().unwrap_or(0);
            rep.record((2 * r - deg) as f64, deg <= 2 * r, || json!({ "r": r, "fact": 1, "degree": deg }));
            rep.record(0.0, deg == 2 * r - 2, || json!({ "r": r, "fact": "exact degree", "degree": deg }));
            let odd_zero = p.coeffs().iter().skip(1).step_by(2).all(Zero::is_zero);
            rep.record(0.0, odd_zero && p.coeff(deg).is_positive(), || json!({ "r": r, "fact": "even powers, positive lead" }));
            let den = BigInt::from(step_den);
            let rr = Rational::from_integer(BigInt::from(r as u64));
            let lim = (span * r as u64 * step_den) as i64;
            let tenth = Rational::new(BigInt::one(), BigInt::from(10));
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            for k in -lim..=lim {
                let num = BigInt::from(k);
                let y = Rational::new(num.clone(), den.clone());
                let v = p.eval_ratio(&num, &den);
                let ay = y.abs();
                let w = || json!({ "r": r, "y": render_rational(&y), "p": render_rational(&v) });
                rep.record(rational_to_f64(&v), !v.is_negative(), || json!({ "fact": 5, "at": w() }));
                if ay <= tenth {
                    rep.record(rational_to_f64(&(&v - &half)), v >= half, || json!({ "fact": 2, "at": w() }));
                }
                if ay <= rr {
                    rep.record(rational_to_f64(&(Rational::one() - &v)), v <= Rational::one(), || json!({ "fact": 3, "at": w() }));
                    let vy2 = &v * &y * &y;
                    rep.record(rational_to_f64(&(Rational::one() - &vy2)), vy2 <= Rational::one(), || {
                        json!({ "fact": "3 (1/y²)", "at": w() })
                    });
                }
                if ay >= rr {
                    let b = (Rational::from_integer(2.into()) * &ay / &rr).pow(2 * r as i32);
                    rep.record(rational_to_f64(&(&b - &v)), v <= b, || json!({ "fact": 4, "at": w() }));
                }
            }
            rep
        })
        .collect();
    let mut rep = parts.into_iter().fold(VerificationReport::new("p-facts", range.clone()), VerificationReport::merge).finish();
    rep.range = range;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::rat;

    #[test]
    fn chebyshev_recurrence() {
        // T_3 = 4z³ − 3z, T_4 = 8z⁴ − 8z² + 1
        assert_eq!(chebyshev_t(3).coeffs(), &[rat(0, 1), rat(-3, 1), rat(0, 1), rat(4, 1)]);
        assert_eq!(chebyshev_t(4).coeffs(), &[rat(1, 1), rat(0, 1), rat(-8, 1), rat(0, 1), rat(8, 1)]);
        for r in 0..12usize {
            let t = chebyshev_t(r);
            for k in [0.0f64, 0.3, 0.77, -0.5] {
                let v = rational_to_f64(&t.eval(&Rational::from_float(k).unwrap()));
                assert!((v - (r as f64 * k.acos()).cos()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn p_examples() {
        assert_eq!(chebyshev_p_coeffs(1).unwrap(), RationalPoly::constant(rat(1, 1)));
        for r in [3usize, 5, 7, 15] {
            let p = chebyshev_p_coeffs(r).unwrap();
            assert_eq!(p.eval(&rat(0, 1)), rat(1, 1));
            assert_eq!(p.degree(), Some(2 * r - 2));
        }
        assert!(chebyshev_p_coeffs(4).is_err());
    }

    #[test]
    fn eval_ratio_matches_eval() {
        let p = chebyshev_p_coeffs(7).unwrap();
        for k in -50i64..=50 {
            let y = Rational::new(BigInt::from(k), BigInt::from(7));
            assert_eq!(p.eval_ratio(&BigInt::from(k), &BigInt::from(7)), p.eval(&y));
        }
    }

    #[test]
    fn facts_small() {
        let r = verify_p_facts(&[1, 3, 5], 20, 3).unwrap();
        assert!(r.passed, "{:?}", r.violations);
    }
}
