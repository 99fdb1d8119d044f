//! Batch evaluation of `tv(p, D_Ψ)` over many Ψ.
//!
//! All masses are scaled to integers `A_x = p(x)·D` over a common denominator
//! `D`. For a candidate Ψ with `Z = |supp D_Ψ|`,
//!
//! `2·D·Z·tv = Z·Σ_{w∉Ψ} T_w + Σ_{w∈Ψ} Σ_{|x|=w} |Z·A_x − D|`
//!
//! where `T_w` is the scaled mass of slice `w`. Within a slice the inner sum is
//! read off the descending-sorted masses and their prefix sums after a binary
//! search for the last `A_x > D/Z`. Arithmetic runs in `i128` when the
//! magnitudes fit and in `BigInt` otherwise.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dist::{Dist, PsiSet, WDist};
use crate::error::{Error, Result};
use crate::mass::{binomial_row, Rational};

/// Largest `n` for which [`PsiEvaluator::best`] enumerates every Ψ.
pub const BEST_PSI_MAX_N: usize = 20;

trait Int: Clone + Ord + Num + Send + Sync + From<u64> {}
impl<T: Clone + Ord + Num + Send + Sync + From<u64>> Int for T {}

#[derive(Debug, Clone)]
enum Slice<T> {
    /// Supported string masses, descending, with `prefix[k]` = sum of the top `k`.
    Strings { sorted: Vec<T>, prefix: Vec<T> },
    /// Weight-level data: the slice mass is spread evenly over its strings.
    Uniform,
}

#[derive(Debug, Clone)]
struct Table<T> {
    den: T,
    totals: Vec<T>,
    sizes: Vec<T>,
    slices: Vec<Slice<T>>,
}

impl<T: Int> Table<T> {
    /// `(num, Z)` with `tv = num / (2·D·Z)`.
    fn eval(&self, members: impl Iterator<Item = usize>) -> (T, T) {
        let mut z = T::zero();
        let mut inside = T::zero();
        let mut partial: Vec<usize> = Vec::new();
        for w in members {
            z = z + self.sizes[w].clone();
            inside = inside + self.totals[w].clone();
            partial.push(w);
        }
        let mut num = z.clone() * (self.den.clone() - inside);
        for w in partial {
            num = num + self.slice_gap(w, &z);
        }
        (num, z)
    }

    /// `Σ_{|x|=w} |Z·A_x − D|`.
    fn slice_gap(&self, w: usize, z: &T) -> T {
        let d = &self.den;
        let t = &self.totals[w];
        let c = &self.sizes[w];
        match &self.slices[w] {
            Slice::Uniform => {
                let a = z.clone() * t.clone();
                let b = c.clone() * d.clone();
                if a >= b {
                    a - b
                } else {
                    b - a
                }
            }
            Slice::Strings { sorted, prefix } => {
                let k = sorted.partition_point(|a| a.clone() * z.clone() > *d);
                let kt = T::from(k as u64);
                let top = prefix[k].clone();
                // above: Z·top − k·D ; below: (C − k)·D − Z·(T − top)
                z.clone() * top.clone() - kt.clone() * d.clone() + (c.clone() - kt) * d.clone()
                    - z.clone() * (t.clone() - top)
            }
        }
    }

    fn best(&self, n: usize) -> (u64, T, T) {
        let better = |a: (u64, T, T), b: (u64, T, T)| -> (u64, T, T) {
            let lhs = a.1.clone() * b.2.clone();
            let rhs = b.1.clone() * a.2.clone();
            match lhs.cmp(&rhs) {
                Ordering::Less => a,
                Ordering::Greater => b,
                Ordering::Equal => {
                    if lex_cmp(a.0, b.0) == Ordering::Greater {
                        b
                    } else {
                        a
                    }
                }
            }
        };
        (1u64..1u64 << (n + 1))
            .into_par_iter()
            .map(|mask| {
                let (num, z) = self.eval(bits(mask));
                (mask, num, z)
            })
            .reduce_with(better)
            .expect("at least one candidate")
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |w| mask >> w & 1 == 1)
}

/// Lexicographic order of the sorted member lists encoded by two masks.
fn lex_cmp(a: u64, b: u64) -> Ordering {
    bits(a).cmp(bits(b))
}

#[derive(Debug, Clone)]
enum Inner {
    Small(Table<i128>),
    Big(Table<BigInt>),
}

/// Precomputed per-slice data for one distribution; evaluates any Ψ exactly.
#[derive(Debug, Clone)]
pub struct PsiEvaluator {
    n: usize,
    den: BigInt,
    inner: Inner,
}

impl PsiEvaluator {
    /// String-level evaluator for `p`.
    pub fn from_dist(p: &Dist<Rational>) -> Self {
        let n = p.n();
        let den = common_denominator(p.entries().iter().map(|(_, m)| m));
        let mut slices: Vec<Vec<BigInt>> = vec![Vec::new(); n + 1];
        for (x, m) in p.entries() {
            slices[x.count_ones() as usize].push(scale(m, &den));
        }
        let mut totals = Vec::with_capacity(n + 1);
        let mut data = Vec::with_capacity(n + 1);
        for mut s in slices {
            s.sort_unstable_by(|a, b| b.cmp(a));
            let mut prefix = Vec::with_capacity(s.len() + 1);
            let mut acc = BigInt::zero();
            prefix.push(acc.clone());
            for a in &s {
                acc += a;
                prefix.push(acc.clone());
            }
            totals.push(acc);
            data.push(Slice::Strings { sorted: s, prefix });
        }
        PsiEvaluator::build(n, den, totals, data)
    }

    /// Weight-level evaluator; valid as string-level tv when `p` is symmetric.
    pub fn from_weights(w: &WDist<Rational>) -> Self {
        let n = w.n();
        let den = common_denominator(w.masses().iter());
        let totals = w.masses().iter().map(|m| scale(m, &den)).collect();
        PsiEvaluator::build(n, den, totals, vec![Slice::Uniform; n + 1])
    }

    fn build(n: usize, den: BigInt, totals: Vec<BigInt>, slices: Vec<Slice<BigInt>>) -> Self {
        let sizes: Vec<BigInt> = binomial_row(n as u64).into_iter().map(BigInt::from).collect();
        // Products of up to three factors bounded by D·2^(n+3) must stay in i128.
        let small = den.bits() as usize + 2 * (n + 1) + 6 < 126;
        let big = Table { den: den.clone(), totals, sizes, slices };
        let inner = if small {
            Inner::Small(Table {
                den: to_i128(&big.den),
                totals: big.totals.iter().map(to_i128).collect(),
                sizes: big.sizes.iter().map(to_i128).collect(),
                slices: big
                    .slices
                    .iter()
                    .map(|s| match s {
                        Slice::Uniform => Slice::Uniform,
                        Slice::Strings { sorted, prefix } => Slice::Strings {
                            sorted: sorted.iter().map(to_i128).collect(),
                            prefix: prefix.iter().map(to_i128).collect(),
                        },
                    })
                    .collect(),
            })
        } else {
            Inner::Big(big)
        };
        PsiEvaluator { n, den, inner }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether the evaluator runs in native 128-bit arithmetic.
    pub fn is_native(&self) -> bool {
        matches!(self.inner, Inner::Small(_))
    }

    /// Exact `tv(p, D_Ψ)`.
    pub fn tv(&self, psi: &PsiSet) -> Result<Rational> {
        if psi.n() != self.n {
            return Err(Error::mismatch(format!("Ψ over n = {} vs distribution n = {}", psi.n(), self.n)));
        }
        let members = psi.members().iter().copied();
        Ok(match &self.inner {
            Inner::Small(t) => {
                let (num, z) = t.eval(members);
                self.finish(BigInt::from(num), BigInt::from(z))
            }
            Inner::Big(t) => {
                let (num, z) = t.eval(members);
                self.finish(num, z)
            }
        })
    }

    /// `tv(p, D_Ψ)` for every Ψ in `psis`, in parallel.
    pub fn tv_batch(&self, psis: &[PsiSet]) -> Result<Vec<Rational>> {
        psis.par_iter().map(|psi| self.tv(psi)).collect()
    }

    /// The Ψ minimizing `tv(p, D_Ψ)` over all nonempty subsets of `{0..n}`;
    /// ties go to the lexicographically smallest member list.
    pub fn best(&self) -> Result<(PsiSet, Rational)> {
        if self.n > BEST_PSI_MAX_N {
            return Err(Error::limit(format!(
                "exhaustive Ψ search needs n ≤ {BEST_PSI_MAX_N}, got n = {}",
                self.n
            )));
        }
        let (mask, num, z) = match &self.inner {
            Inner::Small(t) => {
                let (mask, num, z) = t.best(self.n);
                (mask, BigInt::from(num), BigInt::from(z))
            }
            Inner::Big(t) => t.best(self.n),
        };
        let psi = PsiSet::from_mask(self.n, mask as u128)?;
        Ok((psi, self.finish(num, z)))
    }

    fn finish(&self, num: BigInt, z: BigInt) -> Rational {
        Rational::new(num, BigInt::from(2) * &self.den * z)
    }
}

fn common_denominator<'a>(masses: impl Iterator<Item = &'a Rational>) -> BigInt {
    masses.fold(BigInt::one(), |acc, m| acc.lcm(m.denom()))
}

fn scale(m: &Rational, den: &BigInt) -> BigInt {
    debug_assert!(!m.is_negative());
    m.numer() * (den / m.denom())
}

fn to_i128(x: &BigInt) -> i128 {
    x.to_i128().expect("magnitude checked before narrowing")
}

/// Direct `tv(p, D_Ψ)`: sums `|p(x) − q(x)|` over the support of `p` and adds
/// `1/Z` for every string of `D_Ψ` that `p` misses.
pub fn tv_to_psi(p: &Dist<Rational>, psi: &PsiSet) -> Result<Rational> {
    if psi.n() != p.n() {
        return Err(Error::mismatch(format!("Ψ over n = {} vs distribution n = {}", psi.n(), p.n())));
    }
    let z = psi.support_size();
    let q = Rational::new(BigInt::one(), BigInt::from(z.clone()));
    let mut sum = Rational::zero();
    let mut covered = BigUint::zero();
    for (x, m) in p.entries() {
        if psi.contains(x.count_ones() as usize) {
            sum += (m - &q).abs();
            covered += 1u8;
        } else {
            sum += m;
        }
    }
    sum += Rational::from_integer(BigInt::from(z - covered)) * q;
    Ok(sum / Rational::from_integer(BigInt::from(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::SpecialKind;
    use crate::mass::rat;

    #[test]
    fn zero_on_own_target() {
        for n in 1..=6 {
            for kind in SpecialKind::ALL {
                let p: Dist<Rational> = kind.dist(n).unwrap();
                let e = PsiEvaluator::from_dist(&p);
                assert!(e.tv(&kind.psi(n)).unwrap().is_zero(), "{kind} n={n}");
                assert!(tv_to_psi(&p, &kind.psi(n)).unwrap().is_zero());
            }
        }
        let all4: Dist<Rational> = SpecialKind::All.dist(4).unwrap();
        assert!(tv_to_psi(&all4, &PsiSet::all(4)).unwrap().is_zero());
    }

    #[test]
    fn big_path_matches_small_path() {
        let p = Dist::new(3, [(0u64, rat(1, 3)), (3, rat(2, 3))]).unwrap();
        let small = PsiEvaluator::from_dist(&p);
        assert!(small.is_native());
        let Inner::Small(t) = &small.inner else { unreachable!() };
        let big = PsiEvaluator {
            n: 3,
            den: small.den.clone(),
            inner: Inner::Big(Table {
                den: BigInt::from(t.den),
                totals: t.totals.iter().map(|&v| BigInt::from(v)).collect(),
                sizes: t.sizes.iter().map(|&v| BigInt::from(v)).collect(),
                slices: t
                    .slices
                    .iter()
                    .map(|s| match s {
                        Slice::Uniform => Slice::Uniform,
                        Slice::Strings { sorted, prefix } => Slice::Strings {
                            sorted: sorted.iter().map(|&v| BigInt::from(v)).collect(),
                            prefix: prefix.iter().map(|&v| BigInt::from(v)).collect(),
                        },
                    })
                    .collect(),
            }),
        };
        for mask in 1u128..16 {
            let psi = PsiSet::from_mask(3, mask).unwrap();
            assert_eq!(small.tv(&psi).unwrap(), big.tv(&psi).unwrap());
        }
        assert_eq!(small.best().unwrap(), big.best().unwrap());
    }

    #[test]
    fn lexicographic_masks() {
        // {0,2} < {1}; {0,1} < {0,2}; {0} < {0,1}
        assert_eq!(lex_cmp(0b101, 0b010), Ordering::Less);
        assert_eq!(lex_cmp(0b011, 0b101), Ordering::Less);
        assert_eq!(lex_cmp(0b001, 0b011), Ordering::Less);
    }
}
