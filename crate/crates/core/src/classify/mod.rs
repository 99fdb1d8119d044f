//! Matching an output distribution against the uniform symmetric family `D_Ψ`.
//!
//! [`classify`] reports the distance to each of the six special
//! distributions, the best-fitting `D_Ψ`, their ratio and the regime of the
//! best Ψ. [`regime`] and [`truncate_tail_support`] expose the split between
//! weight sets concentrated near `n/2` and those far in a tail.

mod eval;
mod probe;

pub use eval::{tv_to_psi, PsiEvaluator, BEST_PSI_MAX_N};
pub use probe::{ratio_search, slice_probe, tail_probe, RatioSearchReport, RatioTrial, SliceProbeReport, TailProbeReport};

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dist::{Dist, PsiSet, SpecialKind, WDist};
use crate::error::{Error, Result};
use crate::localfn::{Engine, LocalFn};
use crate::mass::{rational_to_f64, render_rational, Rational};

/// Default constant `C` in the tail truncation size `⌈C·n^{1/3}⌉`.
pub const TRUNCATION_CONSTANT: f64 = 6.0;

/// An exact probability together with its float rendering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Value {
    pub exact: String,
    pub float: f64,
}

impl From<&Rational> for Value {
    fn from(r: &Rational) -> Self {
        Value { exact: render_rational(r), float: rational_to_f64(r) }
    }
}

/// The member of Ψ closest to `n/2`, smaller weight on ties.
pub fn iota(psi: &PsiSet) -> usize {
    let n = psi.n() as i64;
    *psi.members()
        .iter()
        .min_by_key(|&&s| ((2 * s as i64 - n).abs(), s))
        .expect("Ψ is nonempty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Tail,
    Central,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Tail => "tail",
            Regime::Central => "central",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeLabel {
    pub regime: Regime,
    pub n: usize,
    pub iota: usize,
    /// `n^{2/3}`, for display; the comparison itself is done in integers.
    pub threshold: f64,
}

/// Tail iff `ι < n/2 − n^{2/3}` or `ι > n/2 + n^{2/3}`.
///
/// With `g = |n − 2ι|` the condition is `g > 2·n^{2/3}`, i.e. `g³ > 8n²`,
/// which is decided exactly.
pub fn regime(psi: &PsiSet) -> RegimeLabel {
    let n = psi.n();
    let i = iota(psi);
    let g = (n as i128 - 2 * i as i128).unsigned_abs();
    let n2 = (n as u128) * (n as u128);
    let tail = g > 0 && g.checked_pow(3).is_none_or(|g3| g3 > 8 * n2);
    RegimeLabel {
        regime: if tail { Regime::Tail } else { Regime::Central },
        n,
        iota: i,
        threshold: (n as f64).cbrt().powi(2),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Truncation {
    pub psi: PsiSet,
    pub kept: PsiSet,
    /// Target size `min(|Ψ|, ⌈C·n^{1/3}⌉)`.
    pub ell: usize,
    pub constant: f64,
    /// `tv(D_Ψ, D_Ψ̄)` = mass of `D_Ψ` outside the kept weights.
    pub tv: Value,
    #[serde(skip)]
    pub tv_exact: Rational,
}

/// Keeps the `ℓ = min(|Ψ|, ⌈C·n^{1/3}⌉)` members of a tail Ψ nearest to `n/2`.
///
/// Going outward from the middle, each further member carries a constant
/// fraction of the remaining `D_Ψ` mass, so a few dozen members already hold
/// nearly all of it.
pub fn truncate_tail_support(psi: &PsiSet, constant: f64) -> Result<Truncation> {
    let label = regime(psi);
    if label.regime != Regime::Tail {
        return Err(Error::precondition(format!(
            "Ψ is in the central regime (ι = {}, n = {})",
            label.iota, label.n
        )));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::invalid(format!("truncation constant must be positive, got {constant}")));
    }
    let n = psi.n();
    let ell = psi.len().min((constant * (n as f64).cbrt()).ceil() as usize).max(1);
    let mut order = psi.members().to_vec();
    order.sort_by_key(|&w| ((2 * w as i64 - n as i64).abs(), w));
    let kept = PsiSet::new(n, order[..ell].iter().copied())?;
    let z = psi.support_size();
    let zk = kept.support_size();
    let tv = Rational::new((&z - &zk).into(), z.into());
    Ok(Truncation {
        psi: psi.clone(),
        kept,
        ell,
        constant,
        tv: Value::from(&tv),
        tv_exact: tv,
    })
}

/// Distance to one special distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialTv {
    pub kind: SpecialKind,
    pub tv: Value,
    #[serde(skip)]
    pub exact: Rational,
}

/// Argmin over the six specials; ties resolved by their fixed order.
fn argmin(tvs: &[SpecialTv]) -> &SpecialTv {
    tvs.iter().fold(&tvs[0], |best, t| if t.exact < best.exact { t } else { best })
}

/// Nearest special distribution to a string-level `p`.
pub fn nearest_special(p: &Dist<Rational>) -> Result<(SpecialKind, Rational)> {
    let tvs = special_tvs(&PsiEvaluator::from_dist(p))?;
    let t = argmin(&tvs);
    Ok((t.kind, t.exact.clone()))
}

/// Nearest special distribution to a symmetric `p` given by its weights.
pub fn nearest_special_weights(w: &WDist<Rational>) -> Result<(SpecialKind, Rational)> {
    let tvs = special_tvs(&PsiEvaluator::from_weights(w))?;
    let t = argmin(&tvs);
    Ok((t.kind, t.exact.clone()))
}

fn special_tvs(eval: &PsiEvaluator) -> Result<Vec<SpecialTv>> {
    let n = eval.n();
    let psis: Vec<PsiSet> = SpecialKind::ALL.iter().map(|k| k.psi(n)).collect();
    let tvs = eval.tv_batch(&psis)?;
    Ok(SpecialKind::ALL
        .iter()
        .zip(tvs)
        .map(|(&kind, exact)| SpecialTv { kind, tv: Value::from(&exact), exact })
        .collect())
}

/// How the distribution was compared with `D_Ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Full string-level pmf.
    String,
    /// Weight profile of a symmetric distribution.
    Weight,
}

/// How Ψ* was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiSearch {
    /// Every nonempty Ψ ⊆ {0..n}.
    Exhaustive,
    /// The six specials' weight sets plus caller-supplied sets.
    Candidates,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub level: Level,
    pub symmetric: bool,
    pub specials: Vec<SpecialTv>,
    pub nearest: SpecialKind,
    pub eps_d: Value,
    pub psi_search: PsiSearch,
    pub best_psi: PsiSet,
    pub eps_star: Value,
    /// `ε_D / ε*` as `"num/den"`, or `"inf"` when `ε* = 0 < ε_D`.
    pub ratio: String,
    pub ratio_float: Option<f64>,
    pub regime: RegimeLabel,
    #[serde(skip)]
    pub eps_d_exact: Rational,
    #[serde(skip)]
    pub eps_star_exact: Rational,
}

impl ClassificationReport {
    fn assemble(
        n: usize,
        level: Level,
        symmetric: bool,
        specials: Vec<SpecialTv>,
        psi_search: PsiSearch,
        best: (PsiSet, Rational),
    ) -> Self {
        let near = argmin(&specials).clone();
        let (mut best_psi, mut eps_star) = best;
        // the specials are candidates too
        if near.exact < eps_star {
            best_psi = near.kind.psi(n);
            eps_star = near.exact.clone();
        }
        let (ratio, ratio_float) = if eps_star.is_zero() {
            if near.exact.is_zero() {
                ("1/1".to_string(), Some(1.0))
            } else {
                ("inf".to_string(), None)
            }
        } else {
            let r = &near.exact / &eps_star;
            (render_rational(&r), Some(rational_to_f64(&r)))
        };
        ClassificationReport {
            n,
            level,
            symmetric,
            nearest: near.kind,
            eps_d: Value::from(&near.exact),
            regime: regime(&best_psi),
            best_psi,
            eps_star: Value::from(&eps_star),
            psi_search,
            ratio,
            ratio_float,
            specials,
            eps_d_exact: near.exact,
            eps_star_exact: eps_star,
        }
    }

    /// `ε_D / ε*`, `None` for an infinite ratio.
    pub fn ratio_exact(&self) -> Option<Rational> {
        if self.eps_star_exact.is_zero() {
            self.eps_d_exact.is_zero().then(Rational::one)
        } else {
            Some(&self.eps_d_exact / &self.eps_star_exact)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn best_among(eval: &PsiEvaluator, extra: &[PsiSet]) -> Result<(PsiSet, Rational)> {
    let n = eval.n();
    let mut candidates: Vec<PsiSet> = SpecialKind::ALL.iter().map(|k| k.psi(n)).collect();
    candidates.extend(extra.iter().cloned());
    let tvs = eval.tv_batch(&candidates)?;
    let mut best: Option<(PsiSet, Rational)> = None;
    for (psi, tv) in candidates.into_iter().zip(tvs) {
        let replace = match &best {
            None => true,
            Some((bp, bt)) => tv < *bt || (tv == *bt && psi.members() < bp.members()),
        };
        if replace {
            best = Some((psi, tv));
        }
    }
    Ok(best.expect("six candidates"))
}

fn classify_with(eval: PsiEvaluator, level: Level, symmetric: bool, extra: &[PsiSet]) -> Result<ClassificationReport> {
    let n = eval.n();
    let specials = special_tvs(&eval)?;
    let (search, best) = if n <= BEST_PSI_MAX_N {
        let (psi, tv) = eval.best()?;
        (PsiSearch::Exhaustive, (psi, tv))
    } else {
        (PsiSearch::Candidates, best_among(&eval, extra)?)
    };
    Ok(ClassificationReport::assemble(n, level, symmetric, specials, search, best))
}

/// Classifies a string-level distribution.
///
/// Ψ* is exhaustive for `n ≤ 20`; above that it ranges over the specials and `extra`.
pub fn classify_dist(p: &Dist<Rational>, extra: &[PsiSet]) -> Result<ClassificationReport> {
    check_extra(p.n(), extra)?;
    classify_with(PsiEvaluator::from_dist(p), Level::String, p.is_symmetric(), extra)
}

/// Classifies a symmetric distribution from its weight profile.
pub fn classify_weights(w: &WDist<Rational>, extra: &[PsiSet]) -> Result<ClassificationReport> {
    check_extra(w.n(), extra)?;
    classify_with(PsiEvaluator::from_weights(w), Level::Weight, true, extra)
}

fn check_extra(n: usize, extra: &[PsiSet]) -> Result<()> {
    match extra.iter().find(|p| p.n() != n) {
        Some(p) => Err(Error::mismatch(format!("candidate Ψ over n = {} vs n = {n}", p.n()))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Default)]
pub struct ClassifyOptions {
    pub engine: Engine,
    /// Treat `f(U)` as symmetric and work with its weight distribution only.
    pub assume_symmetric: bool,
    /// Extra Ψ candidates, used when the exhaustive search is out of range.
    pub extra_psi: Vec<PsiSet>,
}

/// Computes `f(U)` exactly and classifies it.
pub fn classify(f: &LocalFn, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    if opts.assume_symmetric {
        let w = f.weight_distribution::<Rational>(opts.engine)?;
        return classify_weights(&w, &opts.extra_psi);
    }
    let p = f.output_distribution::<Rational>(opts.engine)?;
    classify_dist(&p, &opts.extra_psi)
}

#[cfg(test)]
mod tests;
