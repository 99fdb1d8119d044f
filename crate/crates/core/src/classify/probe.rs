//! Report-only experiments: random ratio search and single-Ψ probes.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use super::{classify_dist, regime, tv_to_psi, RegimeLabel, Value};
use crate::dist::{PsiSet, SpecialKind};
use crate::error::{Error, Result};
use crate::localfn::{Engine, LocalFn, NAIVE_MAX_INPUTS};
use crate::mass::{rat, Rational};
use crate::rng;

use super::BEST_PSI_MAX_N;

/// One random function in a [`ratio_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTrial {
    pub trial: u64,
    pub m: usize,
    pub nearest: SpecialKind,
    pub eps_d: f64,
    pub best_psi: String,
    pub eps_star: f64,
    /// Float ratio, or `"inf"`.
    pub ratio: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSearchReport {
    pub n: usize,
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub max_finite_ratio: f64,
    pub argmax_trial: Option<u64>,
    pub infinite_ratios: u64,
    pub rows: Vec<RatioTrial>,
}

impl RatioSearchReport {
    /// One CSV row per trial.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Io(e.into()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Classifies `trials` random `d`-local functions with `n` outputs and records
/// `ε_D / ε*` for each. Trial `t` draws from stream `t` of `seed`, so the rows
/// do not depend on the thread count.
pub fn ratio_search(n: usize, d: usize, trials: u64, seed: u64) -> Result<RatioSearchReport> {
    if n == 0 || n > BEST_PSI_MAX_N {
        return Err(Error::limit(format!("ratio search needs 1 ≤ n ≤ {BEST_PSI_MAX_N}, got {n}")));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, t);
            let m = r.gen_range(1..=(2 * n).min(NAIVE_MAX_INPUTS));
            let f = LocalFn::random(&mut r, n, m, d);
            let p = f.output_distribution::<Rational>(Engine::Auto)?;
            let rep = classify_dist(&p, &[])?;
            Ok(RatioTrial {
                trial: t,
                m,
                nearest: rep.nearest,
                eps_d: rep.eps_d.float,
                best_psi: rep.best_psi.render(),
                eps_star: rep.eps_star.float,
                ratio: match rep.ratio_float {
                    Some(x) => format!("{x}"),
                    None => "inf".into(),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_finite_ratio = 0.0f64;
    let mut argmax_trial = None;
    let mut infinite_ratios = 0;
    for row in &rows {
        match row.ratio.parse::<f64>() {
            Ok(x) if x.is_finite() => {
                if argmax_trial.is_none() || x > max_finite_ratio {
                    max_finite_ratio = x;
                    argmax_trial = Some(row.trial);
                }
            }
            _ => infinite_ratios += 1,
        }
    }
    Ok(RatioSearchReport {
        n,
        d,
        trials,
        seed,
        rng: rng::RNG_ALGORITHM,
        max_finite_ratio,
        argmax_trial,
        infinite_ratios,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceProbeReport {
    pub n: usize,
    pub k: usize,
    pub tv: Value,
    /// `n^{-1/2}`, the scale of the distance deficit from 1.
    pub inv_sqrt_n: f64,
}

/// `tv(f(U), D_{k})` for the single slice `{k}`.
pub fn slice_probe(f: &LocalFn, k: usize, engine: Engine) -> Result<SliceProbeReport> {
    let n = f.n();
    let psi = PsiSet::new(n, [k])?;
    let p = f.output_distribution::<Rational>(engine)?;
    let tv = tv_to_psi(&p, &psi)?;
    Ok(SliceProbeReport { n, k, tv: Value::from(&tv), inv_sqrt_n: (n as f64).sqrt().recip() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailProbeReport {
    pub n: usize,
    pub psi: String,
    pub regime: RegimeLabel,
    pub tv: Value,
    /// Whether the distance exceeds 1/3.
    pub above_third: bool,
}

/// `tv(f(U), D_Ψ)` against the 1/3 threshold.
pub fn tail_probe(f: &LocalFn, psi: &PsiSet, engine: Engine) -> Result<TailProbeReport> {
    let p = f.output_distribution::<Rational>(engine)?;
    let tv = tv_to_psi(&p, psi)?;
    Ok(TailProbeReport {
        n: f.n(),
        psi: psi.render(),
        regime: regime(psi),
        above_third: tv > rat(1, 3),
        tv: Value::from(&tv),
    })
}
