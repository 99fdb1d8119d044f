//! Exactness consequences of being very close to `evens`, `odds` or `all`.
//!
//! For a `d`-local `f` (with `d ≥ 1`): distance below `2^{−d}` to `evens` or
//! `odds` forces the support inside theirs, and distance below `2^{−kd}` to any
//! of the three forces `k`-wise independence. Each instance contributes one
//! check per (target, k) whose hypothesis holds; the rest are counted as vacuous.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::report::VerificationReport;
use crate::dist::{Dist, SpecialKind};
use crate::error::Result;
use crate::localfn::{canonical, evens_with_flips, kwise_check, mixture_evens_odds, Engine, LocalFn};
use crate::mass::{rational_to_f64, render_rational, Rational};
use crate::rng;

/// A named local function used as a test instance.
#[derive(Debug, Clone)]
pub struct ClaimInstance {
    pub name: String,
    pub f: LocalFn,
}

/// Canonical samplers, the flips family, the parity mixture, and a few random
/// functions, all at `n ≤ n_max`.
pub fn claim_instances(n_max: usize, random: u64, seed: u64) -> Result<Vec<ClaimInstance>> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for kind in SpecialKind::ALL {
            out.push(ClaimInstance { name: format!("canonical({},{n})", kind.name()), f: canonical(kind, n)? });
        }
        for c in 1..=n {
            out.push(ClaimInstance { name: format!("flips({n},{c})"), f: evens_with_flips(n, c)? });
        }
        out.push(ClaimInstance { name: format!("mixture({n})"), f: mixture_evens_odds(n)? });
    }
    for t in 0..random {
        let mut r = rng::stream(seed, t);
        use rand::Rng as _;
        let n = r.gen_range(2..=n_max.max(2));
        let d = r.gen_range(1..=3);
        let m = r.gen_range(1..=12);
        out.push(ClaimInstance { name: format!("random#{t}"), f: LocalFn::random(&mut r, n, m, d) });
    }
    Ok(out)
}

fn parity_ok(p: &Dist<Rational>, kind: SpecialKind) -> bool {
    let want = if kind == SpecialKind::Evens { 0 } else { 1 };
    p.support().all(|x| x.count_ones() % 2 == want)
}

/// `tv < 2^{−e}` for an exact `tv`.
fn below_pow2(tv: &Rational, e: usize) -> bool {
    tv * Rational::from_integer(BigInt::from(1u8) << e) < Rational::from_integer(1.into())
}

fn check_instance(inst: &ClaimInstance) -> Result<(VerificationReport, u64)> {
    let f = &inst.f;
    let n = f.n();
    let d = f.locality().max(1);
    let p = f.output_distribution::<Rational>(Engine::Auto)?;
    let mut rep = VerificationReport::new("claims", Value::Null);
    let mut vacuous = 0;
    let tv_of = |kind: SpecialKind| -> Result<Rational> { p.tv_distance(&kind.dist::<Rational>(n)?) };
    for kind in [SpecialKind::Evens, SpecialKind::Odds] {
        let tv = tv_of(kind)?;
        if below_pow2(&tv, d) {
            rep.record(0.0, parity_ok(&p, kind), || {
                json!({ "claim": "constant parity", "instance": inst.name, "target": kind.name(), "tv": render_rational(&tv) })
            });
        } else {
            vacuous += 1;
        }
    }
    for kind in [SpecialKind::Evens, SpecialKind::Odds, SpecialKind::All] {
        let tv = tv_of(kind)?;
        for k in 1..n {
            if k * d > 60 || !below_pow2(&tv, k * d) {
                vacuous += 1;
                continue;
            }
            let kw = kwise_check(f, k)?;
            rep.record(0.0, kw.passed, || {
                json!({
                    "claim": "moment matching", "instance": inst.name, "target": kind.name(), "k": k,
                    "tv": render_rational(&tv), "tv_float": rational_to_f64(&tv), "biased": kw.violations,
                })
            });
        }
    }
    Ok((rep, vacuous))
}

/// Runs both implications over [`claim_instances`].
pub fn verify_claims(n_max: usize, random: u64, seed: u64) -> Result<VerificationReport> {
    let instances = claim_instances(n_max, random, seed)?;
    let results = instances.par_iter().map(check_instance).collect::<Result<Vec<_>>>()?;
    let range = json!({ "n": [2, n_max], "random_instances": random, "seed": seed, "instances": instances.len() });
    let vacuous: u64 = results.iter().map(|r| r.1).sum();
    let mut rep = results
        .into_iter()
        .map(|r| r.0)
        .fold(VerificationReport::new("claims", range.clone()), VerificationReport::merge)
        .finish();
    rep.range = range;
    rep.notes = json!({ "hypothesis_met": rep.checked, "vacuous": vacuous });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flips_with_many_flips_are_one_wise_independent() {
        // tv(flips(10,6), all) = 2^{-7} < 2^{-4}: the k = 1 case applies
        let inst = ClaimInstance { name: "flips".into(), f: evens_with_flips(10, 6).unwrap() };
        let (rep, _) = check_instance(&inst).unwrap();
        assert!(rep.passed);
        assert!(rep.checked >= 1);
    }

    #[test]
    fn zero_locality_needs_d_at_least_one() {
        // zeros is 0-local; with d = 0 the moment claim would demand 1-wise
        // independence from tv(zeros, all) < 1
        let inst = ClaimInstance { name: "zeros".into(), f: canonical(SpecialKind::Zeros, 4).unwrap() };
        let (rep, _) = check_instance(&inst).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
    }

    #[test]
    fn suite_passes() {
        let rep = verify_claims(7, 10, 3).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
        assert!(rep.checked > 20);
    }
}
