//! Total-variation lemmas on random exact instances.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::report::VerificationReport;
use crate::dist::{Dist, WDist};
use crate::error::Result;
use crate::mass::{rat, rational_to_f64, render_rational, Rational};
use crate::rng;

/// Largest `n` for which every event is enumerated in the event oracle.
pub const EVENT_ORACLE_MAX_N: usize = 3;

/// Random distribution on at most `max_support` strings with integer weights in `1..=9`.
pub fn random_dist(r: &mut rng::Rng, n: usize, max_support: usize) -> Dist<Rational> {
    let size = 1usize << n;
    let support = r.gen_range(1..=max_support.clamp(1, size));
    let picks = sample(r, size, support);
    let weights: Vec<i64> = (0..picks.len()).map(|_| r.gen_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    Dist::new(n, picks.iter().zip(&weights).map(|(x, &w)| (x as u64, rat(w, total)))).expect("normalized")
}

fn random_wdist(r: &mut rng::Rng, n: usize) -> WDist<Rational> {
    let w: Vec<i64> = (0..=n).map(|_| if r.gen_bool(0.3) { 0 } else { r.gen_range(1..=9) }).collect();
    let w = if w.iter().all(|&c| c == 0) { vec![1; n + 1] } else { w };
    let total: i64 = w.iter().sum();
    WDist::new(w.iter().map(|&c| rat(c, total)).collect()).expect("normalized")
}

fn f(x: &Rational) -> f64 {
    rational_to_f64(x)
}

fn finish(suite: &str, range: Value, parts: Vec<VerificationReport>) -> VerificationReport {
    let mut rep = parts.into_iter().fold(VerificationReport::new(suite, range.clone()), VerificationReport::merge).finish();
    rep.range = range;
    rep
}

/// For random `A` and symmetric `B`:
/// `tv(A,B) ≤ tv(A,A_sym) + tv(|A|,|B|)` and `3·tv(A,B) ≥ tv(A,A_sym) + tv(|A|,|B|)`.
pub fn verify_distance_to_sym(trials: u64, n_max: usize, seed: u64) -> Result<VerificationReport> {
    let range = json!({ "trials": trials, "n": [1, n_max], "seed": seed });
    let parts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, t);
            let n = r.gen_range(1..=n_max);
            let a = random_dist(&mut r, n, 64);
            // half the time B shares A's weight profile up to a perturbation
            let wb = if r.gen_bool(0.5) {
                let mix = rat(r.gen_range(0..=4), 4);
                WDist::mixture(&[mix.clone(), Rational::one() - mix], &[a.weight_marginal(), random_wdist(&mut r, n)])?
            } else {
                random_wdist(&mut r, n)
            };
            let b = wb.to_symmetric_dist()?;
            let ab = a.tv_distance(&b)?;
            let asym = a.tv_distance(&a.symmetrize()?)?;
            let wts = a.weight_marginal().tv_distance(&wb)?;
            let sum = &asym + &wts;
            let mut rep = VerificationReport::new("distance-to-sym", Value::Null);
            let w = || json!({ "trial": t, "n": n, "tv_ab": render_rational(&ab), "tv_a_asym": render_rational(&asym), "tv_weights": render_rational(&wts) });
            rep.record(f(&(&sum - &ab)), ab <= sum, || json!({ "direction": "upper", "at": w() }));
            let three = Rational::from_integer(BigInt::from(3)) * &ab;
            rep.record(f(&(&three - &sum)), three >= sum, || json!({ "direction": "lower", "at": w() }));
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("distance-to-sym", range, parts))
}

/// Mixtures `P = Σ α_i P_i` of `t` components with `tv(P_i, Q) ≥ 1 − ε`
/// satisfy `tv(P, Q) ≥ 1 − (t+1)ε`; `ε` is the smallest value meeting the hypothesis.
pub fn verify_conditioning(trials: u64, n_max: usize, seed: u64) -> Result<VerificationReport> {
    let range = json!({ "trials": trials, "n": [2, n_max], "seed": seed });
    let parts = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k);
            let n = r.gen_range(2..=n_max.max(2));
            let size = 1usize << n;
            let q = random_dist(&mut r, n, size / 2);
            let t = r.gen_range(1..=4usize);
            let mut comps = Vec::with_capacity(t);
            for _ in 0..t {
                // mostly off Q's support, leaking a small fraction onto it
                let off: Vec<u64> = (0..size as u64).filter(|x| q.mass(*x).is_zero()).collect();
                let count = r.gen_range(1..=off.len());
                let pick = sample(&mut r, off.len(), count);
                let total = pick.len() as i64;
                let away = Dist::new(n, pick.iter().map(|j| (off[j], rat(1, total))))?;
                let leak = rat(r.gen_range(0..=4), 20);
                let onto = random_dist(&mut r, n, size);
                comps.push(Dist::mixture(&[Rational::one() - &leak, leak], &[away, onto])?);
            }
            let raw: Vec<i64> = (0..t).map(|_| r.gen_range(1..=5)).collect();
            let tot: i64 = raw.iter().sum();
            let alphas: Vec<Rational> = raw.iter().map(|&a| rat(a, tot)).collect();
            let p = Dist::mixture(&alphas, &comps)?;
            let eps = comps
                .iter()
                .map(|c| c.tv_distance(&q).map(|d| Rational::one() - d))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(Rational::zero(), |a, b| if b > a { b } else { a });
            let tv = p.tv_distance(&q)?;
            let bound = Rational::one() - Rational::from_integer(BigInt::from(t as u64 + 1)) * &eps;
            let mut rep = VerificationReport::new("tv-after-conditioning", Value::Null);
            rep.record(f(&(&tv - &bound)), tv >= bound, || {
                json!({ "trial": k, "n": n, "t": t, "eps": render_rational(&eps), "tv": render_rational(&tv) })
            });
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("tv-after-conditioning", range, parts))
}

fn bernoulli(p: &Rational) -> Dist<Rational> {
    Dist::new(1, [(0, Rational::one() - p), (1, p.clone())]).expect("p in [0, 1]")
}

/// Product instances: `P` and `W` products of Bernoullis with marginals at
/// least `ε` apart on `S`, `Q ∝ W·g` so that `W ≥ η·Q`. Checks
/// `tv(P, Q) ≥ 1 − 2e^{−ε²s/2}/η` (bound in floats, distance exact).
pub fn verify_product(trials: u64, n_max: usize, seed: u64) -> Result<VerificationReport> {
    let range = json!({ "trials": trials, "n": [1, n_max], "seed": seed });
    let parts = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k);
            let n = r.gen_range(1..=n_max);
            let mut ps = Vec::with_capacity(n);
            let mut ws = Vec::with_capacity(n);
            for _ in 0..n {
                let a = r.gen_range(1..=9);
                let b = if r.gen_bool(0.7) { 10 - a } else { r.gen_range(1..=9) };
                ps.push(rat(a, 10));
                ws.push(rat(b, 10));
            }
            let s_size = r.gen_range(1..=n);
            let s: Vec<usize> = sample(&mut r, n, s_size).into_vec();
            let p = Dist::product(&ps.iter().map(bernoulli).collect::<Vec<_>>())?;
            let w = Dist::product(&ws.iter().map(bernoulli).collect::<Vec<_>>())?;
            let g: Vec<(u64, Rational)> = w.entries().iter().map(|(x, m)| (*x, m * rat(r.gen_range(1..=4), 1))).collect();
            let z = g.iter().fold(Rational::zero(), |a, (_, v)| a + v);
            let q = Dist::new(n, g.iter().map(|(x, v)| (*x, v / &z)))?;
            let eta = q
                .entries()
                .iter()
                .map(|(x, m)| w.mass(*x) / m)
                .fold(None::<Rational>, |a, v| Some(match a { Some(a) if a <= v => a, _ => v }))
                .expect("nonempty support");
            let eps = s.iter().map(|&i| (&ps[i] - &ws[i]).abs()).fold(Rational::one(), |a, v| if v < a { v } else { a });
            let tv = p.tv_distance(&q)?;
            let e = f(&eps);
            let bound = 1.0 - 2.0 * (-e * e * s_size as f64 / 2.0).exp() / f(&eta);
            let mut rep = VerificationReport::new("tv-after-product", Value::Null);
            rep.check(bound, f(&tv), 1e-12, || {
                json!({ "trial": k, "n": n, "s": s_size, "eps": render_rational(&eps), "eta": render_rational(&eta), "tv": render_rational(&tv) })
            });
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("tv-after-product", range, parts))
}

/// A coupling of `p` and `q` with `Pr[X ≠ Y] = tv(p, q)`: the overlap on the
/// diagonal, the excesses paired proportionally off it.
pub fn maximal_coupling(p: &Dist<Rational>, q: &Dist<Rational>) -> Result<Vec<((u64, u64), Rational)>> {
    let tv = p.tv_distance(q)?;
    let keys: std::collections::BTreeSet<u64> = p.support().chain(q.support()).collect();
    let mut out = Vec::new();
    let mut over = Vec::new();
    let mut under = Vec::new();
    for &x in &keys {
        let (a, b) = (p.mass(x), q.mass(x));
        let m = if a < b { a.clone() } else { b.clone() };
        if !m.is_zero() {
            out.push(((x, x), m.clone()));
        }
        if a > m {
            over.push((x, a - &m));
        }
        if b > m {
            under.push((x, b - m));
        }
    }
    for (x, a) in &over {
        for (y, b) in &under {
            out.push(((*x, *y), a * b / &tv));
        }
    }
    Ok(out)
}

/// The equivalent forms of total variation: `½Σ|p−q|`, `Σ (p−q)⁺`, `1 − Σ min(p,q)`,
/// the maximum over all events (`n ≤ 3`), and a coupling attaining it.
pub fn verify_tv_identities(trials: u64, n_max: usize, seed: u64) -> Result<VerificationReport> {
    let range = json!({ "trials": trials, "n": [1, n_max], "seed": seed, "event_oracle_max_n": EVENT_ORACLE_MAX_N });
    let parts = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k);
            let n = if k % 4 == 0 { r.gen_range(1..=EVENT_ORACLE_MAX_N.min(n_max)) } else { r.gen_range(1..=n_max) };
            let size = 1usize << n;
            let p = random_dist(&mut r, n, 64);
            let q = random_dist(&mut r, n, 64);
            let tv = p.tv_distance(&q)?;
            let mut rep = VerificationReport::new("tv-identities", Value::Null);
            let w = |what: &str| json!({ "trial": k, "n": n, "check": what, "tv": render_rational(&tv) });
            rep.record(0.0, p.max_event_gap(&q)? == tv, || w("max_event_gap"));
            rep.record(0.0, Rational::one() - p.coupling_overlap(&q)? == tv, || w("coupling_overlap"));
            if n <= EVENT_ORACLE_MAX_N {
                let best = (0u64..1 << size)
                    .map(|ev| (0..size as u64).filter(|x| ev >> x & 1 == 1).fold(Rational::zero(), |a, x| a + p.mass(x) - q.mass(x)))
                    .fold(Rational::zero(), |a, v| if v > a { v } else { a });
                rep.record(0.0, best == tv, || w("event oracle"));
            }
            if !tv.is_zero() {
                let pi = maximal_coupling(&p, &q)?;
                let mut ok = true;
                for x in 0..size as u64 {
                    let row = pi.iter().filter(|((a, _), _)| *a == x).fold(Rational::zero(), |s, (_, m)| s + m);
                    let col = pi.iter().filter(|((_, b), _)| *b == x).fold(Rational::zero(), |s, (_, m)| s + m);
                    ok &= row == p.mass(x) && col == q.mass(x);
                }
                let off = pi.iter().filter(|((a, b), _)| a != b).fold(Rational::zero(), |s, (_, m)| s + m);
                rep.record(0.0, ok && off == tv, || w("explicit coupling"));
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("tv-identities", range, parts))
}
