//! Density comparison for sums of bounded independent integer variables.
//!
//! The simple form: if every `Y_i` puts mass `≥ α` on two values `u_i` and
//! `u_i + φ`, then `Pr[ΣY = y] − Pr[ΣY = y + Δ] ≤ 22|Δ|/(φ·α·m)` for every
//! multiple `Δ` of `φ`. The general form derives such `Y`s from variables in
//! `{0..t}` by grouping them into blocks; [`construct_blocks`] carries out that
//! grouping on a concrete instance so each block can be checked directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::pmf::IntPmf;
use super::report::VerificationReport;
use crate::error::{Error, Result};
use crate::mass::{rat, rational_to_f64, render_rational, Rational};
use crate::rng;

/// Largest variable count convolved in exact arithmetic; floats beyond.
pub const EXACT_MAX_VARS: usize = 200;

/// Slack for float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

/// `n` independent variables in `{0..t}` and the moduli `Φ ⊆ {2..t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityInstance {
    t: u64,
    pmfs: Vec<IntPmf<Rational>>,
    phi_set: Vec<u64>,
}

impl DensityInstance {
    pub fn new(t: u64, pmfs: Vec<IntPmf<Rational>>, phi_set: impl IntoIterator<Item = u64>) -> Result<Self> {
        if t == 0 {
            return Err(Error::invalid("t must be ≥ 1"));
        }
        if pmfs.is_empty() {
            return Err(Error::invalid("need at least one variable"));
        }
        for (i, p) in pmfs.iter().enumerate() {
            let (lo, hi) = p.range();
            if lo < 0 || hi > t as i64 {
                return Err(Error::invalid(format!("X_{i} has support [{lo}, {hi}] outside {{0..{t}}}")));
            }
        }
        let mut phi_set: Vec<u64> = phi_set.into_iter().collect();
        phi_set.sort_unstable();
        phi_set.dedup();
        if let Some(&r) = phi_set.iter().find(|&&r| r < 2 || r > t) {
            return Err(Error::invalid(format!("Φ member {r} outside {{2..{t}}}")));
        }
        Ok(DensityInstance { t, pmfs, phi_set })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.pmfs.len()
    }

    pub fn pmfs(&self) -> &[IntPmf<Rational>] {
        &self.pmfs
    }

    pub fn phi_set(&self) -> &[u64] {
        &self.phi_set
    }

    /// Distribution of the sum, exact up to [`EXACT_MAX_VARS`] variables.
    pub fn sum_distribution(&self) -> Result<SumPmf> {
        if self.n() <= EXACT_MAX_VARS {
            Ok(SumPmf::Exact(IntPmf::convolve(&self.pmfs)?))
        } else {
            let fl: Vec<IntPmf<f64>> = self.pmfs.iter().map(IntPmf::to_float).collect();
            Ok(SumPmf::Float(IntPmf::convolve_float(&fl)?))
        }
    }
}

/// A sum distribution in whichever arithmetic it was computed in.
#[derive(Debug, Clone, PartialEq)]
pub enum SumPmf {
    Exact(IntPmf<Rational>),
    Float(IntPmf<f64>),
}

/// Parameters the density theorem derives from an instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityParams {
    /// lcm of `[t] ∖ Φ`.
    pub phi: u64,
    /// `L_r = Σ_i (1 − p_{r,i})` for each `r ∈ Φ`.
    pub l_by_r: Vec<(u64, String)>,
    pub l: String,
    pub alpha: String,
    pub alpha_log2: f64,
    pub block_count: u64,
    #[serde(skip)]
    pub l_exact: Rational,
    #[serde(skip)]
    pub alpha_exact: Rational,
    #[serde(skip)]
    pub p: Vec<Vec<Rational>>,
}

/// `φ`, `L_r`, `L`, `α = (L/(4n(t+1)))^{t²φ}` and `⌊L/(16t⁴φ)⌋`.
///
/// Fails with a precondition error when Φ is empty or some `L_r` is zero.
pub fn density_params(inst: &DensityInstance) -> Result<DensityParams> {
    if inst.phi_set.is_empty() {
        return Err(Error::precondition("Φ is empty; the density theorem does not apply"));
    }
    let t = inst.t;
    let n = inst.n() as u64;
    let phi = (1..=t).filter(|r| !inst.phi_set.contains(r)).fold(1u64, |a, r| a.lcm(&r));
    let mut p = Vec::new();
    let mut l_by_r = Vec::new();
    let mut l: Option<Rational> = None;
    for &r in &inst.phi_set {
        let pr: Vec<Rational> = inst.pmfs.iter().map(|x| x.max_residue_mass(r)).collect();
        let lr = pr.iter().fold(Rational::zero(), |a, q| a + (Rational::one() - q));
        if !lr.is_positive() {
            return Err(Error::precondition(format!("L_{r} = 0: every X_i is constant mod {r}")));
        }
        l_by_r.push((r, render_rational(&lr)));
        l = Some(match l {
            Some(cur) if cur <= lr => cur,
            _ => lr.clone(),
        });
        p.push(pr);
    }
    let l = l.expect("Φ nonempty");
    let base = &l / Rational::from_integer(BigInt::from(4 * n * (t + 1)));
    let exp = t * t * phi;
    let alpha = pow_rational(&base, exp);
    let block_count = (&l / Rational::from_integer(BigInt::from(16 * t.pow(4) * phi)))
        .floor()
        .to_integer()
        .to_u64()
        .unwrap_or(0);
    Ok(DensityParams {
        phi,
        l_by_r,
        l: render_rational(&l),
        alpha: render_rational(&alpha),
        alpha_log2: exp as f64 * rational_to_f64(&base).log2(),
        block_count,
        l_exact: l,
        alpha_exact: alpha,
        p,
    })
}

fn pow_rational(r: &Rational, e: u64) -> Rational {
    let e = u32::try_from(e).expect("exponent fits in u32");
    Rational::new(r.numer().pow(e), r.denom().pow(e))
}

/// Integers `s` with `Σ s_j·w_j = target`, reduced so that `max |s_j|` is small.
pub fn bezout_combination(ws: &[i64], target: i64) -> Result<Vec<i64>> {
    if ws.is_empty() || ws.contains(&0) {
        return Err(Error::invalid("weights must be nonempty and nonzero"));
    }
    let mut g = ws[0] as i128;
    let mut s: Vec<i128> = vec![1];
    for &w in &ws[1..] {
        let e = g.extended_gcd(&(w as i128));
        for c in s.iter_mut() {
            *c *= e.x;
        }
        s.push(e.y);
        g = e.gcd;
    }
    // extended_gcd may return a negative gcd
    if g < 0 {
        g = -g;
        for c in s.iter_mut() {
            *c = -*c;
        }
    }
    if target as i128 % g != 0 {
        return Err(Error::invalid(format!("gcd {g} does not divide {target}")));
    }
    let scale = target as i128 / g;
    for c in s.iter_mut() {
        *c *= scale;
    }
    reduce_coefficients(ws, &mut s);
    s.into_iter()
        .map(|c| i64::try_from(c).map_err(|_| Error::limit("Bézout coefficient overflow")))
        .collect()
}

/// Pairwise moves `s_j += c·w_k/g, s_k −= c·w_j/g` that shrink `(max |s|, Σ|s|)`.
fn reduce_coefficients(ws: &[i64], s: &mut [i128]) {
    let cost = |s: &[i128]| (s.iter().map(|c| c.abs()).max().unwrap_or(0), s.iter().map(|c| c.abs()).sum::<i128>());
    loop {
        let mut improved = false;
        for j in 0..s.len() {
            for k in j + 1..s.len() {
                let (wj, wk) = (ws[j] as i128, ws[k] as i128);
                let g = wj.gcd(&wk);
                let (a, b) = (wk / g, wj / g);
                let (sj, sk) = (s[j], s[k]);
                let mut cands = Vec::new();
                for (num, den) in [(-sj, a), (sk, b), (sk - sj, a + b), (-sk - sj, a - b)] {
                    if den != 0 {
                        cands.push(Integer::div_floor(&num, &den));
                        cands.push(Integer::div_floor(&num, &den) + 1);
                    }
                }
                let before = cost(s);
                let mut best = (before, 0i128);
                for c in cands {
                    s[j] = sj + c * a;
                    s[k] = sk - c * b;
                    let now = cost(s);
                    if now < best.0 {
                        best = (now, c);
                    }
                }
                s[j] = sj + best.1 * a;
                s[k] = sk - best.1 * b;
                if best.1 != 0 {
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// A value `u` with `Pr[Y = u] ≥ α` and `Pr[Y = u + φ] ≥ α`, smallest first.
pub fn find_anchor(y: &IntPmf<Rational>, phi: u64, alpha: &Rational) -> Option<i64> {
    let (lo, hi) = y.range();
    (lo..=hi).find(|&u| y.mass(u) >= *alpha && y.mass(u + phi as i64) >= *alpha)
}

/// Nonzero multiples of `φ` up to `Δ_max` in absolute value, both signs.
fn deltas(phi: u64, delta_max: u64) -> Vec<i64> {
    let k = delta_max / phi;
    (1..=k as i64).flat_map(|j| [j * phi as i64, -(j * phi as i64)]).collect()
}

/// `max_y Pr[S = y] − Pr[S = y + Δ]` with the maximizing `y`.
fn max_gap_exact(s: &IntPmf<Rational>, delta: i64) -> (Rational, i64) {
    let den = s.masses().iter().fold(BigInt::one(), |a, m| a.lcm(m.denom()));
    let nums: Vec<BigInt> = s.masses().iter().map(|m| m.numer() * (&den / m.denom())).collect();
    let (lo, _) = s.range();
    let at = |v: i64| -> BigInt {
        let j = v - lo;
        if j < 0 {
            BigInt::zero()
        } else {
            nums.get(j as usize).cloned().unwrap_or_else(BigInt::zero)
        }
    };
    let mut best = (BigInt::zero(), lo);
    for (j, a) in nums.iter().enumerate() {
        let y = lo + j as i64;
        let d = a - at(y + delta);
        if d > best.0 {
            best = (d, y);
        }
    }
    (Rational::new(best.0, den), best.1)
}

fn max_gap_float(s: &IntPmf<f64>, delta: i64) -> (f64, i64) {
    let (lo, _) = s.range();
    let mut best = (0.0, lo);
    for (j, &a) in s.masses().iter().enumerate() {
        let y = lo + j as i64;
        let d = a - s.mass(y + delta);
        if d > best.0 {
            best = (d, y);
        }
    }
    best
}

/// `22|Δ|/(φ·α·m)`.
fn density_bound(delta: i64, phi: u64, alpha: &Rational, m: u64) -> Rational {
    Rational::from_integer(BigInt::from(22 * delta.unsigned_abs()))
        / (Rational::from_integer(BigInt::from(phi * m)) * alpha)
}

/// Checks the simple density lemma on `ys` for every multiple of `φ` up to
/// `Δ_max`, in exact arithmetic.
pub fn check_density_lemma(
    ys: &[IntPmf<Rational>],
    phi: u64,
    alpha: &Rational,
    u: &[i64],
    delta_max: u64,
) -> Result<VerificationReport> {
    if phi == 0 || !alpha.is_positive() {
        return Err(Error::invalid("need φ ≥ 1 and α > 0"));
    }
    if u.len() != ys.len() || ys.is_empty() {
        return Err(Error::mismatch(format!("{} anchors for {} variables", u.len(), ys.len())));
    }
    for (i, (y, &ui)) in ys.iter().zip(u).enumerate() {
        if y.mass(ui) < *alpha || y.mass(ui + phi as i64) < *alpha {
            return Err(Error::precondition(format!(
                "Y_{i}: Pr[Y = {ui}] = {}, Pr[Y = {}] = {}, below α = {}",
                render_rational(&y.mass(ui)),
                ui + phi as i64,
                render_rational(&y.mass(ui + phi as i64)),
                render_rational(alpha)
            )));
        }
    }
    let m = ys.len() as u64;
    let mut rep = VerificationReport::new(
        "density-lemma",
        json!({ "m": m, "phi": phi, "alpha": render_rational(alpha), "delta_max": delta_max }),
    );
    let s = IntPmf::convolve(ys)?;
    let mut worst = 0.0f64;
    for d in deltas(phi, delta_max) {
        let (gap, y) = max_gap_exact(&s, d);
        let bound = density_bound(d, phi, alpha, m);
        let ratio = rational_to_f64(&(&gap / &bound));
        worst = worst.max(ratio);
        rep.record(rational_to_f64(&(&bound - &gap)), gap <= bound, || {
            json!({ "y": y, "delta": d, "gap": render_rational(&gap), "bound": render_rational(&bound) })
        });
    }
    rep.notes = json!({ "max_gap_over_bound": worst });
    Ok(rep)
}

/// Result of grouping an instance into blocks that satisfy the simple lemma.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockConstruction {
    /// For each `r ∈ Φ`: the chosen value pair `(z_r, z'_r)`.
    pub pairs: Vec<(u64, i64, i64)>,
    /// Bézout coefficients with `Σ s_j (z_j − z'_j) = φ`.
    pub bezout: Vec<i64>,
    /// Indices of the variables in each block.
    pub blocks: Vec<Vec<usize>>,
    /// Anchor `u_ℓ` per block.
    pub anchors: Vec<i64>,
}

/// Follows the reduction from bounded variables to blocks: select per modulus
/// the variables that are far from constant mod `r`, pick a common pair of
/// values incongruent mod `r` with mass `≥ L/(4n(t+1))`, and cut them into
/// blocks of `tφ` variables per modulus.
pub fn construct_blocks(inst: &DensityInstance, params: &DensityParams) -> Result<BlockConstruction> {
    let n = inst.n();
    let t = inst.t;
    let phi = params.phi;
    let l = &params.l_exact;
    let heavy = l / Rational::from_integer(BigInt::from(2 * n as u64));
    let floor_mass = l / Rational::from_integer(BigInt::from(4 * n as u64 * (t + 1)));
    let keep = (l / Rational::from_integer(BigInt::from(4 * t))).floor().to_integer().to_usize().unwrap_or(0);
    let mut used = vec![false; n];
    let mut selected: Vec<(u64, i64, i64, Vec<usize>)> = Vec::new();
    for (j, &r) in inst.phi_set.iter().enumerate() {
        let s: Vec<usize> = (0..n)
            .filter(|&i| !used[i] && Rational::one() - &params.p[j][i] >= heavy)
            .take(keep)
            .collect();
        if s.len() < keep {
            return Err(Error::precondition(format!("only {} variables far from constant mod {r}", s.len())));
        }
        for &i in &s {
            used[i] = true;
        }
        let mut best: Option<(usize, i64, i64)> = None;
        for z in 0..=t as i64 {
            for z2 in z + 1..=t as i64 {
                if (z2 - z) % r as i64 == 0 {
                    continue;
                }
                let count = s
                    .iter()
                    .filter(|&&i| inst.pmfs[i].mass(z) >= floor_mass && inst.pmfs[i].mass(z2) >= floor_mass)
                    .count();
                if best.is_none_or(|b| count > b.0) {
                    best = Some((count, z, z2));
                }
            }
        }
        let (_, z, z2) = best.ok_or_else(|| Error::precondition(format!("no value pair for r = {r}")))?;
        let need = keep.div_ceil((t * t) as usize);
        let members: Vec<usize> = s
            .iter()
            .copied()
            .filter(|&i| inst.pmfs[i].mass(z) >= floor_mass && inst.pmfs[i].mass(z2) >= floor_mass)
            .take(need)
            .collect();
        if members.len() < need {
            return Err(Error::precondition(format!("only {} variables share a pair for r = {r}", members.len())));
        }
        selected.push((r, z, z2, members));
    }
    let ws: Vec<i64> = selected.iter().map(|(_, z, z2, _)| z - z2).collect();
    let bezout = bezout_combination(&ws, phi as i64)?;
    let per = (t * phi) as usize;
    let count = selected.iter().map(|(_, _, _, m)| m.len() / per).min().unwrap_or(0);
    let mut blocks = Vec::with_capacity(count);
    let mut anchors = Vec::with_capacity(count);
    for b in 0..count {
        let mut idx = Vec::new();
        let mut u = 0i64;
        for ((_, z, z2, members), &s) in selected.iter().zip(&bezout) {
            idx.extend_from_slice(&members[b * per..(b + 1) * per]);
            u += if s < 0 { z * per as i64 } else { z2 * per as i64 };
        }
        blocks.push(idx);
        anchors.push(u);
    }
    Ok(BlockConstruction {
        pairs: selected.iter().map(|(r, z, z2, _)| (*r, *z, *z2)).collect(),
        bezout,
        blocks,
        anchors,
    })
}

/// Checks the density theorem on `inst` for every multiple of `φ` up to `Δ_max`.
///
/// Also verifies the block reduction: at least `block_count` blocks, Bézout
/// coefficients within `tφ`, and `Pr[Y_ℓ = u_ℓ], Pr[Y_ℓ = u_ℓ + φ] ≥ α` for
/// every block (exactly).
pub fn check_density_theorem(inst: &DensityInstance, delta_max: u64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(
        "density-theorem",
        json!({ "n": inst.n(), "t": inst.t, "phi_set": inst.phi_set, "delta_max": delta_max }),
    );
    let params = match density_params(inst) {
        Ok(p) => p,
        Err(Error::Precondition(msg)) => {
            rep.skip(msg);
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    if params.block_count == 0 {
        rep.skip(format!("block count ⌊L/(16t⁴φ)⌋ is 0 (L = {})", params.l));
        rep.notes = json!({ "params": params });
        return Ok(rep);
    }
    let phi = params.phi;
    let deltas: Vec<i64> = deltas(phi, delta_max);
    let gaps = check_gaps(inst, &params, &deltas, &mut rep)?;

    let blocks = construct_blocks(inst, &params)?;
    let t_phi = (inst.t * phi) as i64;
    rep.record((blocks.blocks.len() as f64) - params.block_count as f64, blocks.blocks.len() as u64 >= params.block_count, || {
        json!({ "check": "block count", "built": blocks.blocks.len(), "required": params.block_count })
    });
    for (j, &s) in blocks.bezout.iter().enumerate() {
        rep.record((t_phi - s.abs()) as f64, s.abs() <= t_phi, || json!({ "check": "bezout size", "j": j, "s": s }));
    }
    let alpha = &params.alpha_exact;
    for (b, (idx, &u)) in blocks.blocks.iter().zip(&blocks.anchors).enumerate() {
        let parts: Vec<IntPmf<Rational>> = idx.iter().map(|&i| inst.pmfs[i].clone()).collect();
        let y = IntPmf::convolve(&parts)?;
        for v in [u, u + phi as i64] {
            let pm = y.mass(v);
            rep.record(rational_to_f64(&(&pm - alpha)), pm >= *alpha, || {
                json!({ "check": "block anchor", "block": b, "value": v, "mass": render_rational(&pm) })
            });
        }
    }
    rep.notes = json!({ "params": params, "max_gap_over_bound": gaps, "blocks": blocks.blocks.len(), "pairs": blocks.pairs, "bezout": blocks.bezout });
    Ok(rep)
}

/// Checks `Pr[S = x] − Pr[S = x + Δ] ≤ 22|Δ|/(φ·α·block_count)` for the given
/// `Δ`s; each must be a multiple of `φ`.
pub fn check_density_deltas(inst: &DensityInstance, deltas: &[i64]) -> Result<VerificationReport> {
    let params = density_params(inst)?;
    if let Some(&d) = deltas.iter().find(|&&d| d % params.phi as i64 != 0) {
        return Err(Error::precondition(format!("Δ = {d} is not a multiple of φ = {}", params.phi)));
    }
    if params.block_count == 0 {
        return Err(Error::precondition("block count ⌊L/(16t⁴φ)⌋ is 0"));
    }
    let mut rep = VerificationReport::new("density-theorem", json!({ "n": inst.n(), "t": inst.t, "deltas": deltas }));
    let gaps = check_gaps(inst, &params, deltas, &mut rep)?;
    rep.notes = json!({ "params": params, "max_gap_over_bound": gaps });
    Ok(rep)
}

fn check_gaps(inst: &DensityInstance, params: &DensityParams, deltas: &[i64], rep: &mut VerificationReport) -> Result<f64> {
    let phi = params.phi;
    let m = params.block_count;
    let alpha = &params.alpha_exact;
    let mut worst = 0.0f64;
    match inst.sum_distribution()? {
        SumPmf::Exact(s) => {
            for &d in deltas {
                if d == 0 {
                    continue;
                }
                let (gap, y) = max_gap_exact(&s, d);
                let bound = density_bound(d, phi, alpha, m);
                worst = worst.max(rational_to_f64(&(&gap / &bound)));
                rep.record(rational_to_f64(&(&bound - &gap)), gap <= bound, || {
                    json!({ "x": y, "delta": d, "gap": render_rational(&gap) })
                });
            }
        }
        SumPmf::Float(s) => {
            // log2 of the bound avoids underflow of α
            for &d in deltas {
                if d == 0 {
                    continue;
                }
                let (gap, y) = max_gap_float(&s, d);
                let log2_bound = (22.0 * d.unsigned_abs() as f64 / (phi * m) as f64).log2() - params.alpha_log2;
                let bound = log2_bound.exp2();
                worst = worst.max(if bound.is_finite() { gap / bound } else { 0.0 });
                rep.check(gap, bound, FLOAT_TOL, || json!({ "x": y, "delta": d, "gap": gap }));
            }
        }
    }
    Ok(worst)
}

/// Random density-lemma instance: `m` variables with anchors at `u_i`, `u_i + φ`.
pub fn random_lemma_instance(seed: u64, index: u64) -> (Vec<IntPmf<Rational>>, u64, Rational, Vec<i64>) {
    let mut r = rng::stream(seed, index);
    let phi = r.gen_range(1..=3u64);
    let a = r.gen_range(4..=10i64); // α = a/20
    let m = r.gen_range(20..=100usize);
    let den = 60i64;
    let mut ys = Vec::with_capacity(m);
    let mut us = Vec::with_capacity(m);
    for _ in 0..m {
        let u = r.gen_range(0..=3i64);
        let span = (u + phi as i64 + 4) as usize;
        let mut w = vec![0i64; span + 1];
        let base = 3 * a;
        let left = den - 2 * base;
        let e1 = r.gen_range(0..=left);
        let e2 = r.gen_range(0..=left - e1);
        w[u as usize] += base + e1;
        w[(u + phi as i64) as usize] += base + e2;
        let mut rest = left - e1 - e2;
        while rest > 0 {
            let chunk = r.gen_range(1..=rest);
            w[r.gen_range(0..=span)] += chunk;
            rest -= chunk;
        }
        let masses = w.iter().map(|&c| rat(c, den)).collect();
        ys.push(IntPmf::new(0, masses).expect("masses sum to one"));
        us.push(u);
    }
    (ys, phi, rat(a, 20), us)
}

/// Runs [`check_density_lemma`] on `count` random instances with `Δ_max = 20φ`.
pub fn density_lemma_suite(count: u64, seed: u64) -> Result<VerificationReport> {
    let parts = (0..count)
        .into_par_iter()
        .map(|k| {
            let (ys, phi, alpha, us) = random_lemma_instance(seed, k);
            check_density_lemma(&ys, phi, &alpha, &us, 20 * phi)
        })
        .collect::<Result<Vec<_>>>()?;
    let range = json!({ "instances": count, "seed": seed, "alpha": "[1/5, 1/2]", "phi": [1, 2, 3], "m": [20, 100] });
    Ok(fold_reports("density-lemma", range, parts))
}

/// A random instance for the density theorem, sized so that `block_count ≥ 1`.
pub fn random_theorem_instance(seed: u64, index: u64) -> DensityInstance {
    let mut r = rng::stream(seed, index);
    let t = r.gen_range(2..=3u64);
    let phi_set: Vec<u64> = loop {
        let s: Vec<u64> = (2..=t).filter(|_| r.gen_bool(0.6)).collect();
        if !s.is_empty() {
            break s;
        }
    };
    let kinds: Vec<IntPmf<Rational>> = (0..3)
        .map(|_| {
            let w: Vec<i64> = (0..=t).map(|_| r.gen_range(1..=6)).collect();
            let total: i64 = w.iter().sum();
            IntPmf::new(0, w.iter().map(|&c| rat(c, total)).collect()).expect("normalized")
        })
        .collect();
    let probe = DensityInstance::new(t, kinds.clone(), phi_set.clone()).expect("valid");
    let p = density_params(&probe).expect("full support gives L > 0");
    let per_var = rational_to_f64(&p.l_exact) / kinds.len() as f64;
    let need = 16.0 * (t.pow(4) * p.phi) as f64 / per_var;
    let n = (need * 1.05).ceil() as usize + kinds.len();
    let pmfs = (0..n).map(|i| kinds[i % kinds.len()].clone()).collect();
    DensityInstance::new(t, pmfs, phi_set).expect("valid")
}

/// Runs [`check_density_theorem`] on `count` random instances with `Δ_max = 20φ`.
pub fn density_theorem_suite(count: u64, seed: u64) -> Result<VerificationReport> {
    let parts = (0..count)
        .into_par_iter()
        .map(|k| {
            let inst = random_theorem_instance(seed, k);
            let phi = density_params(&inst)?.phi;
            check_density_theorem(&inst, 20 * phi)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fold_reports("density-theorem", json!({ "instances": count, "seed": seed, "t": [2, 3] }), parts))
}

pub(crate) fn fold_reports(suite: &str, range: serde_json::Value, parts: Vec<VerificationReport>) -> VerificationReport {
    let notes: Vec<serde_json::Value> = parts.iter().map(|p| p.notes.clone()).collect();
    let mut rep = parts
        .into_iter()
        .fold(VerificationReport::new(suite, range.clone()), VerificationReport::merge)
        .finish();
    rep.range = range;
    rep.notes = json!({ "per_instance": notes });
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[i64]) -> IntPmf<Rational> {
        IntPmf::uniform(v).unwrap()
    }

    #[test]
    fn params_examples() {
        let inst = DensityInstance::new(2, vec![uni(&[0, 1, 2]); 5], [2]).unwrap();
        let p = density_params(&inst).unwrap();
        assert_eq!(p.phi, 1);
        assert_eq!(p.p[0][0], rat(2, 3));
        let inst = DensityInstance::new(3, vec![uni(&[0, 1, 2]); 5], [2, 3]).unwrap();
        let p = density_params(&inst).unwrap();
        assert_eq!((p.p[0][0].clone(), p.p[1][0].clone()), (rat(2, 3), rat(1, 3)));
        assert_eq!(p.l_exact, rat(5, 3));
        assert_eq!(p.block_count, 0);
        // α = (L/(4n(t+1)))^{t²φ} = (1/48)^9
        assert_eq!(p.alpha_exact, pow_rational(&rat(1, 48), 9));
        let pt = DensityInstance::new(3, vec![IntPmf::point(0), uni(&[0, 1])], [2]).unwrap();
        let p = density_params(&pt).unwrap();
        assert_eq!(p.p[0][0], Rational::one());
        assert_eq!(p.l_exact, rat(1, 2));
        assert_eq!(p.phi, 3);
        assert!(matches!(
            density_params(&DensityInstance::new(2, vec![uni(&[0, 1])], []).unwrap()),
            Err(Error::Precondition(_))
        ));
        assert!(DensityInstance::new(2, vec![uni(&[0, 3])], [2]).is_err());
    }

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout_combination(&[2, 3], 1).unwrap(), vec![-1, 1]);
        assert_eq!(bezout_combination(&[4, 6], 2).unwrap(), vec![-1, 1]);
        assert!(bezout_combination(&[4, 6], 3).is_err());
        assert!(bezout_combination(&[0, 6], 6).is_err());
        let mut r = rng::stream(3, 0);
        for _ in 0..500 {
            let k = r.gen_range(1..=5);
            let ws: Vec<i64> = (0..k).map(|_| r.gen_range(1..=40) * if r.gen_bool(0.5) { 1 } else { -1 }).collect();
            let g = ws.iter().fold(0i64, |a, &w| a.gcd(&w));
            let mult = r.gen_range(-3..=3);
            let s = bezout_combination(&ws, g * mult).unwrap();
            assert_eq!(s.iter().zip(&ws).map(|(a, b)| a * b).sum::<i64>(), g * mult, "{ws:?}");
        }
    }

    #[test]
    fn bezout_size_with_theorem_parameters() {
        // differences of values in {0..t} against target φ with gcd | φ
        for t in 2..=6i64 {
            let diffs: Vec<i64> = (-t..=t).filter(|&d| d != 0).collect();
            for &a in &diffs {
                for &b in &diffs {
                    let g = a.gcd(&b);
                    for phi in [g, 2 * g, 6 * g] {
                        let s = bezout_combination(&[a, b], phi).unwrap();
                        assert!(s.iter().all(|c| c.abs() <= t * phi), "t={t} ws=({a},{b}) φ={phi} s={s:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn lemma_examples() {
        let coin = uni(&[0, 1]);
        let r = check_density_lemma(&[coin.clone(), coin.clone()], 1, &rat(1, 2), &[0, 0], 1).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 2);
        let r = check_density_lemma(&vec![coin; 100], 1, &rat(1, 2), &[0; 100], 20).unwrap();
        assert!(r.passed);
        assert!(r.notes["max_gap_over_bound"].as_f64().unwrap() < 0.2);
        let y = IntPmf::new(0, vec![rat(3, 10), rat(0, 1), rat(3, 10), rat(0, 1), rat(0, 1), rat(2, 5)]).unwrap();
        let r = check_density_lemma(&vec![y; 50], 2, &rat(3, 10), &[0; 50], 20).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 20);
        let bad = check_density_lemma(&[uni(&[0, 1])], 1, &rat(3, 4), &[0], 1);
        assert!(matches!(bad, Err(Error::Precondition(_))));
    }

    #[test]
    fn anchors() {
        let y = IntPmf::new(0, vec![rat(1, 10), rat(1, 2), rat(0, 1), rat(2, 5)]).unwrap();
        assert_eq!(find_anchor(&y, 2, &rat(2, 5)), Some(1));
        assert_eq!(find_anchor(&y, 1, &rat(2, 5)), None);
    }

    #[test]
    fn theorem_inapplicable_and_parity_rejection() {
        let small = DensityInstance::new(2, vec![uni(&[0, 1, 2]); 10], [2]).unwrap();
        let r = check_density_theorem(&small, 20).unwrap();
        assert_eq!(r.checked, 0);
        assert_eq!(r.inapplicable.len(), 1);
        // X_i uniform on {1,3}: only r = 2 is degenerate, so Φ = {3} and φ = 2
        let odd = DensityInstance::new(3, vec![uni(&[1, 3]); 40], [3]).unwrap();
        assert_eq!(density_params(&odd).unwrap().phi, 2);
        assert!(matches!(check_density_deltas(&odd, &[1]), Err(Error::Precondition(_))));
        let with2 = DensityInstance::new(3, vec![uni(&[1, 3]); 40], [2, 3]).unwrap();
        assert!(matches!(density_params(&with2), Err(Error::Precondition(_))));
    }

    #[test]
    fn theorem_on_uniform_three_values() {
        let inst = DensityInstance::new(3, vec![uni(&[0, 1, 2]); 4096], [2, 3]).unwrap();
        let p = density_params(&inst).unwrap();
        assert_eq!(p.phi, 1);
        assert_eq!(p.block_count, 1);
        let r = check_density_theorem(&inst, 20).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert!(r.inapplicable.is_empty());
    }

    #[test]
    fn random_instances() {
        let r = density_lemma_suite(6, 11).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        for k in 0..3 {
            let inst = random_theorem_instance(5, k);
            assert!(density_params(&inst).unwrap().block_count >= 1);
        }
    }
}
