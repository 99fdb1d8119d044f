//! Report-only observables of weight distributions: smoothness under even
//! shifts and closeness of the per-parity tails to a split binomial tail.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::classify::Value;
use crate::dist::WDist;
use crate::error::{Error, Result};
use crate::localfn::{Engine, LocalFn};
use crate::mass::{rational_to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub delta: i64,
    pub max_diff: Value,
    /// First `x` attaining the maximum.
    pub argmax: usize,
    /// `max_diff · n / |Δ|`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub n: usize,
    pub rows: Vec<ContinuityRow>,
    /// Mass within `√n` of `n/2`.
    pub central_mass: f64,
    /// Set when less than half the mass is within `√n` of `n/2`.
    pub far_from_central: bool,
}

/// `max_x |Pr[|f| = x] − Pr[|f| = x + Δ]|` over `x ∈ {0..n}` for each even `Δ`
/// (weights outside `{0..n}` have mass zero). Nothing is asserted.
pub fn continuity_report(f: &LocalFn, deltas: &[i64], engine: Engine) -> Result<ContinuityReport> {
    let w = f.weight_distribution::<Rational>(engine)?;
    continuity_of_weights(&w, deltas)
}

pub fn continuity_of_weights(w: &WDist<Rational>, deltas: &[i64]) -> Result<ContinuityReport> {
    let n = w.n();
    if let Some(&d) = deltas.iter().find(|&&d| d == 0 || d % 2 != 0) {
        return Err(Error::invalid(format!("Δ must be even and nonzero, got {d}")));
    }
    let at = |x: i64| if x < 0 || x > n as i64 { Rational::zero() } else { w.mass(x as usize) };
    let rows = deltas
        .iter()
        .map(|&d| {
            let mut best = (Rational::zero(), 0usize);
            for x in 0..=n {
                let diff = (at(x as i64) - at(x as i64 + d)).abs();
                if diff > best.0 {
                    best = (diff, x);
                }
            }
            ContinuityRow {
                delta: d,
                normalized: rational_to_f64(&best.0) * n as f64 / d.unsigned_abs() as f64,
                max_diff: Value::from(&best.0),
                argmax: best.1,
            }
        })
        .collect();
    let half = n as f64 / 2.0;
    let radius = (n as f64).sqrt();
    let central_mass: f64 = (0..=n)
        .filter(|&x| (x as f64 - half).abs() <= radius)
        .map(|x| rational_to_f64(&w.mass(x)))
        .sum();
    Ok(ContinuityReport { n, rows, central_mass, far_from_central: central_mass < 0.5 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KolmogorovParityReport {
    pub n: usize,
    pub eta: Value,
    /// `max_t |Pr[|p| > t, even] − η·Pr[|U| > t]|`.
    pub max_even_dev: Value,
    /// `max_t |Pr[|p| > t, odd] − (1−η)·Pr[|U| > t]|`.
    pub max_odd_dev: Value,
    pub objective: Value,
    #[serde(skip)]
    pub eta_exact: Rational,
}

/// A line `a + b·η`.
#[derive(Debug, Clone, PartialEq)]
struct Line {
    a: Rational,
    b: Rational,
}

impl Line {
    fn at(&self, eta: &Rational) -> Rational {
        &self.a + &self.b * eta
    }
}

/// Upper envelope of lines over the real line, slopes increasing.
fn upper_envelope(mut lines: Vec<Line>) -> Vec<Line> {
    lines.sort_by(|x, y| x.b.cmp(&y.b).then(x.a.cmp(&y.a)));
    let mut hull: Vec<Line> = Vec::new();
    for l in lines {
        if hull.last().is_some_and(|h| h.b == l.b) {
            hull.pop(); // same slope, larger intercept comes later
        }
        while hull.len() >= 2 {
            let (l1, l2) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            // l2 is hidden when l1 and l meet at or above l2
            if (&l.a - &l1.a) * (&l2.b - &l1.b) >= (&l2.a - &l1.a) * (&l.b - &l1.b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    hull
}

fn deviation_lines(w: &WDist<Rational>) -> (Vec<Line>, Vec<Line>, Vec<Rational>, Vec<Rational>, Vec<Rational>) {
    let n = w.n();
    let u = WDist::<Rational>::binomial_half(n);
    // tails over t = −1..n−1 (t = n gives all zeros)
    let mut even = vec![Rational::zero(); n + 1];
    let mut odd = vec![Rational::zero(); n + 1];
    let mut uni = vec![Rational::zero(); n + 1];
    let (mut e, mut o, mut t) = (Rational::zero(), Rational::zero(), Rational::zero());
    for x in (0..=n).rev() {
        if x % 2 == 0 {
            e += w.mass(x);
        } else {
            o += w.mass(x);
        }
        t += u.mass(x);
        even[x] = e.clone();
        odd[x] = o.clone();
        uni[x] = t.clone();
    }
    let mut ev_lines = Vec::new();
    let mut od_lines = Vec::new();
    for x in 0..=n {
        // E − ηT and O − (1−η)T, both signs
        ev_lines.push(Line { a: even[x].clone(), b: -uni[x].clone() });
        ev_lines.push(Line { a: -even[x].clone(), b: uni[x].clone() });
        od_lines.push(Line { a: &odd[x] - &uni[x], b: uni[x].clone() });
        od_lines.push(Line { a: &uni[x] - &odd[x], b: -uni[x].clone() });
    }
    (ev_lines, od_lines, even, odd, uni)
}

fn max_at(lines: &[Line], eta: &Rational) -> Rational {
    lines.iter().map(|l| l.at(eta)).fold(Rational::zero(), |a, v| if v > a { v } else { a })
}

/// Finds `η ∈ [0,1]` minimizing the larger of the two parity deviations, exactly.
///
/// The objective is the upper envelope of finitely many lines, so its minimum
/// over `[0,1]` sits at an envelope vertex or an endpoint; ties go to the
/// smallest `η`.
pub fn kolmogorov_parity_report(w: &WDist<Rational>) -> KolmogorovParityReport {
    let (ev, od, ..) = deviation_lines(w);
    let all: Vec<Line> = ev.iter().chain(&od).cloned().collect();
    let hull = upper_envelope(all.clone());
    let (zero, one) = (Rational::zero(), Rational::one());
    let mut cands = vec![zero.clone(), one.clone()];
    for pair in hull.windows(2) {
        let x = (&pair[0].a - &pair[1].a) / (&pair[1].b - &pair[0].b);
        if x > zero && x < one {
            cands.push(x);
        }
    }
    cands.sort();
    let mut best: Option<(Rational, Rational)> = None;
    for c in cands {
        let v = max_at(&hull, &c);
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            best = Some((c, v));
        }
    }
    let (eta, obj) = best.expect("two endpoints");
    let me = max_at(&ev, &eta);
    let mo = max_at(&od, &eta);
    KolmogorovParityReport {
        n: w.n(),
        eta: Value::from(&eta),
        max_even_dev: Value::from(&me),
        max_odd_dev: Value::from(&mo),
        objective: Value::from(&obj),
        eta_exact: eta,
    }
}

/// The objective at an arbitrary `η`, for checking optimality.
pub fn kolmogorov_parity_objective(w: &WDist<Rational>, eta: &Rational) -> Rational {
    let (ev, od, ..) = deviation_lines(w);
    let a = max_at(&ev, eta);
    let b = max_at(&od, eta);
    if a > b {
        a
    } else {
        b
    }
}

/// `1/10^6` as a rational.
pub fn micro() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(1_000_000))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::SpecialKind;
    use crate::localfn::canonical;
    use crate::mass::rat;
    use proptest::prelude::*;

    #[test]
    fn continuity_examples() {
        let all = continuity_report(&canonical(SpecialKind::All, 16).unwrap(), &[2], Engine::Auto).unwrap();
        assert!(!all.far_from_central);
        // max_x |C(16,x) − C(16,x+2)|/2^16 ≤ 14/16
        assert!(all.rows[0].normalized <= 7.0 * 2.0);
        let evens = continuity_report(&canonical(SpecialKind::Evens, 16).unwrap(), &[2, -4], Engine::Auto).unwrap();
        assert_eq!(evens.rows.len(), 2);
        let zeros = continuity_report(&canonical(SpecialKind::Zeros, 16).unwrap(), &[2], Engine::Auto).unwrap();
        assert_eq!(zeros.rows[0].max_diff.exact, "1/1");
        assert_eq!(zeros.rows[0].argmax, 0);
        assert!(zeros.far_from_central);
        assert!(continuity_of_weights(&WDist::binomial_half(4), &[3]).is_err());
    }

    #[test]
    fn kolmogorov_examples() {
        let ev = SpecialKind::Evens.weight_dist::<Rational>(12);
        let r = kolmogorov_parity_report(&ev);
        assert_eq!(r.eta_exact, rat(1, 1));
        let pt = WDist::<Rational>::point(10, 0).unwrap();
        let r = kolmogorov_parity_report(&pt);
        assert!(r.objective.float > 0.45);
        let all = WDist::<Rational>::binomial_half(11);
        let r = kolmogorov_parity_report(&all);
        assert!((r.eta.float - 0.5).abs() < 0.1);
    }

    fn brute_min(w: &WDist<Rational>) -> Rational {
        (0..=200)
            .map(|k| kolmogorov_parity_objective(w, &rat(k, 200)))
            .fold(Rational::one(), |a, v| if v < a { v } else { a })
    }

    proptest! {
        #[test]
        fn eta_is_a_local_and_grid_minimum(raw in proptest::collection::vec(0u32..20, 2..14)) {
            prop_assume!(raw.iter().any(|&c| c > 0));
            let tot: u32 = raw.iter().sum();
            let w = WDist::new(raw.iter().map(|&c| rat(c as i64, tot as i64)).collect()).unwrap();
            let r = kolmogorov_parity_report(&w);
            let obj = kolmogorov_parity_objective(&w, &r.eta_exact);
            for step in [micro(), -micro()] {
                let e = &r.eta_exact + step;
                if e >= Rational::zero() && e <= Rational::one() {
                    prop_assert!(kolmogorov_parity_objective(&w, &e) >= obj);
                }
            }
            prop_assert!(obj <= brute_min(&w));
        }
    }
}
