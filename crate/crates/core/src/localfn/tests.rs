use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;

use super::*;
use crate::dist::{parse_bits, Dist, SpecialKind, WDist};
use crate::mass::{inv_pow2, rat, Rational};

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn exact(f: &LocalFn, e: Engine) -> Dist<Rational> {
    f.output_distribution(e).unwrap()
}

/// Independent oracle: loop over all inputs with `evaluate`.
fn brute(f: &LocalFn) -> Dist<Rational> {
    let m = f.m();
    let pairs = (0..1u64 << m).map(|x| {
        let xs: Vec<bool> = (0..m).map(|j| x >> j & 1 == 1).collect();
        let y = f.evaluate(&xs).unwrap();
        let w = y.iter().enumerate().fold(0u64, |a, (i, &b)| a | (b as u64) << i);
        (w, inv_pow2(m as u64))
    });
    Dist::new(f.n(), pairs).unwrap()
}

#[test]
fn evaluate_examples() {
    let id = canonical(SpecialKind::All, 3).unwrap();
    assert_eq!(id.evaluate(&bits("101")).unwrap(), bits("101"));
    let ev = canonical(SpecialKind::Evens, 3).unwrap();
    assert_eq!(ev.evaluate(&bits("110")).unwrap(), bits("011"));
    let z = canonical(SpecialKind::Zeros, 4).unwrap();
    assert_eq!(z.evaluate(&[]).unwrap(), vec![false; 4]);
    assert!(id.evaluate(&bits("10")).is_err());
}

#[test]
fn output_distribution_examples() {
    let ev = canonical(SpecialKind::Evens, 3).unwrap();
    for e in [Engine::Naive, Engine::Frontier] {
        let d = exact(&ev, e);
        assert_eq!(d.support_size(), 4);
        for s in ["000", "011", "101", "110"] {
            assert_eq!(d.mass(parse_bits(s).unwrap()), rat(1, 4));
        }
    }
    let zo = canonical(SpecialKind::Zerones, 4).unwrap();
    let d = exact(&zo, Engine::Frontier);
    assert_eq!(d.mass(0), rat(1, 2));
    assert_eq!(d.mass(0b1111), rat(1, 2));
    let all = canonical(SpecialKind::All, 5).unwrap();
    for e in [Engine::Naive, Engine::Frontier] {
        let w: WDist<Rational> = all.weight_distribution(e).unwrap();
        assert_eq!(w, WDist::binomial_half(5));
    }
}

#[test]
fn canonical_samplers_hit_specials() {
    for n in 1..=9 {
        for kind in SpecialKind::ALL {
            let f = canonical(kind, n).unwrap();
            let want: Dist<Rational> = kind.dist(n).unwrap();
            for e in [Engine::Naive, Engine::Frontier] {
                assert!(exact(&f, e).tv_distance(&want).unwrap().is_zero(), "{kind} n={n} {e}");
            }
        }
    }
    assert_eq!(canonical(SpecialKind::Ones, 3).unwrap().locality(), 0);
    assert_eq!(canonical(SpecialKind::Zerones, 3).unwrap().locality(), 1);
    assert_eq!(canonical(SpecialKind::Odds, 3).unwrap().locality(), 2);
    let odd1 = canonical(SpecialKind::Odds, 1).unwrap();
    assert_eq!(exact(&odd1, Engine::Naive), Dist::point(1, 1).unwrap());
}

#[test]
fn flips_closed_forms() {
    for (n, c) in [(6, 1), (10, 3), (10, 4), (7, 7)] {
        let f = evens_with_flips(n, c).unwrap();
        assert_eq!(f.locality(), 4);
        let d = exact(&f, Engine::Frontier);
        let all: Dist<Rational> = SpecialKind::All.dist(n).unwrap();
        let evens: Dist<Rational> = SpecialKind::Evens.dist(n).unwrap();
        assert_eq!(d.tv_distance(&all).unwrap(), inv_pow2(c as u64 + 1));
        assert_eq!(d.tv_distance(&evens).unwrap(), (Rational::one() - inv_pow2(c as u64)) / rat(2, 1));
    }
    assert!(evens_with_flips(6, 0).is_err());
    assert!(evens_with_flips(6, 7).is_err());
}

#[test]
fn mixture_sampler() {
    let n = 6;
    let f = mixture_evens_odds(n).unwrap();
    assert_eq!(f.locality(), 3);
    let d = exact(&f, Engine::Naive);
    let ev: Dist<Rational> = SpecialKind::Evens.dist(n).unwrap();
    let od: Dist<Rational> = SpecialKind::Odds.dist(n).unwrap();
    let mix = Dist::mixture(&[rat(3, 4), rat(1, 4)], &[ev.clone(), od]).unwrap();
    assert!(d.tv_distance(&mix).unwrap().is_zero());
    assert_eq!(d.tv_distance(&ev).unwrap(), rat(1, 4));
    assert_eq!(d.tv_distance(&SpecialKind::All.dist(n).unwrap()).unwrap(), rat(1, 4));
    let p = anf_parity(&f);
    assert_eq!(p.render(), format!("x0*x{n} + x{n}"));
    assert_eq!(p.degree(), 2);
}

#[test]
fn anf_examples_and_oracle() {
    assert!(anf_parity(&canonical(SpecialKind::Evens, 7).unwrap()).is_zero());
    let id = anf_parity(&canonical(SpecialKind::All, 4).unwrap());
    assert_eq!(id.render(), "x0 + x1 + x2 + x3");
    let odd = anf_parity(&canonical(SpecialKind::Odds, 4).unwrap());
    assert_eq!(odd.render(), "1");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let f = LocalFn::random(&mut rng, 7, 10, 4);
        let p = anf_parity(&f);
        assert_eq!(p, anf_parity_mobius(&f).unwrap());
        assert!(p.degree() <= f.locality());
    }
}

#[test]
fn bias_examples() {
    let ev = canonical(SpecialKind::Evens, 6).unwrap();
    assert_eq!(monomial_bias(&ev, &[0, 1, 2, 3, 4, 5]).unwrap(), Rational::one());
    assert!(monomial_bias(&ev, &[0, 2, 3, 5]).unwrap().is_zero());
    let r = kwise_check(&ev, 5).unwrap();
    assert!(r.passed);
    assert_eq!(r.subsets_checked, 62);
    assert!(!kwise_check(&ev, 6).unwrap().passed);
    let z = canonical(SpecialKind::Zeros, 2).unwrap();
    assert_eq!(monomial_bias(&z, &[1]).unwrap(), Rational::one());
    let o = canonical(SpecialKind::Ones, 2).unwrap();
    assert_eq!(monomial_bias(&o, &[1]).unwrap(), -Rational::one());
    assert!(monomial_bias(&z, &[]).is_err());
}

#[test]
fn restrict_examples() {
    let id = canonical(SpecialKind::All, 3).unwrap();
    let r = id.restrict(&Subcube::new([(0, true)]).unwrap()).unwrap();
    assert_eq!(r.m(), 2);
    assert_eq!(r.gate(0).arity(), 0);
    assert_eq!(r.gate(0).table(), &[true]);
    let ev = canonical(SpecialKind::Evens, 4).unwrap();
    let x = 0b1011u64;
    let full = ev.restrict(&Subcube::from_bits(&[0, 1, 2, 3], x).unwrap()).unwrap();
    assert_eq!(exact(&full, Engine::Naive), Dist::point(4, ev.eval_word(x)).unwrap());
    assert!(ev.restrict(&Subcube::new([(9, true)]).unwrap()).is_err());
}

#[test]
fn sampling() {
    let z = canonical(SpecialKind::Zeros, 5).unwrap();
    assert!(sample(&z, 1, 100).iter().all(|s| s.iter().all(|&b| !b)));
    let o = canonical(SpecialKind::Ones, 5).unwrap();
    assert!(sample(&o, 9, 100).iter().all(|s| s.iter().all(|&b| b)));
    let ev = canonical(SpecialKind::Evens, 8).unwrap();
    assert_eq!(sample(&ev, 5, 10_000), sample(&ev, 5, 10_000));
    let emp = empirical_distribution(&ev, 5, 100_000).unwrap();
    let truth = exact(&ev, Engine::Naive).to_float();
    assert!(emp.tv_distance(&truth).unwrap() < 0.02);
}

#[test]
fn json_round_trip_and_rejections() {
    let f = evens_with_flips(5, 2).unwrap();
    assert_eq!(LocalFn::from_json_str(&f.to_json_string()).unwrap(), f);
    let ok = r#"{"m":5,"n":1,"d":2,"outputs":[{"inputs":[0,1],"table":"0110"}]}"#;
    assert!(LocalFn::from_json_str(ok).is_ok());
    for bad in [
        r#"{"m":5,"n":1,"d":1,"outputs":[{"inputs":[0,1],"table":"0110"}]}"#,
        r#"{"m":5,"n":1,"d":2,"outputs":[{"inputs":[0,1],"table":"011"}]}"#,
        r#"{"m":5,"n":1,"d":2,"outputs":[{"inputs":[0,7],"table":"0110"}]}"#,
        r#"{"m":5,"n":1,"d":2,"outputs":[{"inputs":[1,1],"table":"0110"}]}"#,
        r#"{"m":5,"n":2,"d":2,"outputs":[{"inputs":[0,1],"table":"0110"}]}"#,
        r#"{"m":5,"n":1,"d":2,"outputs":[{"inputs":[0,1],"table":"01x0"}]}"#,
    ] {
        assert!(LocalFn::from_json_str(bad).is_err(), "{bad}");
    }
}

#[test]
fn dp_beyond_naive_range() {
    // 401 inputs: only the DP can do this.
    let f = evens_with_flips(200, 100).unwrap();
    let w: WDist<Rational> = f.weight_distribution(Engine::Frontier).unwrap();
    assert_eq!(w.n(), 200);
    // Pr[|y| = k] = C(n,k) 2^{-n} (1 ± 2^{-c}), + for even k.
    for k in [0u64, 1, 2, 99, 100] {
        let base = Rational::from_integer(crate::mass::binomial(200, k).into()) * inv_pow2(200);
        let flip = inv_pow2(100);
        let want = if k % 2 == 0 { Rational::one() + flip } else { Rational::one() - flip } * base;
        assert_eq!(w.mass(k as usize), want, "k = {k}");
    }
    assert!(f.weight_distribution::<Rational>(Engine::Naive).is_err());
}

fn arb_fn() -> impl Strategy<Value = LocalFn> {
    (any::<u64>(), 1usize..=8, 1usize..=12, 0usize..=4).prop_map(|(seed, n, m, d)| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        LocalFn::random(&mut rng, n, m, d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engines_agree(f in arb_fn()) {
        let a = exact(&f, Engine::Naive);
        prop_assert_eq!(&a, &exact(&f, Engine::Frontier));
        prop_assert_eq!(&a, &brute(&f));
        let wa: WDist<Rational> = f.weight_distribution(Engine::Naive).unwrap();
        prop_assert_eq!(&wa, &f.weight_distribution(Engine::Frontier).unwrap());
        prop_assert_eq!(wa, a.weight_marginal());
    }

    #[test]
    fn restriction_mixture(f in arb_fn(), i in 0usize..12, j in 0usize..12) {
        let (i, j) = (i % f.m(), j % f.m());
        prop_assume!(i != j);
        let whole = exact(&f, Engine::Naive);
        let parts: Vec<Dist<Rational>> = (0..4u64)
            .map(|b| exact(&f.restrict(&Subcube::from_bits(&[i, j], b).unwrap()).unwrap(), Engine::Naive))
            .collect();
        let mix = Dist::mixture(&[rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)], &parts).unwrap();
        prop_assert_eq!(whole, mix);
    }

    #[test]
    fn restriction_composes(f in arb_fn(), i in 0usize..12, j in 0usize..12, bi: bool, bj: bool) {
        let (i, j) = (i % f.m(), j % f.m());
        prop_assume!(i != j);
        let both = f.restrict(&Subcube::new([(i, bi), (j, bj)]).unwrap()).unwrap();
        // After fixing i, index j shifts down by one if it was above i.
        let j1 = if j > i { j - 1 } else { j };
        let i1 = if i > j { i - 1 } else { i };
        let a = f.restrict(&Subcube::new([(i, bi)]).unwrap()).unwrap().restrict(&Subcube::new([(j1, bj)]).unwrap()).unwrap();
        let b = f.restrict(&Subcube::new([(j, bj)]).unwrap()).unwrap().restrict(&Subcube::new([(i1, bi)]).unwrap()).unwrap();
        prop_assert_eq!(&both, &a);
        prop_assert_eq!(&both, &b);
    }

    #[test]
    fn anf_matches_parity(f in arb_fn(), x: u64) {
        let p = anf_parity(&f);
        let x = x & ((1u64 << f.m()) - 1);
        let xs: Vec<bool> = (0..f.m()).map(|j| x >> j & 1 == 1).collect();
        prop_assert_eq!(p.evaluate(&xs), f.eval_word_parity(x));
        prop_assert!(p.degree() <= f.locality());
    }

    #[test]
    fn bias_matches_distribution(f in arb_fn(), mask in 1u64..256) {
        let s: Vec<usize> = (0..f.n()).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!s.is_empty());
        let d = exact(&f, Engine::Naive);
        let want = d.entries().iter().fold(Rational::zero(), |acc, (x, p)| {
            let par = s.iter().filter(|&&i| x >> i & 1 == 1).count() % 2;
            if par == 0 { acc + p } else { acc - p }
        });
        prop_assert_eq!(monomial_bias(&f, &s).unwrap(), want);
    }
}
