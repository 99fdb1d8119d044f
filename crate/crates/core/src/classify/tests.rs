use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::localfn::{canonical, evens_with_flips, mixture_evens_odds};
use crate::mass::{rat, Rational};
use crate::rng;

fn psi(n: usize, m: &[usize]) -> PsiSet {
    PsiSet::new(n, m.iter().copied()).unwrap()
}

/// tv by a double loop over every string of `{0,1}^n`.
fn oracle_tv(p: &Dist<Rational>, psi: &PsiSet) -> Rational {
    let z = Rational::from_integer(psi.support_size().into());
    let mut s = Rational::zero();
    for x in 0u64..1 << p.n() {
        let q = if psi.contains(x.count_ones() as usize) { z.recip() } else { Rational::zero() };
        let d = p.mass(x) - q;
        s += if d < Rational::zero() { -d } else { d };
    }
    s / rat(2, 1)
}

fn oracle_best(p: &Dist<Rational>) -> (PsiSet, Rational) {
    let n = p.n();
    let mut all: Vec<PsiSet> = (1u128..1 << (n + 1)).map(|m| PsiSet::from_mask(n, m).unwrap()).collect();
    all.sort_by(|a, b| a.members().cmp(b.members()));
    let mut best: Option<(PsiSet, Rational)> = None;
    for s in all {
        let tv = oracle_tv(p, &s);
        if best.as_ref().map_or(true, |(_, b)| tv < *b) {
            best = Some((s, tv));
        }
    }
    best.unwrap()
}

#[test]
fn iota_examples() {
    assert_eq!(iota(&psi(10, &[1, 7, 9])), 7);
    assert_eq!(iota(&psi(10, &[4, 6])), 4);
    assert_eq!(iota(&psi(8, &[0, 8])), 0);
}

#[test]
fn regime_examples() {
    assert_eq!(regime(&psi(1000, &[10])).regime, Regime::Tail);
    assert_eq!(regime(&psi(1000, &[480])).regime, Regime::Central);
    assert_eq!(regime(&psi(1000, &[990])).regime, Regime::Tail);
    let b = regime(&psi(8, &[0]));
    assert_eq!(b.regime, Regime::Central);
    assert!((b.threshold - 4.0).abs() < 1e-12);
    assert_eq!(regime(&psi(1, &[0])).regime, Regime::Central);
}

#[test]
fn regime_agrees_with_float_away_from_boundary() {
    for n in 1..400usize {
        let t = (n as f64).powf(2.0 / 3.0);
        for i in 0..=n {
            let (lo, hi) = (n as f64 / 2.0 - t, n as f64 / 2.0 + t);
            let x = i as f64;
            if (x - lo).abs() < 1e-6 || (x - hi).abs() < 1e-6 {
                continue;
            }
            let float_tail = x < lo || x > hi;
            assert_eq!(regime(&psi(n, &[i])).regime == Regime::Tail, float_tail, "n={n} ι={i}");
        }
    }
}

#[test]
fn nearest_special_examples() {
    let e8 = canonical(SpecialKind::Evens, 8).unwrap().output_distribution::<Rational>(Engine::Auto).unwrap();
    assert_eq!(nearest_special(&e8).unwrap(), (SpecialKind::Evens, Rational::zero()));

    let fl = evens_with_flips(10, 3).unwrap().output_distribution::<Rational>(Engine::Auto).unwrap();
    assert_eq!(nearest_special(&fl).unwrap(), (SpecialKind::All, rat(1, 16)));

    for n in [6usize, 11, 180] {
        let w = mixture_evens_odds(n).unwrap().weight_distribution::<Rational>(Engine::Auto).unwrap();
        assert_eq!(nearest_special_weights(&w).unwrap(), (SpecialKind::Evens, rat(1, 4)), "n={n}");
    }
    let m8 = mixture_evens_odds(8).unwrap().output_distribution::<Rational>(Engine::Auto).unwrap();
    assert_eq!(nearest_special(&m8).unwrap(), (SpecialKind::Evens, rat(1, 4)));
}

#[test]
fn best_psi_examples() {
    let e = canonical(SpecialKind::Evens, 9).unwrap().output_distribution::<Rational>(Engine::Auto).unwrap();
    let (s, tv) = PsiEvaluator::from_dist(&e).best().unwrap();
    assert_eq!(s, SpecialKind::Evens.psi(9));
    assert!(tv.is_zero());
    let top = Dist::<Rational>::point(7, 0x7f).unwrap();
    let (s, tv) = PsiEvaluator::from_dist(&top).best().unwrap();
    assert_eq!(s.members(), &[7]);
    assert!(tv.is_zero());
    let big = PsiEvaluator::from_weights(&WDist::binomial_half(21));
    assert!(matches!(big.best(), Err(Error::ResourceLimit(_))));
}

#[test]
fn truncation_examples() {
    let t = truncate_tail_support(&psi(300, &(0..=40).collect::<Vec<_>>()), TRUNCATION_CONSTANT).unwrap();
    assert_eq!(t.ell, 41);
    assert_eq!(t.kept, t.psi);
    assert!(t.tv_exact.is_zero());

    let wide = psi(300, &(0..=105).collect::<Vec<_>>());
    assert_eq!(regime(&wide).regime, Regime::Tail);
    let t = truncate_tail_support(&wide, TRUNCATION_CONSTANT).unwrap();
    assert_eq!(t.kept.members(), &(65..=105).collect::<Vec<_>>()[..]);
    assert!(t.tv_exact <= rat(1, 2));
    assert!(t.tv.float < 1e-9);

    let z = truncate_tail_support(&psi(50, &[0]), TRUNCATION_CONSTANT).unwrap();
    assert_eq!(z.kept.members(), &[0]);
    assert!(matches!(truncate_tail_support(&psi(1000, &[480]), 6.0), Err(Error::Precondition(_))));
}

#[test]
fn classify_examples() {
    let opts = ClassifyOptions::default();
    let r = classify(&canonical(SpecialKind::Evens, 10).unwrap(), &opts).unwrap();
    assert_eq!(r.nearest, SpecialKind::Evens);
    assert!(r.eps_d_exact.is_zero() && r.eps_star_exact.is_zero());
    assert_eq!(r.ratio, "1/1");
    assert_eq!(r.psi_search, PsiSearch::Exhaustive);

    let r = classify(&evens_with_flips(10, 4).unwrap(), &opts).unwrap();
    assert_eq!(r.nearest, SpecialKind::All);
    assert_eq!(r.eps_d_exact, rat(1, 32));
    assert!(r.eps_star_exact <= r.eps_d_exact);
}

#[test]
fn mixture_ratio_example() {
    let n = 180;
    let mod6 = PsiSet::new(n, (0..=n).filter(|w| [0, 1, 2, 4].contains(&(w % 6)))).unwrap();
    let opts = ClassifyOptions { assume_symmetric: true, extra_psi: vec![mod6.clone()], ..Default::default() };
    let r = classify(&mixture_evens_odds(n).unwrap(), &opts).unwrap();
    assert_eq!(r.level, Level::Weight);
    assert_eq!(r.eps_d_exact, rat(1, 4));
    let evens = &r.specials[3];
    let all = &r.specials[5];
    assert_eq!((evens.kind, &evens.exact), (SpecialKind::Evens, &rat(1, 4)));
    assert_eq!((all.kind, &all.exact), (SpecialKind::All, &rat(1, 4)));
    assert_eq!(r.best_psi, mod6);
    assert!((r.eps_star.float - 1.0 / 6.0).abs() < 0.01);
    assert!(r.ratio_float.unwrap() > 1.45);
}

#[test]
fn report_json_has_exact_and_float() {
    let r = classify(&evens_with_flips(6, 1).unwrap(), &ClassifyOptions::default()).unwrap();
    let j = r.to_json();
    assert_eq!(j["specials"].as_array().unwrap().len(), 6);
    assert!(j["specials"][0]["tv"]["exact"].as_str().unwrap().contains('/'));
    assert!(j["eps_d"]["float"].is_number());
    assert_eq!(j["nearest"], r.nearest.name());
}

#[test]
fn infinite_ratio() {
    // D_{1} at n = 3 is not among the specials
    let p = Dist::<Rational>::new(3, [(1u64, rat(1, 3)), (2, rat(1, 3)), (4, rat(1, 3))]).unwrap();
    let r = classify_dist(&p, &[]).unwrap();
    assert_eq!(r.best_psi.members(), &[1]);
    assert!(r.eps_star_exact.is_zero());
    assert_eq!(r.ratio, "inf");
    assert_eq!(r.ratio_exact(), None);
}

#[test]
fn probes() {
    let t = tail_probe(&canonical(SpecialKind::Evens, 12).unwrap(), &psi(12, &[2]), Engine::Auto).unwrap();
    assert!(t.above_third);
    assert_eq!(t.regime.regime, Regime::Central);
    let mut r = rng::stream(5, 0);
    let f = LocalFn::random(&mut r, 12, 16, 2);
    let s = slice_probe(&f, 6, Engine::Auto).unwrap();
    assert!(s.tv.float > 0.0 && s.tv.float <= 1.0);
}

#[test]
fn ratio_search_is_thread_independent() {
    let a = ratio_search(8, 2, 24, 9).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| ratio_search(8, 2, 24, 9).unwrap());
    assert_eq!(a, b);
    assert!(a.rows.iter().all(|r| r.eps_star <= r.eps_d + 1e-15));
    let csv = a.to_csv().unwrap();
    assert!(csv.starts_with("trial,m,nearest,eps_d,best_psi,eps_star,ratio\n"));
    assert_eq!(csv.lines().count(), 25);
}

fn arb_dist(n: usize) -> impl Strategy<Value = Dist<Rational>> {
    proptest::collection::vec(0u32..4, 1 << n).prop_filter_map("nonzero", move |w| {
        let total: u32 = w.iter().sum();
        (total > 0).then(|| {
            Dist::new(n, w.iter().enumerate().map(|(x, &c)| (x as u64, rat(c as i64, total as i64)))).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fast_matches_double_loop(p in (1usize..=8).prop_flat_map(arb_dist), mask in 1u128..512) {
        let n = p.n();
        let m = mask & ((1 << (n + 1)) - 1);
        prop_assume!(m != 0);
        let s = PsiSet::from_mask(n, m).unwrap();
        let want = oracle_tv(&p, &s);
        prop_assert_eq!(&PsiEvaluator::from_dist(&p).tv(&s).unwrap(), &want);
        prop_assert_eq!(&tv_to_psi(&p, &s).unwrap(), &want);
    }

    #[test]
    fn best_matches_brute_force(p in (1usize..=5).prop_flat_map(arb_dist)) {
        prop_assert_eq!(PsiEvaluator::from_dist(&p).best().unwrap(), oracle_best(&p));
    }

    #[test]
    fn weight_level_matches_string_level(p in (1usize..=7).prop_flat_map(arb_dist), mask in 1u128..256) {
        let n = p.n();
        let m = mask & ((1 << (n + 1)) - 1);
        prop_assume!(m != 0);
        let s = PsiSet::from_mask(n, m).unwrap();
        let sym = p.symmetrize().unwrap();
        prop_assert_eq!(
            PsiEvaluator::from_weights(&p.weight_marginal()).tv(&s).unwrap(),
            PsiEvaluator::from_dist(&sym).tv(&s).unwrap()
        );
    }

    #[test]
    fn eps_star_below_eps_d(seed: u64, n in 1usize..=8, d in 0usize..=3) {
        let mut r = rng::stream(seed, 0);
        let f = LocalFn::random(&mut r, n, 2 * n, d);
        let rep = classify(&f, &ClassifyOptions::default()).unwrap();
        prop_assert!(rep.eps_star_exact <= rep.eps_d_exact);
        let min = rep.specials.iter().map(|s| s.exact.clone()).min().unwrap();
        prop_assert_eq!(&rep.eps_d_exact, &min);
        prop_assert!(rep.ratio_exact().map_or(true, |x| x >= Rational::one()));
    }

    #[test]
    fn truncation_is_nonempty_subset(seed: u64, n in 20usize..400, frac in 0.05f64..0.4) {
        let mut r = rng::stream(seed, 1);
        let hi = ((n as f64) * frac) as usize;
        let members: Vec<usize> = (0..=hi).filter(|_| rand::Rng::gen_bool(&mut r, 0.5)).collect();
        prop_assume!(!members.is_empty());
        let s = PsiSet::new(n, members).unwrap();
        prop_assume!(regime(&s).regime == Regime::Tail);
        let t = truncate_tail_support(&s, TRUNCATION_CONSTANT).unwrap();
        prop_assert!(!t.kept.is_empty());
        prop_assert!(t.kept.members().iter().all(|&w| s.contains(w)));
        if n >= 100 {
            prop_assert!(t.tv_exact <= rat(1, 2));
        }
    }
}
