//! Local samplers: the canonical six, the flips family and the parity mixture,
//! with exact output distributions and a seeded sample.

use locsym::localfn::{canonical, evens_with_flips, mixture_evens_odds, sample, Engine};
use locsym::{Rational, SpecialKind};

fn main() -> locsym::Result<()> {
    for kind in SpecialKind::ALL {
        let f = canonical(kind, 8)?;
        let tv = f.output_distribution::<Rational>(Engine::Auto)?.tv_distance(&kind.dist(8)?)?;
        println!("{:>8}: m = {:>2}, locality {}, tv to target {tv}", kind.name(), f.m(), f.locality());
    }

    let all = SpecialKind::All.dist::<Rational>(10)?;
    for c in 1..=6 {
        let p = evens_with_flips(10, c)?.output_distribution::<Rational>(Engine::Auto)?;
        println!("flips(10, {c}): tv to all = {}", p.tv_distance(&all)?);
    }

    // the mixture reads m = n + 1 inputs; the frontier engine handles n = 60 easily
    let w = mixture_evens_odds(60)?.weight_distribution::<Rational>(Engine::Frontier)?;
    let even_mass: Rational = w.masses().iter().step_by(2).sum();
    println!("mixture(60): Pr[even weight] = {even_mass}");

    for y in sample(&canonical(SpecialKind::Evens, 12)?, 7, 3) {
        println!("evens sample: {}", y.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
    }
    Ok(())
}
