//! Exact distributions over {0,1}^n: specials, mixtures, symmetrization and
//! the two distances.

use locsym::mass::rat;
use locsym::{Dist, PsiSet, Rational, SpecialKind};

fn main() -> locsym::Result<()> {
    let n = 6;
    let evens = SpecialKind::Evens.dist::<Rational>(n)?;
    let odds = SpecialKind::Odds.dist::<Rational>(n)?;
    let all = SpecialKind::All.dist::<Rational>(n)?;
    println!("tv(evens, odds) = {}", evens.tv_distance(&odds)?);
    println!("tv(evens, all)  = {}", evens.tv_distance(&all)?);

    // ¾·evens + ¼·odds sits halfway-ish between evens and all
    let mix = Dist::mixture(&[rat(3, 4), rat(1, 4)], &[evens.clone(), odds])?;
    println!("tv(mix, evens)  = {}", mix.tv_distance(&evens)?);
    println!("tv(mix, all)    = {}", mix.tv_distance(&all)?);

    // a point mass symmetrizes to the uniform distribution on its slice
    let point = Dist::<Rational>::point(n, 0b000111)?;
    let sym = point.symmetrize()?;
    println!("slice-3 support after symmetrizing: {} strings", sym.support_size());
    let slice = PsiSet::new(n, [3])?.dist::<Rational>()?;
    println!("tv(sym, D_{{3}}) = {}", sym.tv_distance(&slice)?);

    // weight-level view and the Kolmogorov distance between weight profiles
    let w = mix.weight_marginal();
    let b = SpecialKind::All.weight_dist::<Rational>(n);
    println!("weights of mix: {:?}", w.masses().iter().map(|m| m.to_string()).collect::<Vec<_>>());
    println!("kolmogorov(mix, binomial) = {}", w.kolmogorov_distance(&b)?);
    Ok(())
}
