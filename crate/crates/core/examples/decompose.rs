//! Dependency hypergraph of a random 3-local function, a selection of
//! independent neighborhoods, and an exact check that they factorize.

use locsym::hypergraph::{conditional_independence_check, find_independent_neighborhoods, verify_selection, DepHypergraph};
use locsym::{rng, LocalFn};

fn main() -> locsym::Result<()> {
    let mut r = rng::stream(3, 0);
    let f = LocalFn::random(&mut r, 40, 50, 3);
    let g = DepHypergraph::from_localfn(&f);
    println!("n = {}, m = {}, {} edges, max input degree {}", f.n(), f.m(), g.edges().len(), g.max_degree());

    let sel = find_independent_neighborhoods(&g, 8, 6)?;
    println!("{} centers after removing inputs {:?}", sel.r, sel.removed_inputs);
    for (v, nb) in sel.centers.iter().zip(&sel.neighborhoods).take(6) {
        println!("  center {v:>2}: I(v) = {nb:?}");
    }
    if let Err(e) = verify_selection(&g, &sel) {
        println!("selection rejected: {e}");
        return Ok(());
    }
    let rep = conditional_independence_check(&f, &sel, 16, 1)?;
    println!("independent on {} subcubes (exhaustive: {}): {}", rep.subcubes_checked, rep.exhaustive, rep.passed);
    Ok(())
}
