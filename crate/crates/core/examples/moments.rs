//! Low-degree multilinear polynomials over ±1: moment growth and a lower
//! bound on the probability of being large.

use locsym::lab::hyper::{hypercontractivity_holds, weak_anticoncentration_holds, MultilinearPoly};
use locsym::rng;

fn main() -> locsym::Result<()> {
    let mut r = rng::stream(5, 0);
    for _ in 0..4 {
        let p = MultilinearPoly::random(&mut r, 10, 3);
        let (q4, q4_ratio) = hypercontractivity_holds(&p, 4)?;
        let (q6, q6_ratio) = hypercontractivity_holds(&p, 6)?;
        let (anti, margin) = weak_anticoncentration_holds(&p);
        println!(
            "degree {}, E[p²] = {:>4}: q=4 {q4} (E[p⁴]/bound {q4_ratio:.3}), q=6 {q6} ({q6_ratio:.3}), anticoncentration {anti} (margin {margin:.3})",
            p.degree(),
            p.second_moment(),
        );
    }
    Ok(())
}
