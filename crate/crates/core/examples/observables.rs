//! Report-only observables: smoothness of the weight distribution under even
//! shifts and the best parity split of the binomial tail.

use locsym::lab::{continuity_report, kolmogorov_parity_report};
use locsym::localfn::{evens_with_flips, mixture_evens_odds, Engine};
use locsym::Rational;

fn main() -> locsym::Result<()> {
    let f = evens_with_flips(16, 4)?;
    let c = continuity_report(&f, &[2, 4, 8], Engine::Auto)?;
    for row in &c.rows {
        println!("Δ = {}: max gap {} at x = {} (×n/Δ = {:.3})", row.delta, row.max_diff.exact, row.argmax, row.normalized);
    }
    println!("mass near n/2: {:.3}", c.central_mass);

    let w = mixture_evens_odds(30)?.weight_distribution::<Rational>(Engine::Auto)?;
    let k = kolmogorov_parity_report(&w);
    println!("mixture(30): η = {}, deviation {:.3e}", k.eta.exact, k.objective.float);
    Ok(())
}
