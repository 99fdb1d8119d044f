//! Binomial coefficient facts swept over ranges.

use locsym::lab::binom::{entropy, verify_binom_tail, verify_individual_binom, verify_nearby_binom};

fn main() -> locsym::Result<()> {
    println!("H(1/3) = {:.6}", entropy(1.0 / 3.0));
    for rep in [verify_nearby_binom(2000)?, verify_individual_binom(500)?, verify_binom_tail(150)?] {
        println!("{:<18} checked {:>8}, passed {}", rep.suite, rep.checked, rep.passed);
    }
    Ok(())
}
