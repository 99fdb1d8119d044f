//! The odd-degree Chebyshev-derived polynomials and their checked facts.

use locsym::lab::{chebyshev_p_coeffs, poly::verify_p_facts};

fn main() -> locsym::Result<()> {
    for r in [1, 3, 5] {
        let p = chebyshev_p_coeffs(r)?;
        let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
        println!("r = {r}: degree {:?}, coefficients [{}]", p.degree(), coeffs.join(", "));
    }
    let rep = verify_p_facts(&[1, 3, 5, 7, 9, 11, 13, 15], 100, 3)?;
    println!("facts: {} checks, passed {}", rep.checked, rep.passed);
    Ok(())
}
