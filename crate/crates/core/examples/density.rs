//! Sums of bounded integer variables: the density parameters, the block
//! construction, and the shift bound checked against the exact distribution.

use locsym::lab::{check_density_theorem, construct_blocks, density_params, DensityInstance, IntPmf};

fn main() -> locsym::Result<()> {
    let y = IntPmf::uniform(&[0, 1, 2])?;
    let inst = DensityInstance::new(3, vec![y; 4096], [2, 3])?;
    let p = density_params(&inst)?;
    println!("φ = {}, L = {:.1}, log2 α = {:.2}, blocks = {}", p.phi, p.l, p.alpha_log2, p.block_count);

    let b = construct_blocks(&inst, &p)?;
    println!("{} blocks, Bézout coefficients {:?}", b.blocks.len(), b.bezout);

    let rep = check_density_theorem(&inst, 20)?;
    println!("checked {} shifts: passed {}, tightest slack {:?}", rep.checked, rep.passed, rep.max_slack);

    // parity-constrained variables: shifts must be multiples of φ = 2
    let odd = DensityInstance::new(3, vec![IntPmf::uniform(&[1, 3])?; 40], [3])?;
    match locsym::lab::check_density_deltas(&odd, &[1]) {
        Err(e) => println!("Δ = 1 rejected: {e}"),
        Ok(_) => println!("Δ = 1 unexpectedly accepted"),
    }
    Ok(())
}
