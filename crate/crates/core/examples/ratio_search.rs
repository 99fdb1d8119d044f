//! Random 2-local functions: how far the best Ψ beats the nearest special.

use locsym::classify::ratio_search;

fn main() -> locsym::Result<()> {
    let rep = ratio_search(8, 2, 40, 1)?;
    println!("n = {}, d = {}, {} trials", rep.n, rep.d, rep.trials);
    println!("largest finite ratio {:.4} (trial {:?}), {} infinite", rep.max_finite_ratio, rep.argmax_trial, rep.infinite_ratios);
    for row in rep.rows.iter().take(5) {
        println!("  trial {:>2}: m = {:>2}, nearest {:>7} at {:.4}, Ψ* = {{{}}} at {:.4}", row.trial, row.m, row.nearest.name(), row.eps_d, row.best_psi, row.eps_star);
    }
    Ok(())
}
