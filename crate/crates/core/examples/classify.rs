//! Nearest special distribution, best Ψ, the ratio between them, and the
//! regime/truncation of a tail Ψ.

use locsym::classify::{classify, classify_weights, regime, truncate_tail_support, ClassifyOptions};
use locsym::localfn::{evens_with_flips, mixture_evens_odds, Engine};
use locsym::{PsiSet, Rational};

fn main() -> locsym::Result<()> {
    let f = evens_with_flips(10, 2)?;
    let r = classify(&f, &ClassifyOptions::default())?;
    println!("flips(10,2): nearest {} at {}, best Ψ {} at {}, ratio {}", r.nearest.name(), r.eps_d.exact, r.best_psi.render(), r.eps_star.exact, r.ratio);

    // at n = 180 only candidate Ψ sets are compared
    let n = 180;
    let w = mixture_evens_odds(n)?.weight_distribution::<Rational>(Engine::Auto)?;
    let mod6 = PsiSet::new(n, (0..=n).filter(|k| matches!(k % 6, 0 | 1 | 2 | 4)))?;
    let r = classify_weights(&w, &[mod6])?;
    println!("mixture(180): nearest {} at {}, ε* = {:.5}, ratio {:.4}", r.nearest.name(), r.eps_d.exact, r.eps_star.float, r.ratio_float.unwrap_or(f64::INFINITY));

    let tail = PsiSet::new(300, 0..=105)?;
    let label = regime(&tail);
    let t = truncate_tail_support(&tail, 6.0)?;
    println!("Ψ = {{0..105}} at n = 300: {} (ι = {}), kept {} members {}, tv {:.3e}", label.regime, label.iota, t.kept.len(), t.kept.render(), t.tv.float);
    Ok(())
}
