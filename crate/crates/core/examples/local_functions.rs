//! Reading, evaluating and analyzing a local function: parity ANF, k-wise
//! independence and a JSON round trip.

use locsym::localfn::{anf_parity, kwise_check, Engine};
use locsym::{LocalFn, OutputGate, Rational};

fn main() -> locsym::Result<()> {
    // y_i = x_i ∧ x_{i+1} for a 3-bit window, plus a copy of x_0
    let gates = vec![
        OutputGate::from_fn(vec![0, 1], |b| b[0] & b[1])?,
        OutputGate::from_fn(vec![1, 2], |b| b[0] & b[1])?,
        OutputGate::copy(0),
    ];
    let f = LocalFn::new(3, 2, gates)?;
    println!("f(101) = {:?}", f.evaluate(&[true, false, true])?);
    println!("parity ANF: {}", anf_parity(&f).render());
    for k in 1..=2 {
        let r = kwise_check(&f, k)?;
        println!("{k}-wise independent: {} ({} subsets)", r.passed, r.subsets_checked);
    }
    let p = f.output_distribution::<Rational>(Engine::Naive)?;
    for (x, m) in p.entries() {
        println!("  Pr[y = {x:03b}] = {m}");
    }
    let back = LocalFn::from_json_str(&f.to_json_string())?;
    println!("round trip equal: {}", back == f);
    Ok(())
}
