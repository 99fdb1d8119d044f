//! Numerical verification suites for the supporting inequalities.
//!
//! Every suite returns a [`VerificationReport`]; [`run_suite`] dispatches by name.

pub mod binom;
pub mod claims;
pub mod density;
pub mod hyper;
pub mod observe;
pub mod pmf;
pub mod poly;
pub mod report;
pub mod tv;

pub use density::{
    bezout_combination, check_density_deltas, check_density_lemma, check_density_theorem, construct_blocks,
    density_params, DensityInstance, DensityParams,
};
pub use observe::{continuity_report, kolmogorov_parity_report, ContinuityReport, KolmogorovParityReport};
pub use pmf::{IntPmf, IntPmfFile};
pub use poly::{chebyshev_p_coeffs, RationalPoly};
pub use report::{SweepRow, VerificationReport, Violation};

use crate::error::{Error, Result};

/// Names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "nearby-binom",
    "entropy",
    "individual-binom",
    "binom-tail",
    "p-facts",
    "hypercontractivity",
    "weak-anticoncentration",
    "poly-anticoncentration",
    "distance-to-sym",
    "tv-after-conditioning",
    "tv-after-product",
    "tv-identities",
    "claims",
    "density-lemma",
    "density-theorem",
];

/// Knobs shared by the suites; `None` picks the suite's default.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct SuiteParams {
    pub n_max: Option<usize>,
    pub trials: Option<u64>,
    pub seed: u64,
    pub d_max: Option<usize>,
    pub grid: Option<u64>,
}

/// Runs the named suite with defaults matching the documented ranges.
pub fn run_suite(name: &str, p: &SuiteParams) -> Result<VerificationReport> {
    let seed = p.seed;
    match name {
        "nearby-binom" => binom::verify_nearby_binom(p.n_max.unwrap_or(2000)),
        "entropy" => binom::verify_entropy(p.grid.unwrap_or(2000) as usize),
        "individual-binom" => binom::verify_individual_binom(p.n_max.unwrap_or(1000)),
        "binom-tail" => binom::verify_binom_tail(p.n_max.unwrap_or(200)),
        "p-facts" => poly::verify_p_facts(&[1, 3, 5, 7, 9, 11, 13, 15], p.grid.unwrap_or(100), 3),
        "hypercontractivity" => hyper::verify_hypercontractivity(
            p.trials.unwrap_or(200),
            p.n_max.unwrap_or(12),
            p.d_max.unwrap_or(3),
            &[4, 6],
            seed,
        ),
        "weak-anticoncentration" => {
            hyper::verify_weak_anticoncentration(p.trials.unwrap_or(200), p.n_max.unwrap_or(12), p.d_max.unwrap_or(3), seed)
        }
        "poly-anticoncentration" => hyper::poly_anticoncentration_report(
            p.trials.unwrap_or(200),
            p.n_max.unwrap_or(12),
            p.d_max.unwrap_or(3),
            &[0.5, 1.0, 1.5, 2.0, 3.0, 4.0],
            seed,
        ),
        "distance-to-sym" => tv::verify_distance_to_sym(p.trials.unwrap_or(200), p.n_max.unwrap_or(10), seed),
        "tv-after-conditioning" => tv::verify_conditioning(p.trials.unwrap_or(200), p.n_max.unwrap_or(10), seed),
        "tv-after-product" => tv::verify_product(p.trials.unwrap_or(200), p.n_max.unwrap_or(10), seed),
        "tv-identities" => tv::verify_tv_identities(p.trials.unwrap_or(200), p.n_max.unwrap_or(10), seed),
        "claims" => claims::verify_claims(p.n_max.unwrap_or(10), p.trials.unwrap_or(20), seed),
        "density-lemma" => density::density_lemma_suite(p.trials.unwrap_or(50), seed),
        "density-theorem" => density::density_theorem_suite(p.trials.unwrap_or(6), seed),
        other => Err(Error::invalid(format!("unknown suite '{other}'; expected one of: {}", SUITES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite("nope", &SuiteParams::default()), Err(Error::InvalidInput(_))));
    }
}
