//! Exact analysis of distributions sampled by d-local Boolean functions.
//!
//! A d-local function `f: {0,1}^m -> {0,1}^n` lets every output bit read at most
//! `d` input bits. This crate builds such functions, computes their output
//! distributions exactly, compares them to uniform symmetric distributions
//! `D_Ψ` (uniform over strings whose Hamming weight lies in `Ψ`), and checks the
//! quantitative inequalities that govern which `D_Ψ` are locally sampleable.
//!
//! Modules:
//! - [`dist`]: exact/float distributions, distances, the `D_Ψ` family.
//! - [`localfn`]: local functions, two exact output-distribution engines, samplers.
//! - [`hypergraph`]: dependency hypergraphs and independent-neighborhood selection.
//! - [`classify`]: nearest special distribution, best Ψ, regimes, probes.
//! - [`lab`]: verification suites for the binomial, polynomial and density facts.
//! - [`cli`]: the `locsym` command-line front end.

pub mod classify;
pub mod cli;
pub mod dist;
pub mod error;
pub mod hypergraph;
pub mod lab;
pub mod localfn;
pub mod mass;
pub mod rng;

pub use dist::{AnyDist, Dist, PsiSet, SpecialKind, WDist};
pub use error::{Error, Result};
pub use localfn::{LocalFn, OutputGate, Subcube};
pub use mass::{Mass, Mode, Prob, Rational};
