//! Dependency hypergraphs and independent-neighborhood selection.
//!
//! Vertices are output bits; each input bit contributes one edge holding the
//! outputs it feeds. For a vertex `v`, `I(v)` is `v` together with every vertex
//! sharing an edge with it, and `N(v) = {u : I(u) ∩ I(v) ≠ ∅}`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::localfn::{frontier_dp, Accumulator, LocalFn, Subcube, DP_STATE_BUDGET, NAIVE_MAX_INPUTS};
use crate::mass::Rational;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub input: usize,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DepHypergraph {
    n: usize,
    edges: Vec<Edge>,
    vertex_edges: Vec<Vec<usize>>,
}

impl DepHypergraph {
    /// One edge per input that feeds at least one output.
    pub fn from_localfn(f: &LocalFn) -> Self {
        let mut feeds: Vec<Vec<usize>> = vec![Vec::new(); f.m()];
        for (i, g) in f.gates().iter().enumerate() {
            for &j in g.inputs() {
                feeds[j].push(i);
            }
        }
        let edges: Vec<Edge> = feeds
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(input, vertices)| Edge { input, vertices })
            .collect();
        let mut vertex_edges = vec![Vec::new(); f.n()];
        for (e, edge) in edges.iter().enumerate() {
            for &v in &edge.vertices {
                vertex_edges[v].push(e);
            }
        }
        DepHypergraph { n: f.n(), edges, vertex_edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of edges containing `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.vertex_edges[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.vertex_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn removed_mask(&self, removed_inputs: &[usize]) -> Vec<bool> {
        self.edges.iter().map(|e| removed_inputs.contains(&e.input)).collect()
    }

    fn closed(&self, v: usize, removed: &[bool]) -> BTreeSet<usize> {
        let mut s = BTreeSet::from([v]);
        for &e in &self.vertex_edges[v] {
            if !removed[e] {
                s.extend(self.edges[e].vertices.iter().copied());
            }
        }
        s
    }

    fn nbhd(&self, v: usize, removed: &[bool]) -> BTreeSet<usize> {
        self.closed(v, removed).into_iter().flat_map(|u| self.closed(u, removed)).collect()
    }

    /// `(I(v), N(v))` in the graph with the edges of `removed_inputs` deleted.
    pub fn neighborhoods_without(&self, v: usize, removed_inputs: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
        if v >= self.n {
            return Err(Error::invalid(format!("vertex {v} out of range for n = {}", self.n)));
        }
        let removed = self.removed_mask(removed_inputs);
        Ok((self.closed(v, &removed).into_iter().collect(), self.nbhd(v, &removed).into_iter().collect()))
    }

    /// `(I(v), N(v))` in the full graph.
    pub fn neighborhoods(&self, v: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        self.neighborhoods_without(v, &[])
    }
}

/// Centers whose closed neighborhoods are small and pairwise non-adjacent
/// once the edges of `removed_inputs` are deleted.
#[derive(Debug, Clone, Serialize)]
pub struct NeighborhoodSelection {
    pub t: usize,
    pub edge_budget: usize,
    pub removed_inputs: Vec<usize>,
    pub centers: Vec<usize>,
    /// `I(v)` for each center, in the graph without the removed edges.
    pub neighborhoods: Vec<Vec<usize>>,
    pub r: usize,
    pub verified: bool,
    /// Set when no center could be selected within the budget.
    pub failure: Option<String>,
}

/// Greedy selection: repeatedly take the candidate with the smallest `N(v)`
/// (ties to the smallest index). If `|I(v)| ≤ t` it becomes a center and
/// `N(N(v))` leaves the candidate pool; otherwise its largest edge is deleted
/// while budget remains, and it is discarded once the budget is spent.
pub fn find_independent_neighborhoods(g: &DepHypergraph, t: usize, edge_budget: usize) -> Result<NeighborhoodSelection> {
    if t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    let mut candidate = vec![true; g.n];
    let mut removed = vec![false; g.edges.len()];
    let mut removed_inputs = Vec::new();
    let mut centers = Vec::new();
    loop {
        let best = (0..g.n)
            .into_par_iter()
            .filter(|&v| candidate[v])
            .map(|v| (g.nbhd(v, &removed).len(), v))
            .min();
        let Some((_, v)) = best else { break };
        if g.closed(v, &removed).len() <= t {
            centers.push(v);
            for u in g.nbhd(v, &removed) {
                for w in g.nbhd(u, &removed) {
                    candidate[w] = false;
                }
            }
        } else if removed_inputs.len() < edge_budget {
            let e = g.vertex_edges[v]
                .iter()
                .copied()
                .filter(|&e| !removed[e])
                .max_by_key(|&e| (g.edges[e].vertices.len(), std::cmp::Reverse(g.edges[e].input)))
                .expect("|I(v)| > 1 implies a live edge");
            removed[e] = true;
            removed_inputs.push(g.edges[e].input);
        } else {
            candidate[v] = false;
        }
    }
    centers.sort_unstable();
    removed_inputs.sort_unstable();
    let neighborhoods = centers.iter().map(|&v| g.closed(v, &removed).into_iter().collect()).collect();
    let failure = centers.is_empty().then(|| format!("no center with |I(v)| ≤ {t} within an edge budget of {edge_budget}"));
    let mut sel = NeighborhoodSelection {
        t,
        edge_budget,
        removed_inputs,
        r: centers.len(),
        centers,
        neighborhoods,
        verified: false,
        failure,
    };
    verify_selection(g, &sel).map_err(|e| Error::invalid(format!("greedy selection failed its own check: {e}")))?;
    sel.verified = true;
    Ok(sel)
}

/// Recomputes every selection invariant from scratch.
pub fn verify_selection(g: &DepHypergraph, sel: &NeighborhoodSelection) -> std::result::Result<(), String> {
    if sel.removed_inputs.len() > sel.edge_budget {
        return Err(format!("{} edges removed, budget {}", sel.removed_inputs.len(), sel.edge_budget));
    }
    if sel.centers.len() != sel.neighborhoods.len() || sel.r != sel.centers.len() {
        return Err("center and neighborhood counts differ".into());
    }
    let distinct: BTreeSet<usize> = sel.centers.iter().copied().collect();
    if distinct.len() != sel.centers.len() {
        return Err("centers are not distinct".into());
    }
    if let Some(&v) = sel.centers.iter().find(|&&v| v >= g.n) {
        return Err(format!("center {v} out of range"));
    }
    let removed = g.removed_mask(&sel.removed_inputs);
    let mut owner = vec![usize::MAX; g.n];
    for (k, (&v, stored)) in sel.centers.iter().zip(&sel.neighborhoods).enumerate() {
        let i: Vec<usize> = g.closed(v, &removed).into_iter().collect();
        if &i != stored {
            return Err(format!("stored I({v}) = {stored:?} but recomputed {i:?}"));
        }
        if i.len() > sel.t {
            return Err(format!("|I({v})| = {} exceeds t = {}", i.len(), sel.t));
        }
        for u in i {
            if owner[u] != usize::MAX {
                return Err(format!("vertex {u} lies in two selected neighborhoods"));
            }
            owner[u] = k;
        }
    }
    for (e, edge) in g.edges.iter().enumerate() {
        if removed[e] {
            continue;
        }
        let touched: BTreeSet<usize> = edge.vertices.iter().map(|&u| owner[u]).filter(|&k| k != usize::MAX).collect();
        if touched.len() > 1 {
            let vs: Vec<usize> = touched.iter().map(|&k| sel.centers[k]).collect();
            return Err(format!("input {} joins the neighborhoods of centers {vs:?}", edge.input));
        }
    }
    Ok(())
}

/// Product of marginal supports above which the joint is checked cluster by cluster.
pub const JOINT_SUPPORT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceViolation {
    pub assignment: Vec<(usize, bool)>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceReport {
    pub subcubes_checked: usize,
    /// True when every assignment of the removed inputs was enumerated.
    pub exhaustive: bool,
    /// Subcubes verified by one joint distribution over all selected outputs.
    pub joint_checks: usize,
    /// Subcubes verified cluster by cluster (neighborhoods sharing an input form a cluster).
    pub clustered_checks: usize,
    pub passed: bool,
    pub violations: Vec<IndependenceViolation>,
}

/// Distribution of the listed outputs by enumerating the inputs that feed them.
fn enumerate_marginal(f: &LocalFn, outputs: &[usize]) -> Result<Dist<Rational>> {
    let vars = f.inputs_of(outputs.iter().copied());
    if vars.len() > NAIVE_MAX_INPUTS {
        return Err(Error::limit(format!("{} inputs feed a neighborhood", vars.len())));
    }
    let gates: Vec<(Vec<usize>, &[bool])> = outputs
        .iter()
        .map(|&o| {
            let g = f.gate(o);
            (g.inputs().iter().map(|i| vars.binary_search(i).expect("feeds")).collect(), g.table())
        })
        .collect();
    let mut counts = std::collections::HashMap::new();
    for a in 0..1u64 << vars.len() {
        let y = gates.iter().enumerate().fold(0u64, |acc, (k, (pos, table))| {
            let idx = pos.iter().enumerate().fold(0usize, |s, (j, &q)| s | ((a >> q & 1) as usize) << j);
            acc | (table[idx] as u64) << k
        });
        *counts.entry(y).or_insert(0u64) += 1;
    }
    Dist::from_counts(outputs.len(), counts.into_iter().map(|(y, c)| (y, BigUint::from(c))), vars.len() as u64)
}

/// Joint distribution of `outputs` (in order) by one frontier DP over all of them.
fn joint_by_dp(f: &LocalFn, outputs: &[usize]) -> Result<Dist<Rational>> {
    let sub = f.select_outputs(outputs)?;
    let gates: Vec<usize> = (0..outputs.len()).collect();
    let (counts, swept) = frontier_dp(&sub, &gates, Accumulator::Pattern, DP_STATE_BUDGET)?;
    Dist::from_counts(outputs.len(), counts, swept as u64)
}

/// Compares the joint of a group of neighborhoods with the product of their marginals.
fn check_group(f: &LocalFn, group: &[&Vec<usize>]) -> Result<Option<String>> {
    let outputs: Vec<usize> = group.iter().flat_map(|h| h.iter().copied()).collect();
    if outputs.len() > 64 {
        return Err(Error::limit(format!("{} outputs in one independence check", outputs.len())));
    }
    let joint = joint_by_dp(f, &outputs)?;
    let marginals = group.iter().map(|h| enumerate_marginal(f, h)).collect::<Result<Vec<_>>>()?;
    let product = Dist::product(&marginals)?;
    Ok((joint != product).then(|| {
        let tv = joint.tv_distance(&product).map(|d| crate::mass::render_rational(&d)).unwrap_or_default();
        format!("joint differs from product of marginals on {outputs:?} (tv {tv})")
    }))
}

fn check_subcube(f: &LocalFn, sel: &NeighborhoodSelection, cube: &Subcube) -> Result<(bool, Option<String>)> {
    let g = f.restrict(cube)?;
    let hoods: Vec<&Vec<usize>> = sel.neighborhoods.iter().collect();
    let support: u64 = hoods
        .iter()
        .map(|h| enumerate_marginal(&g, h).map(|d| d.support_size() as u64))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1u64, |a, b| a.saturating_mul(b));
    let total: usize = hoods.iter().map(|h| h.len()).sum();
    if support <= JOINT_SUPPORT_CAP && total <= 64 {
        return Ok((true, check_group(&g, &hoods)?));
    }
    // Neighborhoods that share an input are merged into one cluster; distinct
    // clusters read disjoint inputs, so their joint is the product.
    let inputs: Vec<Vec<usize>> = hoods.iter().map(|h| g.inputs_of(h.iter().copied())).collect();
    let mut cluster: Vec<usize> = (0..hoods.len()).collect();
    for a in 0..hoods.len() {
        for b in a + 1..hoods.len() {
            if inputs[a].iter().any(|i| inputs[b].binary_search(i).is_ok()) {
                let (ca, cb) = (cluster[a], cluster[b]);
                cluster.iter_mut().filter(|c| **c == cb).for_each(|c| *c = ca);
            }
        }
    }
    let ids: BTreeSet<usize> = cluster.iter().copied().collect();
    for id in ids {
        let group: Vec<&Vec<usize>> = (0..hoods.len()).filter(|&k| cluster[k] == id).map(|k| hoods[k]).collect();
        if let Some(msg) = check_group(&g, &group)? {
            return Ok((false, Some(msg)));
        }
    }
    Ok((false, None))
}

/// For assignments of the removed inputs (all of them when at most
/// `subcube_samples`, otherwise that many seeded random ones), checks exactly
/// that the selected neighborhoods of the restricted function are independent.
pub fn conditional_independence_check(
    f: &LocalFn,
    sel: &NeighborhoodSelection,
    subcube_samples: usize,
    seed: u64,
) -> Result<IndependenceReport> {
    let g = DepHypergraph::from_localfn(f);
    verify_selection(&g, sel).map_err(|e| Error::precondition(format!("selection rejected: {e}")))?;
    let s = &sel.removed_inputs;
    let exhaustive = s.len() < 63 && (1u64 << s.len()) <= subcube_samples as u64;
    let assignments: Vec<u64> = if exhaustive {
        (0..1u64 << s.len()).collect()
    } else {
        let mut r = rng::stream(seed, 0);
        (0..subcube_samples).map(|_| r.gen::<u64>() & low_mask(s.len())).collect()
    };
    if s.len() > 64 {
        return Err(Error::limit("more than 64 removed inputs"));
    }
    let results = assignments
        .par_iter()
        .map(|&a| {
            let cube = Subcube::from_bits(s, a)?;
            check_subcube(f, sel, &cube).map(|r| (cube, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = IndependenceReport {
        subcubes_checked: results.len(),
        exhaustive,
        joint_checks: 0,
        clustered_checks: 0,
        passed: true,
        violations: Vec::new(),
    };
    for (cube, (joint, violation)) in results {
        if joint {
            report.joint_checks += 1;
        } else {
            report.clustered_checks += 1;
        }
        if let Some(detail) = violation {
            report.passed = false;
            report.violations.push(IndependenceViolation {
                assignment: cube.fixed().iter().map(|(&i, &b)| (i, b)).collect(),
                detail,
            });
        }
    }
    Ok(report)
}

fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::dist::SpecialKind;
    use crate::localfn::{canonical, OutputGate};

    fn graph(kind: SpecialKind, n: usize) -> (LocalFn, DepHypergraph) {
        let f = canonical(kind, n).unwrap();
        let g = DepHypergraph::from_localfn(&f);
        (f, g)
    }

    #[test]
    fn construction_examples() {
        let (_, g) = graph(SpecialKind::Evens, 4);
        let edges: Vec<Vec<usize>> = g.edges().iter().map(|e| e.vertices.clone()).collect();
        assert_eq!(edges, vec![vec![0, 3], vec![0, 1], vec![1, 2], vec![2, 3]]);
        assert!((0..4).all(|v| g.degree(v) == 2));
        let (_, g) = graph(SpecialKind::All, 3);
        assert!(g.edges().iter().all(|e| e.vertices.len() == 1));
        let (_, g) = graph(SpecialKind::Zerones, 5);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].vertices.len(), 5);
        let (_, g) = graph(SpecialKind::Zeros, 5);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn neighborhood_examples() {
        let (_, g) = graph(SpecialKind::Evens, 6);
        let (i, n) = g.neighborhoods(1).unwrap();
        assert_eq!(i, vec![0, 1, 2]);
        assert_eq!(n, vec![0, 1, 2, 3, 5]);
        let (_, g) = graph(SpecialKind::Ones, 4);
        assert_eq!(g.neighborhoods(2).unwrap(), (vec![2], vec![2]));
        let (_, g) = graph(SpecialKind::Zerones, 3);
        assert_eq!(g.neighborhoods(0).unwrap(), (vec![0, 1, 2], vec![0, 1, 2]));
        assert!(g.neighborhoods(3).is_err());
    }

    #[test]
    fn selection_examples() {
        let (f, g) = graph(SpecialKind::Evens, 40);
        let sel = find_independent_neighborhoods(&g, 3, 0).unwrap();
        assert!(sel.verified && sel.removed_inputs.is_empty());
        assert!(sel.r >= 8, "r = {}", sel.r);
        assert!(sel.centers.windows(2).all(|w| w[1] - w[0] >= 2));
        assert!(conditional_independence_check(&f, &sel, 4, 1).unwrap().passed);

        let (_, g) = graph(SpecialKind::Zerones, 10);
        let sel = find_independent_neighborhoods(&g, 3, 0).unwrap();
        assert_eq!(sel.r, 0);
        assert!(sel.failure.is_some());
        let sel = find_independent_neighborhoods(&g, 1, 1).unwrap();
        assert_eq!(sel.r, 10);
        assert_eq!(sel.removed_inputs, vec![0]);
    }

    #[test]
    fn independence_examples() {
        let (f, g) = graph(SpecialKind::Evens, 20);
        let sel = find_independent_neighborhoods(&g, 3, 2).unwrap();
        let rep = conditional_independence_check(&f, &sel, 16, 7).unwrap();
        assert!(rep.passed, "{rep:?}");
        let (f, g) = graph(SpecialKind::All, 6);
        let sel = find_independent_neighborhoods(&g, 1, 0).unwrap();
        assert_eq!(sel.r, 6);
        assert!(conditional_independence_check(&f, &sel, 1, 0).unwrap().passed);
    }

    #[test]
    fn adversarial_selection_rejected() {
        // Path 0-1-2-3: I(0) = {0,1} and I(3) = {2,3} are disjoint, but input 1 joins them.
        let f = LocalFn::new(
            3,
            2,
            vec![
                OutputGate::copy(0),
                OutputGate::parity(vec![0, 1]).unwrap(),
                OutputGate::parity(vec![1, 2]).unwrap(),
                OutputGate::copy(2),
            ],
        )
        .unwrap();
        let sel = NeighborhoodSelection {
            t: 3,
            edge_budget: 0,
            removed_inputs: vec![],
            centers: vec![0, 3],
            neighborhoods: vec![vec![0, 1], vec![2, 3]],
            r: 2,
            verified: true,
            failure: None,
        };
        let g = DepHypergraph::from_localfn(&f);
        assert!(verify_selection(&g, &sel).is_err());
        assert!(matches!(conditional_independence_check(&f, &sel, 1, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_functions_factorize() {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f = LocalFn::random(&mut r, 20, 30, 3);
            let g = DepHypergraph::from_localfn(&f);
            assert!(g.max_degree() <= f.locality());
            for v in 0..f.n() {
                let (i, n) = g.neighborhoods(v).unwrap();
                assert!(i.contains(&v));
                assert!(i.iter().all(|u| n.contains(u)));
            }
            let sel = find_independent_neighborhoods(&g, 4, 6).unwrap();
            let rep = conditional_independence_check(&f, &sel, 8, 3).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }
}
