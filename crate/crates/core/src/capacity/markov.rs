//! First-order Markov measures on vertex shifts.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::factor::MarkedGraph;
use crate::gapshift::{GapShift, DEFAULT_TOL};
use crate::graph::{is_irreducible, LabeledGraph, VertexId};
use crate::{Error, Result};

const VALIDATION_TOL: f64 = 1e-9;

/// A stationary Markov chain on the vertices of a graph, moving only along
/// edges. Vertices outside the support have an empty transition row and zero
/// stationary mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovMeasure {
    graph: LabeledGraph,
    transition: Vec<BTreeMap<VertexId, f64>>,
    stationary: Vec<f64>,
}

impl MarkovMeasure {
    /// Validates rows, edges and stationarity up to `1e-9`.
    pub fn new(
        graph: LabeledGraph,
        transition: Vec<BTreeMap<VertexId, f64>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let n = graph.len();
        if transition.len() != n || stationary.len() != n {
            return Err(Error::Invalid(
                "transition and stationary must have one entry per vertex".into(),
            ));
        }
        for (u, row) in transition.iter().enumerate() {
            for (&v, &p) in row {
                if !graph.has_edge(u, v) {
                    return Err(Error::Invalid(format!(
                        "transition {} -> {} is not an edge",
                        graph.name(u),
                        graph.name(v)
                    )));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Invalid(format!("probability {p} out of range")));
                }
            }
            let total: f64 = row.values().sum();
            let supported = stationary[u] > 0.0;
            if supported && (total - 1.0).abs() > VALIDATION_TOL {
                return Err(Error::Invalid(format!(
                    "row {} sums to {total}",
                    graph.name(u)
                )));
            }
        }
        if stationary.iter().any(|&p| p < 0.0)
            || (stationary.iter().sum::<f64>() - 1.0).abs() > VALIDATION_TOL
        {
            return Err(Error::Invalid(
                "stationary vector is not a probability vector".into(),
            ));
        }
        let mu = Self {
            graph,
            transition,
            stationary,
        };
        let pushed = mu.step(&mu.stationary);
        if pushed
            .iter()
            .zip(&mu.stationary)
            .any(|(a, b)| (a - b).abs() > VALIDATION_TOL)
        {
            return Err(Error::Invalid("stationary vector is not invariant".into()));
        }
        Ok(mu)
    }

    /// Solves for the stationary vector of the chain restricted to the
    /// vertices with a nonempty transition row.
    pub fn from_transition(
        graph: LabeledGraph,
        transition: Vec<BTreeMap<VertexId, f64>>,
    ) -> Result<Self> {
        let support: Vec<VertexId> = (0..graph.len())
            .filter(|&v| transition.get(v).is_some_and(|r| !r.is_empty()))
            .collect();
        if support.is_empty() {
            return Err(Error::Invalid("empty support".into()));
        }
        let mut idx = vec![usize::MAX; graph.len()];
        for (i, &v) in support.iter().enumerate() {
            idx[v] = i;
        }
        let k = support.len();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for (i, &u) in support.iter().enumerate() {
            m[(i, i)] -= 1.0;
            for (&v, &p) in &transition[u] {
                if idx[v] == usize::MAX {
                    return Err(Error::Invalid(format!(
                        "transition leaves the support at {}",
                        graph.name(v)
                    )));
                }
                m[(idx[v], i)] += p;
            }
        }
        for j in 0..k {
            m[(k - 1, j)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(k);
        rhs[k - 1] = 1.0;
        let pi = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numeric("stationary system is singular".into()))?;
        let mut stationary = vec![0.0; graph.len()];
        for (i, &v) in support.iter().enumerate() {
            stationary[v] = pi[i].max(0.0);
        }
        Self::new(graph, transition, stationary)
    }

    /// Measure of maximal entropy of an irreducible graph.
    pub fn parry(graph: &LabeledGraph) -> Result<Self> {
        Self::parry_on(graph, &vec![true; graph.len()])
    }

    /// Measure of maximal entropy of the subgraph induced by `keep`, viewed
    /// as a measure on the whole graph.
    pub fn parry_on(graph: &LabeledGraph, keep: &[bool]) -> Result<Self> {
        let (sub, old) = graph.induced(keep);
        if sub.is_empty() || !is_irreducible(&sub) || sub.edge_count() == 0 {
            return Err(Error::NotIrreducible);
        }
        let a = adjacency(&sub);
        let (lambda, r) = perron(&a)?;
        let (_, l) = perron(&a.transpose())?;
        let norm: f64 = l.iter().zip(r.iter()).map(|(x, y)| x * y).sum();
        let mut transition = vec![BTreeMap::new(); graph.len()];
        let mut stationary = vec![0.0; graph.len()];
        for (i, &u) in old.iter().enumerate() {
            stationary[u] = l[i] * r[i] / norm;
            for &j in sub.successors(i) {
                transition[u].insert(old[j], r[j] / (lambda * r[i]));
            }
        }
        // renormalise rows against rounding
        for row in transition.iter_mut() {
            let total: f64 = row.values().sum();
            if total > 0.0 {
                row.values_mut().for_each(|p| *p /= total);
            }
        }
        Self::new(graph.clone(), transition, stationary)
    }

    /// I.i.d. symbols with the given weights, as a chain on the full shift
    /// graph with one vertex per symbol.
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        if probs.is_empty()
            || probs.iter().any(|&p| !(p > 0.0))
            || (probs.iter().sum::<f64>() - 1.0).abs() > VALIDATION_TOL
        {
            return Err(Error::Invalid(
                "weights must be positive and sum to 1".into(),
            ));
        }
        let mut g = LabeledGraph::new();
        for s in 0..probs.len() {
            g.add_vertex(s.to_string(), s as u32);
        }
        for u in 0..probs.len() {
            for v in 0..probs.len() {
                g.add_edge(u, v);
            }
        }
        let row: BTreeMap<VertexId, f64> = probs.iter().copied().enumerate().collect();
        Self::new(g, vec![row; probs.len()], probs.to_vec())
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn transition(&self, u: VertexId, v: VertexId) -> f64 {
        self.transition[u].get(&v).copied().unwrap_or(0.0)
    }

    pub fn transitions(&self) -> &[BTreeMap<VertexId, f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn support(&self) -> Vec<bool> {
        self.stationary.iter().map(|&p| p > 0.0).collect()
    }

    /// `ν(v₀ v₁ … v_{n-1})`.
    pub fn path_probability(&self, path: &[VertexId]) -> f64 {
        let Some(&first) = path.first() else {
            return 1.0;
        };
        path.windows(2).fold(self.stationary[first], |acc, w| {
            acc * self.transition(w[0], w[1])
        })
    }

    fn step(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; dist.len()];
        for (u, row) in self.transition.iter().enumerate() {
            if dist[u] != 0.0 {
                for (&v, &p) in row {
                    out[v] += dist[u] * p;
                }
            }
        }
        out
    }
}

fn adjacency(g: &LabeledGraph) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(g.len(), g.len());
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
    }
    a
}

/// Perron root and positive right eigenvector of an irreducible 0/1 matrix.
/// Power iteration on `A + I` brackets the root; shifted inverse iteration
/// then sharpens the vector.
fn perron(a: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let n = a.nrows();
    let b = a + DMatrix::<f64>::identity(n, n);
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..200_000 {
        let y = &b * &x;
        let ratios = y.iter().zip(x.iter()).map(|(p, q)| p / q);
        lo = ratios.clone().fold(f64::INFINITY, f64::min) - 1.0;
        hi = ratios.fold(0.0, f64::max) - 1.0;
        x = &y / y.sum();
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    let shift = lambda + 1e-7 * lambda.max(1.0);
    let lu = (a - DMatrix::<f64>::identity(n, n) * shift).lu();
    for _ in 0..6 {
        let y = lu
            .solve(&x)
            .ok_or_else(|| Error::Numeric("inverse iteration hit a singular shift".into()))?;
        let s = y.sum();
        if !s.is_finite() || s == 0.0 {
            return Err(Error::Numeric("inverse iteration diverged".into()));
        }
        x = y / s;
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Numeric("Perron vector is not positive".into()));
    }
    lambda = (a * &x).sum() / x.sum();
    Ok((lambda, x))
}

/// Every closed walk of length at most `maxlen` in the support has
/// transition-probability geometric mean within `tol` of `e^{-h}`.
pub fn weight_per_symbol_check(nu: &MarkovMeasure, h: f64, maxlen: usize, tol: f64) -> bool {
    let target = (-h).exp();
    let support = nu.support();
    let n = nu.graph.len();
    let mut ok = true;
    // walks are rooted at their least vertex, so each orbit is seen once per rotation fixing it
    fn dfs(
        nu: &MarkovMeasure,
        root: VertexId,
        u: VertexId,
        len: usize,
        logp: f64,
        maxlen: usize,
        target: f64,
        tol: f64,
        ok: &mut bool,
    ) {
        if !*ok {
            return;
        }
        for (&v, &p) in &nu.transition[u] {
            if v < root || p <= 0.0 {
                continue;
            }
            let l = logp + p.ln();
            if v == root {
                let w = (l / (len + 1) as f64).exp();
                if (w - target).abs() > tol {
                    *ok = false;
                    return;
                }
            }
            if len + 1 < maxlen {
                dfs(nu, root, v, len + 1, l, maxlen, target, tol, ok);
            }
        }
    }
    for root in (0..n).filter(|&v| support[v]) {
        dfs(nu, root, root, 0, 0.0, maxlen, target, tol, &mut ok);
        if !ok {
            break;
        }
    }
    ok
}

/// Largest difference between the pushed-forward gap law of `nu` and the gap
/// law `λ^{-i-1}` of the measure of maximal entropy on `y`, over gaps
/// `0..=l`. `None` when the measure does not fit the code or gives the
/// marked set no mass.
pub fn gap_law_deviation(
    nu: &MarkovMeasure,
    code: &MarkedGraph,
    y: &GapShift,
    l: u64,
) -> Option<f64> {
    if nu.graph.len() != code.len() {
        return None;
    }
    let lambda = y.entropy(DEFAULT_TOL).ok()?;
    let marked = code.marked();
    let mass: f64 = (0..code.len())
        .filter(|&v| marked[v])
        .map(|v| nu.stationary[v])
        .sum();
    if !(mass > 0.0) {
        return None;
    }
    let mut cur: Vec<f64> = (0..code.len())
        .map(|v| {
            if marked[v] {
                nu.stationary[v] / mass
            } else {
                0.0
            }
        })
        .collect();
    let mut worst = 0.0f64;
    for i in 0..=l {
        let mut next = nu.step(&cur);
        let arrived: f64 = (0..code.len())
            .filter(|&v| marked[v])
            .map(|v| next[v])
            .sum();
        let expected = if y.gaps().contains(i) {
            lambda.powi(-(i as i32) - 1)
        } else {
            0.0
        };
        worst = worst.max((arrived - expected).abs());
        for (v, x) in next.iter_mut().enumerate() {
            if marked[v] {
                *x = 0.0;
            }
        }
        cur = next;
    }
    Some(worst)
}

/// The pushed-forward gap law of `nu` matches that of the measure of
/// maximal entropy on `y` within `tol` for all gaps up to `l`.
pub fn validate_capacity_witness(
    nu: &MarkovMeasure,
    code: &MarkedGraph,
    y: &GapShift,
    l: u64,
    tol: f64,
) -> bool {
    gap_law_deviation(nu, code, y, l).is_some_and(|d| d <= tol)
}
