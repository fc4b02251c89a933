//! Finite-horizon brute-force checks.
//!
//! Everything here works on explicit words and paths up to a length bound
//! and refuses to run past its [`OracleBudget`] instead of truncating.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::gapshift::GapShift;
use crate::graph::{LabeledGraph, Symbol, VertexId};
use crate::sft::Word;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_block_len: usize,
    pub max_path_len: usize,
    pub max_states: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_block_len: 30,
            max_path_len: 60,
            max_states: 2_000_000,
        }
    }
}

impl OracleBudget {
    fn block_len(&self, l: usize) -> Result<()> {
        if l > self.max_block_len {
            return Err(Error::BudgetExceeded(format!(
                "block length {l} > {}",
                self.max_block_len
            )));
        }
        Ok(())
    }

    fn path_len(&self, l: usize) -> Result<()> {
        if l > self.max_path_len {
            return Err(Error::BudgetExceeded(format!(
                "path length {l} > {}",
                self.max_path_len
            )));
        }
        Ok(())
    }

    fn states(&self, n: usize) -> Result<()> {
        if n > self.max_states {
            return Err(Error::BudgetExceeded(format!(
                "more than {} states",
                self.max_states
            )));
        }
        Ok(())
    }
}

/// Right-hand side of a language comparison.
#[derive(Clone, Copy, Debug)]
pub enum Comparand<'a> {
    Graph(&'a LabeledGraph),
    Gap(&'a GapShift),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageComparison {
    pub equal: bool,
    pub checked_len: usize,
    /// Shortest, then lexicographically least, word in exactly one language.
    pub divergent: Option<Word>,
    /// Whether `divergent` belongs to the left-hand language.
    pub divergent_in_left: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum State {
    /// Nothing read yet on a graph.
    Start,
    /// Possible current vertices of a graph path.
    Set(Vec<VertexId>),
    /// Gap shift, no 1 read yet, `n` zeros read.
    Lead(u64),
    /// Gap shift, `n` zeros since the last 1.
    After(u64),
}

enum Automaton<'a> {
    Graph {
        g: LabeledGraph,
        by_label: HashMap<Symbol, Vec<VertexId>>,
    },
    Gap(&'a GapShift),
}

impl<'a> Automaton<'a> {
    fn graph(g: &LabeledGraph) -> Self {
        let (t, _) = g.trimmed();
        let mut by_label: HashMap<Symbol, Vec<VertexId>> = HashMap::new();
        for v in 0..t.len() {
            by_label.entry(t.label(v)).or_default().push(v);
        }
        Automaton::Graph { g: t, by_label }
    }

    fn initial(&self) -> State {
        match self {
            Automaton::Graph { .. } => State::Start,
            Automaton::Gap(_) => State::Lead(0),
        }
    }

    fn alphabet(&self) -> BTreeSet<Symbol> {
        match self {
            Automaton::Graph { g, .. } => g.alphabet(),
            Automaton::Gap(_) => [0, 1].into_iter().collect(),
        }
    }

    fn step(&self, s: &State, c: Symbol) -> Option<State> {
        match (self, s) {
            (Automaton::Graph { by_label, .. }, State::Start) => {
                by_label.get(&c).map(|vs| State::Set(vs.clone()))
            }
            (Automaton::Graph { g, .. }, State::Set(p)) => {
                let mut next: Vec<VertexId> = p
                    .iter()
                    .flat_map(|&u| g.successors(u).iter().copied())
                    .filter(|&v| g.label(v) == c)
                    .collect();
                next.sort_unstable();
                next.dedup();
                (!next.is_empty()).then_some(State::Set(next))
            }
            (Automaton::Gap(y), State::Lead(a)) => match c {
                0 => y.allows_zero_run(a + 1).then_some(State::Lead(a + 1)),
                1 => Some(State::After(0)),
                _ => None,
            },
            (Automaton::Gap(y), State::After(b)) => match c {
                0 => y.allows_zero_run(b + 1).then_some(State::After(b + 1)),
                1 => y.gaps().contains(*b).then_some(State::After(0)),
                _ => None,
            },
            _ => unreachable!("state does not belong to this automaton"),
        }
    }
}

/// Compares the label language of `a` (as a vertex shift) with `b` on all
/// words of length at most `l`.
pub fn language_equal_upto(
    a: &LabeledGraph,
    b: &Comparand<'_>,
    l: usize,
    budget: &OracleBudget,
) -> Result<LanguageComparison> {
    budget.block_len(l)?;
    let left = Automaton::graph(a);
    let right = match b {
        Comparand::Graph(g) => Automaton::graph(g),
        Comparand::Gap(y) => Automaton::Gap(y),
    };
    let alphabet: BTreeSet<Symbol> = left.alphabet().union(&right.alphabet()).copied().collect();
    let mut frontier = vec![(Vec::<Symbol>::new(), left.initial(), right.initial())];
    let mut seen: HashSet<(State, State)> = HashSet::new();
    for _ in 0..l {
        let mut next = Vec::new();
        for (w, sa, sb) in &frontier {
            for &c in &alphabet {
                let (na, nb) = (left.step(sa, c), right.step(sb, c));
                if na.is_none() && nb.is_none() {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(c);
                match (na, nb) {
                    (Some(x), Some(y)) => {
                        if seen.insert((x.clone(), y.clone())) {
                            next.push((w2, x, y));
                        }
                    }
                    (x, _) => {
                        return Ok(LanguageComparison {
                            equal: false,
                            checked_len: l,
                            divergent: Some(Word(w2)),
                            divergent_in_left: Some(x.is_some()),
                        })
                    }
                }
            }
        }
        budget.states(seen.len())?;
        frontier = next;
    }
    Ok(LanguageComparison {
        equal: true,
        checked_len: l,
        divergent: None,
        divergent_in_left: None,
    })
}

/// `|B_m|` for the vertex shift of `g`, counted exactly through the subset
/// automaton (one path per word).
pub fn count_blocks(g: &LabeledGraph, m: usize, budget: &OracleBudget) -> Result<BigUint> {
    budget.block_len(m)?;
    let aut = Automaton::graph(g);
    let alphabet = aut.alphabet();
    let mut layer: HashMap<State, BigUint> = HashMap::new();
    layer.insert(aut.initial(), BigUint::from(1u32));
    for _ in 0..m {
        let mut next: HashMap<State, BigUint> = HashMap::new();
        for (s, n) in &layer {
            for &c in &alphabet {
                if let Some(t) = aut.step(s, c) {
                    *next.entry(t).or_insert_with(BigUint::zero) += n;
                }
            }
        }
        budget.states(next.len())?;
        layer = next;
    }
    Ok(layer.into_values().sum())
}

/// `(1/m) log |B_m|`.
pub fn entropy_estimate(g: &LabeledGraph, m: usize, budget: &OracleBudget) -> Result<f64> {
    if m == 0 {
        return Err(Error::Invalid("block length must be positive".into()));
    }
    let count = count_blocks(g, m, budget)?;
    if count.is_zero() {
        return Err(Error::Invalid("empty shift has no entropy".into()));
    }
    // log of a big integer: keep the top 52 bits
    let bits = count.bits();
    let shift = bits.saturating_sub(60);
    let top = (&count >> shift).to_f64().expect("fits in f64");
    Ok((top.ln() + shift as f64 * std::f64::consts::LN_2) / m as f64)
}

/// Two distinct equal-label paths of at most `l` edges with common start
/// and end, if one exists.
pub fn point_diamond_search(
    g: &LabeledGraph,
    l: usize,
    budget: &OracleBudget,
) -> Result<Option<(Vec<VertexId>, Vec<VertexId>)>> {
    budget.path_len(l)?;
    // parent of an off-diagonal pair: the previous pair, or the common start
    let mut parent: HashMap<
        (VertexId, VertexId),
        std::result::Result<(VertexId, VertexId), VertexId>,
    > = HashMap::new();
    let mut frontier = Vec::new();
    for u in 0..g.len() {
        for &x in g.successors(u) {
            for &y in g.successors(u) {
                if x != y && g.label(x) == g.label(y) && !parent.contains_key(&(x, y)) {
                    parent.insert((x, y), Err(u));
                    frontier.push((x, y));
                }
            }
        }
    }
    let unwind = |parent: &HashMap<_, std::result::Result<(VertexId, VertexId), VertexId>>,
                  mut pair: (VertexId, VertexId),
                  end: VertexId| {
        let (mut p, mut q) = (vec![end], vec![end]);
        loop {
            p.push(pair.0);
            q.push(pair.1);
            match parent[&pair] {
                Ok(prev) => pair = prev,
                Err(start) => {
                    p.push(start);
                    q.push(start);
                    break;
                }
            }
        }
        p.reverse();
        q.reverse();
        (p, q)
    };
    for depth in 2..=l {
        let mut next = Vec::new();
        for &(x, y) in &frontier {
            for &x2 in g.successors(x) {
                for &y2 in g.successors(y) {
                    if g.label(x2) != g.label(y2) {
                        continue;
                    }
                    if x2 == y2 {
                        return Ok(Some(unwind(&parent, (x, y), x2)));
                    }
                    if depth < l && !parent.contains_key(&(x2, y2)) {
                        parent.insert((x2, y2), Ok((x, y)));
                        next.push((x2, y2));
                    }
                }
            }
        }
        budget.states(parent.len())?;
        frontier = next;
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub injective: bool,
    pub window: usize,
    /// A label word with two preimage paths that differ at the centre.
    pub witness: Option<(Word, Vec<VertexId>, Vec<VertexId>)>,
}

/// Enumerates every path through `l` vertices of the subgraph induced by
/// `sub` and checks that paths with the same label word agree at the
/// central coordinate `l / 2`. Vertex ids in the witness refer to `g`.
pub fn restriction_injective_upto(
    g: &LabeledGraph,
    sub: &[bool],
    l: usize,
    budget: &OracleBudget,
) -> Result<InjectivityReport> {
    budget.path_len(l)?;
    if l == 0 {
        return Err(Error::Invalid("window must be positive".into()));
    }
    let (ind, old) = g.induced(sub);
    let (t, tmap) = ind.trimmed();
    let to_g = |v: VertexId| old[tmap[v]];
    let mut seen: HashMap<Vec<Symbol>, Vec<VertexId>> = HashMap::new();
    let mut path = Vec::with_capacity(l);
    let mut stack: Vec<(VertexId, usize)> = (0..t.len()).rev().map(|v| (v, 0)).collect();
    let mut count = 0usize;
    while let Some((v, depth)) = stack.pop() {
        path.truncate(depth);
        path.push(v);
        if path.len() == l {
            count += 1;
            budget.states(count)?;
            let word: Vec<Symbol> = path.iter().map(|&u| t.label(u)).collect();
            match seen.get(&word) {
                Some(other) if other[l / 2] != path[l / 2] => {
                    return Ok(InjectivityReport {
                        injective: false,
                        window: l,
                        witness: Some((
                            Word(word),
                            other.iter().map(|&u| to_g(u)).collect(),
                            path.iter().map(|&u| to_g(u)).collect(),
                        )),
                    });
                }
                Some(_) => {}
                None => {
                    seen.insert(word, path.clone());
                }
            }
            continue;
        }
        for &w in t.successors(v).iter().rev() {
            stack.push((w, depth + 1));
        }
    }
    Ok(InjectivityReport {
        injective: true,
        window: l,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::sft::ForbiddenSft;

    fn budget() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn graph_against_itself() {
        let g = two_loop_graph();
        let c = language_equal_upto(&g, &Comparand::Graph(&g), 20, &budget()).unwrap();
        assert!(c.equal);
    }

    #[test]
    fn divergence_is_shortest_and_least() {
        let full = full_two_shift();
        let gm = golden_mean();
        let c = language_equal_upto(&gm, &Comparand::Graph(&full), 10, &budget()).unwrap();
        assert_eq!(c.divergent, Some("11".parse().unwrap()));
        assert_eq!(c.divergent_in_left, Some(false));
    }

    #[test]
    fn budget_is_enforced() {
        let g = golden_mean();
        assert!(matches!(
            language_equal_upto(&g, &Comparand::Graph(&g), 31, &budget()),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(
            entropy_estimate(&g, 31, &budget()),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn block_counts() {
        let gm = golden_mean();
        // Fibonacci: |B_m| = F(m + 2)
        let mut fib = vec![0u64, 1];
        for i in 2..40 {
            fib.push(fib[i - 1] + fib[i - 2]);
        }
        for m in 1..=30 {
            assert_eq!(
                count_blocks(&gm, m, &budget()).unwrap(),
                BigUint::from(fib[m + 2])
            );
        }
        let full = full_two_shift();
        for m in [1, 7, 24] {
            assert!((entropy_estimate(&full, m, &budget()).unwrap() - 2f64.ln()).abs() < 1e-12);
        }
        let c = cycle(5);
        assert!((entropy_estimate(&c, 24, &budget()).unwrap() - 5f64.ln() / 24.0).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_estimate() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let e = entropy_estimate(&golden_mean(), 24, &budget()).unwrap();
        assert!((e - golden.ln()).abs() < 0.01);
    }

    #[test]
    fn counts_distinct_words_not_paths() {
        // two vertices with the same label and the same successors
        let mut g = LabeledGraph::new();
        let a = g.add_vertex("a", 0);
        let b = g.add_vertex("b", 0);
        for (u, v) in [(a, a), (a, b), (b, a), (b, b)] {
            g.add_edge(u, v);
        }
        assert_eq!(
            count_blocks(&g, 10, &budget()).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn diamonds() {
        assert_eq!(
            point_diamond_search(&two_loop_graph(), 12, &budget()).unwrap(),
            None
        );
        assert_eq!(
            point_diamond_search(&cycle(4), 12, &budget()).unwrap(),
            None
        );
        // two parallel routes a -> {x, y} -> b with equal labels
        let mut g = LabeledGraph::new();
        let a = g.add_vertex("a", 1);
        let x = g.add_vertex("x", 0);
        let y = g.add_vertex("y", 0);
        let b = g.add_vertex("b", 0);
        for (u, v) in [(a, x), (a, y), (x, b), (y, b), (b, a)] {
            g.add_edge(u, v);
        }
        let (p, q) = point_diamond_search(&g, 12, &budget()).unwrap().unwrap();
        assert_eq!(p, vec![a, x, b]);
        assert_eq!(q, vec![a, y, b]);
    }

    #[test]
    fn injectivity() {
        let c = cycle(4);
        let all = vec![true; 4];
        assert!(
            restriction_injective_upto(&c, &all, 9, &budget())
                .unwrap()
                .injective
        );
        // the 1-block code 0 -> 0, 1 -> 0 on the golden mean shift is far from injective
        let g = golden_mean().with_labels(vec![0, 0]);
        let r = restriction_injective_upto(&g, &[true, true], 5, &budget()).unwrap();
        assert!(!r.injective);
        let (w, p, q) = r.witness.unwrap();
        assert_eq!(w.len(), 5);
        assert_ne!(p[2], q[2]);
    }

    #[test]
    fn sft_languages_line_up() {
        let a = ForbiddenSft::binary(&["111"]).unwrap().to_vertex_shift();
        let b = ForbiddenSft::binary(&["111", "0111"])
            .unwrap()
            .to_vertex_shift();
        assert!(
            language_equal_upto(&a, &Comparand::Graph(&b), 25, &budget())
                .unwrap()
                .equal
        );
    }
}
