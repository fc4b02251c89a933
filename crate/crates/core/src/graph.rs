//! Directed graphs with labelled vertices.
//!
//! A [`LabeledGraph`] plays two roles at once: its bi-infinite vertex paths
//! form a 1-step shift of finite type, and its vertex labels define a 1-block
//! code on that shift.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::sft::Word;

pub type VertexId = usize;
pub type Symbol = u32;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct LabeledGraph {
    names: Vec<String>,
    labels: Vec<Symbol>,
    succ: Vec<Vec<VertexId>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<(String, Symbol)>,
    edges: Vec<(String, String)>,
}

impl From<LabeledGraph> for GraphRepr {
    fn from(g: LabeledGraph) -> Self {
        let edges = g
            .edges()
            .map(|(u, v)| (g.names[u].clone(), g.names[v].clone()))
            .collect();
        let vertices = g
            .names
            .iter()
            .cloned()
            .zip(g.labels.iter().copied())
            .collect();
        GraphRepr { vertices, edges }
    }
}

impl TryFrom<GraphRepr> for LabeledGraph {
    type Error = String;

    fn try_from(r: GraphRepr) -> Result<Self, String> {
        let mut g = LabeledGraph::new();
        let mut ids = HashMap::new();
        for (name, label) in r.vertices {
            if ids.contains_key(&name) {
                return Err(format!("duplicate vertex {name}"));
            }
            let id = g.add_vertex(name.clone(), label);
            ids.insert(name, id);
        }
        for (a, b) in r.edges {
            let (Some(&u), Some(&v)) = (ids.get(&a), ids.get(&b)) else {
                return Err(format!("edge {a} -> {b} uses an undeclared vertex"));
            };
            g.add_edge(u, v);
        }
        Ok(g)
    }
}

impl LabeledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, label: Symbol) -> VertexId {
        self.names.push(name.into());
        self.labels.push(label);
        self.succ.push(Vec::new());
        self.names.len() - 1
    }

    /// Adds `u -> v`. Returns false if the edge was already present.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        assert!(
            u < self.len() && v < self.len(),
            "edge endpoint out of range"
        );
        match self.succ[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.succ[u].insert(pos, v);
                true
            }
        }
    }

    /// Removes `u -> v`. Returns false if there was no such edge.
    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        match self.succ[u].binary_search(&v) {
            Ok(pos) => {
                self.succ[u].remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn label(&self, v: VertexId) -> Symbol {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn predecessors(&self) -> Vec<Vec<VertexId>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (u, v) in self.edges() {
            pred[v].push(u);
        }
        pred
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.labels.iter().copied().collect()
    }

    /// Same vertices and edges, new labels.
    pub fn with_labels(&self, labels: Vec<Symbol>) -> Self {
        assert_eq!(labels.len(), self.len());
        Self {
            names: self.names.clone(),
            labels,
            succ: self.succ.clone(),
        }
    }

    /// Subgraph induced by the vertices with `keep[v]`, plus the map from new
    /// ids to old ids.
    pub fn induced(&self, keep: &[bool]) -> (Self, Vec<VertexId>) {
        let old: Vec<VertexId> = (0..self.len()).filter(|&v| keep[v]).collect();
        let mut new_id = vec![usize::MAX; self.len()];
        let mut g = Self::new();
        for &v in &old {
            new_id[v] = g.add_vertex(self.names[v].clone(), self.labels[v]);
        }
        for &u in &old {
            for &v in &self.succ[u] {
                if keep[v] {
                    g.succ[new_id[u]].push(new_id[v]);
                }
            }
        }
        (g, old)
    }

    /// Repeatedly removes vertices with no incoming or no outgoing edge. The
    /// result presents the same vertex shift.
    pub fn trimmed(&self) -> (Self, Vec<VertexId>) {
        let n = self.len();
        let pred = self.predecessors();
        let mut alive = vec![true; n];
        let mut outdeg: Vec<usize> = self.succ.iter().map(Vec::len).collect();
        let mut indeg: Vec<usize> = pred.iter().map(Vec::len).collect();
        let mut stack: Vec<VertexId> = (0..n)
            .filter(|&v| outdeg[v] == 0 || indeg[v] == 0)
            .collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &w in &self.succ[v] {
                if alive[w] {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        stack.push(w);
                    }
                }
            }
            for &u in &pred[v] {
                if alive[u] {
                    outdeg[u] -= 1;
                    if outdeg[u] == 0 {
                        stack.push(u);
                    }
                }
            }
        }
        self.induced(&alive)
    }

    /// Vertices reachable from `sources` (including the sources).
    pub fn reachable_from(&self, sources: &[VertexId]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = Vec::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for &v in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// Tarjan's algorithm, iterative. Components come out in reverse topological
/// order; vertices inside a component are sorted.
pub fn strongly_connected_components(g: &LabeledGraph) -> Vec<Vec<VertexId>> {
    let n = g.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(VertexId, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&w) = g.successors(v).get(*next) {
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Strongly connected once stranded vertices are gone. The empty graph is
/// not irreducible.
pub fn is_irreducible(g: &LabeledGraph) -> bool {
    let (t, _) = g.trimmed();
    !t.is_empty() && strongly_connected_components(&t).len() == 1
}

/// Label words of all paths through `n` vertices.
pub fn enumerate_blocks(g: &LabeledGraph, n: usize) -> BTreeSet<Word> {
    assert!(n >= 1);
    let mut layer: HashSet<(Vec<Symbol>, VertexId)> =
        (0..g.len()).map(|v| (vec![g.label(v)], v)).collect();
    for _ in 1..n {
        let mut next = HashSet::new();
        for (w, u) in &layer {
            for &v in g.successors(*u) {
                let mut w2 = w.clone();
                w2.push(g.label(v));
                next.insert((w2, v));
            }
        }
        layer = next;
    }
    layer.into_iter().map(|(w, _)| Word(w)).collect()
}

/// All paths through `n` vertices, in lexicographic order of vertex ids.
pub fn paths(g: &LabeledGraph, n: usize) -> Vec<Vec<VertexId>> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(g: &LabeledGraph, n: usize, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &v in g.successors(last) {
            cur.push(v);
            rec(g, n, cur, out);
            cur.pop();
        }
    }
    for v in 0..g.len() {
        cur.push(v);
        rec(g, n, &mut cur, &mut out);
        cur.pop();
    }
    out
}

/// The `n`-th higher block presentation, together with the underlying path
/// of each new vertex. New vertices are named by joining the old names with
/// `.` and labelled by the first old label.
pub fn higher_block_with_paths(g: &LabeledGraph, n: usize) -> (LabeledGraph, Vec<Vec<VertexId>>) {
    let ps = paths(g, n);
    let mut h = LabeledGraph::new();
    let mut id: HashMap<&[VertexId], VertexId> = HashMap::new();
    for p in &ps {
        let name = p.iter().map(|&v| g.name(v)).collect::<Vec<_>>().join(".");
        let v = h.add_vertex(name, g.label(p[0]));
        id.insert(p.as_slice(), v);
    }
    let mut key = Vec::with_capacity(n);
    for p in &ps {
        let from = id[p.as_slice()];
        for &w in g.successors(p[n - 1]) {
            key.clear();
            key.extend_from_slice(&p[1..]);
            key.push(w);
            h.add_edge(from, id[key.as_slice()]);
        }
    }
    (h, ps)
}

pub fn higher_block(g: &LabeledGraph, n: usize) -> LabeledGraph {
    higher_block_with_paths(g, n).0
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn golden_mean() -> LabeledGraph {
        let mut g = LabeledGraph::new();
        let a = g.add_vertex("0", 0);
        let b = g.add_vertex("1", 1);
        g.add_edge(a, a);
        g.add_edge(a, b);
        g.add_edge(b, a);
        g
    }

    pub fn full_two_shift() -> LabeledGraph {
        let mut g = LabeledGraph::new();
        let a = g.add_vertex("0", 0);
        let b = g.add_vertex("1", 1);
        for (u, v) in [(a, a), (a, b), (b, a), (b, b)] {
            g.add_edge(u, v);
        }
        g
    }

    pub fn cycle(len: usize) -> LabeledGraph {
        let mut g = LabeledGraph::new();
        for i in 0..len {
            g.add_vertex(format!("v{i}"), u32::from(i == 0));
        }
        for i in 0..len {
            g.add_edge(i, (i + 1) % len);
        }
        g
    }

    /// B -> V1 -> V2 with V1 -> B and V2 -> V1; B is the only vertex labelled 1.
    pub fn two_loop_graph() -> LabeledGraph {
        let mut g = LabeledGraph::new();
        let b = g.add_vertex("B", 1);
        let v1 = g.add_vertex("V1", 0);
        let v2 = g.add_vertex("V2", 0);
        g.add_edge(b, v1);
        g.add_edge(v1, b);
        g.add_edge(v1, v2);
        g.add_edge(v2, v1);
        g
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn words(ws: &[&str]) -> BTreeSet<Word> {
        ws.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&golden_mean()));
        assert!(is_irreducible(&two_loop_graph()));
        let mut g = LabeledGraph::new();
        let a = g.add_vertex("a", 0);
        let b = g.add_vertex("b", 0);
        g.add_edge(a, a);
        g.add_edge(b, b);
        assert!(!is_irreducible(&g));
        // a stranded tail does not matter
        let mut g = cycle(3);
        let t = g.add_vertex("tail", 0);
        g.add_edge(t, 0);
        assert!(is_irreducible(&g));
    }

    #[test]
    fn blocks_of_small_graphs() {
        assert_eq!(
            enumerate_blocks(&golden_mean(), 2),
            words(&["00", "01", "10"])
        );
        assert_eq!(enumerate_blocks(&golden_mean(), 4).len(), 8);
        assert_eq!(enumerate_blocks(&full_two_shift(), 3).len(), 8);
    }

    #[test]
    fn higher_block_sizes() {
        let g = golden_mean();
        let h1 = higher_block(&g, 1);
        assert_eq!(h1.len(), 2);
        assert_eq!(h1.edge_count(), 3);
        let h2 = higher_block(&g, 2);
        assert_eq!(h2.len(), 3);
        let names: BTreeSet<&str> = h2.names().iter().map(String::as_str).collect();
        assert_eq!(names, ["0.0", "0.1", "1.0"].into_iter().collect());
        let db = higher_block(&full_two_shift(), 2);
        assert_eq!((db.len(), db.edge_count()), (4, 8));
    }

    #[test]
    fn higher_block_language_counts() {
        let g = golden_mean();
        for n in 1..=4 {
            let h = higher_block(&g, n);
            for m in 1..=8 {
                assert_eq!(enumerate_blocks(&h, m), enumerate_blocks(&g, m));
                assert_eq!(paths(&h, m).len(), paths(&g, m + n - 1).len());
            }
        }
    }

    #[test]
    fn tarjan_on_two_loop_graph() {
        let g = two_loop_graph();
        assert_eq!(strongly_connected_components(&g), vec![vec![0, 1, 2]]);
        let mut g = LabeledGraph::new();
        let a = g.add_vertex("a", 0);
        let b = g.add_vertex("b", 0);
        g.add_edge(a, b);
        let mut comps = strongly_connected_components(&g);
        comps.sort();
        assert_eq!(comps, vec![vec![0], vec![1]]);
    }

    #[test]
    fn serde_round_trip() {
        let g = two_loop_graph();
        let js = serde_json::to_string(&g).unwrap();
        let back: LabeledGraph = serde_json::from_str(&js).unwrap();
        assert_eq!(g, back);
    }
}
