//! Codes with an unambiguous symbol and their 1-block recodings.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::gapset::EventuallyPeriodicSet;
use crate::graph::{higher_block_with_paths, is_irreducible, LabeledGraph, Symbol, VertexId};
use crate::returns::{default_bound, return_gaps};
use crate::sft::{ForbiddenSft, Word};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Sft(ForbiddenSft),
    /// The vertex shift of a graph; marker symbols are vertex ids.
    Graph(LabeledGraph),
}

/// `φ(x)_i = 1` iff `x_{[i, i+k-1]} = D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnambiguousCode {
    domain: Domain,
    marker: Word,
}

impl UnambiguousCode {
    pub fn on_sft(sft: ForbiddenSft, marker: Word) -> Result<Self> {
        if marker.is_empty() {
            return Err(Error::Invalid("marker must be nonempty".into()));
        }
        if let Some(s) = marker
            .symbols()
            .iter()
            .find(|s| !sft.alphabet().contains(s))
        {
            return Err(Error::Invalid(format!(
                "marker symbol {s} is outside the alphabet"
            )));
        }
        Ok(Self {
            domain: Domain::Sft(sft),
            marker,
        })
    }

    pub fn on_graph(g: LabeledGraph, marker: &[VertexId]) -> Result<Self> {
        if marker.is_empty() {
            return Err(Error::Invalid("marker must be nonempty".into()));
        }
        if let Some(v) = marker.iter().find(|&&v| v >= g.len()) {
            return Err(Error::Invalid(format!(
                "marker vertex {v} is not in the graph"
            )));
        }
        let w = Word(marker.iter().map(|&v| v as Symbol).collect());
        Ok(Self {
            domain: Domain::Graph(g),
            marker: w,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn marker(&self) -> &Word {
        &self.marker
    }

    /// Human-readable marker: the word itself, or vertex names for graphs.
    pub fn marker_label(&self) -> String {
        match &self.domain {
            Domain::Sft(_) => self.marker.to_string(),
            Domain::Graph(g) => self
                .marker
                .symbols()
                .iter()
                .map(|&v| g.name(v as VertexId).to_owned())
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

/// A graph whose labels are the output symbols: 1 on marked vertices, 0
/// elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedGraph {
    graph: LabeledGraph,
}

impl MarkedGraph {
    pub fn new(graph: LabeledGraph) -> Result<Self> {
        if let Some(v) = (0..graph.len()).find(|&v| graph.label(v) > 1) {
            return Err(Error::Invalid(format!(
                "vertex {} has label {} (expected 0 or 1)",
                graph.name(v),
                graph.label(v)
            )));
        }
        Ok(Self { graph })
    }

    pub fn from_marked(graph: &LabeledGraph, marked: &[bool]) -> Self {
        Self {
            graph: graph.with_labels(marked.iter().map(|&m| Symbol::from(m)).collect()),
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn into_graph(self) -> LabeledGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn is_marked(&self, v: VertexId) -> bool {
        self.graph.label(v) == 1
    }

    pub fn marked(&self) -> Vec<bool> {
        (0..self.len()).map(|v| self.is_marked(v)).collect()
    }

    pub fn marked_vertices(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&v| self.is_marked(v)).collect()
    }
}

/// Marked graph of a code without the irreducibility and marker checks.
/// Used for restrictions to sub-SFTs that may be reducible.
pub(crate) fn recode_unchecked(code: &UnambiguousCode) -> MarkedGraph {
    let k = code.marker.len();
    match &code.domain {
        Domain::Sft(sft) => {
            let g = sft.window_graph(sft.memory().max(1).max(k));
            let marked: Vec<bool> = (0..g.len())
                .map(|v| {
                    g.name(v)
                        .parse::<Word>()
                        .map(|b| b.0.starts_with(code.marker.symbols()))
                        .unwrap_or(false)
                })
                .collect();
            MarkedGraph::from_marked(&g, &marked)
        }
        Domain::Graph(g) => {
            let (t, old) = g.trimmed();
            let (h, paths) = higher_block_with_paths(&t, k);
            let marked: Vec<bool> = paths
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(code.marker.symbols())
                        .all(|(&v, &m)| old[v] == m as VertexId)
                })
                .collect();
            MarkedGraph::from_marked(&h, &marked)
        }
    }
}

/// Recodes to a 1-step vertex shift where the occurrences of `D` are marked
/// vertices. SFT domains use the window `max(1, memory, k)`; graph domains
/// use the `k`-th higher block graph.
pub fn recode_to_marked(code: &UnambiguousCode) -> Result<MarkedGraph> {
    let mg = recode_unchecked(code);
    if !is_irreducible(mg.graph()) {
        return Err(Error::NotIrreducible);
    }
    if mg.marked_vertices().is_empty() {
        return Err(Error::MarkerNotAllowed(code.marker_label()));
    }
    Ok(mg)
}

/// Gap set of the image: `s ∈ S` iff some path from a marked vertex to a
/// marked vertex has exactly `s` unmarked interior vertices.
pub fn image_gap_set(mg: &MarkedGraph, bound: usize) -> Result<EventuallyPeriodicSet> {
    return_gaps(mg.graph(), &mg.marked(), bound)
}

pub fn image_gap_set_default(mg: &MarkedGraph) -> Result<EventuallyPeriodicSet> {
    image_gap_set(mg, default_bound(mg.graph()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullShiftFacts {
    pub purely_periodic: bool,
    pub k_minus_1_allowed: bool,
    pub tail_onset: u64,
}

/// What is known about the image gap set when the domain is the full
/// 2-shift: `k - 1` is a gap unless `D` is a proper power, and every
/// `j >= k` is a gap.
pub fn full_shift_image_facts(d: &Word) -> FullShiftFacts {
    let pp = d.is_purely_periodic();
    FullShiftFacts {
        purely_periodic: pp,
        k_minus_1_allowed: !pp,
        tail_onset: d.len() as u64,
    }
}

/// Two distinct paths with the same start, end and label word. Decided on
/// the label-synchronised pair graph.
pub fn has_diamond(g: &LabeledGraph) -> bool {
    let (g, _) = g.trimmed();
    let n = g.len();
    let idx = |x: VertexId, y: VertexId| x * n + y;
    let pred = g.predecessors();
    // forward closure from diagonal pairs, backward closure to them
    let mut fwd = vec![false; n * n];
    let mut stack = Vec::new();
    for u in 0..n {
        for &x in g.successors(u) {
            for &y in g.successors(u) {
                if g.label(x) == g.label(y) && !fwd[idx(x, y)] {
                    fwd[idx(x, y)] = true;
                    stack.push((x, y));
                }
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for &x2 in g.successors(x) {
            for &y2 in g.successors(y) {
                if g.label(x2) == g.label(y2) && !fwd[idx(x2, y2)] {
                    fwd[idx(x2, y2)] = true;
                    stack.push((x2, y2));
                }
            }
        }
    }
    let mut bwd = vec![false; n * n];
    for u in 0..n {
        for &x in &pred[u] {
            for &y in &pred[u] {
                if g.label(x) == g.label(y) && !bwd[idx(x, y)] {
                    bwd[idx(x, y)] = true;
                    stack.push((x, y));
                }
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for &x2 in &pred[x] {
            for &y2 in &pred[y] {
                if g.label(x2) == g.label(y2) && !bwd[idx(x2, y2)] {
                    bwd[idx(x2, y2)] = true;
                    stack.push((x2, y2));
                }
            }
        }
    }
    (0..n).any(|x| (0..n).any(|y| x != y && fwd[idx(x, y)] && bwd[idx(x, y)]))
}

pub fn has_graph_diamond(mg: &MarkedGraph) -> bool {
    has_diamond(mg.graph())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicBlock {
    pub coordinate: usize,
    pub vertices: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub magic_word: Word,
    pub magic_block: MagicBlock,
}

const DEGREE_STATE_LIMIT: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash)]
enum DegState {
    Init,
    /// Possible current vertices, no coordinate chosen yet.
    Open(Vec<VertexId>),
    /// (vertex at the chosen coordinate, current vertex) pairs.
    Fixed(Vec<(VertexId, VertexId)>),
}

fn fixed_value(r: &[(VertexId, VertexId)]) -> usize {
    r.iter().map(|p| p.0).collect::<BTreeSet<_>>().len()
}

/// Distinct vertices at coordinate `i` among the paths labelled `w`.
fn vertices_at(g: &LabeledGraph, w: &[Symbol], i: usize) -> BTreeSet<VertexId> {
    let mut rel: Vec<(VertexId, VertexId)> = (0..g.len())
        .filter(|&v| g.label(v) == w[0])
        .map(|v| (v, v))
        .collect();
    for (j, &c) in w.iter().enumerate().skip(1) {
        let mut next: HashSet<(VertexId, VertexId)> = HashSet::new();
        for &(x, y) in &rel {
            for &y2 in g.successors(y) {
                if g.label(y2) == c {
                    next.insert((if j <= i { y2 } else { x }, y2));
                }
            }
        }
        rel = next.into_iter().collect();
    }
    rel.into_iter().map(|p| p.0).collect()
}

/// Degree of a finite-to-one 1-block code: the least number of distinct
/// vertices seen at one coordinate among the preimages of a word. Returns
/// the shortest, then lexicographically least, word attaining it.
pub fn degree(mg: &MarkedGraph) -> Result<DegreeReport> {
    if has_graph_diamond(mg) {
        return Err(Error::NotFiniteToOne);
    }
    let (g, _) = mg.graph().trimmed();
    if g.is_empty() {
        return Err(Error::Invalid("empty shift".into()));
    }
    let alphabet = g.alphabet();
    let step_set = |p: &[VertexId], c: Symbol| -> Vec<VertexId> {
        let mut out: Vec<VertexId> = p
            .iter()
            .flat_map(|&u| g.successors(u).iter().copied())
            .filter(|&v| g.label(v) == c)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let mut seen: HashSet<DegState> = HashSet::new();
    let mut frontier: Vec<(Vec<Symbol>, DegState)> = vec![(Vec::new(), DegState::Init)];
    let mut best: Option<(usize, Vec<Symbol>)> = None;
    'outer: while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, s) in &frontier {
            for &c in &alphabet {
                let mut w2 = w.clone();
                w2.push(c);
                let succ: Vec<DegState> = match s {
                    DegState::Init | DegState::Open(_) => {
                        let p = match s {
                            DegState::Open(p) => step_set(p, c),
                            _ => (0..g.len()).filter(|&v| g.label(v) == c).collect(),
                        };
                        if p.is_empty() {
                            continue;
                        }
                        let diag = p.iter().map(|&v| (v, v)).collect();
                        vec![DegState::Fixed(diag), DegState::Open(p)]
                    }
                    DegState::Fixed(r) => {
                        let mut out: Vec<(VertexId, VertexId)> = r
                            .iter()
                            .flat_map(|&(x, y)| {
                                g.successors(y)
                                    .iter()
                                    .filter(|&&v| g.label(v) == c)
                                    .map(move |&v| (x, v))
                            })
                            .collect();
                        out.sort_unstable();
                        out.dedup();
                        if out.is_empty() {
                            continue;
                        }
                        vec![DegState::Fixed(out)]
                    }
                };
                for t in succ {
                    if let DegState::Fixed(r) = &t {
                        let v = fixed_value(r);
                        if best.as_ref().is_none_or(|(b, _)| v < *b) {
                            best = Some((v, w2.clone()));
                            if v == 1 {
                                break 'outer;
                            }
                        }
                    }
                    if seen.insert(t.clone()) {
                        next.push((w2.clone(), t));
                    }
                }
            }
        }
        if seen.len() > DEGREE_STATE_LIMIT {
            return Err(Error::TooLarge(format!(
                "degree search exceeded {DEGREE_STATE_LIMIT} states"
            )));
        }
        frontier = next;
    }
    let (deg, word) = best.expect("nonempty graph has a word");
    let (coordinate, verts) = (0..word.len())
        .map(|i| (i, vertices_at(&g, &word, i)))
        .find(|(_, vs)| vs.len() == deg)
        .expect("magic coordinate exists");
    Ok(DegreeReport {
        degree: deg,
        magic_word: Word(word),
        magic_block: MagicBlock {
            coordinate,
            vertices: verts.into_iter().map(|v| g.name(v).to_owned()).collect(),
        },
    })
}

/// Number of paths whose label word is `w` (saturating).
pub fn preimage_count(mg: &MarkedGraph, w: &[Symbol]) -> u128 {
    let g = mg.graph();
    let Some(&first) = w.first() else { return 0 };
    let mut cnt: Vec<u128> = (0..g.len())
        .map(|v| u128::from(g.label(v) == first))
        .collect();
    for &c in &w[1..] {
        let mut next = vec![0u128; g.len()];
        for u in 0..g.len() {
            if cnt[u] == 0 {
                continue;
            }
            for &v in g.successors(u) {
                if g.label(v) == c {
                    next[v] = next[v].saturating_add(cnt[u]);
                }
            }
        }
        cnt = next;
    }
    cnt.into_iter().fold(0u128, u128::saturating_add)
}

/// Whether every pair of equal-label paths through `l` vertices agrees at
/// coordinate `l / 2`. Exact, via layered reachability in the pair graph.
pub fn window_determines_center(g: &LabeledGraph, l: usize) -> bool {
    assert!(l >= 1);
    let (g, _) = g.trimmed();
    let n = g.len();
    let pred = g.predecessors();
    let idx = |x: VertexId, y: VertexId| x * n + y;
    let start: Vec<bool> = (0..n * n)
        .map(|i| g.label(i / n) == g.label(i % n))
        .collect();
    let c = l / 2;
    // pairs ending a synchronised path through c + 1 vertices
    let mut back = start.clone();
    for _ in 0..c {
        let mut next = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                if back[idx(x, y)] {
                    for &x2 in g.successors(x) {
                        for &y2 in g.successors(y) {
                            if g.label(x2) == g.label(y2) {
                                next[idx(x2, y2)] = true;
                            }
                        }
                    }
                }
            }
        }
        back = next;
    }
    // pairs starting a synchronised path through l - c vertices
    let mut fwd = start;
    for _ in 0..(l - 1 - c) {
        let mut next = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                if fwd[idx(x, y)] {
                    for &x2 in &pred[x] {
                        for &y2 in &pred[y] {
                            if g.label(x2) == g.label(y2) {
                                next[idx(x2, y2)] = true;
                            }
                        }
                    }
                }
            }
        }
        fwd = next;
    }
    !(0..n).any(|x| (0..n).any(|y| x != y && back[idx(x, y)] && fwd[idx(x, y)]))
}
