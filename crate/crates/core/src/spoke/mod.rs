//! Spoke graphs and the finite-to-one (P2) construction.
//!
//! A spoke graph has a central vertex `B` and spokes that meet only at `B`.
//! A regular spoke is a path `B → B′ → B` through `m + 1` edges plus a cycle
//! of length `d` at `B′`; a degenerate spoke is a single cycle of length `d`
//! at `B`. Spokes are numbered from 1 in input order.

mod two_cycle;

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::factor::{
    degree, has_graph_diamond, image_gap_set_default, window_determines_center, MarkedGraph,
};
use crate::gapset::EventuallyPeriodicSet;
use crate::graph::{LabeledGraph, Symbol, VertexId};
use crate::returns::least_first_return;
use crate::{Error, Result};

pub use two_cycle::{construct_h_two_cycle, TwoCycleGraph, TwoCycleH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spoke {
    Regular { m: u64, d: u64 },
    Degenerate { d: u64 },
}

impl Spoke {
    pub fn d(&self) -> u64 {
        match *self {
            Spoke::Regular { d, .. } | Spoke::Degenerate { d } => d,
        }
    }

    /// Gaps produced by this spoke alone.
    pub fn gaps(&self) -> EventuallyPeriodicSet {
        match *self {
            Spoke::Regular { m, d } => {
                EventuallyPeriodicSet::new(m, [], d, [m % d]).expect("valid")
            }
            Spoke::Degenerate { d } => EventuallyPeriodicSet::finite([d - 1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpokeGraph {
    spokes: Vec<Spoke>,
}

impl SpokeGraph {
    pub fn new(spokes: Vec<Spoke>) -> Result<Self> {
        if spokes.is_empty() {
            return Err(Error::InvalidSpoke(
                "a spoke graph needs at least one spoke".into(),
            ));
        }
        for (i, s) in spokes.iter().enumerate() {
            match *s {
                Spoke::Regular { m, d } if m == 0 || d == 0 => {
                    return Err(Error::InvalidSpoke(format!(
                        "spoke {}: m and d must be positive",
                        i + 1
                    )))
                }
                Spoke::Degenerate { d: 0 } => {
                    return Err(Error::InvalidSpoke(format!(
                        "spoke {}: d must be positive",
                        i + 1
                    )))
                }
                _ => {}
            }
        }
        let loops = spokes
            .iter()
            .filter(|s| **s == Spoke::Degenerate { d: 1 })
            .count();
        if loops > 1 {
            return Err(Error::InvalidSpoke(
                "at most one degenerate spoke of length 1 (a self-loop at B)".into(),
            ));
        }
        Ok(Self { spokes })
    }

    pub fn spokes(&self) -> &[Spoke] {
        &self.spokes
    }

    /// 1-based spoke index to spoke.
    pub fn spoke(&self, i: usize) -> Spoke {
        self.spokes[i - 1]
    }

    pub fn regular_indices(&self) -> Vec<usize> {
        (1..=self.spokes.len())
            .filter(|&i| matches!(self.spoke(i), Spoke::Regular { .. }))
            .collect()
    }

    pub fn degenerate_indices(&self) -> Vec<usize> {
        (1..=self.spokes.len())
            .filter(|&i| matches!(self.spoke(i), Spoke::Degenerate { .. }))
            .collect()
    }

    /// The spoke graph on the spokes in `keep`, renumbered.
    pub fn sub(&self, keep: &BTreeSet<usize>) -> Result<Self> {
        Self::new(keep.iter().map(|&i| self.spoke(i)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpokeInvariants {
    /// `lcm` of the regular cycle lengths, 1 when there are none.
    pub big_d: u64,
    pub a: BTreeMap<usize, u64>,
    pub k: BTreeMap<usize, BTreeSet<u64>>,
    pub m: BTreeMap<usize, u64>,
    pub s: EventuallyPeriodicSet,
    pub per_spoke: BTreeMap<usize, EventuallyPeriodicSet>,
}

pub fn spoke_invariants(sg: &SpokeGraph) -> SpokeInvariants {
    let t1 = sg.regular_indices();
    let big_d = t1.iter().fold(1u64, |acc, &i| acc.lcm(&sg.spoke(i).d()));
    let mut a = BTreeMap::new();
    let mut k = BTreeMap::new();
    let mut m = BTreeMap::new();
    for &i in &t1 {
        let Spoke::Regular { m: mi, d } = sg.spoke(i) else {
            unreachable!()
        };
        let ai = mi % d;
        a.insert(i, ai);
        m.insert(i, mi);
        k.insert(i, (0..big_d / d).map(|j| (ai + j * d) % big_d).collect());
    }
    let per_spoke: BTreeMap<usize, EventuallyPeriodicSet> = (1..=sg.spokes().len())
        .map(|i| (i, sg.spoke(i).gaps()))
        .collect();
    let s = per_spoke
        .values()
        .fold(EventuallyPeriodicSet::empty(), |acc, x| acc.union(x));
    SpokeInvariants {
        big_d,
        a,
        k,
        m,
        s,
        per_spoke,
    }
}

/// Vertex names: `B`; for spoke `i`, `g{i}_{j}` on the way out, `b{i}` for
/// `B′`, `h{i}_{j}` on the way back and `c{i}_{j}` around the cycle. The
/// outgoing path takes `⌈(m+1)/2⌉` of the `m + 1` path edges.
pub fn realize_graph(sg: &SpokeGraph) -> MarkedGraph {
    let mut g = LabeledGraph::new();
    let b = g.add_vertex("B", 1);
    for (idx, s) in sg.spokes().iter().enumerate() {
        let i = idx + 1;
        match *s {
            Spoke::Regular { m, d } => {
                let out = (m + 2) / 2;
                let back = m + 1 - out;
                let mut prev = b;
                for j in 1..out {
                    let v = g.add_vertex(format!("g{i}_{j}"), 0);
                    g.add_edge(prev, v);
                    prev = v;
                }
                let bp = g.add_vertex(format!("b{i}"), 0);
                g.add_edge(prev, bp);
                prev = bp;
                for j in 1..back {
                    let v = g.add_vertex(format!("h{i}_{j}"), 0);
                    g.add_edge(prev, v);
                    prev = v;
                }
                g.add_edge(prev, b);
                add_cycle(&mut g, bp, d, |j| format!("c{i}_{j}"));
            }
            Spoke::Degenerate { d } => add_cycle(&mut g, b, d, |j| format!("c{i}_{j}")),
        }
    }
    MarkedGraph::new(g).expect("labels are 0/1")
}

fn add_cycle(g: &mut LabeledGraph, at: VertexId, len: u64, name: impl Fn(u64) -> String) {
    let mut prev = at;
    for j in 1..len {
        let v = g.add_vertex(name(j), 0);
        g.add_edge(prev, v);
        prev = v;
    }
    g.add_edge(prev, at);
}

/// Above this many distinct `K_i` the subset search is refused.
pub const MAX_DISTINCT_K: usize = 24;

/// A set `W` of regular spokes whose `K_i` are pairwise disjoint and cover
/// every `K_i`. Least cardinality first, then lexicographic on sorted
/// indices. Equal `K_i` are represented by their least index.
pub fn find_w(inv: &SpokeInvariants) -> Result<Option<BTreeSet<usize>>> {
    let mut reps: Vec<(usize, &BTreeSet<u64>)> = Vec::new();
    for (&i, ki) in &inv.k {
        if !reps.iter().any(|(_, r)| *r == ki) {
            reps.push((i, ki));
        }
    }
    if reps.len() > MAX_DISTINCT_K {
        return Err(Error::TooLarge(format!(
            "{} distinct residue sets",
            reps.len()
        )));
    }
    let target: BTreeSet<u64> = inv.k.values().flatten().copied().collect();
    if target.is_empty() {
        return Ok(Some(BTreeSet::new()));
    }
    let n = reps.len();
    for size in 1..=n {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let mut seen = BTreeSet::new();
            let disjoint = comb
                .iter()
                .all(|&c| reps[c].1.iter().all(|x| seen.insert(*x)));
            if disjoint && seen == target {
                return Ok(Some(comb.iter().map(|&c| reps[c].0).collect()));
            }
            // next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&p| comb[p] < n - size + p) else {
                break;
            };
            comb[pos] += 1;
            for q in pos + 1..size {
                comb[q] = comb[q - 1] + 1;
            }
        }
    }
    Ok(None)
}

pub fn validate_w(inv: &SpokeInvariants, w: &BTreeSet<usize>) -> bool {
    if !w.iter().all(|i| inv.k.contains_key(i)) {
        return false;
    }
    let mut seen = BTreeSet::new();
    let disjoint = w.iter().all(|i| inv.k[i].iter().all(|x| seen.insert(*x)));
    let target: BTreeSet<u64> = inv.k.values().flatten().copied().collect();
    disjoint && seen == target
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructedH {
    pub g: MarkedGraph,
    pub h: MarkedGraph,
    /// `H` vertex to `G` vertex.
    pub psi: Vec<VertexId>,
    /// Gap `r` to the `H` vertices of the added cycle `C(r)` (interior only).
    pub added_cycles: BTreeMap<u64, Vec<String>>,
    /// Degenerate spokes of `G` added for gaps no regular spoke produces.
    pub added_degenerate: Vec<usize>,
}

/// Builds `H` from the spokes in `W`, one fresh cycle for each gap those
/// spokes miss, and one degenerate spoke for each remaining degenerate gap.
pub fn construct_h(sg: &SpokeGraph, w: &BTreeSet<usize>) -> Result<ConstructedH> {
    let inv = spoke_invariants(sg);
    if !validate_w(&inv, w) {
        return Err(Error::InvalidW(format!("{w:?}")));
    }
    let g = realize_graph(sg);
    let gg = g.graph();
    let s_of = |idx: &mut dyn Iterator<Item = usize>| {
        idx.fold(EventuallyPeriodicSet::empty(), |acc, i| {
            acc.union(&inv.per_spoke[&i])
        })
    };
    let s0 = s_of(&mut w.iter().copied());
    let s1 = s_of(&mut sg.regular_indices().into_iter());
    let missing = s1.difference(&s0);
    let Some(max_missing) = missing.max().or(missing.is_empty().then_some(0)) else {
        return Err(Error::Inconsistent(
            "infinitely many gaps missing from W".into(),
        ));
    };
    let missing: Vec<u64> = missing.elements_upto(max_missing);

    // step (A) plus the degenerate spokes of step (C), as an induced subgraph
    let mut added_degenerate = Vec::new();
    let mut taken = BTreeSet::new();
    for i in sg.degenerate_indices() {
        let s = sg.spoke(i).d() - 1;
        if !s1.contains(s) && taken.insert(s) {
            added_degenerate.push(i);
        }
    }
    let owner = spoke_owner(sg, gg);
    let keep: Vec<bool> = (0..gg.len())
        .map(|v| match owner[v] {
            None => true,
            Some(i) => w.contains(&i) || added_degenerate.contains(&i),
        })
        .collect();
    let (mut h, old) = gg.induced(&keep);
    let mut psi = old;

    // step (B)
    let b = 0;
    let mut added_cycles = BTreeMap::new();
    for &r in &missing {
        let target = least_first_return(gg, &g.marked(), b, r as usize)
            .ok_or_else(|| Error::Inconsistent(format!("gap {r} has no first return in G")))?;
        let mut prev = b;
        let mut names = Vec::new();
        for (j, &tv) in target[1..target.len() - 1].iter().enumerate() {
            let name = format!("r{r}_{}", j + 1);
            let v = h.add_vertex(name.clone(), 0);
            psi.push(tv);
            h.add_edge(prev, v);
            prev = v;
            names.push(name);
        }
        h.add_edge(prev, b);
        added_cycles.insert(r, names);
    }
    Ok(ConstructedH {
        g,
        h: MarkedGraph::new(h)?,
        psi,
        added_cycles,
        added_degenerate,
    })
}

/// Spoke index of each vertex of a realized graph; `None` for `B`.
fn spoke_owner(sg: &SpokeGraph, g: &LabeledGraph) -> Vec<Option<usize>> {
    let _ = sg;
    (0..g.len())
        .map(|v| {
            let name = g.name(v);
            if name == "B" {
                return None;
            }
            let digits: String = name[1..]
                .chars()
                .take_while(|c| c.is_ascii_digit())
                .collect();
            Some(
                digits
                    .parse()
                    .expect("realized names carry the spoke index"),
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub no_diamond: bool,
    pub degree: Option<usize>,
    pub gap_equality: bool,
    pub psi_edges_valid: bool,
    pub psi_labels_valid: bool,
    pub psi_injective: bool,
    pub psi_window: usize,
}

impl Certificates {
    pub fn all_pass(&self) -> bool {
        self.no_diamond
            && self.degree == Some(1)
            && self.gap_equality
            && self.psi_edges_valid
            && self.psi_labels_valid
            && self.psi_injective
    }
}

/// Machine checks for a candidate `(H, ψ)` against a target gap set.
pub fn certify(
    g: &MarkedGraph,
    h: &MarkedGraph,
    psi: &[VertexId],
    s: &EventuallyPeriodicSet,
) -> Result<Certificates> {
    let no_diamond = !has_graph_diamond(h);
    let degree = if no_diamond {
        Some(degree(h)?.degree)
    } else {
        None
    };
    let gap_equality = image_gap_set_default(h)? == *s;
    let hg = h.graph();
    let psi_edges_valid =
        psi.len() == hg.len() && hg.edges().all(|(a, b)| g.graph().has_edge(psi[a], psi[b]));
    let psi_labels_valid =
        psi_edges_valid && (0..hg.len()).all(|v| hg.label(v) == g.graph().label(psi[v]));
    let psi_window = 2 * hg.len() + 1;
    let psi_injective = psi_edges_valid
        && window_determines_center(
            &hg.with_labels(psi.iter().map(|&v| v as Symbol).collect()),
            psi_window,
        );
    Ok(Certificates {
        no_diamond,
        degree,
        gap_equality,
        psi_edges_valid,
        psi_labels_valid,
        psi_injective,
        psi_window,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P2Report {
    pub holds: bool,
    pub invariants: SpokeInvariants,
    pub w: Option<BTreeSet<usize>>,
    pub h: Option<ConstructedH>,
    pub certificates: Option<Certificates>,
}

pub fn check_p2(sg: &SpokeGraph) -> Result<P2Report> {
    let invariants = spoke_invariants(sg);
    let w = find_w(&invariants)?;
    let (h, certificates) = match &w {
        Some(w) => {
            let h = construct_h(sg, w)?;
            let c = certify(&h.g, &h.h, &h.psi, &invariants.s)?;
            (Some(h), Some(c))
        }
        None => (None, None),
    };
    Ok(P2Report {
        holds: w.is_some(),
        invariants,
        w,
        h,
        certificates,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpokePart {
    Absent,
    PathOnly,
    Full,
}

/// A choice of surviving spokes under which the restricted code is
/// finite-to-one and onto.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeHit {
    pub parts: Vec<SpokePart>,
}

/// Searches the irreducible sub-SFTs through `B` of a realized spoke graph
/// for one on which the code is finite-to-one and onto. Up to trimming,
/// every vertex subset leaves each spoke absent, as its bare path, or whole.
pub fn weak_converse_probe(sg: &SpokeGraph) -> Result<Option<ProbeHit>> {
    let s = spoke_invariants(sg).s;
    let n = sg.spokes().len();
    let options = |sp: Spoke| match sp {
        Spoke::Regular { .. } => vec![SpokePart::Absent, SpokePart::PathOnly, SpokePart::Full],
        Spoke::Degenerate { .. } => vec![SpokePart::Absent, SpokePart::Full],
    };
    let mut parts = vec![SpokePart::Absent; n];
    fn rec(
        sg: &SpokeGraph,
        s: &EventuallyPeriodicSet,
        i: usize,
        parts: &mut Vec<SpokePart>,
        options: &dyn Fn(Spoke) -> Vec<SpokePart>,
    ) -> Result<Option<ProbeHit>> {
        if i == parts.len() {
            let mut gaps = EventuallyPeriodicSet::empty();
            for (j, p) in parts.iter().enumerate() {
                gaps = match (sg.spokes()[j], p) {
                    (_, SpokePart::Absent) => gaps,
                    (Spoke::Regular { m, .. }, SpokePart::PathOnly) => {
                        gaps.union(&EventuallyPeriodicSet::finite([m]))
                    }
                    (sp, _) => gaps.union(&sp.gaps()),
                };
            }
            if gaps != *s {
                return Ok(None);
            }
            let mg = realize_parts(sg, parts);
            let gap_check = image_gap_set_default(&mg)?;
            debug_assert_eq!(gap_check, gaps);
            return Ok((!has_graph_diamond(&mg)).then(|| ProbeHit {
                parts: parts.clone(),
            }));
        }
        for p in options(sg.spokes()[i]) {
            parts[i] = p;
            if let Some(hit) = rec(sg, s, i + 1, parts, options)? {
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }
    rec(sg, &s, 0, &mut parts, &options)
}

/// The trimmed subgraph of the realized graph with the given spoke parts.
fn realize_parts(sg: &SpokeGraph, parts: &[SpokePart]) -> MarkedGraph {
    let g = realize_graph(sg);
    let gg = g.graph();
    let owner = spoke_owner(sg, gg);
    let keep: Vec<bool> = (0..gg.len())
        .map(|v| match owner[v] {
            None => true,
            Some(i) => match parts[i - 1] {
                SpokePart::Absent => false,
                SpokePart::PathOnly => !gg.name(v).starts_with('c'),
                SpokePart::Full => true,
            },
        })
        .collect();
    let (sub, _) = gg.induced(&keep);
    MarkedGraph::new(sub.trimmed().0).expect("labels are 0/1")
}
