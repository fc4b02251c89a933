//! First-return lengths.
//!
//! Let `F_g` be the set of unmarked vertices at the end of a path that leaves
//! a marked vertex and then takes `g` steps through unmarked vertices.
//! `F_{g+1}` depends only on `F_g`, so once some frontier repeats, the whole
//! tail of the return set repeats with it. That repeat is an exact
//! certificate of the period and onset.

use std::collections::HashMap;

use crate::gapset::EventuallyPeriodicSet;
use crate::graph::{LabeledGraph, VertexId};
use crate::{Error, Result};

/// Default search bound: `2·|V|² + 2`.
pub fn default_bound(g: &LabeledGraph) -> usize {
    2 * g.len() * g.len() + 2
}

/// Gaps `s` such that some path `m u_1 … u_s m'` has `m, m'` marked and every
/// `u_i` unmarked.
pub fn return_gaps(
    g: &LabeledGraph,
    marked: &[bool],
    bound: usize,
) -> Result<EventuallyPeriodicSet> {
    let n = g.len();
    let words = n.div_ceil(64).max(1);
    let mut hits: Vec<bool> = Vec::new();

    let direct = (0..n).any(|u| marked[u] && g.successors(u).iter().any(|&v| marked[v]));
    hits.push(direct);

    let mut frontier = vec![0u64; words];
    for u in (0..n).filter(|&u| marked[u]) {
        for &v in g.successors(u) {
            if !marked[v] {
                frontier[v / 64] |= 1 << (v % 64);
            }
        }
    }
    let members = |f: &[u64]| -> Vec<VertexId> {
        (0..n).filter(|&v| f[v / 64] >> (v % 64) & 1 == 1).collect()
    };

    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    for gap in 1..=bound as u64 {
        if let Some(&first) = seen.get(&frontier) {
            let hits = hits;
            return Ok(EventuallyPeriodicSet::from_pattern(
                first,
                gap - first,
                |s| {
                    let idx = if s < gap {
                        s
                    } else {
                        first + (s - first) % (gap - first)
                    };
                    hits[idx as usize]
                },
            ));
        }
        seen.insert(frontier.clone(), gap);
        let cur = members(&frontier);
        hits.push(
            cur.iter()
                .any(|&u| g.successors(u).iter().any(|&v| marked[v])),
        );
        let mut next = vec![0u64; words];
        for &u in &cur {
            for &v in g.successors(u) {
                if !marked[v] {
                    next[v / 64] |= 1 << (v % 64);
                }
            }
        }
        frontier = next;
    }
    Err(Error::BoundTooSmall { bound })
}

/// Lengths of cycles `v → v` with no interior visit to `v`.
pub fn first_return_lengths(
    g: &LabeledGraph,
    v: VertexId,
    bound: usize,
) -> Result<EventuallyPeriodicSet> {
    let mut marked = vec![false; g.len()];
    marked[v] = true;
    Ok(return_gaps(g, &marked, bound)?.shifted(1))
}

/// Lexicographically least path `v u_1 … u_s v` with every `u_i` unmarked.
pub fn least_first_return(
    g: &LabeledGraph,
    marked: &[bool],
    v: VertexId,
    s: usize,
) -> Option<Vec<VertexId>> {
    // ok[l][u]: some path u → v with l edges and unmarked interior
    let mut ok = vec![vec![false; g.len()]; s + 1];
    ok[0][v] = true;
    for l in 1..=s {
        for u in (0..g.len()).filter(|&u| !marked[u]) {
            ok[l][u] = g.successors(u).iter().any(|&w| ok[l - 1][w]);
        }
    }
    let mut path = vec![v];
    let mut cur = v;
    for l in (0..=s).rev() {
        cur = *g.successors(cur).iter().find(|&&w| ok[l][w])?;
        path.push(cur);
    }
    Some(path)
}
