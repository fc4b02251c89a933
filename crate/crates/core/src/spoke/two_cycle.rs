//! One spoke with two cycles `C₁`, `C₂` at `B′`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::factor::MarkedGraph;
use crate::gapset::EventuallyPeriodicSet;
use crate::graph::{LabeledGraph, VertexId};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCycleGraph {
    pub m: u64,
    pub d1: u64,
    pub d2: u64,
}

impl TwoCycleGraph {
    pub fn new(m: u64, d1: u64, d2: u64) -> Result<Self> {
        if m == 0 || d1 == 0 || d2 == 0 {
            return Err(Error::InvalidSpoke("m, d1 and d2 must be positive".into()));
        }
        if d1 == 1 && d2 == 1 {
            return Err(Error::InvalidSpoke(
                "two distinct self-loops at one vertex".into(),
            ));
        }
        Ok(Self { m, d1, d2 })
    }

    /// `lcm(d1, d2) / d2`
    pub fn u(&self) -> u64 {
        self.d1.lcm(&self.d2) / self.d2
    }

    /// The unique `(x, y)` with `x·d1 + y·d2 = n`, `x >= 0`, `0 <= y < u`.
    pub fn unique_rep(&self, n: u64) -> Option<(u64, u64)> {
        (0..self.u()).find_map(|y| {
            let rest = n.checked_sub(y * self.d2)?;
            (rest % self.d1 == 0).then_some((rest / self.d1, y))
        })
    }

    /// `m + {x·d1 + y·d2}`
    pub fn gaps(&self) -> EventuallyPeriodicSet {
        let g = self.d1.gcd(&self.d2);
        // every multiple of g from d1·d2/g on is a combination
        let onset = self.m + self.d1 * self.d2 / g;
        EventuallyPeriodicSet::from_pattern(onset, g, |n| {
            n >= self.m && self.unique_rep(n - self.m).is_some()
        })
    }

    fn split(&self) -> (u64, u64) {
        let out = (self.m + 2) / 2;
        (out, self.m + 1 - out)
    }

    /// Vertices `B`, `g_j` (out), `Bp` (`B′`), `h_j` (back), `e_2..e_{d1}`
    /// around `C₁` and `f_2..f_{d2}` around `C₂`.
    pub fn realize(&self) -> MarkedGraph {
        let (out, back) = self.split();
        let mut g = LabeledGraph::new();
        let b = g.add_vertex("B", 1);
        let mut prev = b;
        for j in 1..out {
            let v = g.add_vertex(format!("g_{j}"), 0);
            g.add_edge(prev, v);
            prev = v;
        }
        let bp = g.add_vertex("Bp", 0);
        g.add_edge(prev, bp);
        prev = bp;
        for j in 1..back {
            let v = g.add_vertex(format!("h_{j}"), 0);
            g.add_edge(prev, v);
            prev = v;
        }
        g.add_edge(prev, b);
        for (x, d) in [('e', self.d1), ('f', self.d2)] {
            let mut prev = bp;
            for j in 2..=d {
                let v = g.add_vertex(format!("{x}_{j}"), 0);
                g.add_edge(prev, v);
                prev = v;
            }
            g.add_edge(prev, bp);
        }
        MarkedGraph::new(g).expect("labels are 0/1")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCycleH {
    pub g: MarkedGraph,
    pub h: MarkedGraph,
    pub psi: Vec<VertexId>,
    pub u: u64,
    /// Vertex names of the added path `β`, from `B` to `Bp`.
    pub beta: Vec<String>,
}

/// Drops one cycle and replaces it by a path `β` that unrolls it `u - 1`
/// times, with shortcuts back to `B′`. By default `C₂` is dropped; `swap`
/// drops `C₁` instead.
pub fn construct_h_two_cycle(tc: &TwoCycleGraph, swap: bool) -> TwoCycleH {
    let g = tc.realize();
    let gg = g.graph();
    let (x, d_drop, d_keep) = if swap {
        ('e', tc.d1, tc.d2)
    } else {
        ('f', tc.d2, tc.d1)
    };
    let u = d_drop.lcm(&d_keep) / d_drop;
    let keep: Vec<bool> = (0..gg.len()).map(|v| !gg.name(v).starts_with(x)).collect();
    let (mut h, mut psi) = gg.induced(&keep);
    let id = |name: &str| gg.vertex_by_name(name).expect("realized vertex");
    let hb = 0;
    let hbp = h.vertex_by_name("Bp").expect("kept");
    if d_drop == 1 {
        h.remove_edge(hbp, hbp);
    }
    let mut beta = vec!["B".to_owned()];
    if u > 1 {
        let (out, _) = tc.split();
        let mut prev = hb;
        let mut push = |h: &mut LabeledGraph,
                        psi: &mut Vec<VertexId>,
                        name: String,
                        target: VertexId,
                        prev: &mut VertexId| {
            let v = h.add_vertex(name.clone(), 0);
            psi.push(target);
            h.add_edge(*prev, v);
            *prev = v;
            beta.push(name);
            v
        };
        for j in 1..out {
            push(
                &mut h,
                &mut psi,
                format!("gp_{j}"),
                id(&format!("g_{j}")),
                &mut prev,
            );
        }
        for k in 1..u {
            for j in 1..=d_drop {
                let target = if j == 1 {
                    id("Bp")
                } else {
                    id(&format!("{x}_{j}"))
                };
                let v = push(&mut h, &mut psi, format!("{x}{j}^{k}"), target, &mut prev);
                if j == d_drop && k <= u.saturating_sub(2) {
                    h.add_edge(v, hbp);
                }
            }
        }
        h.add_edge(prev, hbp);
        beta.push("Bp".to_owned());
    }
    TwoCycleH {
        g: g.clone(),
        h: MarkedGraph::new(h).expect("labels are 0/1"),
        psi,
        u,
        beta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{
        has_graph_diamond, image_gap_set_default, preimage_count, window_determines_center,
    };
    use crate::gapshift::GapShift;
    use crate::graph::Symbol;
    use crate::oracle::{language_equal_upto, Comparand, OracleBudget};

    fn brute_reps(n: u64, d1: u64, d2: u64, u: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for s in 0..=n {
            for t in 0..u.min(n + 1) {
                if s * d1 + t * d2 == n {
                    out.push((s, t));
                }
            }
        }
        out
    }

    #[test]
    fn unique_rep_examples() {
        let tc = TwoCycleGraph::new(3, 4, 3).unwrap();
        assert_eq!(tc.u(), 4);
        assert_eq!(tc.unique_rep(10), Some((1, 2)));
        assert_eq!(tc.unique_rep(0), Some((0, 0)));
        assert_eq!(tc.unique_rep(5), None);
    }

    #[test]
    fn unique_rep_against_brute_force() {
        for d1 in 1..=12 {
            for d2 in 1..=12 {
                if d1 == 1 && d2 == 1 {
                    continue;
                }
                let tc = TwoCycleGraph::new(1, d1, d2).unwrap();
                for n in 0..=200 {
                    let reps = brute_reps(n, d1, d2, tc.u());
                    assert!(reps.len() <= 1);
                    let any = (0..=n / d1).any(|s| (n - s * d1) % d2 == 0);
                    assert_eq!(tc.unique_rep(n), reps.first().copied());
                    assert_eq!(any, reps.len() == 1, "n={n} d1={d1} d2={d2}");
                }
            }
        }
    }

    #[test]
    fn gap_set_matches_realization() {
        for (m, d1, d2) in [(3, 4, 3), (1, 2, 2), (2, 6, 4), (5, 1, 3), (1, 3, 1)] {
            let tc = TwoCycleGraph::new(m, d1, d2).unwrap();
            assert_eq!(
                image_gap_set_default(&tc.realize()).unwrap(),
                tc.gaps(),
                "{tc:?}"
            );
        }
    }

    #[test]
    fn instance_3_4_3() {
        let tc = TwoCycleGraph::new(3, 4, 3).unwrap();
        let c = construct_h_two_cycle(&tc, false);
        assert_eq!(c.u, 4);
        // |β| = |γ⁺| + (u - 1)·d2 edges
        assert_eq!(c.beta.len() - 1, 2 + 9);
        let y = GapShift::new(tc.gaps()).unwrap();
        for k in tc.gaps().elements_upto(40) {
            let mut w: Vec<Symbol> = vec![1];
            w.extend(std::iter::repeat_n(0, k as usize));
            w.push(1);
            assert_eq!(preimage_count(&c.h, &w), 1, "gap {k}");
        }
        assert!(!has_graph_diamond(&c.h));
        assert_eq!(image_gap_set_default(&c.h).unwrap(), tc.gaps());
        let cmp = language_equal_upto(
            c.h.graph(),
            &Comparand::Gap(&y),
            20,
            &OracleBudget::default(),
        )
        .unwrap();
        assert!(cmp.equal);
        let psi_g =
            c.h.graph()
                .with_labels(c.psi.iter().map(|&v| v as Symbol).collect());
        assert!(window_determines_center(&psi_g, 2 * c.h.len() + 1));
        for (a, b) in c.h.graph().edges() {
            assert!(c.g.graph().has_edge(c.psi[a], c.psi[b]));
        }
    }

    #[test]
    fn trivial_u() {
        let tc = TwoCycleGraph::new(1, 2, 2).unwrap();
        let c = construct_h_two_cycle(&tc, false);
        assert_eq!(c.u, 1);
        assert_eq!(c.h.graph().names(), &["B", "Bp", "e_2"]);
        // u = 1 exactly when d1 divides d2
        let tc = TwoCycleGraph::new(2, 3, 6).unwrap();
        let c = construct_h_two_cycle(&tc, false);
        assert_eq!(c.u, 1);
        assert_eq!(c.h.len(), tc.realize().len() - 5);
        assert_eq!(
            construct_h_two_cycle(&TwoCycleGraph::new(2, 6, 3).unwrap(), false).u,
            2
        );
    }

    #[test]
    fn swapped_construction() {
        for (m, d1, d2) in [(3, 4, 3), (2, 5, 2), (1, 1, 3), (4, 3, 1)] {
            let tc = TwoCycleGraph::new(m, d1, d2).unwrap();
            for swap in [false, true] {
                let c = construct_h_two_cycle(&tc, swap);
                assert!(!has_graph_diamond(&c.h), "{tc:?} {swap}");
                assert_eq!(image_gap_set_default(&c.h).unwrap(), tc.gaps());
                let psi_g =
                    c.h.graph()
                        .with_labels(c.psi.iter().map(|&v| v as Symbol).collect());
                assert!(window_determines_center(&psi_g, 2 * c.h.len() + 1));
            }
        }
    }

    #[test]
    fn rejects_double_self_loop() {
        assert!(TwoCycleGraph::new(1, 1, 1).is_err());
        assert!(TwoCycleGraph::new(0, 2, 1).is_err());
    }
}
