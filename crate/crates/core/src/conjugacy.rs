//! Sub-SFTs on which a code with an unambiguous symbol is a conjugacy.
//!
//! A conjugacy exists iff the gap set is finite (C1) or the domain has a
//! fixed point other than `D^∞` (C2). When it exists we build the inverse
//! `η: Y → X` explicitly: every gap `s` is filled with a first-return cycle
//! through the marker vertex, and long gaps are filled with `β⁺ τ^j β⁻`
//! where `τ` is the self-loop at the fixed point `A`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::factor::{
    image_gap_set_default, recode_to_marked, recode_unchecked, MarkedGraph, UnambiguousCode,
};
use crate::gapset::EventuallyPeriodicSet;
use crate::gapshift::GapShift;
use crate::graph::{LabeledGraph, Symbol, VertexId};
use crate::oracle::{language_equal_upto, Comparand, OracleBudget};
use crate::returns::{default_bound, least_first_return, return_gaps};
use crate::sft::{ForbiddenSft, Word};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// The gap set is finite.
    C1,
    /// An unmarked vertex with a self-loop.
    C2 { vertex: String },
}

/// A 1-step presentation of `Z = η(Y)`. Vertices are fresh copies; `psi`
/// sends each to the vertex of the recoded domain it stands for. Labels are
/// the output symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZGraph {
    pub graph: LabeledGraph,
    pub psi: Vec<VertexId>,
}

impl ZGraph {
    /// The same graph relabelled by `psi`, so that label words are points
    /// of the domain.
    pub fn psi_labeled(&self) -> LabeledGraph {
        self.graph
            .with_labels(self.psi.iter().map(|&v| v as Symbol).collect())
    }
}

/// The block map of `η` in table form. Vertex sequences are names in the
/// recoded domain graph and include both marker endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaSpec {
    pub base: String,
    pub cycles: BTreeMap<u64, Vec<String>>,
    pub beta_plus: Vec<String>,
    pub beta_minus: Vec<String>,
    pub tau: Option<String>,
    /// `|β⁺β⁻| - 1`; every gap from here on uses `β⁺ τ^(s-N) β⁻`.
    pub n: u64,
    pub radius: usize,
}

impl EtaSpec {
    /// Vertex sequence used for the gap `s`, or `None` if `s` is not a gap.
    pub fn path_for_gap(&self, s: u64) -> Option<Vec<String>> {
        if let Some(c) = self.cycles.get(&s) {
            return Some(c.clone());
        }
        let tau = self.tau.as_ref()?;
        if s < self.n {
            return None;
        }
        let mut out = self.beta_plus.clone();
        out.extend(std::iter::repeat_n(tau.clone(), (s - self.n) as usize));
        out.extend(self.beta_minus.iter().skip(1).cloned());
        Some(out)
    }

    /// `η(y)_0` from `y_{[-r, r]}`. `None` if the window is not a `Y`-word
    /// around its centre.
    pub fn center_image(&self, window: &[Symbol]) -> Option<&str> {
        let r = self.radius;
        if window.len() != 2 * r + 1 {
            return None;
        }
        if window[r] == 1 {
            return Some(&self.base);
        }
        let back = (1..=r).find(|&a| window[r - a] == 1);
        let fwd = (1..=r).find(|&b| window[r + b] == 1);
        let (p, q) = (
            self.beta_plus.len().saturating_sub(1),
            self.beta_minus.len().saturating_sub(1),
        );
        match (back, fwd) {
            (Some(a), Some(b)) => {
                let s = (a + b - 1) as u64;
                if let Some(c) = self.cycles.get(&s) {
                    return Some(&c[a]);
                }
                self.tau.as_ref()?;
                if s < self.n {
                    None
                } else if a <= p {
                    Some(&self.beta_plus[a])
                } else if b <= q {
                    Some(&self.beta_minus[q - b])
                } else {
                    self.tau.as_deref()
                }
            }
            (Some(a), None) if a <= p => self.tau.as_ref().map(|_| self.beta_plus[a].as_str()),
            (None, Some(b)) if b <= q => self.tau.as_ref().map(|_| self.beta_minus[q - b].as_str()),
            _ => self.tau.as_deref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub gaps: EventuallyPeriodicSet,
    pub marked: MarkedGraph,
    pub z: Option<ZGraph>,
    pub eta: Option<EtaSpec>,
}

pub fn check_p1(code: &UnambiguousCode) -> Result<P1Verdict> {
    check_p1_marked(&recode_to_marked(code)?)
}

/// P1 on an already recoded domain. C1 is reported in preference to C2;
/// among self-loops the least vertex id is used.
pub fn check_p1_marked(mg: &MarkedGraph) -> Result<P1Verdict> {
    let gaps = image_gap_set_default(mg)?;
    let g = mg.graph();
    let witness = if gaps.is_finite() {
        Some(Witness::C1)
    } else {
        (0..g.len())
            .find(|&v| !mg.is_marked(v) && g.has_edge(v, v))
            .map(|v| Witness::C2 {
                vertex: g.name(v).to_owned(),
            })
    };
    let (z, eta) = match &witness {
        Some(w) => {
            let (z, eta) = construct_eta(mg, &gaps, w)?;
            (Some(z), Some(eta))
        }
        None => (None, None),
    };
    Ok(P1Verdict {
        holds: witness.is_some(),
        witness,
        gaps,
        marked: mg.clone(),
        z,
        eta,
    })
}

/// Graph where the only marked vertex left is `v`.
fn isolate(mg: &MarkedGraph, v: VertexId) -> (LabeledGraph, Vec<VertexId>, VertexId) {
    let keep: Vec<bool> = (0..mg.len()).map(|u| u == v || !mg.is_marked(u)).collect();
    let (h, old) = mg.graph().induced(&keep);
    let nv = old.iter().position(|&o| o == v).expect("kept");
    (h, old, nv)
}

/// Shortest, then lexicographically least, path `from → to` whose interior
/// avoids the marked vertices.
fn least_path(mg: &MarkedGraph, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
    let g = mg.graph();
    let pred = g.predecessors();
    let mut dist = vec![usize::MAX; g.len()];
    dist[to] = 0;
    let mut queue = std::collections::VecDeque::from([to]);
    while let Some(u) = queue.pop_front() {
        for &p in &pred[u] {
            if dist[p] == usize::MAX && !mg.is_marked(p) {
                dist[p] = dist[u] + 1;
                queue.push_back(p);
            }
        }
    }
    let d = g
        .successors(from)
        .iter()
        .filter(|&&w| w == to || !mg.is_marked(w))
        .map(|&w| dist[w])
        .min()?;
    if d == usize::MAX {
        return None;
    }
    let mut path = vec![from];
    let mut cur = *g
        .successors(from)
        .iter()
        .find(|&&w| dist[w] == d && (w == to || !mg.is_marked(w)))?;
    path.push(cur);
    while cur != to {
        cur = *g
            .successors(cur)
            .iter()
            .find(|&&w| dist[w] != usize::MAX && dist[w] + 1 == dist[cur])?;
        path.push(cur);
    }
    Some(path)
}

/// Builds the presentation of `η(Y)` and the block map of `η`.
pub fn construct_eta(
    mg: &MarkedGraph,
    gaps: &EventuallyPeriodicSet,
    witness: &Witness,
) -> Result<(ZGraph, EtaSpec)> {
    let g = mg.graph();
    let a = match witness {
        Witness::C1 => None,
        Witness::C2 { vertex } => Some(
            g.vertex_by_name(vertex)
                .ok_or_else(|| Error::Invalid(format!("unknown vertex {vertex}")))?,
        ),
    };
    // the marker vertex must realise every gap as a first return to itself
    let mut chosen = None;
    for v in mg.marked_vertices() {
        let (h, _, nv) = isolate(mg, v);
        let mut m = vec![false; h.len()];
        m[nv] = true;
        if return_gaps(&h, &m, default_bound(&h))? != *gaps {
            continue;
        }
        let betas = match a {
            None => Some((Vec::new(), Vec::new())),
            Some(a) => least_path(mg, v, a).zip(least_path(mg, a, v)),
        };
        if let Some(b) = betas {
            chosen = Some((v, b));
            break;
        }
    }
    let (v, (bp, bm)) = chosen.ok_or_else(|| {
        Error::Inconsistent(
            "no single marker vertex realises every gap as a first return to itself".into(),
        )
    })?;

    let n = if a.is_some() {
        (bp.len() + bm.len() - 3) as u64
    } else {
        0
    };
    let small: Vec<u64> = match a {
        None => gaps.iter().collect(),
        Some(_) => gaps
            .elements_upto(n.saturating_sub(1))
            .into_iter()
            .filter(|&s| s < n)
            .collect(),
    };

    let mut z = LabeledGraph::new();
    let mut psi = Vec::new();
    let mut add = |z: &mut LabeledGraph, name: String, target: VertexId| {
        psi.push(target);
        z.add_vertex(name, Symbol::from(mg.is_marked(target)))
    };
    let base = add(&mut z, "D".into(), v);
    let mut cycles = BTreeMap::new();
    for &s in &small {
        let cyc = least_first_return(mg.graph(), &mg.marked(), v, s as usize)
            .ok_or_else(|| Error::Inconsistent(format!("gap {s} has no first-return cycle")))?;
        let mut prev = base;
        for (t, &u) in cyc[1..cyc.len() - 1].iter().enumerate() {
            let id = add(&mut z, format!("p{s}.{}", t + 1), u);
            z.add_edge(prev, id);
            prev = id;
        }
        z.add_edge(prev, base);
        cycles.insert(s, cyc.iter().map(|&u| g.name(u).to_owned()).collect());
    }
    if let Some(a) = a {
        let mut prev = base;
        for (t, &u) in bp[1..bp.len() - 1].iter().enumerate() {
            let id = add(&mut z, format!("u{}", t + 1), u);
            z.add_edge(prev, id);
            prev = id;
        }
        let za = add(&mut z, "A".into(), a);
        z.add_edge(prev, za);
        z.add_edge(za, za);
        prev = za;
        for (t, &u) in bm[1..bm.len() - 1].iter().enumerate() {
            let id = add(&mut z, format!("w{}", t + 1), u);
            z.add_edge(prev, id);
            prev = id;
        }
        z.add_edge(prev, base);
    }
    let names = |p: &[VertexId]| p.iter().map(|&u| g.name(u).to_owned()).collect::<Vec<_>>();
    let radius = match a {
        Some(_) => n as usize,
        None => gaps.max().unwrap_or(0) as usize,
    };
    let eta = EtaSpec {
        base: g.name(v).to_owned(),
        cycles,
        beta_plus: names(&bp),
        beta_minus: names(&bm),
        tau: a.map(|a| g.name(a).to_owned()),
        n,
        radius,
    };
    Ok((ZGraph { graph: z, psi }, eta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    F,
    ComplementF,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullShiftP1 {
    pub condition1: bool,
    pub which: Which,
    pub onto_f: bool,
    pub onto_complement_f: bool,
    pub gaps: EventuallyPeriodicSet,
    pub forbidden: Vec<Word>,
    pub complement: Vec<Word>,
    /// Shortest `Y`-word missing from `φ(X_F)`, if any.
    pub divergent_f: Option<Word>,
    pub divergent_complement_f: Option<Word>,
}

fn complement(w: &Word) -> Word {
    Word(w.symbols().iter().map(|&s| 1 - s).collect())
}

/// Whether `φ(X_G) = Y` on words up to length `l`; otherwise the first
/// divergent word.
fn onto_upto(
    forbidden: &[Word],
    d: &Word,
    y: &GapShift,
    l: usize,
    budget: &OracleBudget,
) -> Result<(bool, Option<Word>)> {
    let sft = ForbiddenSft::new(
        [0, 1].into_iter().collect(),
        forbidden.iter().cloned().collect(),
    )?;
    let mg = recode_unchecked(&UnambiguousCode::on_sft(sft, d.clone())?);
    let cmp = language_equal_upto(mg.graph(), &Comparand::Gap(y), l, budget)?;
    Ok((cmp.equal, cmp.divergent))
}

/// P1 on the full 2-shift with the two candidate sub-SFTs `X_F` and
/// `X_{F̄}`, `F` the standard forbidden set of the image.
pub fn full_shift_p1(d: &Word, l: usize, budget: &OracleBudget) -> Result<FullShiftP1> {
    if d.is_empty() || d.symbols().iter().any(|&s| s > 1) {
        return Err(Error::Invalid(format!(
            "marker {d} is not a nonempty binary word"
        )));
    }
    let ones = d.symbols().iter().filter(|&&s| s == 1).count();
    let condition1 = ones <= 1 || d.len() - ones <= 1;
    let code = UnambiguousCode::on_sft(ForbiddenSft::binary(&[])?, d.clone())?;
    let gaps = image_gap_set_default(&recode_to_marked(&code)?)?;
    let y = GapShift::new(gaps.clone())?;
    let mut f: Vec<Word> = y
        .standard_forbidden_set()
        .ok_or_else(|| Error::Inconsistent("full-shift image is not of finite type".into()))?
        .forbidden()
        .iter()
        .cloned()
        .collect();
    f.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let fbar: Vec<Word> = f.iter().map(complement).collect();
    let (onto_f, divergent_f) = onto_upto(&f, d, &y, l, budget)?;
    let (onto_c, divergent_c) = onto_upto(&fbar, d, &y, l, budget)?;
    let which = if onto_f {
        Which::F
    } else if onto_c {
        Which::ComplementF
    } else {
        Which::Neither
    };
    Ok(FullShiftP1 {
        condition1,
        which,
        onto_f,
        onto_complement_f: onto_c,
        gaps,
        forbidden: f,
        complement: fbar,
        divergent_f,
        divergent_complement_f: divergent_c,
    })
}
