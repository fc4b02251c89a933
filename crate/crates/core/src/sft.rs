//! Words and shifts of finite type given by forbidden lists.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::{LabeledGraph, Symbol};
use crate::{Error, Result};

/// A finite word. Displays as a digit string when every symbol is below 10,
/// otherwise as comma separated integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// `1 0^gap 1`
    pub fn gap_block(gap: usize) -> Self {
        let mut w = vec![1];
        w.extend(std::iter::repeat_n(0, gap));
        w.push(1);
        Word(w)
    }

    pub fn contains_factor(&self, f: &[Symbol]) -> bool {
        !f.is_empty() && self.0.windows(f.len()).any(|w| w == f)
    }

    /// True when `self = u^l` for some word `u` and `l >= 2`.
    pub fn is_purely_periodic(&self) -> bool {
        let k = self.len();
        (1..k).any(|p| k.is_multiple_of(p) && (p..k).all(|i| self.0[i] == self.0[i - p]))
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse {
            line: 1,
            msg: format!("bad word {s:?}"),
        };
        if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<Symbol>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenSft {
    alphabet: BTreeSet<Symbol>,
    forbidden: BTreeSet<Word>,
}

impl ForbiddenSft {
    pub fn new(alphabet: BTreeSet<Symbol>, forbidden: BTreeSet<Word>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Invalid("empty alphabet".into()));
        }
        for w in &forbidden {
            if w.is_empty() {
                return Err(Error::Invalid("forbidden words must be nonempty".into()));
            }
            if let Some(s) = w.symbols().iter().find(|s| !alphabet.contains(s)) {
                return Err(Error::Invalid(format!(
                    "symbol {s} of {w} is not in the alphabet"
                )));
            }
        }
        Ok(Self {
            alphabet,
            forbidden,
        })
    }

    /// Binary alphabet with forbidden words given as digit strings.
    pub fn binary(forbidden: &[&str]) -> Result<Self> {
        let words = forbidden
            .iter()
            .map(|w| w.parse())
            .collect::<Result<BTreeSet<Word>>>()?;
        Self::new([0, 1].into_iter().collect(), words)
    }

    pub fn full_shift(alphabet: BTreeSet<Symbol>) -> Result<Self> {
        Self::new(alphabet, BTreeSet::new())
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &BTreeSet<Word> {
        &self.forbidden
    }

    /// Longest forbidden word minus one; zero when nothing is forbidden.
    pub fn memory(&self) -> usize {
        self.forbidden
            .iter()
            .map(Word::len)
            .max()
            .map_or(0, |l| l - 1)
    }

    fn has_forbidden_suffix(&self, w: &[Symbol]) -> bool {
        self.forbidden.iter().any(|f| w.ends_with(f.symbols()))
    }

    /// No forbidden word occurs in `w`.
    pub fn avoids(&self, w: &[Symbol]) -> bool {
        self.forbidden
            .iter()
            .all(|f| !Word(w.to_vec()).contains_factor(f.symbols()))
    }

    /// Words of length `n` with no forbidden factor, in lexicographic order.
    /// Not every one of them need extend to a point of the shift.
    pub fn clean_blocks(&self, n: usize) -> Vec<Word> {
        let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &layer {
                for &a in &self.alphabet {
                    let mut w2 = w.clone();
                    w2.push(a);
                    if !self.has_forbidden_suffix(&w2) {
                        next.push(w2);
                    }
                }
            }
            layer = next;
        }
        layer.into_iter().map(Word).collect()
    }

    /// Vertex-shift presentation on `n`-blocks, `n >= max(1, memory)`. Each
    /// vertex is labelled by its first symbol and named by its block. The
    /// graph is trimmed, so it may be empty.
    pub fn window_graph(&self, n: usize) -> LabeledGraph {
        assert!(n >= self.memory().max(1), "window shorter than the memory");
        let blocks = self.clean_blocks(n);
        let mut g = LabeledGraph::new();
        let mut id = HashMap::new();
        for b in &blocks {
            let v = g.add_vertex(b.to_string(), b.0[0]);
            id.insert(b.0.clone(), v);
        }
        for b in &blocks {
            let mut ext = b.0.clone();
            for &a in &self.alphabet {
                ext.push(a);
                if !self.has_forbidden_suffix(&ext) {
                    if let Some(&to) = id.get(&ext[1..]) {
                        g.add_edge(id[&b.0], to);
                    }
                }
                ext.pop();
            }
        }
        g.trimmed().0
    }

    pub fn to_vertex_shift(&self) -> LabeledGraph {
        self.window_graph(self.memory().max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_blocks;

    #[test]
    fn word_display_and_parse() {
        let w: Word = "10001".parse().unwrap();
        assert_eq!(w, Word(vec![1, 0, 0, 0, 1]));
        assert_eq!(w.to_string(), "10001");
        let big = Word(vec![3, 12, 0]);
        assert_eq!(big.to_string(), "3,12,0");
        assert_eq!("3,12,0".parse::<Word>().unwrap(), big);
        assert!("10a".parse::<Word>().is_err());
        assert_eq!(Word::gap_block(3).to_string(), "10001");
    }

    #[test]
    fn purely_periodic_words() {
        for (w, p) in [
            ("0000", true),
            ("1010", true),
            ("0110", false),
            ("0", false),
            ("010", false),
        ] {
            assert_eq!(w.parse::<Word>().unwrap().is_purely_periodic(), p, "{w}");
        }
    }

    #[test]
    fn golden_mean_vertex_shift() {
        let g = ForbiddenSft::binary(&["11"]).unwrap().to_vertex_shift();
        assert_eq!(g.len(), 2);
        let edges: BTreeSet<(String, String)> = g
            .edges()
            .map(|(u, v)| (g.name(u).to_owned(), g.name(v).to_owned()))
            .collect();
        let want: BTreeSet<(String, String)> = [("0", "0"), ("0", "1"), ("1", "0")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(edges, want);
    }

    #[test]
    fn full_shift_vertex_shift() {
        let g = ForbiddenSft::binary(&[]).unwrap().to_vertex_shift();
        assert_eq!((g.len(), g.edge_count()), (2, 4));
    }

    #[test]
    fn no_three_ones_matches_brute_force() {
        let sft = ForbiddenSft::binary(&["111"]).unwrap();
        let g = sft.to_vertex_shift();
        assert_eq!(g.len(), 4);
        for n in 1..=10 {
            let brute: BTreeSet<Word> = (0u32..1 << n)
                .map(|x| Word((0..n).map(|i| (x >> (n - 1 - i)) & 1).collect()))
                .filter(|w| sft.avoids(w.symbols()))
                .collect();
            assert_eq!(enumerate_blocks(&g, n as usize), brute, "n = {n}");
        }
    }

    #[test]
    fn empty_shift_is_a_value() {
        // both symbols forbidden
        let g = ForbiddenSft::binary(&["0", "1"]).unwrap().to_vertex_shift();
        assert!(g.is_empty());
        // only finite words survive
        let g = ForbiddenSft::binary(&["00", "11", "01"])
            .unwrap()
            .to_vertex_shift();
        assert!(g.is_empty());
    }

    #[test]
    fn rejects_bad_forbidden_lists() {
        assert!(ForbiddenSft::new(
            [0].into_iter().collect(),
            ["01".parse().unwrap()].into_iter().collect()
        )
        .is_err());
        assert!(ForbiddenSft::new(
            [0, 1].into_iter().collect(),
            [Word(vec![])].into_iter().collect()
        )
        .is_err());
    }
}
