//! Line-oriented text formats.
//!
//! Graphs: `vertex <name> label=<symbol>` and `edge <name> <name>`, one per
//! line, in any order. Spoke specs: `regular m=<int> d=<int>` and
//! `degenerate d=<int>`, or a single `twocycle m=<int> d1=<int> d2=<int>`.
//! Blank lines and `#` comments are ignored in both.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::graph::{LabeledGraph, Symbol};
use crate::spoke::{Spoke, SpokeGraph, TwoCycleGraph};
use crate::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(src: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    src.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn key_values<'a>(line: usize, toks: &[&'a str]) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut out = BTreeMap::new();
    for t in toks {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key=value, found `{t}`")))?;
        if out.insert(k, v).is_some() {
            return Err(err(line, format!("repeated key `{k}`")));
        }
    }
    Ok(out)
}

fn take_int<T: std::str::FromStr>(
    line: usize,
    kv: &mut BTreeMap<&str, &str>,
    key: &str,
) -> Result<T> {
    let v = kv
        .remove(key)
        .ok_or_else(|| err(line, format!("missing `{key}=`")))?;
    v.parse()
        .map_err(|_| err(line, format!("`{key}={v}` is not a valid number")))
}

fn no_extra(line: usize, kv: &BTreeMap<&str, &str>) -> Result<()> {
    match kv.keys().next() {
        Some(k) => Err(err(line, format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

pub fn parse_graph(src: &str) -> Result<LabeledGraph> {
    let lines: Vec<(usize, Vec<&str>)> = content_lines(src).collect();
    if lines.is_empty() {
        return Err(err(0, "empty input"));
    }
    let mut g = LabeledGraph::new();
    let mut ids = HashMap::new();
    for (line, toks) in &lines {
        match toks[0] {
            "vertex" => {
                let [_, name, rest @ ..] = toks.as_slice() else {
                    return Err(err(*line, "expected `vertex <name> label=<symbol>`"));
                };
                let mut kv = key_values(*line, rest)?;
                let label: Symbol = take_int(*line, &mut kv, "label")?;
                no_extra(*line, &kv)?;
                if ids.contains_key(name) {
                    return Err(err(*line, format!("duplicate vertex `{name}`")));
                }
                ids.insert(*name, g.add_vertex(*name, label));
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(err(*line, "expected `edge <name> <name>`"));
                }
            }
            other => return Err(err(*line, format!("unknown declaration `{other}`"))),
        }
    }
    for (line, toks) in lines.iter().filter(|(_, t)| t[0] == "edge") {
        let id = |name: &str| {
            ids.get(name)
                .copied()
                .ok_or_else(|| err(*line, format!("undeclared vertex `{name}`")))
        };
        let (u, v) = (id(toks[1])?, id(toks[2])?);
        if !g.add_edge(u, v) {
            return Err(err(
                *line,
                format!("duplicate edge {} -> {}", toks[1], toks[2]),
            ));
        }
    }
    Ok(g)
}

pub fn write_graph(g: &LabeledGraph) -> String {
    let mut out = String::new();
    for v in 0..g.len() {
        writeln!(out, "vertex {} label={}", g.name(v), g.label(v)).expect("write to string");
    }
    for (u, v) in g.edges() {
        writeln!(out, "edge {} {}", g.name(u), g.name(v)).expect("write to string");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpokeSpec {
    Spokes(SpokeGraph),
    TwoCycle(TwoCycleGraph),
}

pub fn parse_spoke_spec(src: &str) -> Result<SpokeSpec> {
    let mut spokes = Vec::new();
    let mut two_cycle = None;
    let mut last = 0;
    for (line, toks) in content_lines(src) {
        last = line;
        let mut kv = key_values(line, &toks[1..])?;
        match toks[0] {
            "regular" => {
                let m = take_int(line, &mut kv, "m")?;
                let d = take_int(line, &mut kv, "d")?;
                spokes.push(Spoke::Regular { m, d });
            }
            "degenerate" => spokes.push(Spoke::Degenerate {
                d: take_int(line, &mut kv, "d")?,
            }),
            "twocycle" => {
                if two_cycle.is_some() {
                    return Err(err(line, "only one `twocycle` line is allowed"));
                }
                let m = take_int(line, &mut kv, "m")?;
                let d1 = take_int(line, &mut kv, "d1")?;
                let d2 = take_int(line, &mut kv, "d2")?;
                no_extra(line, &kv)?;
                two_cycle =
                    Some(TwoCycleGraph::new(m, d1, d2).map_err(|e| err(line, e.to_string()))?);
            }
            other => return Err(err(line, format!("unknown spoke kind `{other}`"))),
        }
        no_extra(line, &kv)?;
    }
    match (two_cycle, spokes.is_empty()) {
        (None, true) => Err(err(0, "empty input")),
        (Some(tc), true) => Ok(SpokeSpec::TwoCycle(tc)),
        (Some(_), false) => Err(err(last, "`twocycle` cannot be mixed with spokes")),
        (None, false) => SpokeGraph::new(spokes)
            .map(SpokeSpec::Spokes)
            .map_err(|e| err(last, e.to_string())),
    }
}

pub fn write_spoke_spec(spec: &SpokeSpec) -> String {
    let mut out = String::new();
    match spec {
        SpokeSpec::Spokes(sg) => {
            for s in sg.spokes() {
                match *s {
                    Spoke::Regular { m, d } => writeln!(out, "regular m={m} d={d}"),
                    Spoke::Degenerate { d } => writeln!(out, "degenerate d={d}"),
                }
                .expect("write to string");
            }
        }
        SpokeSpec::TwoCycle(tc) => {
            writeln!(out, "twocycle m={} d1={} d2={}", tc.m, tc.d1, tc.d2).expect("write to string")
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graph_round_trip() {
        let src = "# golden mean\nedge a b\nvertex a label=0\nvertex b label=1\nedge a a\nedge b a   # back\n";
        let g = parse_graph(src).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn graph_errors() {
        let cases = [
            ("", 0),
            ("# nothing\n\n", 0),
            ("vertex a label=0\nvertex a label=1\n", 2),
            ("vertex a label=0\nedge a a\nedge a a\n", 3),
            ("vertex a label=0\nedge a b\n", 2),
            ("vertex a\n", 1),
            ("vertex a label=x\n", 1),
            ("vertex a label=0 colour=red\n", 1),
            ("node a\n", 1),
            ("vertex a label=0\nedge a\n", 2),
        ];
        for (src, line) in cases {
            match parse_graph(src) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{src:?}"),
                other => panic!("{src:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn spoke_specs() {
        let s = parse_spoke_spec("regular m=1 d=6\nregular d=3 m=1\n\ndegenerate d=2\n").unwrap();
        let SpokeSpec::Spokes(sg) = &s else { panic!() };
        assert_eq!(sg.spokes().len(), 3);
        assert_eq!(sg.spoke(2), Spoke::Regular { m: 1, d: 3 });
        assert_eq!(parse_spoke_spec(&write_spoke_spec(&s)).unwrap(), s);

        let t = parse_spoke_spec("twocycle m=3 d1=4 d2=3").unwrap();
        assert_eq!(t, SpokeSpec::TwoCycle(TwoCycleGraph::new(3, 4, 3).unwrap()));
        assert_eq!(parse_spoke_spec(&write_spoke_spec(&t)).unwrap(), t);

        for bad in [
            "",
            "regular m=1",
            "regular m=1 d=0",
            "twocycle m=1 d1=2 d2=3\nregular m=1 d=2",
            "spoke m=1 d=1",
            "regular m=1 d=2 e=3",
        ] {
            assert!(
                matches!(parse_spoke_spec(bad), Err(Error::Parse { .. })),
                "{bad:?}"
            );
        }
    }

    proptest! {
        #[test]
        fn random_graphs_round_trip(n in 1usize..8, edges in prop::collection::btree_set((0usize..8, 0usize..8), 0..20), labels in prop::collection::vec(0u32..3, 8)) {
            let mut g = LabeledGraph::new();
            for v in 0..n {
                g.add_vertex(format!("v{v}"), labels[v]);
            }
            for (u, v) in edges {
                if u < n && v < n {
                    g.add_edge(u, v);
                }
            }
            prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }
    }
}
