use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

use gapcode::spoke::P2Report;
use gapcode::text::parse_graph;

const MIXED_PERIODS: &str = "regular m=1 d=6\nregular m=1 d=3\nregular m=4 d=6\n";
const FOUR_SPOKES: &str = "regular m=1 d=2\nregular m=1 d=3\nregular m=1 d=4\nregular m=10 d=6\n";
const NO_COVER: &str = "regular m=1 d=2\nregular m=1 d=3\nregular m=2 d=6\nregular m=6 d=6\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gapcode-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn entropy_command() {
    let o = run(&["entropy", "eventual:T=1;exc={};D=1;res={0}"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lambda = 1.618033988749"));

    let o = run(&["--json", "entropy", "finite:{0}"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lambda"], 1.0);

    assert_eq!(run(&["entropy", "eventual:T=1;D=1"]).status.code(), Some(2));
    assert_eq!(run(&["entropy", "finite:{}"]).status.code(), Some(2));
}

#[test]
fn gapset_and_image() {
    let o = run(&["gapset", "eventual:T=2;exc={0};D=1;res={0}"]);
    assert!(stdout(&o).contains("S = eventual:T=2;exc={0};D=1;res={0}"));
    assert!(stdout(&o).contains("forbidden = {101}"));

    let o = run(&["image", "--forbidden", "111", "--marker", "1010"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("S = eventual:T=4;exc={1};D=1;res={0}"),
        "{out}"
    );
    assert!(out.contains("forbidden = {11,1001,10001}"), "{out}");
}

#[test]
fn p1_on_a_forbidden_word_domain() {
    let z = scratch("z62.txt", "");
    let o = run(&[
        "p1",
        "--forbidden",
        "111",
        "--marker",
        "1010",
        "--emit",
        path(&z),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("P1 HOLDS via C2"));
    let g = parse_graph(&fs::read_to_string(&z).unwrap()).unwrap();
    assert!(g.len() > 1);
    let v = run(&[
        "verify",
        path(&z),
        "--gaps",
        "eventual:T=4;exc={1};D=1;res={0}",
    ]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn p1_on_the_full_shift() {
    let o = run(&["p1", "--full-shift", "--marker", "0000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("F = {101,1001,10001}"), "{out}");
    assert!(
        out.contains("X_F works; X_Fbar fails (divergent word 100001)"),
        "{out}"
    );
}

#[test]
fn p1_fails_on_spokes_without_loops() {
    let s = scratch("p1spokes.txt", "regular m=1 d=2\nregular m=2 d=3\n");
    let o = run(&["p1", "--spokes", path(&s)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("P1 FAILS"));
}

#[test]
fn p2_command() {
    let mixed = scratch("mixed.txt", MIXED_PERIODS);
    let o = run(&["p2", path(&mixed)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("W = {2}"));

    let no_cover = scratch("no_cover.txt", NO_COVER);
    let o = run(&["p2", path(&no_cover)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("P2 FAILS"));

    let one = scratch("one.txt", "regular m=3 d=5\n");
    assert_eq!(run(&["p2", path(&one)]).status.code(), Some(0));

    let tc = scratch("tc.txt", "twocycle m=3 d1=4 d2=3\n");
    let o = run(&["p2", path(&tc)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("u = 4"));
}

#[test]
fn p2_json_round_trips() {
    let four = scratch("fourjson.txt", FOUR_SPOKES);
    let o = run(&["--json", "p2", path(&four)]);
    let report: P2Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        serde_json::to_string_pretty(&report).unwrap(),
        stdout(&o).trim_end()
    );
    assert!(report.holds);
    assert_eq!(report.h.unwrap().added_cycles.len(), 1);
}

#[test]
fn p3_command() {
    let mixed = scratch("p3mixed.txt", MIXED_PERIODS);
    let o = run(&["p3-necessary", path(&mixed)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("P = {2}"));

    let no_cover = scratch("p3nocover.txt", NO_COVER);
    let o = run(&["p3-necessary", path(&no_cover)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("necessary conditions infeasible"));

    let one = scratch("p3one.txt", "regular m=2 d=2\n");
    assert_eq!(run(&["p3-necessary", path(&one)]).status.code(), Some(0));
}

#[test]
fn verify_accepts_and_rejects() {
    let spec = scratch("vfour.txt", FOUR_SPOKES);
    let h = scratch("hfour.txt", "");
    assert_eq!(
        run(&["p2", path(&spec), "--emit", path(&h)]).status.code(),
        Some(0)
    );
    let o = run(&["verify", path(&h), "--spokes", path(&spec)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS"));

    // shorten the cycle of spoke 4 by one vertex
    let text = fs::read_to_string(&h).unwrap();
    let tampered: String = text
        .lines()
        .filter(|l| !l.contains("c4_5"))
        .chain(std::iter::once("edge c4_4 b4"))
        .map(|l| format!("{l}\n"))
        .collect();
    let bad = scratch("hfourbad.txt", &tampered);
    let o = run(&["verify", path(&bad), "--spokes", path(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL"));
    assert!(stdout(&o).contains("divergent word"), "{}", stdout(&o));

    let empty = scratch("empty.txt", "");
    assert_eq!(
        run(&["verify", path(&empty), "--spokes", path(&spec)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn construct_z_outputs() {
    let z = scratch("z72.txt", "");
    let o = run(&[
        "construct-z",
        "--full-shift",
        "--marker",
        "0000",
        "--out",
        path(&z),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# gap 0:"));
    let g = parse_graph(&fs::read_to_string(&z).unwrap()).unwrap();
    assert_eq!(g.labels().iter().filter(|&&l| l == 1).count(), 1);

    let o = run(&[
        "--json",
        "construct-z",
        "--forbidden",
        "111",
        "--marker",
        "1010",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["eta"]["n"], 6);

    let s = scratch("zspokes.txt", "regular m=1 d=2\n");
    assert_eq!(
        run(&["construct-z", "--spokes", path(&s)]).status.code(),
        Some(1)
    );
}

#[test]
fn output_is_deterministic() {
    let four = scratch("detfour.txt", FOUR_SPOKES);
    let a = run(&["--json", "p2", path(&four)]);
    let b = run(&["--json", "p2", path(&four)]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn p2_then_verify_is_fast() {
    let spec = scratch(
        "fast.txt",
        "regular m=8 d=8\nregular m=7 d=4\nregular m=6 d=8\ndegenerate d=3\n",
    );
    let h = scratch("fasth.txt", "");
    let t = Instant::now();
    let o = run(&["p2", path(&spec), "--emit", path(&h)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        run(&["verify", path(&h), "--spokes", path(&spec)])
            .status
            .code(),
        Some(0)
    );
    assert!(t.elapsed().as_secs_f64() < 10.0);
}
