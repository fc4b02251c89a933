use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gapcode::capacity::{p3_necessary, spoke_channel_capacity, P3Report};
use gapcode::conjugacy::{check_p1, check_p1_marked, full_shift_p1, FullShiftP1, P1Verdict, Which};
use gapcode::factor::{degree, has_graph_diamond, image_gap_set_default, recode_to_marked};
use gapcode::gapshift::DEFAULT_TOL;
use gapcode::oracle::{language_equal_upto, Comparand, LanguageComparison, OracleBudget};
use gapcode::spoke::{
    certify, check_p2, construct_h_two_cycle, realize_graph, spoke_invariants, Certificates,
    P2Report,
};
use gapcode::text::{parse_graph, parse_spoke_spec, write_graph, SpokeSpec};
use gapcode::{
    Error, EventuallyPeriodicSet, ForbiddenSft, GapShift, MarkedGraph, UnambiguousCode, Word,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "gapcode",
    version,
    about = "Analyse factor codes with an unambiguous symbol"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Residual tolerance for the entropy root.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Word length up to which languages are compared.
    #[arg(long, global = true, default_value_t = 20)]
    budget_blocks: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of the S-gap shift.
    Entropy { gaps: String },
    /// Canonical form, small elements and forbidden words of a gap set.
    Gapset {
        gaps: String,
        #[arg(long, default_value_t = 30)]
        upto: u64,
    },
    /// Gap set, entropy and degree of the image of a code.
    Image(CodeInput),
    /// Decide whether some sub-SFT is mapped one-to-one onto the image.
    P1 {
        #[command(flatten)]
        code: CodeInput,
        /// Write the graph of the sub-SFT here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide whether some sub-SFT is mapped finite-to-one onto the image.
    P2 {
        spokes: PathBuf,
        /// Write the constructed graph here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Enumerate supports passing the necessary conditions for a maximal-entropy input.
    #[command(name = "p3-necessary")]
    P3Necessary { spokes: PathBuf },
    /// Build the sub-SFT on which the code is a conjugacy.
    ConstructZ {
        #[command(flatten)]
        code: CodeInput,
        /// Write the graph here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a graph against a target image.
    Verify {
        graph: PathBuf,
        #[arg(long, conflicts_with = "gaps", required_unless_present = "gaps")]
        spokes: Option<PathBuf>,
        #[arg(long)]
        gaps: Option<String>,
    },
}

#[derive(Args)]
struct CodeInput {
    /// Domain graph; without --marker its labels are the output symbols.
    #[arg(long, conflicts_with_all = ["spokes", "full_shift", "forbidden"])]
    graph: Option<PathBuf>,
    /// Spoke spec whose standard code is analysed.
    #[arg(long, conflicts_with_all = ["full_shift", "forbidden", "marker"])]
    spokes: Option<PathBuf>,
    /// Domain is the full shift on the alphabet.
    #[arg(long, conflicts_with = "forbidden")]
    full_shift: bool,
    /// Comma-separated forbidden words of the domain.
    #[arg(long)]
    forbidden: Option<String>,
    /// Comma-separated alphabet of a forbidden-word domain.
    #[arg(long, default_value = "0,1")]
    alphabet: String,
    /// The word D; for graph domains a comma-separated vertex path.
    #[arg(long)]
    marker: Option<String>,
}

enum Code {
    Marked(MarkedGraph),
    Unambiguous(UnambiguousCode),
}

impl Code {
    fn marked(&self) -> gapcode::Result<MarkedGraph> {
        match self {
            Code::Marked(mg) => Ok(mg.clone()),
            Code::Unambiguous(c) => recode_to_marked(c),
        }
    }
}

type Outcome = Result<bool, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = OracleBudget {
        max_block_len: cli.budget_blocks.max(OracleBudget::default().max_block_len),
        ..Default::default()
    };
    let ctx = Ctx {
        json: cli.json,
        tol: cli.tol,
        l: cli.budget_blocks,
        budget,
    };
    let outcome = match &cli.command {
        Command::Entropy { gaps } => ctx.entropy(gaps),
        Command::Gapset { gaps, upto } => ctx.gapset(gaps, *upto),
        Command::Image(code) => ctx.image(code),
        Command::P1 { code, emit } => ctx.p1(code, emit.as_deref()),
        Command::P2 { spokes, emit } => ctx.p2(spokes, emit.as_deref()),
        Command::P3Necessary { spokes } => ctx.p3(spokes),
        Command::ConstructZ { code, out } => ctx.construct_z(code, out.as_deref()),
        Command::Verify {
            graph,
            spokes,
            gaps,
        } => ctx.verify(graph, spokes.as_deref(), gaps.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Invalid(_)
        | Error::InvalidSpoke(_)
        | Error::EmptyGapSet
        | Error::MarkerNotAllowed(_)
        | Error::NotIrreducible => 2,
        Error::Numeric(_) => 3,
        _ => 1,
    }
}

fn read(path: &Path) -> gapcode::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> gapcode::Result<()> {
    fs::write(path, contents).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn words(list: &str) -> gapcode::Result<Vec<Word>> {
    list.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(str::parse)
        .collect()
}

/// Shortest first, then lexicographic.
fn fmt_words(ws: &[Word]) -> String {
    let mut ws: Vec<&Word> = ws.iter().collect();
    ws.sort_by_key(|w| (w.len(), w.symbols().to_vec()));
    format!(
        "{{{}}}",
        ws.iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
}

fn spoke_spec(path: &Path) -> gapcode::Result<SpokeSpec> {
    parse_spoke_spec(&read(path)?)
}

struct Ctx {
    json: bool,
    tol: f64,
    l: usize,
    budget: OracleBudget,
}

impl Ctx {
    fn emit_json<T: Serialize>(&self, value: &T) {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("reports serialize")
        );
    }

    fn load_code(&self, input: &CodeInput) -> gapcode::Result<Code> {
        if let Some(path) = &input.spokes {
            return Ok(Code::Marked(match spoke_spec(path)? {
                SpokeSpec::Spokes(sg) => realize_graph(&sg),
                SpokeSpec::TwoCycle(tc) => tc.realize(),
            }));
        }
        if let Some(path) = &input.graph {
            let g = parse_graph(&read(path)?)?;
            return match &input.marker {
                None => Ok(Code::Marked(MarkedGraph::new(g)?)),
                Some(m) => {
                    let path: Vec<usize> = m
                        .split(',')
                        .map(|name| {
                            g.vertex_by_name(name.trim()).ok_or_else(|| {
                                Error::Invalid(format!(
                                    "marker vertex `{name}` is not in the graph"
                                ))
                            })
                        })
                        .collect::<gapcode::Result<_>>()?;
                    Ok(Code::Unambiguous(UnambiguousCode::on_graph(g, &path)?))
                }
            };
        }
        let marker: Word = input
            .marker
            .as_deref()
            .ok_or_else(|| Error::Invalid("--marker is required for word domains".into()))?
            .parse()?;
        let alphabet = input
            .alphabet
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad symbol `{s}`")))
            })
            .collect::<gapcode::Result<_>>()?;
        let forbidden = match &input.forbidden {
            Some(list) => words(list)?.into_iter().collect(),
            None if input.full_shift => Default::default(),
            None => {
                return Err(Error::Invalid(
                    "give --graph, --spokes, --full-shift or --forbidden".into(),
                ))
            }
        };
        Ok(Code::Unambiguous(UnambiguousCode::on_sft(
            ForbiddenSft::new(alphabet, forbidden)?,
            marker,
        )?))
    }

    fn entropy(&self, spec: &str) -> Outcome {
        let y = GapShift::new(spec.parse()?)?;
        let lambda = y.entropy(self.tol)?;
        #[derive(Serialize)]
        struct Out {
            lambda: f64,
            h_top: f64,
        }
        let out = Out {
            lambda,
            h_top: lambda.ln(),
        };
        if self.json {
            self.emit_json(&out);
        } else {
            println!("lambda = {}", out.lambda);
            println!("h_top = {}", out.h_top);
        }
        Ok(true)
    }

    fn gapset(&self, spec: &str, upto: u64) -> Outcome {
        let s: EventuallyPeriodicSet = spec.parse()?;
        #[derive(Serialize)]
        struct Out {
            canonical: EventuallyPeriodicSet,
            elements: Vec<u64>,
            finite: bool,
            forbidden: Option<Vec<Word>>,
        }
        let forbidden = GapShift::new(s.clone())
            .ok()
            .and_then(|y| y.standard_forbidden_set())
            .map(|f| f.forbidden().iter().cloned().collect());
        let out = Out {
            elements: s.elements_upto(upto),
            finite: s.is_finite(),
            forbidden,
            canonical: s,
        };
        if self.json {
            self.emit_json(&out);
        } else {
            println!("S = {}", out.canonical);
            println!("elements <= {upto}: {:?}", out.elements);
            match &out.forbidden {
                Some(f) => println!("forbidden = {}", fmt_words(f)),
                None => println!("forbidden = (not of finite type)"),
            }
        }
        Ok(true)
    }

    fn image(&self, input: &CodeInput) -> Outcome {
        let mg = self.load_code(input)?.marked()?;
        let gaps = image_gap_set_default(&mg)?;
        let y = GapShift::new(gaps.clone())?;
        let lambda = y.entropy(self.tol)?;
        let forbidden: Option<Vec<Word>> = y
            .standard_forbidden_set()
            .map(|f| f.forbidden().iter().cloned().collect());
        let deg = if has_graph_diamond(&mg) {
            None
        } else {
            Some(degree(&mg)?)
        };
        #[derive(Serialize)]
        struct Out {
            gaps: EventuallyPeriodicSet,
            forbidden: Option<Vec<Word>>,
            lambda: f64,
            h_top: f64,
            degree: Option<usize>,
            magic_word: Option<Word>,
        }
        let out = Out {
            gaps,
            forbidden,
            lambda,
            h_top: lambda.ln(),
            degree: deg.as_ref().map(|d| d.degree),
            magic_word: deg.map(|d| d.magic_word),
        };
        if self.json {
            self.emit_json(&out);
        } else {
            println!("S = {}", out.gaps);
            match &out.forbidden {
                Some(f) => println!("forbidden = {}", fmt_words(f)),
                None => println!("forbidden = (not of finite type)"),
            }
            println!("lambda = {}", out.lambda);
            println!("h_top = {}", out.h_top);
            match (out.degree, &out.magic_word) {
                (Some(d), Some(w)) => println!("degree = {d} (magic word {w})"),
                _ => println!("degree = none (graph diamond: not finite-to-one)"),
            }
        }
        Ok(true)
    }

    fn p1_verdict(&self, input: &CodeInput) -> gapcode::Result<P1Verdict> {
        match self.load_code(input)? {
            Code::Marked(mg) => check_p1_marked(&mg),
            Code::Unambiguous(c) => check_p1(&c),
        }
    }

    fn p1(&self, input: &CodeInput, emit: Option<&Path>) -> Outcome {
        let verdict = self.p1_verdict(input)?;
        let full = if input.full_shift {
            let d: Word = input.marker.as_deref().unwrap_or_default().parse()?;
            Some(full_shift_p1(&d, self.l, &self.budget)?)
        } else {
            None
        };
        if let (Some(path), Some(z)) = (emit, &verdict.z) {
            write(path, &write_graph(&z.graph))?;
        }
        if self.json {
            #[derive(Serialize)]
            struct Out<'a> {
                verdict: &'a P1Verdict,
                full_shift: Option<&'a FullShiftP1>,
            }
            self.emit_json(&Out {
                verdict: &verdict,
                full_shift: full.as_ref(),
            });
        } else {
            print_p1(&verdict);
            if let Some(f) = &full {
                print_full_shift(f);
            }
        }
        Ok(verdict.holds)
    }

    fn construct_z(&self, input: &CodeInput, out: Option<&Path>) -> Outcome {
        let verdict = self.p1_verdict(input)?;
        let (Some(z), Some(eta)) = (&verdict.z, &verdict.eta) else {
            eprintln!(
                "no conjugacy: S = {} is infinite and no unmarked fixed point exists",
                verdict.gaps
            );
            return Ok(false);
        };
        if self.json {
            #[derive(Serialize)]
            struct Out<'a> {
                z: &'a gapcode::conjugacy::ZGraph,
                eta: &'a gapcode::conjugacy::EtaSpec,
            }
            let json = serde_json::to_string_pretty(&Out { z, eta }).expect("reports serialize");
            match out {
                Some(path) => write(path, &json)?,
                None => println!("{json}"),
            }
            return Ok(true);
        }
        let text = write_graph(&z.graph);
        match out {
            Some(path) => write(path, &text)?,
            None => print!("{text}"),
        }
        let mut table = String::new();
        table.push_str(&format!("# N = {}, radius = {}\n", eta.n, eta.radius));
        for (s, path) in &eta.cycles {
            table.push_str(&format!("# gap {s}: {}\n", path.join(" ")));
        }
        if let Some(tau) = &eta.tau {
            table.push_str(&format!(
                "# beta+ = {}\n# beta- = {}\n# tau = {tau}\n",
                eta.beta_plus.join(" "),
                eta.beta_minus.join(" ")
            ));
        }
        if out.is_some() {
            print!("{table}");
        } else {
            eprint!("{table}");
        }
        Ok(true)
    }

    fn p2(&self, path: &Path, emit: Option<&Path>) -> Outcome {
        match spoke_spec(path)? {
            SpokeSpec::Spokes(sg) => {
                let report = check_p2(&sg)?;
                if let (Some(path), Some(h)) = (emit, &report.h) {
                    write(path, &write_graph(h.h.graph()))?;
                }
                let ok = report
                    .certificates
                    .as_ref()
                    .is_none_or(Certificates::all_pass);
                if self.json {
                    self.emit_json(&report);
                } else {
                    print_p2(&report);
                }
                Ok(report.holds && ok)
            }
            SpokeSpec::TwoCycle(tc) => {
                let c = construct_h_two_cycle(&tc, false);
                let cert = certify(&c.g, &c.h, &c.psi, &tc.gaps())?;
                if let Some(path) = emit {
                    write(path, &write_graph(c.h.graph()))?;
                }
                if self.json {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        holds: bool,
                        u: u64,
                        beta: &'a [String],
                        certificates: &'a Certificates,
                    }
                    self.emit_json(&Out {
                        holds: cert.all_pass(),
                        u: c.u,
                        beta: &c.beta,
                        certificates: &cert,
                    });
                } else {
                    println!(
                        "{}",
                        if cert.all_pass() {
                            "P2 HOLDS"
                        } else {
                            "P2 FAILS"
                        }
                    );
                    println!("S = {}", tc.gaps());
                    println!("u = {}", c.u);
                    println!("beta = {}", c.beta.join(" "));
                    print_certificates(&cert);
                }
                Ok(cert.all_pass())
            }
        }
    }

    fn p3(&self, path: &Path) -> Outcome {
        let SpokeSpec::Spokes(sg) = spoke_spec(path)? else {
            return Err(Error::Invalid(
                "p3-necessary takes a spoke spec, not a two-cycle spec".into(),
            ));
        };
        let q = spoke_channel_capacity(&sg)?.exp();
        let report = p3_necessary(&spoke_invariants(&sg), q)?;
        if self.json {
            self.emit_json(&report);
        } else {
            print_p3(&report);
        }
        Ok(report.necessary_conditions_pass())
    }

    fn verify(&self, graph: &Path, spokes: Option<&Path>, gaps: Option<&str>) -> Outcome {
        let h = MarkedGraph::new(parse_graph(&read(graph)?)?)?;
        let target: EventuallyPeriodicSet = match (spokes, gaps) {
            (Some(p), _) => match spoke_spec(p)? {
                SpokeSpec::Spokes(sg) => spoke_invariants(&sg).s,
                SpokeSpec::TwoCycle(tc) => tc.gaps(),
            },
            (None, Some(g)) => g.parse()?,
            (None, None) => unreachable!("clap requires a target"),
        };
        let y = GapShift::new(target.clone())?;
        let found = image_gap_set_default(&h)?;
        let no_diamond = !has_graph_diamond(&h);
        let deg = if no_diamond {
            Some(degree(&h)?.degree)
        } else {
            None
        };
        let lang = language_equal_upto(h.graph(), &Comparand::Gap(&y), self.l, &self.budget)?;
        let pass = found == target && no_diamond && lang.equal;
        #[derive(Serialize)]
        struct Out<'a> {
            pass: bool,
            target: &'a EventuallyPeriodicSet,
            found: &'a EventuallyPeriodicSet,
            no_diamond: bool,
            degree: Option<usize>,
            language: &'a LanguageComparison,
        }
        if self.json {
            self.emit_json(&Out {
                pass,
                target: &target,
                found: &found,
                no_diamond,
                degree: deg,
                language: &lang,
            });
        } else {
            println!("{}", if pass { "PASS" } else { "FAIL" });
            println!("target S = {target}");
            println!("graph  S = {found}");
            println!("diamond-free: {no_diamond}");
            if let Some(d) = deg {
                println!("degree = {d}");
            }
            match (&lang.divergent, lang.divergent_in_left) {
                (Some(w), Some(true)) => {
                    println!("divergent word {w}: produced by the graph, not in Y")
                }
                (Some(w), _) => println!("divergent word {w}: in Y, not produced by the graph"),
                (None, _) => println!("languages agree up to length {}", lang.checked_len),
            }
        }
        Ok(pass)
    }
}

fn print_p1(v: &P1Verdict) {
    use gapcode::conjugacy::Witness;
    match &v.witness {
        Some(Witness::C1) => println!("P1 HOLDS via C1 (finite gap set)"),
        Some(Witness::C2 { vertex }) => println!("P1 HOLDS via C2 (fixed point at {vertex})"),
        None => println!("P1 FAILS"),
    }
    println!("S = {}", v.gaps);
    if let Some(z) = &v.z {
        println!(
            "Z: {} vertices, {} edges",
            z.graph.len(),
            z.graph.edge_count()
        );
    }
}

fn print_full_shift(f: &FullShiftP1) {
    println!("F = {}", fmt_words(&f.forbidden));
    println!("complement of F = {}", fmt_words(&f.complement));
    let side = |ok: bool, div: &Option<Word>| match (ok, div) {
        (true, _) => "works".to_owned(),
        (false, Some(w)) => format!("fails (divergent word {w})"),
        (false, None) => "fails".to_owned(),
    };
    println!(
        "X_F {}; X_Fbar {}",
        side(f.onto_f, &f.divergent_f),
        side(f.onto_complement_f, &f.divergent_complement_f)
    );
    let which = match f.which {
        Which::F => "X_F",
        Which::ComplementF => "X_Fbar",
        Which::Neither => "neither",
    };
    println!(
        "a symbol occurs at most once in D: {}; choice: {which}",
        f.condition1
    );
}

fn print_certificates(c: &Certificates) {
    println!("certificates:");
    println!("  no diamond: {}", c.no_diamond);
    println!(
        "  degree: {}",
        c.degree.map_or("n/a".to_owned(), |d| d.to_string())
    );
    println!("  gap equality: {}", c.gap_equality);
    println!("  psi edges: {}", c.psi_edges_valid);
    println!("  psi labels: {}", c.psi_labels_valid);
    println!(
        "  psi injective (window {}): {}",
        c.psi_window, c.psi_injective
    );
}

fn print_p2(r: &P2Report) {
    println!("{}", if r.holds { "P2 HOLDS" } else { "P2 FAILS" });
    println!("S = {}", r.invariants.s);
    println!("D = {}", r.invariants.big_d);
    for (i, k) in &r.invariants.k {
        println!("K_{i} = {k:?}");
    }
    if let Some(w) = &r.w {
        println!("W = {w:?}");
    }
    if let Some(h) = &r.h {
        println!(
            "H: {} vertices, {} edges",
            h.h.len(),
            h.h.graph().edge_count()
        );
        for (gap, cycle) in &h.added_cycles {
            println!("added cycle for gap {gap}: {}", cycle.join(" "));
        }
        if !h.added_degenerate.is_empty() {
            println!("added degenerate spokes: {:?}", h.added_degenerate);
        }
    }
    if let Some(c) = &r.certificates {
        print_certificates(c);
    }
}

fn print_p3(r: &P3Report) {
    println!("Q = {}", r.q);
    if r.feasible.is_empty() {
        println!(
            "necessary conditions infeasible ({} supports checked)",
            r.candidates
        );
        return;
    }
    println!(
        "necessary conditions pass for {} of {} supports",
        r.feasible.len(),
        r.candidates
    );
    for f in &r.feasible {
        let conds: Vec<String> = f
            .sufficient
            .conditions
            .iter()
            .map(|c| format!("{c:?}").to_lowercase())
            .collect();
        let weights: Vec<String> = f
            .weights
            .iter()
            .map(|(i, c)| format!("c_{i}={c}"))
            .collect();
        println!(
            "P = {:?}: {} sufficient conditions [{}], W exists: {}",
            f.support,
            weights.join(" "),
            conds.join(","),
            f.sufficient.w_exists
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::Parse {
                line: 1,
                msg: String::new()
            }),
            2
        );
        assert_eq!(exit_code(&Error::Numeric(String::new())), 3);
        assert_eq!(exit_code(&Error::TooLarge(String::new())), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn word_lists() {
        assert_eq!(words("11, 1001,").unwrap().len(), 2);
        assert_eq!(fmt_words(&words("101,1001").unwrap()), "{101,1001}");
    }
}
