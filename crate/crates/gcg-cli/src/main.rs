//! `gcg`: batch front end for the graphical complex of groups toolkit.
//!
//! Exit codes: 0 pass, 1 verdict failure, 2 input error, 3 out of theory.

mod report;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use gcg::develop::{self, DevelopError, DevelopedBall, GroupWord};
use gcg::examples::{ExampleSpec, TorusCurve};
use gcg::flats::{self, Consistency, FlatCandidate, Hex};
use gcg::gcog::{self, ComplexData, ComplexError, GraphicalComplexOfGroups};
use gcg::poset::{self, PosetError};
use gcg::smallcancel::{self, AngleAssignment};
use gcg::wise;

#[derive(Parser)]
#[command(name = "gcg", version, about = "Verify and explore graphical complexes of groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// A complex file, positional or as `--in`.
#[derive(Args)]
struct Input {
    #[arg(value_name = "FILE", required_unless_present = "in_file")]
    input: Option<PathBuf>,
    #[arg(long = "in", value_name = "FILE", conflicts_with = "input")]
    in_file: Option<PathBuf>,
}

impl Input {
    fn path(&self) -> &Path {
        self.input.as_deref().or(self.in_file.as_deref()).expect("clap requires one of the two")
    }
}

#[derive(Args)]
struct BallSource {
    /// Complex JSON to develop, or a saved ball.
    #[arg(value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long = "in", value_name = "FILE", conflicts_with = "input")]
    in_file: Option<PathBuf>,
    /// A saved ball instead of developing one.
    #[arg(long)]
    ball: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    radius: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Poset convention and complex axioms.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Whether the poset is k-huge.
    Huge {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: usize,
    },
    /// Search for a proper triple.
    Triples {
        #[command(flatten)]
        input: Input,
    },
    /// T(4): no proper triple.
    T4 {
        #[command(flatten)]
        input: Input,
    },
    /// Angular link condition on the local developments or on a ball.
    Links {
        #[command(flatten)]
        input: Input,
        /// c6, c6hyp, notriple-hyp, c4t4 or c5t4.
        #[arg(long, default_value = "c6")]
        angles: AngleAssignment,
        /// Check the links of a saved ball instead.
        #[arg(long)]
        ball: Option<PathBuf>,
    },
    /// Classification verdict.
    Classify {
        #[command(flatten)]
        input: Input,
    },
    /// Develop a ball and save it.
    Develop {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        radius: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Develop only around these words (`v:g,v:g`), repeatable.
        #[arg(long)]
        focus: Vec<GroupWord>,
    },
    /// Resolve a group word to a cell.
    Resolve {
        #[command(flatten)]
        source: BallSource,
        #[arg(long)]
        word: GroupWord,
    },
    /// Nerve dimension, largeness, cut-up tetrahedra, retriangulation.
    Wise {
        #[command(flatten)]
        source: BallSource,
        #[arg(long, group = "wise_mode")]
        check_large: Option<usize>,
        #[arg(long, group = "wise_mode")]
        cut_up_tetra: bool,
        #[arg(long, group = "wise_mode")]
        retriangulate: bool,
        /// Write the nerve (maximal simplices and interior flags) as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the nerve's 1-skeleton as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate pieces.
    Pieces {
        #[command(flatten)]
        source: BallSource,
    },
    /// The C(k) condition.
    Ck {
        #[command(flatten)]
        source: BallSource,
        #[arg(long)]
        k: usize,
        /// Check every embedded cycle of the poset, not only the shortest.
        #[arg(long)]
        all_cycles: bool,
    },
    /// Label and embed a hexagon patch over a Klein-four torus complex.
    Flat {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "3x3", value_parser = parse_patch)]
        patch: (usize, usize),
        #[arg(long)]
        ball: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Generate an example complex.
    Example {
        #[command(subcommand)]
        family: Family,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run the whole pipeline and emit one report.
    Report {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        radius: u32,
        /// Use the C(4)–T(4) settings: C(4) and the square-grid comparison.
        #[arg(long)]
        c4t4: bool,
        /// Include wall-clock timings (excluded from the digest contract).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Graphical product of cyclic groups over a graph.
    GraphicalProduct {
        /// JSON `{"vertices": n, "edges": [[a, b], ...]}`.
        #[arg(long)]
        graph: PathBuf,
        /// Cyclic group orders per graph vertex; defaults to all 2.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
    },
    /// Right-angled Coxeter group over the n-cycle
    RacgCycle {
        #[arg(long)]
        n: usize,
    },
    /// Right-angled Coxeter group over K(n,m)
    RacgBipartite {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Coxeter group with a 1-dimensional nerve.
    Coxeter {
        /// JSON `{"vertices": n, "edges": [[a, b], ...]}`.
        #[arg(long)]
        graph: PathBuf,
        /// JSON list of edge labels, one per edge.
        #[arg(long)]
        labels: PathBuf,
    },
    /// Klein-four groups over a hexagonal torus
    KleinTorus {
        #[arg(long, value_parser = parse_hex)]
        t1: Option<Hex>,
        #[arg(long, value_parser = parse_hex)]
        t2: Option<Hex>,
    },
    /// Two Klein-four tori glued along a straight curve
    TorusDouble {
        #[arg(long, value_parser = parse_hex)]
        t1: Option<Hex>,
        #[arg(long, value_parser = parse_hex)]
        t2: Option<Hex>,
        /// Curve direction 0, 1 or 2.
        #[arg(long, default_value_t = 0)]
        direction: usize,
        #[arg(long, value_parser = parse_hex, default_value = "0,0")]
        offset: Hex,
    },
}

fn parse_hex(s: &str) -> Result<Hex, String> {
    let (a, b) = s.split_once(',').ok_or("expected q,r")?;
    let p = |x: &str| x.trim().parse::<i64>().map_err(|e| e.to_string());
    Ok(Hex::new(p(a)?, p(b)?))
}

fn parse_patch(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((p(w)?, p(h)?))
}

/// Why a command stopped early, with its exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub(crate) fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

pub(crate) type Outcome = Result<(Value, u8), Failure>;

pub(crate) fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text)
        .map_err(|e| Failure::input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

pub(crate) fn load_complex(path: &Path) -> Result<GraphicalComplexOfGroups, Failure> {
    let text = read_input(path)?;
    let data: ComplexData = parse_json(path, &text)?;
    GraphicalComplexOfGroups::from_data(data).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_ball(source: &BallSource) -> Result<DevelopedBall, Failure> {
    if let Some(path) = &source.ball {
        return parse_json(path, &read_input(path)?);
    }
    let path =
        source.input.as_deref().or(source.in_file.as_deref()).ok_or(Failure::input("give a complex or ball file"))?;
    let value: Value = parse_json(path, &read_input(path)?)?;
    let invalid = |e: String| Failure::input(format!("{}: {e}", path.display()));
    // saved balls carry their cells; anything else is read as a complex
    if value.get("cells").is_some() {
        return serde_json::from_value(value).map_err(|e| invalid(e.to_string()));
    }
    let data: ComplexData = serde_json::from_value(value).map_err(|e| invalid(e.to_string()))?;
    let gc = GraphicalComplexOfGroups::from_data(data).map_err(|e| invalid(e.to_string()))?;
    develop::develop_ball(&gc, source.radius).map_err(develop_failure)
}

fn develop_failure(e: DevelopError) -> Failure {
    let code = match e {
        DevelopError::NotHuge { .. } => 3,
        DevelopError::Invalid { .. } => 1,
        _ => 2,
    };
    Failure { code, message: e.to_string() }
}

pub(crate) fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("certificates serialize")
}

fn pass(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_validate(input: &Path) -> Outcome {
    let text = read_input(input)?;
    let data: ComplexData = parse_json(input, &text)?;
    let gc = match GraphicalComplexOfGroups::from_data(data) {
        Ok(gc) => gc,
        Err(e @ ComplexError::Poset(PosetError::DuplicateIncidence { small, big })) => {
            return Ok((json!({ "valid": false, "error": e.to_string(), "witness": [small, big] }), 1));
        }
        Err(e) => return Ok((json!({ "valid": false, "error": e.to_string() }), 1)),
    };
    let convention = poset::check_convention(gc.poset());
    let complex = gcog::validate(&gc);
    let ok = convention.passes() && complex.is_valid();
    Ok((json!({ "valid": ok, "convention": convention, "complex": complex }), pass(ok)))
}

fn cmd_links(input: &Path, angles: AngleAssignment, ball: Option<&Path>) -> Outcome {
    let cert = match ball {
        Some(path) => {
            let text = read_input(path)?;
            let ball: DevelopedBall = parse_json(path, &text)?;
            smallcancel::check_link_condition_ball(&ball, angles)
        }
        None => smallcancel::check_link_condition_complex(&load_complex(input)?, angles),
    };
    Ok((to_value(&cert), pass(cert.holds)))
}

fn cmd_develop(input: &Path, radius: u32, out: &Path, dot: Option<&Path>, focus: &[GroupWord]) -> Outcome {
    let gc = load_complex(input)?;
    let ball = if focus.is_empty() {
        develop::develop_ball(&gc, radius)
    } else {
        develop::develop_focused(&gc, radius, focus)
    }
    .map_err(develop_failure)?;
    write_file(out, &serde_json::to_string(&ball).expect("balls serialize"))?;
    if let Some(dot) = dot {
        write_file(dot, &ball.to_dot())?;
    }
    let links = develop::check_links(&ball);
    Ok((
        json!({
            "radius": radius,
            "focused": ball.is_focused(),
            "cells": ball.cell_count(),
            "instances": ball.instance_count(),
            "links": links,
        }),
        pass(links.passes()),
    ))
}

fn cmd_wise(ball: &DevelopedBall, large: Option<usize>, tetra: bool, retri: bool) -> Outcome {
    if retri {
        return match wise::retriangulate_valence2(ball) {
            Ok(r) => {
                let report = wise::check_retriangulation(ball, &r);
                let ok = report.passes();
                Ok((
                    json!({
                        "vertices": r.vertices.len(),
                        "edges": r.graph.edge_count(),
                        "triangles": r.triangles.len(),
                        "report": report,
                    }),
                    pass(ok),
                ))
            }
            Err(e) => Ok((json!({ "error": e }), 1)),
        };
    }
    let nerve = wise::build_nerve(ball);
    if let Some(k) = large {
        let cert = wise::check_k_largeness(&nerve, k);
        return Ok((to_value(&cert), pass(cert.holds)));
    }
    if tetra {
        let search = wise::find_cut_up_tetrahedron(&nerve);
        return Ok((to_value(&search), 0));
    }
    let dim = wise::nerve_dimension(ball);
    Ok((to_value(&dim), pass(dim.agrees)))
}

fn cmd_flat(input: &Path, (w, h): (usize, usize), ball: Option<&Path>, svg: Option<&Path>) -> Outcome {
    let gc = load_complex(input)?;
    let Some(torus) = flats::recognise_torus(&gc) else {
        return Ok((json!({ "error": "not a valid locally Klein-four complex over a hexagonal torus" }), 1));
    };
    let patch = flats::build_hex_patch(w, h, &torus).map_err(|e| Failure::input(e.to_string()))?;
    let labelling = flats::label_patch(&gc, &patch).map_err(|e| Failure::input(e.to_string()))?;
    let ball = match ball {
        Some(path) => {
            let text = read_input(path)?;
            parse_json::<DevelopedBall>(path, &text)?
        }
        None => {
            develop::develop_focused(&gc, patch.required_radius() + 1, &labelling.labels).map_err(develop_failure)?
        }
    };
    let consistency = flats::verify_consistency(&gc, &patch, &labelling, Some(&ball));
    let embedding = flats::embed_flat(&ball, &patch, &labelling);
    let shape = embedding.verified().then(|| {
        let cells = embedding.cells.iter().map(|c| c.expect("verified embeddings resolve")).collect();
        flats::check_flat_shape(&ball, &FlatCandidate { patch: patch.clone(), cells })
    });
    if let Some(svg) = svg {
        write_file(svg, &flats::patch_svg(&patch, &labelling, Some(&embedding.cells)))?;
    }
    let code = match &consistency {
        Consistency::Consistent if embedding.verified() && shape.as_ref().is_some_and(|s| s.holds) => 0,
        Consistency::Unknown { .. } => 1,
        _ => 1,
    };
    Ok((
        json!({
            "translations": torus.translations(),
            "patch": [w, h],
            "labels": labelling.labels,
            "consistency": consistency,
            "embedding": embedding,
            "shape": shape,
        }),
        code,
    ))
}

fn read_graph(path: &Path) -> Result<(usize, Vec<(usize, usize)>), Failure> {
    #[derive(serde::Deserialize)]
    struct GraphFile {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    }
    let g: GraphFile = parse_json(path, &read_input(path)?)?;
    Ok((g.vertices, g.edges))
}

fn cmd_example(family: &Family, out: Option<&Path>) -> Outcome {
    let spec = match family {
        Family::GraphicalProduct { graph, orders } => {
            let (vertices, edges) = read_graph(graph)?;
            let orders = if orders.is_empty() { vec![2; vertices] } else { orders.clone() };
            ExampleSpec::GraphicalProduct { vertices, edges, orders }
        }
        Family::RacgCycle { n } => ExampleSpec::RacgCycle { n: *n },
        Family::RacgBipartite { n, m } => ExampleSpec::RacgBipartite { n: *n, m: *m },
        Family::Coxeter { graph, labels } => {
            let (vertices, edges) = read_graph(graph)?;
            let labels: Vec<usize> = parse_json(labels, &read_input(labels)?)?;
            if labels.len() != edges.len() {
                return Err(Failure::input(format!("{} labels for {} edges", labels.len(), edges.len())));
            }
            let edges = edges.iter().zip(&labels).map(|(&(a, b), &m)| (a, b, m)).collect();
            ExampleSpec::Coxeter { vertices, edges }
        }
        Family::KleinTorus { t1, t2 } => ExampleSpec::KleinTorus { t1: *t1, t2: *t2 },
        Family::TorusDouble { t1, t2, direction, offset } => {
            ExampleSpec::TorusDouble { t1: *t1, t2: *t2, curve: TorusCurve { direction: *direction, offset: *offset } }
        }
    };
    let gc = spec.generate().map_err(|e| Failure::input(e.to_string()))?;
    let text = serde_json::to_string_pretty(&gc).expect("complexes serialize");
    match out {
        Some(path) => {
            write_file(path, &text)?;
            Ok((json!({ "written": path, "vertices": gc.poset().vertex_count() }), 0))
        }
        None => Ok((serde_json::from_str(&text).expect("round trip"), 0)),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { input } => cmd_validate(input.path()),
        Command::Huge { input, k } => {
            let cert = poset::check_huge(load_complex(input.path())?.poset(), k);
            Ok((to_value(&cert), pass(cert.holds)))
        }
        Command::Triples { input } => {
            let gc = load_complex(input.path())?;
            let witness = gcog::find_proper_triple(&gc);
            Ok((json!({ "found": witness.is_some(), "witness": witness }), 0))
        }
        Command::T4 { input } => {
            let cert = gcog::check_t4(&load_complex(input.path())?);
            Ok((to_value(&cert), pass(cert.holds)))
        }
        Command::Links { input, angles, ball } => cmd_links(input.path(), angles, ball.as_deref()),
        Command::Classify { input } => {
            let verdict = gcog::classify(&load_complex(input.path())?);
            let code = if verdict.is_out_of_theory() { 3 } else { 0 };
            Ok((to_value(&verdict), code))
        }
        Command::Develop { input, radius, out, dot, focus } => {
            cmd_develop(input.path(), radius, &out, dot.as_deref(), &focus)
        }
        Command::Resolve { source, word } => {
            let ball = load_ball(&source)?;
            match develop::resolve_word(&ball, &word) {
                Ok(cell) => Ok((json!({ "word": word.to_string(), "cell": cell, "distance": ball.distance(cell) }), 0)),
                Err(e) => Ok((json!({ "word": word.to_string(), "error": e }), 1)),
            }
        }
        Command::Wise { source, check_large, cut_up_tetra, retriangulate, out, dot } => {
            let ball = load_ball(&source)?;
            if out.is_some() || dot.is_some() {
                let nerve = wise::build_nerve(&ball);
                if let Some(path) = out {
                    write_file(&path, &serde_json::to_string(&nerve.to_data()).expect("nerves serialize"))?;
                }
                if let Some(path) = dot {
                    write_file(&path, &nerve.to_dot())?;
                }
            }
            cmd_wise(&ball, check_large, cut_up_tetra, retriangulate)
        }
        Command::Pieces { source } => {
            let rep = smallcancel::enumerate_pieces(&load_ball(&source)?);
            Ok((to_value(&rep), pass(rep.too_long.is_empty())))
        }
        Command::Ck { source, k, all_cycles } => {
            let cert = smallcancel::check_ck(&load_ball(&source)?, k, all_cycles);
            Ok((to_value(&cert), pass(cert.holds)))
        }
        Command::Flat { input, patch, ball, svg } => cmd_flat(input.path(), patch, ball.as_deref(), svg.as_deref()),
        Command::Example { family, out } => cmd_example(&family, out.as_deref()),
        Command::Report { input, radius, c4t4, timing } => report::run(input.path(), radius, c4t4, timing),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((value, code)) => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&value).expect("values serialize"));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
