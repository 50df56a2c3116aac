//! `laminate`: command-line front end.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use laminate_core::formats::{self, GraphFile, LanguageFile, SystemFile, TreeFile};
use laminate_core::gahler::{bonding_map, separation_depth, ApproximantTower, LanguageOracle, Separation};
use laminate_core::graph::Step;
use laminate_core::holonomy::Cylinder;
use laminate_core::inverse_system::{is_flattening_system, FlatteningVerdict, InverseSystem};
use laminate_core::profinite::{CoveringTower, ProfiniteElement};
use laminate_core::rational::{format_rational, parse_vector};
use laminate_core::{dot, glue_classes, Error};

#[derive(Parser, Debug)]
#[command(name = "laminate", version, about = "Inverse limits of branched 1-manifolds")]
struct Cli {
    /// Print a JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Recorded in the report; every command is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether an inverse system is flattening.
    CheckFlatten {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Build the approximant tower of a subshift.
    Approximants {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Emit::Summary)]
        emit: Emit,
    },
    /// Least collar radius separating two marked words.
    Separation {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 6)]
        max_k: usize,
    },
    /// Deck group of a tower level over the base.
    DeckGroup {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        level: usize,
    },
    /// Transverse distance between two elements. An element is an integer
    /// (a power of the first base loop) or a base loop such as "a b- a".
    Metric {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Image of a base loop in the truncated deck groups.
    Rep {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long = "loop", allow_hyphen_values = true)]
        base_loop: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Local branched models.
    LocalModel {
        #[command(subcommand)]
        command: LocalModelCommand,
    },
    /// Graphviz rendering of a graph file or a level of a system.
    ExportDot {
        #[arg(long, conflicts_with = "system")]
        graph: Option<PathBuf>,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
}

#[derive(Subcommand, Debug)]
enum LocalModelCommand {
    /// Glue classes of the tree vertices over sample points.
    Classes {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Summary,
    Dot,
    Json,
}

#[derive(Serialize, Debug)]
struct RunReport {
    command: Vec<String>,
    seed: u64,
    result: Value,
    counters: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

/// What a command produced: the report body, human-readable text and the
/// exit status.
struct Outcome {
    result: Value,
    counters: BTreeMap<String, Value>,
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(result: Value, text: String) -> Self {
        Outcome { result, counters: BTreeMap::new(), text, code: 0 }
    }

    fn counter(mut self, name: &str, value: impl Serialize) -> Self {
        self.counters.insert(name.to_string(), json!(value));
        self
    }
}

type CmdResult = Result<Outcome, Error>;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli.command) {
        Ok(out) => {
            if cli.json {
                let report = RunReport {
                    command: args[1..].to_vec(),
                    seed: cli.seed,
                    result: out.result,
                    counters: out.counters,
                    timing_ms: cli.timing.then(|| start.elapsed().as_millis()),
                };
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                print!("{}", out.text);
                if cli.timing {
                    println!("elapsed: {} ms", start.elapsed().as_millis());
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: &Command) -> CmdResult {
    match command {
        Command::CheckFlatten { system, window } => check_flatten(system, *window),
        Command::Approximants { input, k, emit } => approximants(input, *k, *emit),
        Command::Separation { input, x, y, max_k } => separation(input, x, y, *max_k),
        Command::DeckGroup { tower, level } => deck_group(tower, *level),
        Command::Metric { tower, x, y, depth } => metric(tower, x, y, *depth),
        Command::Rep { tower, base_loop, depth } => rep(tower, base_loop, *depth),
        Command::LocalModel { command: LocalModelCommand::Classes { tree, points } } => classes(tree, points),
        Command::ExportDot { graph, system, level } => export_dot(graph.as_deref(), system.as_deref(), *level),
    }
}

fn check_flatten(path: &Path, window: usize) -> CmdResult {
    if window == 0 {
        return Err(Error::Input("the window must be at least 1".into()));
    }
    let sys = formats::load_system(path)?;
    let verdict = is_flattening_system(&sys, window)?;
    let level0 = sys.level(0)?;
    let (result, text, code) = match &verdict {
        FlatteningVerdict::Flattening { indices } => (
            json!({"verdict": "Flattening", "indices": indices}),
            format!("Flattening\nindices: {indices:?}\n"),
            0,
        ),
        FlatteningVerdict::NotLamination { witness } => {
            let g = &level0;
            let germs: Vec<String> = witness.germs.iter().map(|germ| g.format_germ(germ)).collect();
            let images: Vec<String> = witness.images.iter().map(|germ| g.format_germ(germ)).collect();
            let vertex = g.graph().vertex_name(witness.vertex).to_string();
            (
                json!({"verdict": "NotLamination", "vertex": vertex, "germs": germs, "images": images}),
                format!("NotLamination\nvertex: {vertex}\ngerms: {}\nimages: {}\n", germs.join(" "), images.join(" ")),
                2,
            )
        }
        FlatteningVerdict::NotFlatteningUpTo { window } => (
            json!({"verdict": "NotFlatteningUpTo", "window": window}),
            format!("NotFlatteningUpTo {window} (inconclusive)\n"),
            3,
        ),
    };
    let mut out = Outcome::ok(result, text).counter("window", window).counter("stationary", sys.is_stationary());
    out = out.counter("level0_vertices", level0.graph().vertex_count()).counter("level0_edges", level0.graph().edge_count());
    out.code = code;
    Ok(out)
}

fn load_oracle(path: &Path) -> Result<Arc<LanguageOracle>, Error> {
    let file: LanguageFile = formats::read_json(path)?;
    let mut oracle = file.to_oracle()?;
    if let Some(dir) = std::env::var_os("LAMINATE_CACHE_DIR") {
        oracle = oracle.with_cache_dir(dir);
    }
    Ok(Arc::new(oracle))
}

fn approximants(input: &Path, k: usize, emit: Emit) -> CmdResult {
    let oracle = load_oracle(input)?;
    let tower = Arc::new(ApproximantTower::new(oracle.clone()));
    let mut levels = Vec::new();
    let mut text = String::new();
    for level in 0..=k {
        let c = tower.complex(level)?;
        let g = c.graph().graph();
        let flattening = if level > 0 {
            Some(bonding_map(&c, &*tower.complex(level - 1)?)?.is_flattening().is_flattening())
        } else {
            None
        };
        text += &format!(
            "k={level}: {} vertices, {} edges, {} branch points{}\n",
            g.vertex_count(),
            g.edge_count(),
            c.graph().branch_points().len(),
            flattening.map_or(String::new(), |f| format!(", bond flattening: {f}"))
        );
        levels.push(json!({
            "k": level,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "branch_points": c.graph().branch_points().len(),
            "bond_flattening": flattening,
        }));
    }
    for w in oracle.warnings() {
        text = format!("warning: {w}\n{text}");
    }
    let top = tower.complex(k)?;
    let text = match emit {
        Emit::Summary => text,
        Emit::Dot => dot::to_dot(top.graph(), &format!("S{k}")),
        Emit::Json => {
            let sys: InverseSystem = tower.system();
            formats::to_json(&SystemFile::from_system(&sys, k)?) + "\n"
        }
    };
    let mut out = Outcome::ok(json!({"levels": levels, "warnings": oracle.warnings()}), text);
    out = out.counter("vertices", top.graph().graph().vertex_count()).counter("edges", top.graph().graph().edge_count());
    Ok(out)
}

fn separation(input: &Path, x: &str, y: &str, max_k: usize) -> CmdResult {
    let oracle = load_oracle(input)?;
    let x = Cylinder::parse(oracle.alphabet(), x)?;
    let y = Cylinder::parse(oracle.alphabet(), y)?;
    Ok(match separation_depth(&oracle, &x, &y, max_k)? {
        Separation::At(k) => Outcome::ok(json!({"separated_at": k}), format!("separated at k={k}\n")),
        Separation::Undistinguished { up_to } => Outcome::ok(
            json!({"undistinguished_up_to": up_to}),
            format!("undistinguished up to k={up_to}\n"),
        ),
    })
}

fn deck_group(path: &Path, level: usize) -> CmdResult {
    let tower = formats::load_tower(path, level + 1)?;
    let group = tower.deck_group(level)?;
    let report = group.regularity();
    let g = tower.level(level);
    let images: Vec<&str> = group.elements.iter().map(|e| g.vertex_name(e.vertices[group.basepoint.0])).collect();
    let mut text = format!(
        "level {level}: order {}, degree {}, regular: {}, exponent {}\n",
        report.order,
        report.degree,
        report.regular,
        group.exponent()
    );
    text += &format!("basepoint images: {}\n", images.join(" "));
    let mut result = json!({
        "level": level,
        "order": report.order,
        "degree": report.degree,
        "regular": report.regular,
        "exponent": group.exponent(),
        "basepoint": g.vertex_name(group.basepoint),
        "basepoint_images": images,
    });
    if level > 0 {
        let q = tower.quotient_hom(level)?;
        text += &format!("quotient to level {}: kernel order {}, image order {}\n", level - 1, q.kernel_order, q.target_order);
        result["kernel_order"] = json!(q.kernel_order);
    }
    Ok(Outcome::ok(result, text).counter("order", report.order))
}

/// An integer `n` (the first base loop to the power `n`) or a base loop.
fn parse_element(tower: &CoveringTower, text: &str, depth: usize) -> Result<ProfiniteElement, Error> {
    if let Ok(n) = text.trim().parse::<i64>() {
        let base = tower.base();
        let first = base.edges().next().ok_or_else(|| Error::Input("the base graph has no edges".into()))?;
        if base.src(first) != base.dst(first) {
            return Err(Error::Input("integer shorthand needs the first base edge to be a loop".into()));
        }
        let g = tower.rep(&[Step::forward(first)], depth)?;
        return tower.pow(&g, n);
    }
    tower.rep(&tower.base().parse_path(text)?, depth)
}

fn format_element(tower: &CoveringTower, x: &ProfiniteElement) -> Vec<String> {
    x.components().iter().enumerate().map(|(j, &v)| tower.level(j).vertex_name(v).to_string()).collect()
}

fn metric(path: &Path, x: &str, y: &str, depth: usize) -> CmdResult {
    let tower = formats::load_tower(path, depth)?;
    if depth > tower.depth() {
        return Err(Error::DepthOutOfRange { requested: depth, available: tower.depth() });
    }
    let (x, y) = (parse_element(&tower, x, depth)?, parse_element(&tower, y, depth)?);
    let d = tower.metric(&x, &y)?;
    let text = format!(
        "distance: {} (depth {}, error bound {})\n",
        format_rational(&d.partial_sum),
        d.depth,
        format_rational(&d.error_bound)
    );
    let first_difference = (0..depth).find(|&j| x.component(j) != y.component(j));
    Ok(Outcome::ok(json!(d), text).counter("first_differing_level", first_difference))
}

fn rep(path: &Path, base_loop: &str, depth: usize) -> CmdResult {
    let tower = formats::load_tower(path, depth)?;
    if depth > tower.depth() {
        return Err(Error::DepthOutOfRange { requested: depth, available: tower.depth() });
    }
    let path = tower.base().parse_path(base_loop)?;
    let g = tower.rep(&path, depth)?;
    let components = format_element(&tower, &g);
    let orders: Vec<usize> = (0..depth).map(|j| tower.order(j)).collect();
    let mut text = String::new();
    for (j, c) in components.iter().enumerate() {
        text += &format!("level {j}: {c} (group order {})\n", orders[j]);
    }
    Ok(Outcome::ok(json!({"components": components, "orders": orders}), text))
}

fn classes(tree: &Path, points: &[String]) -> CmdResult {
    let file: TreeFile = formats::read_json(tree)?;
    let tree = file.to_tree()?;
    let mut rows = Vec::new();
    let mut text = String::new();
    for p in points {
        let x = parse_vector(p)?;
        let blocks = glue_classes(&tree, &x)?;
        let named: Vec<Vec<&str>> = blocks.iter().map(|b| b.iter().map(|&v| tree.names()[v].as_str()).collect()).collect();
        let shown: Vec<String> = named.iter().map(|b| format!("{{{}}}", b.join(", "))).collect();
        text += &format!("{p}: {} classes {}\n", blocks.len(), shown.join(" "));
        rows.push(json!({"point": p, "count": blocks.len(), "classes": named}));
    }
    Ok(Outcome::ok(json!({"samples": rows}), text))
}

fn export_dot(graph: Option<&Path>, system: Option<&Path>, level: usize) -> CmdResult {
    let (g, name) = match (graph, system) {
        (Some(path), _) => {
            let file: GraphFile = formats::read_json(path)?;
            (Arc::new(file.to_branched()?), "S".to_string())
        }
        (None, Some(path)) => (formats::load_system(path)?.level(level)?, format!("S{level}")),
        (None, None) => return Err(Error::Input("give --graph or --system".into())),
    };
    let text = dot::to_dot(&g, &name);
    let out = Outcome::ok(json!({"dot": text}), text.clone());
    Ok(out.counter("branch_points", g.branch_points().len()))
}
