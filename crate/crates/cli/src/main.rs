//! `twincolor` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 proven nonexistence,
//! 3 unknown (budget or search range exhausted), 4 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use twincolor::combinatorics::{partition_three, partition_two_avoiding, CombinatoricsError, InvolutionPartition};
use twincolor::graph::{classify_tree, degeneracy_ordering, load_graph, GraphFormat};
use twincolor::greedy::{color_graph_greedy_with, greedy_bound, GreedyError, GreedyOptions};
use twincolor::oracle::{group_twin_index_exact_with, twin_index_exact_with, IndexReport, OracleError};
use twincolor::tree::{color_forest, color_tree_with_budget, star_obstruction_check, star_triple_check, tree_bound};
use twincolor::tree::{StarVerdict, DEFAULT_BUDGET};
use twincolor::{exists_coloring, groups_of_order, verify_twin};
use twincolor::{AbelianGroup, EdgeLabeling, Graph, SearchOptions, SearchOutcome, TreeError};

#[derive(Debug, Parser)]
#[command(name = "twincolor", version, about = "Twin edge colorings over finite Abelian groups")]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
    /// Seed for randomized label choices; 0 keeps the deterministic first choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search node budget for exact methods.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads for the exhaustive search.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Print one line per labeled edge of the greedy method to stderr.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Graph file: `.json`, or an edge list with one `u v` pair per line.
    #[arg(long, short, conflicts_with = "edges", required_unless_present = "edges")]
    graph: Option<PathBuf>,
    /// Inline edge list, pairs separated by `;` or `,` (e.g. "0 1;1 2").
    #[arg(long)]
    edges: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find a twin edge coloring for one group.
    Color {
        #[command(flatten)]
        input: GraphInput,
        /// Group literal such as Z7, Z2xZ4 or Z2^3.
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Compute the twin or group twin index exactly.
    Index {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value_t = Mode::Twin)]
        mode: Mode,
        #[arg(long, default_value_t = 16)]
        kmax: u64,
    },
    /// List the Abelian groups of order k.
    Groups { k: u64 },
    /// Zero-sum partition of the elements of order at most two.
    Partition {
        group: String,
        /// Three part sizes, or two with --avoid.
        #[arg(required = true, num_args = 2..=3)]
        sizes: Vec<usize>,
        /// Involution kept out of the first part, e.g. "1,0,1".
        #[arg(long)]
        avoid: Option<String>,
    },
    /// Check a labeling json against a graph.
    Verify { graph: PathBuf, labeling: PathBuf },
    /// Time the automatic method on every graph file in a directory.
    Bench {
        dir: PathBuf,
        /// Group to use for every graph; defaults to the applicable bound.
        #[arg(long)]
        group: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Tree,
    Greedy,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Twin,
    GroupTwin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    Success = 0,
    Usage = 1,
    Nonexistent = 2,
    Unknown = 3,
    VerifyFailed = 4,
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage as u8 } else { 0 });
        }
    };
    match run(&cfg) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Exit::Usage as u8)
        }
    }
}

fn run(cfg: &RunConfig) -> Result<Exit> {
    match &cfg.command {
        Command::Color { input, group, method } => {
            let graph = read_graph(input)?;
            let group = parse_group(group)?;
            cmd_color(cfg, &graph, &group, *method)
        }
        Command::Index { input, mode, kmax } => cmd_index(cfg, &read_graph(input)?, *mode, *kmax),
        Command::Groups { k } => {
            let names: Vec<String> = groups_of_order(*k)?.iter().map(|g| g.to_string()).collect();
            emit(cfg, &(names.join("\n") + "\n"))?;
            Ok(Exit::Success)
        }
        Command::Partition { group, sizes, avoid } => cmd_partition(cfg, &parse_group(group)?, sizes, avoid.as_deref()),
        Command::Verify { graph, labeling } => cmd_verify(cfg, graph, labeling),
        Command::Bench { dir, group } => cmd_bench(cfg, dir, group.as_deref()),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_group(lit: &str) -> Result<AbelianGroup> {
    lit.parse().with_context(|| format!("bad group literal {lit:?}"))
}

fn read_graph(input: &GraphInput) -> Result<Graph> {
    if let Some(path) = &input.graph {
        return load_file(path);
    }
    let text = input.edges.as_deref().unwrap_or_default().replace([';', ','], "\n");
    Ok(Graph::from_edge_list(&text)?)
}

fn load_file(path: &Path) -> Result<Graph> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_graph(file, GraphFormat::from_path(path)).with_context(|| format!("reading {}", path.display()))
}

enum Colored {
    Done(EdgeLabeling, String),
    Nonexistent(String),
    Unknown(String),
}

fn cmd_color(cfg: &RunConfig, graph: &Graph, group: &AbelianGroup, method: Method) -> Result<Exit> {
    let outcome = color(cfg, graph, group, method)?;
    match outcome {
        Colored::Done(labeling, how) => {
            let report = verify_twin(graph, &labeling)?;
            emit(cfg, &(labeling.to_json() + "\n"))?;
            if report.passed() {
                eprintln!(
                    "pass (method {how}, nowhere-zero {})",
                    if report.nowhere_zero { "yes" } else { "no" }
                );
                Ok(Exit::Success)
            } else {
                eprintln!("fail: {}", serde_json::to_string(&report.violations)?);
                Ok(Exit::VerifyFailed)
            }
        }
        Colored::Nonexistent(why) => {
            eprintln!("no {group}-twin edge coloring exists: {why}");
            if let Some(note) = star_note(graph, group) {
                eprintln!("{note}");
            }
            Ok(Exit::Nonexistent)
        }
        Colored::Unknown(why) => {
            eprintln!("unknown: {why}");
            Ok(Exit::Unknown)
        }
    }
}

fn color(cfg: &RunConfig, graph: &Graph, group: &AbelianGroup, method: Method) -> Result<Colored> {
    match method {
        Method::Tree => color_tree_method(cfg, graph, group),
        Method::Greedy => match color_greedy(cfg, graph, group) {
            Err(GreedyError::ColTooSmall { .. }) if graph.is_forest() => color_tree_method(cfg, graph, group),
            Err(GreedyError::IsolatedEdge) => Ok(Colored::Nonexistent("a component is a single edge".into())),
            Err(e) => Err(e.into()),
            Ok(l) => Ok(Colored::Done(l, "greedy".into())),
        },
        Method::Exact => Ok(color_exact(cfg, graph, group)),
        Method::Auto => {
            if graph.is_forest() {
                match color_tree_method(cfg, graph, group) {
                    Err(e) if matches!(e.downcast_ref(), Some(TreeError::GroupTooSmall { .. })) => {}
                    other => return other,
                }
            } else if !graph.has_isolated_edge()
                && degeneracy_ordering(graph).col >= 3
                && group.order() >= greedy_bound(graph)
            {
                let l = color_greedy(cfg, graph, group)?;
                return Ok(Colored::Done(l, "greedy".into()));
            }
            Ok(color_exact(cfg, graph, group))
        }
    }
}

fn color_tree_method(cfg: &RunConfig, graph: &Graph, group: &AbelianGroup) -> Result<Colored> {
    let budget = cfg.budget.unwrap_or(DEFAULT_BUDGET);
    let result = if graph.is_tree() {
        color_tree_with_budget(graph, group, budget).map(|c| (c.labeling, format!("{:?}", c.method).to_lowercase()))
    } else {
        color_forest(graph, group).map(|l| (l, "forest".into()))
    };
    match result {
        Ok((l, how)) => Ok(Colored::Done(l, how)),
        Err(TreeError::NoColoringFound { proven: true }) => Ok(Colored::Nonexistent("exhaustive search".into())),
        Err(TreeError::NoColoringFound { proven: false }) => Ok(Colored::Unknown("search budget exhausted".into())),
        Err(TreeError::IsolatedEdge) => Ok(Colored::Nonexistent("a component is a single edge".into())),
        Err(e) => Err(e.into()),
    }
}

fn color_greedy(cfg: &RunConfig, graph: &Graph, group: &AbelianGroup) -> Result<EdgeLabeling, GreedyError> {
    let opts = GreedyOptions {
        seed: (cfg.seed != 0).then_some(cfg.seed),
        trace: cfg.trace,
        ..GreedyOptions::default()
    };
    let run = color_graph_greedy_with(graph, group, &opts)?;
    for line in &run.trace {
        eprintln!("{line}");
    }
    Ok(run.labeling)
}

fn search_options(cfg: &RunConfig) -> SearchOptions {
    let mut opts = SearchOptions {
        threads: cfg.threads.max(1),
        ..SearchOptions::default()
    };
    if let Some(b) = cfg.budget {
        opts.budget = b;
    }
    opts
}

fn color_exact(cfg: &RunConfig, graph: &Graph, group: &AbelianGroup) -> Colored {
    match exists_coloring(graph, group, &search_options(cfg)) {
        SearchOutcome::Found(l) => Colored::Done(l, "exact".into()),
        SearchOutcome::NotFound if graph.has_isolated_edge() => {
            Colored::Nonexistent("a component is a single edge".into())
        }
        SearchOutcome::NotFound => Colored::Nonexistent("exhaustive search".into()),
        SearchOutcome::Unknown => Colored::Unknown("search budget exhausted".into()),
    }
}

/// For a star with two or three leaves fewer than the group order, names
/// the unused-label argument behind the answer.
fn star_note(graph: &Graph, group: &AbelianGroup) -> Option<String> {
    let n = graph.n();
    let is_star = graph.is_tree() && n >= 4 && graph.max_degree() == n - 1;
    if !is_star {
        return None;
    }
    let verdict = match group.len().checked_sub(n - 1)? {
        2 => star_obstruction_check(group),
        3 => star_triple_check(group),
        _ => return None,
    };
    match verdict {
        StarVerdict::Obstructed { checked } => Some(format!(
            "note: the center weight matches no unused label for any of the {checked} choices of unused labels"
        )),
        StarVerdict::Colorable { .. } => None,
    }
}

fn cmd_index(cfg: &RunConfig, graph: &Graph, mode: Mode, kmax: u64) -> Result<Exit> {
    let opts = search_options(cfg);
    let result = match mode {
        Mode::Twin => twin_index_exact_with(graph, kmax, &opts),
        Mode::GroupTwin => group_twin_index_exact_with(graph, kmax, &opts),
    };
    match result {
        Ok(report) => {
            emit(cfg, &format_index(&report))?;
            Ok(Exit::Success)
        }
        Err(OracleError::IsolatedEdge) => bail!("graph has a component that is a single edge"),
        Err(e) => {
            eprintln!("{e}");
            Ok(Exit::Unknown)
        }
    }
}

fn format_index(report: &IndexReport) -> String {
    let mut out = format!("index {}\n", report.index);
    for row in &report.table {
        for (g, f) in &row.groups {
            let status = serde_json::to_value(f).expect("status").as_str().unwrap_or_default().to_string();
            out += &format!("k={} {g} {status}\n", row.order);
        }
    }
    out
}

fn parse_element(group: &AbelianGroup, text: &str) -> Result<twincolor::GroupElement> {
    let residues = text
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|s| s.trim().parse::<i64>().with_context(|| format!("bad residue {s:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(group.element(&residues)?)
}

fn cmd_partition(cfg: &RunConfig, group: &AbelianGroup, sizes: &[usize], avoid: Option<&str>) -> Result<Exit> {
    let result = match (sizes, avoid) {
        (&[n1, n2, n3], None) => partition_three(group, n1, n2, n3),
        (&[n1, n2], Some(iota)) => partition_two_avoiding(group, &parse_element(group, iota)?, n1, n2),
        (&[_, _], None) => bail!("two sizes need --avoid"),
        _ => bail!("--avoid takes exactly two sizes"),
    };
    match result {
        Ok(p) => {
            emit(cfg, &(partition_json(group, &p) + "\n"))?;
            Ok(Exit::Success)
        }
        Err(e @ CombinatoricsError::Infeasible { .. }) | Err(e @ CombinatoricsError::NoSolution(_)) => {
            eprintln!("{e}");
            Ok(Exit::Nonexistent)
        }
        Err(e) => Err(anyhow!(e)),
    }
}

fn partition_json(group: &AbelianGroup, p: &InvolutionPartition) -> String {
    let parts: Vec<Vec<Vec<u32>>> = p
        .parts
        .iter()
        .map(|part| part.iter().map(|e| e.residues().to_vec()).collect())
        .collect();
    let doc = serde_json::json!({ "group": group.to_string(), "sizes": p.sizes, "parts": parts });
    serde_json::to_string_pretty(&doc).expect("partition json")
}

fn cmd_verify(cfg: &RunConfig, graph: &Path, labeling: &Path) -> Result<Exit> {
    let graph = load_file(graph)?;
    let text = fs::read_to_string(labeling).with_context(|| format!("reading {}", labeling.display()))?;
    let labeling = EdgeLabeling::from_json(&graph, &text)?;
    let report = verify_twin(&graph, &labeling)?;
    emit(cfg, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    if report.passed() {
        eprintln!("pass");
        Ok(Exit::Success)
    } else {
        eprintln!("fail: {} violations", report.violations.len());
        Ok(Exit::VerifyFailed)
    }
}

/// Group order used by `bench` when none is given.
fn default_order(graph: &Graph) -> Option<u64> {
    if graph.is_tree() && graph.n() >= 3 {
        return classify_tree(graph).ok().map(|c| tree_bound(&c));
    }
    (degeneracy_ordering(graph).col >= 3).then(|| greedy_bound(graph))
}

fn cmd_bench(cfg: &RunConfig, dir: &Path, group: Option<&str>) -> Result<Exit> {
    let fixed = group.map(parse_group).transpose()?;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("el" | "json" | "txt")))
        .collect();
    files.sort();
    let mut out = format!("{:<24} {:>6} {:>7} {:>4} {:<10} {:<14} {:>10}\n", "file", "n", "m", "Δ", "group", "result", "ms");
    for path in files {
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let graph = match load_file(&path) {
            Ok(g) => g,
            Err(e) => {
                out += &format!("{name:<24} skipped: {e:#}\n");
                continue;
            }
        };
        let group = match (&fixed, default_order(&graph)) {
            (Some(g), _) => g.clone(),
            (None, Some(k)) => AbelianGroup::cyclic(k)?,
            (None, None) => {
                out += &format!("{name:<24} skipped: no default group\n");
                continue;
            }
        };
        let start = Instant::now();
        let result = match color(cfg, &graph, &group, Method::Auto) {
            Ok(Colored::Done(l, how)) if verify_twin(&graph, &l)?.passed() => how,
            Ok(Colored::Done(..)) => "verify-fail".into(),
            Ok(Colored::Nonexistent(_)) => "none".into(),
            Ok(Colored::Unknown(_)) => "unknown".into(),
            Err(e) => format!("error: {e}"),
        };
        let ms = start.elapsed().as_secs_f64() * 1e3;
        out += &format!(
            "{name:<24} {:>6} {:>7} {:>4} {:<10} {:<14} {ms:>10.2}\n",
            graph.n(),
            graph.edge_count(),
            graph.max_degree(),
            group.to_string(),
            result
        );
    }
    emit(cfg, &out)?;
    Ok(Exit::Success)
}
