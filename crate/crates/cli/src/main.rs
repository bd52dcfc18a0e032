mod dot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde_json::json;

use menger_core::bounds::{self, Variant};
use menger_core::generators::{self, Instance};
use menger_core::menger::{menger_paths_with, min_cut, EdgeOrder};
use menger_core::merging::{count_mergings, merging_edges, pairwise_merge_count};
use menger_core::oracle::{brute_force_min, OracleConfig, DEFAULT_BUDGET};
use menger_core::reachability::build_auxiliary;
use menger_core::rerouting::minimize_systems;
use menger_core::{Dag, Error, Network, PairLayout, PathSystem};

use report::{edge_names, systems_json, RunReport};

#[derive(Parser)]
#[command(name = "menger", version, about = "Menger path systems and their mergings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Min-cut between two vertices.
    Mincut { file: PathBuf, source: String, sink: String },
    /// A maximum set of edge-disjoint paths for every pair.
    Paths {
        file: PathBuf,
        /// Shuffle the edge order used to pick augmenting paths.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Mergings between the default path systems.
    Merging {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        allow_cyclic: bool,
        /// Write the auxiliary graph of the first two systems as DOT.
        #[arg(long)]
        aux_dot: Option<PathBuf>,
    },
    /// Reroute the path systems until no reducing plan remains.
    Minimize {
        file: PathBuf,
        /// Bound family to compare against; defaults to the file's layout.
        #[arg(long)]
        variant: Option<Variant>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the graph with merge edges highlighted as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Report counts for cyclic graphs instead of refusing them.
        #[arg(long)]
        allow_cyclic: bool,
    },
    /// Exhaustive minimum over all path system choices.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Lower, exact and upper bounds for a cut tuple.
    Bounds {
        #[arg(long, default_value = "M")]
        variant: Variant,
        #[arg(required = true, allow_negative_numbers = true)]
        cuts: Vec<i64>,
    },
    /// Write a generated instance as an edge list.
    Gen {
        /// Generator name; see `--list`.
        #[arg(required_unless_present_any = ["regen_extremal", "list"])]
        name: Option<String>,
        params: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rerun the extremal searches and rewrite their data files.
        #[arg(long)]
        regen_extremal: bool,
        #[arg(long, default_value = "crates/core/data")]
        data_dir: PathBuf,
        #[arg(long)]
        list: bool,
    },
}

fn load(file: &PathBuf) -> anyhow::Result<Network> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    Ok(Network::parse(&text)?)
}

fn default_systems(net: &Network, seed: Option<u64>) -> anyhow::Result<Vec<PathSystem>> {
    let g = &net.dag;
    let order = match seed {
        Some(s) => EdgeOrder::shuffled(g, s),
        None => EdgeOrder::lexicographic(g),
    };
    Ok(net.pairs.iter().map(|&p| menger_paths_with(g, p, &order)).collect::<menger_core::Result<_>>()?)
}

fn pairwise_json(g: &Dag, systems: &[PathSystem]) -> serde_json::Value {
    let mut out = Vec::new();
    for i in 0..systems.len() {
        for j in i + 1..systems.len() {
            let (a, b) = (&systems[i], &systems[j]);
            out.push(json!({
                "pairs": [a.pair().index, b.pair().index],
                "count": pairwise_merge_count(a, b),
                "merge_edges": edge_names(g, &merging_edges(a.paths().iter().chain(b.paths()))),
            }));
        }
    }
    json!(out)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let start = Instant::now();
    let report = match cli.command {
        Command::Mincut { file, source, sink } => {
            let net = load(&file)?;
            let g = &net.dag;
            let value = min_cut(g, g.require_vertex(&source)?, g.require_vertex(&sink)?)?;
            RunReport::new("mincut", Some(&net), json!({ "source": source, "sink": sink, "value": value }))
        }
        Command::Paths { file, seed } => {
            let net = load(&file)?;
            let systems = default_systems(&net, seed)?;
            RunReport::new("paths", Some(&net), json!({ "systems": systems_json(&net.dag, &systems) }))
        }
        Command::Merging { file, seed, allow_cyclic, aux_dot } => {
            let net = load(&file)?;
            let g = &net.dag;
            if !g.is_acyclic() && !allow_cyclic {
                return Err(Error::CyclicInput.into());
            }
            let systems = default_systems(&net, seed)?;
            if let Some(path) = aux_dot {
                if systems.len() < 2 || !g.is_acyclic() {
                    bail!("--aux-dot needs an acyclic graph with at least two pairs");
                }
                std::fs::write(&path, build_auxiliary(g, &systems[0], &systems[1]).to_dot(g))?;
            }
            let all = merging_edges(systems.iter().flat_map(|s| s.paths()));
            RunReport::new(
                "merging",
                Some(&net),
                json!({
                    "count": count_mergings(&systems),
                    "merge_edges": edge_names(g, &all),
                    "pairwise": pairwise_json(g, &systems),
                    "systems": systems_json(g, &systems),
                }),
            )
        }
        Command::Minimize { file, variant, seed, dot, allow_cyclic } => {
            let net = load(&file)?;
            let g = &net.dag;
            let initial = default_systems(&net, seed)?;
            let before = count_mergings(&initial);
            let (systems, trace, minimized) = if g.is_acyclic() {
                let (s, t) = minimize_systems(g, &initial)?;
                (s, Some(t), true)
            } else if allow_cyclic {
                (initial, None, false)
            } else {
                return Err(Error::CyclicInput.into());
            };
            let variant = variant.unwrap_or(match net.layout {
                PairLayout::SharedSource => Variant::MStar,
                PairLayout::Pairs => Variant::M,
            });
            let cuts: Vec<i64> = systems.iter().map(|s| s.len() as i64).collect();
            let bound = bounds::bound_report(variant, &cuts).ok();
            let merges = merging_edges(systems.iter().flat_map(|s| s.paths()));
            let count = count_mergings(&systems);
            let encoding = dot::encoding_nodes(g, &merges);
            if let Some(path) = dot {
                std::fs::write(&path, dot::network_dot(&net, &merges))?;
            }
            RunReport::new(
                "minimize",
                Some(&net),
                json!({
                    "minimized": minimized,
                    "initial_count": before,
                    "final_count": count,
                    "within_upper": bound.as_ref().map(|b| count as u64 <= b.upper),
                    "bound": bound,
                    "pairwise": pairwise_json(g, &systems),
                    "merge_edges": edge_names(g, &merges),
                    "encoding_nodes": encoding,
                    "trace": trace.map(|t| report::trace_json(g, &t)),
                    "systems": systems_json(g, &systems),
                }),
            )
        }
        Command::Oracle { file, budget, jobs } => {
            let net = load(&file)?;
            let g = &net.dag;
            if !g.is_acyclic() {
                return Err(Error::CyclicInput.into());
            }
            let r = brute_force_min(g, &net.pairs, &OracleConfig { budget, jobs })?;
            RunReport::new(
                "oracle",
                Some(&net),
                json!({
                    "value": r.value,
                    "systems_enumerated": r.systems_enumerated,
                    "merge_edges": edge_names(g, &merging_edges(r.witness.iter().flat_map(|s| s.paths()))),
                    "systems": systems_json(g, &r.witness),
                }),
            )
        }
        Command::Bounds { variant, cuts } => {
            RunReport::new("bounds", None, serde_json::to_value(bounds::bound_report(variant, &cuts)?)?)
        }
        Command::Gen { name, params, out, regen_extremal, data_dir, list } => {
            if list {
                println!("{}", generators::GENERATORS.join("\n"));
                return Ok(());
            }
            if regen_extremal {
                let config = OracleConfig { budget: 50_000_000, jobs: 1 };
                for path in generators::regenerate_extremal(&data_dir, &config)? {
                    eprintln!("wrote {}", path.display());
                }
                return Ok(());
            }
            let inst: Instance = generators::generate(name.as_deref().unwrap_or_default(), &params)?;
            match out {
                Some(path) => std::fs::write(&path, inst.to_text())?,
                None => print!("{}", inst.to_text()),
            }
            return Ok(());
        }
    };
    println!("{}", report.finish(start).to_json());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded(_)) => 3,
        Some(Error::CyclicInput) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
