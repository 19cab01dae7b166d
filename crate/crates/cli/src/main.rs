use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyptw::decomp::{decompose_by_separators, heuristic_decompose, validate_td, WeightedTreeDecomposition, MIN_SIZE};
use hyptw::experiment::{
    gen_points, rows_to_csv, run_experiment, volume_radius, ExperimentConfig, ExperimentKind, PointKind,
};
use hyptw::hardness::{build_grid_embedding, gtleq_to_is, random_gt_instance, reduction_vertex_count, GtMode};
use hyptw::hypgeo::Model;
use hyptw::io;
use hyptw::nubg::{build_graph, contract, greedy_partition, partition_spec, tiling_partition, NoisePolicy, Partition};
use hyptw::separator::{separator_for_partition, validate_separator, SeparatorOptions};
use hyptw::solvers::{solve_ds, solve_hamiltonian, solve_is, solve_qcoloring, solve_vc, DpBudget};
use hyptw::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "hyptw", version, about = "Noisy uniform ball graph pipeline")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    GenPoints(GenPoints),
    BuildGraph(BuildGraph),
    Partition(PartitionCmd),
    Separator(SeparatorCmd),
    Decompose(DecomposeCmd),
    Solve(SolveCmd),
    Lowerbound(LowerboundCmd),
    Experiment(ExperimentCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    UniformBall,
    PerTile,
    HorosphereGrid,
}

/// Sample a point set.
#[derive(Args)]
struct GenPoints {
    #[arg(long, value_enum, default_value = "uniform-ball")]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    seed: u64,
    /// Ball radius; defaults to the radius of volume n.
    #[arg(long)]
    radius: Option<f64>,
    /// Points per tile for per-tile; 0 means ceil(sqrt n).
    #[arg(long, default_value_t = 0)]
    per_tile: usize,
    #[arg(long, default_value_t = 0.3)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    side: f64,
    #[arg(long, default_value = "hyperboloid")]
    model: Model,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Build a graph over a point file.
#[derive(Args)]
struct BuildGraph {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    /// Edge probability in the gray zone.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartKind {
    Tiling,
    Greedy,
    Singletons,
}

/// Partition the vertices of an instance.
#[derive(Args)]
struct PartitionCmd {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tiling")]
    kind: PartKind,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Find a balanced clique-weighted separator.
#[derive(Args)]
struct SeparatorCmd {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    trials: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Separators,
    Heuristic,
}

/// Weighted tree decomposition of the partition quotient.
#[derive(Args)]
struct DecomposeCmd {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "separators")]
    method: Method,
    /// Partition for the heuristic method; singletons otherwise.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Decomposition output; bags hold class ids.
    #[arg(short, long)]
    out: PathBuf,
    /// Partition output matching the decomposition.
    #[arg(long)]
    partition_out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ProblemArg {
    Is,
    Vc,
    Ds,
    Col,
    Hc,
}

/// Solve a problem exactly.
#[derive(Args)]
struct SolveCmd {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    /// Weighted decomposition over the classes of `--partition`.
    #[arg(long, requires = "partition")]
    td: Option<PathBuf>,
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long)]
    max_states: Option<usize>,
}

/// Random Grid Tiling-<= instance and its independent set instance on the pentagon tiling.
#[derive(Args)]
struct LowerboundCmd {
    #[arg(long)]
    k: usize,
    #[arg(long = "N")]
    big_n: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    /// Size parameter for the separation radius of the embedding.
    #[arg(long, default_value_t = 16.0)]
    n_param: f64,
    /// Output prefix; writes PREFIX.gt.json, PREFIX.graph and PREFIX.points.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Run a scaling experiment and write CSV rows.
#[derive(Args)]
struct ExperimentCmd {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(json: bool, v: Value, to_stderr: bool) {
    let s = if json {
        v.to_string()
    } else {
        v.as_object()
            .map(|o| o.iter().map(|(k, x)| format!("{k}: {x}")).collect::<Vec<_>>().join("\n"))
            .unwrap_or_else(|| v.to_string())
    };
    if to_stderr {
        eprintln!("{s}");
    } else {
        println!("{s}");
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn load_instance(graph: &PathBuf, points: &PathBuf) -> Result<hyptw::nubg::NubgInstance> {
    io::read_instance(&io::read_file(graph)?, &io::read_file(points)?)
}

fn weighted_td(td: &PathBuf, part: &Partition, g: &hyptw::graph::Graph) -> Result<WeightedTreeDecomposition> {
    let (td, n, _) = io::read_td(&io::read_file(td)?)?;
    if n != part.len() {
        return Err(Error::Invalid(format!("decomposition covers {n} classes, partition has {}", part.len())));
    }
    let q = contract(g, part)?;
    let rep = validate_td(&q.graph, &td);
    if !rep.valid {
        return Err(Error::Invalid(format!("decomposition is not valid for the quotient: {:?}", rep.violation)));
    }
    Ok(WeightedTreeDecomposition { td, weights: q.weights })
}

fn run(cli: Cli) -> Result<()> {
    let json = cli.json;
    match cli.cmd {
        Cmd::GenPoints(a) => {
            let kind = match a.kind {
                Kind::UniformBall => {
                    let radius = match a.radius {
                        Some(r) => r,
                        None => volume_radius(a.d, a.n as f64)?,
                    };
                    PointKind::UniformBall { radius }
                }
                Kind::PerTile => PointKind::PerTile { per_tile: a.per_tile, rho: a.rho },
                Kind::HorosphereGrid => PointKind::HorosphereGrid { side: a.side },
            };
            let pts = gen_points(&kind, a.n, a.d, a.seed)?;
            emit(&a.out, &io::write_points(&pts, a.model)?)?;
            report(
                json,
                json!({"points": pts.len(), "d": a.d, "kind": serde_json::to_value(&kind).unwrap()}),
                a.out.is_none(),
            );
        }
        Cmd::BuildGraph(a) => {
            let pts = io::read_points(&io::read_file(&a.points)?)?;
            let inst = build_graph(&pts, a.rho, a.nu, NoisePolicy::Bernoulli { p: a.noise, seed: a.seed })?;
            emit(&a.out, &io::write_graph(&inst.graph, inst.rho, inst.nu))?;
            report(json, json!({"n": inst.n(), "m": inst.graph.m()}), a.out.is_none());
        }
        Cmd::Partition(a) => {
            let text = io::read_file(&a.graph)?;
            let p = match a.kind {
                PartKind::Tiling => {
                    let pts = a.points.as_ref().ok_or_else(|| Error::InvalidArgument("--points is required".into()))?;
                    let inst = io::read_instance(&text, &io::read_file(pts)?)?;
                    tiling_partition(&inst, &partition_spec(inst.dim(), inst.rho)?)?
                }
                PartKind::Greedy => {
                    let seed = a.seed.ok_or_else(|| Error::InvalidArgument("--seed is required".into()))?;
                    greedy_partition(&io::read_graph(&text)?.0, seed)
                }
                PartKind::Singletons => Partition::singletons(io::read_graph(&text)?.0.n()),
            };
            emit(&a.out, &io::write_partition(&p))?;
            let largest = p.classes.iter().map(Vec::len).max().unwrap_or(0);
            report(json, json!({"classes": p.len(), "max_class": largest}), a.out.is_none());
        }
        Cmd::Separator(a) => {
            let inst = load_instance(&a.graph, &a.points)?;
            let spec = partition_spec(inst.dim(), inst.rho)?;
            let part = tiling_partition(&inst, &spec)?;
            let opts = SeparatorOptions { seed: a.seed, trials: a.trials, ..SeparatorOptions::default() };
            let sep = separator_for_partition(&inst, &spec, &part, &opts)?;
            let rep = validate_separator(&inst, &part, &sep, opts.eps_bal);
            let vertices: Vec<usize> =
                sep.classes.iter().flat_map(|&c| part.classes[c].iter().map(|v| v + 1)).collect();
            report(
                json,
                json!({
                    "size": sep.size, "weight": sep.weight, "balance": sep.balance, "valid": rep.valid,
                    "classes": one_based(&sep.classes), "vertices": vertices,
                }),
                false,
            );
        }
        Cmd::Decompose(a) => {
            let gtext = io::read_file(&a.graph)?;
            let (part, wtd) = match a.method {
                Method::Separators => {
                    let pts = a.points.as_ref().ok_or_else(|| Error::InvalidArgument("--points is required".into()))?;
                    let seed = a.seed.ok_or_else(|| Error::InvalidArgument("--seed is required".into()))?;
                    let inst = io::read_instance(&gtext, &io::read_file(pts)?)?;
                    let (p, _, wtd) =
                        decompose_by_separators(&inst, &partition_spec(inst.dim(), inst.rho)?, MIN_SIZE, seed)?;
                    (p, wtd)
                }
                Method::Heuristic => {
                    let g = io::read_graph(&gtext)?.0;
                    let p = match &a.partition {
                        Some(f) => io::read_partition(&io::read_file(f)?)?,
                        None => Partition::singletons(g.n()),
                    };
                    let q = contract(&g, &p)?;
                    (p, WeightedTreeDecomposition { td: heuristic_decompose(&q.graph), weights: q.weights })
                }
            };
            let bag_w: Vec<f64> = wtd.td.bags.iter().map(|b| b.iter().map(|&c| wtd.weights[c]).sum()).collect();
            io::write_file(&a.out, &io::write_td(&wtd.td, part.len(), Some(&bag_w)))?;
            io::write_file(&a.partition_out, &io::write_partition(&part))?;
            report(
                json,
                json!({"bags": wtd.td.bags.len(), "classes": part.len(), "weighted_width": wtd.weighted_width()}),
                false,
            );
        }
        Cmd::Solve(a) => {
            let g = io::read_graph(&io::read_file(&a.graph)?)?.0;
            let part = match &a.partition {
                Some(f) => io::read_partition(&io::read_file(f)?)?,
                None => Partition::singletons(g.n()),
            };
            part.validate(&g)?;
            let wtd = match &a.td {
                Some(f) => weighted_td(f, &part, &g)?,
                None => {
                    let q = contract(&g, &part)?;
                    WeightedTreeDecomposition { td: heuristic_decompose(&q.graph), weights: q.weights }
                }
            };
            let mut budget = DpBudget::default();
            if let Some(m) = a.max_states {
                budget.max_states = m;
            }
            let out = match a.problem {
                ProblemArg::Is | ProblemArg::Vc | ProblemArg::Ds => {
                    let s = match a.problem {
                        ProblemArg::Is => solve_is(&g, &wtd, &part, &budget)?,
                        ProblemArg::Vc => solve_vc(&g, &wtd, &part, &budget)?,
                        _ => solve_ds(&g, &wtd, &part, &budget)?,
                    };
                    json!({"value": s.value, "witness": one_based(&s.witness), "max_states": s.stats.max_states})
                }
                ProblemArg::Col => match solve_qcoloring(&g, a.q, &part, &budget)? {
                    Some(c) => json!({"colorable": true, "q": a.q, "coloring": c}),
                    None => json!({"colorable": false, "q": a.q}),
                },
                ProblemArg::Hc => match solve_hamiltonian(&g, &part, &budget)?.0 {
                    Some(c) => json!({"hamiltonian": true, "cycle": one_based(&c)}),
                    None => json!({"hamiltonian": false}),
                },
            };
            report(json, out, false);
        }
        Cmd::Lowerbound(a) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let inst = random_gt_instance(a.k, a.big_n, GtMode::Leq, a.density, &mut rng)?;
            let emb = build_grid_embedding(a.n_param, a.k)?;
            let red = gtleq_to_is(&inst, &emb)?;
            let h = &red.instance;
            if let Some(prefix) = &a.out {
                let with = |ext: &str| PathBuf::from(format!("{}.{ext}", prefix.display()));
                io::write_file(with("gt.json"), &inst.to_json())?;
                io::write_file(with("graph"), &io::write_graph(&h.graph, h.rho, h.nu))?;
                io::write_file(with("points"), &io::write_points(&h.points, Model::Hyperboloid)?)?;
            }
            let interiors: Vec<usize> = emb.paths.iter().map(|p| p.interior().len()).collect();
            report(
                json,
                json!({
                    "k": a.k, "N": a.big_n, "pairs": inst.total_pairs(), "path_interiors": interiors,
                    "vertices": h.n(), "formula": reduction_vertex_count(&inst, &emb), "edges": h.graph.m(),
                    "target": red.target, "rho": h.rho,
                }),
                false,
            );
        }
        Cmd::Experiment(a) => {
            let mut cfg = match &a.config {
                Some(f) => serde_json::from_str::<ExperimentConfig>(&io::read_file(f)?)
                    .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?,
                None => ExperimentConfig::default(),
            };
            if let Some(k) = &a.kind {
                cfg.kind = k.parse::<ExperimentKind>()?;
                cfg.name = k.clone();
            }
            if let Some(x) = a.name {
                cfg.name = x;
            }
            if let Some(x) = a.ns {
                cfg.ns = x;
            }
            if let Some(x) = a.d {
                cfg.d = x;
            }
            if let Some(x) = a.rho {
                cfg.rho = x;
            }
            if let Some(x) = a.nu {
                cfg.nu = x;
            }
            if let Some(x) = a.seeds {
                cfg.seeds = x;
            }
            if let Some(x) = a.trials {
                cfg.trials = x;
            }
            if let Some(x) = a.timeout {
                cfg.stage_timeout_secs = x;
            }
            let out = a.out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
            let rows = run_experiment(&cfg)?;
            emit(&out, &rows_to_csv(&rows)?)?;
            let bad = rows.iter().filter(|r| r.status != "ok").count();
            report(json, json!({"rows": rows.len(), "not_ok": bad}), out.is_none());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
