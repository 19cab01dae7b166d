//! Point generators and the scaling-experiment harness.
//!
//! Every cell `(n, seed, trial)` runs the pipeline stages in order and emits
//! long-format rows `exp,n,d,seed,trial,stage,metric,value,status`. A stage
//! that errors or exceeds its time limit is recorded with that status and the
//! remaining stages of the cell are marked `skipped`.

use std::str::FromStr;
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{decompose_by_separators, expand_weighted, heuristic_decompose, validate_td, MIN_SIZE};
use crate::error::{Error, Result};
use crate::hypgeo::{ball_volume, horosphere_embed, sample_uniform_ball, HPoint, MAX_RADIUS};
use crate::nubg::{build_graph, partition_spec, tiling_partition, NoisePolicy, NubgInstance, Partition};
use crate::separator::{separator_for_partition, validate_separator, SeparatorOptions};
use crate::solvers::{brute_force, solve_ds, solve_is, DpBudget, Problem};
use crate::tiling::SquareTilingSpec;

pub const CSV_HEADER: &str = "exp,n,d,seed,trial,stage,metric,value,status";

/// Largest `n` for which the solver experiment consults the brute-force oracle.
pub const ORACLE_MAX_N: usize = 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PointKind {
    /// Uniform in the ball of the given radius about the origin.
    UniformBall { radius: f64 },
    /// `per_tile` uniform points in each tile of the partition tiling for
    /// `rho`, nearest tiles first; `0` means `ceil(sqrt n)`.
    PerTile { per_tile: usize, rho: f64 },
    /// Square grid of spacing `side` on the horosphere of height 1.
    HorosphereGrid { side: f64 },
}

/// Radius of the ball of volume `vol` in dimension `d`.
pub fn volume_radius(d: usize, vol: f64) -> Result<f64> {
    if ball_volume(d, MAX_RADIUS)? < vol {
        return Err(Error::OutOfRange(MAX_RADIUS));
    }
    let (mut lo, mut hi) = (0.0, MAX_RADIUS);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ball_volume(d, mid)? < vol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn gen_points(kind: &PointKind, n: usize, d: usize, seed: u64) -> Result<Vec<HPoint>> {
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        PointKind::UniformBall { radius } => {
            if !(radius >= 0.0) {
                return Err(Error::InvalidArgument(format!("radius must be non-negative, got {radius}")));
            }
            if radius > MAX_RADIUS {
                return Err(Error::OutOfRange(radius));
            }
            (0..n).map(|_| sample_uniform_ball(d, radius, &mut rng)).collect()
        }
        PointKind::PerTile { per_tile, rho } => per_tile_points(&partition_spec(d, rho)?, per_tile, n, &mut rng),
        PointKind::HorosphereGrid { side } => {
            if !(side > 0.0) {
                return Err(Error::InvalidArgument(format!("grid side must be positive, got {side}")));
            }
            let axes = d - 1;
            let per_axis = (1..).find(|&m: &usize| m.pow(axes as u32) >= n).unwrap_or(1);
            let off = (per_axis as f64 - 1.0) / 2.0;
            (0..n)
                .map(|i| {
                    let mut x = Vec::with_capacity(axes);
                    let mut r = i;
                    for _ in 0..axes {
                        x.push(((r % per_axis) as f64 - off) * side);
                        r /= per_axis;
                    }
                    horosphere_embed(&x, 1.0)
                })
                .collect()
        }
    }
}

fn per_tile_points(spec: &SquareTilingSpec, per_tile: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<HPoint>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let per = if per_tile == 0 { (n as f64).sqrt().ceil() as usize } else { per_tile };
    let d = spec.dim;
    let origin = HPoint::origin(d);
    let mut r = ((n as f64).sqrt().ln()).max(spec.delta);
    let tiles = loop {
        let mut t = spec.tiles_within(&origin, r)?;
        if t.len() * per >= n {
            t.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
            break t;
        }
        r += spec.delta;
        if r > MAX_RADIUS {
            return Err(Error::OutOfRange(r));
        }
    };
    let e = 1.0 - d as f64;
    let mut out = Vec::with_capacity(n);
    'fill: for (t, _) in &tiles {
        let (lo, hi) = spec.tile_box(t);
        let (a, b) = (lo[d - 1].powf(e), hi[d - 1].powf(e));
        for _ in 0..per {
            if out.len() == n {
                break 'fill;
            }
            let mut u: Vec<f64> = (0..d - 1).map(|i| rng.random_range(lo[i]..hi[i])).collect();
            let v: f64 = rng.random();
            u.push((a - v * (a - b)).powf(1.0 / e));
            out.push(HPoint::from_halfspace(&u)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Separator,
    Decompose,
    Solve,
    Full,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separator" => Ok(ExperimentKind::Separator),
            "decompose" => Ok(ExperimentKind::Decompose),
            "solve" => Ok(ExperimentKind::Solve),
            "full" => Ok(ExperimentKind::Full),
            _ => Err(Error::InvalidArgument(format!("unknown experiment `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub ns: Vec<usize>,
    pub d: usize,
    pub rho: f64,
    pub nu: f64,
    pub seeds: Vec<u64>,
    pub trials: usize,
    /// Points per unit volume; the sampling radius is chosen so the ball holds `n / density` volume.
    pub density: f64,
    pub noise: f64,
    pub stage_timeout_secs: f64,
    /// Adds a `time_ms` row per stage; such output is no longer reproducible byte for byte.
    pub record_times: bool,
    pub output: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "separator".into(),
            kind: ExperimentKind::Separator,
            ns: Vec::new(),
            d: 2,
            rho: 0.3,
            nu: 1.2,
            seeds: vec![1],
            trials: 1,
            density: 1.0,
            noise: 0.5,
            stage_timeout_secs: 120.0,
            record_times: false,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("n schedule must be strictly increasing".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("at least one explicit seed is required".into()));
        }
        if self.d < 2 || !(self.rho > 0.0) || !(self.nu >= 1.0) || !(self.density > 0.0) {
            return Err(Error::InvalidArgument("need d >= 2, rho > 0, nu >= 1 and density > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.noise) || !(self.stage_timeout_secs > 0.0) {
            return Err(Error::InvalidArgument("noise must lie in [0, 1] and the timeout be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub exp: String,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub trial: usize,
    pub stage: String,
    pub metric: String,
    pub value: String,
    pub status: String,
}

/// Seed of trial `trial` under base seed `seed`; trial 0 uses the base seed itself.
pub fn cell_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Sampling radius used by the harness for `n` points.
pub fn cell_radius(cfg: &ExperimentConfig, n: usize) -> Result<f64> {
    volume_radius(cfg.d, n as f64 / cfg.density)
}

/// Runs `f` on a worker thread and gives up after `limit`; the worker is left to finish on its own.
pub fn with_timeout<T: Send + 'static>(
    limit: Duration,
    f: impl FnOnce() -> Result<T> + Send + 'static,
) -> Option<Result<T>> {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(f());
    });
    match rx.recv_timeout(limit) {
        Ok(r) => Some(r),
        Err(mpsc::RecvTimeoutError::Timeout) => None,
        Err(mpsc::RecvTimeoutError::Disconnected) => Some(Err(Error::Invalid("stage panicked".into()))),
    }
}

struct Cell<'a> {
    cfg: &'a ExperimentConfig,
    n: usize,
    seed: u64,
    trial: usize,
    rows: Vec<Row>,
    failed: bool,
}

type Metrics = Vec<(&'static str, String)>;

impl Cell<'_> {
    fn push(&mut self, stage: &str, metric: &str, value: String, status: &str) {
        self.rows.push(Row {
            exp: self.cfg.name.clone(),
            n: self.n,
            d: self.cfg.d,
            seed: self.seed,
            trial: self.trial,
            stage: stage.into(),
            metric: metric.into(),
            value,
            status: status.into(),
        });
    }

    fn stage<T: Send + 'static>(
        &mut self,
        name: &str,
        f: impl FnOnce() -> Result<(T, Metrics)> + Send + 'static,
    ) -> Option<T> {
        if self.failed {
            self.push(name, "-", String::new(), "skipped");
            return None;
        }
        let start = Instant::now();
        let out = with_timeout(Duration::from_secs_f64(self.cfg.stage_timeout_secs), f);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let res = match out {
            None => {
                self.push(name, "-", String::new(), "timeout");
                None
            }
            Some(Err(e)) => {
                let msg = e.to_string().replace([',', '\n', '"'], ";");
                self.push(name, "-", String::new(), &format!("error: {msg}"));
                None
            }
            Some(Ok((v, metrics))) => {
                for (m, x) in metrics {
                    self.push(name, m, x, "ok");
                }
                Some(v)
            }
        };
        if self.cfg.record_times {
            self.push(name, "time_ms", format!("{ms:.3}"), if res.is_some() { "ok" } else { "-" });
        }
        self.failed |= res.is_none();
        res
    }
}

fn b(x: bool) -> String {
    u8::from(x).to_string()
}

fn run_cell(cfg: &ExperimentConfig, n: usize, base_seed: u64, trial: usize) -> Vec<Row> {
    let seed = cell_seed(base_seed, trial);
    let mut cell = Cell { cfg, n, seed, trial, rows: Vec::new(), failed: false };
    let (d, rho, nu, noise) = (cfg.d, cfg.rho, cfg.nu, cfg.noise);
    let kind = cfg.kind;
    let radius = cell_radius(cfg, n);

    let pts = cell.stage("gen", move || {
        let r = radius?;
        let pts = gen_points(&PointKind::UniformBall { radius: r }, n, d, seed)?;
        Ok((pts, vec![("radius", r.to_string())]))
    });
    let inst = cell.stage("graph", move || {
        let inst = build_graph(&pts.unwrap_or_default(), rho, nu, NoisePolicy::Bernoulli { p: noise, seed })?;
        let m = inst.graph.m().to_string();
        Ok((Arc::new(inst), vec![("edges", m)]))
    });
    let spec = partition_spec(d, rho);
    let part = {
        let (inst, spec) = (inst.clone(), spec.clone());
        cell.stage("partition", move || {
            let inst = inst.expect("graph stage succeeded");
            let part = tiling_partition(&inst, &spec?)?;
            let metrics = vec![
                ("classes", part.len().to_string()),
                ("max_class", part.classes.iter().map(Vec::len).max().unwrap_or(0).to_string()),
            ];
            Ok((Arc::new(part), metrics))
        })
    };
    if matches!(kind, ExperimentKind::Separator | ExperimentKind::Full) {
        let (inst, spec, part) = (inst.clone(), spec.clone(), part.clone());
        cell.stage("separator", move || {
            let (inst, part) = (inst.expect("graph"), part.expect("partition"));
            let opts = SeparatorOptions { seed, ..SeparatorOptions::default() };
            let sep = separator_for_partition(&inst, &spec?, &part, &opts)?;
            let rep = validate_separator(&inst, &part, &sep, opts.eps_bal);
            Ok((
                (),
                vec![
                    ("size", sep.size.to_string()),
                    ("weight", sep.weight.to_string()),
                    ("balance", sep.balance.to_string()),
                    ("classes", sep.classes.len().to_string()),
                    ("valid", b(rep.valid)),
                ],
            ))
        });
    }
    if matches!(kind, ExperimentKind::Separator) {
        return cell.rows;
    }
    let decomp = {
        let (inst, spec) = (inst.clone(), spec.clone());
        cell.stage("decompose", move || {
            let inst = inst.expect("graph");
            let (p, _, wtd) = decompose_by_separators(&inst, &spec?, MIN_SIZE, seed)?;
            let td = expand_weighted(&wtd, &p);
            let rep = validate_td(&inst.graph, &td);
            let heur = heuristic_decompose(&inst.graph).width();
            let metrics = vec![
                ("bags", wtd.td.bags.len().to_string()),
                ("weighted_width", wtd.weighted_width().to_string()),
                ("width", rep.width.to_string()),
                ("heuristic_width", heur.to_string()),
                ("valid", b(rep.valid)),
            ];
            Ok((Arc::new((p, wtd)), metrics))
        })
    };
    if matches!(kind, ExperimentKind::Decompose) {
        return cell.rows;
    }
    cell.stage("solve", move || {
        let (inst, pw) = (inst.expect("graph"), decomp.expect("decompose"));
        solve_metrics(&inst, &pw.0, &pw.1)
    });
    cell.rows
}

/// Independent set and dominating set values on a decomposition, checked
/// against the oracle when `n <= ORACLE_MAX_N`.
pub fn solve_metrics(
    inst: &NubgInstance,
    part: &Partition,
    wtd: &crate::decomp::WeightedTreeDecomposition,
) -> Result<((), Metrics)> {
    let budget = DpBudget::default();
    let is = solve_is(&inst.graph, wtd, part, &budget)?;
    let ds = solve_ds(&inst.graph, wtd, part, &budget)?;
    let mut m = vec![
        ("is", is.value.to_string()),
        ("ds", ds.value.to_string()),
        ("max_states", is.stats.max_states.max(ds.stats.max_states).to_string()),
    ];
    if inst.n() <= ORACLE_MAX_N {
        let ok = brute_force(Problem::Is, &inst.graph)?.value == Some(is.value)
            && brute_force(Problem::Ds, &inst.graph)?.value == Some(ds.value);
        m.push(("matches_oracle", b(ok)));
    }
    Ok(((), m))
}

/// All rows of the experiment, ordered by `(n, seed, trial)` regardless of scheduling.
///
/// Cells run on their own pool so that stages using the global pool cannot starve.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let cells: Vec<(usize, u64, usize)> = cfg
        .ns
        .iter()
        .flat_map(|&n| cfg.seeds.iter().flat_map(move |&s| (0..cfg.trials).map(move |t| (n, s, t))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().build().map_err(|e| Error::Io(e.to_string()))?;
    let rows = pool.install(|| cells.into_par_iter().map(|(n, s, t)| run_cell(cfg, n, s, t)).collect::<Vec<_>>());
    Ok(rows.concat())
}

pub fn rows_to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).expect("csv output is utf-8");
    Ok(format!("{CSV_HEADER}\n{body}"))
}

pub fn rows_from_csv(s: &str) -> Result<Vec<Row>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(s.as_bytes());
    r.deserialize().enumerate().map(|(i, x)| x.map_err(|e| Error::Parse { line: i + 2, msg: e.to_string() })).collect()
}

/// Values of `metric` at `stage`, keyed by `n`, skipping rows that did not succeed.
pub fn metric_series(rows: &[Row], stage: &str, metric: &str) -> Vec<(usize, f64)> {
    rows.iter()
        .filter(|r| r.stage == stage && r.metric == metric && r.status == "ok")
        .filter_map(|r| r.value.parse().ok().map(|v| (r.n, v)))
        .collect()
}
