//! Centerpoints and balanced clique-weighted separators.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeo::{self, HPoint, Hyperplane};
use crate::nubg::{class_weight, tiling_partition, NubgInstance, Partition};
use crate::tiling::SquareTilingSpec;

/// Default slack added to the `d/(d+1)` balance target.
pub const EPS_BAL: f64 = 0.05;

/// Largest input handled by the exact planar centerpoint in [`CenterpointMode::Auto`].
pub const EXACT2D_MAX: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CenterpointMode {
    Exact2d,
    Radon {
        eps: f64,
        seed: u64,
    },
    /// `Exact2d` for small planar inputs, otherwise best of several approximations.
    Auto {
        seed: u64,
    },
}

pub fn centerpoint(points: &[HPoint], mode: CenterpointMode) -> Result<HPoint> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("centerpoint of an empty set".into()));
    }
    let d = points[0].dim();
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch(p.dim(), d));
    }
    let k: Vec<Vec<f64>> = points.iter().map(HPoint::klein_unchecked).collect();
    let c = match mode {
        CenterpointMode::Exact2d => {
            if d != 2 {
                return Err(Error::InvalidArgument("exact centerpoint needs d = 2".into()));
            }
            exact2d(&k).unwrap_or_else(|| approx(&k, 0))
        }
        CenterpointMode::Radon { seed, .. } => approx(&k, seed),
        CenterpointMode::Auto { seed } => {
            if d == 2 && k.len() <= EXACT2D_MAX {
                exact2d(&k).unwrap_or_else(|| approx(&k, seed))
            } else {
                approx(&k, seed)
            }
        }
    };
    HPoint::from_klein(&c)
}

/// Largest number of points strictly on one side of a line through `c` (Klein coordinates).
pub fn max_open_side_2d(k: &[Vec<f64>], c: &[f64]) -> usize {
    let mut ang: Vec<f64> = k
        .iter()
        .filter_map(|p| {
            let (x, y) = (p[0] - c[0], p[1] - c[1]);
            if x.abs() < 1e-15 && y.abs() < 1e-15 {
                None
            } else {
                Some(y.atan2(x))
            }
        })
        .collect();
    ang.sort_by(f64::total_cmp);
    let m = ang.len();
    if m == 0 {
        return 0;
    }
    let ext: Vec<f64> = ang.iter().cloned().chain(ang.iter().map(|a| a + 2.0 * std::f64::consts::PI)).collect();
    let mut best = 0;
    let mut j = 0;
    for i in 0..m {
        j = j.max(i);
        while j < i + m && ext[j] < ext[i] + std::f64::consts::PI - 1e-12 {
            j += 1;
        }
        best = best.max(j - i);
    }
    best
}

/// Largest fraction of points strictly on one side, over `trials` random hyperplanes through `c`.
pub fn sampled_max_side(k: &[Vec<f64>], c: &[f64], trials: usize, seed: u64) -> f64 {
    let d = c.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0usize;
    for _ in 0..trials {
        let u = hypgeo::random_direction(d, &mut rng);
        let (mut pos, mut neg) = (0, 0);
        for p in k {
            let s: f64 = (0..d).map(|i| (p[i] - c[i]) * u[i]).sum();
            if s > 1e-15 {
                pos += 1;
            } else if s < -1e-15 {
                neg += 1;
            }
        }
        worst = worst.max(pos).max(neg);
    }
    worst as f64 / k.len() as f64
}

/// Exact planar centerpoint: the average vertex of the centerpoint region.
fn exact2d(k: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = k.len();
    if k.iter().all(|p| (p[0] - k[0][0]).abs() < 1e-15 && (p[1] - k[0][1]).abs() < 1e-15) {
        return Some(k[0].clone());
    }
    let b = 2 * n / 3;
    let mut dirs: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (k[j][0] - k[i][0], k[j][1] - k[i][1]);
            if x * x + y * y > 1e-28 {
                let t = y.atan2(x) + std::f64::consts::FRAC_PI_2;
                dirs.push(t.rem_euclid(std::f64::consts::PI));
                dirs.push(t.rem_euclid(std::f64::consts::PI) + std::f64::consts::PI);
            }
        }
    }
    dirs.sort_by(f64::total_cmp);
    dirs.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let m = dirs.len();
    let mut all = Vec::with_capacity(2 * m);
    for i in 0..m {
        all.push(dirs[i]);
        let next = if i + 1 < m { dirs[i + 1] } else { dirs[0] + 2.0 * std::f64::consts::PI };
        all.push((dirs[i] + next) / 2.0);
    }
    let halfplanes: Vec<([f64; 2], f64)> = all
        .par_iter()
        .map(|&t| {
            let u = [t.cos(), t.sin()];
            let mut v: Vec<f64> = k.iter().map(|p| p[0] * u[0] + p[1] * u[1]).collect();
            let (_, q, _) = v.select_nth_unstable_by(n - 1 - b, |a, b| a.total_cmp(b));
            (u, *q)
        })
        .collect();
    let mut poly = vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    for (u, q) in halfplanes {
        poly = clip(&poly, u, q - 1e-12);
        if poly.is_empty() {
            return None;
        }
    }
    let m = poly.len() as f64;
    let c = [poly.iter().map(|p| p[0]).sum::<f64>() / m, poly.iter().map(|p| p[1]).sum::<f64>() / m];
    if max_open_side_2d(k, &c) <= b {
        Some(c.to_vec())
    } else {
        None
    }
}

/// Keeps the part of a convex polygon with `u . x >= q`.
fn clip(poly: &[[f64; 2]], u: [f64; 2], q: f64) -> Vec<[f64; 2]> {
    let f = |p: &[f64; 2]| p[0] * u[0] + p[1] * u[1] - q;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (fa, fb) = (f(&a), f(&b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Radon point of `d + 2` points in R^d.
pub fn radon_point(pts: &[Vec<f64>]) -> Vec<f64> {
    let d = pts[0].len();
    let m = pts.len();
    assert_eq!(m, d + 2, "radon point needs d + 2 points");
    // rows: coordinates and the all-ones row; columns: points
    let mut a: Vec<Vec<f64>> = (0..=d).map(|r| (0..m).map(|c| if r < d { pts[c][r] } else { 1.0 }).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        if row > d {
            break;
        }
        let piv = (row..=d).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        if a[piv][col].abs() < 1e-14 {
            continue;
        }
        a.swap(row, piv);
        let p = a[row][col];
        for c in 0..m {
            a[row][c] /= p;
        }
        for r in 0..=d {
            if r != row && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in 0..m {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..m).find(|c| !pivots.contains(c)).unwrap();
    let mut lam = vec![0.0; m];
    lam[free] = 1.0;
    for (r, &pc) in pivots.iter().enumerate() {
        lam[pc] = -a[r][free];
    }
    let pos: f64 = lam.iter().filter(|&&l| l > 0.0).sum();
    if !(pos > 1e-14) {
        return mean(pts);
    }
    (0..d).map(|i| (0..m).filter(|&j| lam[j] > 0.0).map(|j| lam[j] * pts[j][i]).sum::<f64>() / pos).collect()
}

fn mean(pts: &[Vec<f64>]) -> Vec<f64> {
    let d = pts[0].len();
    (0..d).map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / pts.len() as f64).collect()
}

/// Iterated Radon point of a random sample of `(d+2)^levels` points.
fn radon_tree<R: Rng + ?Sized>(k: &[Vec<f64>], levels: u32, rng: &mut R) -> Vec<f64> {
    let g = k[0].len() + 2;
    let mut cur: Vec<Vec<f64>> = (0..g.pow(levels)).map(|_| k.choose(rng).unwrap().clone()).collect();
    while cur.len() > 1 {
        cur = cur.chunks(g).map(radon_point).collect();
    }
    cur.pop().unwrap()
}

/// Best of several approximate centerpoints, scored exactly in the plane and by sampling otherwise.
fn approx(k: &[Vec<f64>], seed: u64) -> Vec<f64> {
    let d = k[0].len();
    if k.len() <= d + 1 {
        return mean(k);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = d + 2;
    let levels = ((2000f64).ln() / (g as f64).ln()).ceil() as u32;
    let mut cands: Vec<Vec<f64>> = (0..8).map(|_| radon_tree(k, levels, &mut rng)).collect();
    if d == 2 {
        for _ in 0..3 {
            let sub: Vec<Vec<f64>> = k.choose_multiple(&mut rng, EXACT2D_MAX.min(k.len()) / 2).cloned().collect();
            if let Some(c) = exact2d(&sub) {
                cands.push(c);
            }
        }
    }
    cands.push(coordinate_median(k));
    let score_seed = rng.random();
    let scores: Vec<f64> = cands
        .par_iter()
        .map(|c| {
            if d == 2 {
                max_open_side_2d(k, c) as f64 / k.len() as f64
            } else {
                sampled_max_side(k, c, 1000, score_seed)
            }
        })
        .collect();
    let best = (0..cands.len()).min_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
    cands.swap_remove(best)
}

fn coordinate_median(k: &[Vec<f64>]) -> Vec<f64> {
    (0..k[0].len())
        .map(|i| {
            let mut v: Vec<f64> = k.iter().map(|p| p[i]).collect();
            let mid = v.len() / 2;
            *v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b)).1
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueSeparator {
    /// Indices into the partition's class list, sorted.
    pub classes: Vec<usize>,
    pub size: usize,
    pub weight: f64,
    pub balance: f64,
    pub hyperplane: Hyperplane,
    pub trials_used: usize,
    /// Index of the trial that produced this separator.
    pub trial: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatorOptions {
    pub trials: usize,
    pub seed: u64,
    pub eps_bal: f64,
}

impl Default for SeparatorOptions {
    fn default() -> Self {
        SeparatorOptions { trials: 64, seed: 0, eps_bal: EPS_BAL }
    }
}

/// Balance target `d/(d+1) + eps`.
pub fn balance_target(d: usize, eps: f64) -> f64 {
    d as f64 / (d as f64 + 1.0) + eps
}

/// Separator of an embedded instance over its tiling partition, which is returned alongside.
pub fn find_separator(
    inst: &NubgInstance,
    spec: &SquareTilingSpec,
    opts: &SeparatorOptions,
) -> Result<(Partition, CliqueSeparator)> {
    let part = tiling_partition(inst, spec)?;
    let sep = separator_for_partition(inst, spec, &part, opts)?;
    Ok((part, sep))
}

/// Separator drawn from the classes of an existing tiling partition.
pub fn separator_for_partition(
    inst: &NubgInstance,
    spec: &SquareTilingSpec,
    part: &Partition,
    opts: &SeparatorOptions,
) -> Result<CliqueSeparator> {
    if part.tiles.len() != part.classes.len() {
        return Err(Error::InvalidArgument("partition carries no tiles".into()));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let n = inst.n();
    let d = inst.dim().max(spec.dim);
    if n == 0 {
        return Err(Error::InvalidArgument("empty instance".into()));
    }
    let center = centerpoint(&inst.points, CenterpointMode::Auto { seed: opts.seed })?;
    let width = inst.rho * inst.nu;
    let target = balance_target(d, opts.eps_bal);
    let cands: Vec<CliqueSeparator> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(t as u64 + 1);
            let h = hypgeo::random_hyperplane_through(&center, &mut rng);
            let classes: Vec<usize> =
                (0..part.len()).filter(|&c| spec.tile_meets_slab(&part.tiles[c], &h, width)).collect();
            let (balance, _) = balance_after(inst, part, &classes);
            CliqueSeparator {
                size: classes.len(),
                weight: classes.iter().map(|&c| part.weight(c)).sum(),
                classes,
                balance,
                hyperplane: h,
                trials_used: opts.trials,
                trial: t,
            }
        })
        .collect();
    let key = |s: &CliqueSeparator| (s.weight, s.size, s.trial);
    let best = cands.iter().filter(|s| s.balance <= target).min_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    match best {
        Some(s) => Ok(s.clone()),
        None => {
            let fallback = cands.iter().min_by(|a, b| a.balance.total_cmp(&b.balance)).unwrap();
            Err(Error::SeparatorFailed {
                trials: opts.trials,
                best_balance: fallback.balance,
                best: Some(Box::new(fallback.clone())),
            })
        }
    }
}

/// Largest component fraction after deleting the given classes, with component sizes.
pub fn balance_after(inst: &NubgInstance, part: &Partition, classes: &[usize]) -> (f64, Vec<usize>) {
    let n = inst.n();
    let mut removed = vec![false; n];
    for &c in classes {
        for &v in &part.classes[c] {
            removed[v] = true;
        }
    }
    let sizes: Vec<usize> = inst.graph.components_without(&removed).iter().map(Vec::len).collect();
    let bal = if n == 0 { 0.0 } else { sizes.iter().copied().max().unwrap_or(0) as f64 / n as f64 };
    (bal, sizes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatorReport {
    pub valid: bool,
    pub balanced: bool,
    /// Every vertex outside the separator is farther than `rho * nu` from the hyperplane.
    pub witness: bool,
    pub component_sizes: Vec<usize>,
    pub size: usize,
    pub weight: f64,
    pub balance: f64,
    pub target: f64,
}

pub fn validate_separator(
    inst: &NubgInstance,
    part: &Partition,
    sep: &CliqueSeparator,
    eps_bal: f64,
) -> SeparatorReport {
    let (balance, mut component_sizes) = balance_after(inst, part, &sep.classes);
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let target = balance_target(inst.dim(), eps_bal);
    let mut inside = vec![false; inst.n()];
    for &c in &sep.classes {
        for &v in &part.classes[c] {
            inside[v] = true;
        }
    }
    let w = inst.rho * inst.nu;
    let witness = (0..inst.n())
        .filter(|&v| !inside[v])
        .all(|v| hypgeo::dist_to_hyperplane(&inst.points[v], &sep.hyperplane).map_or(false, |x| x.abs() > w));
    let weight = sep.classes.iter().map(|&c| class_weight(part.classes[c].len())).sum();
    let balanced = balance <= target;
    SeparatorReport {
        valid: balanced && witness,
        balanced,
        witness,
        component_sizes,
        size: sep.classes.len(),
        weight,
        balance,
        target,
    }
}
