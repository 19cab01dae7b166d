use std::collections::HashMap;
use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyptw::decomp::*;
use hyptw::experiment::*;
use hyptw::graph::Graph;
use hyptw::hardness::*;
use hyptw::hypgeo::*;
use hyptw::nubg::*;
use hyptw::separator::*;
use hyptw::solvers::*;
use hyptw::tiling::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($c:expr, $($fmt:tt)+) => {
        if !$c {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Least-squares line through the points: `(slope, intercept, r2)`.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn random_isometry(d: usize, rng: &mut ChaCha8Rng) -> Result<Isometry, String> {
    let mut iso = Isometry::boost_to(&ok(sample_uniform_ball(d, 3.0, rng))?);
    for i in 1..=d {
        for j in i + 1..=d {
            iso = iso.compose(&Isometry::rotation(d, i, j, rng.random_range(0.0..2.0 * PI)));
        }
    }
    let h = random_hyperplane_through(&HPoint::origin(d), rng);
    Ok(iso.compose(&Isometry::reflection(&h)))
}

fn geometry() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let models = [Model::Hyperboloid, Model::Ball, Model::Halfspace, Model::Klein];
    let (mut model_err, mut round_err, mut iso_err, mut plane_err, mut form_err) = (0f64, 0f64, 0f64, 0f64, 0f64);
    let mut sign_flips = 0;
    for i in 0..10_000 {
        let d = 2 + i % 2;
        let p = ok(sample_uniform_ball(d, 10.0, &mut rng))?;
        let q = ok(sample_uniform_ball(d, 10.0, &mut rng))?;
        let r = dist(&p, &q);
        form_err = form_err.max((minkowski(p.coords(), p.coords()) + 1.0).abs() / p.coords()[0].powi(2));
        for m in models {
            let back = ok(HPoint::from_model(m, &ok(p.to_model(m))?))?;
            let rt = (0..=d).map(|j| (back.coords()[j] - p.coords()[j]).abs()).fold(0.0, f64::max) / p.coords()[0];
            let x0 = p.coords()[0];
            let cond = if m == Model::Klein { 1.0 + 4.0 * f64::EPSILON * x0 * x0 / 1e-9 } else { 1.0 };
            round_err = round_err.max(rt / cond);
        }
        let scale = r.max(1.0);
        model_err = model_err.max((ball_dist(&ok(p.to_ball())?, &ok(q.to_ball())?) - r).abs() / scale);
        model_err = model_err.max((halfspace_dist(&p.to_halfspace(), &q.to_halfspace()) - r).abs() / scale);
        let k = ok(p.to_klein())?;
        let b = ok(p.to_ball())?;
        let s = (1.0 - k.iter().map(|x| x * x).sum::<f64>()).sqrt();
        for j in 0..d {
            round_err = round_err.max((b[j] - k[j] / (1.0 + s)).abs());
        }
        let iso = random_isometry(d, &mut rng)?;
        form_err = form_err.max(iso.form_defect());
        let (a, b) = (ok(sample_uniform_ball(d, 7.0, &mut rng))?, ok(sample_uniform_ball(d, 7.0, &mut rng))?);
        let moved = dist(&ok(iso.apply(&a))?, &ok(iso.apply(&b))?);
        iso_err = iso_err.max((moved - dist(&a, &b)).abs());
        let base = ok(sample_uniform_ball(d, 5.0, &mut rng))?;
        let h = random_hyperplane_through(&base, &mut rng);
        let sd = ok(dist_to_hyperplane(&p, &h))?;
        let side = minkowski(p.coords(), &h.normal);
        if side.abs() > 1e-9 && (sd > 0.0) != (side > 0.0) {
            sign_flips += 1;
        }
        let back = ok(dist_to_hyperplane(&h.reflect(&p), &h))?;
        plane_err = plane_err.max((sd + back).abs() / sd.abs().max(1.0));
        plane_err = plane_err.max(ok(dist_to_hyperplane(&base, &h))?.abs());
        plane_err = plane_err.max((minkowski(&h.normal, &h.normal) - 1.0).abs());
        let h2 = Hyperplane { normal: iso.apply_vec(&h.normal), basepoint: ok(iso.apply(&base))? };
        let moved_sd = ok(dist_to_hyperplane(&ok(iso.apply(&a))?, &h2))?;
        let sd_a = ok(dist_to_hyperplane(&a, &h))?;
        plane_err = plane_err.max((moved_sd - sd_a).abs() / sd_a.abs().max(1.0));
    }
    ensure!(round_err < 1e-9, "model round trip off by {round_err:e}");
    ensure!(model_err < 1e-8, "model distances disagree by {model_err:e}");
    ensure!(iso_err < 1e-8, "isometry distortion {iso_err:e}");
    ensure!(sign_flips == 0, "{sign_flips} signed distances disagree with the side of the plane");
    ensure!(plane_err < 1e-8, "hyperplane invariant off by {plane_err:e}");
    ensure!(form_err < 1e-8, "Minkowski form defect {form_err:e}");
    Ok(format!("10^4 samples; max errors round trip {round_err:.1e}, model distance {model_err:.1e}, isometry {iso_err:.1e}, hyperplane {plane_err:.1e}"))
}

fn tiling() -> Check {
    let mut worst = 0f64;
    for d in 2..=5 {
        for i in 0..=40 {
            let delta = 10f64.powf(-3.0 + 4.0 * i as f64 / 40.0);
            let sp = ok(square_tiling(d, delta))?;
            let back = (1.0 + d as f64 * sp.s * sp.s / (2.0 * (sp.s + 1.0))).acosh();
            worst = worst.max((back - delta).abs());
        }
    }
    ensure!(worst < 1e-9, "delta round trip off by {worst:e}");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut located = 0;
    for (d, ar, br) in [(2usize, 30i64, 8i64), (3, 6, 4)] {
        let sp = ok(square_tiling(d, 0.8))?;
        let mut a = vec![-ar; d - 1];
        loop {
            for b in -br..=br {
                let t = TileId::new(a.clone(), b);
                ensure!(ok(sp.locate(&ok(sp.tile_center(&t))?))? == t, "center of {t} misplaced");
                let (lo, hi) = sp.tile_box(&t);
                for _ in 0..4 {
                    let u: Vec<f64> = (0..d).map(|i| lo[i] + (hi[i] - lo[i]) * rng.random_range(0.01..0.99)).collect();
                    ensure!(ok(sp.locate_halfspace(&u))? == t, "interior point of {t} misplaced");
                }
                for nb in sp.neighbors(&t).into_iter().take(3) {
                    ensure!(sp.neighbors(&nb).contains(&t), "asymmetric neighbors {t} {nb}");
                }
                located += 1;
            }
            let mut i = 0;
            while i < d - 1 && a[i] == ar {
                a[i] = -ar;
                i += 1;
            }
            if i == d - 1 {
                break;
            }
            a[i] += 1;
        }
    }
    for s in 0..20 {
        let d = 2 + s as usize % 2;
        let mut rng = ChaCha8Rng::seed_from_u64(100 + s);
        let pts = ok(uniform_points(d, 300, 3.0, &mut rng))?;
        let inst = ok(build_graph(&pts, 0.5, 1.2, NoisePolicy::Bernoulli { p: 0.5, seed: s }))?;
        let part = ok(tiling_partition(&inst, &ok(partition_spec(d, 0.5))?))?;
        ok(part.validate(&inst.graph))?;
        ensure!(part.classes.iter().all(|c| inst.graph.is_clique(c)), "non-clique tile class");
    }
    for (delta, q, over) in [(1, 3, None), (2, 3, None), (0, 4, Some(5)), (3, 4, None)] {
        let r = ok(regular_tiling(delta, q, over))?;
        let (m, qf) = (r.gon as f64, q as f64);
        let errs = [
            r.ov - (1.0 / (PI / qf).tan() / (PI / m).tan()).acosh(),
            r.vp - ((PI / m).cos() / (PI / qf).sin()).acosh(),
            r.po - ((PI / qf).cos() / (PI / m).sin()).acosh(),
            r.area - m * 2.0 * (PI - (PI / 2.0 + PI / qf + PI / m)),
            r.perimeter - 2.0 * m * r.vp,
        ];
        ensure!(errs.iter().all(|e| e.abs() < 1e-9), "regular constants off: {errs:?}");
    }
    let ratios: Vec<f64> = (1..=30)
        .map(|d| regular_tiling(d, 3, None).map(|r| r.area / r.perimeter))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure!(ratios.windows(2).all(|w| w[1] > w[0]), "area/perimeter ratio not increasing");
    ensure!(ratios[29] > 0.953, "ratio at 30 is {}", ratios[29]);
    Ok(format!("round trip {worst:.1e}; {located} tiles located; ratio at 30 = {:.5}", ratios[29]))
}

fn growth() -> Check {
    let mut out = Vec::new();
    for (d, rs) in [(2usize, (4..=12).map(f64::from).collect::<Vec<_>>()), (3, vec![2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0])]
    {
        let sp = ok(square_tiling(d, 1.0))?;
        let o = HPoint::origin(d);
        let mut ys = Vec::new();
        for &r in &rs {
            ys.push((ok(sp.tiles_within(&o, r))?.len() as f64).ln());
        }
        let (slope, _, _) = fit(&rs, &ys);
        let want = (d - 1) as f64;
        ensure!((slope - want).abs() <= 0.15 * want, "d={d}: tile growth rate {slope:.3}, want {want}");
        let prof = ok(hyperplane_hit_profile(&sp, 8, 20, 20_000, 0.5, 7))?;
        let (xs, ls): (Vec<f64>, Vec<f64>) =
            prof.iter().filter(|p| p.1 > 0.0).map(|&(j, f)| (j as f64 * sp.tau(), f.ln())).unzip();
        ensure!(xs.len() >= 6, "d={d}: only {} layers hit", xs.len());
        let (decay, _, _) = fit(&xs, &ls);
        ensure!((decay + 1.0).abs() <= 0.2, "d={d}: hit decay rate {decay:.3}, want -1");
        out.push(format!("d={d} growth {slope:.3} decay {decay:.3}"));
    }
    Ok(out.join("; "))
}

fn separators() -> Check {
    let exps = 9..=13u32;
    let seeds = 20u64;
    let mut out = Vec::new();
    for d in [2usize, 3] {
        let (mut xs, mut sizes, mut gammas) = (Vec::new(), Vec::new(), Vec::new());
        let (mut checked, mut failed) = (0, 0);
        for e in exps.clone() {
            let n = 1usize << e;
            let radius = if d == 2 { area_radius(n) } else { ok(volume_radius(3, n as f64))? };
            let spec = ok(partition_spec(d, 0.5))?;
            let (mut s_n, mut g_n) = (Vec::new(), Vec::new());
            for s in 0..seeds {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let pts = ok(uniform_points(d, n, radius, &mut rng))?;
                let inst = ok(build_graph(&pts, 0.5, 1.0, NoisePolicy::None))?;
                match find_separator(&inst, &spec, &SeparatorOptions { seed: s, ..Default::default() }) {
                    Ok((part, sep)) => {
                        let rep = validate_separator(&inst, &part, &sep, EPS_BAL);
                        ensure!(rep.valid, "d={d} n={n} seed {s}: invalid separator {rep:?}");
                        checked += 1;
                        s_n.push(sep.size as f64);
                        g_n.push(sep.weight);
                    }
                    Err(_) => failed += 1,
                }
            }
            ensure!(!s_n.is_empty(), "d={d} n={n}: no separator found");
            xs.push(e as f64);
            sizes.push(median(&mut s_n));
            gammas.push(median(&mut g_n));
        }
        ensure!(checked >= 100, "d={d}: only {checked} separators validated");
        if d == 2 {
            let (slope, _, r2) = fit(&xs, &sizes);
            ensure!(slope > 0.0 && r2 >= 0.8, "d=2 medians {sizes:?}: slope {slope:.3}, R2 {r2:.3}");
            let c = gammas.iter().zip(&xs).map(|(g, x)| g / (x * x)).fold(0.0, f64::max);
            out.push(format!(
                "d=2 {checked} valid, {failed} unsplit, median |S| {sizes:?}, slope {slope:.2}/log2 n, R2 {r2:.3}, gamma <= {c:.3} log2^2 n"
            ));
        } else {
            let lx: Vec<f64> = xs.iter().map(|x| x * 2f64.ln()).collect();
            let ly: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
            let (expo, _, _) = fit(&lx, &ly);
            ensure!((0.35..=0.65).contains(&expo), "d=3 medians {sizes:?}: exponent {expo:.3}");
            out.push(format!("d=3 {checked} valid, {failed} unsplit, median |S| {sizes:?}, exponent {expo:.3}"));
        }
    }
    Ok(out.join("; "))
}

fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                e.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &e).expect("valid edges")
}

fn uniform_instance(n: usize, rho: f64, seed: u64) -> Result<NubgInstance, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = ok(uniform_points(2, n, area_radius(n), &mut rng))?;
    ok(build_graph(&pts, rho, 1.0, NoisePolicy::None))
}

/// Uniform points with at most `cap` per partition tile, so shallowness stays bounded as n grows.
fn capped_instance(n: usize, rho: f64, cap: usize, seed: u64) -> Result<NubgInstance, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = ok(partition_spec(2, rho))?;
    let mut occ = HashMap::new();
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = ok(sample_uniform_ball(2, area_radius(n) + rho, &mut rng))?;
        let c = occ.entry(ok(spec.locate(&p))?).or_insert(0);
        if *c < cap {
            *c += 1;
            pts.push(p);
        }
    }
    ok(build_graph(&pts, rho, 1.0, NoisePolicy::None))
}

fn decompositions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in 0..20 {
        let inst = uniform_instance(300, 0.5, s)?;
        let g = &inst.graph;
        let (p, q, w) = ok(decompose_by_separators(&inst, &ok(partition_spec(2, 0.5))?, MIN_SIZE, s))?;
        ensure!(validate_td(&q.graph, &w.td).valid, "separator decomposition invalid on the quotient");
        ensure!(validate_td(g, &expand_weighted(&w, &p)).valid, "expanded decomposition invalid");
        for td in [
            heuristic_decompose(g),
            elimination_decompose(g, Heuristic::MinDegree),
            elimination_decompose(g, Heuristic::MinFill),
        ] {
            ensure!(validate_td(g, &td).valid, "elimination decomposition invalid");
        }
        let gp = greedy_partition(g, s);
        let gq = ok(contract(g, &gp))?;
        let gw = WeightedTreeDecomposition { td: heuristic_decompose(&gq.graph), weights: gq.weights };
        ensure!(validate_td(g, &expand_weighted(&gw, &gp)).valid, "greedy expansion invalid");
    }
    let mut transforms = 0;
    while transforms < 100 {
        let n = rng.random_range(4..25);
        let g = random_graph(n, rng.random_range(0.08..0.3), &mut rng);
        let delta = g.max_degree() as i64;
        if delta < 2 {
            continue;
        }
        transforms += 1;
        let td = heuristic_decompose(&g);
        let w = td.width();
        let k = rng.random_range(1..=3usize);
        let pw = ok(power_decomposition(&td, &g, k))?;
        ensure!(validate_td(&g.power(k), &pw).valid, "power decomposition invalid");
        ensure!(pw.width() + 1 <= delta.pow(k.div_ceil(2) as u32 + 1) * (w + 1), "power width bound violated");
        let bl = blowup_decomposition(&td, k);
        ensure!(validate_td(&g.blowup(k), &bl).valid, "blowup decomposition invalid");
        ensure!(bl.width() + 1 <= k as i64 * (w + 1), "blowup width bound violated");
    }
    let spec = ok(regular_tiling(1, 3, None))?;
    let (mut sx, mut sw, mut kmax) = (Vec::new(), Vec::new(), 0);
    for e in 8..=12u32 {
        let n = 1usize << e;
        for s in 0..3u64 {
            let inst = capped_instance(n, 0.3, 2, 1000 * e as u64 + s)?;
            let k = ok(shallowness(&inst.points, 0.3))?.1;
            kmax = kmax.max(k);
            let (td, rep) = ok(shallow_decompose(&inst, &spec, k))?;
            let v = validate_td(&inst.graph, &td);
            ensure!(v.valid, "shallow decomposition invalid at n={n}");
            sx.push(e as f64);
            sw.push(rep.width as f64);
        }
    }
    let c_shallow = sw.iter().zip(&sx).filter(|(_, &x)| x <= 10.0).map(|(w, x)| w / x).fold(0.0, f64::max);
    for (w, x) in sw.iter().zip(&sx).filter(|(_, &x)| x > 10.0) {
        ensure!(*w <= 1.1 * c_shallow * x, "shallow width {w} at log2 n = {x} exceeds 1.1 * {c_shallow:.2} * log2 n");
    }
    let (slope, _, _) = fit(&sx, &sw);
    let ratio = spec.area / spec.perimeter;
    let (mut px, mut po, mut first) = (Vec::new(), Vec::new(), Vec::new());
    let mut prng = ChaCha8Rng::seed_from_u64(6);
    for e in 5..=12u32 {
        for _ in 0..5 {
            let mut til = RegularTiling::new(spec.clone());
            let patch = til.random_patch(1 << e, &mut prng);
            let r = layer_peel(&mut til, &patch);
            ensure!(r.layers.iter().map(Vec::len).sum::<usize>() == patch.len(), "peel lost tiles");
            px.push(e as f64);
            po.push(r.outerplanarity as f64);
            first.push(r.fractions[0]);
        }
    }
    let c_peel = po.iter().zip(&px).filter(|(_, &x)| x <= 9.0).map(|(o, x)| o / x).fold(0.0, f64::max);
    for (o, x) in po.iter().zip(&px).filter(|(_, &x)| x > 9.0) {
        ensure!(*o <= 1.1 * c_peel * x, "outerplanarity {o} at log2|S| = {x} exceeds 1.1 * {c_peel:.2} * log2|S|");
    }
    let f0 = first.iter().sum::<f64>() / first.len() as f64;
    ensure!(f0 >= 0.9 * ratio, "mean first peel fraction {f0:.3} below 0.9 * {ratio:.3}");
    Ok(format!(
        "builders valid; {transforms} transforms; shallow width <= {c_shallow:.2} log2 n at k <= {kmax} (slope {slope:.1}); outerplanarity <= {c_peel:.2} log2|S|, first peel {f0:.3}"
    ))
}

fn solver_instance(n: usize, seed: u64) -> Result<NubgInstance, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rng.random_range(0.8..2.2);
    let rho = rng.random_range(0.2..0.6);
    let nu = rng.random_range(1.0..1.6);
    let pts = ok(uniform_points(2, n, r, &mut rng))?;
    ok(build_graph(&pts, rho, nu, NoisePolicy::Bernoulli { p: 0.5, seed }))
}

fn quotient_wtd(g: &Graph, p: &Partition) -> Result<WeightedTreeDecomposition, String> {
    let q = ok(contract(g, p))?;
    Ok(WeightedTreeDecomposition { td: heuristic_decompose(&q.graph), weights: q.weights })
}

fn independent(g: &Graph, s: &[usize]) -> bool {
    s.iter().enumerate().all(|(i, &u)| s[i + 1..].iter().all(|&v| !g.has_edge(u, v)))
}

fn dominating(g: &Graph, s: &[usize]) -> bool {
    let mut dom = vec![false; g.n()];
    for &v in s {
        dom[v] = true;
        for &u in g.neighbors(v) {
            dom[u] = true;
        }
    }
    dom.iter().all(|&d| d)
}

fn solvers() -> Check {
    let b = DpBudget::default();
    let truth = |p: Problem, g: &Graph| ok(brute_force(p, g)).map(|a| a.value);
    for s in 0..200u64 {
        let n = 4 + s as usize % 13;
        let inst = solver_instance(n, s)?;
        let g = &inst.graph;
        let p = if s % 2 == 0 {
            ok(tiling_partition(&inst, &ok(partition_spec(2, inst.rho))?))?
        } else {
            greedy_partition(g, s)
        };
        let wtd = quotient_wtd(g, &p)?;
        let best = truth(Problem::Is, g)?.ok_or("no IS")?;
        let is = ok(solve_is(g, &wtd, &p, &b))?;
        ensure!(is.value == best && is.witness.len() == best && independent(g, &is.witness), "IS mismatch at seed {s}");
        let vc = ok(solve_vc(g, &wtd, &p, &b))?;
        ensure!(Some(vc.value) == truth(Problem::Vc, g)?, "VC mismatch at seed {s}");
        ensure!(g.edges().iter().all(|&(u, v)| vc.witness.contains(&u) || vc.witness.contains(&v)), "bad VC witness");
    }
    for s in 0..200u64 {
        let n = 3 + s as usize % 12;
        let inst = solver_instance(n, 300 + s)?;
        let g = &inst.graph;
        let p = if s % 2 == 0 { greedy_partition(g, s) } else { Partition::singletons(n) };
        let ds = ok(solve_ds(g, &quotient_wtd(g, &p)?, &p, &b))?;
        ensure!(Some(ds.value) == truth(Problem::Ds, g)? && dominating(g, &ds.witness), "DS mismatch at seed {s}");
        let tp = ok(tiling_partition(&inst, &ok(partition_spec(2, inst.rho))?))?;
        let col = ok(solve_qcoloring(g, 3, &tp, &b))?;
        ensure!(col.is_some() == truth(Problem::QCol(3), g)?.is_some(), "3-coloring mismatch at seed {s}");
        if let Some(c) = col {
            ensure!(is_proper_coloring(g, &c, 3), "improper coloring at seed {s}");
        }
        let (cyc, _) = ok(solve_hamiltonian(g, &tp, &b))?;
        let hc = truth(Problem::Hc, g)?.is_some();
        ensure!(cyc.is_some() == hc, "HC mismatch at seed {s}");
        if let Some(c) = cyc {
            ensure!(is_hamiltonian_cycle(g, &c), "bad Hamiltonian cycle at seed {s}");
        }
    }
    let mut hamiltonian = 0;
    for s in 0..100u64 {
        let n = 3 + s as usize % 12;
        let inst = solver_instance(n, 900 + s)?;
        let g = &inst.graph;
        let p = ok(tiling_partition(&inst, &ok(partition_spec(2, inst.rho))?))?;
        let hc = truth(Problem::Hc, g)?.is_some();
        hamiltonian += usize::from(hc);
        match ok(prune_hamiltonian(g, &p))? {
            PruneResult::NotHamiltonian => ensure!(!hc, "pruning rejected a Hamiltonian graph at seed {s}"),
            PruneResult::Reduced(r) => {
                let reduced = r.graph.n() >= 3 && truth(Problem::Hc, &r.graph)?.is_some();
                ensure!((reduced || (p.len() == 1 && n >= 3)) == hc, "pruning changed Hamiltonicity at seed {s}");
            }
        }
    }
    Ok(format!("200 instances each for IS/VC, DS, 3-coloring, HC; pruning kept HC on 100 ({hamiltonian} Hamiltonian)"))
}

fn max_is_via_dp(red: &IsReduction) -> Result<Vec<usize>, String> {
    let g = &red.instance.graph;
    let p = red.partition();
    let wtd = quotient_wtd(g, &p)?;
    Ok(ok(solve_is(g, &wtd, &p, &DpBudget::default()))?.witness)
}

fn hardness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut sat = 0;
    for t in 0..50 {
        let phi = if t % 4 == 0 {
            let sx = if rng.random_bool(0.5) { 1 } else { -1 };
            let sy = if rng.random_bool(0.5) { 2 } else { -2 };
            let mut core = vec![vec![sx, sy], vec![-sx, sy], vec![sx, -sy], vec![-sx, -sy]];
            if t % 8 == 4 {
                core.pop();
            }
            bound_occurrences(&ok(CnfFormula::new(2, core))?)
        } else {
            let nv = 2 + t % 7;
            random_33_cnf(nv, 3 * nv / 2, 0.15, if t % 2 == 0 { 0.0 } else { 0.3 }, &mut rng)
        };
        let truth = ok(brute_sat(&phi))?;
        let red = ok(sat_reduction(&phi))?;
        let got = ok(gt_brute(&red.instance))?;
        ensure!(got.is_some() == truth.is_some(), "SAT and Grid Tiling disagree on {}", phi.to_dimacs());
        if let Some(s) = got {
            sat += 1;
            ensure!(phi.evaluate(&red.assignment(&s)), "decoded assignment does not satisfy the formula");
        }
    }
    let embs = [ok(build_grid_embedding(16.0, 1))?, ok(build_grid_embedding(16.0, 2))?];
    let mut yes = 0;
    for t in 0..200 {
        let k = 1 + usize::from(t % 4 != 0);
        let n = rng.random_range(1..=3);
        let inst = ok(random_gt_instance(k, n, GtMode::Leq, rng.random_range(0.15..0.6), &mut rng))?;
        let red = ok(gtleq_to_is(&inst, &embs[k - 1]))?;
        ensure!(red.legality_violations(1e-7).is_empty(), "illegal H at trial {t}");
        ensure!(red.instance.n() == reduction_vertex_count(&inst, &embs[k - 1]), "vertex count off at trial {t}");
        let truth = ok(gt_brute(&inst))?;
        let best = max_is_via_dp(&red)?;
        ensure!(independent(&red.instance.graph, &best), "DP witness not independent");
        ensure!((best.len() >= red.target) == truth.is_some(), "Grid Tiling and IS disagree at trial {t}");
        if t % 10 == 0 {
            let bb = ok(max_independent_set(&red.instance.graph, 50_000_000))?;
            ensure!(bb.len() == best.len(), "branch and bound disagrees at trial {t}");
        }
        yes += usize::from(truth.is_some());
    }
    let mut seps = Vec::new();
    for (np, k) in [(16.0, 2), (64.0, 2), (64.0, 3)] {
        let emb = ok(build_grid_embedding(np, k))?;
        ok(emb.verify())?;
        let m = ok(halfline_separation(emb.r0, emb.n_param))?;
        ensure!((m - halfline_separation_formula(emb.r0, emb.n_param)).abs() < 1e-6, "half-line separation off");
        ensure!(m > 8.0 * emb.delta, "half-line separation {m} not above 8 delta = {}", 8.0 * emb.delta);
        seps.push(format!("{:.2}", m / emb.delta));
    }
    Ok(format!("50 formulas ({sat} sat), 200 reductions ({yes} solvable), separation/delta {}", seps.join(", ")))
}

fn reproducibility() -> Check {
    let configs = [
        ExperimentConfig {
            name: "full".into(),
            kind: ExperimentKind::Full,
            ns: vec![12, 32, 64],
            seeds: vec![1, 2],
            trials: 2,
            ..Default::default()
        },
        ExperimentConfig {
            name: "sep3".into(),
            kind: ExperimentKind::Separator,
            ns: vec![128, 256],
            d: 3,
            rho: 0.5,
            seeds: vec![3, 4],
            ..Default::default()
        },
    ];
    let mut rows = 0;
    for cfg in &configs {
        let a = ok(rows_to_csv(&ok(run_experiment(cfg))?))?;
        let b = ok(rows_to_csv(&ok(run_experiment(cfg))?))?;
        ensure!(a == b, "experiment `{}` differs between runs", cfg.name);
        ensure!(!a.contains(",error") && !a.contains(",timeout"), "experiment `{}` has failed rows", cfg.name);
        rows += a.lines().count() - 1;
    }
    Ok(format!("{} configs, {rows} rows byte-identical", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Check); 8] = [
        ("geometry", 10, geometry),
        ("tiling", 30, tiling),
        ("growth", 180, growth),
        ("separators", 600, separators),
        ("decomposition", 600, decompositions),
        ("solvers", 600, solvers),
        ("hardness", 600, hardness),
        ("reproducibility", 600, reproducibility),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let t = Instant::now();
        let res = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let took = t.elapsed();
        let res = res.and_then(|m| {
            if took > Duration::from_secs(*limit) {
                Err(format!("{m}; over the {limit} s budget"))
            } else {
                Ok(m)
            }
        });
        let (tag, msg) = match res {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("{tag} {}. {name} ({:.1} s): {msg}", i + 1, took.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
