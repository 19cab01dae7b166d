use hyptw::decomp::*;
use hyptw::graph::Graph;
use hyptw::hypgeo::*;
use hyptw::nubg::*;
use hyptw::tiling::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let e: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    Graph::from_edges(n, &e).unwrap()
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
    Graph::from_edges(n, &e).unwrap()
}

fn uniform_instance(n: usize, rho: f64, seed: u64) -> NubgInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = uniform_points(2, n, area_radius(n), &mut rng).unwrap();
    build_graph(&pts, rho, 1.0, NoisePolicy::None).unwrap()
}

#[test]
fn validator_basics() {
    let g = Graph::cycle(7);
    let all = TreeDecomposition::single((0..7).collect());
    let r = validate_td(&g, &all);
    assert!(r.valid && r.width == 6);
    let miss = TreeDecomposition { bags: vec![vec![0, 1, 2, 3, 4, 5], vec![5, 6, 1]], edges: vec![(0, 1)] };
    assert_eq!(validate_td(&g, &miss).violation, Some(TdViolation::EdgeUncovered(0, 6)));
}

/// Deleting `v` from bag `b` must break the decomposition exactly when `b` was
/// the only bag holding `v`, the only bag covering an edge at `v`, or an inner
/// node of the subtree of bags holding `v`.
fn forced(g: &Graph, td: &TreeDecomposition, b: usize, v: usize) -> bool {
    let holders: Vec<usize> = (0..td.bags.len()).filter(|&i| td.bags[i].contains(&v)).collect();
    if holders.len() == 1 {
        return true;
    }
    for &u in g.neighbors(v) {
        if holders.iter().filter(|&&i| td.bags[i].contains(&u)).count() == 1 && td.bags[b].contains(&u) {
            return true;
        }
    }
    let adj = td.tree_adjacency();
    adj[b].iter().filter(|&&c| td.bags[c].contains(&v)).count() >= 2
}

#[test]
fn mutations_are_detected_exactly_when_forced() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut hits = 0;
    for t in 0..300 {
        let n = rng.random_range(5..14);
        let g = if t % 2 == 0 { random_graph(n, 0.3, &mut rng) } else { random_tree(n, &mut rng) };
        let td = heuristic_decompose(&g);
        assert!(validate_td(&g, &td).valid);
        let b = rng.random_range(0..td.bags.len());
        if td.bags[b].is_empty() {
            continue;
        }
        let v = td.bags[b][rng.random_range(0..td.bags[b].len())];
        let mut m = td.clone();
        m.bags[b].retain(|&x| x != v);
        let must = forced(&g, &td, b, v);
        assert_eq!(!validate_td(&g, &m).valid, must, "trial {t}");
        hits += usize::from(must);
    }
    assert!(hits > 30);
}

#[test]
fn heuristic_widths() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let t = random_tree(30, &mut rng);
        assert_eq!(heuristic_decompose(&t).width(), 1);
    }
    for n in 3..20 {
        assert_eq!(heuristic_decompose(&Graph::cycle(n)).width(), 2);
    }
    for _ in 0..40 {
        let n = rng.random_range(4..=12);
        let g = random_graph(n, rng.random_range(0.2..0.6), &mut rng);
        let td = heuristic_decompose(&g);
        assert!(validate_td(&g, &td).valid);
        assert!(td.width() >= exact_treewidth(&g).unwrap() as i64);
    }
}

#[test]
fn power_and_blowup_bounds() {
    let p9 = Graph::path(9);
    let sq = power_decomposition(&heuristic_decompose(&p9), &p9, 2).unwrap();
    assert!(validate_td(&p9.power(2), &sq).valid);
    let c12 = Graph::cycle(12);
    let tc = heuristic_decompose(&c12);
    let c3 = power_decomposition(&tc, &c12, 3).unwrap();
    assert!(validate_td(&c12.power(3), &c3).valid);
    assert!(c3.width() <= 2i64.pow(3) * (tc.width() + 1) - 1);
    let id = power_decomposition(&tc, &c12, 1).unwrap();
    assert!(validate_td(&c12, &id).valid);
    assert_eq!(blowup_decomposition(&tc, 1), tc);
    let k2 = blowup_decomposition(&TreeDecomposition::single(vec![0, 1]), 2);
    assert_eq!(k2.width(), 3);
    assert!(validate_td(&Graph::complete(2).blowup(2), &k2).valid);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(4..25);
        let g = if done % 2 == 0 { random_tree(n, &mut rng) } else { random_graph(n, 0.15, &mut rng) };
        let delta = g.max_degree() as u32;
        if delta < 2 {
            continue;
        }
        done += 1;
        let td = heuristic_decompose(&g);
        let w = td.width();
        let k = rng.random_range(1..=3usize);
        let pw = power_decomposition(&td, &g, k).unwrap();
        assert!(validate_td(&g.power(k), &pw).valid);
        assert!(pw.width() + 1 <= (delta as i64).pow(k.div_ceil(2) as u32 + 1) * (w + 1));
        let bl = blowup_decomposition(&td, k);
        assert!(validate_td(&g.blowup(k), &bl).valid);
        assert_eq!(bl.width(), k as i64 * (w + 1) - 1);
    }
}

#[test]
fn expansion_of_weighted_decompositions() {
    let g = Graph::cycle(6);
    let td = heuristic_decompose(&g);
    let single = WeightedTreeDecomposition { td: td.clone(), weights: vec![1.0; 6] };
    let mut norm = td.clone();
    for b in &mut norm.bags {
        b.sort_unstable();
    }
    assert_eq!(expand_weighted(&single, &Partition::singletons(6)), norm);
    let one = Partition { classes: vec![(0..6).collect()], ..Partition::singletons(0) };
    let w1 = WeightedTreeDecomposition { td: TreeDecomposition::single(vec![0]), weights: vec![7f64.log2()] };
    let e = expand_weighted(&w1, &one);
    assert_eq!(e.bags, vec![(0..6).collect::<Vec<_>>()]);
    for s in 0..30 {
        let inst = uniform_instance(150, 0.4, s);
        let p = if s % 2 == 0 {
            tiling_partition(&inst, &partition_spec(2, 0.4).unwrap()).unwrap()
        } else {
            greedy_partition(&inst.graph, s)
        };
        let q = contract(&inst.graph, &p).unwrap();
        let wtd = WeightedTreeDecomposition { td: heuristic_decompose(&q.graph), weights: q.weights.clone() };
        assert!(validate_td(&q.graph, &wtd.td).valid);
        assert!(validate_td(&inst.graph, &expand_weighted(&wtd, &p)).valid);
        let by_product = wtd
            .td
            .bags
            .iter()
            .map(|b| (b.iter().map(|&c| (p.classes[c].len() + 1) as f64).product::<f64>()).log2())
            .fold(0.0, f64::max);
        assert!((wtd.weighted_width() - by_product).abs() < 1e-9);
    }
}

#[test]
fn separator_recursion() {
    let spec = partition_spec(2, 0.5).unwrap();
    let pts: Vec<HPoint> = (0..6)
        .map(|i| HPoint::from_halfspace(&[(0.1 + 0.15 * i as f64) * spec.s, 1.0 + 0.5 * spec.s]).unwrap())
        .collect();
    let inst = build_graph(&pts, 0.5, 1.0, NoisePolicy::None).unwrap();
    let (_, _, w) = decompose_by_separators(&inst, &spec, MIN_SIZE, 1).unwrap();
    assert_eq!(w.td.bags.len(), 1);
    assert!((w.weighted_width() - 7f64.log2()).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut pts = Vec::new();
    let mut halves = Vec::new();
    for side in [-1.0, 1.0] {
        let b = Isometry::boost_to(&HPoint::from_polar(5.0, &[side, 0.0]).unwrap());
        let half: Vec<HPoint> =
            (0..30).map(|_| b.apply(&sample_uniform_ball(2, 0.4, &mut rng).unwrap()).unwrap()).collect();
        pts.extend(half.iter().cloned());
        halves.push(half);
    }
    let spec = partition_spec(2, 0.3).unwrap();
    let both = build_graph(&pts, 0.3, 1.0, NoisePolicy::None).unwrap();
    let big = 1000;
    let (_, _, w) = decompose_by_separators(&both, &spec, big, 2).unwrap();
    let parts: Vec<f64> = halves
        .iter()
        .map(|h| {
            let inst = build_graph(h, 0.3, 1.0, NoisePolicy::None).unwrap();
            decompose_by_separators(&inst, &spec, big, 2).unwrap().2.weighted_width()
        })
        .collect();
    assert!((w.weighted_width() - parts[0].max(parts[1])).abs() < 1e-9);

    for s in 0..20 {
        let inst = uniform_instance(100 + 20 * s as usize, 0.5, s);
        let (p, q, w) = decompose_by_separators(&inst, &partition_spec(2, 0.5).unwrap(), MIN_SIZE, s).unwrap();
        assert!(validate_td(&q.graph, &w.td).valid);
        assert!(validate_td(&inst.graph, &expand_weighted(&w, &p)).valid);
    }
}

#[test]
fn separator_recursion_width_is_polylogarithmic() {
    let ns = [512usize, 1024, 2048, 4096];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in &ns {
        let spec = partition_spec(2, 0.5).unwrap();
        let mut ws: Vec<f64> = (0..5)
            .map(|s| {
                let inst = uniform_instance(n, 0.5, s);
                decompose_by_separators(&inst, &spec, MIN_SIZE, s).unwrap().2.weighted_width()
            })
            .collect();
        ws.sort_by(f64::total_cmp);
        xs.push((n as f64).log2().ln());
        ys.push(ws[2].ln());
    }
    let (exponent, _) = fit(&xs, &ys);
    assert!(exponent <= 3.5, "{exponent}");
}

#[test]
fn shallow_decompositions() {
    let spec = regular_tiling(1, 3, None).unwrap();
    let lone = build_graph(&[HPoint::polar2(0.4, 0.2).unwrap()], 0.3, 1.0, NoisePolicy::None).unwrap();
    let (td, _) = shallow_decompose(&lone, &spec, 1).unwrap();
    assert_eq!(td.bags.len(), 1);
    let far: Vec<HPoint> = (0..12).map(|i| HPoint::polar2(4.0, i as f64 * 0.5).unwrap()).collect();
    let inst = build_graph(&far, 0.3, 1.0, NoisePolicy::None).unwrap();
    assert_eq!(inst.graph.m(), 0);
    let (td, _) = shallow_decompose(&inst, &spec, 1).unwrap();
    assert!(validate_td(&inst.graph, &td).valid);
    assert_eq!(heuristic_decompose(&inst.graph).width(), 0);

    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for e in 8..=10 {
        let n = 1usize << e;
        let inst = uniform_instance(n, 0.3, e as u64);
        let k = shallowness(&inst.points, 0.3).unwrap().1;
        let (td, rep) = shallow_decompose(&inst, &spec, k).unwrap();
        let v = validate_td(&inst.graph, &td);
        assert!(v.valid);
        assert_eq!(v.width, rep.width);
        xs.push(e as f64);
        ws.push(rep.width as f64);
    }
    let c = ws.iter().zip(&xs).map(|(w, x)| w / x).fold(0.0, f64::max);
    assert!(c < 20.0, "{ws:?}");
}

#[test]
fn peeling_random_patches() {
    let spec = regular_tiling(1, 3, None).unwrap();
    let mut til = RegularTiling::new(spec.clone());
    assert_eq!(layer_peel(&mut til, &[0]).outerplanarity, 1);
    let ratio = spec.area / spec.perimeter;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut cs = Vec::new();
    for e in 5..=9 {
        let size = 1usize << e;
        let mut first = 0.0;
        for _ in 0..5 {
            let mut til = RegularTiling::new(spec.clone());
            let patch = til.random_patch(size, &mut rng);
            assert_eq!(patch.len(), size);
            let ng = neighborhood_graph(&mut til, &patch);
            assert_eq!(ng.components().len(), 1);
            let r = layer_peel(&mut til, &patch);
            assert_eq!(r.layers.iter().map(Vec::len).sum::<usize>(), size);
            first += r.fractions[0] / 5.0;
            cs.push(r.outerplanarity as f64 / e as f64);
        }
        assert!(first >= 0.9 * ratio, "size {size}: {first}");
    }
    let c = cs.iter().cloned().fold(0.0, f64::max);
    assert!(c <= 1.0, "{c}");
}
