use hyptw::decomp::{decompose_by_separators, heuristic_decompose, WeightedTreeDecomposition};
use hyptw::hypgeo::HPoint;
use hyptw::nubg::{
    build_graph, contract, greedy_partition, partition_spec, tiling_partition, uniform_points, Graph, NoisePolicy,
    NubgInstance, Partition,
};
use hyptw::solvers::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(n: usize, seed: u64) -> NubgInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rng.random_range(0.8..2.2);
    let rho = rng.random_range(0.2..0.6);
    let nu = rng.random_range(1.0..1.6);
    let pts = uniform_points(2, n, r, &mut rng).unwrap();
    build_graph(&pts, rho, nu, NoisePolicy::Bernoulli { p: 0.5, seed }).unwrap()
}

fn quotient_wtd(g: &Graph, p: &Partition) -> WeightedTreeDecomposition {
    let q = contract(g, p).unwrap();
    WeightedTreeDecomposition { td: heuristic_decompose(&q.graph), weights: q.weights }
}

fn naive_is(g: &Graph, v: usize, chosen: &mut Vec<usize>) -> usize {
    if v == g.n() {
        return chosen.len();
    }
    let skip = naive_is(g, v + 1, chosen);
    if chosen.iter().all(|&u| !g.has_edge(u, v)) {
        chosen.push(v);
        let take = naive_is(g, v + 1, chosen);
        chosen.pop();
        return skip.max(take);
    }
    skip
}

fn naive_ds(g: &Graph) -> usize {
    let n = g.n();
    for k in 0..=n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mut dom = vec![false; n];
            for &v in &idx {
                dom[v] = true;
                for &u in g.neighbors(v) {
                    dom[u] = true;
                }
            }
            if dom.iter().all(|&d| d) {
                return k;
            }
            let mut i = k;
            while i > 0 && idx[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    n
}

fn naive_hc(g: &Graph) -> bool {
    fn go(g: &Graph, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = g.n();
        if path.len() == n {
            return g.has_edge(path[n - 1], path[0]);
        }
        let last = *path.last().unwrap();
        for &w in g.neighbors(last) {
            if !used[w] {
                used[w] = true;
                path.push(w);
                if go(g, path, used) {
                    return true;
                }
                path.pop();
                used[w] = false;
            }
        }
        false
    }
    if g.n() < 3 {
        return false;
    }
    let mut used = vec![false; g.n()];
    used[0] = true;
    go(g, &mut vec![0], &mut used)
}

#[test]
fn brute_force_agrees_with_naive_recursion() {
    for s in 0..50 {
        let g = instance(10, 1000 + s).graph;
        let is = brute_force(Problem::Is, &g).unwrap();
        assert_eq!(is.value.unwrap(), naive_is(&g, 0, &mut Vec::new()));
        assert_eq!(brute_force(Problem::Ds, &g).unwrap().value.unwrap(), naive_ds(&g));
        assert_eq!(brute_force(Problem::Hc, &g).unwrap().value.is_some(), naive_hc(&g));
    }
    assert_eq!(brute_force(Problem::Is, &Graph::new(7)).unwrap().value, Some(7));
    assert!(brute_force(Problem::Is, &Graph::new(21)).is_err());
}

#[test]
fn independent_set_and_vertex_cover_match_oracle() {
    let b = DpBudget::default();
    for s in 0..200 {
        let n = 4 + (s as usize % 13);
        let inst = instance(n, s);
        let g = &inst.graph;
        let truth = brute_force(Problem::Is, g).unwrap().value.unwrap();
        let parts = if s % 2 == 0 {
            tiling_partition(&inst, &partition_spec(2, inst.rho).unwrap()).unwrap()
        } else {
            greedy_partition(g, s)
        };
        let wtd = quotient_wtd(g, &parts);
        let is = solve_is(g, &wtd, &parts, &b).unwrap();
        assert_eq!(is.value, truth, "seed {s}");
        assert_eq!(is.witness.len(), truth);
        for (i, &u) in is.witness.iter().enumerate() {
            assert!(is.witness[i + 1..].iter().all(|&v| !g.has_edge(u, v)));
        }
        let vc = solve_vc(g, &wtd, &parts, &b).unwrap();
        assert_eq!(vc.value, n - truth);
        assert!(g.edges().iter().all(|&(u, v)| vc.witness.contains(&u) || vc.witness.contains(&v)));
    }
}

#[test]
fn clique_partition_state_counts() {
    let b = DpBudget::default();
    for s in 0..30 {
        let inst = instance(14, 500 + s);
        let p = tiling_partition(&inst, &partition_spec(2, inst.rho).unwrap()).unwrap();
        let wtd = quotient_wtd(&inst.graph, &p);
        let is = solve_is(&inst.graph, &wtd, &p, &b).unwrap();
        let bound =
            wtd.td.bags.iter().map(|bag| bag.iter().map(|&c| p.classes[c].len() + 1).product::<usize>()).max().unwrap();
        assert!(is.stats.max_states <= bound);
    }
}

#[test]
fn dominating_set_matches_oracle() {
    let b = DpBudget::default();
    for s in 0..120 {
        let n = 3 + (s as usize % 12);
        let inst = instance(n, 300 + s);
        let g = &inst.graph;
        let p = if s % 2 == 0 { greedy_partition(g, s) } else { Partition::singletons(n) };
        let wtd = quotient_wtd(g, &p);
        let ds = solve_ds(g, &wtd, &p, &b).unwrap();
        assert_eq!(ds.value, brute_force(Problem::Ds, g).unwrap().value.unwrap(), "seed {s}");
        let mut dom = vec![false; n];
        for &v in &ds.witness {
            dom[v] = true;
            for &u in g.neighbors(v) {
                dom[u] = true;
            }
        }
        assert!(dom.iter().all(|&d| d));
    }
}

#[test]
fn coloring_matches_oracle() {
    let b = DpBudget::default();
    for s in 0..120 {
        let n = 3 + (s as usize % 12);
        let inst = instance(n, 700 + s);
        let g = &inst.graph;
        let p = tiling_partition(&inst, &partition_spec(2, inst.rho).unwrap()).unwrap();
        let got = solve_qcoloring(g, 3, &p, &b).unwrap();
        let truth = brute_force(Problem::QCol(3), g).unwrap();
        assert_eq!(got.is_some(), truth.value.is_some(), "seed {s}");
        if let Some(c) = got {
            assert!(is_proper_coloring(g, &c, 3));
        }
    }
}

#[test]
fn hamiltonian_matches_oracle_and_pruning_preserves_it() {
    let b = DpBudget::default();
    for s in 0..100 {
        let n = 3 + (s as usize % 12);
        let inst = instance(n, 900 + s);
        let g = &inst.graph;
        let p = tiling_partition(&inst, &partition_spec(2, inst.rho).unwrap()).unwrap();
        let truth = brute_force(Problem::Hc, g).unwrap().value.is_some();
        let (cyc, _) = solve_hamiltonian(g, &p, &b).unwrap();
        assert_eq!(cyc.is_some(), truth, "seed {s}");
        if let Some(c) = cyc {
            assert!(is_hamiltonian_cycle(g, &c));
        }
        match prune_hamiltonian(g, &p).unwrap() {
            PruneResult::NotHamiltonian => assert!(!truth),
            PruneResult::Reduced(r) => {
                let reduced = r.graph.n() >= 3 && brute_force(Problem::Hc, &r.graph).unwrap().value.is_some();
                assert_eq!(reduced || (p.len() == 1 && n >= 3), truth, "seed {s}");
            }
        }
    }
}

#[test]
fn pruning_keeps_hamiltonicity_on_dense_cliques() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..60 {
        // cliques in a path with random cross edges; two large cliques exercise the pruning
        let sizes: Vec<usize> = if trial % 2 == 0 {
            vec![rng.random_range(3..6), rng.random_range(3..6), rng.random_range(3..6)]
        } else {
            vec![rng.random_range(6..9), rng.random_range(6..9)]
        };
        let pairs: &[(usize, usize)] = if trial % 2 == 0 { &[(0, 1), (1, 2)] } else { &[(0, 1)] };
        let mut classes = Vec::new();
        let mut e = Vec::new();
        let mut off = 0;
        for &s in &sizes {
            let c: Vec<usize> = (off..off + s).collect();
            for i in 0..s {
                for j in i + 1..s {
                    e.push((off + i, off + j));
                }
            }
            classes.push(c);
            off += s;
        }
        let dens = [0.05, 0.15, 0.3, 0.6][trial % 4];
        for &(a, b) in pairs {
            for &u in &classes[a] {
                for &v in &classes[b] {
                    if rng.random_bool(dens) {
                        e.push((u, v));
                    }
                }
            }
        }
        let g = Graph::from_edges(off, &e).unwrap();
        let p = Partition { classes, ..Partition::singletons(0) };
        let truth = brute_force(Problem::Hc, &g).unwrap().value.is_some();
        let (cyc, _) = solve_hamiltonian(&g, &p, &DpBudget::default()).unwrap();
        assert_eq!(cyc.is_some(), truth, "trial {trial}");
        if let Some(c) = cyc {
            assert!(is_hamiltonian_cycle(&g, &c));
        }
    }
}

#[test]
fn monotone_under_edge_insertion() {
    let b = DpBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in 0..30 {
        let inst = instance(12, 1500 + s);
        let mut g = inst.graph.clone();
        let p = Partition::singletons(12);
        let before = solve_is(&g, &quotient_wtd(&g, &p), &p, &b).unwrap().value;
        let vc_before = solve_vc(&g, &quotient_wtd(&g, &p), &p, &b).unwrap().value;
        let (u, v) = (rng.random_range(0..12), rng.random_range(0..12));
        if u != v {
            g.add_edge(u, v);
        }
        assert!(solve_is(&g, &quotient_wtd(&g, &p), &p, &b).unwrap().value <= before);
        assert!(solve_vc(&g, &quotient_wtd(&g, &p), &p, &b).unwrap().value >= vc_before);
    }
}

#[test]
fn separator_recursion_feeds_the_solver() {
    let b = DpBudget::default();
    for s in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let pts: Vec<HPoint> = uniform_points(2, 16, 2.0, &mut rng).unwrap();
        let inst = build_graph(&pts, 0.3, 1.0, NoisePolicy::None).unwrap();
        let (p, _, wtd) = decompose_by_separators(&inst, &partition_spec(2, 0.3).unwrap(), 2, s).unwrap();
        let is = solve_is(&inst.graph, &wtd, &p, &b).unwrap();
        assert_eq!(is.value, brute_force(Problem::Is, &inst.graph).unwrap().value.unwrap());
    }
}
