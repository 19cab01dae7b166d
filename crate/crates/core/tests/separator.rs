use hyptw::hypgeo::*;
use hyptw::nubg::*;
use hyptw::separator::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[test]
fn centerpoints() {
    let p = HPoint::polar2(0.7, 2.0).unwrap();
    let c = centerpoint(&[p.clone()], CenterpointMode::Radon { eps: EPS_BAL, seed: 1 }).unwrap();
    assert!(dist(&c, &p) < 1e-9);
    let tri: Vec<HPoint> = [0.2, 2.4, 4.1].iter().map(|&a| HPoint::polar2(1.5, a).unwrap()).collect();
    let c = centerpoint(&tri, CenterpointMode::Exact2d).unwrap();
    let k: Vec<Vec<f64>> = tri.iter().map(HPoint::klein_unchecked).collect();
    assert!(sampled_max_side(&k, &c.klein_unchecked(), 1000, 2) <= 2.0 / 3.0 + 1e-9);
    let radius = 3.0;
    let circle: Vec<HPoint> =
        (0..400).map(|i| HPoint::polar2(radius, i as f64 * std::f64::consts::TAU / 400.0).unwrap()).collect();
    let o = HPoint::origin(2);
    for mode in
        [CenterpointMode::Exact2d, CenterpointMode::Radon { eps: EPS_BAL, seed: 5 }, CenterpointMode::Auto { seed: 5 }]
    {
        let c = centerpoint(&circle, mode).unwrap();
        assert!(dist(&c, &o) <= 0.1 * radius, "{mode:?}: {}", dist(&c, &o));
    }
}

#[test]
fn separated_clusters_need_no_separator() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut pts = Vec::new();
    for side in [-1.0, 1.0] {
        let c = HPoint::from_polar(4.0, &[side, 0.0]).unwrap();
        let b = Isometry::boost_to(&c);
        for _ in 0..40 {
            pts.push(b.apply(&sample_uniform_ball(2, 0.3, &mut rng).unwrap()).unwrap());
        }
    }
    let inst = build_graph(&pts, 0.3, 1.2, NoisePolicy::All).unwrap();
    let spec = partition_spec(2, 0.3).unwrap();
    let (part, sep) = find_separator(&inst, &spec, &SeparatorOptions { seed: 2, ..Default::default() }).unwrap();
    assert_eq!(sep.size, 0);
    assert_eq!(sep.weight, 0.0);
    assert!((sep.balance - 0.5).abs() < 1e-12);
    assert!(validate_separator(&inst, &part, &sep, EPS_BAL).valid);
}

#[test]
fn one_tile_instance() {
    let spec = partition_spec(2, 0.5).unwrap();
    let pts: Vec<HPoint> = (0..9)
        .map(|i| {
            let f = 0.1 + 0.1 * i as f64;
            HPoint::from_halfspace(&[f * spec.s, 1.0 + 0.5 * spec.s]).unwrap()
        })
        .collect();
    let inst = build_graph(&pts, 0.5, 1.0, NoisePolicy::None).unwrap();
    let (part, sep) = find_separator(&inst, &spec, &SeparatorOptions::default()).unwrap();
    assert_eq!(part.len(), 1);
    assert_eq!(sep.classes, vec![0]);
    assert!((sep.weight - 10f64.log2()).abs() < 1e-12);
}

#[test]
fn validator_edge_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let pts = uniform_points(2, 60, 1.0, &mut rng).unwrap();
    let inst = build_graph(&pts, 0.6, 1.0, NoisePolicy::None).unwrap();
    assert_eq!(inst.graph.components().len(), 1);
    let spec = partition_spec(2, 0.6).unwrap();
    let (part, sep) = find_separator(&inst, &spec, &SeparatorOptions::default()).unwrap();
    let empty = CliqueSeparator { classes: vec![], size: 0, weight: 0.0, ..sep.clone() };
    let r = validate_separator(&inst, &part, &empty, EPS_BAL);
    assert!(!r.balanced && !r.valid);
    let all = CliqueSeparator { classes: (0..part.len()).collect(), ..sep };
    let r = validate_separator(&inst, &part, &all, EPS_BAL);
    assert!(r.valid && r.balance == 0.0);
}

#[test]
fn accepted_separators_validate() {
    for d in [2usize, 3] {
        for s in 0..25u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * d as u64 + s);
            let n = rng.random_range(100..400);
            let rho = rng.random_range(0.3..0.6);
            let nu = rng.random_range(1.0..1.5);
            let pts = uniform_points(d, n, rng.random_range(2.0..4.0), &mut rng).unwrap();
            let inst = build_graph(&pts, rho, nu, NoisePolicy::Bernoulli { p: 0.5, seed: s }).unwrap();
            let spec = partition_spec(d, rho).unwrap();
            match find_separator(&inst, &spec, &SeparatorOptions { seed: s, ..Default::default() }) {
                Ok((part, sep)) => {
                    let r = validate_separator(&inst, &part, &sep, EPS_BAL);
                    assert!(r.valid, "d={d} seed {s}: {r:?}");
                    assert!(r.balance <= d as f64 / (d as f64 + 1.0) + EPS_BAL);
                    let (_, sizes) = balance_after(&inst, &part, &sep.classes);
                    assert_eq!(
                        sizes.iter().sum::<usize>() + sep.classes.iter().map(|&c| part.classes[c].len()).sum::<usize>(),
                        n
                    );
                }
                Err(e) => panic!("d={d} seed {s}: {e}"),
            }
        }
    }
}

#[test]
fn planar_separators_grow_slowly() {
    let ns = [256usize, 512, 1024, 2048];
    let mut meds = Vec::new();
    for &n in &ns {
        let mut sizes: Vec<f64> = (0..7)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let pts = uniform_points(2, n, area_radius(n), &mut rng).unwrap();
                let inst = build_graph(&pts, 0.5, 1.0, NoisePolicy::None).unwrap();
                let spec = partition_spec(2, 0.5).unwrap();
                find_separator(&inst, &spec, &SeparatorOptions { seed: s, ..Default::default() }).unwrap().1.size as f64
            })
            .collect();
        meds.push(median(&mut sizes));
    }
    assert!(meds[3] > meds[0], "{meds:?}");
    assert!(meds[3] / meds[0] < 4.0, "{meds:?}");
}
