//! Property checks shared by the proptest suite and the acceptance runner.
//! Each `check_*` takes a generated input and fails with a message.

use graph_eikonal::euclid::{make_uniform_random, Domain, WeightRule};
use graph_eikonal::labelprop::{classify, knn_graph, sample_seeds, two_moons, KnnWeight};
use graph_eikonal::local::{candidate, Known};
use graph_eikonal::trust::{distrust_times, inject_sybil_cluster, neighbor_average};
use graph_eikonal::{solve, Exponent, ProblemSpec};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::Rng;

use super::*;

pub type Check = std::result::Result<(), TestCaseError>;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a == b) || (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

pub fn exponent() -> impl Strategy<Value = Exponent> {
    prop::sample::select(EXPONENTS.to_vec())
}

pub fn local_input() -> impl Strategy<Value = (Vec<(f64, f64)>, f64, Exponent)> {
    (prop::collection::vec((0.0..5.0f64, 0.1..10.0f64), 1..7), 0.1..5.0f64, exponent())
}

/// Local update against a from-scratch bisection of the defining equation.
pub fn check_local((known, s, p): (Vec<(f64, f64)>, f64, Exponent)) -> Check {
    let k: Vec<Known> = known.iter().map(|&(u, w)| Known::new(u, w)).collect();
    let got = candidate(&k, s, p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let want = bisection_root(&known, s, p);
    prop_assert!((got - want).abs() <= 1e-9, "candidate {got} vs bisection {want}");
    // Nondecreasing in p on the same input.
    let by_p: Vec<f64> = EXPONENTS.iter().map(|&q| candidate(&k, s, q).unwrap()).collect();
    for w in by_p.windows(2) {
        prop_assert!(w[0] <= w[1] + 1e-12, "not monotone in p: {by_p:?}");
    }
    Ok(())
}

pub fn scaled_problem() -> impl Strategy<Value = (u64, Exponent, f64)> {
    (any::<u64>(), exponent(), 0.25..4.0f64)
}

fn scale_boundary(spec: &ProblemSpec, c: f64, s: Vec<f64>) -> ProblemSpec {
    let b: Vec<_> = spec.boundary().iter().map(|&(i, v)| (i, c * v)).collect();
    ProblemSpec::new(spec.node_count(), b, s, spec.p()).unwrap()
}

/// `s -> c s` together with boundary values `b -> c b` scales `u` by `c`.
pub fn check_s_homogeneity((seed, p, c): (u64, Exponent, f64)) -> Check {
    let (g, spec) = random_problem(seed, 40, p);
    let u = solve(&g, &spec).unwrap();
    let s2: Vec<f64> = spec.slowness().iter().map(|x| c * x).collect();
    let v = solve(&g, &scale_boundary(&spec, c, s2)).unwrap();
    for (a, b) in u.times().iter().zip(v.times()) {
        prop_assert!(close(c * a, *b, 1e-9), "c u = {} vs {b}", c * a);
    }
    Ok(())
}

/// `w -> c w` together with `b -> b / c` scales `u` by `1 / c`.
pub fn check_w_homogeneity((seed, p, c): (u64, Exponent, f64)) -> Check {
    let (g, spec) = random_problem(seed, 40, p);
    let u = solve(&g, &spec).unwrap();
    let g2 = g.map_weights(|_, _, w| c * w).unwrap();
    let v = solve(&g2, &scale_boundary(&spec, 1.0 / c, spec.slowness().to_vec())).unwrap();
    for (a, b) in u.times().iter().zip(v.times()) {
        prop_assert!(close(a / c, *b, 1e-9), "u / c = {} vs {b}", a / c);
    }
    Ok(())
}

/// More slowness, later boundary values or weaker edges never make any
/// arrival earlier.
pub fn check_comparison((seed, p, _): (u64, Exponent, f64)) -> Check {
    let (g, spec) = random_problem(seed, 40, p);
    let u = solve(&g, &spec).unwrap();
    let mut r = rng(seed ^ 0x5eed);
    let s2: Vec<f64> = spec.slowness().iter().map(|x| x * r.random_range(1.0..2.0)).collect();
    let b2: Vec<_> = spec.boundary().iter().map(|&(i, v)| (i, v + r.random_range(0.0..0.5))).collect();
    let bigger = ProblemSpec::new(spec.node_count(), b2, s2, p).unwrap();
    let weaker = g.map_weights(|_, _, w| w * r.random_range(0.5..1.0)).unwrap();
    for (g2, spec2) in [(&g, &bigger), (&weaker, &spec), (&weaker, &bigger)] {
        let v = solve(g2, spec2).unwrap();
        for (a, b) in u.times().iter().zip(v.times()) {
            prop_assert!(*b >= a - 1e-9 * a.abs().max(1.0), "{b} < {a}");
        }
    }
    Ok(())
}

/// Solutions are ordered `u_1 <= u_3/2 <= u_2 <= u_3 <= u_inf` pointwise.
pub fn check_p_monotone(seed: u64) -> Check {
    let (g, spec) = random_problem(seed, 40, Exponent::ONE);
    let fields: Vec<_> = EXPONENTS.iter().map(|&p| solve(&g, &spec.with_p(p)).unwrap()).collect();
    for w in fields.windows(2) {
        for (a, b) in w[0].times().iter().zip(w[1].times()) {
            prop_assert!(*a <= b + 1e-9 * b.abs().max(1.0), "{a} > {b}");
        }
    }
    Ok(())
}

pub fn sybil_input() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 10..60usize, 1..20usize)
}

/// Attaching a Sybil cluster to one candidate leaves every original arrival
/// time bitwise unchanged; the neighbour average of the target drops when it
/// was above the cluster's rating of 1.
pub fn check_sybil((seed, n, size): (u64, usize, usize)) -> Check {
    let mut r = rng(seed);
    let tg = random_trust_graph(&mut r, n, 2);
    let team: Vec<usize> = (0..3.min(n - 1)).collect();
    let target = r.random_range(team.len()..n);
    let attacked = inject_sybil_cluster(&tg, target, size, 1.0).unwrap();
    for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
        let before = distrust_times(&tg, &team, p).unwrap();
        let after = distrust_times(&attacked, &team, p).unwrap();
        for i in 0..n {
            prop_assert_eq!(before[i].to_bits(), after[i].to_bits(), "p {} node {}", p, i);
        }
    }
    if let Ok(prior) = neighbor_average(&tg, target) {
        let post = neighbor_average(&attacked, target).unwrap();
        if prior > 1.0 {
            prop_assert!(post < prior, "{post} !< {prior}");
        }
    }
    Ok(())
}

pub fn label_input() -> impl Strategy<Value = (u64, Exponent, usize)> {
    (any::<u64>(), exponent(), 0..6usize)
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Relabelling the seed sets relabels the output, and rescaling every edge
/// weight leaves it unchanged (away from ties).
pub fn check_labels((seed, p, perm_ix): (u64, Exponent, usize)) -> Check {
    let mut r = rng(seed);
    let n = 30;
    let coords: Vec<f64> = (0..2 * n).map(|_| r.random_range(-1.0..1.0)).collect();
    let truth: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let cloud = graph_eikonal::labelprop::PointCloud::new(2, coords, Some(truth.clone())).unwrap();
    let g = knn_graph(&cloud, 4, KnnWeight::InverseDistance).unwrap();
    let seeds = sample_seeds(&truth, 2, seed).unwrap();
    let base = classify(&g, &seeds, p).unwrap();
    let perm = PERMS3[perm_ix];
    let relabeled = classify(&g, &seeds.permuted(&perm).unwrap(), p).unwrap();
    let scaled = classify(&g.map_weights(|_, _, w| 3.5 * w).unwrap(), &seeds, p).unwrap();
    for i in 0..n {
        if base.ties[i] || relabeled.ties[i] {
            continue;
        }
        prop_assert_eq!(relabeled.labels[i].map(|l| perm[l]), base.labels[i], "node {}", i);
        if !scaled.ties[i] {
            prop_assert_eq!(scaled.labels[i], base.labels[i], "node {}", i);
        }
    }
    Ok(())
}

/// Same seeds, same bits: generators, sampling and the solver.
pub fn check_determinism(seed: u64) -> Check {
    let a = two_moons(40, 5, 0.02, seed).unwrap();
    let b = two_moons(40, 5, 0.02, seed).unwrap();
    prop_assert_eq!(&a, &b);
    let ua = make_uniform_random(300, Domain::default(), seed, WeightRule::InverseDistance).unwrap();
    let ub = make_uniform_random(300, Domain::default(), seed, WeightRule::InverseDistance).unwrap();
    prop_assert_eq!(&ua.coords, &ub.coords);
    prop_assert_eq!(&ua.graph, &ub.graph);
    let truth = a.labels().unwrap();
    prop_assert_eq!(sample_seeds(truth, 3, seed).unwrap(), sample_seeds(truth, 3, seed).unwrap());
    let (g, spec) = random_problem(seed, 60, Exponent::new(1.5).unwrap());
    let x = solve(&g, &spec).unwrap();
    let y = solve(&g, &spec).unwrap();
    prop_assert!(x.times().iter().zip(y.times()).all(|(p, q)| p.to_bits() == q.to_bits()));
    Ok(())
}
