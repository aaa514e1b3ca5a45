//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero only when
//! a criterion outside `EXPECTED_RED` fails.

mod common;

use std::fmt::Display;
use std::time::{Duration, Instant};

use common::props::*;
use common::*;
use graph_eikonal::euclid::{
    convergence_table, kappa_scaling_check, make_regular_grid, solve_from_origin, Domain, GridKind, ProbeProtocol,
    WeightRule,
};
use graph_eikonal::labelprop::{mean_std, two_moons_accuracy, TwoMoonsConfig};
use graph_eikonal::pathset::{
    enumerate_simple_paths, equivalence_report, fixtures, minimize_over_subsets, travel_time,
    Admissibility, OracleCaps, Path, PathSet, TravelModel, EQUIVALENCE_TOLERANCE,
};
use graph_eikonal::trust::{distrust_times, inject_sybil_cluster, neighbor_average};
use graph_eikonal::{solve, Exponent, Graph, ProblemSpec};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestRng, TestRunner};
use rand::Rng;

/// Criteria that cannot pass as stated; see the README.
const EXPECTED_RED: &[usize] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Display) -> Outcome {
    Outcome { pass, detail: detail.to_string() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let dt = t.elapsed();
    o.detail = format!("{}; {:.2}s (limit {}s)", o.detail, dt.as_secs_f64(), limit.as_secs());
    o.pass &= dt <= limit;
    o
}

fn residuals() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        for p in EXPONENTS {
            let (g, spec) = random_problem(10_000 + seed, 200, p);
            let u = solve(&g, &spec).unwrap();
            for i in (0..g.node_count()).filter(|&i| u.is_reached(i) && !spec.is_boundary(i)) {
                worst = worst.max(residual_at(&g, &spec, u.times(), i).abs());
            }
        }
    }
    outcome(worst <= 1e-8, format!("max |residual| {worst:.2e} over 50 graphs x 5 p (tol 1e-8)"))
}

fn equivalences() -> Outcome {
    let caps = OracleCaps::default();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut run = |name: String, g: &Graph, spec: &ProblemSpec| {
        for line in equivalence_report(g, spec, &EXPONENTS, caps).unwrap() {
            worst = worst.max(line.max_diff);
            if !line.pass {
                failures.push(format!("{name}: {line}"));
            }
        }
    };
    for seed in 0..100 {
        let mut r = rng(20_000 + seed);
        let n = r.random_range(2..=5);
        let g = random_connected_digraph(&mut r, n, 0.4, (0.1, 10.0));
        let s = random_slowness(&mut r, n, (0.1, 5.0));
        run(format!("random {seed}"), &g, &ProblemSpec::with_sources(&[0], s, Exponent::TWO).unwrap());
    }
    for name in ["path", "diamond", "grid3"] {
        let (g, x0, _) = fixtures::by_name(name).unwrap();
        run(name.to_string(), &g, &ProblemSpec::unit(g.node_count(), &[x0], Exponent::TWO).unwrap());
    }
    let detail = format!(
        "2(i)/2(ii)/2(iii) and value iteration (5 p) on 100 graphs + 3 fixtures, max diff {worst:.2e} (tol {EQUIVALENCE_TOLERANCE:e}){}",
        failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
    );
    outcome(failures.is_empty(), detail)
}

/// Graphs whose edge costs `s / w` are small dyadic rationals, so every sum
/// is exact.
fn dyadic_problem(seed: u64) -> (Graph, ProblemSpec) {
    const W: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut r = rng(seed);
    let n = r.random_range(2..=150);
    let g = random_sparse_digraph(&mut r, n, 2, (0.1, 1.0)).map_weights(|_, _, _| W[r.random_range(0..5)]).unwrap();
    let s: Vec<f64> = (0..n).map(|_| r.random_range(1..=5) as f64).collect();
    (g, ProblemSpec::with_sources(&[0], s, Exponent::Infinity).unwrap())
}

fn dijkstra_reduction() -> Outcome {
    let mut mismatches = 0;
    let mut exact = true;
    for seed in 0..50 {
        let (g, spec) = dyadic_problem(30_000 + seed);
        let u = solve(&g, &spec).unwrap();
        let d = dijkstra(&g, &spec);
        mismatches += u.times().iter().zip(&d).filter(|(a, b)| a.to_bits() != b.to_bits()).count();
        exact &= d.iter().all(|x| !x.is_finite() || (x * 4.0).fract() == 0.0);
        let (g, spec) = random_problem(31_000 + seed, 200, Exponent::Infinity);
        let u = solve(&g, &spec).unwrap();
        let d = dijkstra(&g, &spec);
        mismatches += u.times().iter().zip(&d).filter(|(a, b)| a.to_bits() != b.to_bits()).count();
    }
    outcome(
        mismatches == 0 && exact,
        format!("p=inf vs Dijkstra on 50 dyadic + 50 real-weight graphs: {mismatches} bitwise mismatches"),
    )
}

fn grid_closed_forms() -> Outcome {
    let mut l1_err = 0.0f64;
    let mut e2 = Vec::new();
    let mut e1 = Vec::new();
    for h in [0.08, 0.04, 0.02] {
        let e = make_regular_grid(GridKind::Square, h, Domain::default(), WeightRule::InverseSpacing).unwrap();
        let (src, u_inf) = solve_from_origin(&e, Exponent::Infinity).unwrap();
        let (_, u2) = solve_from_origin(&e, Exponent::TWO).unwrap();
        let (_, u1) = solve_from_origin(&e, Exponent::ONE).unwrap();
        let x0 = e.coords[src];
        let (mut m2, mut m1) = (0.0f64, 0.0f64);
        for (i, x) in e.coords.iter().enumerate() {
            let (dx, dy) = ((x[0] - x0[0]).abs(), (x[1] - x0[1]).abs());
            l1_err = l1_err.max((u_inf.time(i) - (dx + dy)).abs());
            m2 = m2.max((u2.time(i) - dx.hypot(dy)).abs());
            m1 = m1.max((u1.time(i) - dx.max(dy)).abs());
        }
        e2.push(m2);
        e1.push(m1);
    }
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ");
    outcome(
        l1_err <= 1e-12 && dec(&e2) && dec(&e1),
        format!(
            "(a) p=inf vs |x|_1 max {l1_err:.1e}; (b) p=2 max err {}; (c) p=1 max err {}",
            fmt(&e2),
            fmt(&e1)
        ),
    )
}

fn convergence() -> Outcome {
    let hs = [0.08, 0.04, 0.02, 0.01];
    let kinds = [GridKind::Square, GridKind::Triangular, GridKind::Hexagonal];
    let rows = convergence_table(&kinds, &hs, Exponent::TWO, ProbeProtocol::default()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in kinds {
        let errs: Vec<f64> = rows.iter().filter(|r| r.kind == kind).map(|r| r.error).collect();
        let dec = errs.windows(2).all(|w| w[1] < w[0]);
        pass &= dec;
        parts.push(format!(
            "E_{} {} ({})",
            kind.short_name(),
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" "),
            if dec { "decreasing" } else { "NOT decreasing" }
        ));
    }
    let es = rows.iter().find(|r| r.kind == GridKind::Square && r.h == 0.02).unwrap().error;
    let in_band = (0.002..=0.02).contains(&es);
    pass &= in_band;
    parts.push(format!("E_S(0.02) = {es:.2e} {} [0.002, 0.02]", if in_band { "in" } else { "outside" }));
    outcome(pass, parts.join("; "))
}

fn kappa_scaling() -> Outcome {
    let report = kappa_scaling_check(0.02, Exponent::TWO, ProbeProtocol::default()).unwrap();
    let t = report.deviation(GridKind::Triangular).unwrap();
    let h = report.deviation(GridKind::Hexagonal).unwrap_or(f64::NAN);
    outcome(t <= 0.05, format!("sqrt(6/4) u_T vs u_S deviation {:.2}% (tol 5%); honeycomb {:.2}%", 100.0 * t, 100.0 * h))
}

fn sybil() -> Outcome {
    let mut changed = 0;
    let mut drops = 0;
    let mut eligible = 0;
    for seed in 0..20 {
        let mut r = rng(40_000 + seed);
        let n = r.random_range(30..120);
        let tg = random_trust_graph(&mut r, n, 3);
        let team: Vec<usize> = (0..3).collect();
        let target = r.random_range(3..n);
        let attacked = inject_sybil_cluster(&tg, target, 50, 1.0).unwrap();
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
            let before = distrust_times(&tg, &team, p).unwrap();
            let after = distrust_times(&attacked, &team, p).unwrap();
            changed += (0..n).filter(|&i| before[i].to_bits() != after[i].to_bits()).count();
        }
        let prior = neighbor_average(&tg, target).unwrap();
        if prior > 1.0 {
            eligible += 1;
            drops += (neighbor_average(&attacked, target).unwrap() < prior) as usize;
        }
    }
    outcome(
        changed == 0 && drops == eligible,
        format!(
            "20 graphs, cluster 50 @ 1.0, p in {{1,2,inf}}: {changed} changed arrival times; neighbour average dropped {drops}/{eligible}"
        ),
    )
}

fn moons() -> Outcome {
    let cfg = TwoMoonsConfig::default();
    let ps = [Exponent::ONE, Exponent::TWO, Exponent::Infinity];
    let acc = two_moons_accuracy(&cfg, &ps).unwrap();
    let stats: Vec<(f64, f64)> = acc.iter().map(|a| mean_std(a)).collect();
    let pass = stats[0].0 >= 87.0 && stats[1].0 >= 85.0 && stats[2].0 >= 85.0;
    let detail = ps
        .iter()
        .zip(&stats)
        .map(|(p, (m, s))| format!("p={p}: {m:.1} ({s:.2})"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, format!("{detail} over {} runs (need 87/85/85)", cfg.runs))
}

fn grid3_optimality() -> Outcome {
    let (g, x0, i) = fixtures::grid3();
    let s = [1.0; 9];
    let p = |moves: &str| {
        let mut nodes = vec![0];
        for m in moves.chars() {
            let last = *nodes.last().unwrap();
            nodes.push(if m == 'U' { last + 3 } else { last + 1 });
        }
        Path::new(&g, nodes).unwrap()
    };
    let p1 = vec![p("URUR")];
    let p2 = [p1.clone(), vec![p("RURU")]].concat();
    let p3 = [p2.clone(), vec![p("UURR"), p("RRUU")]].concat();
    let full = PathSet::new([p3.clone(), vec![p("URRU"), p("RUUR")]].concat()).unwrap();
    let all = enumerate_simple_paths(&g, x0, i, 64).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for model in [TravelModel::Quadratic, TravelModel::Linear] {
        let t = |ps: &[Path]| travel_time(&g, &s, &PathSet::new(ps.to_vec()).unwrap(), model).unwrap();
        let (t1, t2, t3) = (t(&p1), t(&p2), t(&p3));
        let tf = t(full.paths());
        let best = minimize_over_subsets(&g, &s, &all, model, Admissibility::Causal, 0.0, OracleCaps::default()).unwrap();
        let ok = best.evaluated == 4095 && best.minimizers.contains(&full) && t1 >= t2 && t2 >= t3 && t3 >= tf;
        pass &= ok;
        parts.push(format!(
            "{}: T(P1) {t1:.4} >= T(P2) {t2:.4} >= T(P3) {t3:.4} >= T(all monotone) {tf:.4} = min over {} sets",
            model.label(),
            best.evaluated
        ));
    }
    outcome(pass, parts.join("; "))
}

fn run_prop<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Result<u32, String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(config.rng_algorithm));
    runner.run(&strategy, check).map(|_| cases).map_err(|e| e.to_string())
}

fn invariant_suite() -> Outcome {
    let results = [
        ("local update", run_prop(300, local_input(), check_local)),
        ("s-homogeneity", run_prop(150, scaled_problem(), check_s_homogeneity)),
        ("w-homogeneity", run_prop(150, scaled_problem(), check_w_homogeneity)),
        ("comparison", run_prop(150, scaled_problem(), check_comparison)),
        ("p-monotonicity", run_prop(150, proptest::num::u64::ANY, check_p_monotone)),
        ("sybil", run_prop(60, sybil_input(), check_sybil)),
        ("label permutation/scaling", run_prop(60, label_input(), check_labels)),
        ("seed determinism", run_prop(60, proptest::num::u64::ANY, check_determinism)),
    ];
    let total: u32 = results.iter().filter_map(|(_, r)| r.as_ref().ok()).sum();
    let failed: Vec<String> =
        results.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    outcome(
        failed.is_empty() && total >= 1000,
        format!("{} properties, {total} cases{}", results.len(), failed.first().map(|f| format!("; {f}")).unwrap_or_default()),
    )
}

type Criterion = Box<dyn FnOnce() -> Outcome>;

fn main() {
    let secs = Duration::from_secs;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("residual correctness", Box::new(move || timed(secs(30), residuals))),
        ("path-set / value-iteration equivalences", Box::new(equivalences)),
        ("shortest-path reduction", Box::new(dijkstra_reduction)),
        ("square-grid closed forms", Box::new(grid_closed_forms)),
        ("convergence table", Box::new(move || timed(secs(180), convergence))),
        ("kappa-even scaling", Box::new(kappa_scaling)),
        ("sybil invariance", Box::new(sybil)),
        ("two moons", Box::new(move || timed(secs(180), moons))),
        ("3x3 path-set optimality", Box::new(grid3_optimality)),
        ("invariant suite", Box::new(invariant_suite)),
    ];
    let mut unexpected = Vec::new();
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let id = k + 1;
        let o = run();
        let tag = match (o.pass, EXPECTED_RED.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => {
                unexpected.push(id);
                "FAIL"
            }
        };
        println!("criterion {id:>2} {name}: {tag} — {}", o.detail);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
