//! Independent reference implementations and random instance generators
//! shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

pub mod props;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use graph_eikonal::trust::TrustGraph;
use graph_eikonal::{Exponent, Graph, NodeId, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const EXPONENTS: [Exponent; 5] = [
    Exponent::ONE,
    Exponent::Finite(1.5),
    Exponent::TWO,
    Exponent::Finite(3.0),
    Exponent::Infinity,
];

/// Textbook Dijkstra with cost `s_i / w_{j,i}` on edge `(j, i)`, seeded with
/// the boundary values.
pub fn dijkstra(graph: &Graph, spec: &ProblemSpec) -> Vec<f64> {
    #[derive(PartialEq)]
    struct Item(f64, NodeId);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Item {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
        }
    }
    let n = graph.node_count();
    let s = spec.slowness();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(b, v) in spec.boundary() {
        dist[b] = v;
        heap.push(Reverse(Item(v, b)));
    }
    while let Some(Reverse(Item(d, j))) = heap.pop() {
        if done[j] || d > dist[j] {
            continue;
        }
        done[j] = true;
        for (i, w) in graph.out_neighbors(j) {
            if spec.is_boundary(i) {
                continue;
            }
            let cand = d + s[i] / w;
            if cand < dist[i] {
                dist[i] = cand;
                heap.push(Reverse(Item(cand, i)));
            }
        }
    }
    dist
}

/// Breadth-first reachability from the boundary.
pub fn bfs_reached(graph: &Graph, sources: &[NodeId]) -> Vec<bool> {
    let mut seen = vec![false; graph.node_count()];
    let mut queue: std::collections::VecDeque<NodeId> = sources.iter().copied().collect();
    for &s in sources {
        seen[s] = true;
    }
    while let Some(v) = queue.pop_front() {
        for (w, _) in graph.out_neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// `||grad^+_w u_i||_p - s_i` computed directly from the definition.
pub fn residual_at(graph: &Graph, spec: &ProblemSpec, u: &[f64], i: NodeId) -> f64 {
    let parts = graph.in_neighbors(i).map(|(j, w)| {
        let d = u[i] - u[j];
        if d > 0.0 && u[j].is_finite() {
            w * d
        } else {
            0.0
        }
    });
    let norm = match spec.p() {
        Exponent::Infinity => parts.fold(0.0, f64::max),
        Exponent::Finite(p) => parts.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p),
    };
    norm - spec.slowness()[i]
}

/// Positive-part root by plain bisection on `[min u_j, min_j (u_j + s / w_j)]`:
/// the unique `t` with `sum (w_j (t - u_j)^+)^p = s^p`.
pub fn bisection_root(known: &[(f64, f64)], s: f64, p: Exponent) -> f64 {
    let lo0 = known.iter().map(|k| k.0).fold(f64::INFINITY, f64::min);
    if s == 0.0 {
        return lo0;
    }
    let f = |t: f64| -> f64 {
        let terms = known.iter().map(|&(u, w)| (w * (t - u)).max(0.0));
        match p {
            Exponent::Infinity => terms.fold(0.0, f64::max) - s,
            Exponent::Finite(q) => terms.map(|x| x.powf(q)).sum::<f64>() - s.powf(q),
        }
    };
    // Any single neighbour alone reaches s by min(u_j + s / w_j).
    let mut hi = known.iter().map(|&(u, w)| u + s / w).fold(f64::INFINITY, f64::min);
    let mut lo = lo0;
    for _ in 0..3000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random digraph on `n` nodes where every node is reachable from node 0:
/// a random arborescence plus each other ordered pair with probability
/// `extra`. Weights are uniform in `w_range`.
pub fn random_connected_digraph(rng: &mut ChaCha8Rng, n: usize, extra: f64, w_range: (f64, f64)) -> Graph {
    let mut order: Vec<NodeId> = (1..n).collect();
    for k in (1..order.len()).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let mut placed = vec![0];
    let mut adj = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for &v in &order {
        let parent = placed[rng.random_range(0..placed.len())];
        adj[parent][v] = true;
        edges.push((parent, v, rng.random_range(w_range.0..w_range.1)));
        placed.push(v);
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && !adj[a][b] && rng.random_bool(extra) {
                adj[a][b] = true;
                edges.push((a, b, rng.random_range(w_range.0..w_range.1)));
            }
        }
    }
    Graph::new(n, edges).expect("generated graph is valid")
}

/// Sparse version for larger `n`: arborescence plus about `extra_per_node`
/// random extra out-edges per node.
pub fn random_sparse_digraph(rng: &mut ChaCha8Rng, n: usize, extra_per_node: usize, w_range: (f64, f64)) -> Graph {
    let mut edges = std::collections::BTreeMap::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.insert((parent, v), rng.random_range(w_range.0..w_range.1));
    }
    for a in 0..n {
        for _ in 0..extra_per_node {
            let b = rng.random_range(0..n);
            if a != b {
                edges.entry((a, b)).or_insert_with(|| rng.random_range(w_range.0..w_range.1));
            }
        }
    }
    Graph::new(n, edges.into_iter().map(|((a, b), w)| (a, b, w))).expect("generated graph is valid")
}

pub fn random_slowness(rng: &mut ChaCha8Rng, n: usize, range: (f64, f64)) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(range.0..range.1)).collect()
}

/// A random problem: graph, 1..=3 boundary nodes with values in [0, 1),
/// slowness in [0.1, 5).
pub fn random_problem(seed: u64, max_n: usize, p: Exponent) -> (Graph, ProblemSpec) {
    let mut r = rng(seed);
    let n = r.random_range(2..=max_n);
    let g = random_sparse_digraph(&mut r, n, 2, (0.1, 10.0));
    let k = r.random_range(1..=n.min(3));
    let mut boundary = vec![(0usize, 0.0)];
    while boundary.len() < k {
        let b = r.random_range(1..n);
        if !boundary.iter().any(|x| x.0 == b) {
            boundary.push((b, r.random_range(0.0..1.0)));
        }
    }
    let s = random_slowness(&mut r, n, (0.1, 5.0));
    (g, ProblemSpec::new(n, boundary, s, p).expect("valid problem"))
}

/// Random trust graph with ratings drawn from the four categorical values.
pub fn random_trust_graph(rng: &mut ChaCha8Rng, n: usize, out_degree: usize) -> TrustGraph {
    const LEVELS: [f64; 4] = [0.4, 0.6, 0.8, 1.0];
    let mut edges = std::collections::BTreeMap::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.insert((parent, v), LEVELS[rng.random_range(0..4)]);
    }
    for a in 0..n {
        for _ in 0..out_degree {
            let b = rng.random_range(0..n);
            if a != b {
                edges.entry((a, b)).or_insert_with(|| LEVELS[rng.random_range(0..4)]);
            }
        }
    }
    TrustGraph::new(n, edges.into_iter().map(|((a, b), w)| (a, b, w))).expect("valid trust graph")
}
