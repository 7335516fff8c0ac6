//! Oracles and generators shared by the integration tests. Nothing here
//! calls into the algorithms it checks.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweetflow::config::PipelineConfig;
use tweetflow::graph::Graph;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_config(out: &Path) -> PipelineConfig {
    let mut config = PipelineConfig::load(&crate_dir().join("fixtures/pipeline.toml")).expect("fixture config");
    config.output_dir = Some(out.to_path_buf());
    config
}

/// Erdős–Rényi graph on `n` index-labelled nodes.
pub fn random_graph(n: usize, p: f64, seed: u64) -> (Graph, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    (Graph::from_index_edges(n, &edges), edges)
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

/// All-pairs hop distances by Floyd–Warshall.
pub fn distances(adj: &[Vec<bool>]) -> Vec<Vec<Option<usize>>> {
    let n = adj.len();
    let mut d: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if adj[i][j] { Some(1) } else { None }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, as node sequences.
pub fn shortest_paths(adj: &[Vec<bool>], dist: &[Vec<Option<usize>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    let Some(target) = dist[s][t] else { return Vec::new() };
    let mut out = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == t {
            out.push(path);
            continue;
        }
        for next in 0..adj.len() {
            // stay on a geodesic: one step closer to t each time
            if adj[last][next] && dist[next][t] == Some(target - path.len()) {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }
    out
}

/// Raw betweenness by enumerating all shortest paths of every unordered pair.
pub fn betweenness_by_enumeration(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let adj = adjacency(n, edges);
    let dist = distances(&adj);
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(&adj, &dist, s, t);
            if paths.is_empty() {
                continue;
            }
            let mut through = vec![0usize; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                b[v] += through[v] as f64 / paths.len() as f64;
            }
        }
    }
    b
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if adj[u][v] && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Dominant eigenvector of the adjacency matrix from a dense symmetric
/// eigendecomposition, signed nonnegative and L2-normalized.
pub fn dense_eigenvector(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for &(a, b) in edges {
        m[(a, b)] = 1.0;
        m[(b, a)] = 1.0;
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let top = (0..n).max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).expect("n > 0");
    let v = eig.eigenvectors.column(top);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    let norm = v.norm();
    v.iter().map(|x| sign * x / norm).collect()
}

/// Modularity straight from the definition, summing over node pairs.
pub fn modularity_by_definition(n: usize, edges: &[(usize, usize)], assignment: &[usize]) -> f64 {
    let adj = adjacency(n, edges);
    let m = edges.len() as f64;
    let deg: Vec<f64> = adj.iter().map(|r| r.iter().filter(|&&x| x).count() as f64).collect();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                q += f64::from(u8::from(adj[i][j])) - deg[i] * deg[j] / (2.0 * m);
            }
        }
    }
    q / (2.0 * m)
}

/// Best modularity over every set partition of `n` nodes (restricted
/// growth strings).
pub fn best_modularity(n: usize, edges: &[(usize, usize)]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut labels = vec![0usize; n];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, n: usize, edges: &[(usize, usize)], best: &mut f64) {
        if i == n {
            *best = best.max(modularity_by_definition(n, edges, labels));
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            rec(i + 1, max.max(l), labels, n, edges, best);
        }
    }
    if n > 0 {
        rec(1, 0, &mut labels, n, edges, &mut best);
    }
    best
}

/// Relative path → bytes for every file under `root`.
pub fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir).expect("readable dir").map(|e| e.unwrap().path()).collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
