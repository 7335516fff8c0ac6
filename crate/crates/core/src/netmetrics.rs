//! Degree, closeness, betweenness and eigenvector centrality on unweighted
//! undirected graphs, with ranked top-k reporting.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Betweenness,
    Closeness,
    Degree,
    Eigenvector,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Betweenness, Measure::Closeness, Measure::Degree, Measure::Eigenvector];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
            Measure::Degree => "degree",
            Measure::Eigenvector => "eigenvector",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scores indexed like the graph's nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityScores {
    pub measure: Measure,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub normalized: bool,
}

impl CentralityScores {
    fn new(g: &Graph, measure: Measure, values: Vec<f64>, normalized: bool) -> Self {
        Self {
            measure,
            labels: g.labels().to_vec(),
            values,
            normalized,
        }
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| self.values[i])
    }
}

/// deg(v) / (N − 1).
pub fn degree_centrality(g: &Graph) -> Result<CentralityScores> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("degree centrality needs N >= 2, got {n}")));
    }
    let values = (0..n).map(|v| g.degree(v) as f64 / (n - 1) as f64).collect();
    Ok(CentralityScores::new(g, Measure::Degree, values, true))
}

/// Reach-scaled closeness: ((r−1)/(N−1)) · ((r−1)/Σd) where r counts the
/// nodes reachable from v (v included). Isolated nodes score 0.
pub fn closeness_values(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    (0..n)
        .into_par_iter()
        .map(|v| {
            let (mut reach, mut total) = (0usize, 0usize);
            for d in g.bfs(v).into_iter().flatten() {
                reach += 1;
                total += d;
            }
            if total == 0 || n < 2 {
                0.0
            } else {
                let r = (reach - 1) as f64;
                (r / (n - 1) as f64) * (r / total as f64)
            }
        })
        .collect()
}

pub fn closeness_centrality(g: &Graph) -> Result<CentralityScores> {
    if g.node_count() < 2 {
        return Err(Error::InvalidArgument("closeness needs N >= 2".into()));
    }
    Ok(CentralityScores::new(g, Measure::Closeness, closeness_values(g), true))
}

/// Dependency of `source` on every node (Brandes' single-source pass).
fn source_dependency(g: &Graph, source: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    sigma[source] = 1.0;
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[u] + 1 {
                sigma[w] += sigma[u];
                preds[w].push(u);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &u in &preds[w] {
            delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[source] = 0.0;
    delta
}

/// Brandes' algorithm over unweighted shortest paths. Raw values count each
/// unordered pair once; `normalized` divides by (N−1)(N−2)/2.
pub fn betweenness_centrality(g: &Graph, normalized: bool) -> CentralityScores {
    let n = g.node_count();
    let per_source: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| source_dependency(g, s)).collect();
    // summed in source order so results do not depend on thread count
    let mut values = vec![0.0; n];
    for dep in &per_source {
        for (v, d) in values.iter_mut().zip(dep) {
            *v += d;
        }
    }
    let scale = if normalized && n > 2 { 2.0 / ((n - 1) as f64 * (n - 2) as f64) } else { 1.0 };
    for v in &mut values {
        *v *= 0.5 * scale;
    }
    CentralityScores::new(g, Measure::Betweenness, values, normalized)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 1000,
        }
    }
}

fn multiply(g: &Graph, x: &[f64], shift: f64) -> Vec<f64> {
    (0..g.node_count())
        .map(|v| shift * x[v] + g.neighbors(v).iter().map(|&u| x[u]).sum::<f64>())
        .collect()
}

fn normalize_l2(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Power iteration on the adjacency operator from the uniform vector,
/// L2-normalized. Period-2 oscillation (bipartite components) is detected
/// and resolved by switching to A + 0.5·I, which has the same dominant
/// eigenvector.
pub fn eigenvector_centrality(g: &Graph, options: EigenOptions) -> Result<CentralityScores> {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return Err(Error::InvalidArgument("eigenvector centrality needs at least one edge".into()));
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut prev: Option<Vec<f64>> = None;
    let mut shift = 0.0;
    for _ in 0..options.max_iters {
        let mut next = multiply(g, &x, shift);
        normalize_l2(&mut next);
        if max_diff(&next, &x) < options.tol {
            return Ok(CentralityScores::new(g, Measure::Eigenvector, next, true));
        }
        if shift == 0.0 && prev.as_deref().is_some_and(|p| max_diff(&next, p) < options.tol) {
            shift = 0.5;
            prev = None;
        } else {
            prev = Some(std::mem::replace(&mut x, next.clone()));
        }
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: options.max_iters,
    })
}

/// Descending by score, ties by label; truncated to `k`.
pub fn top_k(scores: &CentralityScores, k: usize) -> Vec<(String, f64)> {
    let mut ranked: Vec<(String, f64)> = scores.labels.iter().cloned().zip(scores.values.iter().copied()).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

/// Score formatted with two decimals, as in the ranking reports.
pub fn report_score(value: f64) -> String {
    format!("{value:.2}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges([], [("A", "B"), ("B", "C")])
    }

    fn star(leaves: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..=leaves).map(|l| (0, l)).collect();
        Graph::from_index_edges(leaves + 1, &edges)
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_index_edges(n, &edges)
    }

    #[test]
    fn degree_examples() {
        let d = degree_centrality(&path3()).unwrap();
        assert_eq!((d.get("B"), d.get("A")), (Some(1.0), Some(0.5)));
        let d = degree_centrality(&star(4)).unwrap();
        assert_eq!(d.values, vec![1.0, 0.25, 0.25, 0.25, 0.25]);
        assert!(degree_centrality(&Graph::from_index_edges(1, &[])).is_err());
    }

    #[test]
    fn closeness_examples() {
        let c = closeness_centrality(&complete(3)).unwrap();
        assert!(c.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let c = closeness_centrality(&path3()).unwrap();
        assert!((c.get("B").unwrap() - 1.0).abs() < 1e-12);
        assert!((c.get("A").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let c = closeness_centrality(&Graph::from_index_edges(4, &[(0, 1), (2, 3)])).unwrap();
        assert!(c.values.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-12));
        let c = closeness_values(&Graph::from_index_edges(3, &[(0, 1)]));
        assert_eq!(c[2], 0.0);
    }

    #[test]
    fn betweenness_examples() {
        let b = betweenness_centrality(&path3(), false);
        assert_eq!(b.values, vec![0.0, 1.0, 0.0]);
        let b = betweenness_centrality(&star(4), false);
        assert_eq!(b.values[0], 6.0);
        assert!(b.values[1..].iter().all(|&v| v == 0.0));
        let b = betweenness_centrality(&star(4), true);
        assert_eq!(b.values[0], 1.0);
    }

    #[test]
    fn eigenvector_examples() {
        let e = eigenvector_centrality(&complete(4), EigenOptions::default()).unwrap();
        assert!(e.values.iter().all(|&v| (v - 0.5).abs() < 1e-9));
        let e = eigenvector_centrality(&star(4), EigenOptions::default()).unwrap();
        assert!((e.values[0] - 1.0 / 2f64.sqrt()).abs() < 1e-6);
        assert!(e.values[1..].iter().all(|&v| (v - 0.5 / 2f64.sqrt()).abs() < 1e-6));
        assert!(eigenvector_centrality(&Graph::from_index_edges(3, &[]), EigenOptions::default()).is_err());
        let tight = EigenOptions { tol: 1e-300, max_iters: 5 };
        assert!(matches!(
            eigenvector_centrality(&path3(), tight),
            Err(Error::NoConvergence { iterations: 5 })
        ));
    }

    #[test]
    fn vertex_transitive_graphs_are_flat() {
        let cycle = Graph::from_index_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        for g in [cycle, complete(5)] {
            let all = [
                degree_centrality(&g).unwrap().values,
                closeness_centrality(&g).unwrap().values,
                betweenness_centrality(&g, false).values,
                eigenvector_centrality(&g, EigenOptions::default()).unwrap().values,
            ];
            for values in all {
                assert!(values.iter().all(|v| (v - values[0]).abs() < 1e-9), "{values:?}");
            }
        }
    }

    #[test]
    fn top_k_rules() {
        let s = CentralityScores {
            measure: Measure::Degree,
            labels: vec!["b".into(), "a".into(), "c".into()],
            values: vec![0.5, 0.5, 0.9],
            normalized: true,
        };
        assert_eq!(
            top_k(&s, 10),
            vec![("c".to_string(), 0.9), ("a".to_string(), 0.5), ("b".to_string(), 0.5)]
        );
        assert_eq!(top_k(&s, 1).len(), 1);
        assert_eq!(report_score(0.2449), "0.24");
    }
}
