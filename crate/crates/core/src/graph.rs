//! Compact undirected simple graph over string-labelled nodes, the input
//! type of every centrality and community algorithm.

use std::collections::{BTreeMap, BTreeSet};

/// Nodes are indexed in lexicographic label order; adjacency lists are
/// sorted and free of self-loops and duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from node labels and label pairs. Edge endpoints are
    /// added as nodes if missing; self-loops and repeats are dropped.
    pub fn from_edges<'a, N, E>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = &'a str>,
        E: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let edges: Vec<(&str, &str)> = edges.into_iter().collect();
        let mut names: BTreeSet<&str> = nodes.into_iter().collect();
        for &(u, v) in &edges {
            names.insert(u);
            names.insert(v);
        }
        let labels: Vec<String> = names.into_iter().map(str::to_owned).collect();
        let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); labels.len()];
        for (u, v) in edges {
            let (a, b) = (index[u], index[v]);
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        Graph {
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
            labels,
        }
    }

    /// Graph on nodes `0..n` labelled by zero-padded indices, so that label
    /// order matches index order.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let width = n.saturating_sub(1).to_string().len();
        let labels: Vec<String> = (0..n).map(|i| format!("{i:0width$}")).collect();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        Graph {
            labels,
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Each edge once as (smaller index, larger index), sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `nodes` (labels kept).
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let keep: BTreeSet<usize> = nodes.iter().copied().collect();
        let edges: Vec<(&str, &str)> = self
            .edges()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v))
            .map(|(u, v)| (self.label(u), self.label(v)))
            .collect();
        Graph::from_edges(keep.iter().map(|&n| self.label(n)), edges)
    }

    /// Single-source BFS distances; `None` for unreachable nodes.
    pub fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have distances");
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}
