//! Community detection (label propagation, greedy modularity), size
//! thresholding and hub-dominant nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    LabelPropagation,
    GreedyModularity,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::LabelPropagation => "label_propagation",
            Algorithm::GreedyModularity => "greedy_modularity",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Node → community assignment. Ids are dense, ordered by descending size
/// and then by smallest member (node indices follow label order).
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub assignment: Vec<usize>,
    pub sizes: Vec<usize>,
    /// `None` when the graph has no edges.
    pub modularity: Option<f64>,
}

impl Partition {
    /// Canonicalizes arbitrary labels and computes modularity on `g`.
    pub fn from_labels(g: &Graph, labels: &[usize]) -> Self {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (node, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(node);
        }
        let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
        groups.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut assignment = vec![0; labels.len()];
        for (id, members) in groups.iter().enumerate() {
            for &n in members {
                assignment[n] = id;
            }
        }
        let sizes = groups.iter().map(Vec::len).collect();
        let modularity = modularity(g, &assignment).ok();
        Partition {
            assignment,
            sizes,
            modularity,
        }
    }

    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn members(&self, community: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&n| self.assignment[n] == community)
            .collect()
    }
}

/// Q = (1/2m) Σ_ij (A_ij − k_i k_j / 2m) δ(c_i, c_j).
pub fn modularity(g: &Graph, assignment: &[usize]) -> Result<f64> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::InvalidArgument("modularity is undefined on an edgeless graph".into()));
    }
    let c = assignment.iter().copied().max().map_or(0, |x| x + 1);
    let mut internal = vec![0usize; c];
    let mut degree = vec![0usize; c];
    for (u, v) in g.edges() {
        if assignment[u] == assignment[v] {
            internal[assignment[u]] += 1;
        }
    }
    for v in 0..g.node_count() {
        degree[assignment[v]] += g.degree(v);
    }
    let two_m = 2.0 * m as f64;
    Ok((0..c)
        .map(|i| internal[i] as f64 / m as f64 - (degree[i] as f64 / two_m).powi(2))
        .sum())
}

/// Asynchronous label propagation. Each sweep visits nodes in a fresh
/// seeded order; a node moves only if its label is outside its
/// neighbourhood's majority set, picking uniformly among the majority.
pub fn label_propagation(g: &Graph, seed: u64) -> Partition {
    const MAX_SWEEPS: usize = 1000;
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..MAX_SWEEPS {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            let best = majority_labels(g, &labels, v);
            if best.is_empty() || best.contains(&labels[v]) {
                continue;
            }
            labels[v] = *best.choose(&mut rng).expect("non-empty");
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Partition::from_labels(g, &labels)
}

fn majority_labels(g: &Graph, labels: &[usize], v: usize) -> Vec<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &u in g.neighbors(v) {
        *counts.entry(labels[u]).or_default() += 1;
    }
    let top = counts.values().copied().max().unwrap_or(0);
    counts.into_iter().filter(|&(_, c)| c == top).map(|(l, _)| l).collect()
}

/// Clauset–Newman–Moore agglomeration. Communities are keyed by their
/// smallest member; the merge gain is compared as the exact integer
/// 2m·L_ij − D_i·D_j (proportional to ΔQ), ties to the smallest pair.
pub fn greedy_modularity(g: &Graph) -> Result<Partition> {
    let m = g.edge_count() as i64;
    if m == 0 {
        return Err(Error::InvalidArgument("greedy modularity needs at least one edge".into()));
    }
    let n = g.node_count();
    let mut links: BTreeMap<usize, BTreeMap<usize, i64>> = (0..n).map(|v| (v, BTreeMap::new())).collect();
    for (u, v) in g.edges() {
        *links.get_mut(&u).unwrap().entry(v).or_default() += 1;
        *links.get_mut(&v).unwrap().entry(u).or_default() += 1;
    }
    let mut degree: Vec<i64> = (0..n).map(|v| g.degree(v) as i64).collect();
    let mut labels: Vec<usize> = (0..n).collect();
    loop {
        let mut best: Option<(i64, usize, usize)> = None;
        for (&a, nbrs) in &links {
            for (&b, &l) in nbrs.range(a + 1..) {
                let gain = 2 * m * l - degree[a] * degree[b];
                if best.is_none_or(|(g0, _, _)| gain > g0) {
                    best = Some((gain, a, b));
                }
            }
        }
        let Some((gain, a, b)) = best.filter(|&(gain, _, _)| gain > 0) else {
            break;
        };
        log::trace!("merging {a} and {b} (gain {gain})");
        let absorbed = links.remove(&b).expect("live community");
        for (c, l) in absorbed {
            let row = links.get_mut(&c).expect("live community");
            row.remove(&b);
            if c != a {
                *row.entry(a).or_default() += l;
                *links.get_mut(&a).unwrap().entry(c).or_default() += l;
            }
        }
        links.get_mut(&a).unwrap().remove(&b);
        degree[a] += degree[b];
        for l in labels.iter_mut().filter(|l| **l == b) {
            *l = a;
        }
    }
    Ok(Partition::from_labels(g, &labels))
}

/// Threshold = population standard deviation of community sizes; chosen
/// ids have size strictly above it, or the largest community if none do.
pub fn choose_communities(sizes: &[usize]) -> Result<(f64, Vec<usize>)> {
    if sizes.is_empty() {
        return Err(Error::Empty("no communities to choose from".into()));
    }
    let n = sizes.len() as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / n;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n;
    let threshold = var.sqrt();
    let mut chosen: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] as f64 > threshold).collect();
    if chosen.is_empty() {
        let largest = (0..sizes.len()).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)));
        chosen.extend(largest);
    }
    Ok((threshold, chosen))
}

/// Highest-degree node of the subgraph induced by `members`, ties to the
/// lexicographically smallest label.
pub fn hub_dominant(g: &Graph, members: &[usize]) -> Result<String> {
    if members.is_empty() {
        return Err(Error::InvalidArgument("hub of an empty community".into()));
    }
    let sub = g.induced(members);
    let hub = (0..sub.node_count())
        .max_by(|&a, &b| sub.degree(a).cmp(&sub.degree(b)).then(b.cmp(&a)))
        .expect("non-empty");
    Ok(sub.label(hub).to_owned())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityReport {
    pub algorithm: Algorithm,
    pub community_count: usize,
    pub modularity: Option<f64>,
    pub threshold: f64,
    pub chosen: Vec<usize>,
    pub hubs: BTreeMap<usize, String>,
    /// community id → member labels
    pub membership: BTreeMap<usize, Vec<String>>,
}

/// Detects communities with `algorithm`, thresholds them and extracts hubs.
/// An edgeless graph yields singletons under either algorithm.
pub fn community_report(g: &Graph, algorithm: Algorithm, seed: u64) -> Result<CommunityReport> {
    if g.node_count() == 0 {
        return Err(Error::Empty("graph has no nodes".into()));
    }
    let partition = match algorithm {
        Algorithm::LabelPropagation => label_propagation(g, seed),
        Algorithm::GreedyModularity if g.edge_count() == 0 => {
            Partition::from_labels(g, &(0..g.node_count()).collect::<Vec<_>>())
        }
        Algorithm::GreedyModularity => greedy_modularity(g)?,
    };
    let (threshold, chosen) = choose_communities(&partition.sizes)?;
    let mut hubs = BTreeMap::new();
    for &c in &chosen {
        hubs.insert(c, hub_dominant(g, &partition.members(c))?);
    }
    let membership = (0..partition.community_count())
        .map(|c| {
            let labels: BTreeSet<String> = partition.members(c).into_iter().map(|n| g.label(n).to_owned()).collect();
            (c, labels.into_iter().collect())
        })
        .collect();
    Ok(CommunityReport {
        algorithm,
        community_count: partition.community_count(),
        modularity: partition.modularity,
        threshold,
        chosen,
        hubs,
        membership,
    })
}
