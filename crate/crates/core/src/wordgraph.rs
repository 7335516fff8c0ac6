//! Word co-occurrence networks built by clique-expanding each tweet's
//! distinct lemma set, the city–attraction place graph, and macroscopic
//! graph statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::categorize::{EntityMentions, Gazetteer, PlaceKind};
use crate::corpus::Language;
use crate::graph::Graph;
use crate::netmetrics;
use crate::sentiment::Polarity;

pub const DEFAULT_CLIQUE_CAP: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Split {
    pub lang: Language,
    pub polarity: Polarity,
}

impl Split {
    pub fn all() -> [Split; 4] {
        [
            Split { lang: Language::It, polarity: Polarity::Positive },
            Split { lang: Language::It, polarity: Polarity::Negative },
            Split { lang: Language::En, polarity: Polarity::Positive },
            Split { lang: Language::En, polarity: Polarity::Negative },
        ]
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.lang, self.polarity.as_str())
    }
}

/// Undirected weighted co-occurrence graph. Edge keys are ordered pairs
/// `(u, v)` with `u < v`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordGraph {
    /// Lemma → number of tweets containing it.
    pub nodes: BTreeMap<String, u32>,
    /// (u, v) → number of tweets containing both.
    pub edges: BTreeMap<(String, String), u32>,
    pub split: Option<Split>,
    /// Tweets whose distinct lemma set exceeded the clique cap.
    pub truncated_tweets: usize,
}

impl WordGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, u: &str, v: &str) -> Option<u32> {
        let key = if u < v { (u.to_owned(), v.to_owned()) } else { (v.to_owned(), u.to_owned()) };
        self.edges.get(&key).copied()
    }

    /// Adds another graph's frequencies and weights into this one.
    pub fn absorb(&mut self, other: &WordGraph) {
        for (n, f) in &other.nodes {
            *self.nodes.entry(n.clone()).or_default() += f;
        }
        for (e, w) in &other.edges {
            *self.edges.entry(e.clone()).or_default() += w;
        }
        self.truncated_tweets += other.truncated_tweets;
    }

    /// Unweighted structure for the centrality and community algorithms.
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(
            self.nodes.keys().map(String::as_str),
            self.edges.keys().map(|(u, v)| (u.as_str(), v.as_str())),
        )
    }

    /// Checks the structural invariants, returning the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        for ((u, v), &w) in &self.edges {
            if u >= v {
                return Err(format!("edge ({u}, {v}) not canonical"));
            }
            let (Some(&fu), Some(&fv)) = (self.nodes.get(u), self.nodes.get(v)) else {
                return Err(format!("edge ({u}, {v}) has an unknown endpoint"));
            };
            if w == 0 || w > fu.min(fv) {
                return Err(format!("edge ({u}, {v}) weight {w} vs frequencies {fu}, {fv}"));
            }
        }
        if self.nodes.values().any(|&f| f == 0) {
            return Err("node with zero frequency".into());
        }
        Ok(())
    }
}

/// Distinct lemmas of one tweet, cut to `cap` by corpus frequency rank
/// (higher frequency first, then lexicographic) when too many.
fn capped_set<'a>(lemmas: &'a [String], cap: usize, freq: &HashMap<&str, u32>) -> (Vec<&'a str>, bool) {
    let mut set: Vec<&str> = lemmas.iter().map(String::as_str).collect::<BTreeSet<_>>().into_iter().collect();
    if set.len() <= cap {
        return (set, false);
    }
    set.sort_by(|a, b| freq[b].cmp(&freq[a]).then(a.cmp(b)));
    set.truncate(cap);
    set.sort_unstable();
    (set, true)
}

/// Clique-expands every tweet's distinct lemma set and sums the cliques.
pub fn build_word_graph(tweets: &[&[String]], split: Option<Split>, cap: usize) -> WordGraph {
    let mut doc_freq: HashMap<&str, u32> = HashMap::new();
    for lemmas in tweets {
        for l in lemmas.iter().map(String::as_str).collect::<BTreeSet<_>>() {
            *doc_freq.entry(l).or_default() += 1;
        }
    }
    if tweets.is_empty() {
        warn!("word graph {}: empty split", split.map_or("-".to_owned(), |s| s.to_string()));
    }
    let mut graph = tweets
        .par_iter()
        .fold(WordGraph::default, |mut g, lemmas| {
            let (set, truncated) = capped_set(lemmas, cap, &doc_freq);
            if truncated {
                g.truncated_tweets += 1;
            }
            for (i, u) in set.iter().enumerate() {
                *g.nodes.entry((*u).to_owned()).or_default() += 1;
                for v in &set[i + 1..] {
                    *g.edges.entry(((*u).to_owned(), (*v).to_owned())).or_default() += 1;
                }
            }
            g
        })
        .reduce(WordGraph::default, |mut a, b| {
            a.absorb(&b);
            a
        });
    if graph.truncated_tweets > 0 {
        warn!("{} tweets exceeded the clique cap of {cap} lemmas", graph.truncated_tweets);
    }
    graph.split = split;
    graph
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceNode {
    pub name: String,
    pub kind: PlaceKind,
    pub mentions: u32,
    pub degree: usize,
    pub degree_centrality: f64,
    pub closeness: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlaceGraph {
    /// Sorted by name.
    pub nodes: Vec<PlaceNode>,
    /// (city, attraction) → co-mention tweet count.
    pub edges: BTreeMap<(String, String), u32>,
}

impl PlaceGraph {
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(
            self.nodes.iter().map(|n| n.name.as_str()),
            self.edges.keys().map(|(c, a)| (c.as_str(), a.as_str())),
        )
    }

    pub fn node(&self, name: &str) -> Option<&PlaceNode> {
        self.nodes
            .binary_search_by(|n| n.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.nodes[i])
    }

    /// Recomputes degree, degree centrality and closeness.
    pub fn refresh_metrics(&mut self) {
        let g = self.to_graph();
        let closeness = netmetrics::closeness_values(&g);
        let denom = g.node_count().saturating_sub(1);
        for node in &mut self.nodes {
            let i = g.index_of(&node.name).expect("node present");
            node.degree = g.degree(i);
            node.degree_centrality = if denom == 0 { 0.0 } else { node.degree as f64 / denom as f64 };
            node.closeness = closeness[i];
        }
    }

    /// Adds co-mentions from one more tweet and refreshes metrics.
    pub fn add_mentions(&mut self, mentions: &EntityMentions, gazetteer: &Gazetteer) {
        self.accumulate(mentions, gazetteer);
        self.refresh_metrics();
    }

    fn accumulate(&mut self, mentions: &EntityMentions, gazetteer: &Gazetteer) {
        let mut places: BTreeSet<(&str, PlaceKind)> = BTreeSet::new();
        for c in &mentions.cities {
            places.insert((c, PlaceKind::City));
        }
        for a in &mentions.attractions {
            places.insert((a, PlaceKind::Attraction));
        }
        for (name, kind) in &places {
            let kind = gazetteer.get(name).map_or(*kind, |p| p.kind);
            match self.nodes.binary_search_by(|n| n.name.as_str().cmp(name)) {
                Ok(i) => self.nodes[i].mentions += 1,
                Err(i) => self.nodes.insert(
                    i,
                    PlaceNode {
                        name: (*name).to_owned(),
                        kind,
                        mentions: 1,
                        degree: 0,
                        degree_centrality: 0.0,
                        closeness: 0.0,
                    },
                ),
            }
        }
        let cities: BTreeSet<&str> = mentions.cities.iter().map(String::as_str).collect();
        let attractions: BTreeSet<&str> = mentions.attractions.iter().map(String::as_str).collect();
        for c in &cities {
            for a in &attractions {
                *self.edges.entry(((*c).to_owned(), (*a).to_owned())).or_default() += 1;
            }
        }
    }
}

/// City–attraction co-mention graph with per-node metrics attached.
pub fn build_place_graph(mentions: &[EntityMentions], gazetteer: &Gazetteer) -> PlaceGraph {
    let mut g = PlaceGraph::default();
    for m in mentions {
        g.accumulate(m, gazetteer);
    }
    g.refresh_metrics();
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub max_degree: usize,
    pub avg_degree: f64,
}

pub fn graph_stats(g: &Graph) -> GraphStats {
    let n = g.node_count();
    let e = g.edge_count();
    GraphStats {
        nodes: n,
        edges: e,
        density: if n < 2 { 0.0 } else { 2.0 * e as f64 / (n as f64 * (n as f64 - 1.0)) },
        max_degree: (0..n).map(|v| g.degree(v)).max().unwrap_or(0),
        avg_degree: if n == 0 { 0.0 } else { 2.0 * e as f64 / n as f64 },
    }
}
