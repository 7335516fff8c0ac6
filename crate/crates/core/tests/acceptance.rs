//! Acceptance suite: one line per criterion, non-zero exit if any fails.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use common::*;
use tweetflow::clustering::select_k;
use tweetflow::community::{choose_communities, greedy_modularity, hub_dominant, modularity};
use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{dedup, filter_language, load_corpus, Corpus, InputFormat, Language, LoadOptions, TweetRecord};
use tweetflow::domainfilter::{match_strings, merge_results, MergeMode};
use tweetflow::graph::Graph;
use tweetflow::netmetrics::{
    betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality, EigenOptions,
};
use tweetflow::pipeline::Pipeline;
use tweetflow::preprocess::{SparseVec, TfIdfMatrix, TokenizedDoc, Vocabulary};
use tweetflow::sentiment::{lexicon_for, score, Polarity, SentimentLexicon};
use tweetflow::topics::{dominant_topic, fit_lda_observed, LdaConfig};
use tweetflow::wordgraph::{build_word_graph, graph_stats};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn elapsed_within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took <= limit, "{what} took {took:.2?}, limit {limit:?}");
    Ok(())
}

fn centrality_oracles() -> Outcome {
    let start = Instant::now();
    let mut graphs = 0;
    let mut eigen_checked = 0;
    for seed in 0..300u64 {
        let n = 2 + (seed as usize % 9);
        let p = [0.25, 0.4, 0.6][seed as usize % 3];
        let (g, edges) = random_graph(n, p, seed);
        graphs += 1;
        let adj = adjacency(n, &edges);
        let dist = distances(&adj);

        let brandes = betweenness_centrality(&g, false);
        let oracle = betweenness_by_enumeration(n, &edges);
        for v in 0..n {
            ensure!(
                close(brandes.values[v], oracle[v], 1e-9),
                "seed {seed}: betweenness of {v} is {} but path enumeration gives {}",
                brandes.values[v],
                oracle[v]
            );
        }

        let degree = degree_centrality(&g).map_err(|e| e.to_string())?;
        let closeness = closeness_centrality(&g).map_err(|e| e.to_string())?;
        for v in 0..n {
            let deg = adj[v].iter().filter(|&&x| x).count();
            ensure!(degree.values[v] == deg as f64 / (n - 1) as f64, "seed {seed}: degree of {v}");
            let reachable: Vec<usize> = dist[v].iter().flatten().copied().collect();
            let r = (reachable.len() - 1) as f64;
            let total: usize = reachable.iter().sum();
            let expected = if total == 0 { 0.0 } else { (r / (n - 1) as f64) * (r / total as f64) };
            ensure!(closeness.values[v] == expected, "seed {seed}: closeness of {v} {} != {expected}", closeness.values[v]);
        }

        if !edges.is_empty() && is_connected(n, &edges) {
            let eig = eigenvector_centrality(&g, EigenOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
            let oracle = dense_eigenvector(n, &edges);
            for v in 0..n {
                ensure!(
                    close(eig.values[v], oracle[v], 1e-6),
                    "seed {seed}: eigenvector of {v} is {} but the dense solve gives {}",
                    eig.values[v],
                    oracle[v]
                );
            }
            eigen_checked += 1;
        }
    }
    ensure!(eigen_checked >= 100, "only {eigen_checked} connected graphs for the eigenvector oracle");
    elapsed_within(start, Duration::from_secs(10), "oracle sweep")?;
    Ok(format!("{graphs} graphs, {eigen_checked} eigenvector checks, {:.2?}", start.elapsed()))
}

fn named(edges: &[(&'static str, &'static str)]) -> Graph {
    Graph::from_edges([], edges.iter().copied())
}

fn score_of(g: &Graph, values: &[f64], label: &str) -> f64 {
    values[g.index_of(label).expect("label")]
}

fn barbell() -> Graph {
    let mut edges = Vec::new();
    for side in [["a1", "a2", "a3", "a4"], ["b1", "b2", "b3", "b4"]] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((side[i], side[j]));
            }
        }
    }
    edges.push(("a4", "b1"));
    named(&edges)
}

fn named_graphs() -> Outcome {
    let path = named(&[("A", "B"), ("B", "C")]);
    let star = named(&[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]);
    let triangle = named(&[("A", "B"), ("B", "C"), ("A", "C")]);
    let k4 = named(&[("A", "B"), ("A", "C"), ("A", "D"), ("B", "C"), ("B", "D"), ("C", "D")]);
    let two_k3 = named(&[("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")]);
    let two_edges = named(&[("A", "B"), ("C", "D")]);
    let err = |e: tweetflow::Error| e.to_string();

    let d = degree_centrality(&path).map_err(err)?;
    ensure!(score_of(&path, &d.values, "B") == 1.0 && score_of(&path, &d.values, "A") == 0.5, "path degree");
    let d = degree_centrality(&star).map_err(err)?;
    ensure!(score_of(&star, &d.values, "c") == 1.0 && score_of(&star, &d.values, "l1") == 0.25, "star degree");

    let c = closeness_centrality(&triangle).map_err(err)?;
    ensure!(c.values.iter().all(|&v| v == 1.0), "triangle closeness {:?}", c.values);
    let c = closeness_centrality(&path).map_err(err)?;
    ensure!(
        score_of(&path, &c.values, "B") == 1.0 && close(score_of(&path, &c.values, "A"), 2.0 / 3.0, 1e-12),
        "path closeness {:?}",
        c.values
    );
    let c = closeness_centrality(&two_edges).map_err(err)?;
    ensure!(c.values.iter().all(|&v| close(v, 1.0 / 3.0, 1e-12)), "two-edge closeness {:?}", c.values);

    let b = betweenness_centrality(&path, false);
    ensure!(b.values == [0.0, 1.0, 0.0], "path betweenness {:?}", b.values);
    let b = betweenness_centrality(&star, false);
    ensure!(score_of(&star, &b.values, "c") == 6.0, "star betweenness {:?}", b.values);

    let e = eigenvector_centrality(&k4, EigenOptions::default()).map_err(err)?;
    ensure!(e.values.iter().all(|&v| close(v, 0.5, 1e-6)), "K4 eigenvector {:?}", e.values);
    let e = eigenvector_centrality(&star, EigenOptions::default()).map_err(err)?;
    ensure!(
        close(score_of(&star, &e.values, "c"), 1.0 / 2f64.sqrt(), 1e-6)
            && close(score_of(&star, &e.values, "l1"), 0.5 / 2f64.sqrt(), 1e-4),
        "star eigenvector {:?}",
        e.values
    );

    ensure!(modularity(&k4, &[0; 4]).map_err(err)? == 0.0, "whole-graph modularity");
    let cliques = [0, 0, 0, 1, 1, 1];
    ensure!(close(modularity(&two_k3, &cliques).map_err(err)?, 0.5, 1e-12), "two-K3 clique modularity");
    let singletons: Vec<usize> = (0..8).collect();
    ensure!(modularity(&barbell(), &singletons).map_err(err)? < 0.0, "singleton modularity sign");

    let p = greedy_modularity(&two_k3).map_err(err)?;
    ensure!(p.assignment == cliques && close(p.modularity.unwrap(), 0.5, 1e-12), "two-K3 greedy {p:?}");
    let p = greedy_modularity(&k4).map_err(err)?;
    ensure!(p.community_count() == 1, "K4 greedy {p:?}");
    let bb = barbell();
    let p = greedy_modularity(&bb).map_err(err)?;
    let sides: BTreeSet<Vec<String>> = (0..p.community_count())
        .map(|c| p.members(c).into_iter().map(|n| bb.label(n).to_owned()).collect())
        .collect();
    let expected: BTreeSet<Vec<String>> = [["a1", "a2", "a3", "a4"], ["b1", "b2", "b3", "b4"]]
        .iter()
        .map(|s| s.iter().map(|x| x.to_string()).collect())
        .collect();
    ensure!(sides == expected, "barbell greedy {sides:?}");
    Ok("path, star, triangle, K4, two K3, barbell".into())
}

/// Two disjoint ten-word vocabularies; each document draws from one.
fn planted_corpus(seed: u64) -> (Vec<TokenizedDoc>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: [Vec<String>; 2] = [
        (0..10).map(|i| format!("sea{i}")).collect(),
        (0..10).map(|i| format!("vote{i}")).collect(),
    ];
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for d in 0..60 {
        let label = d % 2;
        let lemmas: Vec<String> = (0..15).map(|_| vocab[label].choose(&mut rng).unwrap().clone()).collect();
        docs.push(TokenizedDoc {
            tweet_id: d.to_string(),
            lang: Language::En,
            tokens: lemmas.clone(),
            lemmas,
        });
        labels.push(label);
    }
    (docs, labels)
}

fn fixture_docs(lang: Language) -> Result<(Corpus, Vec<TokenizedDoc>), String> {
    let resources = PipelineConfig::default().load_resources().map_err(|e| e.to_string())?;
    let loaded = load_corpus(&crate_dir().join("fixtures/tweets_200.jsonl"), InputFormat::Jsonl, LoadOptions::default())
        .map_err(|e| e.to_string())?;
    let (corpus, _) = filter_language(&dedup(&loaded.corpus), lang.code()).map_err(|e| e.to_string())?;
    let docs = resources.preprocessor.process_corpus(&corpus).map_err(|e| e.to_string())?;
    Ok((corpus, docs))
}

fn lda_conservation_and_recovery() -> Outcome {
    let start = Instant::now();
    let (_, docs) = fixture_docs(Language::En)?;
    let config = LdaConfig { iterations: 50, ..LdaConfig::with_defaults(4, 42) };
    let mut sweeps = 0;
    let mut failure = None;
    fit_lda_observed(&docs, &config, |sweep, model| {
        sweeps += 1;
        // independent recount of both count tables from the assignments
        let mut tw = vec![vec![0u32; model.vocabulary.len()]; model.k()];
        let mut dt = vec![vec![0u32; model.k()]; docs.len()];
        for (d, labels) in model.assignments.iter().enumerate() {
            for (i, &z) in labels.iter().enumerate() {
                let w = model.vocabulary.binary_search(&docs[d].lemmas[i]).expect("known lemma");
                tw[z][w] += 1;
                dt[d][z] += 1;
            }
        }
        let totals: Vec<u64> = tw.iter().map(|r| r.iter().map(|&c| u64::from(c)).sum()).collect();
        if failure.is_none() && (tw != model.topic_word_counts || dt != model.doc_topic_counts || totals != model.topic_totals) {
            failure = Some(sweep);
        }
    })
    .map_err(|e| e.to_string())?;
    ensure!(failure.is_none(), "count tables disagree with assignments after sweep {failure:?}");

    let mut recovered = 0;
    let mut purities = Vec::new();
    for seed in 0..10 {
        let (docs, labels) = planted_corpus(seed);
        let model = fit_lda_observed(&docs, &LdaConfig { iterations: 200, ..LdaConfig::with_defaults(2, seed) }, |_, _| {})
            .map_err(|e| e.to_string())?;
        let mut agree = 0;
        for d in 0..docs.len() {
            if dominant_topic(&model, d).map_err(|e| e.to_string())? == labels[d] {
                agree += 1;
            }
        }
        let purity = agree.max(docs.len() - agree) as f64 / docs.len() as f64;
        purities.push(purity);
        if purity >= 0.8 {
            recovered += 1;
        }
    }
    ensure!(recovered >= 9, "planted topics recovered for {recovered}/10 seeds, purities {purities:?}");
    elapsed_within(start, Duration::from_secs(30), "LDA checks")?;
    Ok(format!("{sweeps} sweeps conserved; purity >= 0.8 for {recovered}/10 seeds"))
}

fn three_blobs(seed: u64) -> TfIdfMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let dim = 6;
    let mut rows = Vec::new();
    for axis in [0, 2, 4] {
        for _ in 0..25 {
            let point: Vec<f64> = (0..dim)
                .map(|d| (if d == axis { 1.0f64 } else { 0.1 } + noise.sample(&mut rng)).max(1e-3))
                .collect();
            rows.push(SparseVec::from_dense(&point));
        }
    }
    let vocabulary = Vocabulary {
        terms: (0..dim).map(|d| format!("w{d}")).collect(),
        doc_freq: vec![rows.len(); dim],
    };
    TfIdfMatrix::from_rows(vocabulary, rows).expect("valid rows")
}

fn clustering_recovery() -> Outcome {
    let mut hits = 0;
    let mut picks = Vec::new();
    for seed in 0..10 {
        let selection = select_k(&three_blobs(seed), 2..=6, seed).map_err(|e| e.to_string())?;
        picks.push(selection.best_k);
        if selection.best_k == 3 {
            hits += 1;
        }
        for model in &selection.models {
            for w in model.wcss_history.windows(2) {
                ensure!(w[1] <= w[0] + 1e-9, "seed {seed}, k {}: WCSS rose {:?}", model.k, model.wcss_history);
            }
        }
    }
    ensure!(hits >= 9, "planted k = 3 selected for {hits}/10 seeds: {picks:?}");
    Ok(format!("k = 3 selected for {hits}/10 seeds; Lloyd descent monotone"))
}

fn filtering_semantics() -> Outcome {
    let resources = PipelineConfig::default().load_resources().map_err(|e| e.to_string())?;
    let mut kept_total = 0;
    for lang in Language::ALL {
        let (corpus, docs) = fixture_docs(lang)?;
        let path = crate_dir().join(format!("resources/dictionary_{lang}.csv"));
        let mut reader = csv::Reader::from_path(&path).map_err(|e| e.to_string())?;
        let mut tourism = HashSet::new();
        for row in reader.records() {
            let row = row.map_err(|e| e.to_string())?;
            if &row[1] == "Tourism" {
                tourism.insert(row[0].to_owned());
            }
        }
        let expected: BTreeSet<&str> = docs
            .iter()
            .filter(|d| d.lemmas.iter().filter(|l| tourism.contains(*l)).count() >= 3)
            .map(|d| d.tweet_id.as_str())
            .collect();
        let dict = resources.dictionary(lang).map_err(|e| e.to_string())?;
        let kept = match_strings(&corpus, &docs, dict, 3).map_err(|e| e.to_string())?;
        let got: BTreeSet<&str> = kept.ids().collect();
        ensure!(got == expected, "{lang}: kept {} tweets, recount says {}", got.len(), expected.len());
        ensure!(!got.is_empty() && got.len() < corpus.len(), "{lang}: fixture should keep some and drop some");
        kept_total += got.len();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for round in 0..200 {
        let parent: Vec<TweetRecord> = (0..40).map(|i| TweetRecord::new(i.to_string(), format!("text {i}"), "en")).collect();
        let a: Vec<TweetRecord> = parent.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        let b: Vec<TweetRecord> = parent.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        let ids = |v: &[TweetRecord]| v.iter().map(|r| r.id.clone()).collect::<HashSet<_>>();
        let (sa, sb) = (ids(&a), ids(&b));
        let merged = merge_results(&Corpus::new(a), &Corpus::new(b), MergeMode::Union).map_err(|e| e.to_string())?;
        ensure!(merged.len() == sa.union(&sb).count(), "round {round}: |merge| {} != |A ∪ B|", merged.len());
        let merged_ids: HashSet<String> = merged.ids().map(str::to_owned).collect();
        ensure!(merged_ids == sa.union(&sb).cloned().collect(), "round {round}: merged ids differ from A ∪ B");
    }
    Ok(format!("{kept_total} fixture tweets kept, all recounted; 200 random merges"))
}

fn sentiment_bounds() -> Outcome {
    let resources = PipelineConfig::default().load_resources().map_err(|e| e.to_string())?;
    let lexicon = lexicon_for(&resources.lexicons, Language::En).map_err(|e| e.to_string())?;
    let mut pool: Vec<String> = lexicon.valences.keys().cloned().collect();
    pool.extend(lexicon.boosters.keys().cloned());
    pool.extend(lexicon.negators.iter().cloned());
    pool.extend(["the", "sea", "of", "bari"].map(String::from));
    pool.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..10_000 {
        let len = rng.gen_range(0..40);
        let tokens: Vec<String> = (0..len).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
        let r = score(&i.to_string(), &tokens, lexicon);
        ensure!(r.compound > -1.0 && r.compound < 1.0, "stream {i}: compound {} out of (-1, 1)", r.compound);
        ensure!(r.label == Polarity::of(r.compound), "stream {i}: label disagrees with compound");
    }
    let toy = SentimentLexicon::new(Language::En).with_valence("good", 2.0);
    let single = score("t", &["good".to_owned()], &toy).compound;
    ensure!(close(single, 0.4588, 1e-4), "single valence-2 token scored {single}");
    ensure!(Polarity::of(0.0) == Polarity::Negative, "zero must be negative");
    ensure!(Polarity::of(1e-12) == Polarity::Positive && Polarity::of(-1e-12) == Polarity::Negative, "label split");
    ensure!(score("t", &[], &toy).label == Polarity::Negative, "empty tweet label");
    Ok(format!("10000 streams bounded; single token {single:.4}"))
}

fn word_graph_algebra() -> Outcome {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<String>>();
    let abc = s(&["a", "b", "c"]);
    let g = build_word_graph(&[&abc], None, 50);
    ensure!(
        g.edge_count() == 3 && g.edges.values().all(|&w| w == 1) && g.nodes.values().all(|&f| f == 1),
        "one-tweet triangle {g:?}"
    );
    let ab = s(&["a", "b"]);
    let g = build_word_graph(&[&ab, &ab], None, 50);
    ensure!(g.weight("a", "b") == Some(2) && g.nodes["a"] == 2 && g.nodes["b"] == 2, "repeated pair {g:?}");
    let aab = s(&["a", "a", "b"]);
    let g = build_word_graph(&[&aab], None, 50);
    ensure!(g.edge_count() == 1 && g.weight("a", "a").is_none(), "repeated lemma {g:?}");

    let words: Vec<String> = (0..15).map(|i| format!("w{i}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for split in 0..50 {
        let tweets: Vec<Vec<String>> = (0..30)
            .map(|_| (0..rng.gen_range(1..7)).map(|_| words.choose(&mut rng).unwrap().clone()).collect())
            .collect();
        let refs: Vec<&[String]> = tweets.iter().map(Vec::as_slice).collect();
        let cut = rng.gen_range(0..=refs.len());
        let whole = build_word_graph(&refs, None, 50);
        let mut parts = build_word_graph(&refs[..cut], None, 50);
        parts.absorb(&build_word_graph(&refs[cut..], None, 50));
        ensure!(parts == whole, "split {split}: G(A) + G(B) != G(A ∪ B)");
    }

    let mut fixtures: Vec<(String, Graph)> = vec![
        ("path".into(), named(&[("A", "B"), ("B", "C")])),
        ("K4".into(), named(&[("A", "B"), ("A", "C"), ("A", "D"), ("B", "C"), ("B", "D"), ("C", "D")])),
        ("edgeless".into(), Graph::from_edges(["x", "y", "z"], [])),
        ("barbell".into(), barbell()),
    ];
    let golden = crate_dir().join("tests/golden/graph");
    for entry in std::fs::read_dir(&golden).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.starts_with("word_") && name.ends_with(".json") {
            let value = serde_json::from_str(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            fixtures.push((name, tweetflow::export::word_graph_from_json(&value)?.to_graph()));
        }
    }
    fixtures.sort_by(|a, b| a.0.cmp(&b.0));
    for (name, g) in &fixtures {
        let stats = graph_stats(g);
        let n = g.node_count();
        let degrees: Vec<usize> = (0..n).map(|v| g.neighbors(v).len()).collect();
        let m = degrees.iter().sum::<usize>() / 2;
        let density = if n < 2 { 0.0 } else { 2.0 * m as f64 / (n * (n - 1)) as f64 };
        let avg = if n == 0 { 0.0 } else { 2.0 * m as f64 / n as f64 };
        ensure!(
            stats.nodes == n
                && stats.edges == m
                && close(stats.density, density, 1e-12)
                && close(stats.avg_degree, avg, 1e-12)
                && stats.max_degree == degrees.iter().copied().max().unwrap_or(0),
            "{name}: {stats:?}"
        );
    }
    Ok(format!("examples exact; 50 additive splits; stats on {} graphs", fixtures.len()))
}

fn community_pipeline() -> Outcome {
    let (threshold, chosen) = choose_communities(&[10, 8, 1, 1]).map_err(|e| e.to_string())?;
    ensure!(close(threshold, 16.5f64.sqrt(), 1e-12) && close(threshold, 4.06, 0.005), "threshold {threshold}");
    ensure!(chosen == [0, 1], "chosen {chosen:?}");

    let fixtures: Vec<(&str, usize, Vec<(usize, usize)>)> = vec![
        ("path", 3, vec![(0, 1), (1, 2)]),
        ("star", 5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]),
        ("triangle", 3, vec![(0, 1), (1, 2), (0, 2)]),
        ("K4", 4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        ("two K3", 6, vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]),
        (
            "barbell",
            8,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)],
        ),
    ];
    for (name, n, edges) in &fixtures {
        let g = Graph::from_index_edges(*n, edges);
        let p = greedy_modularity(&g).map_err(|e| e.to_string())?;
        let q = modularity_by_definition(*n, edges, &p.assignment);
        let best = best_modularity(*n, edges);
        ensure!(close(q, best, 1e-12), "{name}: greedy Q {q} vs exhaustive optimum {best}");
    }

    let star = named(&[("hub", "a"), ("hub", "b"), ("hub", "c"), ("hub", "d")]);
    let members: Vec<usize> = (0..star.node_count()).collect();
    let hub = hub_dominant(&star, &members).map_err(|e| e.to_string())?;
    ensure!(hub == "hub", "star hub {hub}");
    Ok(format!("threshold {threshold:.2}, greedy optimal on {} fixtures, star hub found", fixtures.len()))
}

fn run_fixture(out: &std::path::Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let pipeline = Pipeline::new(fixture_config(out)).map_err(|e| e.to_string())?;
    pipeline.run_all().map_err(|e| e.to_string())?;
    let mut tree = read_tree(out);
    tree.remove("timings.json");
    Ok(tree)
}

fn end_to_end_determinism() -> Outcome {
    let start = Instant::now();
    let golden = read_tree(&crate_dir().join("tests/golden"));
    ensure!(!golden.is_empty(), "golden directory is empty");
    for run in 1..=2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let produced = run_fixture(dir.path())?;
        let missing: Vec<&String> = golden.keys().filter(|k| !produced.contains_key(*k)).collect();
        let extra: Vec<&String> = produced.keys().filter(|k| !golden.contains_key(*k)).collect();
        ensure!(missing.is_empty() && extra.is_empty(), "run {run}: missing {missing:?}, extra {extra:?}");
        let differing: Vec<&String> = golden.keys().filter(|k| golden[*k] != produced[*k]).collect();
        ensure!(differing.is_empty(), "run {run}: files differ from golden: {differing:?}");
    }
    elapsed_within(start, Duration::from_secs(60), "two pipeline runs")?;
    Ok(format!("{} files identical in two runs, {:.2?}", golden.len(), start.elapsed()))
}

fn decimals(field: &str) -> Option<usize> {
    let (int, frac) = field.split_once('.')?;
    let int = int.strip_prefix('-').unwrap_or(int);
    (!int.is_empty() && int.bytes().all(|b| b.is_ascii_digit()) && frac.bytes().all(|b| b.is_ascii_digit()))
        .then_some(frac.len())
}

fn report_shape() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_fixture(dir.path())?;
    let report = dir.path().join("report");
    let centrality = ["network", "polarity", "language", "rank", "word", "score"];
    let mut tables: Vec<(String, Vec<&str>)> = vec![
        ("category_words.csv".into(), vec!["language", "category", "rank", "word", "frequency"]),
        (
            "network_stats.csv".into(),
            vec!["Network", "Nodes", "Edges", "Density", "Max Degree", "Avg Degree"],
        ),
        ("centrality_betweenness.csv".into(), centrality.to_vec()),
        ("centrality_closeness.csv".into(), centrality.to_vec()),
        ("centrality_degree.csv".into(), centrality.to_vec()),
        ("centrality_eigenvector.csv".into(), centrality.to_vec()),
        (
            "communities.csv".into(),
            vec!["network", "algorithm", "community_count", "chosen_count", "threshold"],
        ),
        ("hubs.csv".into(), vec!["network", "community", "hub"]),
        ("category_distribution.csv".into(), vec!["language", "category", "count", "percent"]),
    ];
    for lang in ["en", "it"] {
        tables.push((format!("topics_{lang}.csv"), vec!["round", "topic_id", "rank", "word", "probability"]));
        tables.push((format!("clusters_{lang}.csv"), vec!["k", "silhouette", "cluster_id", "size", "top_words"]));
        tables.push((format!("wordcloud_{lang}.csv"), vec!["word", "frequency"]));
    }
    let splits: BTreeSet<&str> = ["it_positive", "it_negative", "en_positive", "en_negative"].into();
    for (name, header) in &tables {
        let path = report.join(name);
        let mut reader = csv::Reader::from_path(&path).map_err(|e| format!("{name}: {e}"))?;
        let got: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(str::to_owned).collect();
        ensure!(got == *header, "{name}: header {got:?}, expected {header:?}");
        let mut rows = 0;
        for row in reader.records() {
            let row = row.map_err(|e| format!("{name}: {e}"))?;
            ensure!(row.len() == header.len(), "{name}: ragged row {row:?}");
            rows += 1;
            if centrality.as_slice() == header.as_slice() {
                ensure!(splits.contains(&row[0]), "{name}: network {}", &row[0]);
                ensure!(row[0] == format!("{}_{}", &row[2], &row[1]), "{name}: network/polarity/language disagree");
                ensure!(row[3].parse::<usize>().is_ok_and(|r| r >= 1), "{name}: rank {}", &row[3]);
                ensure!(decimals(&row[5]) == Some(2), "{name}: score {} needs 2 decimals", &row[5]);
            }
        }
        ensure!(rows > 0, "{name}: no rows");
    }
    let raw = std::fs::read_to_string(report.join("centrality_betweenness.csv")).map_err(|e| e.to_string())?;
    ensure!(raw.ends_with("\r\n") && raw.split("\r\n").count() > 2, "CSV rows must end with CRLF");
    let contents = std::fs::read_to_string(report.join("contents.json")).map_err(|e| e.to_string())?;
    let value: serde_json::Value = serde_json::from_str(&contents).map_err(|e| e.to_string())?;
    let listed: Vec<&String> = value.as_object().ok_or("contents.json is not an object")?.keys().collect();
    ensure!(listed.windows(2).all(|w| w[0] < w[1]), "contents.json keys not sorted");
    for (name, _) in &tables {
        ensure!(value.get(name).is_some(), "contents.json does not list {name}");
    }
    Ok(format!("{} report tables conform", tables.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("centrality oracle equivalence", centrality_oracles),
        ("named-graph fixtures", named_graphs),
        ("LDA conservation and recovery", lda_conservation_and_recovery),
        ("clustering recovery", clustering_recovery),
        ("filtering semantics", filtering_semantics),
        ("sentiment bounds and formula", sentiment_bounds),
        ("word-graph algebra", word_graph_algebra),
        ("community pipeline", community_pipeline),
        ("end-to-end determinism", end_to_end_determinism),
        ("report shape", report_shape),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
