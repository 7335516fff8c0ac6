//! Stage orchestration. Every stage reads its upstream files from the
//! output directory, writes its own files atomically and records counts
//! and checksums in `manifest.json` (wall-clock timings go to
//! `timings.json`, which is not part of the reproducible output).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::{info, warn};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::categorize::{assign_category, category_report, extract_entities, EntityMentions};
use crate::clustering::{select_k_with, SelectOptions};
use crate::community::{community_report, Algorithm};
use crate::config::{derive_seed, PipelineConfig, Resources};
use crate::corpus::{dedup, filter_language, load_corpus, to_jsonl, Corpus, InputFormat, Language, LoadOptions};
use crate::domainfilter::{
    dictionary_template, explore, match_strings, merge_results, rank_counts, tourism_hits,
};
use crate::error::{Error, Result};
use crate::export::{
    csv_string, export_geojson, place_graph_graphml, place_graph_json, pretty_json, word_graph_from_json,
    word_graph_graphml, word_graph_json, write_atomic,
};
use crate::netmetrics::{
    betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality, report_score, top_k,
    CentralityScores, EigenOptions, Measure,
};
use crate::preprocess::{build_tfidf, TokenizedDoc};
use crate::sentiment::{aggregate, lexicon_for, score_with, Polarity, SentimentResult};
use crate::topics::{
    iterative_refine, DictionarySelector, InteractiveSelector, LdaConfig, RefineOptions, Refinement, TopicSelector,
};
use crate::wordgraph::{build_place_graph, build_word_graph, graph_stats, Split, WordGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Explore,
    Filter,
    Topics,
    Cluster,
    Categorize,
    Sentiment,
    Graph,
    Metrics,
    Communities,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::Ingest,
        Stage::Explore,
        Stage::Filter,
        Stage::Topics,
        Stage::Cluster,
        Stage::Categorize,
        Stage::Sentiment,
        Stage::Graph,
        Stage::Metrics,
        Stage::Communities,
        Stage::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Explore => "explore",
            Stage::Filter => "filter",
            Stage::Topics => "topics",
            Stage::Cluster => "cluster",
            Stage::Categorize => "categorize",
            Stage::Sentiment => "sentiment",
            Stage::Graph => "graph",
            Stage::Metrics => "metrics",
            Stage::Communities => "communities",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }
}

/// Files produced by one stage, keyed by path relative to the output root.
#[derive(Debug, Default)]
struct StageOutput {
    files: BTreeMap<String, String>,
    inputs: BTreeMap<String, usize>,
}

impl StageOutput {
    fn file(&mut self, path: impl Into<String>, contents: String) {
        self.files.insert(path.into(), contents);
    }

    fn count(&mut self, name: impl Into<String>, n: usize) {
        self.inputs.insert(name.into(), n);
    }
}

/// What a finished stage reports back.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSummary {
    pub stage: Stage,
    pub files: Vec<String>,
}

/// Rows of a CSV file, or lines of a JSONL file; `None` for documents.
pub fn record_count(path: &str, contents: &str) -> Result<Option<usize>> {
    if path.ends_with(".csv") {
        let mut reader = csv::Reader::from_reader(contents.as_bytes());
        let mut n = 0;
        for row in reader.records() {
            row?;
            n += 1;
        }
        Ok(Some(n))
    } else if path.ends_with(".jsonl") {
        Ok(Some(contents.lines().filter(|l| !l.trim().is_empty()).count()))
    } else {
        Ok(None)
    }
}

fn sha256_hex(contents: &[u8]) -> String {
    hex::encode(Sha256::digest(contents))
}

fn stage_err(stage: Stage, message: impl Into<String>) -> Error {
    Error::Stage {
        stage: stage.to_string(),
        message: message.into(),
    }
}

fn docs_jsonl(docs: &[TokenizedDoc]) -> Result<String> {
    let mut out = String::new();
    for d in docs {
        out.push_str(&serde_json::to_string(d).map_err(|e| stage_err(Stage::Ingest, e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

pub struct Pipeline {
    config: PipelineConfig,
    resources: Resources,
    out: PathBuf,
    interactive: bool,
}

impl Pipeline {
    /// Validates the configuration and loads every resource up front.
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let out = config.output_path()?;
        let resources = config.load_resources()?;
        Ok(Self {
            config,
            resources,
            out,
            interactive: false,
        })
    }

    /// Topic selection reads ids from stdin instead of using the dictionary.
    pub fn interactive(mut self, on: bool) -> Self {
        self.interactive = on;
        self
    }

    pub fn output_dir(&self) -> &Path {
        &self.out
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn run_all(&self) -> Result<Vec<StageSummary>> {
        Stage::ALL.into_iter().map(|s| self.run(s)).collect()
    }

    pub fn run(&self, stage: Stage) -> Result<StageSummary> {
        let started = Instant::now();
        info!("stage {stage}: start");
        let output = match stage {
            Stage::Ingest => self.ingest(),
            Stage::Explore => self.explore(),
            Stage::Filter => self.filter(),
            Stage::Topics => self.topics(),
            Stage::Cluster => self.cluster(),
            Stage::Categorize => self.categorize(),
            Stage::Sentiment => self.sentiment(),
            Stage::Graph => self.graph(),
            Stage::Metrics => self.metrics(),
            Stage::Communities => self.communities(),
            Stage::Report => self.report(),
        }?;
        let dir = self.out.join(stage.as_str());
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        let mut outputs = serde_json::Map::new();
        for (rel, contents) in &output.files {
            write_atomic(&self.out.join(rel), contents)?;
            outputs.insert(
                rel.clone(),
                json!({"records": record_count(rel, contents)?, "sha256": sha256_hex(contents.as_bytes())}),
            );
        }
        self.update_manifest(stage, json!({"inputs": output.inputs, "outputs": outputs}))?;
        self.update_timings(stage, started.elapsed().as_secs_f64())?;
        info!("stage {stage}: wrote {} files in {:.2?}", output.files.len(), started.elapsed());
        Ok(StageSummary {
            stage,
            files: output.files.into_keys().collect(),
        })
    }

    fn read_json_object(&self, name: &str) -> Result<serde_json::Map<String, Value>> {
        let path = self.out.join(name);
        if !path.exists() {
            return Ok(serde_json::Map::new());
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(map),
            _ => Err(Error::resource(&path, "expected a JSON object")),
        }
    }

    fn update_manifest(&self, stage: Stage, entry: Value) -> Result<()> {
        let mut manifest = self.read_json_object("manifest.json")?;
        manifest.insert("config".into(), serde_json::to_value(&self.config).map_err(|e| stage_err(stage, e.to_string()))?);
        let stages = manifest.entry("stages").or_insert_with(|| json!({}));
        stages[stage.as_str()] = entry;
        write_atomic(&self.out.join("manifest.json"), pretty_json(&manifest)?)
    }

    fn update_timings(&self, stage: Stage, seconds: f64) -> Result<()> {
        let mut timings = self.read_json_object("timings.json")?;
        timings.insert(stage.as_str().into(), json!(seconds));
        write_atomic(&self.out.join("timings.json"), pretty_json(&timings)?)
    }

    fn upstream(&self, stage: Stage, rel: &str) -> Result<PathBuf> {
        let path = self.out.join(rel);
        if path.is_file() {
            Ok(path)
        } else {
            Err(Error::MissingUpstream {
                stage: stage.to_string(),
                path,
            })
        }
    }

    fn read_upstream(&self, stage: Stage, rel: &str) -> Result<String> {
        let path = self.upstream(stage, rel)?;
        fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
    }

    fn read_corpus(&self, stage: Stage, rel: &str) -> Result<Corpus> {
        let path = self.upstream(stage, rel)?;
        Ok(load_corpus(&path, InputFormat::Jsonl, LoadOptions { strict: true })?.corpus)
    }

    fn read_csv(&self, stage: Stage, rel: &str) -> Result<Vec<csv::StringRecord>> {
        let text = self.read_upstream(stage, rel)?;
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        Ok(reader.records().collect::<std::result::Result<_, _>>()?)
    }

    fn docs(&self, corpus: &Corpus) -> Result<Vec<TokenizedDoc>> {
        self.resources.preprocessor.process_corpus(corpus)
    }

    fn seed_for(&self, key: &str) -> Result<u64> {
        Ok(derive_seed(self.config.seed()?, key))
    }

    fn languages(&self) -> &[Language] {
        &self.config.languages
    }

    /// Dictionary tourism terms plus every category keyword.
    fn domain_terms(&self, lang: Language) -> Result<std::collections::HashSet<String>> {
        let mut terms = self.resources.dictionary(lang)?.tourism_terms();
        for rule in &self.resources.categories.categories {
            terms.extend(rule.keywords.iter().cloned());
        }
        Ok(terms)
    }

    fn ingest(&self) -> Result<StageOutput> {
        let input = self.config.input_path()?;
        let format = InputFormat::from_path(&input)
            .ok_or_else(|| Error::Config(format!("{}: unknown input format (use .jsonl or .csv)", input.display())))?;
        let loaded = load_corpus(&input, format, LoadOptions { strict: self.config.strict })?;
        let deduped = dedup(&loaded.corpus);
        let mut out = StageOutput::default();
        out.count("loaded", loaded.corpus.len());
        out.count("skipped_rows", loaded.skipped.len());
        out.count("after_dedup", deduped.len());
        let mut languages = BTreeMap::new();
        for &lang in self.languages() {
            let (corpus, counts) = filter_language(&deduped, lang.code())?;
            let docs = self.docs(&corpus)?;
            languages.insert(lang.code(), json!({"kept": counts.kept, "dropped": counts.dropped}));
            out.file(format!("ingest/corpus_{lang}.jsonl"), to_jsonl(&corpus.records));
            out.file(format!("ingest/docs_{lang}.jsonl"), docs_jsonl(&docs)?);
        }
        let summary = json!({
            "loaded": loaded.corpus.len(),
            "skipped": loaded.skipped,
            "after_dedup": deduped.len(),
            "languages": languages,
        });
        out.file("ingest/summary.json", pretty_json(&summary)?);
        Ok(out)
    }

    fn explore(&self) -> Result<StageOutput> {
        let mut out = StageOutput::default();
        for &lang in self.languages() {
            let corpus = self.read_corpus(Stage::Explore, &format!("ingest/corpus_{lang}.jsonl"))?;
            let docs = self.docs(&corpus)?;
            out.count(format!("tweets_{lang}"), corpus.len());
            let report = explore(&docs, &corpus.records, self.config.explore.size);
            out.file(format!("explore/words_{lang}.csv"), dictionary_template(&report.top_words)?);
            out.file(
                format!("explore/hashtags_{lang}.csv"),
                csv_string(
                    &["hashtag", "frequency"],
                    report.top_hashtags.iter().map(|(h, n)| [h.clone(), n.to_string()]),
                )?,
            );
        }
        Ok(out)
    }

    fn filter(&self) -> Result<StageOutput> {
        let mut out = StageOutput::default();
        for &lang in self.languages() {
            let corpus = self.read_corpus(Stage::Filter, &format!("ingest/corpus_{lang}.jsonl"))?;
            let docs = self.docs(&corpus)?;
            let dict = self.resources.dictionary(lang)?;
            let matched = match_strings(&corpus, &docs, dict, self.config.filter.min_hits)?;
            out.count(format!("tweets_{lang}"), corpus.len());
            out.file(
                format!("filter/hits_{lang}.csv"),
                csv_string(
                    &["tweet_id", "hits"],
                    docs.iter().map(|d| [d.tweet_id.clone(), tourism_hits(d, dict).to_string()]),
                )?,
            );
            out.file(format!("filter/matched_{lang}.jsonl"), to_jsonl(&matched.records));
        }
        Ok(out)
    }

    fn lda_config(&self, seed: u64) -> LdaConfig {
        let l = &self.config.lda;
        LdaConfig {
            k: l.k,
            alpha: l.alpha.unwrap_or(50.0 / l.k as f64),
            beta: l.beta,
            iterations: l.iterations,
            seed,
        }
    }

    /// Iterative LDA refinement; a round where no topic qualifies leaves
    /// nothing rather than failing the stage.
    fn refine(&self, corpus: &Corpus, docs: &[TokenizedDoc], lang: Language, key: &str) -> Result<Refinement> {
        let l = &self.config.lda;
        let options = RefineOptions {
            max_rounds: l.max_rounds,
            summary_words: l.summary_words,
            min_change: l.min_change,
        };
        let config = self.lda_config(self.seed_for(key)?);
        let mut selector: Box<dyn TopicSelector> = if self.interactive {
            eprintln!("[{lang}] {key}");
            Box::new(InteractiveSelector::new(io::stdin().lock(), io::stderr()))
        } else {
            Box::new(DictionarySelector {
                terms: self.domain_terms(lang)?,
                top_n: l.summary_words,
                min_fraction: l.min_fraction,
            })
        };
        match iterative_refine(corpus, docs, &config, selector.as_mut(), options) {
            Err(Error::NoTopicSelected { round }) => {
                warn!("{key}: no topic selected in round {round}; nothing survives");
                Ok(Refinement {
                    corpus: corpus.retain_ids(&Default::default()),
                    rounds: Vec::new(),
                    stop_reason: format!("round {round}: no topic selected"),
                })
            }
            other => other,
        }
    }

    fn topics(&self) -> Result<StageOutput> {
        let mut out = StageOutput::default();
        for &lang in self.languages() {
            let corpus = self.read_corpus(Stage::Topics, &format!("ingest/corpus_{lang}.jsonl"))?;
            let matched = self.read_corpus(Stage::Topics, &format!("filter/matched_{lang}.jsonl"))?;
            let docs = self.docs(&corpus)?;
            out.count(format!("tweets_{lang}"), corpus.len());
            out.count(format!("matched_{lang}"), matched.len());
            let refinement = self.refine(&corpus, &docs, lang, &format!("topics/{lang}"))?;
            let mut rows = Vec::new();
            for round in &refinement.rounds {
                for summary in &round.summaries {
                    for (rank, (word, p)) in summary.top_words.iter().enumerate() {
                        rows.push([
                            round.round.to_string(),
                            summary.topic_id.to_string(),
                            (rank + 1).to_string(),
                            word.clone(),
                            f6(*p),
                        ]);
                    }
                }
            }
            out.file(
                format!("topics/topics_{lang}.csv"),
                csv_string(&["round", "topic_id", "rank", "word", "probability"], rows)?,
            );
            let rounds: Vec<Value> = refinement
                .rounds
                .iter()
                .map(|r| {
                    json!({
                        "round": r.round,
                        "input_docs": r.input_docs,
                        "selected": r.selected,
                        "topic_sizes": r.topic_sizes,
                        "surviving_docs": r.surviving_docs,
                    })
                })
                .collect();
            out.file(
                format!("topics/rounds_{lang}.json"),
                pretty_json(&json!({"rounds": rounds, "stop_reason": refinement.stop_reason}))?,
            );
            out.file(format!("topics/refined_{lang}.jsonl"), to_jsonl(&refinement.corpus.records));
            let first = merge_results(&matched, &refinement.corpus, self.config.filter.merge)?;
            out.file(format!("topics/first_approach_{lang}.jsonl"), to_jsonl(&first.records));
        }
        Ok(out)
    }

    fn cluster(&self) -> Result<StageOutput> {
        let c = &self.config.clustering;
        let mut out = StageOutput::default();
        for &lang in self.languages() {
            let corpus = self.read_corpus(Stage::Cluster, &format!("ingest/corpus_{lang}.jsonl"))?;
            let first = self.read_corpus(Stage::Cluster, &format!("topics/first_approach_{lang}.jsonl"))?;
            let docs = self.docs(&corpus)?;
            out.count(format!("tweets_{lang}"), corpus.len());
            out.count(format!("first_approach_{lang}"), first.len());
            let matrix = build_tfidf(&docs)?;
            let usable = matrix.rows.iter().filter(|r| r.nnz() > 0).count();
            let k_max = c.k_max.min(usable);
            if k_max < c.k_min {
                return Err(stage_err(
                    Stage::Cluster,
                    format!("{lang}: {usable} non-empty documents cannot form {} clusters", c.k_min),
                ));
            }
            let options = SelectOptions {
                max_iters: c.max_iters,
                silhouette_sample: c.silhouette_sample,
            };
            let selection = select_k_with(&matrix, c.k_min..=k_max, self.seed_for(&format!("cluster/{lang}"))?, options)?;
            let selector = DictionarySelector {
                terms: self.domain_terms(lang)?,
                top_n: c.top_words,
                min_fraction: c.min_fraction,
            };
            let mut rows = Vec::new();
            let mut tourism_clusters = BTreeSet::new();
            for (model, &(k, score)) in selection.models.iter().zip(&selection.scores) {
                for (cluster, size) in model.sizes().into_iter().enumerate() {
                    let words = rank_counts(
                        docs.iter()
                            .zip(&model.assignments)
                            .filter(|(_, &a)| a == cluster)
                            .flat_map(|(d, _)| d.lemmas.iter().map(String::as_str)),
                        c.top_words,
                    );
                    if k == selection.best_k && selector.is_domain(words.iter().map(|(w, _)| w.as_str())) {
                        tourism_clusters.insert(cluster);
                    }
                    let joined: Vec<&str> = words.iter().map(|(w, _)| w.as_str()).collect();
                    rows.push([k.to_string(), f6(score), cluster.to_string(), size.to_string(), joined.join("|")]);
                }
            }
            out.file(
                format!("cluster/clusters_{lang}.csv"),
                csv_string(&["k", "silhouette", "cluster_id", "size", "top_words"], rows)?,
            );
            let keep: std::collections::HashSet<&str> = docs
                .iter()
                .zip(&selection.model.assignments)
                .filter(|(_, a)| tourism_clusters.contains(a))
                .map(|(d, _)| d.tweet_id.as_str())
                .collect();
            let candidates = corpus.retain_ids(&keep);
            let refinement = self.refine(&candidates, &docs, lang, &format!("cluster-refine/{lang}"))?;
            out.file(
                format!("cluster/selection_{lang}.json"),
                pretty_json(&json!({
                    "best_k": selection.best_k,
                    "scores": selection.scores,
                    "tourism_clusters": tourism_clusters,
                    "candidates": candidates.len(),
                    "refine_stop_reason": refinement.stop_reason,
                }))?,
            );
            out.file(format!("cluster/second_approach_{lang}.jsonl"), to_jsonl(&refinement.corpus.records));
            let tourism = merge_results(&first, &refinement.corpus, self.config.filter.merge)?;
            out.file(format!("cluster/tourism_{lang}.jsonl"), to_jsonl(&tourism.records));
        }
        Ok(out)
    }

    fn tourism(&self, stage: Stage, lang: Language) -> Result<(Corpus, Vec<TokenizedDoc>)> {
        let corpus = self.read_corpus(stage, &format!("cluster/tourism_{lang}.jsonl"))?;
        let docs = self.docs(&corpus)?;
        Ok((corpus, docs))
    }

    fn categorize(&self) -> Result<StageOutput> {
        let rules = &self.resources.categories;
        let order = rules.names();
        let mut out = StageOutput::default();
        let (mut assigned, mut entities, mut dist, mut words, mut attractions) =
            (Vec::new(), String::new(), Vec::new(), Vec::new(), Vec::new());
        for &lang in self.languages() {
            let (corpus, docs) = self.tourism(Stage::Categorize, lang)?;
            out.count(format!("tourism_{lang}"), corpus.len());
            if corpus.is_empty() {
                warn!("categorize: no {lang} tourism tweets");
                continue;
            }
            let adjectives = self
                .resources
                .adjectives
                .get(&lang)
                .ok_or_else(|| Error::MissingLexicon(lang.code().into()))?;
            let mut entries = Vec::new();
            for (record, doc) in corpus.records.iter().zip(&docs) {
                let category = assign_category(doc, rules);
                let mentions = extract_entities(doc, &record.text, &record.hashtags, &self.resources.gazetteer, adjectives);
                assigned.push([record.id.clone(), lang.code().to_owned(), category.to_owned()]);
                entities.push_str(&serde_json::to_string(&mentions).map_err(|e| stage_err(Stage::Categorize, e.to_string()))?);
                entities.push('\n');
                entries.push((category, doc, mentions));
            }
            let refs: Vec<(&str, &TokenizedDoc, &EntityMentions)> = entries.iter().map(|(c, d, m)| (*c, *d, m)).collect();
            let report = category_report(&order, &refs)?;
            for share in &report.distribution {
                dist.push([lang.code().to_owned(), share.category.clone(), share.count.to_string(), format!("{:.2}", share.percent)]);
            }
            for category in &order {
                for (rank, (w, n)) in report.top_words.get(*category).into_iter().flatten().enumerate() {
                    words.push([lang.code().to_owned(), category.to_string(), (rank + 1).to_string(), w.clone(), n.to_string()]);
                }
                for (rank, (a, n)) in report.top_attractions.get(*category).into_iter().flatten().enumerate() {
                    attractions.push([lang.code().to_owned(), category.to_string(), (rank + 1).to_string(), a.clone(), n.to_string()]);
                }
            }
        }
        out.file("categorize/categories.csv", csv_string(&["tweet_id", "language", "category"], assigned)?);
        out.file("categorize/entities.jsonl", entities);
        out.file("categorize/distribution.csv", csv_string(&["language", "category", "count", "percent"], dist)?);
        out.file(
            "categorize/top_words.csv",
            csv_string(&["language", "category", "rank", "word", "frequency"], words)?,
        );
        out.file(
            "categorize/top_attractions.csv",
            csv_string(&["language", "category", "rank", "attraction", "count"], attractions)?,
        );
        Ok(out)
    }

    fn read_entities(&self, stage: Stage) -> Result<Vec<EntityMentions>> {
        let path = self.upstream(stage, "categorize/entities.jsonl")?;
        let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut all = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            all.push(serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
                path: path.clone(),
                line: idx + 1,
                message: e.to_string(),
            })?);
        }
        Ok(all)
    }

    fn sentiment(&self) -> Result<StageOutput> {
        let params = &self.config.sentiment;
        let categories: HashMap<String, String> = self
            .read_csv(Stage::Sentiment, "categorize/categories.csv")?
            .iter()
            .map(|r| (r[0].to_owned(), r[2].to_owned()))
            .collect();
        let entities = self.read_entities(Stage::Sentiment)?;
        let mut out = StageOutput::default();
        let mut scores: BTreeMap<String, SentimentResult> = BTreeMap::new();
        let (mut score_rows, mut by_category) = (Vec::new(), Vec::new());
        for &lang in self.languages() {
            let corpus = self.read_corpus(Stage::Sentiment, &format!("cluster/tourism_{lang}.jsonl"))?;
            out.count(format!("tourism_{lang}"), corpus.len());
            let lexicon = lexicon_for(&self.resources.lexicons, lang)?;
            let mut grouped = Vec::new();
            for record in &corpus.records {
                let tokens = self.resources.preprocessor.sentiment_tokens(record)?;
                let result = score_with(&record.id, &tokens, lexicon, params);
                let category = categories
                    .get(&record.id)
                    .ok_or_else(|| stage_err(Stage::Sentiment, format!("tweet {} has no category", record.id)))?;
                score_rows.push([
                    record.id.clone(),
                    lang.code().to_owned(),
                    category.clone(),
                    f4(result.compound),
                    result.label.as_str().to_owned(),
                ]);
                grouped.push((category.clone(), result.clone()));
                scores.insert(record.id.clone(), result);
            }
            if grouped.is_empty() {
                continue;
            }
            for g in aggregate(grouped.iter().map(|(c, r)| (c.clone(), r)))? {
                by_category.push([
                    lang.code().to_owned(),
                    g.group,
                    g.count.to_string(),
                    f4(g.mean_compound),
                    format!("{:.2}", g.pct_positive),
                    format!("{:.2}", g.pct_negative),
                ]);
            }
        }
        let mut by_place = Vec::new();
        let mut place_entries = Vec::new();
        let mut adjective_counts: BTreeMap<(String, String, &'static str), usize> = BTreeMap::new();
        for m in &entities {
            let Some(result) = scores.get(&m.tweet_id) else { continue };
            for place in m.places() {
                place_entries.push((place.to_owned(), result));
                for (adj, polarity) in &m.adjectives {
                    *adjective_counts.entry((place.to_owned(), adj.clone(), polarity.as_str())).or_default() += 1;
                }
            }
        }
        if !place_entries.is_empty() {
            for g in aggregate(place_entries)? {
                by_place.push([
                    g.group,
                    g.count.to_string(),
                    f4(g.mean_compound),
                    format!("{:.2}", g.pct_positive),
                    format!("{:.2}", g.pct_negative),
                ]);
            }
        }
        let cols = ["count", "mean_compound", "pct_positive", "pct_negative"];
        out.file(
            "sentiment/scores.csv",
            csv_string(&["tweet_id", "language", "category", "compound", "label"], score_rows)?,
        );
        out.file(
            "sentiment/by_category.csv",
            csv_string(&[&["language", "category"][..], &cols].concat(), by_category)?,
        );
        out.file("sentiment/by_place.csv", csv_string(&[&["place"][..], &cols].concat(), by_place)?);
        out.file(
            "sentiment/place_adjectives.csv",
            csv_string(
                &["place", "adjective", "polarity", "count"],
                adjective_counts
                    .into_iter()
                    .map(|((p, a, pol), n)| [p, a, pol.to_owned(), n.to_string()]),
            )?,
        );
        Ok(out)
    }

    fn graph(&self) -> Result<StageOutput> {
        let labels: HashMap<String, (String, Polarity)> = self
            .read_csv(Stage::Graph, "sentiment/scores.csv")?
            .iter()
            .map(|r| {
                let polarity = if &r[4] == "positive" { Polarity::Positive } else { Polarity::Negative };
                (r[0].to_owned(), (r[1].to_owned(), polarity))
            })
            .collect();
        let mut out = StageOutput::default();
        let mut docs_by_lang = HashMap::new();
        for &lang in self.languages() {
            docs_by_lang.insert(lang, self.tourism(Stage::Graph, lang)?.1);
        }
        let mut stats_rows = Vec::new();
        for split in Split::all() {
            let Some(docs) = docs_by_lang.get(&split.lang) else { continue };
            let tweets: Vec<&[String]> = docs
                .iter()
                .filter(|d| labels.get(&d.tweet_id).is_some_and(|(_, p)| *p == split.polarity))
                .map(|d| d.lemmas.as_slice())
                .collect();
            if tweets.is_empty() {
                warn!("graph: split {split} has no tweets; writing an empty graph");
            }
            let wg = build_word_graph(&tweets, Some(split), self.config.graph.clique_cap);
            out.count(format!("tweets_{split}"), tweets.len());
            let s = graph_stats(&wg.to_graph());
            stats_rows.push([
                split.to_string(),
                s.nodes.to_string(),
                s.edges.to_string(),
                f4(s.density),
                s.max_degree.to_string(),
                format!("{:.2}", s.avg_degree),
            ]);
            out.file(format!("graph/word_{split}.graphml"), word_graph_graphml(&wg, &BTreeMap::new()));
            out.file(format!("graph/word_{split}.json"), pretty_json(&word_graph_json(&wg))?);
        }
        out.file(
            "graph/stats.csv",
            csv_string(&["Network", "Nodes", "Edges", "Density", "Max Degree", "Avg Degree"], stats_rows)?,
        );
        let entities = self.read_entities(Stage::Graph)?;
        let places = build_place_graph(&entities, &self.resources.gazetteer);
        let place_sentiment: BTreeMap<String, f64> = self
            .read_csv(Stage::Graph, "sentiment/by_place.csv")?
            .iter()
            .filter_map(|r| Some((r[0].to_owned(), r[2].parse().ok()?)))
            .collect();
        let (geojson, skipped) = export_geojson(&places, &self.resources.gazetteer, &place_sentiment);
        out.count("places_without_coordinates", skipped.len());
        out.file("graph/places.graphml", place_graph_graphml(&places));
        out.file("graph/places.json", pretty_json(&place_graph_json(&places))?);
        out.file("graph/places.geojson", pretty_json(&geojson)?);
        Ok(out)
    }

    fn word_graphs(&self, stage: Stage) -> Result<Vec<(Split, WordGraph)>> {
        let mut graphs = Vec::new();
        for split in Split::all() {
            if !self.languages().contains(&split.lang) {
                continue;
            }
            let rel = format!("graph/word_{split}.json");
            let text = self.read_upstream(stage, &rel)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| Error::resource(self.out.join(&rel), e.to_string()))?;
            graphs.push((split, word_graph_from_json(&value).map_err(|e| Error::resource(self.out.join(&rel), e.to_string()))?));
        }
        Ok(graphs)
    }

    fn metrics(&self) -> Result<StageOutput> {
        let m = &self.config.metrics;
        let mut out = StageOutput::default();
        let mut ranked: BTreeMap<Measure, Vec<[String; 6]>> = Measure::ALL.iter().map(|&x| (x, Vec::new())).collect();
        for (split, wg) in self.word_graphs(Stage::Metrics)? {
            let g = wg.to_graph();
            out.count(format!("nodes_{split}"), g.node_count());
            if g.node_count() < 2 || g.edge_count() == 0 {
                warn!("metrics: split {split} has too few nodes or no edges; skipped");
                continue;
            }
            let all: Vec<CentralityScores> = vec![
                betweenness_centrality(&g, m.normalized_betweenness),
                closeness_centrality(&g)?,
                degree_centrality(&g)?,
                eigenvector_centrality(&g, EigenOptions::default())?,
            ];
            for scores in &all {
                for (rank, (word, score)) in top_k(scores, m.top_k).into_iter().enumerate() {
                    ranked.get_mut(&scores.measure).expect("all measures").push([
                        split.to_string(),
                        split.polarity.as_str().to_owned(),
                        split.lang.code().to_owned(),
                        (rank + 1).to_string(),
                        word,
                        report_score(score),
                    ]);
                }
            }
            let rows = (0..g.node_count()).map(|i| {
                let mut row = vec![g.label(i).to_owned()];
                row.extend(all.iter().map(|s| f6(s.values[i])));
                row
            });
            out.file(
                format!("metrics/scores_{split}.csv"),
                csv_string(&["word", "betweenness", "closeness", "degree", "eigenvector"], rows)?,
            );
        }
        for (measure, rows) in ranked {
            out.file(
                format!("metrics/{measure}.csv"),
                csv_string(&["network", "polarity", "language", "rank", "word", "score"], rows)?,
            );
        }
        Ok(out)
    }

    fn communities(&self) -> Result<StageOutput> {
        let mut out = StageOutput::default();
        let (mut summary, mut hubs) = (Vec::new(), Vec::new());
        let mut membership: BTreeMap<String, BTreeMap<&'static str, Value>> = BTreeMap::new();
        for (split, wg) in self.word_graphs(Stage::Communities)? {
            let g = wg.to_graph();
            out.count(format!("nodes_{split}"), g.node_count());
            if g.node_count() == 0 {
                warn!("communities: split {split} is empty; skipped");
                continue;
            }
            for algorithm in [Algorithm::LabelPropagation, Algorithm::GreedyModularity] {
                let report = community_report(&g, algorithm, self.seed_for(&format!("communities/{split}"))?)?;
                summary.push([
                    split.to_string(),
                    algorithm.to_string(),
                    report.community_count.to_string(),
                    report.chosen.len().to_string(),
                    f4(report.threshold),
                ]);
                if algorithm == self.config.communities.hub_algorithm {
                    for (c, hub) in &report.hubs {
                        hubs.push([split.to_string(), c.to_string(), hub.clone()]);
                    }
                }
                membership.entry(split.to_string()).or_default().insert(
                    algorithm.as_str(),
                    json!({
                        "modularity": report.modularity,
                        "chosen": report.chosen,
                        "communities": report.membership,
                    }),
                );
            }
        }
        out.file(
            "communities/communities.csv",
            csv_string(&["network", "algorithm", "community_count", "chosen_count", "threshold"], summary)?,
        );
        out.file("communities/hubs.csv", csv_string(&["network", "community", "hub"], hubs)?);
        out.file("communities/membership.json", pretty_json(&membership)?);
        Ok(out)
    }

    fn report(&self) -> Result<StageOutput> {
        let mut out = StageOutput::default();
        let mut contents = BTreeMap::new();
        let mut copy = |out: &mut StageOutput, from: String, to: String, what: &str| -> Result<()> {
            let text = self.read_upstream(Stage::Report, &from)?;
            contents.insert(to.clone(), what.to_owned());
            out.file(format!("report/{to}"), text);
            Ok(())
        };
        for &lang in self.languages() {
            copy(&mut out, format!("topics/topics_{lang}.csv"), format!("topics_{lang}.csv"), "LDA topic words per refinement round")?;
            copy(&mut out, format!("cluster/clusters_{lang}.csv"), format!("clusters_{lang}.csv"), "k-means clusters with silhouette and top words")?;
        }
        copy(&mut out, "categorize/distribution.csv".into(), "category_distribution.csv".into(), "category shares (bar plot data)")?;
        copy(&mut out, "categorize/top_words.csv".into(), "category_words.csv".into(), "most frequent words per category")?;
        copy(&mut out, "categorize/top_attractions.csv".into(), "top_attractions.csv".into(), "most mentioned attractions per category")?;
        copy(&mut out, "sentiment/by_category.csv".into(), "sentiment_by_category.csv".into(), "sentiment per category")?;
        copy(&mut out, "sentiment/by_place.csv".into(), "sentiment_by_place.csv".into(), "sentiment per place")?;
        copy(&mut out, "sentiment/place_adjectives.csv".into(), "place_adjectives.csv".into(), "adjectives attached to places")?;
        copy(&mut out, "graph/stats.csv".into(), "network_stats.csv".into(), "macroscopic statistics of the word networks")?;
        for measure in [Measure::Betweenness, Measure::Closeness, Measure::Degree, Measure::Eigenvector] {
            copy(&mut out, format!("metrics/{measure}.csv"), format!("centrality_{measure}.csv"), "top words by centrality")?;
        }
        copy(&mut out, "communities/communities.csv".into(), "communities.csv".into(), "community counts and chosen communities")?;
        copy(&mut out, "communities/hubs.csv".into(), "hubs.csv".into(), "hub-dominant node of each chosen community")?;
        copy(&mut out, "graph/places.geojson".into(), "places.geojson".into(), "city and attraction map layer")?;
        for &lang in self.languages() {
            let (_, docs) = self.tourism(Stage::Report, lang)?;
            let freq = rank_counts(docs.iter().flat_map(|d| d.lemmas.iter().map(String::as_str)), usize::MAX);
            let name = format!("wordcloud_{lang}.csv");
            out.file(
                format!("report/{name}"),
                csv_string(&["word", "frequency"], freq.into_iter().map(|(w, n)| [w, n.to_string()]))?,
            );
            contents.insert(name, "word frequencies of the tourism tweets".to_owned());
        }
        out.file("report/contents.json", pretty_json(&contents)?);
        Ok(out)
    }
}
