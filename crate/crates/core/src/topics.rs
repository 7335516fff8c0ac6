//! Latent Dirichlet Allocation fitted by collapsed Gibbs sampling, plus the
//! round-by-round refinement loop that narrows a corpus to its
//! domain-relevant topics.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::preprocess::{TokenizedDoc, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// alpha = 50/k, beta = 0.01, 1000 sweeps.
    pub fn with_defaults(k: usize, seed: u64) -> Self {
        Self {
            k,
            alpha: 50.0 / k as f64,
            beta: 0.01,
            iterations: 1000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("LDA needs k >= 2, got {}", self.k)));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.beta.is_nan() || self.beta <= 0.0 {
            return Err(Error::InvalidArgument("LDA priors must be strictly positive".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("LDA needs at least one sweep".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub vocabulary: Vec<String>,
    /// k × V
    pub topic_word_counts: Vec<Vec<u32>>,
    /// D × k
    pub doc_topic_counts: Vec<Vec<u32>>,
    pub topic_totals: Vec<u64>,
    /// Per document, per token topic label.
    pub assignments: Vec<Vec<usize>>,
    pub config: LdaConfig,
}

impl LdaModel {
    pub fn k(&self) -> usize {
        self.config.k
    }

    pub fn n_docs(&self) -> usize {
        self.doc_topic_counts.len()
    }

    /// Checks both count-conservation invariants against the assignments.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (z, row) in self.topic_word_counts.iter().enumerate() {
            let sum: u64 = row.iter().map(|&c| c as u64).sum();
            if sum != self.topic_totals[z] {
                return Err(format!("topic {z}: word counts sum {sum} != total {}", self.topic_totals[z]));
            }
        }
        for (d, (counts, labels)) in self.doc_topic_counts.iter().zip(&self.assignments).enumerate() {
            let sum: usize = counts.iter().map(|&c| c as usize).sum();
            if sum != labels.len() {
                return Err(format!("doc {d}: topic counts sum {sum} != {} tokens", labels.len()));
            }
            let mut recount = vec![0u32; self.k()];
            for &z in labels {
                recount[z] += 1;
            }
            if &recount != counts {
                return Err(format!("doc {d}: counts disagree with assignments"));
            }
        }
        Ok(())
    }
}

/// Fits LDA on the documents' lemma streams.
pub fn fit_lda(docs: &[TokenizedDoc], config: &LdaConfig) -> Result<LdaModel> {
    fit_lda_observed(docs, config, |_, _| {})
}

/// Like [`fit_lda`], calling `observer(sweep, model)` after initialization
/// (sweep 0) and after every full sweep.
pub fn fit_lda_observed(
    docs: &[TokenizedDoc],
    config: &LdaConfig,
    mut observer: impl FnMut(usize, &LdaModel),
) -> Result<LdaModel> {
    config.validate()?;
    let vocab = Vocabulary::build(docs.iter().map(|d| d.lemmas.as_slice()));
    if vocab.is_empty() {
        return Err(Error::Empty("LDA vocabulary is empty".into()));
    }
    let non_empty = docs.iter().filter(|d| !d.is_empty()).count();
    if config.k > non_empty {
        return Err(Error::InvalidArgument(format!(
            "k = {} exceeds the {non_empty} non-empty documents",
            config.k
        )));
    }
    if config.k > vocab.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {} exceeds the vocabulary size {}",
            config.k,
            vocab.len()
        )));
    }

    let k = config.k;
    let v = vocab.len();
    let words: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.lemmas.iter().map(|l| vocab.index_of(l).expect("in vocabulary")).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = LdaModel {
        vocabulary: vocab.terms,
        topic_word_counts: vec![vec![0; v]; k],
        doc_topic_counts: vec![vec![0; k]; docs.len()],
        topic_totals: vec![0; k],
        assignments: Vec::with_capacity(docs.len()),
        config: *config,
    };
    for (d, doc) in words.iter().enumerate() {
        let mut labels = Vec::with_capacity(doc.len());
        for &w in doc {
            let z = rng.gen_range(0..k);
            model.topic_word_counts[z][w] += 1;
            model.doc_topic_counts[d][z] += 1;
            model.topic_totals[z] += 1;
            labels.push(z);
        }
        model.assignments.push(labels);
    }
    observer(0, &model);

    let v_beta = v as f64 * config.beta;
    let mut weights = vec![0.0f64; k];
    for sweep in 1..=config.iterations {
        for (d, doc) in words.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = model.assignments[d][i];
                model.topic_word_counts[old][w] -= 1;
                model.doc_topic_counts[d][old] -= 1;
                model.topic_totals[old] -= 1;

                let mut total = 0.0;
                for (z, cumulative) in weights.iter_mut().enumerate() {
                    total += (model.doc_topic_counts[d][z] as f64 + config.alpha)
                        * (model.topic_word_counts[z][w] as f64 + config.beta)
                        / (model.topic_totals[z] as f64 + v_beta);
                    *cumulative = total;
                }
                let u = rng.gen::<f64>() * total;
                let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                model.topic_word_counts[new][w] += 1;
                model.doc_topic_counts[d][new] += 1;
                model.topic_totals[new] += 1;
                model.assignments[d][i] = new;
            }
        }
        observer(sweep, &model);
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: usize,
    pub top_words: Vec<(String, f64)>,
}

/// The `n` most probable words of `topic` under the smoothed estimate
/// (count + beta) / (total + V·beta); ties go to the lexicographically
/// smaller word.
pub fn top_words(model: &LdaModel, topic: usize, n: usize) -> Result<TopicSummary> {
    if topic >= model.k() {
        return Err(Error::InvalidArgument(format!(
            "topic {topic} out of range (k = {})",
            model.k()
        )));
    }
    let beta = model.config.beta;
    let denom = model.topic_totals[topic] as f64 + model.vocabulary.len() as f64 * beta;
    let mut ranked: Vec<(usize, f64)> = model.topic_word_counts[topic]
        .iter()
        .enumerate()
        .map(|(w, &c)| (w, (c as f64 + beta) / denom))
        .collect();
    // vocabulary is sorted, so index order is lexicographic order
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(TopicSummary {
        topic_id: topic,
        top_words: ranked
            .into_iter()
            .take(n)
            .map(|(w, p)| (model.vocabulary[w].clone(), p))
            .collect(),
    })
}

/// argmax_z doc_topic[d][z] + alpha, lowest id on ties.
pub fn dominant_topic(model: &LdaModel, doc: usize) -> Result<usize> {
    let counts = model.doc_topic_counts.get(doc).ok_or_else(|| {
        Error::InvalidArgument(format!("document {doc} out of range (D = {})", model.n_docs()))
    })?;
    let mut best = 0;
    for (z, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = z;
        }
    }
    Ok(best)
}

/// Decides which topics of a refinement round are domain-relevant.
pub trait TopicSelector {
    fn select(&mut self, round: usize, summaries: &[TopicSummary]) -> Result<Vec<usize>>;
}

impl<F> TopicSelector for F
where
    F: FnMut(usize, &[TopicSummary]) -> Vec<usize>,
{
    fn select(&mut self, round: usize, summaries: &[TopicSummary]) -> Result<Vec<usize>> {
        Ok(self(round, summaries))
    }
}

/// Selects a topic when at least `min_fraction` of its `top_n` words are
/// domain terms.
#[derive(Debug, Clone)]
pub struct DictionarySelector {
    pub terms: HashSet<String>,
    pub top_n: usize,
    pub min_fraction: f64,
}

impl DictionarySelector {
    pub fn new(terms: HashSet<String>) -> Self {
        Self {
            terms,
            top_n: 20,
            min_fraction: 0.3,
        }
    }

    /// Fraction of the first `top_n` words that are domain terms.
    pub fn overlap<'a>(&self, words: impl IntoIterator<Item = &'a str>) -> f64 {
        let (mut seen, mut hits) = (0usize, 0usize);
        for w in words.into_iter().take(self.top_n) {
            seen += 1;
            hits += usize::from(self.terms.contains(w));
        }
        if seen == 0 {
            0.0
        } else {
            hits as f64 / seen as f64
        }
    }

    pub fn is_domain<'a>(&self, words: impl IntoIterator<Item = &'a str>) -> bool {
        self.overlap(words) >= self.min_fraction
    }
}

impl TopicSelector for DictionarySelector {
    fn select(&mut self, _round: usize, summaries: &[TopicSummary]) -> Result<Vec<usize>> {
        Ok(summaries
            .iter()
            .filter(|s| self.is_domain(s.top_words.iter().map(|(w, _)| w.as_str())))
            .map(|s| s.topic_id)
            .collect())
    }
}

/// Prints each round's topics and reads the chosen ids (whitespace or comma
/// separated) from a line of input.
pub struct InteractiveSelector<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> InteractiveSelector<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Self { input, output }
    }
}

impl<R: BufRead, W: Write> TopicSelector for InteractiveSelector<R, W> {
    fn select(&mut self, round: usize, summaries: &[TopicSummary]) -> Result<Vec<usize>> {
        let io_err = |e| Error::io("<interactive>", e);
        writeln!(self.output, "round {round}:").map_err(io_err)?;
        for s in summaries {
            let words: Vec<&str> = s.top_words.iter().map(|(w, _)| w.as_str()).collect();
            writeln!(self.output, "  [{}] {}", s.topic_id, words.join(" ")).map_err(io_err)?;
        }
        write!(self.output, "domain topic ids: ").map_err(io_err)?;
        self.output.flush().map_err(io_err)?;
        let mut line = String::new();
        self.input.read_line(&mut line).map_err(io_err)?;
        line.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .ok()
                    .filter(|&z| z < summaries.len())
                    .ok_or_else(|| Error::InvalidArgument(format!("not a topic id: {t:?}")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub input_docs: usize,
    pub summaries: Vec<TopicSummary>,
    pub selected: Vec<usize>,
    pub topic_sizes: Vec<usize>,
    pub surviving_docs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub corpus: Corpus,
    pub rounds: Vec<RoundLog>,
    /// Why the loop stopped.
    pub stop_reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub max_rounds: usize,
    /// Words per topic shown to the selector.
    pub summary_words: usize,
    /// Stop once a round removes less than this fraction of its input.
    pub min_change: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            max_rounds: 3,
            summary_words: 20,
            min_change: 0.01,
        }
    }
}

/// Repeatedly fits LDA on the surviving tweets and keeps those whose
/// dominant topic the selector marks as relevant. Round `r` uses seed
/// `config.seed + r`. Empty documents never survive a round.
pub fn iterative_refine(
    corpus: &Corpus,
    docs: &[TokenizedDoc],
    config: &LdaConfig,
    selector: &mut dyn TopicSelector,
    options: RefineOptions,
) -> Result<Refinement> {
    let by_id: HashMap<&str, &TokenizedDoc> = docs.iter().map(|d| (d.tweet_id.as_str(), d)).collect();
    let mut survivors: Vec<&TokenizedDoc> = corpus
        .ids()
        .map(|id| {
            by_id.get(id).copied().ok_or_else(|| {
                Error::InvalidArgument(format!("tweet {id} has no tokenized document"))
            })
        })
        .collect::<Result<_>>()?;
    let mut rounds = Vec::new();
    let mut stop_reason = "max_rounds reached".to_owned();

    for round in 1..=options.max_rounds {
        let input: Vec<TokenizedDoc> = survivors.iter().map(|d| (*d).clone()).collect();
        let non_empty = input.iter().filter(|d| !d.is_empty()).count();
        let vocab = Vocabulary::build(input.iter().map(|d| d.lemmas.as_slice()));
        if non_empty < config.k || vocab.len() < config.k {
            stop_reason = format!("round {round}: too few documents or terms for k = {}", config.k);
            break;
        }
        let round_config = LdaConfig {
            seed: config.seed.wrapping_add(round as u64),
            ..*config
        };
        let model = fit_lda(&input, &round_config)?;
        let summaries = (0..model.k())
            .map(|z| top_words(&model, z, options.summary_words))
            .collect::<Result<Vec<_>>>()?;
        let dominant: Vec<Option<usize>> = input
            .iter()
            .enumerate()
            .map(|(d, doc)| (!doc.is_empty()).then(|| dominant_topic(&model, d)).transpose())
            .collect::<Result<_>>()?;
        let mut topic_sizes = vec![0; model.k()];
        for z in dominant.iter().flatten() {
            topic_sizes[*z] += 1;
        }

        let mut selected = selector.select(round, &summaries)?;
        selected.sort_unstable();
        selected.dedup();
        if selected.is_empty() {
            info!("refinement round {round}: no topic selected");
            return Err(Error::NoTopicSelected { round });
        }
        let next: Vec<&TokenizedDoc> = survivors
            .iter()
            .zip(&dominant)
            .filter(|(_, z)| z.is_some_and(|z| selected.binary_search(&z).is_ok()))
            .map(|(d, _)| *d)
            .collect();
        info!(
            "refinement round {round}: {} -> {} documents (topics {:?} of sizes {:?})",
            survivors.len(),
            next.len(),
            selected,
            topic_sizes
        );
        rounds.push(RoundLog {
            round,
            input_docs: survivors.len(),
            summaries,
            selected,
            topic_sizes,
            surviving_docs: next.len(),
        });
        let removed = survivors.len() - next.len();
        let prev = survivors.len();
        survivors = next;
        if (removed as f64) < options.min_change * prev as f64 {
            stop_reason = format!("round {round}: surviving set changed by less than {}", options.min_change);
            break;
        }
    }

    let keep: HashSet<&str> = survivors.iter().map(|d| d.tweet_id.as_str()).collect();
    Ok(Refinement {
        corpus: corpus.retain_ids(&keep),
        rounds,
        stop_reason,
    })
}
