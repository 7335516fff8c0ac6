//! Frequency exploration, curated Tourism / NotTourism dictionaries, string
//! matching and the merge of the two filtering approaches.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TweetRecord};
use crate::error::{Error, Result};
use crate::preprocess::TokenizedDoc;

pub const DEFAULT_EXPLORE_SIZE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplorationReport {
    pub top_words: Vec<(String, usize)>,
    pub top_hashtags: Vec<(String, usize)>,
    pub n: usize,
}

/// Counts with multiplicity, ranked by descending frequency then term.
pub fn rank_counts<'a>(items: impl IntoIterator<Item = &'a str>, n: usize) -> Vec<(String, usize)> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for item in items {
        *counts.entry(item).or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().map(|(t, c)| (t.to_owned(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);
    ranked
}

/// Top-`n` lemmas over the token streams and top-`n` hashtags over the
/// records, as two independent lists.
pub fn explore(docs: &[TokenizedDoc], records: &[TweetRecord], n: usize) -> ExplorationReport {
    ExplorationReport {
        top_words: rank_counts(docs.iter().flat_map(|d| d.lemmas.iter().map(String::as_str)), n),
        top_hashtags: rank_counts(records.iter().flat_map(|r| r.hashtags.iter().map(String::as_str)), n),
        n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TermLabel {
    Tourism,
    NotTourism,
}

impl TermLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TermLabel::Tourism => "Tourism",
            TermLabel::NotTourism => "NotTourism",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermDictionary {
    entries: BTreeMap<String, (TermLabel, usize)>,
}

#[derive(Deserialize)]
struct DictRow {
    term: String,
    #[serde(default)]
    label: String,
    #[serde(default)]
    frequency: Option<usize>,
}

impl TermDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a term; relabelling an existing term is an error.
    pub fn insert(&mut self, term: impl Into<String>, label: TermLabel, frequency: usize) -> Result<()> {
        let term = term.into();
        match self.entries.get(&term) {
            Some((existing, _)) if *existing != label => Err(Error::InvalidArgument(format!(
                "term {term:?} labelled both {} and {}",
                existing.as_str(),
                label.as_str()
            ))),
            _ => {
                self.entries.insert(term, (label, frequency));
                Ok(())
            }
        }
    }

    pub fn label(&self, term: &str) -> Option<TermLabel> {
        self.entries.get(term).map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self, label: TermLabel) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(move |(_, (l, _))| *l == label)
            .map(|(t, _)| t.as_str())
    }

    pub fn tourism_terms(&self) -> HashSet<String> {
        self.terms(TermLabel::Tourism).map(str::to_owned).collect()
    }

    /// Reads a `term,label,frequency` CSV. Rows with a blank label are
    /// skipped with a warning.
    pub fn from_csv(source: &str, origin: &Path) -> Result<Self> {
        let mut dict = Self::new();
        let mut reader = csv::Reader::from_reader(source.as_bytes());
        for (idx, row) in reader.deserialize::<DictRow>().enumerate() {
            let line = idx + 2;
            let row = row.map_err(|e| Error::resource(origin, format!("line {line}: {e}")))?;
            let label = match row.label.trim() {
                "" => {
                    warn!("{}:{line}: term {:?} has no label, ignored", origin.display(), row.term);
                    continue;
                }
                "Tourism" => TermLabel::Tourism,
                "NotTourism" => TermLabel::NotTourism,
                other => {
                    return Err(Error::resource(origin, format!("line {line}: unknown label {other:?}")));
                }
            };
            dict.insert(row.term.trim().to_lowercase(), label, row.frequency.unwrap_or(0))
                .map_err(|e| Error::resource(origin, format!("line {line}: {e}")))?;
        }
        Ok(dict)
    }
}

/// Writes an exploration list as a dictionary template with a blank label
/// column for the curator.
pub fn dictionary_template(ranked: &[(String, usize)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["term", "label", "frequency"])?;
    for (term, freq) in ranked {
        w.write_record([term.as_str(), "", &freq.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Number of Tourism-labelled lemma occurrences, with multiplicity.
pub fn tourism_hits(doc: &TokenizedDoc, dict: &TermDictionary) -> usize {
    doc.lemmas
        .iter()
        .filter(|l| dict.label(l) == Some(TermLabel::Tourism))
        .count()
}

/// Keeps tweets with at least `min_hits` Tourism-term occurrences.
pub fn match_strings(
    corpus: &Corpus,
    docs: &[TokenizedDoc],
    dict: &TermDictionary,
    min_hits: usize,
) -> Result<Corpus> {
    if dict.terms(TermLabel::Tourism).next().is_none() {
        return Err(Error::Empty("dictionary has no Tourism entries".into()));
    }
    let by_id: HashMap<&str, &TokenizedDoc> = docs.iter().map(|d| (d.tweet_id.as_str(), d)).collect();
    let mut keep = HashSet::new();
    for id in corpus.ids() {
        let doc = by_id
            .get(id)
            .ok_or_else(|| Error::InvalidArgument(format!("tweet {id} has no tokenized document")))?;
        if tourism_hits(doc, dict) >= min_hits {
            keep.insert(id);
        }
    }
    Ok(corpus.retain_ids(&keep))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeMode {
    /// Union by id, one copy of each shared tweet.
    #[default]
    Union,
    /// Symmetric difference: tweets found by both approaches are dropped.
    ExcludeShared,
}

/// Merges two filtered subsets of the same parent corpus: `a`'s order, then
/// `b`'s ids not in `a`.
pub fn merge_results(a: &Corpus, b: &Corpus, mode: MergeMode) -> Result<Corpus> {
    let a_texts: HashMap<&str, &str> = a.records.iter().map(|r| (r.id.as_str(), r.text.as_str())).collect();
    let b_ids: HashSet<&str> = b.ids().collect();
    for r in &b.records {
        if let Some(text) = a_texts.get(r.id.as_str()) {
            if *text != r.text {
                return Err(Error::IdCollision { id: r.id.clone() });
            }
        }
    }
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for r in a.records.iter().chain(&b.records) {
        let shared = a_texts.contains_key(r.id.as_str()) && b_ids.contains(r.id.as_str());
        if mode == MergeMode::ExcludeShared && shared {
            continue;
        }
        if seen.insert(r.id.as_str()) {
            records.push(r.clone());
        }
    }
    Ok(Corpus {
        records,
        lang_filter: a.lang_filter.or(b.lang_filter),
    })
}
