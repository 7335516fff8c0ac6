//! Text normalization, tokenization, dictionary lemmatization, stopword
//! removal and TF-IDF vectorization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Language, TweetRecord};
use crate::error::{Error, Result};

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").unwrap());
static MENTION_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());

/// Case-folds and strips URLs, @-mentions, emoji and punctuation.
///
/// A `#tag` keeps its word. Whitespace is collapsed and trimmed. Apostrophes
/// and underscores count as punctuation, so `dell'orso` becomes `dell orso`.
pub fn normalize(text: &str) -> String {
    let text = URL_RE.replace_all(text, " ");
    let text = MENTION_RE.replace_all(&text, " ");
    let lowered = text.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    let mut pending_space = false;
    for ch in lowered.chars() {
        if ch.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(ch);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Splits normalized text on whitespace, dropping one-character and
/// numeric-only tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|t| t.chars().count() >= 2)
        .filter(|t| !t.chars().all(char::is_numeric))
        .map(str::to_owned)
        .collect()
}

/// Surface form → lemma lookup for one language.
#[derive(Debug, Clone, Default)]
pub struct LemmaTable {
    map: HashMap<String, String>,
}

impl LemmaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: impl Into<String>, lemma: impl Into<String>) {
        self.map.insert(surface.into(), lemma.into());
    }

    pub fn get(&self, surface: &str) -> Option<&str> {
        self.map.get(surface).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Parses a two-column TSV (`surface<TAB>lemma`). Blank lines and
    /// `#` comments are skipped.
    pub fn parse(source: &str, origin: &Path) -> Result<Self> {
        let mut table = Self::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(surface), Some(lemma), None) if !surface.is_empty() && !lemma.is_empty() => {
                    table.insert(surface.trim().to_lowercase(), lemma.trim().to_lowercase());
                }
                _ => {
                    return Err(Error::resource(
                        origin,
                        format!("line {}: expected `surface<TAB>lemma`", idx + 1),
                    ))
                }
            }
        }
        Ok(table)
    }
}

/// Lemma tables keyed by language.
#[derive(Debug, Clone, Default)]
pub struct LemmaTables {
    tables: HashMap<Language, LemmaTable>,
}

impl LemmaTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lang: Language, table: LemmaTable) {
        self.tables.insert(lang, table);
    }

    pub fn get(&self, lang: Language) -> Result<&LemmaTable> {
        self.tables
            .get(&lang)
            .ok_or_else(|| Error::MissingLemmaTable(lang.code().to_owned()))
    }
}

/// Maps each token through the language's lemma table; unknown tokens pass
/// through unchanged.
pub fn lemmatize(tokens: &[String], tables: &LemmaTables, lang: Language) -> Result<Vec<String>> {
    let table = tables.get(lang)?;
    Ok(tokens
        .iter()
        .map(|t| table.get(t).unwrap_or(t).to_owned())
        .collect())
}

pub type Stoplist = HashSet<String>;

/// Parses a stopword file: one term per line, `#` comment lines.
pub fn parse_stoplist(source: &str) -> Stoplist {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn remove_stopwords(lemmas: &[String], stoplist: &Stoplist) -> Vec<String> {
    lemmas
        .iter()
        .filter(|l| !stoplist.contains(l.as_str()))
        .cloned()
        .collect()
}

/// A tweet's token stream after stopword removal, with parallel lemmas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub tweet_id: String,
    pub lang: Language,
    pub tokens: Vec<String>,
    pub lemmas: Vec<String>,
}

impl TokenizedDoc {
    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }
}

/// Per-language resources used to turn a record into a [`TokenizedDoc`].
#[derive(Debug, Clone, Default)]
pub struct Preprocessor {
    lemmas: LemmaTables,
    stoplists: HashMap<Language, Stoplist>,
}

impl Preprocessor {
    pub fn new(lemmas: LemmaTables, stoplists: HashMap<Language, Stoplist>) -> Self {
        Self { lemmas, stoplists }
    }

    /// normalize → tokenize → lemmatize → remove stopwords. A token is
    /// dropped when its lemma is a stopword, keeping tokens and lemmas
    /// parallel.
    pub fn process(&self, record: &TweetRecord) -> Result<TokenizedDoc> {
        let lang = Language::parse(&record.lang)?;
        let tokens = tokenize(&normalize(&record.text));
        let lemmas = lemmatize(&tokens, &self.lemmas, lang)?;
        let empty = Stoplist::new();
        let stoplist = self.stoplists.get(&lang).unwrap_or(&empty);
        let (tokens, lemmas) = tokens
            .into_iter()
            .zip(lemmas)
            .filter(|(_, lemma)| !stoplist.contains(lemma))
            .unzip();
        Ok(TokenizedDoc {
            tweet_id: record.id.clone(),
            lang,
            tokens,
            lemmas,
        })
    }

    /// Lemmatized tokens with stopwords kept; negators such as "not" are
    /// usually stopwords but matter to sentiment scoring.
    pub fn sentiment_tokens(&self, record: &TweetRecord) -> Result<Vec<String>> {
        let lang = Language::parse(&record.lang)?;
        lemmatize(&tokenize(&normalize(&record.text)), &self.lemmas, lang)
    }

    pub fn process_corpus(&self, corpus: &Corpus) -> Result<Vec<TokenizedDoc>> {
        use rayon::prelude::*;
        corpus
            .records
            .par_iter()
            .map(|r| self.process(r))
            .collect()
    }
}

/// Sorted unique terms with their document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub doc_freq: Vec<usize>,
}

impl Vocabulary {
    pub fn build<'a>(docs: impl IntoIterator<Item = &'a [String]>) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let distinct: HashSet<&str> = doc.iter().map(String::as_str).collect();
            for term in distinct {
                *df.entry(term).or_default() += 1;
            }
        }
        let (terms, doc_freq) = df.into_iter().map(|(t, c)| (t.to_owned(), c)).unzip();
        Vocabulary { terms, doc_freq }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }
}

/// Sparse vector: strictly increasing indices with parallel values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn from_dense(dense: &[f64]) -> Self {
        let mut v = SparseVec::default();
        for (i, &x) in dense.iter().enumerate() {
            if x != 0.0 {
                v.indices.push(i);
                v.values.push(x);
            }
        }
        v
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.indices
            .binary_search(&index)
            .map(|p| self.values[p])
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfMatrix {
    pub rows: Vec<SparseVec>,
    pub vocabulary: Vocabulary,
}

impl TfIdfMatrix {
    /// Wraps pre-computed nonnegative rows, e.g. synthetic points.
    pub fn from_rows(vocabulary: Vocabulary, rows: Vec<SparseVec>) -> Result<Self> {
        for row in &rows {
            if row.indices.windows(2).any(|w| w[0] >= w[1])
                || row.indices.iter().any(|&i| i >= vocabulary.len())
                || row.values.iter().any(|&v| v.is_nan() || v <= 0.0)
            {
                return Err(Error::InvalidArgument(
                    "rows must hold increasing in-vocabulary indices with positive weights".into(),
                ));
            }
        }
        Ok(Self { rows, vocabulary })
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }
}

/// weight(t, d) = count(t, d) · ln(N / df(t)).
pub fn build_tfidf(docs: &[TokenizedDoc]) -> Result<TfIdfMatrix> {
    if docs.iter().all(TokenizedDoc::is_empty) {
        return Err(Error::Empty("TF-IDF needs at least one non-empty document".into()));
    }
    let vocabulary = Vocabulary::build(docs.iter().map(|d| d.lemmas.as_slice()));
    let n = docs.len() as f64;
    let idf: Vec<f64> = vocabulary
        .doc_freq
        .iter()
        .map(|&df| (n / df as f64).ln())
        .collect();
    let rows = docs
        .iter()
        .map(|doc| {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for lemma in &doc.lemmas {
                let idx = vocabulary.index_of(lemma).expect("term in vocabulary");
                *counts.entry(idx).or_default() += 1;
            }
            let mut row = SparseVec::default();
            for (idx, tf) in counts {
                let w = tf as f64 * idf[idx];
                if w > 0.0 {
                    row.indices.push(idx);
                    row.values.push(w);
                }
            }
            row
        })
        .collect();
    Ok(TfIdfMatrix { rows, vocabulary })
}
