//! Tweet records and corpora: loading, deduplication and language
//! partitioning.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::LazyLock;

use chrono::{DateTime, Utc};
use log::warn;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::normalize;

/// Language tag used for untagged records; never survives `filter_language`.
pub const UNDETERMINED: &str = "und";

static HASHTAG_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#(\w+)").unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    It,
}

impl Language {
    pub const ALL: [Language; 2] = [Language::En, Language::It];

    pub fn parse(code: &str) -> Result<Self> {
        match code {
            "en" => Ok(Language::En),
            "it" => Ok(Language::It),
            other => Err(Error::UnsupportedLanguage(other.to_owned())),
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::It => "it",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub text: String,
    pub lang: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<Utc>>,
    #[serde(default)]
    pub hashtags: Vec<String>,
}

impl TweetRecord {
    /// Builds a record, extracting hashtags from the text.
    pub fn new(id: impl Into<String>, text: impl Into<String>, lang: impl Into<String>) -> Self {
        let text = text.into();
        let hashtags = extract_hashtags(&text);
        Self {
            id: id.into(),
            text,
            lang: lang.into(),
            created_at: None,
            hashtags,
        }
    }
}

/// `#\w+` occurrences, lowercased, without the marker, in text order.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    HASHTAG_RE
        .captures_iter(text)
        .map(|c| c[1].to_lowercase())
        .collect()
}

fn clean_hashtag(tag: &str) -> Option<String> {
    let tag = tag.trim().trim_start_matches('#').to_lowercase();
    (!tag.is_empty() && !tag.contains(|c: char| c.is_whitespace() || c == '#')).then_some(tag)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub records: Vec<TweetRecord>,
    pub lang_filter: Option<Language>,
}

impl Corpus {
    pub fn new(records: Vec<TweetRecord>) -> Self {
        Self {
            records,
            lang_filter: None,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.id.as_str())
    }

    /// Keeps records whose id is in `keep`, preserving order.
    pub fn retain_ids(&self, keep: &HashSet<&str>) -> Corpus {
        Corpus {
            records: self
                .records
                .iter()
                .filter(|r| keep.contains(r.id.as_str()))
                .cloned()
                .collect(),
            lang_filter: self.lang_filter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "jsonl" | "ndjson" | "json" => Some(InputFormat::Jsonl),
            "csv" => Some(InputFormat::Csv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Abort on the first malformed row instead of skipping it.
    pub strict: bool,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOutcome {
    pub corpus: Corpus,
    /// One entry per skipped row, `path:line: reason`.
    pub skipped: Vec<String>,
}

#[derive(Deserialize)]
struct RawRow {
    id: Option<serde_json::Value>,
    text: Option<String>,
    lang: Option<String>,
    created_at: Option<String>,
    hashtags: Option<HashtagField>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HashtagField {
    List(Vec<String>),
    Joined(String),
}

fn row_to_record(row: RawRow, seen: &mut HashSet<String>) -> std::result::Result<TweetRecord, String> {
    let id = match row.id {
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        _ => return Err("missing or non-string id".into()),
    };
    if id.is_empty() {
        return Err("empty id".into());
    }
    if !seen.insert(id.clone()) {
        return Err(format!("duplicate id {id:?}"));
    }
    let text = row.text.ok_or("missing text")?;
    let lang = row
        .lang
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .unwrap_or_else(|| UNDETERMINED.to_owned());
    let created_at = match row.created_at.as_deref().map(str::trim) {
        None | Some("") => None,
        Some(ts) => Some(
            DateTime::parse_from_rfc3339(ts)
                .map_err(|e| format!("bad created_at {ts:?}: {e}"))?
                .with_timezone(&Utc),
        ),
    };
    let hashtags = match row.hashtags {
        Some(HashtagField::List(tags)) => tags.iter().filter_map(|t| clean_hashtag(t)).collect(),
        Some(HashtagField::Joined(s)) if !s.trim().is_empty() => {
            s.split('|').filter_map(clean_hashtag).collect()
        }
        _ => extract_hashtags(&text),
    };
    Ok(TweetRecord {
        id,
        text,
        lang,
        created_at,
        hashtags,
    })
}

/// Loads a JSONL or CSV tweet file, preserving input order.
pub fn load_corpus(path: &Path, format: InputFormat, options: LoadOptions) -> Result<LoadOutcome> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut outcome = LoadOutcome::default();
    let mut seen = HashSet::new();
    let mut push = |line: usize, parsed: std::result::Result<TweetRecord, String>| -> Result<()> {
        match parsed {
            Ok(rec) => outcome.corpus.records.push(rec),
            Err(message) => {
                if options.strict {
                    return Err(Error::MalformedRow {
                        path: path.to_owned(),
                        line,
                        message,
                    });
                }
                let note = format!("{}:{line}: {message}", path.display());
                warn!("skipping malformed row {note}");
                outcome.skipped.push(note);
            }
        }
        Ok(())
    };

    match format {
        InputFormat::Jsonl => {
            for (idx, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = serde_json::from_str::<RawRow>(&line)
                    .map_err(|e| e.to_string())
                    .and_then(|row| row_to_record(row, &mut seen));
                push(idx + 1, parsed)?;
            }
        }
        InputFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(file);
            for (idx, row) in reader.deserialize::<CsvRow>().enumerate() {
                // header is line 1
                let parsed = row.map_err(|e| e.to_string()).and_then(|r| {
                    row_to_record(
                        RawRow {
                            id: r.id.map(serde_json::Value::String),
                            text: r.text,
                            lang: r.lang,
                            created_at: r.created_at,
                            hashtags: r.hashtags.map(HashtagField::Joined),
                        },
                        &mut seen,
                    )
                });
                push(idx + 2, parsed)?;
            }
        }
    }
    Ok(outcome)
}

#[derive(Deserialize)]
struct CsvRow {
    id: Option<String>,
    text: Option<String>,
    lang: Option<String>,
    created_at: Option<String>,
    hashtags: Option<String>,
}

/// Keeps the first record of each normalized-text class, in input order.
pub fn dedup(corpus: &Corpus) -> Corpus {
    let mut seen = HashSet::new();
    Corpus {
        records: corpus
            .records
            .iter()
            .filter(|r| seen.insert(normalize(&r.text)))
            .cloned()
            .collect(),
        lang_filter: corpus.lang_filter,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LanguageCounts {
    pub kept: usize,
    pub dropped: usize,
}

/// Records tagged with `lang`, in original order.
pub fn filter_language(corpus: &Corpus, lang: &str) -> Result<(Corpus, LanguageCounts)> {
    let lang = Language::parse(lang)?;
    let records: Vec<TweetRecord> = corpus
        .records
        .iter()
        .filter(|r| r.lang == lang.code())
        .cloned()
        .collect();
    let counts = LanguageCounts {
        kept: records.len(),
        dropped: corpus.len() - records.len(),
    };
    Ok((
        Corpus {
            records,
            lang_filter: Some(lang),
        },
        counts,
    ))
}

/// Writes records as JSONL, one object per line.
pub fn to_jsonl(records: &[TweetRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_tmp(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn rec(id: &str, text: &str, lang: &str) -> TweetRecord {
        TweetRecord::new(id, text, lang)
    }

    #[test]
    fn load_empty_file() {
        let f = write_tmp("", ".jsonl");
        let out = load_corpus(f.path(), InputFormat::Jsonl, LoadOptions::default()).unwrap();
        assert!(out.corpus.is_empty());
    }

    #[test]
    fn load_extracts_hashtags_and_defaults_lang() {
        let f = write_tmp("{\"id\":\"1\",\"text\":\"Visit #Puglia\"}\n", ".jsonl");
        let out = load_corpus(f.path(), InputFormat::Jsonl, LoadOptions::default()).unwrap();
        assert_eq!(out.corpus.len(), 1);
        assert_eq!(out.corpus.records[0].hashtags, vec!["puglia"]);
        assert_eq!(out.corpus.records[0].lang, UNDETERMINED);
    }

    #[test]
    fn malformed_rows_skip_or_abort() {
        let body = "{\"id\":\"1\",\"text\":\"ok\",\"lang\":\"en\"}\n{\"text\":\"no id\"}\nnot json\n";
        let f = write_tmp(body, ".jsonl");
        let out = load_corpus(f.path(), InputFormat::Jsonl, LoadOptions::default()).unwrap();
        assert_eq!(out.corpus.len(), 1);
        assert_eq!(out.skipped.len(), 2);
        assert!(out.skipped[0].ends_with(":2: missing or non-string id"));

        let err = load_corpus(f.path(), InputFormat::Jsonl, LoadOptions { strict: true }).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn load_csv_with_joined_hashtags() {
        let body = "id,text,lang,created_at,hashtags\n7,\"Sole, mare\",it,2020-07-01T10:00:00Z,mare|Estate\n8,no tags #here,en,,\n";
        let f = write_tmp(body, ".csv");
        let out = load_corpus(f.path(), InputFormat::Csv, LoadOptions::default()).unwrap();
        assert_eq!(out.corpus.records[0].hashtags, vec!["mare", "estate"]);
        assert!(out.corpus.records[0].created_at.is_some());
        assert_eq!(out.corpus.records[1].hashtags, vec!["here"]);
    }

    #[test]
    fn unreadable_file_is_an_error() {
        let err = load_corpus(Path::new("/nonexistent/x.jsonl"), InputFormat::Jsonl, LoadOptions::default());
        assert!(matches!(err, Err(Error::Io { .. })));
    }

    #[test]
    fn dedup_examples() {
        let c = Corpus::new(vec![rec("1", "same", "en"), rec("2", "same", "en")]);
        let d = dedup(&c);
        assert_eq!(d.ids().collect::<Vec<_>>(), vec!["1"]);

        let c = Corpus::new(vec![rec("1", "see http://a.co", "en"), rec("2", "see http://b.co", "en")]);
        assert_eq!(dedup(&c).len(), 1);

        let c = Corpus::new(vec![rec("1", "a", "en"), rec("2", "b", "en")]);
        assert_eq!(dedup(&c), c);
    }

    #[test]
    fn filter_language_examples() {
        let c = Corpus::new(vec![rec("1", "a", "en"), rec("2", "b", "it"), rec("3", "c", "en")]);
        let (en, counts) = filter_language(&c, "en").unwrap();
        assert_eq!(en.ids().collect::<Vec<_>>(), vec!["1", "3"]);
        assert_eq!(counts, LanguageCounts { kept: 2, dropped: 1 });
        let c = Corpus::new(vec![rec("1", "a", "en")]);
        assert!(filter_language(&c, "it").unwrap().0.is_empty());
        assert!(matches!(filter_language(&c, "fr"), Err(Error::UnsupportedLanguage(_))));
    }

    proptest! {
        #[test]
        fn dedup_idempotent_and_filter_exact(
            texts in proptest::collection::vec(("[ab ]{0,4}", prop_oneof!["en", "it", "und"]), 0..30)
        ) {
            let records: Vec<TweetRecord> = texts
                .iter()
                .enumerate()
                .map(|(i, (t, l))| rec(&i.to_string(), t, l))
                .collect();
            let c = Corpus::new(records);
            let once = dedup(&c);
            prop_assert_eq!(dedup(&once), once.clone());
            prop_assert!(once.len() <= c.len());
            let distinct: HashSet<String> = c.records.iter().map(|r| normalize(&r.text)).collect();
            prop_assert_eq!(once.len(), distinct.len());

            let (it, counts) = filter_language(&c, "it").unwrap();
            let expect: Vec<&TweetRecord> = c.records.iter().filter(|r| r.lang == "it").collect();
            prop_assert_eq!(it.records.iter().collect::<Vec<_>>(), expect);
            prop_assert_eq!(counts.kept + counts.dropped, c.len());
        }
    }
}
