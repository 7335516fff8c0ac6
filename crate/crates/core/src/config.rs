//! Pipeline configuration (TOML) and resource loading. Paths are relative
//! to the config file; omitted resources fall back to the bundled Puglia
//! defaults.

use std::collections::HashMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::categorize::{AdjectiveLexicon, CategoryRules, Gazetteer};
use crate::community::Algorithm;
use crate::corpus::Language;
use crate::domainfilter::{MergeMode, TermDictionary, DEFAULT_EXPLORE_SIZE};
use crate::error::{Error, Result};
use crate::preprocess::{parse_stoplist, LemmaTable, LemmaTables, Preprocessor, Stoplist};
use crate::sentiment::{ScoringParams, SentimentLexicon};
use crate::wordgraph::DEFAULT_CLIQUE_CAP;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanguageResources {
    pub stopwords: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub boosters: Option<PathBuf>,
    pub negators: Option<PathBuf>,
    pub adjectives: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourcePaths {
    pub en: LanguageResources,
    pub it: LanguageResources,
    pub gazetteer: Option<PathBuf>,
    pub categories: Option<PathBuf>,
}

impl ResourcePaths {
    fn for_language(&self, lang: Language) -> &LanguageResources {
        match lang {
            Language::En => &self.en,
            Language::It => &self.it,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExploreSection {
    pub size: usize,
}

impl Default for ExploreSection {
    fn default() -> Self {
        Self {
            size: DEFAULT_EXPLORE_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    pub min_hits: usize,
    pub merge: MergeMode,
}

impl Default for FilterSection {
    fn default() -> Self {
        Self {
            min_hits: 3,
            merge: MergeMode::Union,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaSection {
    pub k: usize,
    /// Defaults to 50 / k.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub max_rounds: usize,
    pub summary_words: usize,
    pub min_change: f64,
    /// Share of a topic's top words that must be domain terms.
    pub min_fraction: f64,
}

impl Default for LdaSection {
    fn default() -> Self {
        Self {
            k: 4,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            max_rounds: 3,
            summary_words: 20,
            min_change: 0.01,
            min_fraction: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringSection {
    pub k_min: usize,
    pub k_max: usize,
    pub max_iters: usize,
    pub silhouette_sample: Option<usize>,
    /// Share of a cluster's top words that must be domain terms.
    pub min_fraction: f64,
    pub top_words: usize,
}

impl Default for ClusteringSection {
    fn default() -> Self {
        Self {
            k_min: 2,
            k_max: 10,
            max_iters: 100,
            silhouette_sample: Some(2000),
            min_fraction: 0.3,
            top_words: 10,
        }
    }
}

impl ClusteringSection {
    pub fn k_range(&self) -> RangeInclusive<usize> {
        self.k_min..=self.k_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    pub clique_cap: usize,
}

impl Default for GraphSection {
    fn default() -> Self {
        Self {
            clique_cap: DEFAULT_CLIQUE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub top_k: usize,
    pub normalized_betweenness: bool,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            top_k: 10,
            normalized_betweenness: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunitySection {
    /// Partition whose chosen communities yield the hub table.
    pub hub_algorithm: Algorithm,
}

impl Default for CommunitySection {
    fn default() -> Self {
        Self {
            hub_algorithm: Algorithm::GreedyModularity,
        }
    }
}

fn all_languages() -> Vec<Language> {
    Language::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "all_languages")]
    pub languages: Vec<Language>,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub resources: ResourcePaths,
    #[serde(default)]
    pub explore: ExploreSection,
    #[serde(default)]
    pub filter: FilterSection,
    #[serde(default)]
    pub lda: LdaSection,
    #[serde(default)]
    pub clustering: ClusteringSection,
    #[serde(default)]
    pub sentiment: ScoringParams,
    #[serde(default)]
    pub graph: GraphSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub communities: CommunitySection,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config parses")
    }
}

impl PipelineConfig {
    pub fn parse(source: &str, base_dir: &Path) -> Result<Self> {
        let mut config: PipelineConfig = toml::from_str(source).map_err(|e| Error::Config(e.to_string()))?;
        config.base_dir = base_dir.to_path_buf();
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let source = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&source, base)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn input_path(&self) -> Result<PathBuf> {
        self.input
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| Error::Config("no input corpus (set `input` or pass --input)".into()))
    }

    pub fn output_path(&self) -> Result<PathBuf> {
        self.output_dir
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| Error::Config("no output directory (set `output_dir` or pass --out)".into()))
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required (set `seed` or pass --seed)".into()))
    }

    /// Checks parameters and that every configured path exists.
    pub fn validate(&self) -> Result<()> {
        if self.languages.is_empty() {
            return Err(Error::Config("`languages` is empty".into()));
        }
        let c = &self.clustering;
        if c.k_min < 2 || c.k_min > c.k_max {
            return Err(Error::Config(format!("clustering k range {}..={} is invalid", c.k_min, c.k_max)));
        }
        if self.lda.k < 1 || self.lda.iterations == 0 {
            return Err(Error::Config("lda.k and lda.iterations must be positive".into()));
        }
        for (name, v) in [("lda.min_fraction", self.lda.min_fraction), ("clustering.min_fraction", c.min_fraction)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.graph.clique_cap < 2 {
            return Err(Error::Config("graph.clique_cap must be at least 2".into()));
        }
        let r = &self.resources;
        let mut paths: Vec<&PathBuf> = [&r.gazetteer, &r.categories].into_iter().flatten().collect();
        for lang in &self.languages {
            let l = r.for_language(*lang);
            paths.extend(
                [&l.stopwords, &l.lemmas, &l.lexicon, &l.boosters, &l.negators, &l.adjectives, &l.dictionary]
                    .into_iter()
                    .flatten(),
            );
        }
        paths.extend(self.input.as_ref());
        for p in paths {
            let full = self.resolve(p);
            if !full.is_file() {
                return Err(Error::Config(format!("{} does not exist", full.display())));
            }
        }
        Ok(())
    }

    /// Per-stage seed: the first eight bytes of sha256(global seed ‖ stage).
    pub fn stage_seed(&self, stage: &str) -> Result<u64> {
        Ok(derive_seed(self.seed()?, stage))
    }

    fn read(&self, configured: &Option<PathBuf>, bundled: (&'static str, &'static str)) -> Result<(String, PathBuf)> {
        match configured {
            Some(p) => {
                let full = self.resolve(p);
                let text = fs::read_to_string(&full).map_err(|e| Error::io(&full, e))?;
                Ok((text, full))
            }
            None => Ok((bundled.1.to_owned(), PathBuf::from(format!("<bundled>/{}", bundled.0)))),
        }
    }

    pub fn load_resources(&self) -> Result<Resources> {
        let r = &self.resources;
        let mut lemma_tables = LemmaTables::new();
        let mut stoplists: HashMap<Language, Stoplist> = HashMap::new();
        let mut lexicons = HashMap::new();
        let mut adjectives = HashMap::new();
        let mut dictionaries = HashMap::new();
        for &lang in &self.languages {
            let paths = r.for_language(lang);
            let b = bundled(lang);
            let (text, origin) = self.read(&paths.lemmas, b.lemmas)?;
            lemma_tables.insert(lang, LemmaTable::parse(&text, &origin)?);
            stoplists.insert(lang, parse_stoplist(&self.read(&paths.stopwords, b.stopwords)?.0));
            let (val, val_p) = self.read(&paths.lexicon, b.lexicon)?;
            let (boo, boo_p) = self.read(&paths.boosters, b.boosters)?;
            let (neg, neg_p) = self.read(&paths.negators, b.negators)?;
            let lexicon = SentimentLexicon::parse(lang, (&val, &val_p), (&boo, &boo_p), (&neg, &neg_p), &self.sentiment)?;
            let adj_text = self.read(&paths.adjectives, b.adjectives)?.0;
            let listed = adj_text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
            adjectives.insert(lang, AdjectiveLexicon::new(listed, &lexicon));
            lexicons.insert(lang, lexicon);
            let (dict, dict_p) = self.read(&paths.dictionary, b.dictionary)?;
            dictionaries.insert(lang, TermDictionary::from_csv(&dict, &dict_p)?);
        }
        let (gaz, gaz_p) = self.read(&r.gazetteer, GAZETTEER)?;
        let gazetteer = Gazetteer::from_csv(&gaz, &gaz_p)?;
        for problem in gazetteer.check_coordinates() {
            log::warn!("{}: {problem}", gaz_p.display());
        }
        let (cats, cats_p) = self.read(&r.categories, CATEGORIES)?;
        let categories = CategoryRules::from_toml(&cats, &cats_p)?;
        Ok(Resources {
            preprocessor: Preprocessor::new(lemma_tables, stoplists),
            lexicons,
            adjectives,
            dictionaries,
            gazetteer,
            categories,
        })
    }
}

pub fn derive_seed(seed: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stage.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Everything the stages need besides the corpus.
#[derive(Debug, Clone)]
pub struct Resources {
    pub preprocessor: Preprocessor,
    pub lexicons: HashMap<Language, SentimentLexicon>,
    pub adjectives: HashMap<Language, AdjectiveLexicon>,
    pub dictionaries: HashMap<Language, TermDictionary>,
    pub gazetteer: Gazetteer,
    pub categories: CategoryRules,
}

impl Resources {
    pub fn dictionary(&self, lang: Language) -> Result<&TermDictionary> {
        self.dictionaries
            .get(&lang)
            .ok_or_else(|| Error::Config(format!("no dictionary for {lang}")))
    }
}

struct Bundled {
    stopwords: (&'static str, &'static str),
    lemmas: (&'static str, &'static str),
    lexicon: (&'static str, &'static str),
    boosters: (&'static str, &'static str),
    negators: (&'static str, &'static str),
    adjectives: (&'static str, &'static str),
    dictionary: (&'static str, &'static str),
}

macro_rules! resource {
    ($name:literal) => {
        ($name, include_str!(concat!("../resources/", $name)))
    };
}

const GAZETTEER: (&str, &str) = resource!("gazetteer_puglia.csv");
const CATEGORIES: (&str, &str) = resource!("categories.toml");

fn bundled(lang: Language) -> Bundled {
    match lang {
        Language::En => Bundled {
            stopwords: resource!("stopwords_en.txt"),
            lemmas: resource!("lemmas_en.tsv"),
            lexicon: resource!("lexicon_en.tsv"),
            boosters: resource!("boosters_en.txt"),
            negators: resource!("negators_en.txt"),
            adjectives: resource!("adjectives_en.txt"),
            dictionary: resource!("dictionary_en.csv"),
        },
        Language::It => Bundled {
            stopwords: resource!("stopwords_it.txt"),
            lemmas: resource!("lemmas_it.tsv"),
            lexicon: resource!("lexicon_it.tsv"),
            boosters: resource!("boosters_it.txt"),
            negators: resource!("negators_it.txt"),
            adjectives: resource!("adjectives_it.txt"),
            dictionary: resource!("dictionary_it.csv"),
        },
    }
}
