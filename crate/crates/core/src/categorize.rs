//! Sub-category assignment by keyword/regex precedence, gazetteer-based
//! place extraction and adjective polarity tagging.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::domainfilter::rank_counts;
use crate::error::{Error, Result};
use crate::preprocess::{normalize, TokenizedDoc};
use crate::sentiment::{Polarity, SentimentLexicon};

pub const GENERAL_TOURISM: &str = "General Tourism";

#[derive(Debug, Clone)]
pub struct CategoryRule {
    pub name: String,
    pub keywords: HashSet<String>,
    pub regexes: Vec<Regex>,
}

impl CategoryRule {
    pub fn matches(&self, doc: &TokenizedDoc) -> bool {
        if doc.lemmas.iter().any(|l| self.keywords.contains(l)) {
            return true;
        }
        if self.regexes.is_empty() {
            return false;
        }
        let stream = doc.lemmas.join(" ");
        self.regexes.iter().any(|r| r.is_match(&stream))
    }
}

/// Ordered rules; the first matching category wins.
#[derive(Debug, Clone)]
pub struct CategoryRules {
    pub categories: Vec<CategoryRule>,
    pub fallback: String,
}

#[derive(Deserialize)]
struct RulesFile {
    #[serde(default)]
    fallback: Option<String>,
    #[serde(rename = "category")]
    categories: Vec<RuleEntry>,
}

#[derive(Deserialize)]
struct RuleEntry {
    name: String,
    #[serde(default)]
    keywords: Vec<String>,
    #[serde(default)]
    regexes: Vec<String>,
}

impl CategoryRules {
    /// Parses a TOML rules file made of `[[category]]` tables with `name`,
    /// `keywords` and `regexes`, in precedence order.
    pub fn from_toml(source: &str, origin: &Path) -> Result<Self> {
        let file: RulesFile = toml::from_str(source).map_err(|e| Error::resource(origin, e.to_string()))?;
        let fallback = file.fallback.unwrap_or_else(|| GENERAL_TOURISM.to_owned());
        if fallback != GENERAL_TOURISM {
            return Err(Error::resource(origin, format!("fallback must be {GENERAL_TOURISM:?}")));
        }
        let mut names = HashSet::new();
        let mut categories = Vec::new();
        for entry in file.categories {
            if !names.insert(entry.name.clone()) || entry.name == fallback {
                return Err(Error::resource(origin, format!("duplicate category {:?}", entry.name)));
            }
            let regexes = entry
                .regexes
                .iter()
                .map(|r| Regex::new(r).map_err(|e| Error::resource(origin, format!("{}: {e}", entry.name))))
                .collect::<Result<_>>()?;
            categories.push(CategoryRule {
                name: entry.name,
                keywords: entry.keywords.iter().map(|k| k.to_lowercase()).collect(),
                regexes,
            });
        }
        Ok(Self { categories, fallback })
    }

    /// Category names in precedence order, fallback last.
    pub fn names(&self) -> Vec<&str> {
        self.categories
            .iter()
            .map(|c| c.name.as_str())
            .chain(std::iter::once(self.fallback.as_str()))
            .collect()
    }
}

pub fn assign_category<'r>(doc: &TokenizedDoc, rules: &'r CategoryRules) -> &'r str {
    rules
        .categories
        .iter()
        .find(|c| c.matches(doc))
        .map_or(rules.fallback.as_str(), |c| c.name.as_str())
}

/// Every matching category, for inspecting how often precedence decides.
pub fn matching_categories<'r>(doc: &TokenizedDoc, rules: &'r CategoryRules) -> Vec<&'r str> {
    let hits: Vec<&str> = rules
        .categories
        .iter()
        .filter(|c| c.matches(doc))
        .map(|c| c.name.as_str())
        .collect();
    if hits.is_empty() {
        vec![rules.fallback.as_str()]
    } else {
        hits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    City,
    Attraction,
}

impl PlaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlaceKind::City => "city",
            PlaceKind::Attraction => "attraction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub name: String,
    pub kind: PlaceKind,
    pub aliases: Vec<String>,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
}

/// Approximate bounding box of Puglia: (lat_min, lat_max, lon_min, lon_max).
pub const PUGLIA_BBOX: (f64, f64, f64, f64) = (39.7, 42.3, 14.9, 18.6);

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    places: Vec<Place>,
    by_name: HashMap<String, usize>,
    forms: HashMap<Vec<String>, usize>,
    longest: usize,
}

#[derive(Deserialize)]
struct GazetteerRow {
    name: String,
    kind: String,
    #[serde(default)]
    aliases: String,
    lat: Option<f64>,
    lon: Option<f64>,
}

fn form_tokens(form: &str) -> Vec<String> {
    normalize(form).split(' ').filter(|s| !s.is_empty()).map(str::to_owned).collect()
}

impl Gazetteer {
    pub fn new(places: Vec<Place>) -> Result<Self> {
        let mut g = Gazetteer::default();
        for place in places {
            g.add(place)?;
        }
        Ok(g)
    }

    fn add(&mut self, place: Place) -> Result<()> {
        let idx = self.places.len();
        if self.by_name.insert(place.name.clone(), idx).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate place {:?}", place.name)));
        }
        for form in std::iter::once(&place.name).chain(&place.aliases) {
            let tokens = form_tokens(form);
            if tokens.is_empty() {
                continue;
            }
            self.longest = self.longest.max(tokens.len());
            match self.forms.get(&tokens) {
                Some(&other) if other != idx => {
                    return Err(Error::InvalidArgument(format!(
                        "form {form:?} names both {:?} and {:?}",
                        self.places[other].name, place.name
                    )))
                }
                _ => {
                    self.forms.insert(tokens, idx);
                }
            }
        }
        self.places.push(place);
        Ok(())
    }

    /// Parses a `name,kind,aliases,lat,lon` CSV with '|'-separated aliases.
    pub fn from_csv(source: &str, origin: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(source.as_bytes());
        let mut places = Vec::new();
        for (idx, row) in reader.deserialize::<GazetteerRow>().enumerate() {
            let line = idx + 2;
            let row = row.map_err(|e| Error::resource(origin, format!("line {line}: {e}")))?;
            let kind = match row.kind.trim() {
                "city" => PlaceKind::City,
                "attraction" => PlaceKind::Attraction,
                other => return Err(Error::resource(origin, format!("line {line}: unknown kind {other:?}"))),
            };
            places.push(Place {
                name: row.name.trim().to_owned(),
                kind,
                aliases: row
                    .aliases
                    .split('|')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .map(str::to_owned)
                    .collect(),
                lat: row.lat,
                lon: row.lon,
            });
        }
        Gazetteer::new(places).map_err(|e| Error::resource(origin, e.to_string()))
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn get(&self, name: &str) -> Option<&Place> {
        self.by_name.get(name).map(|&i| &self.places[i])
    }

    /// Greedy left-to-right longest match over the normalized text. Returns
    /// place indices in mention order, repeats included.
    pub fn scan(&self, text: &str) -> Vec<&Place> {
        let normalized = normalize(text);
        let tokens: Vec<String> = normalized.split(' ').filter(|s| !s.is_empty()).map(str::to_owned).collect();
        let mut found = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let max = self.longest.min(tokens.len() - i);
            let hit = (1..=max).rev().find_map(|len| self.forms.get(&tokens[i..i + len]).map(|&p| (p, len)));
            match hit {
                Some((p, len)) => {
                    found.push(&self.places[p]);
                    i += len;
                }
                None => i += 1,
            }
        }
        found
    }

    pub fn check_coordinates(&self) -> Vec<String> {
        let (lat0, lat1, lon0, lon1) = PUGLIA_BBOX;
        self.places
            .iter()
            .filter_map(|p| match (p.lat, p.lon) {
                (Some(lat), Some(lon)) if !(lat0..=lat1).contains(&lat) || !(lon0..=lon1).contains(&lon) => {
                    Some(format!("{}: ({lat}, {lon}) outside the Puglia bounding box", p.name))
                }
                _ => None,
            })
            .collect()
    }
}

/// Adjectives whose polarity comes from the sign of their lexicon valence.
#[derive(Debug, Clone, Default)]
pub struct AdjectiveLexicon {
    polarity: HashMap<String, Polarity>,
}

impl AdjectiveLexicon {
    /// Keeps the listed adjectives that carry a nonzero valence.
    pub fn new<'a>(adjectives: impl IntoIterator<Item = &'a str>, lexicon: &SentimentLexicon) -> Self {
        let polarity = adjectives
            .into_iter()
            .filter_map(|a| {
                let v = lexicon.valence(a)?;
                (v != 0.0).then(|| (a.to_owned(), if v > 0.0 { Polarity::Positive } else { Polarity::Negative }))
            })
            .collect();
        Self { polarity }
    }

    pub fn get(&self, word: &str) -> Option<Polarity> {
        self.polarity.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.polarity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarity.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMentions {
    pub tweet_id: String,
    pub cities: Vec<String>,
    pub attractions: Vec<String>,
    pub hashtags: Vec<String>,
    pub adjectives: Vec<(String, Polarity)>,
}

impl EntityMentions {
    pub fn places(&self) -> impl Iterator<Item = &str> {
        self.cities.iter().chain(&self.attractions).map(String::as_str)
    }
}

fn push_unique(list: &mut Vec<String>, item: &str) {
    if !list.iter().any(|x| x == item) {
        list.push(item.to_owned());
    }
}

/// Places, hashtags and polarity-tagged adjectives of one tweet. Each list
/// holds distinct entries in first-mention order.
pub fn extract_entities(
    doc: &TokenizedDoc,
    raw_text: &str,
    hashtags: &[String],
    gazetteer: &Gazetteer,
    adjectives: &AdjectiveLexicon,
) -> EntityMentions {
    let mut m = EntityMentions {
        tweet_id: doc.tweet_id.clone(),
        ..Default::default()
    };
    for place in gazetteer.scan(raw_text) {
        match place.kind {
            PlaceKind::City => push_unique(&mut m.cities, &place.name),
            PlaceKind::Attraction => push_unique(&mut m.attractions, &place.name),
        }
    }
    for tag in hashtags {
        push_unique(&mut m.hashtags, tag);
    }
    for lemma in &doc.lemmas {
        if let Some(p) = adjectives.get(lemma) {
            if !m.adjectives.iter().any(|(a, _)| a == lemma) {
                m.adjectives.push((lemma.clone(), p));
            }
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryShare {
    pub category: String,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryReport {
    pub distribution: Vec<CategoryShare>,
    /// Category → up to 15 (lemma, frequency) pairs.
    pub top_words: BTreeMap<String, Vec<(String, usize)>>,
    /// Category → up to 3 (attraction, tweet count) pairs.
    pub top_attractions: BTreeMap<String, Vec<(String, usize)>>,
}

pub const REPORT_TOP_WORDS: usize = 15;
pub const REPORT_TOP_ATTRACTIONS: usize = 3;

/// Category shares in `category_order`, plus per-category frequency tables.
/// `entries` pairs each tweet's category with its document and mentions.
pub fn category_report(
    category_order: &[&str],
    entries: &[(&str, &TokenizedDoc, &EntityMentions)],
) -> Result<CategoryReport> {
    if entries.is_empty() {
        return Err(Error::Empty("category report over an empty corpus".into()));
    }
    let total = entries.len() as f64;
    let mut distribution = Vec::new();
    let mut top_words = BTreeMap::new();
    let mut top_attractions = BTreeMap::new();
    for &category in category_order {
        let members: Vec<&(&str, &TokenizedDoc, &EntityMentions)> =
            entries.iter().filter(|(c, _, _)| *c == category).collect();
        distribution.push(CategoryShare {
            category: category.to_owned(),
            count: members.len(),
            percent: 100.0 * members.len() as f64 / total,
        });
        top_words.insert(
            category.to_owned(),
            rank_counts(members.iter().flat_map(|(_, d, _)| d.lemmas.iter().map(String::as_str)), REPORT_TOP_WORDS),
        );
        top_attractions.insert(
            category.to_owned(),
            rank_counts(
                members.iter().flat_map(|(_, _, m)| m.attractions.iter().map(String::as_str)),
                REPORT_TOP_ATTRACTIONS,
            ),
        );
    }
    let known: HashSet<&str> = category_order.iter().copied().collect();
    if let Some((c, _, _)) = entries.iter().find(|(c, _, _)| !known.contains(c)) {
        return Err(Error::InvalidArgument(format!("unknown category {c:?}")));
    }
    Ok(CategoryReport {
        distribution,
        top_words,
        top_attractions,
    })
}
