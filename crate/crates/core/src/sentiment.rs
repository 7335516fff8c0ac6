//! Rule-based lexicon sentiment: per-token valences adjusted by preceding
//! boosters and negators, summed and squashed into a compound score in
//! (-1, 1).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Language;
use crate::error::{Error, Result};

pub const MAX_VALENCE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringParams {
    /// How many preceding tokens a booster or negator reaches.
    pub window: usize,
    /// Factor applied to a negated valence (sign flip included).
    pub negation_scalar: f64,
    /// Magnitude of a booster listed without an explicit increment.
    pub booster_increment: f64,
    /// Normalization constant in s / sqrt(s² + alpha).
    pub alpha: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            window: 3,
            negation_scalar: -0.74,
            booster_increment: 0.293,
            alpha: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentLexicon {
    pub language: Language,
    pub valences: HashMap<String, f64>,
    pub boosters: HashMap<String, f64>,
    pub negators: HashSet<String>,
}

impl SentimentLexicon {
    pub fn new(language: Language) -> Self {
        Self {
            language,
            valences: HashMap::new(),
            boosters: HashMap::new(),
            negators: HashSet::new(),
        }
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn with_valence(mut self, token: &str, valence: f64) -> Self {
        self.valences.insert(token.to_owned(), valence);
        self
    }

    pub fn with_booster(mut self, token: &str, increment: f64) -> Self {
        self.boosters.insert(token.to_owned(), increment);
        self
    }

    pub fn with_negator(mut self, token: &str) -> Self {
        self.negators.insert(token.to_owned());
        self
    }

    /// Parses the three lexicon files: `token<TAB>valence` TSV, a booster
    /// list with `+`/`-` prefixes, and a negator list. `#` starts a comment
    /// line in all three.
    pub fn parse(
        language: Language,
        valences: (&str, &Path),
        boosters: (&str, &Path),
        negators: (&str, &Path),
        params: &ScoringParams,
    ) -> Result<Self> {
        let mut lex = Self::new(language);
        for (idx, line) in content_lines(valences.0) {
            let (token, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::resource(valences.1, format!("line {idx}: expected token<TAB>valence")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::resource(valences.1, format!("line {idx}: bad valence {value:?}")))?;
            if !(-MAX_VALENCE..=MAX_VALENCE).contains(&value) {
                return Err(Error::resource(valences.1, format!("line {idx}: valence {value} outside [-4, 4]")));
            }
            lex.valences.insert(token.trim().to_lowercase(), value);
        }
        for (idx, line) in content_lines(boosters.0) {
            let (sign, token) = match line.chars().next() {
                Some('+') => (1.0, &line[1..]),
                Some('-') => (-1.0, &line[1..]),
                _ => return Err(Error::resource(boosters.1, format!("line {idx}: booster needs a +/- prefix"))),
            };
            let token = token.trim();
            if token.is_empty() {
                return Err(Error::resource(boosters.1, format!("line {idx}: empty booster")));
            }
            lex.boosters.insert(token.to_lowercase(), sign * params.booster_increment);
        }
        for (_, line) in content_lines(negators.0) {
            lex.negators.insert(line.to_lowercase());
        }
        lex.validate()?;
        Ok(lex)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((t, v)) = self.valences.iter().find(|(_, v)| !(-MAX_VALENCE..=MAX_VALENCE).contains(*v)) {
            return Err(Error::InvalidArgument(format!("valence of {t:?} is {v}, outside [-4, 4]")));
        }
        if let Some((t, v)) = self.boosters.iter().find(|(_, v)| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("booster {t:?} increment {v} outside [-1, 1]")));
        }
        Ok(())
    }
}

fn content_lines(source: &str) -> impl Iterator<Item = (usize, &str)> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// Positive iff strictly above zero.
    pub fn of(value: f64) -> Self {
        if value > 0.0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentResult {
    pub tweet_id: String,
    pub compound: f64,
    pub label: Polarity,
}

/// s / sqrt(s² + alpha)
pub fn normalize_score(sum: f64, alpha: f64) -> f64 {
    sum / (sum * sum + alpha).sqrt()
}

/// Sum of adjusted valences before normalization.
pub fn valence_sum(tokens: &[String], lexicon: &SentimentLexicon, params: &ScoringParams) -> f64 {
    let mut sum = 0.0;
    for (i, token) in tokens.iter().enumerate() {
        if lexicon.boosters.contains_key(token) || lexicon.negators.contains(token) {
            continue;
        }
        let Some(mut v) = lexicon.valence(token) else { continue };
        if v == 0.0 {
            continue;
        }
        let window = &tokens[i.saturating_sub(params.window)..i];
        for prev in window {
            if let Some(b) = lexicon.boosters.get(prev) {
                v += b * v.signum();
            }
        }
        if window.iter().any(|t| lexicon.negators.contains(t)) {
            v *= params.negation_scalar;
        }
        sum += v;
    }
    sum
}

pub fn score(tweet_id: &str, tokens: &[String], lexicon: &SentimentLexicon) -> SentimentResult {
    score_with(tweet_id, tokens, lexicon, &ScoringParams::default())
}

pub fn score_with(tweet_id: &str, tokens: &[String], lexicon: &SentimentLexicon, params: &ScoringParams) -> SentimentResult {
    let compound = normalize_score(valence_sum(tokens, lexicon, params), params.alpha);
    SentimentResult {
        tweet_id: tweet_id.to_owned(),
        compound,
        label: Polarity::of(compound),
    }
}

/// Looks up the lexicon for `lang` in a per-language set.
pub fn lexicon_for(lexicons: &HashMap<Language, SentimentLexicon>, lang: Language) -> Result<&SentimentLexicon> {
    lexicons
        .get(&lang)
        .ok_or_else(|| Error::MissingLexicon(lang.code().to_owned()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSentiment {
    pub group: String,
    pub count: usize,
    pub mean_compound: f64,
    pub pct_positive: f64,
    pub pct_negative: f64,
}

/// Per-group mean compound and positive/negative shares, groups in
/// lexicographic order. A result may appear under several groups.
pub fn aggregate<'a>(entries: impl IntoIterator<Item = (String, &'a SentimentResult)>) -> Result<Vec<GroupSentiment>> {
    let mut groups: BTreeMap<String, (usize, f64, usize)> = BTreeMap::new();
    for (group, r) in entries {
        let g = groups.entry(group).or_default();
        g.0 += 1;
        g.1 += r.compound;
        g.2 += usize::from(r.label == Polarity::Positive);
    }
    if groups.is_empty() {
        return Err(Error::Empty("no groups to aggregate".into()));
    }
    Ok(groups
        .into_iter()
        .map(|(group, (count, sum, pos))| {
            let pct_positive = 100.0 * pos as f64 / count as f64;
            GroupSentiment {
                group,
                count,
                mean_compound: sum / count as f64,
                pct_positive,
                pct_negative: 100.0 - pct_positive,
            }
        })
        .collect())
}
