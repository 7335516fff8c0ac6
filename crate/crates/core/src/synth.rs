//! Seeded generator of synthetic English/Italian tweets: tourism posts
//! about Puglia mixed with unrelated chatter.

use std::collections::HashSet;

use chrono::{Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Language, TweetRecord};
use crate::preprocess::normalize;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub en: usize,
    pub it: usize,
    /// Probability that a tweet is about tourism.
    pub tourism_share: f64,
    /// Trailing records that copy the text of an earlier same-language one.
    pub duplicates: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            en: 120,
            it: 80,
            tourism_share: 0.6,
            duplicates: 3,
            seed: 42,
        }
    }
}

struct Vocab {
    places: &'static [&'static str],
    categories: &'static [&'static [&'static str]],
    general: &'static [&'static str],
    positive: &'static [&'static str],
    negative: &'static [&'static str],
    boosters: &'static [&'static str],
    negator: &'static str,
    tourism_tags: &'static [&'static str],
    noise: &'static [&'static str],
    noise_tags: &'static [&'static str],
    fillers: &'static [&'static str],
}

const EN: Vocab = Vocab {
    places: &[
        "Polignano a Mare", "Alberobello", "Lecce", "Bari", "Ostuni", "Otranto", "Gallipoli", "Monopoli",
        "Taranto", "Vieste", "Leuca", "Trani", "Castel del Monte", "Torre dell'Orso", "Grotta della Poesia",
        "Lama Monachile", "Castellana Caves", "Tremiti Islands", "Valle d'Itria", "Basilica di San Nicola",
    ],
    categories: &[
        &["crystal clear sea", "the beach at dawn", "swimming in the adriatic", "sand and waves", "a quiet bay on the coast"],
        &["walking among the trulli", "the baroque cathedral", "ancient history everywhere", "the castle walls", "a museum of local history"],
        &["olive trees for miles", "hiking in the park", "the nature reserve", "a walk in the forest", "the green valley"],
        &["our hotel", "stayed in a masseria", "villa with a pool", "a resort with a view", "the room was"],
        &["orecchiette and burrata", "primitivo wine tasting", "seafood dinner", "street food in the old town", "lunch at a family restaurant"],
        &["concert in the square", "dancing the pizzica", "dj set until late", "a summer music festival", "the sound of the taranta"],
    ],
    general: &["holiday in apulia", "trip to puglia", "travel diary", "summer vacation", "visit salento", "sunset", "enjoy the south", "tourist day"],
    positive: &["beautiful", "amazing", "wonderful", "lovely", "stunning", "perfect", "delicious", "charming", "great", "magical"],
    negative: &["crowded", "overpriced", "noisy", "disappointing", "dirty", "boring"],
    boosters: &["very", "really", "absolutely", "so"],
    negator: "not",
    tourism_tags: &["#puglia", "#apulia", "#weareinpuglia", "#travel", "#salento", "#italy", "#summer"],
    noise: &[
        "the election results are out", "government announces a new tax", "football match tonight",
        "wrestlemania predictions thread", "stock prices falling again", "another lockdown is coming",
        "virus cases rising", "vote tomorrow", "new phone review", "my cat ignores me",
        "traffic on the highway", "coffee first", "working late again", "podcast episode is live",
    ],
    noise_tags: &["#news", "#politics", "#football", "#tech", "#monday"],
    fillers: &["honestly", "today", "finally", "again", "this week", "right now"],
};

const IT: Vocab = Vocab {
    places: &[
        "Polignano a Mare", "Alberobello", "Lecce", "Bari", "Ostuni", "Otranto", "Gallipoli", "Taranto",
        "Massafra", "Peschici", "Santa Maria di Leuca", "Torre dell'Orso", "Baia dei Turchi", "Porto Selvaggio",
        "Castello Aragonese", "Foresta Umbra", "Isole Tremiti", "Castello Svevo", "Grotte di Castellana", "Torre Guaceto",
    ],
    categories: &[
        &["mare cristallino", "spiaggia al tramonto", "nuotare nel mare", "sabbia e onde", "lungomare di sera"],
        &["passeggiata tra i trulli", "la cattedrale barocca", "storia antica", "il castello", "il museo archeologico"],
        &["ulivi secolari", "escursione nel parco", "la riserva naturale", "natura incontaminata", "la valle verde"],
        &["il nostro hotel", "soggiorno in masseria", "villa con piscina", "resort con vista", "agriturismo in campagna"],
        &["orecchiette e burrata", "vino primitivo", "cena di pesce al ristorante", "pranzo in trattoria", "gastronomia locale"],
        &["concerto in piazza", "ballare la pizzica", "notte della taranta", "festival di musica", "una canzone popolare"],
    ],
    general: &["vacanza in puglia", "viaggio nel salento", "turismo", "estate", "borghitalia", "weareinpuglia", "visitare il sud"],
    positive: &["bello", "bellissimo", "meraviglioso", "stupendo", "incantevole", "splendido", "delizioso", "magico", "perfetto"],
    negative: &["affollato", "costoso", "rumoroso", "deludente", "sporco", "noioso"],
    boosters: &["molto", "davvero", "veramente", "proprio"],
    negator: "non",
    tourism_tags: &["#puglia", "#weareinpuglia", "#vacanza", "#mare", "#estate", "#salento", "#borghitalia"],
    noise: &[
        "risultati delle elezioni", "il governo annuncia una nuova tassa", "partita di calcio stasera",
        "quarantena di nuovo", "mascherina obbligatoria", "voto domani", "recensione del nuovo telefono",
        "traffico in tangenziale", "prima il caffè", "lavoro fino a tardi", "il mio gatto dorme",
    ],
    noise_tags: &["#notizie", "#politica", "#calcio", "#tech", "#lunedi"],
    fillers: &["oggi", "finalmente", "ancora", "questa settimana", "adesso"],
};

fn vocab(lang: Language) -> &'static Vocab {
    match lang {
        Language::En => &EN,
        Language::It => &IT,
    }
}

fn pick<'a, R: Rng>(rng: &mut R, items: &'a [&'a str]) -> &'a str {
    items.choose(rng).copied().unwrap_or_default()
}

fn opinion<R: Rng>(rng: &mut R, v: &Vocab) -> String {
    let negative = rng.gen_bool(0.2);
    let adjective = pick(rng, if negative { v.negative } else { v.positive });
    match rng.gen_range(0..10) {
        0..=2 => format!("{} {adjective}", pick(rng, v.boosters)),
        3 => format!("{} {adjective}", v.negator),
        _ => adjective.to_owned(),
    }
}

fn tourism_text<R: Rng>(rng: &mut R, v: &Vocab) -> String {
    let mut parts = Vec::new();
    if rng.gen_bool(0.8) {
        let first = pick(rng, v.places);
        parts.push(first.to_owned());
        // a second place links a town to an attraction in the place graph
        if rng.gen_bool(0.35) {
            let second = pick(rng, v.places);
            if second != first {
                parts.push(second.to_owned());
            }
        }
    }
    if rng.gen_bool(0.75) {
        let category = v.categories.choose(rng).expect("categories");
        parts.push(pick(rng, category).to_owned());
    }
    for _ in 0..rng.gen_range(1..=3) {
        parts.push(pick(rng, v.general).to_owned());
    }
    parts.push(opinion(rng, v));
    parts.shuffle(rng);
    for _ in 0..rng.gen_range(0..=2) {
        parts.push(pick(rng, v.tourism_tags).to_owned());
    }
    parts.join(" ")
}

fn noise_text<R: Rng>(rng: &mut R, v: &Vocab) -> String {
    let mut parts = vec![pick(rng, v.noise).to_owned()];
    if rng.gen_bool(0.5) {
        parts.push(pick(rng, v.fillers).to_owned());
    }
    // a stray place or tourism word keeps filtering honest
    if rng.gen_bool(0.2) {
        parts.push(pick(rng, v.places).to_owned());
    }
    if rng.gen_bool(0.15) {
        parts.push(pick(rng, v.general).to_owned());
    }
    if rng.gen_bool(0.3) {
        parts.insert(0, format!("@user{}", rng.gen_range(1..500)));
    }
    if rng.gen_bool(0.2) {
        parts.push(format!("https://t.co/{:08x}", rng.gen::<u32>()));
    }
    if rng.gen_bool(0.4) {
        parts.push(pick(rng, v.noise_tags).to_owned());
    }
    parts.join(" ")
}

/// Generates `en + it` records with ids `1000000001..`, languages
/// interleaved at random and timestamps one to thirty minutes apart.
pub fn generate(config: &SynthConfig) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut langs: Vec<Language> = std::iter::repeat_n(Language::En, config.en)
        .chain(std::iter::repeat_n(Language::It, config.it))
        .collect();
    langs.shuffle(&mut rng);
    let mut seen = HashSet::new();
    let mut time = Utc.with_ymd_and_hms(2020, 6, 1, 8, 0, 0).single().expect("valid date");
    let mut records: Vec<TweetRecord> = langs
        .iter()
        .enumerate()
        .map(|(i, &lang)| {
            let v = vocab(lang);
            let tourism = rng.gen_bool(config.tourism_share);
            // redraw until the text is new, so duplicates are only the planted ones
            let text = loop {
                let text = if tourism { tourism_text(&mut rng, v) } else { noise_text(&mut rng, v) };
                if seen.insert(normalize(&text)) {
                    break text;
                }
            };
            time += Duration::minutes(rng.gen_range(1..=30));
            let mut record = TweetRecord::new(format!("{}", 1_000_000_001 + i), text, lang.code());
            record.created_at = Some(time);
            record
        })
        .collect();
    let n = records.len();
    for i in n.saturating_sub(config.duplicates)..n {
        let source = (0..i).rev().find(|&j| records[j].lang == records[i].lang);
        if let Some(j) = source {
            let copy = records[j].clone();
            records[i].text = copy.text;
            records[i].hashtags = copy.hashtags;
        }
    }
    records
}
