//! Iterative LDA refinement: keep the tweets of tourism-looking topics and
//! refit until the surviving set stops changing.

use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{filter_language, Corpus, Language};
use tweetflow::synth::{generate, SynthConfig};
use tweetflow::topics::{iterative_refine, DictionarySelector, LdaConfig, RefineOptions};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = Corpus::new(generate(&SynthConfig::default()));
    let (en, _) = filter_language(&corpus, "en")?;
    let docs = resources.preprocessor.process_corpus(&en)?;
    // tourism terms plus category keywords, as the pipeline does
    let mut terms = resources.dictionary(Language::En)?.tourism_terms();
    for rule in &resources.categories.categories {
        terms.extend(rule.keywords.iter().cloned());
    }
    let mut selector = DictionarySelector::new(terms);
    let config = LdaConfig { iterations: 200, ..LdaConfig::with_defaults(4, 7) };
    let refinement = iterative_refine(&en, &docs, &config, &mut selector, RefineOptions::default())?;
    for round in &refinement.rounds {
        println!(
            "round {}: {} docs in, topics {:?} kept, {} survive",
            round.round, round.input_docs, round.selected, round.surviving_docs
        );
    }
    println!("stopped: {}", refinement.stop_reason);
    Ok(())
}
