//! Collapsed Gibbs LDA on the English half of the synthetic corpus.

use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{filter_language, Corpus};
use tweetflow::synth::{generate, SynthConfig};
use tweetflow::topics::{fit_lda, top_words, LdaConfig};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = Corpus::new(generate(&SynthConfig::default()));
    let (en, _) = filter_language(&corpus, "en")?;
    let docs = resources.preprocessor.process_corpus(&en)?;
    let config = LdaConfig { iterations: 300, ..LdaConfig::with_defaults(4, 42) };
    let model = fit_lda(&docs, &config)?;
    for z in 0..model.k() {
        let summary = top_words(&model, z, 8)?;
        let words: Vec<&str> = summary.top_words.iter().map(|(w, _)| w.as_str()).collect();
        println!("topic {z}: {}", words.join(" "));
    }
    Ok(())
}
