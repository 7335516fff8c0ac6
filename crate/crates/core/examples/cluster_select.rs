//! k-means over TF-IDF vectors with k picked by silhouette.

use tweetflow::clustering::select_k;
use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{filter_language, Corpus};
use tweetflow::preprocess::build_tfidf;
use tweetflow::synth::{generate, SynthConfig};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = Corpus::new(generate(&SynthConfig::default()));
    let (it, _) = filter_language(&corpus, "it")?;
    let docs = resources.preprocessor.process_corpus(&it)?;
    let matrix = build_tfidf(&docs)?;
    let selection = select_k(&matrix, 2..=8, 42)?;
    for (k, score) in &selection.scores {
        println!("k = {k}: silhouette {score:.4}");
    }
    println!("best k = {}, sizes {:?}", selection.best_k, selection.model.sizes());
    Ok(())
}
