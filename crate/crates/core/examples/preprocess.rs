//! Normalization, tokenization, lemmatization and TF-IDF on a few tweets.

use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{Corpus, TweetRecord};
use tweetflow::preprocess::{build_tfidf, normalize};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = Corpus::new(vec![
        TweetRecord::new("1", "Swimming at the beaches of #Polignano, crystal clear sea! https://t.co/x", "en"),
        TweetRecord::new("2", "@friend the castles of Puglia are amazing", "en"),
        TweetRecord::new("3", "Che bello il mare di Polignano a Mare", "it"),
    ]);
    let docs = resources.preprocessor.process_corpus(&corpus)?;
    for (record, doc) in corpus.records.iter().zip(&docs) {
        println!("{}", normalize(&record.text));
        println!("  tokens {:?}", doc.tokens);
        println!("  lemmas {:?}", doc.lemmas);
    }
    let matrix = build_tfidf(&docs)?;
    println!("tf-idf: {} docs x {} terms", matrix.n_docs(), matrix.vocabulary.len());
    Ok(())
}
