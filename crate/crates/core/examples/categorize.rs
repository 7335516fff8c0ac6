//! Category assignment and gazetteer entity extraction.

use tweetflow::categorize::{assign_category, extract_entities};
use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{Corpus, Language, TweetRecord};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = Corpus::new(vec![
        TweetRecord::new("1", "Che bello Polignano a Mare, mare cristallino", "it"),
        TweetRecord::new("2", "Torre dell'Orso e Otranto, spiaggia stupenda", "it"),
        TweetRecord::new("3", "Our hotel near the Castello Svevo in Bari was lovely #travel", "en"),
        TweetRecord::new("4", "Orecchiette and burrata in Lecce, delicious", "en"),
    ]);
    let docs = resources.preprocessor.process_corpus(&corpus)?;
    for (record, doc) in corpus.records.iter().zip(&docs) {
        let lang = Language::parse(&record.lang)?;
        let adjectives = &resources.adjectives[&lang];
        let mentions = extract_entities(doc, &record.text, &record.hashtags, &resources.gazetteer, adjectives);
        println!("{}", record.text);
        println!("  category    {}", assign_category(doc, &resources.categories));
        println!("  cities      {:?}", mentions.cities);
        println!("  attractions {:?}", mentions.attractions);
        println!("  adjectives  {:?}", mentions.adjectives);
    }
    Ok(())
}
