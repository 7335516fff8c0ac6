//! Lexicon-based compound scores with boosters and negation.

use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{Language, TweetRecord};
use tweetflow::sentiment::{lexicon_for, score};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let samples = [
        ("en", "the beach was beautiful"),
        ("en", "the beach was really beautiful"),
        ("en", "the beach was not beautiful"),
        ("en", "crowded and overpriced"),
        ("it", "mare bellissimo ma molto costoso"),
        ("it", "che posto"),
    ];
    for (i, (lang, text)) in samples.iter().enumerate() {
        let record = TweetRecord::new(i.to_string(), *text, *lang);
        let tokens = resources.preprocessor.sentiment_tokens(&record)?;
        let lexicon = lexicon_for(&resources.lexicons, Language::parse(lang)?)?;
        let result = score(&record.id, &tokens, lexicon);
        println!("{:+.4} {:<8} {text}", result.compound, result.label.as_str());
    }
    Ok(())
}
