//! Dictionary-driven string matching and merging of two filtered subsets.

use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{dedup, filter_language, Corpus, Language};
use tweetflow::domainfilter::{explore, match_strings, merge_results, MergeMode};
use tweetflow::synth::{generate, SynthConfig};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = dedup(&Corpus::new(generate(&SynthConfig::default())));
    let (en, _) = filter_language(&corpus, "en")?;
    let docs = resources.preprocessor.process_corpus(&en)?;

    let report = explore(&docs, &en.records, 10);
    println!("most frequent words: {:?}", report.top_words);
    println!("most frequent hashtags: {:?}", report.top_hashtags);

    let dict = resources.dictionary(Language::En)?;
    let strict = match_strings(&en, &docs, dict, 3)?;
    let loose = match_strings(&en, &docs, dict, 1)?;
    println!("{} tweets, {} with >= 3 tourism terms, {} with >= 1", en.len(), strict.len(), loose.len());
    let union = merge_results(&strict, &loose, MergeMode::Union)?;
    let exclusive = merge_results(&strict, &loose, MergeMode::ExcludeShared)?;
    println!("union {}, found by one approach only {}", union.len(), exclusive.len());
    Ok(())
}
