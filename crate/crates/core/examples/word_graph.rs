//! Co-occurrence networks for the four language/polarity splits.

use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{filter_language, Corpus};
use tweetflow::sentiment::{lexicon_for, score};
use tweetflow::synth::{generate, SynthConfig};
use tweetflow::wordgraph::{build_word_graph, graph_stats, Split, DEFAULT_CLIQUE_CAP};

fn main() -> tweetflow::Result<()> {
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = Corpus::new(generate(&SynthConfig::default()));
    println!("{:<12} {:>5} {:>6} {:>8} {:>6} {:>6}", "network", "nodes", "edges", "density", "max", "avg");
    for split in Split::all() {
        let (part, _) = filter_language(&corpus, split.lang.code())?;
        let docs = resources.preprocessor.process_corpus(&part)?;
        let lexicon = lexicon_for(&resources.lexicons, split.lang)?;
        let mut tweets = Vec::new();
        for (record, doc) in part.records.iter().zip(&docs) {
            let tokens = resources.preprocessor.sentiment_tokens(record)?;
            if score(&record.id, &tokens, lexicon).label == split.polarity {
                tweets.push(doc.lemmas.as_slice());
            }
        }
        let graph = build_word_graph(&tweets, Some(split), DEFAULT_CLIQUE_CAP);
        let s = graph_stats(&graph.to_graph());
        println!(
            "{:<12} {:>5} {:>6} {:>8.4} {:>6} {:>6.2}",
            split.to_string(),
            s.nodes,
            s.edges,
            s.density,
            s.max_degree,
            s.avg_degree
        );
    }
    Ok(())
}
