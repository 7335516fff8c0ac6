//! The four centrality rankings on a small word network.

use tweetflow::netmetrics::{
    betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality, top_k, EigenOptions,
};
use tweetflow::wordgraph::build_word_graph;

fn main() -> tweetflow::Result<()> {
    let tweets: Vec<Vec<String>> = [
        "puglia sea beach beautiful",
        "puglia trulli alberobello",
        "puglia food orecchiette delicious",
        "sea beach sunset",
        "alberobello trulli beautiful",
        "food wine primitivo",
    ]
    .iter()
    .map(|t| t.split_whitespace().map(String::from).collect())
    .collect();
    let refs: Vec<&[String]> = tweets.iter().map(Vec::as_slice).collect();
    let g = build_word_graph(&refs, None, 50).to_graph();

    let all = [
        betweenness_centrality(&g, false),
        closeness_centrality(&g)?,
        degree_centrality(&g)?,
        eigenvector_centrality(&g, EigenOptions::default())?,
    ];
    for scores in &all {
        let ranked: Vec<String> = top_k(scores, 3).into_iter().map(|(w, s)| format!("{w} {s:.2}")).collect();
        println!("{:<12} {}", scores.measure.as_str(), ranked.join(", "));
    }
    Ok(())
}
