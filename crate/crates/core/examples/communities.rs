//! Label propagation and greedy modularity on two loosely joined cliques,
//! with the size threshold and hub of each chosen community.

use tweetflow::community::{community_report, Algorithm};
use tweetflow::graph::Graph;

fn main() -> tweetflow::Result<()> {
    let mut edges = Vec::new();
    for side in [["sea", "beach", "sand", "swim", "sun"], ["wine", "food", "pasta", "cheese", "oil"]] {
        for i in 0..side.len() {
            for j in i + 1..side.len() {
                edges.push((side[i], side[j]));
            }
        }
    }
    edges.extend([("sun", "wine"), ("sea", "sunset"), ("sunset", "wine")]);
    let g = Graph::from_edges([], edges);
    for algorithm in [Algorithm::LabelPropagation, Algorithm::GreedyModularity] {
        let report = community_report(&g, algorithm, 42)?;
        println!(
            "{algorithm}: {} communities, Q = {:.3}, threshold {:.2}",
            report.community_count,
            report.modularity.unwrap_or(0.0),
            report.threshold
        );
        for c in &report.chosen {
            println!("  {c}: hub {:<6} members {:?}", report.hubs[c], report.membership[c]);
        }
    }
    Ok(())
}
