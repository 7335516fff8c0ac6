//! City-attraction graph exported as GeoJSON for a GIS tool.
//!
//! cargo run --example place_map -- places.geojson

use std::collections::BTreeMap;

use tweetflow::categorize::extract_entities;
use tweetflow::config::PipelineConfig;
use tweetflow::corpus::{Corpus, Language};
use tweetflow::export::{export_geojson, pretty_json, write_atomic};
use tweetflow::synth::{generate, SynthConfig};
use tweetflow::wordgraph::build_place_graph;

fn main() -> tweetflow::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "places.geojson".into());
    let resources = PipelineConfig::default().load_resources()?;
    let corpus = Corpus::new(generate(&SynthConfig::default()));
    let docs = resources.preprocessor.process_corpus(&corpus)?;
    let mut mentions = Vec::new();
    for (record, doc) in corpus.records.iter().zip(&docs) {
        let adjectives = &resources.adjectives[&Language::parse(&record.lang)?];
        mentions.push(extract_entities(doc, &record.text, &record.hashtags, &resources.gazetteer, adjectives));
    }
    let graph = build_place_graph(&mentions, &resources.gazetteer);
    for ((city, attraction), weight) in &graph.edges {
        println!("{city} -- {attraction} ({weight})");
    }
    let (geojson, skipped) = export_geojson(&graph, &resources.gazetteer, &BTreeMap::new());
    if !skipped.is_empty() {
        println!("no coordinates for {skipped:?}");
    }
    write_atomic(path.as_ref(), pretty_json(&geojson)?)?;
    println!("wrote {path}");
    Ok(())
}
