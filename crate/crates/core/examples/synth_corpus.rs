//! Writes a seeded synthetic English/Italian corpus as JSONL.
//!
//! cargo run --example synth_corpus -- out.jsonl [seed]

use tweetflow::corpus::to_jsonl;
use tweetflow::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "synthetic.jsonl".into());
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);
    let records = generate(&SynthConfig { seed, ..SynthConfig::default() });
    std::fs::write(&path, to_jsonl(&records))?;
    println!("wrote {} tweets to {path}", records.len());
    Ok(())
}
