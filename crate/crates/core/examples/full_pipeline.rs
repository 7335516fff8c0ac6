//! Runs every stage on the bundled fixture and lists the report files.
//!
//! cargo run --example full_pipeline -- out_dir

use std::path::PathBuf;

use tweetflow::config::PipelineConfig;
use tweetflow::pipeline::Pipeline;

fn main() -> tweetflow::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "tweetflow-out".into());
    let fixture = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/pipeline.toml");
    let mut config = PipelineConfig::load(&fixture)?;
    config.output_dir = Some(std::env::current_dir().expect("working directory").join(out));
    let pipeline = Pipeline::new(config)?;
    for summary in pipeline.run_all()? {
        println!("{:<12} {} files", summary.stage.as_str(), summary.files.len());
    }
    println!("report in {}", pipeline.output_dir().join("report").display());
    Ok(())
}
