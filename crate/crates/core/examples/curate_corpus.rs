//! Runs the curation funnel over the bundled corpus.
//!
//!     cargo run --example curate_corpus [OUT_DIR]

use std::path::{Path, PathBuf};

use codeppl::config::{Overrides, RunConfig};
use codeppl::pipeline::cmd_curate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("codeppl-curate"));
    let mut cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/codeppl.toml"))?;
    cfg.apply(&Overrides { out: Some(out.clone()), ..Default::default() })?;

    let outcome = cmd_curate(&cfg)?;
    for stage in &outcome.funnel {
        println!("{:<10} {:>4} {}", stage.stage, stage.count, stage.unit);
    }
    for note in &outcome.notes {
        println!("note: {note}");
    }
    println!("sample written to {}", outcome.sample_csv.display());
    Ok(())
}
