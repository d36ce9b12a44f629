//! Curate, score and analyze the bundled corpus in one go.
//!
//!     cargo run --release --example full_report [OUT_DIR]

use std::path::{Path, PathBuf};

use codeppl::config::{Overrides, RunConfig};
use codeppl::pipeline::{cmd_analyze, cmd_curate, cmd_perplexity, ScoresInput};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("codeppl-report"));
    let mut cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/codeppl.toml"))?;
    cfg.apply(&Overrides { out: Some(out), ..Default::default() })?;

    cmd_curate(&cfg)?;
    let ppl = cmd_perplexity(&cfg)?;
    println!("ctx_size {} ({})", ppl.context.ctx_size, ppl.context.source);
    let inputs: Vec<ScoresInput> = ppl
        .runs
        .iter()
        .map(|r| ScoresInput { label: Some(r.scorer_id.clone()), path: r.scores_csv.clone() })
        .collect();
    let bundle = cmd_analyze(&cfg, &inputs, None)?;

    for (model, summaries) in &bundle.summaries {
        println!("{model}");
        for s in summaries {
            println!("  {:<8} n={:<3} median {:.3}", s.language, s.n_files, s.median);
        }
    }
    for (study, model, r) in &bundle.correlations {
        println!("{model} vs {study}: rho {:.3} (p {:.3}), tau {:.3} (p {:.3})", r.rho, r.p_rho, r.tau, r.p_tau);
    }
    for f in &bundle.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
