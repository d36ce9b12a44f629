//! Serves the fixture mock scorer over TCP, validates it with the protocol
//! check, then scores a random sequence through it.

use std::path::Path;

use codeppl::engine::{sliding_window, ExternalScorer};
use codeppl::pipeline::protocol_check;
use codeppl::protocol::mock::{MockScorer, MockServer};
use codeppl::rng::SplitMix64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mock_scorer.json");
    let server = MockServer::spawn(MockScorer::load(&fixture)?)?;
    let endpoint = server.endpoint();
    println!("mock scorer listening on {endpoint}");

    let report = protocol_check(&endpoint)?;
    for step in &report.steps {
        println!("ok  {:<18} {}", step.name, step.detail);
    }

    let scorer = ExternalScorer::connect("mock", &endpoint, 2)?;
    let mut rng = SplitMix64::new(13);
    let ids: Vec<u32> = (0..200).map(|_| rng.below(256) as u32).collect();
    let w = sliding_window(&ids, &scorer, 16, 1, 16, 32)?;
    println!("{} positions scored by {}, perplexity {:.4}", w.n_scored, scorer.model_name(), w.perplexity());
    Ok(())
}
