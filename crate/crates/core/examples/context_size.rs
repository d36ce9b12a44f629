//! Picks a context size from the smallest per-language median token count.
//!
//!     cargo run --example context_size -- 170 329 535

use codeppl::engine::{configure_context, DEFAULT_CANDIDATES};

fn main() {
    let medians: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("median token counts are numbers"))
        .collect();
    let medians = if medians.is_empty() { vec![170.0, 329.0] } else { medians };

    println!("candidates {DEFAULT_CANDIDATES:?}, stride 1");
    for m in medians {
        match configure_context(m, 1, &DEFAULT_CANDIDATES) {
            Ok(c) => println!(
                "median {m:>8}: threshold {:>7} bound {:>4} -> ctx_size {}",
                c.threshold, c.bound, c.ctx_size
            ),
            Err(e) => println!("median {m:>8}: {e}"),
        }
    }
}
