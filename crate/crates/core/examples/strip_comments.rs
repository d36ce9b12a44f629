//! Shows the three cleaning modes on a small C file.
//!
//!     cargo run --example strip_comments [LANGUAGE FILE]

use codeppl::clean::{clean_text, CleanMode, GrammarSet};

const SAMPLE: &str = r#"/*
 * Copyright (C) 2019 Example Authors
 * Licensed under the GNU General Public License v3.
 */
#include <stdio.h>

// Prints a greeting.
int main(void) {
    printf("/* not a comment */ // nor this\n"); /* trailing */
    return 0; // done
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (language, text) = match args.as_slice() {
        [lang, path] => (lang.clone(), std::fs::read_to_string(path)?),
        _ => ("C".to_string(), SAMPLE.to_string()),
    };
    let grammars = GrammarSet::builtin();
    let grammar = grammars.get(&language)?;

    for mode in [CleanMode::Raw, CleanMode::HeaderStripped, CleanMode::AllCommentsStripped] {
        let cleaned = clean_text(&text, grammar, mode);
        println!("==== {mode} ({} bytes removed)", cleaned.bytes_removed);
        print!("{}", cleaned.text);
    }
    Ok(())
}
