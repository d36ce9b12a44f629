//! Acceptance checks for the toolkit. Each check prints one PASS/FAIL line;
//! the process exits nonzero if any fails.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use codeppl::analysis::{kendall, spearman};
use codeppl::clean::{strip_all_comments, strip_header_boilerplate, CommentGrammar, GrammarSet};
use codeppl::config::AnalysisConfig;
use codeppl::engine::{configure_context, ngram_train, sliding_window, FixedScorer, UniformScorer};
use codeppl::pipeline::{self, ScoresInput};
use codeppl::protocol::mock::{MockScorer, MockServer};
use codeppl::protocol::{ProtocolError, ScorerClient, Window};
use codeppl::report::RunRecord;
use codeppl::rng::SplitMix64;
use codeppl::tokenize::TokenSequence;
use codeppl::FileKey;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_s), || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn seq(ids: Vec<u32>, name: &str) -> TokenSequence {
    TokenSequence {
        tokenizer_id: "test".into(),
        ids,
        source: FileKey { language: "Synthetic".into(), project: "p".into(), path: name.into() },
    }
}

fn random_ids(rng: &mut SplitMix64, len: usize, vocab: u64) -> Vec<u32> {
    (0..len).map(|_| rng.below(vocab) as u32).collect()
}

// 1. Engine perplexity with a full-length window against a direct
//    bigram computation over the whole history.
fn sliding_window_oracle() -> Check {
    const V: usize = 16;
    const K: f64 = 0.05;
    let start = Instant::now();
    let mut rng = SplitMix64::new(1);
    // Skewed training text so the model is far from uniform.
    let train: Vec<TokenSequence> = (0..60)
        .map(|i| {
            let mut ids = vec![rng.below(V as u64) as u32];
            for _ in 0..200 {
                let prev = *ids.last().unwrap();
                let next = if rng.next_f64() < 0.6 { (prev * 3 + 1) % V as u32 } else { rng.below(V as u64) as u32 };
                ids.push(next);
            }
            seq(ids, &format!("train{i}"))
        })
        .collect();
    let refs: Vec<&TokenSequence> = train.iter().collect();
    let model = ngram_train("bigram", &refs, 2, K, V).map_err(|e| e.to_string())?;

    let mut unigram = [0u64; V];
    let mut bigram: HashMap<(u32, u32), u64> = HashMap::new();
    let mut follows = [0u64; V];
    for s in &train {
        for (i, &t) in s.ids.iter().enumerate() {
            unigram[t as usize] += 1;
            if i > 0 {
                *bigram.entry((s.ids[i - 1], t)).or_default() += 1;
                follows[s.ids[i - 1] as usize] += 1;
            }
        }
    }
    let total: u64 = unigram.iter().sum();
    let prob = |prev: Option<u32>, t: u32| -> f64 {
        match prev {
            Some(p) if follows[p as usize] > 0 => {
                (*bigram.get(&(p, t)).unwrap_or(&0) as f64 + K) / (follows[p as usize] as f64 + K * V as f64)
            }
            _ => (unigram[t as usize] as f64 + K) / (total as f64 + K * V as f64),
        }
    };

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let len = 20 + rng.below(21) as usize;
        let ids = random_ids(&mut rng, len, V as u64);
        let w = sliding_window(&ids, &model, len, 1, 0, 7).map_err(|e| e.to_string())?;
        let engine = w.perplexity();
        let log_sum: f64 = (0..len)
            .map(|i| prob(if i == 0 { None } else { Some(ids[i - 1]) }, ids[i]).log2())
            .sum();
        let direct = (-log_sum / len as f64).exp2();
        worst = worst.max(rel_err(engine, direct));
    }
    ensure(worst <= 1e-9, || format!("max relative error {worst:e}"))?;
    within(start.elapsed(), 5)?;
    Ok(format!("100 sequences, max relative error {worst:.2e}, {:.2}s", start.elapsed().as_secs_f64()))
}

// 2. Uniform scorer gives the vocabulary size; a certain scorer gives 1.
fn uniform_law() -> Check {
    let mut rng = SplitMix64::new(2);
    let mut worst = 0.0f64;
    for v in [2usize, 16, 256] {
        let scorer = UniformScorer::new("uniform", v);
        for trial in 0..20 {
            let ctx = 1 + trial % 8;
            let len = 2 * ctx + rng.below(50) as usize;
            let ids = random_ids(&mut rng, len, v as u64);
            let w = sliding_window(&ids, &scorer, ctx, 1, ctx, 16).map_err(|e| e.to_string())?;
            worst = worst.max(rel_err(w.perplexity(), v as f64));
        }
    }
    ensure(worst <= 1e-12, || format!("uniform relative error {worst:e}"))?;
    let certain = FixedScorer::certain("certain", 16);
    let ids = random_ids(&mut rng, 64, 16);
    let p = sliding_window(&ids, &certain, 8, 1, 8, 16).map_err(|e| e.to_string())?.perplexity();
    ensure(p == 1.0, || format!("certain scorer perplexity {p}"))?;
    Ok(format!("V in {{2,16,256}} max relative error {worst:.1e}; certain scorer = {p}"))
}

// 3. Context sizes for median token counts of 170 and 329.
fn context_derivation() -> Check {
    let cands = [8, 16, 32, 64, 128, 256, 512];
    let a = configure_context(170.0, 1, &cands).map_err(|e| e.to_string())?;
    ensure(a.bound == 84 && a.ctx_size == 64, || format!("170 -> bound {} ctx {}", a.bound, a.ctx_size))?;
    let b = configure_context(329.0, 1, &cands).map_err(|e| e.to_string())?;
    ensure(b.ctx_size == 128, || format!("329 -> ctx {}", b.ctx_size))?;
    Ok(format!("170 -> bound {} ctx {}; 329 -> ctx {}", a.bound, a.ctx_size, b.ctx_size))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// `n(n^2-1) - 6 * sum d^2`; rho is this over `n(n^2-1)`.
fn spearman_num(a: &[usize], b: &[usize]) -> i64 {
    let n = a.len() as i64;
    let d2: i64 = a.iter().zip(b).map(|(&x, &y)| (x as i64 - y as i64).pow(2)).sum();
    n * (n * n - 1) - 6 * d2
}

/// Concordant minus discordant pairs.
fn kendall_s(a: &[usize], b: &[usize]) -> i64 {
    let mut s = 0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            s += ((a[i] as i64 - a[j] as i64) * (b[i] as i64 - b[j] as i64)).signum();
        }
    }
    s
}

struct BruteForce {
    rho: f64,
    p_rho: f64,
    tau: f64,
    p_tau: f64,
}

fn brute_force(a: &[usize], b: &[usize], perms: &[Vec<usize>]) -> BruteForce {
    let n = a.len() as i64;
    let (sr, sk) = (spearman_num(a, b), kendall_s(a, b));
    let (mut hit_r, mut hit_k) = (0u64, 0u64);
    for p in perms {
        let shuffled: Vec<usize> = p.iter().map(|&i| b[i]).collect();
        hit_r += u64::from(spearman_num(a, &shuffled).abs() >= sr.abs());
        hit_k += u64::from(kendall_s(a, &shuffled).abs() >= sk.abs());
    }
    BruteForce {
        rho: sr as f64 / (n * (n * n - 1)) as f64,
        p_rho: hit_r as f64 / perms.len() as f64,
        tau: sk as f64 / (n * (n - 1) / 2) as f64,
        p_tau: hit_k as f64 / perms.len() as f64,
    }
}

fn compare_rank_stats(a: &[usize], b: &[usize], perms: &[Vec<usize>]) -> Result<(), String> {
    let fa: Vec<f64> = a.iter().map(|&x| x as f64 + 1.0).collect();
    let fb: Vec<f64> = b.iter().map(|&x| x as f64 + 1.0).collect();
    let (rho, p_rho) = spearman(&fa, &fb).map_err(|e| e.to_string())?;
    let (tau, p_tau) = kendall(&fa, &fb).map_err(|e| e.to_string())?;
    let want = brute_force(a, b, perms);
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    ensure(
        close(rho, want.rho) && close(p_rho, want.p_rho) && close(tau, want.tau) && close(p_tau, want.p_tau),
        || {
            format!(
                "{a:?} vs {b:?}: got rho {rho} p {p_rho} tau {tau} p {p_tau}, want rho {} p {} tau {} p {}",
                want.rho, want.p_rho, want.tau, want.p_tau
            )
        },
    )
}

// 4. Rank statistics against definitional brute force.
fn rank_statistics() -> Check {
    let start = Instant::now();
    let p4 = permutations(4);
    for a in &p4 {
        for b in &p4 {
            compare_rank_stats(a, b, &p4)?;
        }
    }
    let mut rng = SplitMix64::new(4);
    let all: Vec<Vec<Vec<usize>>> = (5..=8).map(permutations).collect();
    for _ in 0..200 {
        let n = 5 + rng.below(4) as usize;
        let perms = &all[n - 5];
        let a = &perms[rng.below(perms.len() as u64) as usize];
        let b = &perms[rng.below(perms.len() as u64) as usize];
        compare_rank_stats(a, b, perms)?;
    }
    let (rho, _) = spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).map_err(|e| e.to_string())?;
    let (tau, _) = kendall(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).map_err(|e| e.to_string())?;
    ensure(rho == 0.6 && tau == 1.0 / 3.0, || format!("fixture gave rho {rho} tau {tau}"))?;
    within(start.elapsed(), 10)?;
    Ok(format!("576 pairs n=4, 200 pairs n=5..8; rho={rho} tau={tau}; {:.2}s", start.elapsed().as_secs_f64()))
}

// 5. correlations.csv layout and the identical / reversed extremes.
fn correlation_table() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let langs = ["C", "Go", "Java", "Python", "Ruby", "Shell"];
    let mut scores = String::from("file,project,language,n_tokens,n_scored,perplexity\n");
    for (li, lang) in langs.iter().enumerate() {
        for f in 0..5 {
            let ppl = 2.0 + li as f64 + 0.1 * f as f64;
            scores.push_str(&format!("{lang}/f{f},proj{li},{lang},400,336,{ppl}\n"));
        }
    }
    let scores_path = dir.path().join("scores.csv");
    std::fs::write(&scores_path, scores).map_err(|e| e.to_string())?;
    let mut same = String::from("language,rank\n");
    let mut reversed = String::from("language,rank\n");
    for (i, lang) in langs.iter().enumerate() {
        same.push_str(&format!("{lang},{}\n", i + 1));
        reversed.push_str(&format!("{lang},{}\n", langs.len() - i));
    }
    let same_path = dir.path().join("same.csv");
    let reversed_path = dir.path().join("reversed.csv");
    std::fs::write(&same_path, same).map_err(|e| e.to_string())?;
    std::fs::write(&reversed_path, reversed).map_err(|e| e.to_string())?;

    let settings = AnalysisConfig { rankings: vec![same_path, reversed_path], ..Default::default() };
    let out = dir.path().join("report");
    let run = RunRecord::new("analyze", 13, &settings).map_err(|e| e.to_string())?;
    let inputs = [ScoresInput { label: Some("model".into()), path: scores_path }];
    pipeline::analyze(&inputs, &settings, &out, run).map_err(|e| e.to_string())?;

    let mut reader = csv::Reader::from_path(out.join("correlations.csv")).map_err(|e| e.to_string())?;
    let header: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    let expected = ["study", "model", "spearman_rho", "spearman_p", "kendall_tau", "kendall_p", "n_languages"];
    ensure(header == expected, || format!("header {header:?}"))?;
    let mut got = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| e.to_string())?;
        let num = |i: usize| row[i].parse::<f64>().map_err(|e| format!("{}: {e}", &row[i]));
        let (rho, p_rho, tau, p_tau) = (num(2)?, num(3)?, num(4)?, num(5)?);
        ensure((0.0..=1.0).contains(&p_rho) && (0.0..=1.0).contains(&p_tau), || format!("p out of range in {row:?}"))?;
        got.insert(row[0].to_string(), (rho, tau));
    }
    ensure(got.get("same") == Some(&(1.0, 1.0)), || format!("identical ranking gave {:?}", got.get("same")))?;
    ensure(got.get("reversed") == Some(&(-1.0, -1.0)), || format!("reversed ranking gave {:?}", got.get("reversed")))?;
    Ok("columns rho,p,tau,p present; identical -> (1, 1), reversed -> (-1, -1)".into())
}

fn codeppl(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_codeppl")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(out)
    } else {
        Err(format!("codeppl {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()))
    }
}

/// Runs curate, perplexity and analyze on the bundled corpus; returns the
/// perplexity and report directories.
fn full_run(out: &Path, scorer: Option<&str>) -> Result<(PathBuf, PathBuf), String> {
    let config = fixtures().join("codeppl.toml");
    let mut common = vec!["--config", config.to_str().unwrap(), "--seed", "13", "--out", out.to_str().unwrap()];
    if let Some(s) = scorer {
        common.extend(["--scorer", s]);
    }
    let with = |cmd: &str, extra: &[String]| {
        let mut v = vec![cmd.to_string()];
        v.extend(common.iter().map(|s| s.to_string()));
        v.extend(extra.iter().cloned());
        v
    };
    let run = |args: Vec<String>| codeppl(&args.iter().map(String::as_str).collect::<Vec<_>>());
    run(with("curate", &[]))?;
    run(with("perplexity", &[]))?;
    let ppl_dir = out.join("perplexity").join("header");
    let mut scores: Vec<String> = std::fs::read_dir(&ppl_dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("scores"))
        .map(|p| p.display().to_string())
        .collect();
    scores.sort();
    ensure(!scores.is_empty(), || "no scores files written".into())?;
    run(with("analyze", &scores))?;
    Ok((ppl_dir, out.join("report")))
}

// 6. Same seed, same bytes.
fn determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (pa, ra) = full_run(a.path(), None)?;
    let (pb, rb) = full_run(b.path(), None)?;
    let mut compared = Vec::new();
    let mut names: Vec<String> = std::fs::read_dir(&pa)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("scores"))
        .collect();
    names.sort();
    let mut pairs: Vec<(PathBuf, PathBuf)> = names.iter().map(|n| (pa.join(n), pb.join(n))).collect();
    pairs.push((ra.join("summary.csv"), rb.join("summary.csv")));
    for (x, y) in pairs {
        let bx = std::fs::read(&x).map_err(|e| format!("{}: {e}", x.display()))?;
        let by = std::fs::read(&y).map_err(|e| format!("{}: {e}", y.display()))?;
        ensure(bx == by, || format!("{} differs between runs", x.file_name().unwrap().to_string_lossy()))?;
        ensure(bx.len() > 100, || format!("{} is nearly empty", x.display()))?;
        compared.push(x.file_name().unwrap().to_string_lossy().into_owned());
    }
    let sample = std::fs::read_to_string(a.path().join("curate/sample.csv")).map_err(|e| e.to_string())?;
    let mut per_lang: BTreeMap<String, usize> = BTreeMap::new();
    let mut rdr = csv::Reader::from_reader(sample.as_bytes());
    let lang_col = rdr.headers().map_err(|e| e.to_string())?.iter().position(|h| h == "language").ok_or("no language column")?;
    for r in rdr.records() {
        *per_lang.entry(r.map_err(|e| e.to_string())?[lang_col].to_string()).or_default() += 1;
    }
    ensure(per_lang.len() >= 3 && per_lang.values().all(|&n| n >= 6), || format!("fixture sample too small: {per_lang:?}"))?;
    Ok(format!("{} identical ({} languages in sample)", compared.join(", "), per_lang.len()))
}

// Comment-free programs built from a small token alphabet, plus string
// literals whose contents are the grammar's own comment markers.
enum Tok {
    Word(String),
    Op(&'static str),
    Str(String),
}

struct Line {
    indent: usize,
    toks: Vec<Tok>,
}

const OPS: [&str; 12] = ["+", "-", "=", "(", ")", "{", "}", ";", ",", ".", ":", "*"];

fn word(rng: &mut SplitMix64) -> String {
    let len = 1 + rng.below(6) as usize;
    let mut w: String = (0..len).map(|_| (b'a' + rng.below(26) as u8) as char).collect();
    if rng.below(4) == 0 {
        w.push_str(&rng.below(100).to_string());
    }
    w
}

fn pick<'a, T>(rng: &mut SplitMix64, xs: &'a [T]) -> &'a T {
    &xs[rng.below(xs.len() as u64) as usize]
}

fn string_markers(g: &CommentGrammar) -> Vec<String> {
    let mut m: Vec<String> = g.line_comments.clone();
    for b in &g.block_comments {
        m.push(b.open.clone());
        m.push(b.close.clone());
    }
    m
}

fn string_literal(rng: &mut SplitMix64, g: &CommentGrammar) -> Option<String> {
    let simple: Vec<_> = g.strings.iter().filter(|s| s.open.len() == 1 && s.open == s.close).collect();
    if simple.is_empty() {
        return None;
    }
    let delim = pick(rng, &simple);
    let forbidden = |s: &str| s.contains(delim.close.as_str()) || delim.escape.is_some_and(|e| s.contains(e));
    let markers: Vec<String> = string_markers(g).into_iter().filter(|m| !forbidden(m)).collect();
    let mut body = String::new();
    for _ in 0..1 + rng.below(4) {
        if !markers.is_empty() && rng.below(2) == 0 {
            body.push_str(pick(rng, &markers));
        } else {
            body.push_str(&word(rng));
        }
        if rng.below(2) == 0 {
            body.push(' ');
        }
    }
    Some(format!("{}{body}{}", delim.open, delim.close))
}

fn program(rng: &mut SplitMix64, g: &CommentGrammar) -> Vec<Line> {
    (0..3 + rng.below(14))
        .map(|_| {
            if rng.below(8) == 0 {
                return Line { indent: 0, toks: vec![] };
            }
            let mut toks = vec![Tok::Word(word(rng))];
            for _ in 0..rng.below(9) {
                toks.push(match rng.below(6) {
                    0..=2 => Tok::Word(word(rng)),
                    3..=4 => Tok::Op(pick(rng, &OPS)),
                    _ => match string_literal(rng, g) {
                        Some(s) => Tok::Str(s),
                        None => Tok::Word(word(rng)),
                    },
                });
            }
            Line { indent: 2 * rng.below(3) as usize, toks }
        })
        .collect()
}

fn comment_text(rng: &mut SplitMix64) -> String {
    let mut t = word(rng);
    for _ in 0..rng.below(4) {
        t.push(' ');
        t.push_str(&word(rng));
        if rng.below(5) == 0 {
            t.push_str(pick(rng, &["'s", "\"q\"", " `x"]));
        }
    }
    t
}

/// The program rendered without comments and with randomly injected ones.
fn render(rng: &mut SplitMix64, g: &CommentGrammar, lines: &[Line], final_newline: bool) -> (String, String) {
    let blocks: Vec<_> = g.block_comments.iter().filter(|b| !b.line_start).collect();
    let anchored: Vec<_> = g.block_comments.iter().filter(|b| b.line_start).collect();
    let mut base = String::new();
    let mut injected = String::new();
    let last = lines.len() - 1;
    for (i, line) in lines.iter().enumerate() {
        // Whole comment lines before this one.
        for _ in 0..rng.below(2) {
            let indent = " ".repeat(2 * rng.below(3) as usize);
            match rng.below(3) {
                0 if !g.line_comments.is_empty() => {
                    let m = pick(rng, &g.line_comments);
                    injected.push_str(&format!("{indent}{m} {}\n", comment_text(rng)));
                }
                1 if !anchored.is_empty() => {
                    let b = *pick(rng, &anchored);
                    let open = if b.open == "=" { "=pod".to_string() } else { b.open.clone() };
                    injected.push_str(&format!("{open}\n{}\n{}\n{}\n", comment_text(rng), comment_text(rng), b.close));
                }
                _ if !blocks.is_empty() => {
                    let b = *pick(rng, &blocks);
                    let sep = if rng.below(2) == 0 { "\n" } else { " " };
                    injected.push_str(&format!("{indent}{} {}{sep}{} {}\n", b.open, comment_text(rng), comment_text(rng), b.close));
                }
                _ => {}
            }
        }

        let indent = " ".repeat(line.indent);
        base.push_str(&indent);
        injected.push_str(&indent);
        for (j, t) in line.toks.iter().enumerate() {
            if j > 0 {
                base.push(' ');
                let between_words = matches!(t, Tok::Word(_)) && matches!(line.toks[j - 1], Tok::Word(_));
                if between_words && !blocks.is_empty() && rng.below(4) == 0 {
                    let b = *pick(rng, &blocks);
                    injected.push_str(&format!("{}{}{}", b.open, comment_text(rng), b.close));
                } else {
                    injected.push(' ');
                }
            }
            let s = match t {
                Tok::Word(w) | Tok::Str(w) => w.as_str(),
                Tok::Op(o) => o,
            };
            base.push_str(s);
            injected.push_str(s);
        }
        if !line.toks.is_empty() && rng.below(3) == 0 {
            if !g.line_comments.is_empty() && (blocks.is_empty() || rng.below(2) == 0) {
                injected.push_str(&format!(" {} {}", pick(rng, &g.line_comments), comment_text(rng)));
            } else if !blocks.is_empty() {
                let b = *pick(rng, &blocks);
                injected.push_str(&format!(" {} {} {}", b.open, comment_text(rng), b.close));
            }
        }
        if i < last || final_newline {
            base.push('\n');
            injected.push('\n');
        }
    }
    (base, injected)
}

// 7. Comment stripping: idempotence, string safety, exact removal.
fn comment_stripping() -> Check {
    let grammars = GrammarSet::builtin();
    let langs: Vec<&str> = grammars.languages().collect();
    ensure(langs.len() == 14, || format!("{} grammars bundled", langs.len()))?;
    let mut rng = SplitMix64::new(7);
    let mut injected_total = 0usize;
    for n in 0..500 {
        let lang = langs[n % langs.len()];
        let g = grammars.get(lang).map_err(|e| e.to_string())?;
        let lines = program(&mut rng, g);
        let final_newline = rng.below(5) != 0;
        let (base, injected) = render(&mut rng, g, &lines, final_newline);
        let show = |what: &str, input: &str, got: &str, want: &str| {
            format!("{lang} program {n}: {what}\n--- input\n{input}\n--- got\n{got}\n--- want\n{want}")
        };

        let all_base = strip_all_comments(&base, g).text;
        ensure(all_base == base, || show("comment-free text changed", &base, &all_base, &base))?;
        // Header mode also drops leading blank lines.
        let head_base = strip_header_boilerplate(&base, g).text;
        let want = base.trim_start_matches('\n');
        ensure(head_base == want, || show("comment-free text changed (header)", &base, &head_base, want))?;

        let once = strip_all_comments(&injected, g).text;
        ensure(once == base, || show("injected comments not removed exactly", &injected, &once, &base))?;
        let twice = strip_all_comments(&once, g).text;
        ensure(twice == once, || show("not idempotent", &once, &twice, &once))?;
        let h1 = strip_header_boilerplate(&injected, g).text;
        let h2 = strip_header_boilerplate(&h1, g).text;
        ensure(h1 == h2, || show("header stripping not idempotent", &h1, &h2, &h1))?;
        injected_total += usize::from(injected != base);
    }
    Ok(format!("500 programs over {} grammars, {injected_total} with injected comments", langs.len()))
}

// 8. In-sample n-gram perplexity does not rise with more context.
fn monotone_context() -> Check {
    let mut seqs = Vec::new();
    for entry in walkdir_files(&fixtures().join("corpus")) {
        let bytes = std::fs::read(&entry).map_err(|e| e.to_string())?;
        if bytes.len() >= 128 {
            seqs.push(seq(bytes.iter().map(|&b| u32::from(b)).collect(), &entry.display().to_string()));
        }
    }
    let refs: Vec<&TokenSequence> = seqs.iter().collect();
    let model = ngram_train("in-sample", &refs, 33, 1e-6, 256).map_err(|e| e.to_string())?;
    let mut medians = Vec::new();
    for ctx in [8usize, 16, 32] {
        let mut ppl: Vec<f64> = Vec::new();
        for s in &seqs {
            // Same scored positions for every context size.
            let w = sliding_window(&s.ids, &model, ctx, 1, 32, 256).map_err(|e| e.to_string())?;
            ppl.push(w.perplexity());
        }
        medians.push(codeppl::analysis::median(&ppl).ok_or("no files")?);
    }
    for w in medians.windows(2) {
        ensure(w[1] <= w[0] * (1.0 + 1e-9), || format!("medians {medians:?} rise with context"))?;
    }
    Ok(format!("{} files, median perplexity at ctx 8/16/32: {:.6} / {:.6} / {:.6}", seqs.len(), medians[0], medians[1], medians[2]))
}

fn walkdir_files(root: &Path) -> Vec<PathBuf> {
    walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .collect()
}

// 9. Desk-scale substitute for the headline ranking.
fn smoke_run() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (_, report) = full_run(dir.path(), Some("trigram"))?;

    let mut rdr = csv::Reader::from_path(report.join("ranking.csv")).map_err(|e| e.to_string())?;
    let header: Vec<String> = rdr.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    ensure(header == ["model", "rank", "language", "median"], || format!("ranking header {header:?}"))?;
    let mut ranks = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for r in rdr.records() {
        let r = r.map_err(|e| e.to_string())?;
        let median: f64 = r[3].parse().map_err(|e| format!("median {}: {e}", &r[3]))?;
        ensure(median.is_finite() && median >= 1.0 && median >= prev, || format!("bad ranking row {r:?}"))?;
        prev = median;
        ranks.push(r[1].parse::<usize>().map_err(|e| e.to_string())?);
    }
    ensure(ranks.len() >= 3 && ranks == (1..=ranks.len()).collect::<Vec<_>>(), || format!("ranks {ranks:?}"))?;

    let svg = std::fs::read_to_string(report.join("boxplot.svg")).map_err(|e| e.to_string())?;
    ensure(svg.starts_with("<svg") || svg.starts_with("<?xml"), || "boxplot.svg has no svg root".into())?;
    ensure(svg.trim_end().ends_with("</svg>") && svg.contains("<rect"), || "boxplot.svg is incomplete".into())?;

    let run: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(report.join("run.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    ensure(run["seed"] == 13 && run["command"] == "analyze", || format!("run.json: {run}"))?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "trigram half/half run ranked {} languages in {:.1}s (rankings from large models on large corpora are not reproduced at this scale)",
        ranks.len(),
        start.elapsed().as_secs_f64()
    ))
}

// 10. Wire protocol against the bundled mock scorer.
fn wire_protocol() -> Check {
    let mock = MockScorer::load(&fixtures().join("mock_scorer.json")).map_err(|e| e.to_string())?;
    let expected = mock.log2p.clone();
    let server = MockServer::spawn(mock).map_err(|e| e.to_string())?;
    let report = pipeline::protocol_check(&server.endpoint()).map_err(|e| e.to_string())?;
    ensure(report.info.vocab_size == 256, || format!("info vocab_size {}", report.info.vocab_size))?;
    let steps: Vec<&str> = report.steps.iter().map(|s| s.name).collect();
    for need in ["info", "tokenize", "score_batch"] {
        ensure(steps.contains(&need), || format!("protocol-check skipped {need}: {steps:?}"))?;
    }

    let client = ScorerClient::connect(&server.endpoint()).map_err(|e| e.to_string())?;
    let ids = client.tokenize("int main()").map_err(|e| e.to_string())?;
    ensure(ids == b"int main()".iter().map(|&b| u32::from(b)).collect::<Vec<_>>(), || format!("tokenize gave {ids:?}"))?;
    let windows: Vec<Window> = (0..16).map(|t| Window { context: vec![1, 2, 3], target: t }).collect();
    let got = client.score_batch(&windows).map_err(|e| e.to_string())?;
    let want: Vec<f64> = (0..16).map(|t| expected[t % expected.len()]).collect();
    ensure(got == want, || format!("score_batch replayed {got:?}, fixture {want:?}"))?;
    drop(client);

    let bad = MockScorer::load(&fixtures().join("mock_misaligned.json")).map_err(|e| e.to_string())?;
    let bad_server = MockServer::spawn(bad).map_err(|e| e.to_string())?;
    match pipeline::protocol_check(&bad_server.endpoint()) {
        Ok(_) => return Err("misaligned scorer passed protocol-check".into()),
        Err(e) => {
            let misaligned = matches!(e.source.downcast_ref::<ProtocolError>(), Some(ProtocolError::Misaligned { .. }));
            ensure(misaligned, || format!("misaligned scorer rejected with an unexpected error: {e}"))?;
        }
    }

    // Same through the command line with a stdio endpoint.
    let bin = env!("CARGO_BIN_EXE_codeppl");
    let good = format!("exec:{bin} mock-scorer {}", fixtures().join("mock_scorer.json").display());
    codeppl(&["protocol-check", "--scorer", &good])?;
    let bad = format!("exec:{bin} mock-scorer {}", fixtures().join("mock_misaligned.json").display());
    let out = Command::new(bin).args(["protocol-check", "--scorer", &bad]).output().map_err(|e| e.to_string())?;
    ensure(!out.status.success(), || "CLI accepted the misaligned scorer".into())?;
    Ok("info, tokenize and score_batch validated over tcp and stdio; misaligned reply rejected".into())
}

fn main() {
    let checks: [Criterion; 10] = [
        ("sliding-window oracle equivalence", sliding_window_oracle),
        ("uniform-scorer law", uniform_law),
        ("context-size derivation", context_derivation),
        ("rank statistics vs brute force", rank_statistics),
        ("correlation table format", correlation_table),
        ("determinism", determinism),
        ("comment stripping properties", comment_stripping),
        ("monotone context", monotone_context),
        ("n-gram smoke run", smoke_run),
        ("wire-protocol conformance", wire_protocol),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
