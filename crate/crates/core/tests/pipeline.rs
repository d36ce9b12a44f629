use std::path::{Path, PathBuf};
use std::process::Command;

use codeppl::clean::CleanMode;
use codeppl::config::{Overrides, RunConfig};
use codeppl::pipeline::{self, ScoresInput};
use codeppl::report::{read_scores, RunRecord};

fn fixture_config(out: &Path, o: Overrides) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/codeppl.toml");
    let mut cfg = RunConfig::load(&path).unwrap();
    cfg.apply(&Overrides { out: Some(out.to_path_buf()), ..o }).unwrap();
    cfg
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_codeppl"))
}

#[test]
fn curate_reports_the_funnel_and_a_balanced_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture_config(dir.path(), Overrides::default());
    let out = pipeline::cmd_curate(&cfg).unwrap();

    let counts: Vec<(&str, usize)> = out.funnel.iter().map(|s| (s.stage, s.count)).collect();
    assert_eq!(counts[0], ("manifest", 8));
    assert_eq!(counts[1], ("license", 7), "the MIT project is excluded");
    assert_eq!(counts[2], ("quality", 6), "the zero-star project is excluded");
    for pair in out.funnel.windows(2).filter(|w| w[0].unit == w[1].unit) {
        assert!(pair[1].count <= pair[0].count, "{:?}", out.funnel);
    }
    let dedup = out.funnel.iter().find(|s| s.stage == "dedup").unwrap().count;
    let classify = out.funnel.iter().find(|s| s.stage == "classify").unwrap().count;
    assert_eq!(classify - dedup, 1, "the vendored copy is a duplicate");

    assert_eq!(out.sample.len(), 32);
    let text = std::fs::read_to_string(&out.sample_csv).unwrap();
    for lang in ["C", "Java", "Python", "Shell"] {
        assert_eq!(text.lines().filter(|l| l.contains(&format!(",{lang},"))).count(), 8, "{lang}");
    }
    assert!(!text.contains("mit-widget") && !text.contains("lonely-repo"));
    let log = std::fs::read_to_string(dir.path().join("curate/curation.log")).unwrap();
    assert!(log.starts_with("manifest"));
}

#[test]
fn curate_sample_depends_on_the_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let s13 = pipeline::cmd_curate(&fixture_config(a.path(), Overrides::default())).unwrap();
    let s14 = pipeline::cmd_curate(&fixture_config(b.path(), Overrides { seed: Some(14), ..Default::default() })).unwrap();
    let keys = |o: &pipeline::CurateOutcome| o.sample.iter().map(|f| f.key()).collect::<Vec<_>>();
    assert_ne!(keys(&s13), keys(&s14));
}

#[test]
fn perplexity_honours_context_and_clean_mode_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = Overrides {
        ctx_size: Some(16),
        clean_mode: Some(CleanMode::AllCommentsStripped),
        scorer: Some("uniform".into()),
        ..Default::default()
    };
    let cfg = fixture_config(dir.path(), o);
    pipeline::cmd_curate(&cfg).unwrap();
    let out = pipeline::cmd_perplexity(&cfg).unwrap();
    assert_eq!(out.context.ctx_size, 16);
    assert_eq!(out.context.source, "override");
    assert!(out.out_dir.ends_with("perplexity/all_comments"), "{}", out.out_dir.display());

    let rows = read_scores(&out.out_dir.join("scores.csv")).unwrap();
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r.n_scored, r.n_tokens - 16);
        assert!((r.perplexity - 256.0).abs() < 1e-9);
    }
    let run = RunRecord::read(&out.out_dir.join("run.json")).unwrap();
    assert_eq!(run.command, "perplexity");
    assert_eq!(run.details["context"]["source"], "override");
    assert!(out.out_dir.join("token_stats.csv").exists());
}

#[test]
fn derived_context_fits_the_fixture_medians() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture_config(dir.path(), Overrides { scorer: Some("uniform".into()), ..Default::default() });
    pipeline::cmd_curate(&cfg).unwrap();
    let out = pipeline::cmd_perplexity(&cfg).unwrap();
    let derived = out.context.derived.expect("context derived from token medians");
    assert_eq!(out.context.source, "derived");
    assert!(2.0 * derived.ctx_size as f64 + 1.0 <= derived.min_median_tokens);
    assert_eq!(derived.ctx_size, 64, "largest fixture candidate");
}

#[test]
fn analyze_labels_inputs_and_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture_config(dir.path(), Overrides::default());
    pipeline::cmd_curate(&cfg).unwrap();
    let out = pipeline::cmd_perplexity(&cfg).unwrap();
    let inputs: Vec<ScoresInput> = ["trigram", "uniform"]
        .iter()
        .map(|id| format!("{id}={}", out.out_dir.join(format!("scores.{id}.csv")).display()).parse().unwrap())
        .collect();
    let bundle = pipeline::cmd_analyze(&cfg, &inputs, None).unwrap();
    assert_eq!(bundle.summaries.keys().collect::<Vec<_>>(), ["trigram", "uniform"]);
    let report = dir.path().join("report");
    for f in ["summary.csv", "ranking.csv", "correlations.csv", "pearson.csv", "parallel.csv", "boxplot.svg", "run.json"] {
        assert!(report.join(f).exists(), "{f} missing");
    }
    let corr = std::fs::read_to_string(report.join("correlations.csv")).unwrap();
    assert!(corr.lines().skip(1).all(|l| l.starts_with("popularity,")), "{corr}");
}

#[test]
fn analyze_rejects_duplicate_labels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture_config(dir.path(), Overrides { scorer: Some("uniform".into()), ..Default::default() });
    pipeline::cmd_curate(&cfg).unwrap();
    let out = pipeline::cmd_perplexity(&cfg).unwrap();
    let path: PathBuf = out.out_dir.join("scores.csv");
    let input = ScoresInput { label: Some("m".into()), path };
    let err = pipeline::cmd_analyze(&cfg, &[input.clone(), input], None).unwrap_err();
    assert!(err.to_string().contains("labelled"), "{err}");
}

#[test]
fn cli_reports_errors_with_nonzero_exit() {
    let out = bin().args(["curate", "--config", "/nonexistent/codeppl.toml"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = bin().args(["protocol-check", "--scorer", "no-such-scorer"]).env_remove("CODEPPL_SCORER_NO_SUCH_SCORER").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("CODEPPL_SCORER_NO_SUCH_SCORER"));
}

#[test]
fn cli_protocol_check_reads_the_endpoint_from_the_environment() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mock_scorer.json");
    let endpoint = format!("exec:{} mock-scorer {}", env!("CARGO_BIN_EXE_codeppl"), fixture.display());
    let out = bin()
        .args(["protocol-check", "--scorer", "mock"])
        .env("CODEPPL_SCORER_MOCK", endpoint)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("vocab_size=256"), "{stdout}");
}

#[test]
fn perplexity_with_an_external_scorer() {
    use codeppl::protocol::mock::{MockScorer, MockServer};

    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("external.toml");
    std::fs::write(
        &config,
        format!(
            r#"version = 1
manifest = "{}"
out_dir = "out"

[tokenizer]
kind = "byte"

[sample]
per_language = 6

[engine]
ctx_size = 16

[[scorer]]
id = "mock"
kind = "external"
connections = 2
"#,
            fixtures.join("manifest.csv").display()
        ),
    )
    .unwrap();
    let mock = MockScorer::load(&fixtures.join("mock_scorer.json")).unwrap();
    let server = MockServer::spawn(mock).unwrap();
    let endpoint = format!("tcp://{}", server.addr());
    let cfg = config.to_str().unwrap();

    let out = bin().args(["curate", "--config", cfg]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = bin()
        .args(["perplexity", "--config", cfg, "--workers", "2"])
        .env("CODEPPL_SCORER_MOCK", &endpoint)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = read_scores(&dir.path().join("out/perplexity/header/scores.csv")).unwrap();
    assert_eq!(rows.len(), 24);
    for r in &rows {
        // Replayed values lie in [-6, -0.5], so perplexity is bounded.
        assert!(r.perplexity > 2f64.powf(0.5) && r.perplexity < 64.0, "{r:?}");
        assert_eq!(r.n_scored, r.n_tokens - 16);
    }
}
