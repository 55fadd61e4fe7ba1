use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use co2st_core::catalog::Catalog;
use co2st_core::ledger::Ledger;
use co2st_core::report;

const NOW: &str = "2026-03-02T10:00:00Z";

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn co2st(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_co2st"))
        .args(args)
        .env("CO2ST_NOW", NOW)
        .env_remove("CO2ST_CONFIG")
        .env_remove("CO2ST_CATALOG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn assert_golden(args: &[&str], golden: &str) {
    let out = co2st(args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let expected = std::fs::read(fixture(golden)).unwrap();
    assert!(
        out.stdout == expected,
        "{golden} differs:\n{}",
        stdout(&out)
    );
}

#[test]
fn models_golden() {
    assert_golden(&["models"], "models.golden");
    let out = stdout(&co2st(&["models"]));
    assert!(out.lines().any(|l| l.starts_with("text-to-text 0.004685 ")));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 13);
}

#[test]
fn report_goldens() {
    let ledger = fixture("three_entries.json");
    let ledger = ledger.to_str().unwrap();
    assert_golden(
        &["report", "--ledger", ledger, "--format", "text"],
        "report_text.golden",
    );
    assert_golden(
        &["report", "--ledger", ledger, "--format", "ethics"],
        "report_ethics.golden",
    );
    let empty = fixture("empty.json");
    assert_golden(
        &["report", "--ledger", empty.to_str().unwrap()],
        "report_empty.golden",
    );
}

#[test]
fn phases_lists_seven() {
    let out = co2st(&["phases"]);
    assert_eq!(stdout(&out).lines().count(), 7);
}

#[test]
fn transcription_estimate() {
    let out = co2st(&[
        "estimate",
        "--phase",
        "data-collection",
        "--kind",
        "transcription",
        "--param",
        "minutes=90",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("C = 2.742e-4 kg\n"));
    assert!(out.stderr.is_empty());
}

#[test]
fn machine_estimate_parses() {
    let out = co2st(&[
        "estimate",
        "--phase",
        "data-collection",
        "--kind",
        "transcription",
        "--param",
        "minutes=90",
        "--format",
        "machine",
    ]);
    let est: co2st_core::Estimate = serde_json::from_slice(&out.stdout).unwrap();
    let expected = 90.0 * 0.006335 / 1000.0 * 0.481;
    assert!((est.carbon.value() - expected).abs() <= 1e-12 * expected);
}

#[test]
fn locked_kind_rejects_other_model() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("l.json");
    let out = co2st(&[
        "add",
        "--ledger",
        ledger.to_str().unwrap(),
        "--phase",
        "prototyping-building",
        "--kind",
        "customized-chatbot",
        "--model",
        "text-to-image",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1);
    assert!(
        err.contains("`task`") && err.contains("text-to-text"),
        "{err}"
    );
    assert!(!ledger.exists());
}

#[test]
fn validation_failures_exit_one_naming_field() {
    let cases: [(&[&str], &str); 5] = [
        (
            &[
                "estimate",
                "--phase",
                "data-collection",
                "--kind",
                "transcription",
            ],
            "minutes",
        ),
        (
            &[
                "estimate",
                "--phase",
                "data-collection",
                "--kind",
                "transcription",
                "--param",
                "minutes=-1",
            ],
            "minutes",
        ),
        (
            &[
                "estimate",
                "--phase",
                "data-collection",
                "--kind",
                "transcription",
                "--param",
                "minutes=x",
            ],
            "minutes",
        ),
        (
            &["estimate", "--phase", "nowhere", "--kind", "transcription"],
            "phase",
        ),
        (&["kinds", "--phase", "nowhere"], "phase"),
    ];
    for (args, field) in cases {
        let out = co2st(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = stderr(&out);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.contains(field), "{err}");
    }
}

#[test]
fn unknown_flags_are_errors() {
    let out = co2st(&["models", "--verbose"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--verbose"));
    assert_eq!(stderr(&out).lines().count(), 1);
}

#[test]
fn file_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = co2st(&["report", "--ledger", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    let out = co2st(&["report", "--ledger", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));

    let out = co2st(&["--config", missing.to_str().unwrap(), "models"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn add_and_remove_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("project.json");
    let p = path.to_str().unwrap();
    let catalog = Catalog::builtin();
    let mut ids = Vec::new();
    for (i, args) in [
        vec![
            "--phase",
            "research-planning",
            "--kind",
            "literature-review",
            "--param",
            "article_count=10",
        ],
        vec![
            "--phase",
            "dissemination-communication",
            "--kind",
            "figure-generation",
            "--model",
            "text-to-image",
            "--param",
            "generation_count=4",
            "--param",
            "image_width=2048",
            "--note",
            "cover art",
        ],
        vec![
            "--phase",
            "training-fine-tuning",
            "--kind",
            "fine-tuning",
            "--param",
            "gpu_hours=3",
        ],
    ]
    .into_iter()
    .enumerate()
    {
        let mut full = vec!["add", "--ledger", p];
        full.extend(args);
        let out = co2st(&full);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        ids.push(stdout(&out).trim().to_string());
        let ledger = Ledger::load(&path).unwrap();
        assert_eq!(ledger.entries.len(), i + 1);
        ledger.validate(&catalog).unwrap();
    }
    assert!(!dir.path().join("project.json.lock").exists());

    let out = co2st(&["remove", "--ledger", p, "--id", &ids[1]]);
    assert_eq!(out.status.code(), Some(0));
    let ledger = Ledger::load(&path).unwrap();
    assert_eq!(ledger.entries.len(), 2);
    assert!(ledger.get(&ids[1]).is_none());

    let out = co2st(&["remove", "--ledger", p, "--id", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn machine_report_recomputes_to_same_totals() {
    let path = fixture("three_entries.json");
    let out = co2st(&[
        "report",
        "--ledger",
        path.to_str().unwrap(),
        "--format",
        "machine",
    ]);
    let parsed = report::parse_machine(&stdout(&out)).unwrap();
    let ledger = Ledger::load(&path).unwrap();
    let total = ledger
        .total(&Catalog::builtin(), &Default::default())
        .unwrap();
    assert_eq!(parsed.total.energy, total.energy);
    assert_eq!(parsed.total.carbon, total.carbon);
    assert_eq!(parsed.total.equivalencies, total.equivalencies);
    assert_eq!(parsed.assumptions, total.assumptions);
    assert_eq!(parsed.per_entry.len(), 3);
}

#[test]
fn config_file_changes_intensity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{ "carbon_intensity": 0.1 }"#).unwrap();
    let out = co2st(&[
        "--config",
        cfg.to_str().unwrap(),
        "estimate",
        "--phase",
        "data-collection",
        "--kind",
        "transcription",
        "--param",
        "minutes=1000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    // 1000 min * 6.335e-6 kWh * 0.1
    assert!(stdout(&out).contains("C = 6.335e-4 kg"), "{}", stdout(&out));

    std::fs::write(&cfg, r#"{ "carbon_intensity": -1 }"#).unwrap();
    let out = co2st(&["--config", cfg.to_str().unwrap(), "phases"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_default_config_loads() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.json");
    let out = co2st(&[
        "--config",
        path.to_str().unwrap(),
        "estimate",
        "--phase",
        "data-collection",
        "--kind",
        "transcription",
        "--param",
        "minutes=90",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("C = 2.742e-4 kg"));
}

#[test]
fn catalog_overlay_rejects_energy_override() {
    let dir = tempfile::tempdir().unwrap();
    let overlay = dir.path().join("overlay.json");
    std::fs::write(
        &overlay,
        r#"{ "format_version": 1, "catalog": { "energy_per_unit_wh": { "text-to-text": 1.0 } } }"#,
    )
    .unwrap();
    let out = co2st(&["--catalog", overlay.to_str().unwrap(), "models"]);
    assert_eq!(out.status.code(), Some(2));
}
