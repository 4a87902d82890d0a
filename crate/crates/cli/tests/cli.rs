use std::path::PathBuf;
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::{header, Request};
use dbpareto_cli::{canonical_json, router};
use dbpareto_core::Engine;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbpareto"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dbpareto-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

async fn api_pareto(body: &str) -> Value {
    let req = Request::post("/api/pareto")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = router(std::sync::Arc::new(Engine::builtin()))
        .oneshot(req)
        .await
        .unwrap();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    serde_json::from_slice(&bytes).unwrap()
}

#[tokio::test]
async fn cli_and_api_rows_agree() {
    for (y, protocols) in [
        ("2^-16", None),
        ("2^-64", None),
        ("0.5", Some("BC,SKI")),
        ("0", None),
    ] {
        let mut args = vec!["pareto", "--y", y, "--format", "json"];
        let body = match protocols {
            Some(p) => {
                args.extend(["--protocols", p]);
                let list: Vec<&str> = p.split(',').collect();
                serde_json::json!({"y": y, "protocols": list}).to_string()
            }
            None => serde_json::json!({"y": y}).to_string(),
        };
        let cli: Value = serde_json::from_str(&stdout(&args)).unwrap();
        let api = api_pareto(&body).await;
        assert_eq!(
            canonical_json(&cli["rows"]),
            canonical_json(&api["rows"]),
            "{y}"
        );
        assert_eq!(canonical_json(&cli), canonical_json(&api), "{y}");
    }
}

#[test]
fn pareto_single_protocol_without_filtering() {
    let csv = stdout(&["pareto", "--y", "1", "--protocols", "BC", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 1 + 256);
    let text = stdout(&["pareto", "--y", "1", "--protocols", "BC"]);
    assert!(text.contains("BC-{1} "));
    assert!(text.contains("members (256)"));
}

#[test]
fn report_writes_the_table() {
    let dir = scratch("report");
    let path = dir.join("table3.txt");
    let out = run(&[
        "report",
        "--y-list",
        "2^-1,2^-16,2^-32,2^-64,2^-96,2^-128",
        "--style",
        "table3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.matches("D[").count(), 6);
    assert!(text.contains("SKI-{219,3}"));
    let csv = stdout(&["report", "--y-list", "2^-16", "--format", "csv"]);
    assert!(csv.starts_with("y,id,n,"));
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    for args in [
        vec!["pareto", "--y", "2^-x"],
        vec!["pareto", "--y", "1.5"],
        vec!["pareto", "--y", "1", "--protocols", "Nope"],
        vec!["chart", "spider", "--instances", "BC-{16},Nope-{1}"],
        vec!["report", "--y-list", "2^-1", "--style", "table9"],
        vec![
            "report",
            "--y-list",
            "2^-1",
            "--output",
            "/nonexistent-dir/x.txt",
        ],
        vec!["curves", "--fraud", "bribery"],
        vec!["pareto", "--y", "1", "--format", "yaml"],
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn spider_and_curves() {
    let svg = stdout(&["chart", "spider", "--instances", "BC-{16},Tree-{16,8}"]);
    assert_eq!(svg.matches(r#"class="instance""#).count(), 2);
    let svg = stdout(&[
        "chart",
        "spider",
        "--instances",
        "SwissKnife-{128},SKI-{64,2}",
        "--normalize",
        "128",
    ]);
    assert_eq!(svg.matches(r#"class="instance""#).count(), 2);
    let csv = stdout(&["curves", "--fraud", "mafia", "--points", "32,64"]);
    assert_eq!(csv.lines().count(), 1 + 13 * 2);
    let svg = stdout(&["curves", "--fraud", "distance", "--svg"]);
    assert!(svg.starts_with("<svg"));
}

#[test]
fn generate_emits_every_instance() {
    let csv = stdout(&["generate"]);
    assert_eq!(csv.lines().count(), 1 + 29184);
    let json = stdout(&["generate", "--protocols", "TMA", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 256);
}

#[test]
fn config_file_restricts_and_overrides() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        "protocols = [\"BC\", \"SKI\"]\noutput_dir = \"".to_string()
            + dir.to_str().unwrap()
            + "\"\n\n[constants]\ndelta = 64\nsigma = 64\nmemory_tolerance = 2048\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let csv = stdout(&["--config", cfg, "generate"]);
    assert_eq!(csv.lines().count(), 1 + 256 + 7936);
    assert!(csv.contains("BC-{16},BC,16,,,,,-16,-16,0,32,2,224,"));
    let out = run(&[
        "--config", cfg, "pareto", "--y", "2^-16", "--output", "p.txt",
    ]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(dir.join("p.txt"))
        .unwrap()
        .contains("SKI-{39,2}"));

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "colour = \"red\"\n").unwrap();
    let out = run(&["--config", bad.to_str().unwrap(), "generate"]);
    assert!(!out.status.success());
    std::fs::write(&bad, "[constants]\ndelta = 0\n").unwrap();
    assert!(!run(&["--config", bad.to_str().unwrap(), "generate"])
        .status
        .success());
    assert!(!run(&["--config", "/nonexistent.toml", "generate"])
        .status
        .success());
}

#[test]
fn verify_passes_on_this_build() {
    let out = run(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        20 + 24
    );
    assert!(!text.contains("FAIL"));
}
