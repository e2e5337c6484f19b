use std::process::{Command, Output};

use pndp::cli::catalog_source;

fn pndp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pndp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_every_entry() {
    let o = pndp(&["catalog", "list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["example1", "example8", "m_pndp", "graphene_wormhole"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}

#[test]
fn export_round_trips() {
    let o = pndp(&["catalog", "export", "example1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), catalog_source("example1").unwrap());
}

#[test]
fn unknown_entry_exits_2() {
    let o = pndp(&["catalog", "run", "example99"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown catalog entry"));
}

#[test]
fn exit_status_follows_verdicts() {
    assert_eq!(pndp(&["catalog", "run", "example1"]).status.code(), Some(0));
    assert_eq!(pndp(&["catalog", "run", "cone"]).status.code(), Some(1));
}

#[test]
fn verify_json_report() {
    let dir = std::env::temp_dir().join(format!("pndp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sphere.toml");
    std::fs::write(&path, catalog_source("sphere2").unwrap()).unwrap();
    let o = pndp(&["verify", path.to_str().unwrap(), "--seed", "3", "--samples", "5", "--report", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], 0);
    assert_eq!(v["seed"], 3);
    assert!(v["manifest_digest"].as_str().unwrap().starts_with("sha256:"));
    assert_eq!(v["checks"][1]["detail"]["lambda"], 1.0);
    assert!(v["findings"].as_array().unwrap().is_empty());

    std::fs::write(&path, "id = \"broken\"\nchecks = []\n").unwrap();
    let o = pndp(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_report_lists_findings() {
    let text = stdout(&pndp(&["catalog", "run", "schwarzschild_wormhole"]));
    assert!(text.contains("[PASS] wormhole"));
    assert!(text.contains("finding phi-domain"));
    assert!(text.ends_with("status: 0\n"));
}

#[test]
fn embed_prints_two_columns() {
    let o = pndp(&["embed", "throat_wormhole"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# r xi(r)"));
    for l in lines {
        let cols: Vec<f64> = l.split(' ').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 2);
        assert!((cols[1] - (cols[0] * cols[0] - 1.0).sqrt()).abs() < 1e-8);
    }
    assert_eq!(pndp(&["embed", "example1"]).status.code(), Some(2));
}
