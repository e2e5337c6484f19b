//! Pinned verdicts for every catalog entry.

use std::collections::BTreeSet;

use pndp::cli::{catalog_ids, catalog_manifest, run, RunOptions};

struct Pin {
    id: &'static str,
    status: i32,
    /// `(check, pass)` in run order.
    checks: &'static [(&'static str, bool)],
    findings: &'static [&'static str],
}

const PINS: &[Pin] = &[
    Pin { id: "euclidean3", status: 0, checks: &[("curvature", true), ("einstein", true)], findings: &[] },
    Pin { id: "polar_plane", status: 0, checks: &[("curvature", true), ("einstein", true)], findings: &[] },
    Pin { id: "sphere2", status: 0, checks: &[("curvature", true), ("einstein", true)], findings: &[] },
    Pin { id: "hyperbolic_plane", status: 0, checks: &[("curvature", true), ("einstein", true)], findings: &[] },
    Pin { id: "polar_perturbed", status: 0, checks: &[("curvature", true), ("einstein", true)], findings: &[] },
    Pin {
        id: "example1",
        status: 0,
        checks: &[("curvature", true), ("einstein", true), ("blocks", true), ("pndp", true)],
        findings: &[],
    },
    Pin {
        id: "example2",
        status: 0,
        checks: &[("einstein", true), ("blocks", true), ("pndp", true)],
        findings: &[],
    },
    Pin {
        id: "example2_nonconstant",
        status: 1,
        checks: &[("blocks", true), ("pndp", false)],
        findings: &["pndp-system-failed", "flat-warp-forces-constant"],
    },
    Pin {
        id: "example2_verbatim",
        status: 1,
        checks: &[("pndp", false)],
        findings: &["definition-item-c", "fiber-sign-positive"],
    },
    Pin { id: "example3", status: 0, checks: &[("pndp", true)], findings: &[] },
    Pin { id: "example4", status: 0, checks: &[("blocks", true), ("pndp", true)], findings: &[] },
    Pin {
        id: "example4_nonconstant",
        status: 1,
        checks: &[("pndp", false)],
        findings: &["pndp-system-failed", "flat-warp-forces-constant"],
    },
    Pin {
        id: "example5",
        status: 0,
        checks: &[("blocks", true), ("pndp", true)],
        findings: &["scalar-system-not-einstein", "arithmetic-slip"],
    },
    Pin {
        id: "example5_verbatim",
        status: 0,
        checks: &[("pndp", true)],
        findings: &["scalar-system-not-einstein", "arithmetic-slip", "claim-mismatch"],
    },
    Pin { id: "example6", status: 0, checks: &[("pndp", true)], findings: &[] },
    Pin { id: "example7", status: 0, checks: &[("pndp", true)], findings: &[] },
    Pin { id: "example8", status: 0, checks: &[("pndp", true)], findings: &[] },
    Pin { id: "block_sphere", status: 0, checks: &[("blocks", true)], findings: &[] },
    Pin { id: "block_hyperbolic", status: 0, checks: &[("blocks", true)], findings: &[] },
    Pin {
        id: "block_tilde_warp",
        status: 1,
        checks: &[("blocks", false)],
        findings: &["tilde-warp-terms-omitted"],
    },
    Pin {
        id: "pointlike_spacetime",
        status: 0,
        checks: &[("curvature", true), ("einstein", true), ("spacetime", true)],
        findings: &[],
    },
    Pin {
        id: "pointlike_spacetime_n4",
        status: 0,
        checks: &[("einstein", true), ("spacetime", true)],
        findings: &[],
    },
    Pin {
        id: "schwarzschild_wormhole",
        status: 0,
        checks: &[("wormhole", true)],
        findings: &["phi-domain", "shape-function-constant"],
    },
    Pin {
        id: "schwarzschild_wormhole_alt",
        status: 0,
        checks: &[("wormhole", true)],
        findings: &["shape-function-constant"],
    },
    Pin { id: "throat_wormhole", status: 0, checks: &[("wormhole", true)], findings: &[] },
    Pin { id: "cone", status: 1, checks: &[("wormhole", false)], findings: &["no-throat"] },
    Pin {
        id: "graphene_wormhole",
        status: 0,
        checks: &[("curvature", true), ("spacetime", true)],
        findings: &[],
    },
    Pin { id: "m_pndp", status: 0, checks: &[("einstein", true), ("pndp", true)], findings: &[] },
];

#[test]
fn every_entry_is_pinned() {
    let pinned: BTreeSet<&str> = PINS.iter().map(|p| p.id).collect();
    let listed: BTreeSet<&str> = catalog_ids().collect();
    assert_eq!(pinned, listed);
}

#[test]
fn catalog_verdicts_match_pins() {
    for pin in PINS {
        let report = run(&catalog_manifest(pin.id).unwrap(), &RunOptions::default());
        let checks: Vec<(&str, bool)> = report.checks.iter().map(|c| (c.name.as_str(), c.pass)).collect();
        assert_eq!(checks, pin.checks, "{}", pin.id);
        assert_eq!(report.status, pin.status, "{}", pin.id);
        let codes: BTreeSet<&str> = report.findings.iter().map(|f| f.code.as_str()).collect();
        let want: BTreeSet<&str> = pin.findings.iter().copied().collect();
        assert_eq!(codes, want, "{}", pin.id);
    }
}

#[test]
fn status_is_zero_iff_every_check_passes() {
    for id in catalog_ids() {
        let r = run(&catalog_manifest(id).unwrap(), &RunOptions::default());
        assert_eq!(r.status == 0, r.checks.iter().all(|c| c.pass), "{id}");
    }
}

#[test]
fn verbatim_schwarzschild_always_has_findings() {
    let r = run(&catalog_manifest("schwarzschild_wormhole").unwrap(), &RunOptions::default());
    assert!(!r.findings.is_empty());
}

#[test]
fn projection_targets() {
    let target = |id: &str| {
        let r = run(&catalog_manifest(id).unwrap(), &RunOptions::default());
        r.check("pndp").unwrap().detail["descriptor"]["projection_target"].clone()
    };
    assert_eq!(target("example6")["kind"], "einstein_factor");
    assert_eq!(target("example6")["dim"], 2);
    assert_eq!(target("example7")["kind"], "point");
    assert_eq!(target("example8")["kind"], "desuspension");
    assert_eq!(target("example8")["order"], -1);
    assert_eq!(target("example4")["dim"], 3);
    assert_eq!(target("example4")["coords"], serde_json::json!(["y4", "y5", "y6"]));
    assert_eq!(target("example5")["dim"], 4);
    assert_eq!(target("example5")["flat"], false);
    assert_eq!(target("example5")["lambda"], -1.0);
    assert_eq!(target("m_pndp")["kind"], "point");
}

#[test]
fn example5_assembled_scalar_matches_lambda_times_dim() {
    let r = run(&catalog_manifest("example5").unwrap(), &RunOptions::default());
    let a = &r.check("pndp").unwrap().detail["assembled"];
    assert_eq!(a["lambda"], "not Einstein");
    let scalar = a["scalar_at_midpoint"].as_f64().unwrap();
    assert!((scalar - -12.0).abs() < 1e-9, "{scalar}");
}

#[test]
fn schwarzschild_embedding_table_has_header() {
    let r = run(&catalog_manifest("schwarzschild_wormhole").unwrap(), &RunOptions::default());
    let table = r.check("wormhole").unwrap().detail["embedding_table"].as_str().unwrap().to_string();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("# r xi(r)"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(' ').map(|v| v.parse().unwrap()).collect()).collect();
    assert!(rows.len() >= 16);
    for row in rows {
        // Flamm paraboloid, M = 1
        assert!((row[1] - (8.0 * (row[0] - 2.0)).sqrt()).abs() < 1e-8);
    }
}

#[test]
fn seed_override_is_recorded() {
    let m = catalog_manifest("sphere2").unwrap();
    let r = run(&m, &RunOptions { seed: Some(7), ..RunOptions::default() });
    assert_eq!(r.seed, 7);
    assert!(r.manifest_digest.starts_with("sha256:"));
    assert_eq!(r.manifest_digest.len(), "sha256:".len() + 64);
}
