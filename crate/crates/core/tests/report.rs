use std::f64::consts::PI;

use l2ext_core::radial::disc_mass;
use l2ext_core::report::{emit, run_with, to_csv, to_json, OutputFormat, Pipeline, Strictness, CSV_HEADER, TOL_CHAIN};
use l2ext_core::{run, sweep_c, CertificateProvenance, Error, QuadratureSpec, RadialProfile, RunConfig};

fn config(text: &str) -> RunConfig {
    RunConfig::from_json(text).unwrap()
}

const SMALL: &str = r#""solver": {"n_xy": 24, "n_t": 24}, "bergman": {"n_start": 4, "n_max": 32}, "certificate_samples": 100, "levi_samples": 100"#;

fn tilted(domain: &str) -> RunConfig {
    config(&format!(
        r#"{{"domain": {domain}, "weight": {{"kind": "quadratic", "alpha": 1.0, "center": [0.4, 0.0]}}, {SMALL}}}"#
    ))
}

#[test]
fn zero_weight_chain_collapses_to_the_disc_area() {
    let cfg = config(r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "zero"}, "certificate": "pullback"}"#);
    let r = run(&cfg).unwrap();
    for v in [r.m, r.s, r.o] {
        assert!((v - PI).abs() < 1e-6, "{r:?}");
    }
    assert!(r.chain_ok);
    assert_eq!(r.provenance, CertificateProvenance::Pullback);
    assert_eq!(r.strictness, Strictness::NotApplicable);
    assert!(!r.strict_ok);
    assert!(r.pullback.as_ref().unwrap().certificate.all_ok);
    assert!(r.ma.is_none() && r.radial.is_none());
    assert!(r.tol_chain >= TOL_CHAIN);
}

#[test]
fn radial_chain_uses_the_closed_form() {
    let cfg = config(
        r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "radial", "profile": {"family": "power", "p": 1.0}}}"#,
    );
    assert_eq!(cfg.pipeline(), Pipeline::Radial);
    let r = run(&cfg).unwrap();
    let mass = disc_mass(&RadialProfile::power(1.0), &QuadratureSpec::default()).unwrap().value;
    assert!((r.s - 0.878_803_253_6).abs() < 1e-8, "{}", r.s);
    assert!((r.m - mass).abs() < 1e-8);
    assert!(r.margins.s_minus_m.abs() < 1e-8);
    assert!(r.chain_ok && r.s < r.o);
    assert_eq!(r.provenance, CertificateProvenance::RadialClosedForm);
    let sec = r.radial.unwrap();
    assert!(sec.identity.rel_err < 1e-8 && sec.certificate.all_ok);
    assert!(sec.ma_oracle.is_none());
}

#[test]
fn both_pipelines_attach_the_solver_oracle() {
    let cfg = config(&format!(
        r#"{{"domain": {{"kind": "unit_disc"}}, "weight": {{"kind": "radial", "profile": {{"family": "power", "p": 1.0}}}}, "pipeline": "both", {SMALL}}}"#
    ));
    let r = run(&cfg).unwrap();
    let oracle = r.radial.unwrap().ma_oracle.unwrap();
    assert!((oracle.deviation - (oracle.s.value - r.s)).abs() < 1e-15);
    assert!(oracle.diagnostics.final_change <= cfg.solver.tol);
}

#[test]
fn ma_run_reports_every_stage() {
    let cfg = tilted(r#"{"kind": "unit_disc"}"#);
    let out = run_with(&cfg, None, None).unwrap();
    let r = &out.report;
    let sec = r.ma.as_ref().unwrap();
    assert_eq!(r.c, Some(-4.0));
    assert_eq!(r.provenance, CertificateProvenance::MaSolution { c: -4.0 });
    assert!(sec.c_validity < 0.0);
    assert!(sec.levi.as_ref().unwrap().min_eig > 0.5);
    assert!(sec.minorant_margin >= -sec.tol_cmp);
    assert_eq!(r.s, sec.sharper.value);
    assert_eq!(r.strictness, Strictness::Strict);
    assert!(r.s + r.s_err < r.o);
    assert!(out.solution.is_some());
    assert_eq!(r.o, PI);
    assert_eq!(r.chain_ok, r.m <= r.s + r.tol_chain && r.s <= r.o + r.tol_chain);
}

#[test]
fn configuration_errors_are_reported_before_numerics() {
    let bad = [
        r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "zero"}, "solver": {"C": 1.0}}"#,
        r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "zero"}, "solver": {"n_xy": 8}}"#,
        r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "zero"}, "pipeline": "radial"}"#,
        r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "zero"}, "bergman": {"n_start": 64, "n_max": 8}}"#,
    ];
    for text in bad {
        let err = run(&config(text)).unwrap_err();
        assert!(matches!(err, Error::Stage { .. } | Error::Config(_)), "{text}: {err}");
        assert!(err.to_string().contains("config"), "{err}");
    }
    assert!(matches!(RunConfig::from_json(r#"{"domain": {"kind": "unit_disc"}}"#), Err(Error::Config(_))));
    assert!(matches!(RunConfig::from_json("not json"), Err(Error::Config(_))));
}

#[test]
fn outputs_are_written_and_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tilted(r#"{"kind": "unit_disc"}"#);
    let out = run_with(&cfg, None, None).unwrap();
    let formats =
        [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Fibre, OutputFormat::Ladder, OutputFormat::Field];
    let files = emit(&out, &formats, dir.path(), "tilted").unwrap();
    assert_eq!(files.len(), 5);
    assert!(files.iter().all(|f| f.exists()));

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_eq!(json["m"].as_f64().unwrap(), out.report.m);
    assert_eq!(json["config_hash"].as_str().unwrap(), cfg.hash());

    let text = std::fs::read_to_string(&files[1]).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), out.report.s);
    assert_eq!(&rows[0][11], "ma_solution");

    // radial runs have no fibre or field to write
    let radial = run_with(
        &config(r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "radial", "profile": {"family": "power", "p": 2.0}}}"#),
        None,
        None,
    )
    .unwrap();
    let files = emit(&radial, &formats, dir.path(), "radial").unwrap();
    assert_eq!(files.len(), 3);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = config(r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "zero"}, "certificate": "pullback"}"#);
    let out = run_with(&cfg, None, None).unwrap();
    let err = emit(&out, &[OutputFormat::Json], &blocker.join("sub"), "x").unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
}

#[test]
fn sweeps_share_one_extension_and_skip_invalid_caps() {
    // on the disc of radius 1/2, B ≡ 2 log(1/2) ≈ −1.386 rules out C = −1
    let cfg = tilted(r#"{"kind": "disc", "radius": 0.5}"#);
    let sweep = sweep_c(&cfg, &[-3.0, -1.0, -2.0, -4.0]).unwrap();
    assert_eq!(sweep.skipped.len(), 1);
    assert_eq!(sweep.skipped[0].c, -1.0);
    let cs: Vec<f64> = sweep.reports.iter().map(|r| r.c.unwrap()).collect();
    assert_eq!(cs, [-2.0, -3.0, -4.0]);
    assert!(sweep.reports.iter().all(|r| r.m == sweep.reports[0].m));
    let worst = sweep.reports.windows(2).map(|w| w[1].s - w[0].s).fold(0.0, f64::max);
    assert_eq!(sweep.worst_increase, worst);
    assert_eq!(sweep.chain_ok, sweep.reports.iter().all(|r| r.chain_ok));

    let text = to_csv(&sweep.reports).unwrap();
    assert_eq!(text.lines().count(), 4);

    let empty = sweep_c(&cfg, &[]).unwrap();
    assert!(empty.reports.is_empty() && empty.monotone_ok && empty.chain_ok);
    let none_valid = sweep_c(&cfg, &[-0.5, -1.0]).unwrap();
    assert!(none_valid.reports.is_empty());
    assert_eq!(none_valid.skipped.len(), 2);
}

#[test]
fn reports_are_reproducible() {
    let cfg = tilted(r#"{"kind": "unit_disc"}"#);
    let a = to_json(&run(&cfg).unwrap()).unwrap();
    let b = to_json(&run(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}
