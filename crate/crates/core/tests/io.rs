use channel_compat::compat::check;
use channel_compat::io::{write_check_outputs, FieldFile, ReportFile, REPORT_SCHEMA};
use channel_compat::oracle;
use channel_compat::spectral::{build_grid, FlowParams};
use channel_compat::Error;

fn example() -> FieldFile {
    let p = FlowParams::default();
    FieldFile::from_field(&oracle::example_field(&p, &build_grid(32).unwrap()).unwrap())
}

#[test]
fn field_file_roundtrip_is_lossless() {
    let file = example();
    let text = file.to_json().unwrap();
    let back = FieldFile::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
    let g = build_grid(40).unwrap();
    let a = file.to_field(&g).unwrap();
    let b = back.to_field(&g).unwrap();
    assert_eq!(a.sub(&b).unwrap().max_abs(), 0.0);
}

#[test]
fn reports_are_reproducible() {
    let p = FlowParams::default();
    let g = build_grid(40).unwrap();
    let u = example().to_field(&g).unwrap();
    let dirs = [tempdir("a"), tempdir("b")];
    for d in &dirs {
        write_check_outputs(d, &check(&u, &p, &g, 1e-7).unwrap()).unwrap();
    }
    for name in ["report.json", "defect_coefficients.csv", "defect_grid.csv"] {
        let a = std::fs::read(dirs[0].join(name)).unwrap();
        let b = std::fs::read(dirs[1].join(name)).unwrap();
        assert!(!a.is_empty() && a == b, "{name} differs");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dirs[0].join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], REPORT_SCHEMA);
    assert_eq!(report["verdict"], "incompatible");
}

#[test]
fn report_carries_both_diagnostics() {
    let p = FlowParams::default();
    let g = build_grid(40).unwrap();
    let rep = check(&example().to_field(&g).unwrap(), &p, &g, 1e-7).unwrap();
    let file = ReportFile::new(&rep);
    assert_eq!(file.defect_relative, rep.defect_relative);
    assert_eq!(file.tangential_relative, rep.tangential_relative);
    assert!(file.diagnostics_agree);
}

#[test]
fn wrong_schema_is_rejected() {
    let text = example().to_json().unwrap().replace("channel-compat/field/v1", "other/v9");
    assert!(matches!(FieldFile::from_json(&text), Err(Error::FieldFile(_))));
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("channel-compat-io-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
