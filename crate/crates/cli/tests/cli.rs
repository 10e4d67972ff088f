use std::fs;
use std::path::Path;
use std::process::Command;

use qchaos_cli::{run_in, validate, RunError};

const BIN: &str = env!("CARGO_BIN_EXE_qchaos");

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

const RMT: &str = r#"
experiment = "rmt"
[ensemble]
kind = "gue"
dim = 4
samples = 30
seed = 11
[time]
t_max = 2.0
points = 5
[analysis]
quantities = ["sff", "bound", "discrepancy"]
"#;

const SHORT: &str = r#"
experiment = "shorttime"
[model]
kind = "klocal"
k = 1
[analysis]
sizes = [3, 4]
[ensemble]
kind = "gue"
dim = 3
samples = 4
seed = 5
"#;

const COHERENCE_MC: &str = r#"
experiment = "eigencoherence"
[model]
kind = "xxz"
l = 6
n_up = 2
delta = 3
[basis]
kind = "mean_field"
[analysis]
normalizer = "monte_carlo"
[ensemble]
kind = "goe"
samples = 20
seed = 3
"#;

#[test]
fn sampled_runs_are_byte_identical() {
    for text in [RMT, SHORT, COHERENCE_MC] {
        let c = validate(text).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_in(&c, a.path()).unwrap();
        run_in(&c, b.path()).unwrap();
        let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb);
    }
}

#[test]
fn seed_changes_output() {
    let c1 = validate(RMT).unwrap();
    let c2 = validate(&RMT.replace("seed = 11", "seed = 12")).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_in(&c1, a.path()).unwrap();
    run_in(&c2, b.path()).unwrap();
    assert_ne!(fs::read(a.path().join("bound.csv")).unwrap(), fs::read(b.path().join("bound.csv")).unwrap());
}

#[test]
fn manifest_lists_every_file_with_row_counts() {
    let c = validate(RMT).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let m = run_in(&c, dir.path()).unwrap();
    let on_disk: Vec<String> = csv_files(dir.path()).into_iter().map(|(n, _)| n).collect();
    let mut listed: Vec<String> = m.files.iter().map(|f| f.name.clone()).collect();
    listed.sort();
    assert_eq!(listed, on_disk);
    for f in &m.files {
        let text = fs::read_to_string(dir.path().join(&f.name)).unwrap();
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(text.lines().count(), f.rows + 1, "{}", f.name);
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(json["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(json["files"].as_array().unwrap().len(), m.files.len());
    assert!(json["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_floats_round_trip() {
    let c = validate(RMT).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_in(&c, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("sff.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 7);
    for line in lines {
        for field in line.split(',') {
            let x: f64 = field.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), field);
        }
    }
}

#[test]
fn eigencoherence_row_count_is_sector_dimension() {
    let text = "experiment = \"eigencoherence\"\n[model]\nkind = \"xxz\"\nl = 8\nn_up = 3\n[basis]\nkind = \"site\"\n";
    let dir = tempfile::tempdir().unwrap();
    let m = run_in(&validate(text).unwrap(), dir.path()).unwrap();
    let f = m.files.iter().find(|f| f.name == "coherence.csv").unwrap();
    assert_eq!(f.rows, 56);
    let header = fs::read_to_string(dir.path().join("coherence.csv")).unwrap();
    assert!(header.starts_with("index,energy,c2,c_rel,c_l1,pr2,normalized_c2,normalized_c_rel\n"));
}

#[test]
fn dynamics_columns() {
    let text = "experiment = \"dynamics\"\n[model]\nkind = \"tfim\"\nl = 4\ng = -1.05\nh = 0.5\n[time]\nt_max = 1.0\ndt = 0.5\n";
    let dir = tempfile::tempdir().unwrap();
    run_in(&validate(text).unwrap(), dir.path()).unwrap();
    let body = fs::read_to_string(dir.path().join("dynamics.csv")).unwrap();
    let rows: Vec<&str> = body.lines().collect();
    assert_eq!(rows[0], "t,otoc,cgp_part,offdiag_part");
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let x: Vec<f64> = r.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((x[1] - x[2] - x[3]).abs() < 1e-10);
    }
}

#[test]
fn round_trip_through_serialization() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut texts: Vec<String> = fs::read_dir(dir).unwrap().map(|e| fs::read_to_string(e.unwrap().path()).unwrap()).collect();
    texts.extend([RMT, SHORT, COHERENCE_MC].map(String::from));
    for text in texts {
        let c = validate(&text).unwrap();
        assert_eq!(validate(&c.to_toml()).unwrap(), c);
    }
}

#[test]
fn missing_seed_is_rejected() {
    let e = validate(&RMT.replace("seed = 11\n", "")).unwrap_err();
    assert!(e.mentions("ensemble.seed"), "{e}");
    let e = validate(&SHORT.replace("seed = 5\n", "")).unwrap_err();
    assert!(e.mentions("ensemble.seed"), "{e}");
}

#[test]
fn field_not_applicable_is_rejected() {
    let e = validate(&format!("{RMT}window = 0.3\n")).unwrap_err();
    assert!(e.mentions("analysis.window"), "{e}");
    let e = validate("experiment = \"spectrum\"\n[model]\nkind = \"klocal\"\n").unwrap_err();
    assert!(e.mentions("model.kind"), "{e}");
    let e = validate("experiment = \"dynamics\"\n[model]\nkind = \"tfim\"\nl = 4\ng = 1.0\nh = 0.0\n").unwrap_err();
    assert!(e.mentions("time"), "{e}");
}

#[test]
fn capacity_errors_propagate() {
    let text = "experiment = \"spectrum\"\n[model]\nkind = \"xxz\"\nl = 20\nn_up = 10\n";
    let c = validate(text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    match run_in(&c, dir.path()) {
        Err(RunError::Core(e)) => assert!(e.to_string().contains("8192"), "{e}"),
        other => panic!("expected capacity error, got {other:?}"),
    }
}

#[test]
fn custom_basis_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.txt");
    // Hadamard basis on one qubit
    let s = std::f64::consts::FRAC_1_SQRT_2;
    fs::write(&path, format!("{s} 0 {s} 0\n{s} 0 {} 0\n", -s)).unwrap();
    let text = format!(
        "experiment = \"eigencoherence\"\n[model]\nkind = \"tfim\"\nl = 1\ng = 1.0\nh = 0.0\n[basis]\nkind = \"custom_file\"\npath = {:?}\n",
        path.to_str().unwrap()
    );
    // L = 1 is below the TFIM minimum
    assert!(validate(&text).is_err());
    let text = text.replace("l = 1", "l = 2");
    fs::write(&path, "1 0 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 1 0 0 0\n0 0 0 0 0 0 1 0\n").unwrap();
    let c = validate(&text).unwrap();
    let out = dir.path().join("out");
    run_in(&c, &out).unwrap();
    let again = fs::read_to_string(out.join("coherence.csv")).unwrap();
    let comp = validate(&text.replace("kind = \"custom_file\"", "kind = \"computational\"").replace(&format!("path = {:?}\n", path.to_str().unwrap()), "")).unwrap();
    let out2 = dir.path().join("out2");
    run_in(&comp, &out2).unwrap();
    assert_eq!(again, fs::read_to_string(out2.join("coherence.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, "experiment = \"spectrum\"\n[model]\nkind = \"tfim\"\nl = 6\ng = -1.05\nh = 0.5\n").unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "experiment = \"spectrum\"\n[model]\nkind = \"xxz\"\nl = 8\ndelta = 9\n").unwrap();
    let huge = dir.path().join("huge.toml");
    fs::write(&huge, "experiment = \"spectrum\"\n[model]\nkind = \"xxz\"\nl = 20\nn_up = 10\n").unwrap();

    let status = |args: &[&str], env_dir: Option<&Path>| {
        let mut cmd = Command::new(BIN);
        cmd.args(args).current_dir(dir.path());
        if let Some(d) = env_dir {
            cmd.env("QCHAOS_OUTPUT_DIR", d);
        }
        cmd.output().unwrap()
    };
    assert_eq!(status(&["list-experiments"], None).status.code(), Some(0));
    assert_eq!(status(&["validate", good.to_str().unwrap()], None).status.code(), Some(0));
    let out = status(&["validate", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("defect site out of range"));
    assert_eq!(status(&["run", bad.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(status(&["run", huge.to_str().unwrap()], None).status.code(), Some(1));

    let env_out = dir.path().join("from_env");
    assert_eq!(status(&["run", good.to_str().unwrap()], Some(&env_out)).status.code(), Some(0));
    assert!(env_out.join("levels.csv").exists());
    assert!(env_out.join("manifest.json").exists());
}
