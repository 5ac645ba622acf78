use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn physio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_physio"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn raw_panel(dir: &Path, outlier: bool) -> PathBuf {
    let mut text = String::from("# raw units\nid,CK@Post,CRP@Pre,Cortisol\n");
    for i in 0..22 {
        let ck = 200.0 + 13.0 * ((i * 7) % 11) as f64;
        let crp = 1.0 + 0.1 * ((i * 5) % 7) as f64;
        let cortisol = 15.0 + ((i * 3) % 5) as f64;
        text.push_str(&format!("A{i:02},{ck},{crp},{cortisol}\n"));
    }
    if outlier {
        text.push_str("X99,3500,1.2,16\n");
    }
    let path = dir.join(if outlier { "with_outlier.csv" } else { "panel.csv" });
    fs::write(&path, text).unwrap();
    path
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn seed_file(dir: &Path) -> PathBuf {
    let out = dir.join("seed");
    assert!(physio(&["seedgen", "--out", p(&out)]).status.success());
    out.join("seed.csv")
}

#[test]
fn screen_without_flags_keeps_input_body() {
    let dir = tempfile::tempdir().unwrap();
    let input = raw_panel(dir.path(), false);
    let out = dir.path().join("s");
    let res = physio(&["screen", "--input", p(&input), "--out", p(&out), "--threshold", "25"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let original = fs::read_to_string(&input).unwrap();
    let body: String = original.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let retained = fs::read_to_string(out.join("retained.csv")).unwrap();
    let retained_body: String = retained.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    assert_eq!(retained_body, body);
    assert_eq!(json(out.join("screening.json"))["flagged"], Value::Array(vec![]));
}

#[test]
fn screen_flags_extreme_subject() {
    let dir = tempfile::tempdir().unwrap();
    let input = raw_panel(dir.path(), true);
    let out = dir.path().join("s");
    // One extreme value among 23 subjects reaches about 4.7 z-units.
    let res = physio(&["screen", "--input", p(&input), "--out", p(&out), "--threshold", "4"]);
    assert!(res.status.success());
    let report = json(out.join("screening.json"));
    assert_eq!(report["flagged"], serde_json::json!(["X99"]));
    let retained = fs::read_to_string(out.join("retained_z.csv")).unwrap();
    assert!(!retained.contains("X99"));
    assert_eq!(retained.lines().filter(|l| l.starts_with('A')).count(), 22);
}

#[test]
fn usage_and_io_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = raw_panel(dir.path(), false);
    let out = dir.path().join("o");
    let code = |args: &[&str]| physio(args).status.code().unwrap();
    assert_eq!(code(&["screen", "--input", p(&input), "--out", p(&out), "--threshold", "0"]), 2);
    assert_eq!(code(&["screen", "--input", p(&input), "--out", p(&out), "--threshold", "-3"]), 2);
    assert_eq!(code(&["cluster", "--input", p(&input), "--out", p(&out), "--method", "dbscan"]), 2);
    assert_eq!(code(&["augment", "--input", p(&input), "--out", p(&out), "--count", "0"]), 2);
    assert_eq!(code(&["screen", "--out", p(&out)]), 2);
    assert_eq!(code(&["screen", "--input", p(&dir.path().join("missing.csv")), "--out", p(&out)]), 3);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn zero_variance_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.csv");
    fs::write(&input, "id,CK\na,5\nb,5\nc,5\n").unwrap();
    let res = physio(&["screen", "--input", p(&input), "--out", p(&dir.path().join("o"))]);
    assert_eq!(res.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&res.stderr).contains("CK"));
}

#[test]
fn augment_seed_to_cohort_with_ratio_guard() {
    let dir = tempfile::tempdir().unwrap();
    let seed = seed_file(dir.path());
    let out = dir.path().join("a");
    let args = ["augment", "--input", p(&seed), "--out", p(&out), "--count", "275", "--components", "5", "--reg-covar", "0.1"];
    let res = physio(&args);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("ratio guard"));

    let cohort = fs::read_to_string(out.join("cohort.csv")).unwrap();
    let rows: Vec<&str> = cohort.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 290);
    assert_eq!(rows.iter().filter(|r| r.contains(",seed,")).count(), 15);
    assert_eq!(rows.iter().filter(|r| r.contains(",synthetic,")).count(), 275);
    let gmm = json(out.join("gmm.json"));
    assert_eq!(gmm["training_ratio"], "Insufficient");
    assert_eq!(gmm["model"]["weights"].as_array().unwrap().len(), 5);

    let mut forced = args.to_vec();
    forced.push("--force");
    let res = physio(&forced);
    assert!(res.status.success());
    assert!(!String::from_utf8_lossy(&res.stderr).contains("ratio guard"));
}

#[test]
fn cluster_two_resolutions_and_stability() {
    let dir = tempfile::tempdir().unwrap();
    let seed = seed_file(dir.path());
    let out = dir.path().join("c");
    let res = physio(&["cluster", "--input", p(&seed), "--out", p(&out), "--k", "3", "--k", "5", "--method", "ward"]);
    assert!(res.status.success());
    for name in ["cluster_k3.json", "cluster_k5.json", "dendrogram.svg", "linkage.txt", "stability.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let k5 = json(out.join("cluster_k5.json"));
    assert_eq!(k5["k"], 5);
    assert_eq!(k5["assignments"].as_array().unwrap().len(), 15);

    let km = dir.path().join("km");
    let res = physio(&["cluster", "--input", p(&seed), "--out", p(&km), "--method", "kmeans", "--stability-runs", "10"]);
    assert!(res.status.success());
    let stab = json(km.join("stability.json"));
    let reports = stab["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["runs"], 10);
    assert!(reports[0]["mean_ari"].as_f64().unwrap() <= 1.0);
    assert!(!km.join("dendrogram.svg").exists());
}

#[test]
fn report_single_cluster_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let seed = seed_file(dir.path());
    let out = dir.path().join("r");
    let res = physio(&["report", "--input", p(&seed), "--out", p(&out), "--k", "1"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report = json(out.join("profile_k1.json"));
    let clusters = report["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0]["share"], 1.0);
    assert!(out.join("heatmap_k1.svg").exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let input = raw_panel(dir.path(), true);
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# screening only\nthreshold = 100\n").unwrap();

    let a = dir.path().join("a");
    physio(&["--config", p(&cfg), "screen", "--input", p(&input), "--out", p(&a)]);
    assert_eq!(json(a.join("screening.json"))["threshold"], 100.0);

    let b = dir.path().join("b");
    physio(&["--config", p(&cfg), "screen", "--input", p(&input), "--out", p(&b), "--threshold", "4"]);
    let report = json(b.join("screening.json"));
    assert_eq!(report["threshold"], 4.0);
    assert_ne!(report["meta"]["config_hash"], json(a.join("screening.json"))["meta"]["config_hash"]);

    fs::write(&cfg, "threshold = 25\nshape = round\n").unwrap();
    let res = physio(&["--config", p(&cfg), "screen", "--input", p(&input), "--out", p(&b)]);
    assert_eq!(res.status.code(), Some(2));
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(files_under(&path));
        } else {
            out.push(path);
        }
    }
    out.sort();
    out
}

#[test]
fn every_artifact_is_stamped() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = physio(&["pipeline", "--out", p(&out), "--stability-runs", "2"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let hash = json(out.join("screen/screening.json"))["meta"]["config_hash"].as_str().unwrap().to_string();
    let files = files_under(&out);
    assert!(files.len() >= 20);
    for f in files {
        let text = fs::read_to_string(&f).unwrap();
        assert!(text.contains(&hash), "{}", f.display());
        assert!(text.contains(env!("CARGO_PKG_VERSION")), "{}", f.display());
    }
}

#[test]
fn seedgen_is_repeatable_and_weighted() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    physio(&["seedgen", "--out", p(&a), "--seed", "7"]);
    physio(&["seedgen", "--out", p(&b), "--seed", "7"]);
    for name in ["seed.csv", "labels.csv", "seed_spec.txt"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    }
    let w = dir.path().join("w");
    physio(&["seedgen", "--out", p(&w), "--weighted"]);
    let labels = fs::read_to_string(w.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().filter(|l| l.ends_with("HOMEOSTASIS")).count(), 6);
    assert_eq!(labels.lines().filter(|l| l.ends_with("SILENT_RISK")).count(), 1);
}
