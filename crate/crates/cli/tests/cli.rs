//! End-to-end runs of the `viewdir` binary.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use viewdir_core::io::{read_field, read_manifest, read_transforms, write_transforms, SelectionManifest};
use viewdir_core::split::uniform_sphere_poses;
use viewdir_core::{Intrinsics, Vec3, ViewSet};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn viewdir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viewdir"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = viewdir(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn pool() -> String {
    fixture("synthetic_pool.json").display().to_string()
}

#[test]
fn random_selection_has_unique_ids() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "select",
        "--method",
        "rs",
        "--budget",
        "10",
        "--dataset",
        &pool(),
        "--out",
        p(dir.path()),
    ]);
    let m = read_manifest(dir.path().join("select_rs_seed0.json")).unwrap();
    let ids: HashSet<&str> = m.view_ids().into_iter().collect();
    assert_eq!((m.order.len(), ids.len()), (10, 10));
    assert_eq!(m.method, "rs");
}

#[test]
fn vmf_on_a_non_spherical_rig_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "select",
        "--method",
        "igs-vmf",
        "--kappa",
        "5",
        "--sigma",
        "1",
        "--oracle",
        "--budget",
        "20",
        "--dataset",
        &pool(),
        "--out",
        p(dir.path()),
    ];
    let out = viewdir(&args);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("unit sphere") && msg.contains("--project-sphere"), "{msg}");

    let mut projected = args.to_vec();
    projected.push("--project-sphere");
    ok(&projected);
    let m = read_manifest(dir.path().join("select_igs-vmf_seed0.json")).unwrap();
    assert_eq!(m.order.len(), 20);
    assert!(m.order[..5].iter().all(|e| e.score.is_none()));
    assert!(m.order[5..].iter().all(|e| e.score.is_some()));
    assert!(dir.path().join("runlog_igs-vmf_seed0.jsonl").exists());
}

#[test]
fn vmf_needs_both_concentration_and_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let out = viewdir(&[
        "select",
        "--method",
        "igs-vmf",
        "--kappa",
        "5",
        "--oracle",
        "--project-sphere",
        "--dataset",
        &pool(),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repetitions_with_distinct_seeds_give_distinct_manifests() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "select",
        "--method",
        "fvs",
        "--budget",
        "12",
        "--seeds",
        "3,4",
        "--dataset",
        &pool(),
        "--out",
        p(dir.path()),
    ]);
    let a = read_manifest(dir.path().join("select_fvs_seed3.json")).unwrap();
    let b = read_manifest(dir.path().join("select_fvs_seed4.json")).unwrap();
    a.validate().unwrap();
    b.validate().unwrap();
    assert_ne!(a.view_ids(), b.view_ids());
}

#[test]
fn reruns_and_the_echoed_config_reproduce_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "select",
        "--method",
        "igs-zipf",
        "--oracle",
        "--project-sphere",
        "--budget",
        "25",
        "--dataset",
        &pool(),
    ];
    let first = dir.path().join("first");
    let mut a = args.to_vec();
    a.extend(["--out", p(&first)]);
    ok(&a);
    let bytes = std::fs::read(first.join("select_igs-zipf_seed0.json")).unwrap();
    ok(&a);
    assert_eq!(bytes, std::fs::read(first.join("select_igs-zipf_seed0.json")).unwrap());

    let m = read_manifest(first.join("select_igs-zipf_seed0.json")).unwrap();
    let cfg_path = dir.path().join("echo.json");
    std::fs::write(&cfg_path, serde_json::to_string(&m.config).unwrap()).unwrap();
    let second = dir.path().join("second");
    ok(&["select", "--config", p(&cfg_path), "--out", p(&second)]);
    assert_eq!(bytes, std::fs::read(second.join("select_igs-zipf_seed0.json")).unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!("v = 1\nmethod = \"rs\"\nbudget = 8\ndataset = {:?}\n", pool()),
    )
    .unwrap();
    ok(&["select", "--config", p(&cfg), "--budget", "6", "--out", p(dir.path())]);
    let m = read_manifest(dir.path().join("select_rs_seed0.json")).unwrap();
    assert_eq!(m.order.len(), 6);

    std::fs::write(&cfg, "v = 1\nmethod = \"rs\"\nbogus = 1\n").unwrap();
    assert_eq!(viewdir(&["select", "--config", p(&cfg)]).status.code(), Some(2));
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path());
    let missing = dir.path().join("absent.json");
    assert_eq!(
        viewdir(&["select", "--method", "rs", "--dataset", p(&missing), "--out", out])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        viewdir(&[
            "select",
            "--method",
            "rs",
            "--budget",
            "500",
            "--dataset",
            &pool(),
            "--out",
            out
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        viewdir(&[
            "select",
            "--method",
            "igs-greedy",
            "--budget",
            "10",
            "--dataset",
            &pool(),
            "--out",
            out
        ])
        .status
        .code(),
        Some(2)
    );
    let failing = viewdir(&[
        "select",
        "--method",
        "igs-greedy",
        "--budget",
        "10",
        "--evaluator-cmd",
        "exit 1",
        "--evaluator-timeout",
        "5",
        "--dataset",
        &pool(),
        "--out",
        out,
    ]);
    assert_eq!(
        failing.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&failing.stderr)
    );
}

#[test]
fn external_evaluator_drives_the_loop() {
    let dir = tempfile::tempdir().unwrap();
    // Scores every candidate 1.0 by echoing the requested ids back.
    let script = dir.path().join("eval.sh");
    std::fs::write(
        &script,
        "read line\nids=$(printf '%s' \"$line\" | sed 's/.*\"candidates\":\\[\\([^]]*\\)\\].*/\\1/')\n\
         out=$(printf '%s' \"$ids\" | sed 's/\"\\([^\"]*\\)\"/\"\\1\":1.0/g')\n\
         printf '{\"v\":1,\"scores\":{%s}}\\n' \"$out\"\n",
    )
    .unwrap();
    let cmd = format!("sh {}", script.display());
    let out = viewdir(&[
        "select",
        "--method",
        "igs-greedy",
        "--budget",
        "15",
        "--evaluator-cmd",
        &cmd,
        "--dataset",
        &pool(),
        "--out",
        p(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_manifest(dir.path().join("select_igs-greedy_seed0.json")).unwrap();
    assert_eq!(m.order.len(), 15);
    assert!(m.order[5..].iter().all(|e| e.score == Some(1.0)));
}

#[test]
fn uniform_sphere_split_and_rotation() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "split",
        "--count",
        "200",
        "--radius",
        "3",
        "--center",
        "1,-2,0.5",
        "--rotate-z",
        "90",
        "--out",
        p(dir.path()),
    ]);
    let test = read_transforms(dir.path().join("test_transforms.json")).unwrap();
    let center = Vec3::new(1.0, -2.0, 0.5);
    assert_eq!(test.len(), 200);
    for v in test.views() {
        assert!(((v.center() - center).norm() - 3.0).abs() < 1e-9);
    }
    let m = read_manifest(dir.path().join("split_test.json")).unwrap();
    assert_eq!(m.order.len(), 200);

    let rotated_path = dir.path().join("test_rotz_90.json");
    let rotated = read_transforms(&rotated_path).unwrap();
    for (a, b) in test.views().iter().zip(rotated.views()) {
        let d = a.center() - center;
        let expected = center + Vec3::new(-d.y, d.x, d.z);
        assert!((b.center() - expected).norm() < 1e-9);
    }
    let bytes = std::fs::read(&rotated_path).unwrap();
    ok(&[
        "split",
        "--count",
        "200",
        "--radius",
        "3",
        "--center",
        "1,-2,0.5",
        "--rotate-z",
        "90",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(bytes, std::fs::read(&rotated_path).unwrap());
}

#[test]
fn fvs_resplit_partitions_the_pool() {
    let dir = tempfile::tempdir().unwrap();
    let k = Intrinsics::from_fov_x(400, 300, 0.8);
    let views = uniform_sphere_poses(276, 2.0, &Vec3::zeros(), Some(k), "cap").unwrap();
    let pool_path = dir.path().join("capture.json");
    write_transforms(&pool_path, &ViewSet::new(views).unwrap()).unwrap();

    ok(&[
        "split",
        "--mode",
        "fvs-resplit",
        "--count",
        "25",
        "--dataset",
        p(&pool_path),
        "--out",
        p(dir.path()),
    ]);
    let test = read_manifest(dir.path().join("split_test.json")).unwrap();
    let train = read_manifest(dir.path().join("split_train.json")).unwrap();
    assert_eq!((test.order.len(), train.order.len()), (25, 251));
    let all: HashSet<&str> = test.view_ids().into_iter().chain(train.view_ids()).collect();
    assert_eq!(all.len(), 276);
}

fn camera_ring(path: &Path, count: usize, size: u32, phase: f64) {
    let k = Intrinsics::from_fov_x(size, size, 0.9);
    let views: Vec<_> = uniform_sphere_poses(count, 3.0, &Vec3::zeros(), Some(k), "cam").unwrap();
    let set = ViewSet::new(views).unwrap();
    let set = viewdir_core::split::rotate_views_z(&set, phase, &Vec3::zeros()).unwrap();
    write_transforms(path, &set).unwrap();
}

fn normalized(path: &Path) -> Vec<f64> {
    let f = read_field(path).unwrap();
    f.raw.iter().map(|r| r / f.kappa).collect()
}

#[test]
fn identical_sets_have_zero_difference() {
    let dir = tempfile::tempdir().unwrap();
    let cams = dir.path().join("cams.json");
    camera_ring(&cams, 6, 48, 0.0);
    let out = ok(&[
        "coverage",
        "--mesh",
        "icosphere:2",
        "--dataset",
        p(&cams),
        "--compare",
        p(&cams),
        "--surface-samples",
        "2000",
        "--stride",
        "2",
        "--out",
        p(dir.path()),
    ]);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary, String::from_utf8(out.stdout).unwrap());
    let diff = summary.lines().find(|l| l.starts_with("difference,")).unwrap();
    assert_eq!(diff, "difference,0,0,0");
    assert!(normalized(&dir.path().join("difference.bin")).iter().all(|&x| x == 0.0));
    assert!(dir.path().join("coverage_a.ply").exists());
}

#[test]
fn empty_selection_gives_a_zero_field() {
    let dir = tempfile::tempdir().unwrap();
    let cams = dir.path().join("cams.json");
    camera_ring(&cams, 4, 32, 0.0);
    let manifest = dir.path().join("empty.json");
    let m = SelectionManifest::new("rs", 0, serde_json::json!({}), &[]);
    viewdir_core::io::write_manifest(&m, &manifest).unwrap();
    ok(&[
        "coverage",
        "--mesh",
        "icosphere:1",
        "--dataset",
        p(&cams),
        "--selection",
        p(&manifest),
        "--surface-samples",
        "500",
        "--out",
        p(dir.path()),
    ]);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().nth(1), Some("a,0,0,0"));
    assert!(normalized(&dir.path().join("field_a.bin")).iter().all(|&x| x == 0.0));
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn strided_coverage_tracks_full_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let cams = dir.path().join("cams.json");
    // A few cameras leave parts of the sphere unseen, so the field has real structure.
    camera_ring(&cams, 5, 256, 0.3);
    let mut fields = Vec::new();
    for stride in ["1", "4"] {
        let out = dir.path().join(format!("s{stride}"));
        ok(&[
            "coverage",
            "--mesh",
            "icosphere:3",
            "--dataset",
            p(&cams),
            "--surface-samples",
            "1000",
            "--stride",
            stride,
            "--out",
            p(&out),
        ]);
        fields.push(normalized(&out.join("field_a.bin")));
    }
    let r = pearson(&fields[0], &fields[1]);
    println!("stride 1 vs 4: r = {r}");
    assert!(r > 0.95, "r = {r}");
}

fn read_csv(path: &Path) -> Vec<(String, usize, usize, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,repetition,n_views,mean_candidate_score"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

/// Mean score per checkpoint for one method.
fn mean_trajectory(rows: &[(String, usize, usize, f64)], method: &str) -> Vec<(usize, f64)> {
    let mut sums: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for (m, _, n, s) in rows.iter().filter(|r| r.0 == method) {
        let e = sums.entry(*n).or_default();
        e.0 += s;
        e.1 += 1;
        let _ = m;
    }
    sums.into_iter().map(|(n, (s, c))| (n, s / c as f64)).collect()
}

#[test]
fn single_method_rows_match_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--methods",
        "fvs",
        "--schedule",
        "5,5,10",
        "--out",
        p(dir.path()),
    ]);
    let rows = read_csv(&dir.path().join("simulate.csv"));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().map(|r| r.2).collect::<Vec<_>>(), vec![5, 10, 15, 25]);
}

#[test]
fn spread_beats_random_without_hotspots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flat.json");
    std::fs::write(
        &cfg,
        r#"{"v": 1, "evaluator": {"kind": "synthetic-oracle", "hotspots": [], "base_quality": 0.0,
            "gain_per_view": 1.0, "noise_sd": 0.0, "seed": 0}}"#,
    )
    .unwrap();
    ok(&[
        "simulate",
        "--config",
        p(&cfg),
        "--methods",
        "rs,fvs",
        "--repetitions",
        "20",
        "--budget",
        "40",
        "--out",
        p(dir.path()),
    ]);
    let rows = read_csv(&dir.path().join("simulate.csv"));
    assert_eq!(rows.len(), 2 * 20 * 7);
    let rs = mean_trajectory(&rows, "rs");
    let fvs = mean_trajectory(&rows, "fvs");
    for ((n, r), (_, f)) in rs.iter().zip(&fvs) {
        assert!(f >= r, "n = {n}: fvs {f} < rs {r}");
    }
}

#[test]
fn relaxation_escapes_the_hotspot() {
    let dir = tempfile::tempdir().unwrap();
    let h = Vec3::new(0.3, 0.2, 0.93).normalize();
    let cfg = dir.path().join("hotspot.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "v": 1,
            "evaluator": {"kind": "synthetic-oracle",
                "hotspots": [{"center": [h.x, h.y, h.z], "difficulty": 5.0, "radius": 0.7}],
                "base_quality": 0.0, "gain_per_view": 1.0, "noise_sd": 0.05, "seed": 0},
            "methods": ["igs-greedy"], "initial_k": 5, "schedule": [20], "repetitions": 10
        })
        .to_string(),
    )
    .unwrap();
    let mut finals = Vec::new();
    for relax in ["off", "on"] {
        let out = dir.path().join(relax);
        ok(&["simulate", "--config", p(&cfg), "--relax", relax, "--out", p(&out)]);
        let rows = read_csv(&out.join("simulate.csv"));
        let last = mean_trajectory(&rows, &rows[0].0).last().unwrap().1;
        finals.push(last);
    }
    assert!(finals[1] > finals[0], "greedy {} vs relaxed {}", finals[0], finals[1]);
}

#[test]
fn colmap_fixture_is_accepted_with_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let model = fixture("colmap_tiny").display().to_string();
    let out = viewdir(&[
        "select",
        "--method",
        "fvs",
        "--budget",
        "2",
        "--initial-k",
        "1",
        "--dataset",
        &model,
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2), "alpha is required for COLMAP input");
    ok(&[
        "select",
        "--method",
        "fvs",
        "--budget",
        "2",
        "--initial-k",
        "1",
        "--alpha",
        "1",
        "--dataset",
        &model,
        "--out",
        p(dir.path()),
    ]);
    let m = read_manifest(dir.path().join("select_fvs_seed0.json")).unwrap();
    assert_eq!(m.order.len(), 2);
}
