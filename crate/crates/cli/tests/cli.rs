use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shapetrack"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, frames: usize) -> PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(
        &path,
        format!(
            r#"
points_per_frame = 40
noise_variance = 1e-2
frames = {frames}
seed = 5
iou_resolution = 24

[ground_truth]
kind = "cuboid"
half_extents = [1.5, 0.5, 0.5]

[tracker]
degree = 3
"#
        ),
    )
    .unwrap();
    path
}

fn lines(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn simulate_writes_one_line_per_step_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 4);
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        let o = run(&["simulate", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let reports = lines(&a);
    assert_eq!(reports.len(), 4);
    assert_eq!(reports[3]["k"], 4);
    let iou = reports[3]["iou"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&iou));
    assert!(reports[0].get("wall_time_ms").is_none());
}

#[test]
fn seed_and_steps_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 4);
    let o = run(&["simulate", config.to_str().unwrap(), "--steps", "2", "--seed", "99"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2);
    let default_seed = run(&["simulate", config.to_str().unwrap(), "--steps", "2"]);
    assert_ne!(stdout.as_bytes(), &default_seed.stdout[..]);
}

#[test]
fn meshes_and_state_then_export() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 4);
    let meshes = dir.path().join("meshes");
    let state = dir.path().join("state.json");
    let o = run(&[
        "simulate",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("m.jsonl").to_str().unwrap(),
        "--mesh-every",
        "2",
        "--mesh-dir",
        meshes.to_str().unwrap(),
        "--state-out",
        state.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(meshes.join("mesh_000002.obj").exists());
    assert!(meshes.join("mesh_000004.obj").exists());

    let obj = dir.path().join("final.obj");
    let o = run(&[
        "export-mesh",
        state.to_str().unwrap(),
        obj.to_str().unwrap(),
        "--resolution",
        "10",
        "20",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2 + 9 * 20);
}

#[test]
fn export_from_bare_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("c.json");
    std::fs::write(&coeffs, r#"{"degree":0,"weights":[3.5449077018110318]}"#).unwrap();
    let obj = dir.path().join("sphere.obj");
    let o = run(&["export-mesh", coeffs.to_str().unwrap(), obj.to_str().unwrap(), "--star", "1,-2,3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for line in std::fs::read_to_string(obj).unwrap().lines().filter(|l| l.starts_with("v ")) {
        let v: Vec<f64> = line[2..].split_whitespace().map(|x| x.parse().unwrap()).collect();
        let r = ((v[0] - 1.0).powi(2) + (v[1] + 2.0).powi(2) + (v[2] - 3.0).powi(2)).sqrt();
        assert!((r - 1.0).abs() < 1e-9);
    }
}

#[test]
fn replay_recorded_frames() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    std::fs::create_dir(&frames).unwrap();
    for k in 1..=3 {
        let pts: String = (0..30)
            .map(|i| {
                let a = i as f64 * 0.7 + k as f64;
                let z = (i as f64 / 15.0) - 1.0;
                let r = (1.0 - z * z).sqrt();
                format!("{} {} {}\n", r * a.cos(), r * a.sin(), z)
            })
            .collect();
        std::fs::write(frames.join(format!("frame_{k:06}.txt")), pts).unwrap();
    }
    let tracker = dir.path().join("tracker.toml");
    std::fs::write(&tracker, "degree = 2\nmeasurement_std = 0.05\n").unwrap();
    let o = run(&["replay", frames.to_str().unwrap(), tracker.to_str().unwrap(), "--steps", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 2);
    assert!(out.contains("\"iou\":null"));

    // a full scenario file works too; its tracker table is used
    let config = write_config(dir.path(), 4);
    let o = run(&["replay", frames.to_str().unwrap(), config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_tags_lines_with_order() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 2);
    let out = dir.path().join("sweep.jsonl");
    let o = run(&["sweep", config.to_str().unwrap(), "--orders", "1,2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let reports = lines(&out);
    let orders: Vec<u64> = reports.iter().map(|r| r["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, [1, 1, 2, 2]);
    assert_eq!(reports[3]["coefficients"].as_array().unwrap().len(), 9);
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["simulate".into(), dir.path().join("missing.toml").display().to_string()],
        vec![
            "replay".into(),
            dir.path().display().to_string(),
            write_config(dir.path(), 2).display().to_string(),
        ],
        vec![
            "export-mesh".into(),
            dir.path().join("nope.json").display().to_string(),
            "x.obj".into(),
        ],
    ];
    for args in cases {
        let o = bin().args(&args).output().unwrap();
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "frames = 0\npoints_per_frame = 1\nnoise_variance = 0.0\nseed = 1\n[ground_truth]\nkind = \"sphere\"\nradius = 1.0\n",
    )
    .unwrap();
    let o = run(&["simulate", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("frames"));
}
