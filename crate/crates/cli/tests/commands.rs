use std::fs;
use std::path::Path;

use clap::Parser;
use demosuff::acquisition::{AcquisitionConfig, Checkpoint, TeacherKind, WorldConfig};
use demosuff::geometry::Region;
use demosuff_cli::{run, Cli, Command};
use serde_json::Value;

fn exec(args: &[&str]) -> anyhow::Result<()> {
    let mut argv = vec!["demosuff"];
    argv.extend_from_slice(args);
    run(Cli::try_parse_from(argv)?)
}

fn disc_config() -> AcquisitionConfig {
    AcquisitionConfig {
        epsilon: 0.1,
        delta: 0.1,
        beta: 0.9,
        k: 4,
        work_area: Region::planar(0.0, 1.0, 0.0, 1.0, 0.0).unwrap(),
        world: WorldConfig::Disc { radius: 0.15, weak_zones: vec![] },
        teacher: TeacherKind::Simulated,
        max_demonstrations: 40,
        seed: 9,
        initial_anchors: vec![],
    }
}

fn write_config(dir: &Path, cfg: &AcquisitionConfig) -> String {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn k_flag_takes_a_comma_list() {
    let cli = Cli::try_parse_from(["demosuff", "k-sweep", "--K", "1,4,16", "--reps", "100"]).unwrap();
    match cli.command {
        Command::KSweep(a) => {
            assert_eq!(a.k, vec![1, 4, 16]);
            assert_eq!(a.reps, 100);
        }
        _ => panic!("wrong subcommand"),
    }
    assert!(Cli::try_parse_from(["demosuff", "k-sweep", "--K", "1,x"]).is_err());
    assert!(Cli::try_parse_from(["demosuff", "acquire"]).is_err(), "--config is required");
}

#[test]
fn acquire_writes_a_resumable_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = disc_config();
    let config = write_config(dir.path(), &cfg);
    let ckpt = dir.path().join("run.json");
    let ckpt_arg = ckpt.display().to_string();
    exec(&["acquire", "--config", &config, "--checkpoint", &ckpt_arg]).unwrap();

    let first = fs::read(&ckpt).unwrap();
    let cp = Checkpoint::read(&ckpt).unwrap();
    assert_eq!(cp.config, cfg);
    assert!(cp.state.terminated().is_some());

    // resuming a finished run changes nothing
    let again = dir.path().join("again.json");
    let again_arg = again.display().to_string();
    exec(&["acquire", "--config", &config, "--resume", &ckpt_arg, "--checkpoint", &again_arg]).unwrap();
    assert_eq!(fs::read(&again).unwrap(), first);

    // a checkpoint only resumes the config it was written for
    let mut other = cfg.clone();
    other.seed += 1;
    let other_config = dir.path().join("other.json");
    fs::write(&other_config, serde_json::to_string(&other).unwrap()).unwrap();
    let err = exec(&["acquire", "--config", &other_config.display().to_string(), "--resume", &ckpt_arg]).unwrap_err();
    assert!(err.to_string().contains("different config"), "{err}");
}

#[test]
fn acquire_refuses_interactive_configs_and_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = disc_config();
    cfg.teacher = TeacherKind::Interactive;
    let config = write_config(dir.path(), &cfg);
    assert!(exec(&["acquire", "--config", &config]).is_err());

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ \"world\": 3 }").unwrap();
    assert!(exec(&["acquire", "--config", &bad.display().to_string()]).is_err());
    assert!(exec(&["acquire", "--config", "/nonexistent/config.json"]).is_err());
}

#[test]
fn heatmap_exports_csv_json_and_png() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &disc_config());
    let ckpt = dir.path().join("run.json").display().to_string();
    exec(&["acquire", "--config", &config, "--checkpoint", &ckpt]).unwrap();

    let csv = dir.path().join("heat.csv");
    let png = dir.path().join("heat.png");
    exec(&["heatmap", "--state", &ckpt, "--out", &csv.display().to_string(), "--png", &png.display().to_string()])
        .unwrap();

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("mu_hat"));
    assert_eq!(lines.count(), 4);

    let view = read_json(&csv.with_extension("json"));
    assert_eq!(view["k"], 4);
    assert_eq!(view["cells"].as_array().unwrap().len(), 4);
    assert!(!view["demo_anchors"].as_array().unwrap().is_empty());

    let img = image::open(&png).unwrap();
    assert_eq!((img.width(), img.height()), (500, 500));

    assert!(exec(&["heatmap", "--state", "/nonexistent.json", "--out", &csv.display().to_string()]).is_err());
}

#[test]
fn k_sweep_writes_runs_pmf_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let out_arg = out.display().to_string();
    exec(&["k-sweep", "--K", "1,4", "--reps", "3", "--out", &out_arg]).unwrap();
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 3);
    assert!(fs::read_to_string(out.join("pmf.csv")).unwrap().lines().count() > 1);
    let summary = read_json(&out.join("summary.json"));
    let ks: Vec<u64> = summary.as_array().unwrap().iter().map(|s| s["k"].as_u64().unwrap()).collect();
    assert_eq!(ks, vec![1, 4]);
    for s in summary.as_array().unwrap() {
        let total: f64 = s["pmf"].as_object().unwrap().values().map(|v| v.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    // same seeds, same files
    let out2 = dir.path().join("sweep2");
    exec(&["k-sweep", "--K", "1,4", "--reps", "3", "--out", &out2.display().to_string()]).unwrap();
    assert_eq!(runs, fs::read_to_string(out2.join("runs.csv")).unwrap());
}

#[test]
fn bandit_validate_reports_bound_and_optimality() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("validation.json");
    exec(&[
        "bandit-validate",
        "--eps",
        "0.1",
        "--delta",
        "0.1",
        "--arms",
        "0.9,0.5,0.1",
        "--runs",
        "30",
        "--out",
        &out.display().to_string(),
    ])
    .unwrap();
    let r = read_json(&out);
    // ceil(2 / 0.01 * ln(60)) = 819
    assert_eq!(r["per_arm_sample_count"], 819);
    assert_eq!(r["runs"].as_array().unwrap().len(), 30);
    assert_eq!(r["optimality_violations"], 0);
    assert!(r["inaccuracy_rate"].as_f64().unwrap() <= r["allowed_rate"].as_f64().unwrap());

    assert!(exec(&["bandit-validate", "--eps", "0", "--arms", "0.5"]).is_err());
    assert!(exec(&["bandit-validate", "--arms", "1.5"]).is_err());
}

#[test]
fn mask_study_runs_bundled_and_file_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mask.json");
    exec(&["mask-study", "--scenario", "weak-corner", "--out", &out.display().to_string()]).unwrap();
    let report = read_json(&out);
    assert_eq!(report["scenario"], "weak-corner");
    let k_eval = report["k_eval"].as_u64().unwrap() as usize;
    assert_eq!(report["partition_coverage"].as_array().unwrap().len(), k_eval);

    let file = dir.path().join("scenario.json");
    let bundled = demosuff_cli::commands::load_scenario("uniform").unwrap();
    fs::write(&file, serde_json::to_string(&bundled).unwrap()).unwrap();
    let from_file = demosuff_cli::commands::load_scenario(&file.display().to_string()).unwrap();
    assert_eq!(from_file, bundled);

    assert!(exec(&["mask-study", "--scenario", "no-such-scenario"]).is_err());
}
