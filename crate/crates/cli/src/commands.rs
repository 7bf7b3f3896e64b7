use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use demosuff::acquisition::{AcquisitionConfig, Checkpoint, Session, TeacherKind};
use demosuff::bandit::write_heatmap_csv;
use demosuff::experiments::{
    k_sweep_disc_config, run_bandit_validation, run_k_sweep, run_mask_study, summarize_k_sweep, write_k_sweep_csv,
    write_pmf_csv, MaskScenario,
};
use serde::Serialize;

use crate::cli::{AcquireArgs, BanditValidateArgs, HeatmapArgs, KSweepArgs, MaskStudyArgs};
use crate::render::{render_png, HeatmapView};

fn read_config(path: &Path) -> Result<AcquisitionConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    AcquisitionConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Tighter accuracy settings for full-scale runs.
fn with_tight_params(cfg: AcquisitionConfig, set_k: bool) -> AcquisitionConfig {
    AcquisitionConfig { epsilon: 0.02, delta: 0.05, beta: 0.95, k: if set_k { 16 } else { cfg.k }, ..cfg }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(out.flush()?)
}

#[derive(Serialize)]
struct AcquireSummary {
    terminated: Option<demosuff::acquisition::Termination>,
    achieved_beta: Option<f64>,
    iterations: usize,
    demonstrations: usize,
    initial_demonstrations: usize,
    last_mu_hat: Vec<f64>,
    checkpoint: String,
}

pub fn acquire(args: &AcquireArgs) -> Result<()> {
    let mut cfg = read_config(&args.config)?;
    if args.tight_params {
        cfg = with_tight_params(cfg, true);
    }
    if cfg.teacher == TeacherKind::Interactive {
        bail!("the config asks for an interactive teacher; start the service with `serve` instead");
    }
    let mut session = match &args.resume {
        Some(path) => {
            let cp = Checkpoint::read(path).with_context(|| format!("reading checkpoint {}", path.display()))?;
            ensure!(cp.config == cfg, "checkpoint {} was written for a different config", path.display());
            Session::from_checkpoint(cp)?
        }
        None => Session::new(cfg)?,
    };
    session.run(Some(&args.checkpoint))?;
    // a resumed run that had already finished performs no round, so write it here
    session.checkpoint().write(&args.checkpoint)?;
    let state = session.state();
    print_json(&AcquireSummary {
        terminated: state.terminated(),
        achieved_beta: state.achieved_beta(),
        iterations: state.iteration(),
        demonstrations: state.demo_count(),
        initial_demonstrations: state.initial_count(),
        last_mu_hat: state.history().last().map(|o| o.estimates.iter().map(|e| e.mu_hat()).collect()).unwrap_or_default(),
        checkpoint: args.checkpoint.display().to_string(),
    })
}

pub fn k_sweep(args: &KSweepArgs) -> Result<()> {
    let mut base = match &args.config {
        Some(p) => read_config(p)?,
        None => k_sweep_disc_config(),
    };
    if args.tight_params {
        base = with_tight_params(base, false);
    }
    let rows = run_k_sweep(&base, &args.k, args.reps)?;
    let summary = summarize_k_sweep(&rows);
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut f = BufWriter::new(File::create(args.out.join("runs.csv"))?);
    write_k_sweep_csv(&rows, &mut f)?;
    f.flush()?;
    let mut f = BufWriter::new(File::create(args.out.join("pmf.csv"))?);
    write_pmf_csv(&summary, &mut f)?;
    f.flush()?;
    write_json(&args.out.join("summary.json"), &summary)?;
    for s in &summary {
        println!("K={:<3} runs={} mean={:.3} max={}", s.k, s.runs, s.mean, s.max);
    }
    Ok(())
}

pub fn bandit_validate(args: &BanditValidateArgs) -> Result<()> {
    let report = run_bandit_validation(&args.arms, args.eps, args.delta, args.runs, args.seed)?;
    println!(
        "N per arm = {}; P(max |mu - mu_hat| > eps/2) = {:.4} (allowed {:.4}); eps-optimality violations = {}",
        report.per_arm_sample_count, report.inaccuracy_rate, report.allowed_rate, report.optimality_violations
    );
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    Ok(())
}

pub fn load_scenario(spec: &str) -> Result<MaskScenario> {
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(MaskScenario::from_json(&text)?);
    }
    MaskScenario::bundled(spec).with_context(|| format!("`{spec}` is neither a file nor a bundled scenario"))
}

pub fn mask_study(args: &MaskStudyArgs) -> Result<()> {
    let report = run_mask_study(&load_scenario(&args.scenario)?)?;
    print_json(&report)?;
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    Ok(())
}

pub fn heatmap(args: &HeatmapArgs) -> Result<()> {
    let cp = Checkpoint::read(&args.state).with_context(|| format!("reading checkpoint {}", args.state.display()))?;
    let wa = cp.config.build_work_area()?;
    let view = HeatmapView::of(&wa, &cp.state);
    ensure!(!view.cells.is_empty(), "checkpoint {} has no bandit round yet", args.state.display());
    let mut f = BufWriter::new(File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?);
    write_heatmap_csv(&view.cells, &mut f)?;
    f.flush()?;
    write_json(&args.out.with_extension("json"), &view)?;
    if let Some(png) = &args.png {
        render_png(&view, 500.0, png)?;
    }
    Ok(())
}
