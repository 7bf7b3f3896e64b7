//! Batch experiments built on the acquisition loop and the bandit.

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{AcquisitionConfig, Session, TeacherKind, Termination, WorldConfig};
use crate::bandit::{brute_force_coverage, get_best_arm, partition_coverage, volume_weighted_mean, WorkArea};
use crate::error::{Error, Result};
use crate::synthetic::{BernoulliArms, DiscWorld};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSweepRow {
    pub k: usize,
    pub run_index: usize,
    pub seed: u64,
    pub demo_count: usize,
    pub terminated: Termination,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSummary {
    pub k: usize,
    pub runs: usize,
    pub mean: f64,
    pub max: usize,
    /// Demonstration count to fraction of runs.
    pub pmf: BTreeMap<usize, f64>,
}

/// Runs acquisition `reps` times for every `k`, run `i` seeded with `base.seed + i`.
pub fn run_k_sweep(base: &AcquisitionConfig, ks: &[usize], reps: usize) -> Result<Vec<KSweepRow>> {
    if base.teacher == TeacherKind::Interactive {
        return Err(Error::InvalidConfig("a sweep needs the simulated teacher".into()));
    }
    if reps == 0 || ks.is_empty() {
        return Err(Error::InvalidConfig("a sweep needs at least one K and one repetition".into()));
    }
    let mut rows = Vec::with_capacity(ks.len() * reps);
    for &k in ks {
        for run_index in 0..reps {
            let seed = base.seed.wrapping_add(run_index as u64);
            let mut session = Session::new(AcquisitionConfig { k, seed, ..base.clone() })?;
            let terminated = session.run(None)?;
            rows.push(KSweepRow { k, run_index, seed, demo_count: session.state().demo_count(), terminated });
        }
    }
    Ok(rows)
}

pub fn summarize_k_sweep(rows: &[KSweepRow]) -> Vec<KSummary> {
    let mut by_k: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in rows {
        by_k.entry(r.k).or_default().push(r.demo_count);
    }
    by_k.into_iter()
        .map(|(k, counts)| {
            let runs = counts.len();
            let mut pmf = BTreeMap::new();
            for &c in &counts {
                *pmf.entry(c).or_insert(0.0) += 1.0 / runs as f64;
            }
            KSummary {
                k,
                runs,
                mean: counts.iter().sum::<usize>() as f64 / runs as f64,
                max: counts.iter().copied().max().unwrap_or(0),
                pmf,
            }
        })
        .collect()
}

pub fn write_k_sweep_csv<W: Write>(rows: &[KSweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "k,run_index,seed,demo_count,terminated")?;
    for r in rows {
        let t = serde_json::to_value(r.terminated).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.k, r.run_index, r.seed, r.demo_count, t)?;
    }
    Ok(())
}

pub fn write_pmf_csv<W: Write>(summary: &[KSummary], mut out: W) -> std::io::Result<()> {
    writeln!(out, "k,demo_count,probability")?;
    for s in summary {
        for (c, p) in &s.pmf {
            writeln!(out, "{},{},{}", s.k, c, p)?;
        }
    }
    Ok(())
}

/// Acquisition with a single cell, then a finer re-evaluation of the final
/// demonstration set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskScenario {
    pub name: String,
    pub acquisition: AcquisitionConfig,
    pub k_eval: usize,
    pub grid_resolution: f64,
}

impl MaskScenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.acquisition.validate()?;
        Ok(s)
    }

    pub fn bundled(name: &str) -> Result<Self> {
        let text = match name {
            "weak-corner" => include_str!("../data/scenarios/weak-corner.json"),
            "uniform" => include_str!("../data/scenarios/uniform.json"),
            other => return Err(Error::InvalidConfig(format!("unknown scenario {other:?}"))),
        };
        Self::from_json(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskReport {
    pub scenario: String,
    pub terminated: Termination,
    pub demo_count: usize,
    pub achieved_beta: f64,
    pub beta: f64,
    pub k_eval: usize,
    pub partition_coverage: Vec<f64>,
    /// Cells whose coverage is below `beta`.
    pub flagged: Vec<usize>,
    pub overall_coverage: f64,
    /// Volume-weighted mean of the per-cell coverages.
    pub weighted_mean_coverage: f64,
}

pub fn run_mask_study(scenario: &MaskScenario) -> Result<MaskReport> {
    let mut session = Session::new(scenario.acquisition.clone())?;
    let terminated = session.run(None)?;
    let eval = WorkArea::new(scenario.acquisition.work_area, scenario.k_eval)?;
    let res = scenario.grid_resolution;
    let cp = session.checkpoint();
    let (coverage, overall) = match (&session.world(), &cp.state) {
        (crate::acquisition::World::Planner { oracle, .. }, crate::acquisition::SessionState::Planner(s)) => (
            partition_coverage(&eval, &s.demos, oracle, res)?,
            brute_force_coverage(eval.region(), &s.demos, oracle, res)?,
        ),
        (crate::acquisition::World::Disc { oracle }, crate::acquisition::SessionState::Disc(s)) => (
            partition_coverage(&eval, &s.demos, oracle, res)?,
            brute_force_coverage(eval.region(), &s.demos, oracle, res)?,
        ),
        _ => unreachable!("session world and state agree"),
    };
    let beta = scenario.acquisition.beta;
    Ok(MaskReport {
        scenario: scenario.name.clone(),
        terminated,
        demo_count: session.state().demo_count(),
        achieved_beta: session.state().achieved_beta().unwrap_or(0.0),
        beta,
        k_eval: scenario.k_eval,
        flagged: coverage.iter().enumerate().filter(|(_, c)| **c < beta).map(|(j, _)| j).collect(),
        weighted_mean_coverage: volume_weighted_mean(&eval, &coverage),
        partition_coverage: coverage,
        overall_coverage: overall,
    })
}

/// One bandit round on arms with known means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationRun {
    pub seed: u64,
    pub best_arm: usize,
    pub mu_hat: Vec<f64>,
    pub max_deviation: f64,
    /// `max_j |mu_j - mu_hat_j| <= eps / 2`.
    pub accurate: bool,
    /// `max_j mu_j - mu_{j*}`.
    pub regret: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub means: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub per_arm_sample_count: usize,
    pub runs: Vec<ValidationRun>,
    /// Fraction of runs in which some estimate missed by more than `eps / 2`.
    pub inaccuracy_rate: f64,
    /// `delta` plus three binomial standard deviations.
    pub allowed_rate: f64,
    /// Accurate runs that still returned an arm more than `eps` from the best.
    pub optimality_violations: usize,
}

pub fn run_bandit_validation(means: &[f64], epsilon: f64, delta: f64, runs: usize, seed: u64) -> Result<ValidationReport> {
    if runs == 0 {
        return Err(Error::InvalidParameter("need at least one run".into()));
    }
    let arms = BernoulliArms::unit(means.to_vec())?;
    let best_mean = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut records = Vec::with_capacity(runs);
    let mut per_arm = 0;
    for r in 0..runs {
        let run_seed = seed.wrapping_add(r as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
        let outcome = get_best_arm(arms.work_area(), &[()], &arms, epsilon, delta, &mut rng)?;
        per_arm = outcome.per_arm_sample_count;
        let mu_hat: Vec<f64> = outcome.estimates.iter().map(|e| e.mu_hat()).collect();
        let max_deviation = mu_hat.iter().zip(means).map(|(h, m)| (h - m).abs()).fold(0.0, f64::max);
        records.push(ValidationRun {
            seed: run_seed,
            best_arm: outcome.best_arm,
            max_deviation,
            accurate: max_deviation <= epsilon / 2.0,
            regret: best_mean - means[outcome.best_arm],
            mu_hat,
        });
    }
    let inaccurate = records.iter().filter(|r| !r.accurate).count();
    let optimality_violations = records.iter().filter(|r| r.accurate && r.regret > epsilon).count();
    Ok(ValidationReport {
        means: means.to_vec(),
        epsilon,
        delta,
        per_arm_sample_count: per_arm,
        inaccuracy_rate: inaccurate as f64 / runs as f64,
        allowed_rate: delta + 3.0 * (delta * (1.0 - delta) / runs as f64).sqrt(),
        optimality_violations,
        runs: records,
    })
}

/// Failure probability of a one-demo disc world whose disc lies inside the work area.
pub fn disc_failure_rate(world: &DiscWorld, wa: &WorkArea) -> f64 {
    1.0 - std::f64::consts::PI * world.radius * world.radius / wa.region().volume()
}

/// Whether a configuration describes a synthetic world (no manipulator).
pub fn is_synthetic(cfg: &AcquisitionConfig) -> bool {
    matches!(cfg.world, WorldConfig::Disc { .. })
}

/// The disc-world configuration used for the bundled K sweep.
pub fn k_sweep_disc_config() -> AcquisitionConfig {
    serde_json::from_str(include_str!("../data/scenarios/k-sweep-disc.json")).expect("bundled sweep config parses")
}
