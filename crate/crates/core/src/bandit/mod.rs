//! Coverage estimation as a best-arm identification problem: the work area is
//! split into cells (arms), each pull samples a task instance in a cell and the
//! reward is 1 when no demonstration yields a plan there.

mod coverage;
mod estimate;
mod heatmap;
mod work_area;

pub use coverage::{brute_force_coverage, grid_positions, partition_coverage, volume_weighted_mean};
pub use estimate::{draw_samples, evaluate_samples, get_best_arm, ArmEstimate, BanditOutcome, Failure};
pub use heatmap::{heatmap, write_heatmap_csv, HeatmapCell};
pub use work_area::WorkArea;

use crate::demonstration::TaskInstance;
use crate::error::{Error, Result};

/// Whether an instance is covered, and where planning failed if it is not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub covered: bool,
    pub failed_segment: Option<usize>,
}

impl Outcome {
    pub const COVERED: Outcome = Outcome { covered: true, failed_segment: None };

    pub fn failed_at(segment: usize) -> Self {
        Outcome { covered: false, failed_segment: Some(segment) }
    }
}

/// Decides coverage of a task instance by a set of demonstrations.
pub trait CoverageOracle: Sync {
    type Demo: Sync;

    fn evaluate(&self, x: &TaskInstance<f64>, demos: &[Self::Demo]) -> Result<Outcome>;
}

fn check_unit_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Samples per arm, `ceil(2 / eps^2 * ln(2K / delta))`. Hoeffding's inequality then
/// puts every arm's estimate within `eps / 2` of its mean with probability at
/// least `1 - delta`.
pub fn per_arm_sample_count(epsilon: f64, delta: f64, k: usize) -> Result<usize> {
    check_unit_open("epsilon", epsilon)?;
    check_unit_open("delta", delta)?;
    if k == 0 {
        return Err(Error::InvalidParameter("K must be positive".into()));
    }
    let n = (2.0 / (epsilon * epsilon) * (2.0 * k as f64 / delta).ln()).ceil();
    Ok(n as usize)
}

/// Sufficiency test: the worst arm's failure estimate is at most `1 - eps - beta`.
pub fn stopping_satisfied(best_mu_hat: f64, epsilon: f64, beta: f64) -> bool {
    best_mu_hat <= 1.0 - epsilon - beta
}

/// Per-cell success probability that can still be claimed when stopping early.
pub fn early_stop_beta(best_mu_hat: f64, epsilon: f64) -> f64 {
    (1.0 - epsilon - best_mu_hat).max(0.0)
}
