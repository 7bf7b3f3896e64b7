use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandit::{per_arm_sample_count, CoverageOracle, WorkArea};
use crate::demonstration::TaskInstance;
use crate::error::{Error, Result};

/// A sampled instance for which no demonstration produced a plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// Position of the instance in the arm's sample list.
    pub sample_index: usize,
    pub instance: TaskInstance<f64>,
    /// Earliest segment in which planning failed, when the oracle reports one.
    pub failed_segment: Option<usize>,
}

/// Per-arm failure statistics from one bandit round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EstimateRepr", into = "EstimateRepr")]
pub struct ArmEstimate {
    arm_index: usize,
    n_samples: usize,
    samples: Vec<TaskInstance<f64>>,
    failures: Vec<Failure>,
}

#[derive(Serialize, Deserialize)]
struct EstimateRepr {
    arm_index: usize,
    n_samples: usize,
    mu_hat: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    samples: Vec<TaskInstance<f64>>,
    failures: Vec<Failure>,
}

impl TryFrom<EstimateRepr> for ArmEstimate {
    type Error = Error;

    fn try_from(r: EstimateRepr) -> Result<Self> {
        let e = ArmEstimate { arm_index: r.arm_index, n_samples: r.n_samples, samples: r.samples, failures: r.failures };
        e.validate()?;
        if e.mu_hat() != r.mu_hat {
            return Err(Error::InvalidParameter(format!("arm {}: mu_hat does not match the failure count", e.arm_index)));
        }
        Ok(e)
    }
}

impl From<ArmEstimate> for EstimateRepr {
    fn from(e: ArmEstimate) -> Self {
        EstimateRepr { arm_index: e.arm_index, n_samples: e.n_samples, mu_hat: e.mu_hat(), samples: e.samples, failures: e.failures }
    }
}

impl ArmEstimate {
    pub fn new(arm_index: usize, samples: Vec<TaskInstance<f64>>, failures: Vec<Failure>) -> Result<Self> {
        let e = Self { arm_index, n_samples: samples.len(), samples, failures };
        e.validate()?;
        Ok(e)
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter(format!("arm {} has no samples", self.arm_index)));
        }
        if self.failures.len() > self.n_samples {
            return Err(Error::InvalidParameter(format!("arm {} has more failures than samples", self.arm_index)));
        }
        for f in &self.failures {
            let listed = if self.samples.is_empty() {
                f.sample_index < self.n_samples
            } else {
                self.samples.get(f.sample_index) == Some(&f.instance)
            };
            if !listed {
                return Err(Error::InvalidParameter(format!(
                    "arm {}: failure {} is not among the samples",
                    self.arm_index, f.sample_index
                )));
            }
        }
        Ok(())
    }

    pub fn arm_index(&self) -> usize {
        self.arm_index
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// The sampled instances; empty after [`ArmEstimate::compact`].
    pub fn samples(&self) -> &[TaskInstance<f64>] {
        &self.samples
    }

    pub fn failures(&self) -> &[Failure] {
        &self.failures
    }

    pub fn mu_hat_ratio(&self) -> Ratio<usize> {
        Ratio::new(self.failures.len(), self.n_samples)
    }

    /// Fraction of samples that failed (a single correctly rounded division).
    pub fn mu_hat(&self) -> f64 {
        self.failures.len() as f64 / self.n_samples as f64
    }

    /// Drops the sample list, keeping the count and the failures.
    pub fn compact(&mut self) {
        self.samples = Vec::new();
    }
}

/// Result of one round of best-arm identification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanditOutcome {
    /// Smallest index among the arms with the highest failure estimate.
    pub best_arm: usize,
    pub best_mu_hat: f64,
    pub estimates: Vec<ArmEstimate>,
    pub per_arm_sample_count: usize,
    pub epsilon: f64,
    pub delta: f64,
}

impl BanditOutcome {
    pub fn best(&self) -> &ArmEstimate {
        &self.estimates[self.best_arm]
    }

    pub fn compact(&mut self) {
        self.estimates.iter_mut().for_each(ArmEstimate::compact);
    }
}

/// Index of the largest estimate, smallest index on ties.
pub(crate) fn argmax(estimates: &[ArmEstimate]) -> usize {
    let mut best = 0;
    for (j, e) in estimates.iter().enumerate().skip(1) {
        if e.mu_hat_ratio() > estimates[best].mu_hat_ratio() {
            best = j;
        }
    }
    best
}

/// Scores fixed per-arm sample sets. Oracle calls may run in parallel; results are
/// gathered in sample order, so the outcome does not depend on scheduling.
pub fn evaluate_samples<O: CoverageOracle>(
    samples: Vec<Vec<TaskInstance<f64>>>,
    demos: &[O::Demo],
    oracle: &O,
) -> Result<Vec<ArmEstimate>> {
    samples
        .into_iter()
        .enumerate()
        .map(|(j, arm_samples)| {
            let outcomes = arm_samples.par_iter().map(|x| oracle.evaluate(x, demos)).collect::<Result<Vec<_>>>()?;
            let failures = outcomes
                .into_iter()
                .enumerate()
                .filter(|(_, o)| !o.covered)
                .map(|(i, o)| Failure { sample_index: i, instance: arm_samples[i].clone(), failed_segment: o.failed_segment })
                .collect();
            ArmEstimate::new(j, arm_samples, failures)
        })
        .collect()
}

/// Draws `n` uniform instances from every arm, arm by arm, from `rng`.
pub fn draw_samples<R: Rng + ?Sized>(wa: &WorkArea, n: usize, rng: &mut R) -> Vec<Vec<TaskInstance<f64>>> {
    wa.partition()
        .iter()
        .map(|cell| (0..n).map(|_| TaskInstance::single(cell.sample(rng))).collect())
        .collect()
}

/// One round of naive (epsilon, delta)-PAC best-arm identification where the
/// reward of an arm is a planning failure at a uniformly drawn instance.
pub fn get_best_arm<O: CoverageOracle, R: Rng + ?Sized>(
    wa: &WorkArea,
    demos: &[O::Demo],
    oracle: &O,
    epsilon: f64,
    delta: f64,
    rng: &mut R,
) -> Result<BanditOutcome> {
    if demos.is_empty() {
        return Err(Error::EmptyDemonstrationSet);
    }
    let n = per_arm_sample_count(epsilon, delta, wa.k())?;
    let estimates = evaluate_samples(draw_samples(wa, n, rng), demos, oracle)?;
    let best_arm = argmax(&estimates);
    Ok(BanditOutcome {
        best_arm,
        best_mu_hat: estimates[best_arm].mu_hat(),
        estimates,
        per_arm_sample_count: n,
        epsilon,
        delta,
    })
}
