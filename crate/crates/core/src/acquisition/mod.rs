//! The incremental acquisition loop: estimate the worst-covered cell, ask the
//! teacher for a demonstration at a failing instance there, repeat until every
//! cell is covered with the requested confidence.

mod config;
mod session;

pub use config::{AcquisitionConfig, ModelSource, TeacherKind, TemplateSource, WorldConfig};
pub use session::{write_atomically, AnchorInput, Checkpoint, DemoSubmission, Session, SessionState, SessionStatus, World};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{early_stop_beta, get_best_arm, stopping_satisfied, BanditOutcome, CoverageOracle, Failure, WorkArea};
use crate::demonstration::{DemoRequest, Teacher, TeacherReply};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopParams {
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    /// Stop asking once the demonstration set has this many members.
    pub max_demonstrations: usize,
}

impl LoopParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta), ("beta", self.beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidConfig(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if 1.0 - self.epsilon - self.beta < 0.0 {
            log::warn!(
                "1 - epsilon - beta = {:.4} is negative: the sufficiency test can never pass",
                1.0 - self.epsilon - self.beta
            );
        }
        Ok(())
    }

    /// Largest per-cell failure estimate that counts as sufficient.
    pub fn threshold(&self) -> f64 {
        1.0 - self.epsilon - self.beta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Sufficient,
    BudgetExhausted,
    TeacherRefused,
}

/// Everything the loop has learned so far; serializes deterministically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "D: Serialize", deserialize = "D: Deserialize<'de>"))]
pub struct AcquisitionState<D> {
    pub demos: Vec<D>,
    /// Size of the initial demonstration set.
    pub initial_count: usize,
    pub iteration: usize,
    /// One bandit round per iteration, sample lists dropped.
    pub history: Vec<BanditOutcome>,
    pub terminated: Option<Termination>,
    /// The requested success level when sufficient, otherwise the early-stop level.
    pub achieved_beta: Option<f64>,
    /// The request awaiting an answer, if any.
    pub pending: Option<DemoRequest>,
    rng: ChaCha8Rng,
}

/// What happened in one bandit round.
#[derive(Clone, Debug, PartialEq)]
pub enum Round {
    Terminated(Termination),
    Request(DemoRequest),
}

impl<D> AcquisitionState<D> {
    pub fn new(initial_demos: Vec<D>, seed: u64) -> Result<Self> {
        if initial_demos.is_empty() {
            return Err(Error::EmptyDemonstrationSet);
        }
        Ok(Self {
            initial_count: initial_demos.len(),
            demos: initial_demos,
            iteration: 0,
            history: Vec::new(),
            terminated: None,
            achieved_beta: None,
            pending: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn is_done(&self) -> bool {
        self.terminated.is_some()
    }

    pub fn last_outcome(&self) -> Option<&BanditOutcome> {
        self.history.last()
    }

    fn finish(&mut self, how: Termination, achieved_beta: f64) -> Round {
        self.terminated = Some(how);
        self.achieved_beta = Some(achieved_beta);
        self.pending = None;
        Round::Terminated(how)
    }

    /// Runs one bandit round. Ends the loop when the estimate is sufficient or the
    /// budget is spent; otherwise records and returns a request for the teacher.
    pub fn evaluate_round<O>(&mut self, wa: &WorkArea, oracle: &O, params: &LoopParams) -> Result<Round>
    where
        O: CoverageOracle<Demo = D>,
    {
        if let Some(t) = self.terminated {
            return Ok(Round::Terminated(t));
        }
        if self.pending.is_some() {
            return Err(Error::InvalidParameter("a demonstration request is still open".into()));
        }
        let mut outcome = get_best_arm(wa, &self.demos, oracle, params.epsilon, params.delta, &mut self.rng)?;
        outcome.compact();
        let best = outcome.best_mu_hat;
        let request = if stopping_satisfied(best, params.epsilon, params.beta) {
            None
        } else {
            let failure = select_failed_task(outcome.best().failures())?;
            Some(DemoRequest {
                instance: failure.instance.clone(),
                region: wa.partition()[outcome.best_arm],
                arm_index: outcome.best_arm,
                failed_segment: failure.failed_segment,
                noise_seed: self.rng.random(),
            })
        };
        self.history.push(outcome);
        self.iteration += 1;
        Ok(match request {
            None => self.finish(Termination::Sufficient, params.beta),
            Some(_) if self.demos.len() >= params.max_demonstrations => {
                self.finish(Termination::BudgetExhausted, early_stop_beta(best, params.epsilon))
            }
            Some(req) => {
                self.pending = Some(req.clone());
                Round::Request(req)
            }
        })
    }

    /// Applies the teacher's answer to the open request.
    pub fn apply_reply(&mut self, reply: TeacherReply<D>, params: &LoopParams) -> Result<()> {
        if self.pending.take().is_none() {
            return Err(Error::InvalidParameter("no demonstration request is open".into()));
        }
        match reply {
            TeacherReply::Demonstration(d) => self.demos.push(d),
            TeacherReply::Refused(reason) => {
                log::info!("teacher refused: {reason}");
                let best = self.history.last().map_or(1.0, |o| o.best_mu_hat);
                self.finish(Termination::TeacherRefused, early_stop_beta(best, params.epsilon));
            }
        }
        Ok(())
    }
}

/// The failure whose plan broke in the earliest segment; the first listed on ties.
/// Failures without a segment are treated as later than any segment.
pub fn select_failed_task(failures: &[Failure]) -> Result<&Failure> {
    failures
        .iter()
        .min_by_key(|f| (f.failed_segment.unwrap_or(usize::MAX), f.sample_index))
        .ok_or(Error::EmptyFailureList)
}

/// Runs the loop to termination with a programmatic teacher, calling `on_iteration`
/// after every bandit round and every applied answer.
pub fn run_acquisition<O, Te, F>(
    state: &mut AcquisitionState<O::Demo>,
    wa: &WorkArea,
    oracle: &O,
    teacher: &mut Te,
    params: &LoopParams,
    mut on_iteration: F,
) -> Result<()>
where
    O: CoverageOracle,
    Te: Teacher<Demo = O::Demo>,
    F: FnMut(&AcquisitionState<O::Demo>) -> Result<()>,
{
    params.validate()?;
    loop {
        if let Some(req) = state.pending.clone() {
            let reply = teacher.demonstrate(&req)?;
            state.apply_reply(reply, params)?;
            on_iteration(state)?;
        }
        if state.is_done() {
            return Ok(());
        }
        state.evaluate_round(wa, oracle, params)?;
        if state.is_done() {
            on_iteration(state)?;
            return Ok(());
        }
    }
}
