//! Feasibility of a demonstration at a new task instance: transfer its guiding
//! poses to the new object pose, interpolate each segment with ScLERP and track
//! the result on the simulated arm.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bandit::{CoverageOracle, Outcome};
use crate::demonstration::{Demonstration, TaskInstance};
use crate::error::{Error, Result};
use crate::geometry::{Pose, ScrewPath};
use crate::kinematics::{solve_ik, track_pose_path, JointConfig, ManipulatorModel, TrackResult, TrackerConfig, Waypoint};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub tracker: TrackerConfig,
    /// Largest pose distance between consecutive waypoints.
    pub waypoint_step: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { tracker: TrackerConfig::default(), waypoint_step: 0.02 }
    }
}

/// How the arm gets to the first guiding pose.
#[derive(Clone, Debug, PartialEq)]
pub enum StartPolicy<T> {
    /// Inverse kinematics from the model's home configuration.
    HomeIk,
    /// A known configuration; it must already be at the first guide.
    From(JointConfig<T>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct PlanAttempt<T> {
    pub feasible: bool,
    pub track: TrackResult<T>,
    pub transferred_guides: Vec<Pose<T>>,
    /// Position of the demonstration in the set it was drawn from.
    pub demonstration_id: usize,
    pub waypoints: Vec<Waypoint<T>>,
}

impl<T: Real> PlanAttempt<T> {
    pub fn failed_segment(&self) -> Option<usize> {
        self.track.failed_segment_index
    }

    /// One row per waypoint: segment, pose (`qw..qz`, `tx..tz`) and the reached
    /// joint configuration (empty past the failure point).
    pub fn write_waypoint_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let dof = self.track.joint_path.first().map_or(0, |q| q.len());
        let joints: Vec<String> = (0..dof).map(|j| format!(",q{j}")).collect();
        writeln!(out, "segment_index,qw,qx,qy,qz,tx,ty,tz{}", joints.concat())?;
        for (i, wp) in self.waypoints.iter().enumerate() {
            let q = wp.pose.rotation();
            let t = wp.pose.translation();
            write!(out, "{},{},{},{},{},{},{},{}", wp.segment_index, q.w, q.x, q.y, q.z, t.x, t.y, t.z)?;
            match self.track.joint_path.get(i) {
                Some(cfg) => cfg.as_slice().iter().try_for_each(|v| write!(out, ",{v}"))?,
                None => (0..dof).try_for_each(|_| write!(out, ","))?,
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// The demonstration's guides re-anchored at `target`: `target_pose * guide_obj`.
pub fn transfer_guiding_poses<T: Real>(demo: &Demonstration<T>, target: &TaskInstance<T>) -> Result<Vec<Pose<T>>> {
    let expected = demo.anchor().object_count();
    if target.object_count() != expected {
        return Err(Error::ObjectCountMismatch { expected, actual: target.object_count() });
    }
    let reference = target.reference_pose();
    Ok(demo.object_frame_guides().iter().map(|g| reference.compose(g)).collect())
}

/// ScLERP waypoints along consecutive guides, each tagged with its segment. Every
/// segment is split evenly so that neighbouring waypoints are at most `step` apart.
pub fn discretize_guides<T: Real>(guides: &[Pose<T>], step: f64) -> Result<Vec<Waypoint<T>>> {
    if guides.len() < 2 {
        return Err(Error::PathTooShort { min: 2, actual: guides.len() });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("waypoint step must be positive, got {step}")));
    }
    let step = T::lit(step);
    let mut out = vec![Waypoint { pose: guides[0], segment_index: 0 }];
    for (s, pair) in guides.windows(2).enumerate() {
        let path = ScrewPath::new(&pair[0], &pair[1]);
        let mut n = (path.length() / step).ceil().to_usize().unwrap_or(1).max(1);
        // Chord length is not linear in tau for helical motion; refine until it fits.
        while path.at(T::one() / T::lit(n as f64)).distance(&pair[0]) > step * T::lit(1.0 + 1e-9) {
            n += 1;
        }
        for k in 1..n {
            out.push(Waypoint { pose: path.at(T::lit(k as f64) / T::lit(n as f64)), segment_index: s });
        }
        out.push(Waypoint { pose: pair[1], segment_index: s });
    }
    Ok(out)
}

/// Tracks the ScLERP interpolation of `guides`. A start configuration that cannot
/// be found counts as a failure at the first waypoint of segment 0.
pub fn plan_through<T: Real>(
    m: &ManipulatorModel<T>,
    guides: &[Pose<T>],
    start: &StartPolicy<T>,
    cfg: &PlannerConfig,
) -> Result<(TrackResult<T>, Vec<Waypoint<T>>)> {
    let waypoints = discretize_guides(guides, cfg.waypoint_step)?;
    let q0 = match start {
        StartPolicy::From(q) => q.clone(),
        StartPolicy::HomeIk => {
            let ik = solve_ik(m, m.home(), &guides[0], &cfg.tracker)?;
            if !ik.status.is_success() {
                let track = TrackResult {
                    status: ik.status,
                    joint_path: Vec::new(),
                    failed_waypoint_index: Some(0),
                    failed_segment_index: Some(0),
                };
                return Ok((track, waypoints));
            }
            ik.config
        }
    };
    Ok((track_pose_path(m, &q0, &waypoints, &cfg.tracker)?, waypoints))
}

/// Whether `demo` yields an executable plan at `x`, starting from home.
pub fn has_motion_plan<T: Real>(
    x: &TaskInstance<T>,
    demo: &Demonstration<T>,
    demonstration_id: usize,
    m: &ManipulatorModel<T>,
    cfg: &PlannerConfig,
) -> Result<PlanAttempt<T>> {
    has_motion_plan_from(x, demo, demonstration_id, m, cfg, &StartPolicy::HomeIk)
}

pub fn has_motion_plan_from<T: Real>(
    x: &TaskInstance<T>,
    demo: &Demonstration<T>,
    demonstration_id: usize,
    m: &ManipulatorModel<T>,
    cfg: &PlannerConfig,
    start: &StartPolicy<T>,
) -> Result<PlanAttempt<T>> {
    let transferred_guides = transfer_guiding_poses(demo, x)?;
    let (track, waypoints) = plan_through(m, &transferred_guides, start, cfg)?;
    Ok(PlanAttempt { feasible: track.is_success(), track, transferred_guides, demonstration_id, waypoints })
}

/// Tries the demonstrations in order and returns the first feasible attempt, or,
/// when none is feasible, the attempt that failed in the earliest segment (first
/// such demonstration on ties).
pub fn covered<T: Real>(
    x: &TaskInstance<T>,
    demos: &[Demonstration<T>],
    m: &ManipulatorModel<T>,
    cfg: &PlannerConfig,
) -> Result<PlanAttempt<T>> {
    if demos.is_empty() {
        return Err(Error::EmptyDemonstrationSet);
    }
    let mut best: Option<PlanAttempt<T>> = None;
    for (id, demo) in demos.iter().enumerate() {
        let attempt = has_motion_plan(x, demo, id, m, cfg)?;
        if attempt.feasible {
            return Ok(attempt);
        }
        let earlier = best
            .as_ref()
            .is_none_or(|b| attempt.failed_segment().unwrap_or(usize::MAX) < b.failed_segment().unwrap_or(usize::MAX));
        if earlier {
            best = Some(attempt);
        }
    }
    Ok(best.expect("at least one demonstration"))
}

/// Planning on a simulated arm as a coverage oracle.
#[derive(Clone, Debug)]
pub struct PlanningWorld {
    pub model: ManipulatorModel<f64>,
    pub config: PlannerConfig,
}

impl CoverageOracle for PlanningWorld {
    type Demo = Demonstration<f64>;

    fn evaluate(&self, x: &TaskInstance<f64>, demos: &[Demonstration<f64>]) -> Result<Outcome> {
        let attempt = covered(x, demos, &self.model, &self.config)?;
        Ok(Outcome { covered: attempt.feasible, failed_segment: attempt.failed_segment() })
    }
}
