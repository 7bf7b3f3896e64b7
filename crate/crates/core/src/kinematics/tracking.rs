use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec3};
use crate::kinematics::fk::fill_jacobian;
use crate::kinematics::linalg::cholesky_solve;
use crate::kinematics::{JointConfig, ManipulatorModel};
use crate::scalar::Real;

/// Damped least squares resolved-rate settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Damping `lambda`; the normal equations use `J^T J + lambda^2 I`.
    pub damping: f64,
    /// Largest joint change per iteration (rad or m); larger steps are scaled down.
    pub max_step: f64,
    pub max_iterations: usize,
    /// Pose-distance tolerance for reaching a waypoint.
    pub tolerance: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self { damping: 1e-4, max_step: 0.2, max_iterations: 200, tolerance: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackStatus {
    Success,
    JointLimitViolation,
    IkDivergence,
}

impl TrackStatus {
    pub fn is_success(self) -> bool {
        self == TrackStatus::Success
    }
}

/// A pose target tagged with the guiding-pose segment that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Waypoint<T> {
    pub pose: Pose<T>,
    pub segment_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct TrackResult<T> {
    pub status: TrackStatus,
    /// One configuration per reached waypoint.
    pub joint_path: Vec<JointConfig<T>>,
    pub failed_waypoint_index: Option<usize>,
    pub failed_segment_index: Option<usize>,
}

impl<T: Real> TrackResult<T> {
    pub fn is_success(&self) -> bool {
        self.status == TrackStatus::Success
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IkSolution<T> {
    pub status: TrackStatus,
    /// Final iterate; within limits unless the status says otherwise.
    pub config: JointConfig<T>,
    pub iterations: usize,
}

enum Converge {
    Reached(usize),
    Limit(usize),
    Diverged(usize),
}

/// Scratch space reused across iterations and waypoints.
struct Dls<'m, T> {
    model: &'m ManipulatorModel<T>,
    damping: T,
    max_step: T,
    tolerance: T,
    max_iterations: usize,
    frames: Vec<(Vec3<T>, Vec3<T>)>,
    jac: Vec<T>,
    normal: Vec<T>,
    rhs: Vec<T>,
}

impl<'m, T: Real> Dls<'m, T> {
    fn new(model: &'m ManipulatorModel<T>, cfg: &TrackerConfig) -> Self {
        let d = model.dof();
        Self {
            model,
            damping: T::lit(cfg.damping),
            max_step: T::lit(cfg.max_step),
            tolerance: T::lit(cfg.tolerance),
            max_iterations: cfg.max_iterations,
            frames: Vec::with_capacity(d),
            jac: Vec::with_capacity(6 * d),
            normal: vec![T::zero(); d * d],
            rhs: vec![T::zero(); d],
        }
    }

    fn converge(&mut self, q: &mut [T], target: &Pose<T>) -> Converge {
        let d = self.model.dof();
        let lambda2 = self.damping * self.damping;
        // Out of reach: no configuration can get there, so do not let the iteration
        // wander into a limit and misreport the cause.
        let from_base = (target.translation() - self.model.base().translation()).norm();
        if from_base > self.model.reach() + self.tolerance {
            return Converge::Diverged(0);
        }
        for it in 0..self.max_iterations {
            let ee = fill_jacobian(self.model, q, &mut self.frames, &mut self.jac);
            if ee.distance(target) < self.tolerance {
                return Converge::Reached(it);
            }
            let dp = target.translation() - ee.translation();
            let dr = (target.rotation() * ee.rotation().conjugate()).to_rotation_vector();
            let err = [dp.x, dp.y, dp.z, dr.x, dr.y, dr.z];
            let jac = &self.jac;
            for a in 0..d {
                self.rhs[a] = (0..6).fold(T::zero(), |s, r| s + jac[r * d + a] * err[r]);
                for b in a..d {
                    let v = (0..6).fold(T::zero(), |s, r| s + jac[r * d + a] * jac[r * d + b]);
                    self.normal[a * d + b] = v;
                    self.normal[b * d + a] = v;
                }
                self.normal[a * d + a] = self.normal[a * d + a] + lambda2;
            }
            if !cholesky_solve(&mut self.normal, &mut self.rhs, d) {
                return Converge::Diverged(it);
            }
            let largest = self.rhs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let scale = if largest > self.max_step { self.max_step / largest } else { T::one() };
            for (qi, dq) in q.iter_mut().zip(&self.rhs) {
                *qi = *qi + *dq * scale;
            }
            if self.model.first_limit_violation(q).is_some() {
                return Converge::Limit(it + 1);
            }
        }
        let ee = crate::kinematics::fk::chain(self.model, q, None);
        if ee.distance(target) < self.tolerance {
            Converge::Reached(self.max_iterations)
        } else {
            Converge::Diverged(self.max_iterations)
        }
    }
}

/// Damped least squares inverse kinematics for a single target, starting at `seed`.
/// Leaving the joint limits at any iterate is a failure.
pub fn solve_ik<T: Real>(
    m: &ManipulatorModel<T>,
    seed: &JointConfig<T>,
    target: &Pose<T>,
    cfg: &TrackerConfig,
) -> Result<IkSolution<T>> {
    m.check_dimension(seed)?;
    let mut q = seed.0.clone();
    let mut dls = Dls::new(m, cfg);
    let (status, iterations) = match dls.converge(&mut q, target) {
        Converge::Reached(i) => (TrackStatus::Success, i),
        Converge::Limit(i) => (TrackStatus::JointLimitViolation, i),
        Converge::Diverged(i) => (TrackStatus::IkDivergence, i),
    };
    Ok(IkSolution { status, config: JointConfig(q), iterations })
}

/// Resolved-rate tracking of `waypoints` in order, starting at `q0`.
///
/// `q0` must be within limits and its forward kinematics within tolerance of the
/// first waypoint; violations of that precondition are errors, while failing to
/// follow the path is reported in the returned [`TrackResult`].
pub fn track_pose_path<T: Real>(
    m: &ManipulatorModel<T>,
    q0: &JointConfig<T>,
    waypoints: &[Waypoint<T>],
    cfg: &TrackerConfig,
) -> Result<TrackResult<T>> {
    m.check_dimension(q0)?;
    if !m.within_limits(q0) {
        return Err(Error::InvalidParameter("start configuration violates joint limits".into()));
    }
    let Some(first) = waypoints.first() else {
        return Err(Error::PathTooShort { min: 1, actual: 0 });
    };
    let start = crate::kinematics::fk::chain(m, q0.as_slice(), None);
    let gap = start.distance(&first.pose);
    if !(gap < T::lit(cfg.tolerance)) {
        return Err(Error::StartMismatch { distance: gap.to_f64_lossy(), tolerance: cfg.tolerance });
    }

    let mut dls = Dls::new(m, cfg);
    let mut q = q0.0.clone();
    let mut joint_path = Vec::with_capacity(waypoints.len());
    for (i, wp) in waypoints.iter().enumerate() {
        let status = match dls.converge(&mut q, &wp.pose) {
            Converge::Reached(_) => {
                joint_path.push(JointConfig(q.clone()));
                continue;
            }
            Converge::Limit(_) => TrackStatus::JointLimitViolation,
            Converge::Diverged(_) => TrackStatus::IkDivergence,
        };
        return Ok(TrackResult {
            status,
            joint_path,
            failed_waypoint_index: Some(i),
            failed_segment_index: Some(wp.segment_index),
        });
    }
    Ok(TrackResult { status: TrackStatus::Success, joint_path, failed_waypoint_index: None, failed_segment_index: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{forward_kinematics, planar_arm};

    #[test]
    fn stationary_path_succeeds_with_constant_configs() {
        let arm = planar_arm(&[1.0, 1.0], 0.0, (-3.0, 3.0));
        let q0 = JointConfig::new(vec![0.3, 0.7]);
        let pose = forward_kinematics(&arm, &q0).unwrap();
        let wps = vec![Waypoint { pose, segment_index: 0 }; 5];
        let r = track_pose_path(&arm, &q0, &wps, &TrackerConfig::default()).unwrap();
        assert!(r.is_success());
        assert_eq!(r.joint_path.len(), 5);
        assert!(r.joint_path.iter().all(|q| *q == q0));
    }

    #[test]
    fn start_mismatch_is_an_error_not_a_failure() {
        let arm = planar_arm(&[1.0, 1.0], 0.0, (-3.0, 3.0));
        let q0 = JointConfig::new(vec![0.0, 0.0]);
        let wps = [Waypoint { pose: Pose::planar(1.0, 1.0, 0.0, 1.0), segment_index: 0 }];
        let err = track_pose_path(&arm, &q0, &wps, &TrackerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::StartMismatch { .. }));
    }

    #[test]
    fn unreachable_waypoint_diverges() {
        let arm = planar_arm(&[1.0, 1.0], 0.0, (-3.0, 3.0));
        let q0 = JointConfig::new(vec![0.1, 0.4]);
        let start = forward_kinematics(&arm, &q0).unwrap();
        let far = Pose::planar(3.5, 0.0, 0.0, 0.0);
        let wps = [Waypoint { pose: start, segment_index: 0 }, Waypoint { pose: far, segment_index: 1 }];
        let r = track_pose_path(&arm, &q0, &wps, &TrackerConfig::default()).unwrap();
        assert_eq!(r.status, TrackStatus::IkDivergence);
        assert_eq!(r.failed_waypoint_index, Some(1));
        assert_eq!(r.failed_segment_index, Some(1));
        assert_eq!(r.joint_path.len(), 1);
    }

    #[test]
    fn ik_reaches_a_reachable_target() {
        let arm = planar_arm(&[1.0, 1.0], 0.0, (-3.0, 3.0));
        let target = forward_kinematics(&arm, &JointConfig::new(vec![0.8, 1.1])).unwrap();
        let sol = solve_ik(&arm, &JointConfig::new(vec![0.5, 0.6]), &target, &TrackerConfig::default()).unwrap();
        assert_eq!(sol.status, TrackStatus::Success);
        let reached = forward_kinematics(&arm, &sol.config).unwrap();
        assert!(reached.distance(&target) < 1e-4);
    }
}
