//! Simulated serial manipulator: forward kinematics, geometric Jacobian and
//! damped least squares path tracking with hard joint limits.

mod fk;
mod linalg;
mod model;
mod tracking;

pub use fk::{forward_kinematics, jacobian, Jacobian};
pub use model::{Joint, JointConfig, JointKind, ManipulatorModel, BUNDLED_MODELS};
pub use tracking::{solve_ik, track_pose_path, IkSolution, TrackResult, TrackStatus, TrackerConfig, Waypoint};

use crate::geometry::{Pose, Vec3};
use crate::scalar::Real;

/// Planar chain of revolute joints about +z with the given link lengths along +x,
/// a tool offset of `tool` along +x, and identical `(lo, hi)` limits on every joint.
pub fn planar_arm<T: Real>(links: &[T], tool: T, limits: (T, T)) -> ManipulatorModel<T> {
    let mut joints = Vec::with_capacity(links.len());
    let mut offset = T::zero();
    for &len in links {
        joints.push(Joint {
            kind: JointKind::Revolute,
            axis: Vec3::unit_z(),
            origin: Pose::from_translation(Vec3::new(offset, T::zero(), T::zero())),
            lo: limits.0,
            hi: limits.1,
        });
        offset = len;
    }
    let tool_pose = Pose::from_translation(Vec3::new(offset + tool, T::zero(), T::zero()));
    ManipulatorModel::new("planar", joints, Pose::identity(), tool_pose).expect("valid planar arm")
}
