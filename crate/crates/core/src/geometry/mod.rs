//! Rigid-body pose algebra, screw decomposition, interpolation and region sampling.

mod pose;
mod quaternion;
mod region;
mod screw;
mod vector;

pub use pose::{DualQuat, Pose};
pub use quaternion::Quat;
pub use region::{uniform_quaternion, OrientationSet, Region};
pub use screw::{sclerp, screw_exp, screw_log, ScrewParameters, ScrewPath};
pub use vector::Vec3;
