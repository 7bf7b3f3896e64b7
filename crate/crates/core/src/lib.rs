//! Demonstration sufficiency for screw-geometry motion planning.
//!
//! A robot holding a few demonstrations of a manipulation task estimates, per
//! region of its work area, how often it fails to generate an executable plan
//! for a random task instance. A PAC best-arm bandit picks the worst region, a
//! teacher supplies one more demonstration there, and the loop repeats until
//! every region is covered with the requested confidence.
//!
//! Geometry and kinematics are generic over [`Real`] (`f32` or `f64`); the
//! statistical layers work in `f64`. The aliases below name the `f64` forms.

pub mod acquisition;
pub mod bandit;
pub mod demonstration;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod kinematics;
pub mod planner;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Pose64 = geometry::Pose<f64>;
pub type Pose32 = geometry::Pose<f32>;
pub type Vec3f64 = geometry::Vec3<f64>;
pub type Region64 = geometry::Region<f64>;
pub type ScrewParameters64 = geometry::ScrewParameters<f64>;
