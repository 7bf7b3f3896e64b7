use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pose;
use crate::kinematics::JointConfig;
use crate::scalar::Real;

/// Poses of the task-relevant objects; `object_poses[0]` is the reference object
/// whose frame demonstrations are expressed in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct TaskInstance<T> {
    pub object_poses: Vec<Pose<T>>,
}

impl<T: Real> TaskInstance<T> {
    pub fn single(pose: Pose<T>) -> Self {
        Self { object_poses: vec![pose] }
    }

    pub fn object_count(&self) -> usize {
        self.object_poses.len()
    }

    /// Pose of the reference object.
    pub fn reference_pose(&self) -> &Pose<T> {
        &self.object_poses[0]
    }
}

/// Minimum pose distance between consecutive guiding poses.
const DISTINCT_GUIDES: f64 = 1e-12;

/// A demonstration: the recorded joint trajectory, its guiding poses in the robot
/// base frame, the instance it was given at, and the guides relative to that
/// instance's reference object.
///
/// Serialized as `{"anchor", "guides_object_frame", "joint_traj"}`; base-frame
/// guides are rebuilt on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DemoRepr<T>", into = "DemoRepr<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Demonstration<T> {
    joint_trajectory: Vec<JointConfig<T>>,
    guiding_poses: Vec<Pose<T>>,
    anchor: TaskInstance<T>,
    object_frame_guides: Vec<Pose<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
struct DemoRepr<T> {
    anchor: TaskInstance<T>,
    guides_object_frame: Vec<Pose<T>>,
    #[serde(default)]
    joint_traj: Vec<JointConfig<T>>,
}

impl<T: Real> TryFrom<DemoRepr<T>> for Demonstration<T> {
    type Error = Error;

    fn try_from(r: DemoRepr<T>) -> Result<Self> {
        Demonstration::from_object_frame(r.anchor, r.guides_object_frame, r.joint_traj)
    }
}

impl<T: Real> From<Demonstration<T>> for DemoRepr<T> {
    fn from(d: Demonstration<T>) -> Self {
        DemoRepr { anchor: d.anchor, guides_object_frame: d.object_frame_guides, joint_traj: d.joint_trajectory }
    }
}

impl<T: Real> Demonstration<T> {
    /// Builds a demonstration from base-frame guiding poses.
    pub fn new(anchor: TaskInstance<T>, guiding_poses: Vec<Pose<T>>, joint_trajectory: Vec<JointConfig<T>>) -> Result<Self> {
        validate(&anchor, &guiding_poses)?;
        let inv = anchor.reference_pose().inverse();
        let object_frame_guides = guiding_poses.iter().map(|g| inv.compose(g)).collect();
        Ok(Self { joint_trajectory, guiding_poses, anchor, object_frame_guides })
    }

    /// Builds a demonstration from guides expressed in the anchor's reference-object frame.
    pub fn from_object_frame(
        anchor: TaskInstance<T>,
        object_frame_guides: Vec<Pose<T>>,
        joint_trajectory: Vec<JointConfig<T>>,
    ) -> Result<Self> {
        if anchor.object_poses.is_empty() {
            return Err(Error::InvalidDemonstration("anchor has no objects".into()));
        }
        let reference = *anchor.reference_pose();
        let guiding_poses: Vec<_> = object_frame_guides.iter().map(|g| reference.compose(g)).collect();
        validate(&anchor, &guiding_poses)?;
        Ok(Self { joint_trajectory, guiding_poses, anchor, object_frame_guides })
    }

    pub fn joint_trajectory(&self) -> &[JointConfig<T>] {
        &self.joint_trajectory
    }

    pub fn guiding_poses(&self) -> &[Pose<T>] {
        &self.guiding_poses
    }

    pub fn anchor(&self) -> &TaskInstance<T> {
        &self.anchor
    }

    pub fn object_frame_guides(&self) -> &[Pose<T>] {
        &self.object_frame_guides
    }

    pub fn segment_count(&self) -> usize {
        self.guiding_poses.len() - 1
    }
}

fn validate<T: Real>(anchor: &TaskInstance<T>, guides: &[Pose<T>]) -> Result<()> {
    if anchor.object_poses.is_empty() {
        return Err(Error::InvalidDemonstration("anchor has no objects".into()));
    }
    if guides.len() < 2 {
        return Err(Error::InvalidDemonstration(format!("need at least 2 guiding poses, got {}", guides.len())));
    }
    if let Some(i) = guides.windows(2).position(|w| w[0].distance(&w[1]) <= T::lit(DISTINCT_GUIDES)) {
        return Err(Error::InvalidDemonstration(format!("guiding poses {i} and {} coincide", i + 1)));
    }
    Ok(())
}
