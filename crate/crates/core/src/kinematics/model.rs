use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pose, Quat, Vec3};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKind {
    Revolute,
    Prismatic,
}

/// One joint of a serial chain. `origin` is the fixed transform from the previous
/// joint frame; the joint then rotates about (or slides along) `axis` in its own frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Joint<T> {
    pub kind: JointKind,
    pub axis: Vec3<T>,
    pub origin: Pose<T>,
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Joint<T> {
    pub fn motion(&self, value: T) -> Pose<T> {
        match self.kind {
            JointKind::Revolute => Pose::from_rotation(Quat::from_axis_angle(self.axis, value)),
            JointKind::Prismatic => Pose::from_translation(self.axis * value),
        }
    }

    pub fn within_limits(&self, value: T) -> bool {
        value >= self.lo && value <= self.hi
    }
}

/// Joint values, radians for revolute and meters for prismatic joints.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct JointConfig<T>(pub Vec<T>);

impl<T: Real> JointConfig<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr<T>", into = "ModelRepr<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ManipulatorModel<T> {
    name: String,
    joints: Vec<Joint<T>>,
    base: Pose<T>,
    tool: Pose<T>,
    home: JointConfig<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
struct ModelRepr<T> {
    #[serde(default)]
    name: String,
    joints: Vec<Joint<T>>,
    #[serde(default)]
    base: Pose<T>,
    #[serde(default)]
    tool: Pose<T>,
    #[serde(default)]
    home: Option<JointConfig<T>>,
}

impl<T: Real> TryFrom<ModelRepr<T>> for ManipulatorModel<T> {
    type Error = Error;

    fn try_from(r: ModelRepr<T>) -> Result<Self> {
        let mut m = ManipulatorModel::new(r.name, r.joints, r.base, r.tool)?;
        if let Some(home) = r.home {
            m = m.with_home(home)?;
        }
        Ok(m)
    }
}

impl<T: Real> From<ManipulatorModel<T>> for ModelRepr<T> {
    fn from(m: ManipulatorModel<T>) -> Self {
        ModelRepr { name: m.name, joints: m.joints, base: m.base, tool: m.tool, home: Some(m.home) }
    }
}

const PLANAR_3R: &str = include_str!("../../data/models/planar-3r.json");
const BAXTER_LIKE_7DOF: &str = include_str!("../../data/models/baxter-like-7dof.json");

/// Names accepted by [`ManipulatorModel::bundled`].
pub const BUNDLED_MODELS: [&str; 2] = ["planar-3r", "baxter-like-7dof"];

impl<T: Real> ManipulatorModel<T> {
    /// Validates joint axes and limits. The home configuration defaults to the
    /// midpoint of every joint range.
    pub fn new(name: impl Into<String>, joints: Vec<Joint<T>>, base: Pose<T>, tool: Pose<T>) -> Result<Self> {
        if joints.len() < 2 {
            return Err(Error::InvalidModel(format!("need at least 2 joints, got {}", joints.len())));
        }
        let mut joints = joints;
        for (i, j) in joints.iter_mut().enumerate() {
            if !(j.lo < j.hi) {
                return Err(Error::InvalidModel(format!("joint {i}: limit lo {} must be < hi {}", j.lo, j.hi)));
            }
            j.axis = j
                .axis
                .try_normalize(T::lit(1e-9))
                .ok_or_else(|| Error::InvalidModel(format!("joint {i}: zero axis")))?;
        }
        let home = JointConfig(joints.iter().map(|j| (j.lo + j.hi) * T::lit(0.5)).collect());
        Ok(Self { name: name.into(), joints, base, tool, home })
    }

    pub fn with_home(mut self, home: JointConfig<T>) -> Result<Self> {
        self.check_dimension(&home)?;
        if !self.within_limits(&home) {
            return Err(Error::InvalidModel("home configuration violates joint limits".into()));
        }
        self.home = home;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn joints(&self) -> &[Joint<T>] {
        &self.joints
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn base(&self) -> &Pose<T> {
        &self.base
    }

    pub fn tool(&self) -> &Pose<T> {
        &self.tool
    }

    pub fn home(&self) -> &JointConfig<T> {
        &self.home
    }

    pub fn check_dimension(&self, q: &JointConfig<T>) -> Result<()> {
        if q.len() != self.dof() {
            return Err(Error::DimensionMismatch { expected: self.dof(), actual: q.len() });
        }
        Ok(())
    }

    pub fn within_limits(&self, q: &JointConfig<T>) -> bool {
        q.len() == self.dof() && self.joints.iter().zip(&q.0).all(|(j, v)| j.within_limits(*v))
    }

    /// Upper bound on the distance from the base origin to the tool origin over
    /// all configurations: the sum of every fixed offset plus the longest travel
    /// of each prismatic joint.
    pub fn reach(&self) -> T {
        let travel = |j: &Joint<T>| match j.kind {
            JointKind::Revolute => T::zero(),
            JointKind::Prismatic => j.lo.abs().max(j.hi.abs()),
        };
        self.joints.iter().fold(self.tool.translation().norm(), |r, j| r + j.origin.translation().norm() + travel(j))
    }

    /// Index of the first joint outside its limits.
    pub fn first_limit_violation(&self, q: &[T]) -> Option<usize> {
        self.joints.iter().zip(q).position(|(j, v)| !j.within_limits(*v))
    }
}

impl<T: Real + serde::de::DeserializeOwned> ManipulatorModel<T> {
    /// One of the models shipped with the crate; see [`BUNDLED_MODELS`].
    pub fn bundled(name: &str) -> Result<Self> {
        let text = match name {
            "planar-3r" => PLANAR_3R,
            "baxter-like-7dof" => BAXTER_LIKE_7DOF,
            other => return Err(Error::UnknownModel(other.to_string())),
        };
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_models_load() {
        let planar = ManipulatorModel::<f64>::bundled("planar-3r").unwrap();
        assert_eq!(planar.dof(), 3);
        assert!(planar.within_limits(planar.home()));
        let arm = ManipulatorModel::<f64>::bundled("baxter-like-7dof").unwrap();
        assert_eq!(arm.dof(), 7);
        assert!(arm.within_limits(arm.home()));
        assert!(matches!(ManipulatorModel::<f64>::bundled("ur5"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn rejects_bad_limits_and_short_chains() {
        let j = |lo, hi| Joint {
            kind: JointKind::Revolute,
            axis: Vec3::unit_z(),
            origin: Pose::identity(),
            lo,
            hi,
        };
        assert!(ManipulatorModel::new("a", vec![j(-1.0, 1.0)], Pose::identity(), Pose::identity()).is_err());
        assert!(
            ManipulatorModel::new("b", vec![j(-1.0, 1.0), j(1.0, 1.0)], Pose::identity(), Pose::identity()).is_err()
        );
    }

    #[test]
    fn json_schema_fields() {
        let text = r#"{"joints":[
            {"kind":"revolute","axis":[0,0,1],"origin":{"q":[1,0,0,0],"t":[0,0,0]},"lo":-1,"hi":1},
            {"kind":"prismatic","axis":[1,0,0],"origin":{"q":[1,0,0,0],"t":[1,0,0]},"lo":0,"hi":0.5}],
            "base":{"q":[1,0,0,0],"t":[0,0,0]},"tool":{"q":[1,0,0,0],"t":[0,0,0]}}"#;
        let m = ManipulatorModel::<f64>::from_json(text).unwrap();
        assert_eq!(m.joints()[1].kind, JointKind::Prismatic);
        assert_eq!(m.home().as_slice(), &[0.0, 0.25]);
    }
}
