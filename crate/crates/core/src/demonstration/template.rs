use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec3};
use crate::scalar::Real;

pub const BUNDLED_TEMPLATES: [&str; 4] = ["pour", "scoop", "planar-pour", "planar-scoop"];

/// A task demonstrated as a list of tool poses in the reference object's frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Template<T> {
    pub name: String,
    pub waypoints_object_frame: Vec<Pose<T>>,
}

impl<T: Real> Template<T> {
    pub fn custom(name: impl Into<String>, waypoints_object_frame: Vec<Pose<T>>) -> Result<Self> {
        let t = Self { name: name.into(), waypoints_object_frame };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let w = &self.waypoints_object_frame;
        if w.len() < 2 {
            return Err(Error::InvalidDemonstration(format!("template {:?} needs at least 2 waypoints", self.name)));
        }
        if w.windows(2).any(|p| p[0].distance(&p[1]) <= T::lit(1e-12)) {
            return Err(Error::InvalidDemonstration(format!("template {:?} repeats a waypoint", self.name)));
        }
        Ok(())
    }

    /// Base-frame tool poses for an object at `object`, with the template turned by
    /// `heading` radians about the object's vertical axis.
    pub fn instantiate(&self, object: &Pose<T>, heading: T) -> Vec<Pose<T>> {
        let frame = object.compose(&Pose::from_axis_angle(Vec3::unit_z(), heading));
        self.waypoints_object_frame.iter().map(|w| frame.compose(w)).collect()
    }
}

impl<T: Real + serde::de::DeserializeOwned> Template<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        t.validate()?;
        Ok(t)
    }

    pub fn bundled(name: &str) -> Result<Self> {
        let text = match name {
            "pour" => include_str!("../../data/templates/pour.json"),
            "scoop" => include_str!("../../data/templates/scoop.json"),
            "planar-pour" => include_str!("../../data/templates/planar-pour.json"),
            "planar-scoop" => include_str!("../../data/templates/planar-scoop.json"),
            other => return Err(Error::UnknownTemplate(other.to_string())),
        };
        Self::from_json(text)
    }
}
