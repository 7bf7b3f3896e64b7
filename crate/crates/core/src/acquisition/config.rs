use serde::{Deserialize, Serialize};

use crate::acquisition::LoopParams;
use crate::bandit::WorkArea;
use crate::demonstration::{Heading, Template};
use crate::error::{Error, Result};
use crate::geometry::{Region, Vec3};
use crate::kinematics::ManipulatorModel;
use crate::planner::PlannerConfig;
use crate::synthetic::WeakZone;

/// A manipulator given by bundled name or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Bundled(String),
    Inline(ManipulatorModel<f64>),
}

impl ModelSource {
    pub fn load(&self) -> Result<ManipulatorModel<f64>> {
        match self {
            ModelSource::Bundled(name) => ManipulatorModel::bundled(name),
            ModelSource::Inline(m) => Ok(m.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemplateSource {
    Bundled(String),
    Inline(Template<f64>),
}

impl TemplateSource {
    pub fn load(&self) -> Result<Template<f64>> {
        match self {
            TemplateSource::Bundled(name) => Template::bundled(name),
            TemplateSource::Inline(t) => Template::custom(t.name.clone(), t.waypoints_object_frame.clone()),
        }
    }
}

fn default_threshold() -> f64 {
    5e-3
}

/// What decides coverage, and how the simulated teacher behaves in it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorldConfig {
    /// Screw-geometry planning on a simulated arm.
    Planner {
        model: ModelSource,
        template: TemplateSource,
        #[serde(default)]
        placement_noise: f64,
        #[serde(default)]
        heading: Heading,
        #[serde(default = "default_threshold")]
        segmentation_threshold: f64,
        #[serde(default)]
        planner: PlannerConfig,
    },
    /// Each demonstration covers a ball around where it was given.
    Disc {
        radius: f64,
        #[serde(default)]
        weak_zones: Vec<WeakZone>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeacherKind {
    #[default]
    Simulated,
    /// Answers come from a person through the service.
    Interactive,
}

fn default_epsilon() -> f64 {
    0.1
}
fn default_delta() -> f64 {
    0.1
}
fn default_beta() -> f64 {
    0.9
}
fn default_k() -> usize {
    4
}
fn default_budget() -> usize {
    32
}
fn default_work_area() -> Region<f64> {
    Region::planar(0.71, 1.08, -0.24, 0.78, 0.0).expect("valid default work area")
}

/// Acquisition run description; the JSON config file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_work_area")]
    pub work_area: Region<f64>,
    pub world: WorldConfig,
    #[serde(default)]
    pub teacher: TeacherKind,
    #[serde(default = "default_budget")]
    pub max_demonstrations: usize,
    #[serde(default)]
    pub seed: u64,
    /// Object positions of the initial demonstrations; the work-area centre if empty.
    #[serde(default)]
    pub initial_anchors: Vec<Vec3<f64>>,
}

impl AcquisitionConfig {
    /// Planar three-joint arm scooping on the default desk.
    pub fn planar_default() -> Self {
        Self {
            epsilon: default_epsilon(),
            delta: default_delta(),
            beta: default_beta(),
            k: default_k(),
            work_area: default_work_area(),
            world: WorldConfig::Planner {
                model: ModelSource::Bundled("planar-3r".into()),
                template: TemplateSource::Bundled("planar-scoop".into()),
                placement_noise: 0.01,
                heading: Heading::FromBase,
                segmentation_threshold: default_threshold(),
                planner: PlannerConfig::default(),
            },
            teacher: TeacherKind::Simulated,
            max_demonstrations: default_budget(),
            seed: 0,
            initial_anchors: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> LoopParams {
        LoopParams {
            epsilon: self.epsilon,
            delta: self.delta,
            beta: self.beta,
            max_demonstrations: self.max_demonstrations,
        }
    }

    pub fn build_work_area(&self) -> Result<WorkArea> {
        WorkArea::new(self.work_area, self.k)
    }

    pub fn anchors(&self) -> Vec<Vec3<f64>> {
        if self.initial_anchors.is_empty() {
            vec![self.work_area.center()]
        } else {
            self.initial_anchors.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be positive".into()));
        }
        if self.max_demonstrations == 0 {
            return Err(Error::InvalidConfig("max_demonstrations must be positive".into()));
        }
        if let Some(a) = self.initial_anchors.iter().find(|a| !self.work_area.contains_position(**a)) {
            return Err(Error::InvalidConfig(format!("initial anchor {:?} lies outside the work area", a.to_array())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_uses_defaults() {
        let cfg = AcquisitionConfig::from_json(r#"{"world":{"kind":"disc","radius":0.2}}"#).unwrap();
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.max_demonstrations, 32);
        assert_eq!(cfg.teacher, TeacherKind::Simulated);
        assert_eq!(cfg.anchors(), vec![cfg.work_area.center()]);
    }

    #[test]
    fn planar_default_round_trips() {
        let cfg = AcquisitionConfig::planar_default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"model\":\"planar-3r\""));
        assert_eq!(AcquisitionConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut cfg = AcquisitionConfig::planar_default();
        cfg.epsilon = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = AcquisitionConfig::planar_default();
        cfg.initial_anchors = vec![Vec3::new(5.0, 0.0, 0.0)];
        assert!(cfg.validate().is_err());
    }
}
