use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::demonstration::{guiding_indices, Demonstration, TaskInstance, Template};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Region, Vec3};
use crate::kinematics::{forward_kinematics, JointConfig, ManipulatorModel};
use crate::planner::{plan_through, PlannerConfig, StartPolicy};

/// What the learner asks the teacher for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoRequest {
    /// The failing sample the bandit picked.
    pub instance: TaskInstance<f64>,
    /// Bounds of the worst-covered partition containing it.
    pub region: Region<f64>,
    pub arm_index: usize,
    pub failed_segment: Option<usize>,
    /// Seed for any randomness on the teacher's side (placement noise).
    pub noise_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TeacherReply<D> {
    Demonstration(D),
    Refused(String),
}

/// Answers one request at a time with a demonstration or a refusal.
pub trait Teacher {
    type Demo;

    fn demonstrate(&mut self, request: &DemoRequest) -> Result<TeacherReply<Self::Demo>>;
}

/// How the demonstrator orients the template at the object.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heading {
    /// Template used as written in the object frame.
    Fixed,
    /// Template turned to approach the object along the line from the robot base.
    #[default]
    FromBase,
}

fn default_threshold() -> f64 {
    5e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedTeacherConfig {
    pub template: String,
    /// Standard deviation of the object placement error, meters.
    #[serde(default)]
    pub placement_noise: f64,
    #[serde(default)]
    pub heading: Heading,
    #[serde(default = "default_threshold")]
    pub segmentation_threshold: f64,
}

/// Stand-in for kinesthetic teaching: places the object near the suggestion,
/// executes the template there from the home configuration, and records the
/// resulting joint trajectory.
#[derive(Clone, Debug)]
pub struct SimulatedTeacher {
    model: ManipulatorModel<f64>,
    template: Template<f64>,
    work_area: Region<f64>,
    placement_noise: f64,
    heading: Heading,
    segmentation_threshold: f64,
    planner: PlannerConfig,
}

impl SimulatedTeacher {
    pub fn new(
        model: ManipulatorModel<f64>,
        template: Template<f64>,
        work_area: Region<f64>,
        cfg: &SimulatedTeacherConfig,
        planner: PlannerConfig,
    ) -> Result<Self> {
        if !(cfg.placement_noise >= 0.0 && cfg.placement_noise.is_finite()) {
            return Err(Error::InvalidParameter(format!("placement noise must be >= 0, got {}", cfg.placement_noise)));
        }
        if !(cfg.segmentation_threshold > 0.0) {
            return Err(Error::InvalidParameter("segmentation threshold must be positive".into()));
        }
        Ok(Self {
            model,
            template,
            work_area,
            placement_noise: cfg.placement_noise,
            heading: cfg.heading,
            segmentation_threshold: cfg.segmentation_threshold,
            planner,
        })
    }

    pub fn template(&self) -> &Template<f64> {
        &self.template
    }

    /// Where the object actually ends up when the teacher aims for `suggestion`.
    pub fn place(&self, suggestion: &TaskInstance<f64>, rng: &mut ChaCha8Rng) -> TaskInstance<f64> {
        let reference = suggestion.reference_pose();
        if self.placement_noise == 0.0 {
            return suggestion.clone();
        }
        let normal = Normal::new(0.0, self.placement_noise).expect("valid deviation");
        let extent = self.work_area.extent();
        let mut jitter = |e: f64| if e > 0.0 { normal.sample(rng) } else { 0.0 };
        let offset = Vec3::new(jitter(extent.x), jitter(extent.y), jitter(extent.z));
        let placed = self.work_area.clamp_position(reference.translation() + offset);
        let shift = Pose::from_translation(placed - reference.translation());
        TaskInstance { object_poses: suggestion.object_poses.iter().map(|p| shift.compose(p)).collect() }
    }

    /// Template heading used at `object`.
    pub fn heading_at(&self, object: &Pose<f64>) -> f64 {
        match self.heading {
            Heading::Fixed => 0.0,
            Heading::FromBase => {
                let rel = self.model.base().inverse().transform_point(object.translation());
                rel.y.atan2(rel.x)
            }
        }
    }

    /// Demonstrates the configured template exactly at `anchor`; refuses when the
    /// arm cannot execute it there.
    pub fn demonstrate_at(&self, anchor: &TaskInstance<f64>) -> Result<TeacherReply<Demonstration<f64>>> {
        let heading = self.heading_at(anchor.reference_pose());
        self.execute(&self.template, anchor, heading)
    }

    /// Executes `template` at `anchor` from the home configuration, records the
    /// joint trajectory and segments its pose path into guiding poses.
    pub fn execute(
        &self,
        template: &Template<f64>,
        anchor: &TaskInstance<f64>,
        heading: f64,
    ) -> Result<TeacherReply<Demonstration<f64>>> {
        let guides = template.instantiate(anchor.reference_pose(), heading);
        let (track, _) = plan_through(&self.model, &guides, &StartPolicy::HomeIk, &self.planner)?;
        if !track.is_success() {
            return Ok(TeacherReply::Refused(format!(
                "template {:?} not executable at this placement ({:?} in segment {})",
                template.name,
                track.status,
                track.failed_segment_index.unwrap_or(0)
            )));
        }
        let joint_trajectory: Vec<JointConfig<f64>> = track.joint_path;
        let poses = joint_trajectory
            .iter()
            .map(|q| forward_kinematics(&self.model, q))
            .collect::<Result<Vec<_>>>()?;
        let keep = guiding_indices(&poses, self.segmentation_threshold)?;
        let guiding_poses = keep.iter().map(|&i| poses[i]).collect();
        Ok(TeacherReply::Demonstration(Demonstration::new(anchor.clone(), guiding_poses, joint_trajectory)?))
    }
}

impl Teacher for SimulatedTeacher {
    type Demo = Demonstration<f64>;

    fn demonstrate(&mut self, request: &DemoRequest) -> Result<TeacherReply<Demonstration<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(request.noise_seed);
        let anchor = self.place(&request.instance, &mut rng);
        self.demonstrate_at(&anchor)
    }
}
