use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::acquisition::{run_acquisition, AcquisitionConfig, AcquisitionState, Round, Termination, WorldConfig};
use crate::bandit::{partition_coverage, BanditOutcome, WorkArea};
use crate::demonstration::{
    DemoRequest, Demonstration, SimulatedTeacher, SimulatedTeacherConfig, TaskInstance, Teacher,
    TeacherReply, Template,
};
use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec3};
use crate::planner::PlanningWorld;
use crate::synthetic::{DiscWorld, PointDemo, PointTeacher};

/// Coverage oracle plus the simulated teacher that goes with it.
#[derive(Clone, Debug)]
pub enum World {
    Planner { oracle: PlanningWorld, teacher: SimulatedTeacher },
    Disc { oracle: DiscWorld },
}

impl World {
    pub fn build(cfg: &AcquisitionConfig) -> Result<Self> {
        match &cfg.world {
            WorldConfig::Planner { model, template, placement_noise, heading, segmentation_threshold, planner } => {
                let model = model.load()?;
                let template = template.load()?;
                let teacher_cfg = SimulatedTeacherConfig {
                    template: template.name.clone(),
                    placement_noise: *placement_noise,
                    heading: *heading,
                    segmentation_threshold: *segmentation_threshold,
                };
                let teacher = SimulatedTeacher::new(model.clone(), template, cfg.work_area, &teacher_cfg, *planner)?;
                Ok(World::Planner { oracle: PlanningWorld { model, config: *planner }, teacher })
            }
            WorldConfig::Disc { radius, weak_zones } => {
                let oracle = DiscWorld { radius: *radius, weak_zones: weak_zones.clone() };
                oracle.validate()?;
                Ok(World::Disc { oracle })
            }
        }
    }
}

/// Loop state for either kind of world.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Planner(AcquisitionState<Demonstration<f64>>),
    Disc(AcquisitionState<PointDemo>),
}

macro_rules! on_state {
    ($state:expr, $s:ident => $body:expr) => {
        match $state {
            SessionState::Planner($s) => $body,
            SessionState::Disc($s) => $body,
        }
    };
}

impl SessionState {
    pub fn iteration(&self) -> usize {
        on_state!(self, s => s.iteration)
    }

    pub fn demo_count(&self) -> usize {
        on_state!(self, s => s.demos.len())
    }

    pub fn initial_count(&self) -> usize {
        on_state!(self, s => s.initial_count)
    }

    pub fn terminated(&self) -> Option<Termination> {
        on_state!(self, s => s.terminated)
    }

    pub fn achieved_beta(&self) -> Option<f64> {
        on_state!(self, s => s.achieved_beta)
    }

    pub fn history(&self) -> &[BanditOutcome] {
        on_state!(self, s => &s.history)
    }

    pub fn pending(&self) -> Option<&DemoRequest> {
        on_state!(self, s => s.pending.as_ref())
    }

    /// Reference-object position of every demonstration, in acquisition order.
    pub fn demo_anchors(&self) -> Vec<Vec3<f64>> {
        match self {
            SessionState::Planner(s) => s.demos.iter().map(|d| d.anchor().reference_pose().translation()).collect(),
            SessionState::Disc(s) => s.demos.iter().map(|d| d.anchor).collect(),
        }
    }
}

/// The on-disk form of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: AcquisitionConfig,
    pub state: SessionState,
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

impl Checkpoint {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomically(path, &serde_json::to_vec(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    /// Ready for the next bandit round.
    Ready,
    AwaitingDemo,
    Done,
}

/// Where a submitted demonstration was given: a position in the work area or a
/// full task instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnchorInput {
    Position(Vec3<f64>),
    Instance(TaskInstance<f64>),
}

/// A teacher's answer from outside the process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoSubmission {
    #[serde(default)]
    pub anchor: Option<AnchorInput>,
    #[serde(default)]
    pub waypoints_object_frame: Vec<Pose<f64>>,
    #[serde(default)]
    pub refuse: bool,
}

/// An acquisition run: configuration, world and loop state.
#[derive(Clone, Debug)]
pub struct Session {
    config: AcquisitionConfig,
    work_area: WorkArea,
    world: World,
    state: SessionState,
}

impl Session {
    /// Validates the configuration and records the initial demonstrations with the
    /// simulated teacher at the configured anchors.
    pub fn new(config: AcquisitionConfig) -> Result<Self> {
        config.validate()?;
        let work_area = config.build_work_area()?;
        let world = World::build(&config)?;
        let anchors = config.anchors();
        let state = match &world {
            World::Planner { teacher, .. } => {
                let mut demos = Vec::with_capacity(anchors.len());
                for a in anchors {
                    let x = TaskInstance::single(config.work_area.pose_at(a));
                    match teacher.demonstrate_at(&x)? {
                        TeacherReply::Demonstration(d) => demos.push(d),
                        TeacherReply::Refused(why) => {
                            return Err(Error::InvalidConfig(format!("no initial demonstration at {:?}: {why}", a.to_array())))
                        }
                    }
                }
                SessionState::Planner(AcquisitionState::new(demos, config.seed)?)
            }
            World::Disc { .. } => SessionState::Disc(AcquisitionState::new(
                anchors.into_iter().map(|anchor| PointDemo { anchor }).collect(),
                config.seed,
            )?),
        };
        Ok(Self { config, work_area, world, state })
    }

    pub fn from_checkpoint(cp: Checkpoint) -> Result<Self> {
        cp.config.validate()?;
        let work_area = cp.config.build_work_area()?;
        let world = World::build(&cp.config)?;
        let matches = matches!(
            (&world, &cp.state),
            (World::Planner { .. }, SessionState::Planner(_)) | (World::Disc { .. }, SessionState::Disc(_))
        );
        if !matches {
            return Err(Error::InvalidConfig("checkpoint state does not match the configured world".into()));
        }
        Ok(Self { config: cp.config, work_area, world, state: cp.state })
    }

    pub fn config(&self) -> &AcquisitionConfig {
        &self.config
    }

    pub fn work_area(&self) -> &WorkArea {
        &self.work_area
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn status(&self) -> SessionStatus {
        if self.state.terminated().is_some() {
            SessionStatus::Done
        } else if self.state.pending().is_some() {
            SessionStatus::AwaitingDemo
        } else {
            SessionStatus::Ready
        }
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { config: self.config.clone(), state: self.state.clone() }
    }

    /// One bandit round.
    pub fn evaluate(&mut self) -> Result<Round> {
        let params = self.config.params();
        match (&self.world, &mut self.state) {
            (World::Planner { oracle, .. }, SessionState::Planner(s)) => s.evaluate_round(&self.work_area, oracle, &params),
            (World::Disc { oracle }, SessionState::Disc(s)) => s.evaluate_round(&self.work_area, oracle, &params),
            _ => unreachable!("world and state kinds are checked on construction"),
        }
    }

    /// Answers the open request with the simulated teacher.
    pub fn answer_simulated(&mut self) -> Result<()> {
        let params = self.config.params();
        let req = self.state.pending().cloned().ok_or_else(|| Error::InvalidParameter("no open request".into()))?;
        match (&mut self.world, &mut self.state) {
            (World::Planner { teacher, .. }, SessionState::Planner(s)) => s.apply_reply(teacher.demonstrate(&req)?, &params),
            (World::Disc { .. }, SessionState::Disc(s)) => s.apply_reply(PointTeacher.demonstrate(&req)?, &params),
            _ => unreachable!("world and state kinds are checked on construction"),
        }
    }

    /// Answers the open request with an externally authored demonstration. On the
    /// planning world the waypoints are executed from home to record the joint
    /// trajectory; a demonstration the arm cannot execute is rejected and the
    /// request stays open.
    pub fn answer(&mut self, submission: DemoSubmission) -> Result<()> {
        let params = self.config.params();
        let req = self.state.pending().cloned().ok_or_else(|| Error::InvalidParameter("no open request".into()))?;
        if submission.refuse {
            let reason = "teacher declined".to_string();
            return match &mut self.state {
                SessionState::Planner(s) => s.apply_reply(TeacherReply::Refused(reason), &params),
                SessionState::Disc(s) => s.apply_reply(TeacherReply::Refused(reason), &params),
            };
        }
        let anchor = match submission.anchor {
            None => req.instance.clone(),
            Some(AnchorInput::Instance(x)) => x,
            Some(AnchorInput::Position(p)) => TaskInstance::single(self.config.work_area.pose_at(p)),
        };
        if !self.config.work_area.contains_position(anchor.reference_pose().translation()) {
            return Err(Error::InvalidDemonstration("anchor lies outside the work area".into()));
        }
        match (&self.world, &mut self.state) {
            (World::Planner { teacher, .. }, SessionState::Planner(s)) => {
                let template = Template::custom("submitted", submission.waypoints_object_frame)?;
                match teacher.execute(&template, &anchor, 0.0)? {
                    TeacherReply::Demonstration(d) => s.apply_reply(TeacherReply::Demonstration(d), &params),
                    TeacherReply::Refused(why) => Err(Error::InvalidDemonstration(why)),
                }
            }
            (World::Disc { .. }, SessionState::Disc(s)) => {
                let demo = PointDemo { anchor: anchor.reference_pose().translation() };
                s.apply_reply(TeacherReply::Demonstration(demo), &params)
            }
            _ => unreachable!("world and state kinds are checked on construction"),
        }
    }

    /// Runs to termination with the simulated teacher, writing a checkpoint after
    /// every round and every answer when a path is given.
    pub fn run(&mut self, checkpoint: Option<&Path>) -> Result<Termination> {
        let params = self.config.params();
        let config = &self.config;
        let save = |state: SessionState| -> Result<()> {
            match checkpoint {
                Some(path) => Checkpoint { config: config.clone(), state }.write(path),
                None => Ok(()),
            }
        };
        match (&mut self.world, &mut self.state) {
            (World::Planner { oracle, teacher }, SessionState::Planner(s)) => {
                run_acquisition(s, &self.work_area, oracle, teacher, &params, |s| save(SessionState::Planner(s.clone())))?
            }
            (World::Disc { oracle }, SessionState::Disc(s)) => {
                run_acquisition(s, &self.work_area, oracle, &mut PointTeacher, &params, |s| save(SessionState::Disc(s.clone())))?
            }
            _ => unreachable!("world and state kinds are checked on construction"),
        }
        Ok(self.state.terminated().expect("loop ran to termination"))
    }

    /// Brute-force coverage of every partition cell by the current demonstrations.
    pub fn partition_coverage(&self, resolution: f64) -> Result<Vec<f64>> {
        match (&self.world, &self.state) {
            (World::Planner { oracle, .. }, SessionState::Planner(s)) => partition_coverage(&self.work_area, &s.demos, oracle, resolution),
            (World::Disc { oracle }, SessionState::Disc(s)) => partition_coverage(&self.work_area, &s.demos, oracle, resolution),
            _ => unreachable!("world and state kinds are checked on construction"),
        }
    }
}
