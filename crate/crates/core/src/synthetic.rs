//! Worlds with known coverage, for validating the estimators and the
//! acquisition loop without a manipulator in the loop.

use serde::{Deserialize, Serialize};

use crate::bandit::{CoverageOracle, Outcome, WorkArea};
use crate::demonstration::{DemoRequest, TaskInstance, Teacher, TeacherReply};
use crate::error::{Error, Result};
use crate::geometry::{Region, Vec3};

/// A demonstration that is summarized by where it was given.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDemo {
    pub anchor: Vec3<f64>,
}

/// An axis-aligned patch of the work area where only a fraction of instances succeed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakZone {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Fraction of the zone (a stripe along x) that stays feasible.
    pub success: f64,
}

impl WeakZone {
    fn contains(&self, p: Vec3<f64>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    fn succeeds(&self, p: Vec3<f64>) -> bool {
        let u = (p.x - self.x_min) / (self.x_max - self.x_min);
        u >= 1.0 - self.success
    }
}

/// Each demonstration covers the ball of `radius` around its anchor. Inside a weak
/// zone a covered instance additionally has to fall in the zone's feasible stripe.
///
/// Uncovered instances report segment 0, weak-zone failures segment 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscWorld {
    pub radius: f64,
    #[serde(default)]
    pub weak_zones: Vec<WeakZone>,
}

impl DiscWorld {
    pub fn new(radius: f64) -> Result<Self> {
        let w = Self { radius, weak_zones: Vec::new() };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::InvalidParameter(format!("coverage radius must be positive, got {}", self.radius)));
        }
        for z in &self.weak_zones {
            if !(z.x_max > z.x_min && z.y_max >= z.y_min && (0.0..=1.0).contains(&z.success)) {
                return Err(Error::InvalidParameter(format!("invalid weak zone {z:?}")));
            }
        }
        Ok(())
    }

    pub fn covers(&self, p: Vec3<f64>, demos: &[PointDemo]) -> Outcome {
        let r2 = self.radius * self.radius;
        if !demos.iter().any(|d| (d.anchor - p).norm_squared() <= r2) {
            return Outcome::failed_at(0);
        }
        match self.weak_zones.iter().find(|z| z.contains(p)) {
            Some(z) if !z.succeeds(p) => Outcome::failed_at(1),
            _ => Outcome::COVERED,
        }
    }
}

impl CoverageOracle for DiscWorld {
    type Demo = PointDemo;

    fn evaluate(&self, x: &TaskInstance<f64>, demos: &[PointDemo]) -> Result<Outcome> {
        Ok(self.covers(x.reference_pose().translation(), demos))
    }
}

/// Arms with prescribed failure probabilities: in cell `j` an instance fails iff
/// its fractional x position within the cell is below `means[j]`.
#[derive(Clone, Debug)]
pub struct BernoulliArms {
    work_area: WorkArea,
    means: Vec<f64>,
}

impl BernoulliArms {
    pub fn new(work_area: WorkArea, means: Vec<f64>) -> Result<Self> {
        if means.len() != work_area.k() {
            return Err(Error::DimensionMismatch { expected: work_area.k(), actual: means.len() });
        }
        if means.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::InvalidParameter("arm means must lie in [0, 1]".into()));
        }
        if work_area.partition().iter().any(|c| c.extent().x <= 0.0) {
            return Err(Error::InvalidRegion("arm cells need extent along x".into()));
        }
        Ok(Self { work_area, means })
    }

    /// A unit square split into one column per mean.
    pub fn unit(means: Vec<f64>) -> Result<Self> {
        let region = Region::planar(0.0, means.len() as f64, 0.0, 1.0, 0.0)?;
        Self::new(WorkArea::new(region, means.len())?, means)
    }

    pub fn work_area(&self) -> &WorkArea {
        &self.work_area
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }
}

impl CoverageOracle for BernoulliArms {
    type Demo = ();

    fn evaluate(&self, x: &TaskInstance<f64>, _demos: &[()]) -> Result<Outcome> {
        let p = x.reference_pose().translation();
        let j = self
            .work_area
            .arm_of(p)
            .ok_or_else(|| Error::InvalidParameter(format!("instance at {:?} is outside the work area", p.to_array())))?;
        let cell = &self.work_area.partition()[j];
        let u = (p.x - cell.pos_min().x) / cell.extent().x;
        Ok(if u < self.means[j] { Outcome::failed_at(0) } else { Outcome::COVERED })
    }
}

/// Demonstrates exactly at the requested instance.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointTeacher;

impl Teacher for PointTeacher {
    type Demo = PointDemo;

    fn demonstrate(&mut self, request: &DemoRequest) -> Result<TeacherReply<PointDemo>> {
        Ok(TeacherReply::Demonstration(PointDemo { anchor: request.instance.reference_pose().translation() }))
    }
}

/// Never demonstrates.
#[derive(Clone, Copy, Debug, Default)]
pub struct RefusingTeacher<D>(std::marker::PhantomData<D>);

impl<D> RefusingTeacher<D> {
    pub fn new() -> Self {
        Self(std::marker::PhantomData)
    }
}

impl<D> Teacher for RefusingTeacher<D> {
    type Demo = D;

    fn demonstrate(&mut self, _request: &DemoRequest) -> Result<TeacherReply<D>> {
        Ok(TeacherReply::Refused("teacher declines every request".into()))
    }
}
