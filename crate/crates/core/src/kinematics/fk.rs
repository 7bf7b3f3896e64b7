use crate::error::Result;
use crate::geometry::{Pose, Vec3};
use crate::kinematics::{JointConfig, JointKind, ManipulatorModel};
use crate::scalar::Real;

/// Geometric Jacobian, 6 x d, row-major. Rows 0..3 are the linear velocity of the
/// end-effector origin, rows 3..6 the angular velocity, both in the base frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian<T> {
    dof: usize,
    data: Vec<T>,
}

impl<T: Real> Jacobian<T> {
    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.dof + col]
    }

    /// Column `j` as `(linear, angular)`.
    pub fn column(&self, j: usize) -> (Vec3<T>, Vec3<T>) {
        let g = |r| self.get(r, j);
        (Vec3::new(g(0), g(1), g(2)), Vec3::new(g(3), g(4), g(5)))
    }
}

/// Walks the chain, optionally recording each joint's world origin and axis.
pub(crate) fn chain<T: Real>(m: &ManipulatorModel<T>, q: &[T], mut frames: Option<&mut Vec<(Vec3<T>, Vec3<T>)>>) -> Pose<T> {
    let mut t = *m.base();
    if let Some(f) = frames.as_deref_mut() {
        f.clear();
    }
    for (joint, &value) in m.joints().iter().zip(q) {
        t = t.compose(&joint.origin);
        if let Some(f) = frames.as_deref_mut() {
            f.push((t.translation(), t.rotation().rotate(joint.axis)));
        }
        t = t.compose(&joint.motion(value));
    }
    t.compose(m.tool())
}

/// End-effector pose: base * (origin_i * motion_i(q_i))... * tool. Joint limits are not checked.
pub fn forward_kinematics<T: Real>(m: &ManipulatorModel<T>, q: &JointConfig<T>) -> Result<Pose<T>> {
    m.check_dimension(q)?;
    Ok(chain(m, q.as_slice(), None))
}

pub(crate) fn fill_jacobian<T: Real>(
    m: &ManipulatorModel<T>,
    q: &[T],
    frames: &mut Vec<(Vec3<T>, Vec3<T>)>,
    out: &mut Vec<T>,
) -> Pose<T> {
    let ee = chain(m, q, Some(frames));
    let d = m.dof();
    out.clear();
    out.resize(6 * d, T::zero());
    let p = ee.translation();
    for (j, ((origin, axis), joint)) in frames.iter().zip(m.joints()).enumerate() {
        let (lin, ang) = match joint.kind {
            JointKind::Revolute => (axis.cross(&(p - *origin)), *axis),
            JointKind::Prismatic => (*axis, Vec3::zeros()),
        };
        for r in 0..3 {
            out[r * d + j] = lin[r];
            out[(r + 3) * d + j] = ang[r];
        }
    }
    ee
}

pub fn jacobian<T: Real>(m: &ManipulatorModel<T>, q: &JointConfig<T>) -> Result<Jacobian<T>> {
    m.check_dimension(q)?;
    let mut frames = Vec::with_capacity(m.dof());
    let mut data = Vec::new();
    fill_jacobian(m, q.as_slice(), &mut frames, &mut data);
    Ok(Jacobian { dof: m.dof(), data })
}
