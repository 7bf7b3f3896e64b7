use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{Quat, Vec3};
use crate::scalar::Real;

/// Allowed deviation from unit norm for quaternions read from interchange files.
const INTERCHANGE_NORM_TOL: f64 = 1e-6;

/// Rigid-body pose in SE(3): a canonical unit rotation quaternion and a translation in meters.
///
/// The interchange form is `{"q":[w,x,y,z],"t":[x,y,z]}`; [`DualQuat`] is the algebraic form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoseRepr<T>", into = "PoseRepr<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Pose<T> {
    rotation: Quat<T>,
    translation: Vec3<T>,
}

#[derive(Serialize, Deserialize)]
struct PoseRepr<T> {
    q: [T; 4],
    t: [T; 3],
}

impl<T: Real> TryFrom<PoseRepr<T>> for Pose<T> {
    type Error = Error;

    fn try_from(r: PoseRepr<T>) -> Result<Self, Error> {
        let [w, x, y, z] = r.q;
        let q = Quat::new(w, x, y, z);
        let n = q.norm().to_f64_lossy();
        if !n.is_finite() || (n - 1.0).abs() > INTERCHANGE_NORM_TOL {
            return Err(Error::InvalidPose(format!("quaternion norm {n} is not 1")));
        }
        if r.t.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPose("non-finite translation".into()));
        }
        Ok(Pose::new(q, r.t.into()))
    }
}

impl<T: Real> From<Pose<T>> for PoseRepr<T> {
    fn from(p: Pose<T>) -> Self {
        PoseRepr { q: p.rotation.to_array(), t: p.translation.to_array() }
    }
}

impl<T: Real> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Pose<T> {
    /// Normalizes and canonicalizes `rotation`. A quaternion that is already unit
    /// to within rounding is kept bit for bit, so rebuilding a pose from its own
    /// components (as deserialization does) is exact.
    pub fn new(rotation: Quat<T>, translation: Vec3<T>) -> Self {
        let n2 = rotation.dot(&rotation);
        let unit = (n2 - T::one()).abs() <= T::epsilon() * T::lit(4.0);
        let rotation = if unit { rotation } else { rotation.normalize() };
        Self { rotation: rotation.canonical(), translation }
    }

    pub fn identity() -> Self {
        Self { rotation: Quat::identity(), translation: Vec3::zeros() }
    }

    pub fn from_translation(t: Vec3<T>) -> Self {
        Self { rotation: Quat::identity(), translation: t }
    }

    pub fn from_rotation(q: Quat<T>) -> Self {
        Self::new(q, Vec3::zeros())
    }

    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Self {
        Self::from_rotation(Quat::from_axis_angle(axis, angle))
    }

    /// Planar pose: position `(x, y, z)` with heading `yaw` about +z.
    pub fn planar(x: T, y: T, z: T, yaw: T) -> Self {
        Self::new(Quat::from_axis_angle(Vec3::unit_z(), yaw), Vec3::new(x, y, z))
    }

    pub fn rotation(&self) -> Quat<T> {
        self.rotation
    }

    pub fn translation(&self) -> Vec3<T> {
        self.translation
    }

    /// `self * other`: express `other` (given in this frame) in the parent frame.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.rotation * other.rotation,
            self.rotation.rotate(other.translation) + self.translation,
        )
    }

    pub fn inverse(&self) -> Self {
        let qi = self.rotation.conjugate();
        Self::new(qi, -qi.rotate(self.translation))
    }

    /// `self^-1 * other`.
    pub fn relative_to(&self, other: &Self) -> Self {
        self.inverse().compose(other)
    }

    pub fn transform_point(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.rotate(p) + self.translation
    }

    /// Geodesic angle between the two orientations, in `[0, pi]`.
    pub fn rotation_distance(&self, other: &Self) -> T {
        (self.rotation.conjugate() * other.rotation).angle()
    }

    pub fn translation_distance(&self, other: &Self) -> T {
        (self.translation - other.translation).norm()
    }

    /// `max(rotation angle, translation distance)`; left-invariant.
    pub fn distance(&self, other: &Self) -> T {
        self.rotation_distance(other).max(self.translation_distance(other))
    }

    /// Row-major homogeneous transform.
    pub fn to_matrix(&self) -> [[T; 4]; 4] {
        let r = self.rotation.to_matrix();
        let t = self.translation;
        let (o, i) = (T::zero(), T::one());
        [
            [r[0][0], r[0][1], r[0][2], t.x],
            [r[1][0], r[1][1], r[1][2], t.y],
            [r[2][0], r[2][1], r[2][2], t.z],
            [o, o, o, i],
        ]
    }

    pub fn from_matrix(m: &[[T; 4]; 4]) -> Self {
        let r = [
            [m[0][0], m[0][1], m[0][2]],
            [m[1][0], m[1][1], m[1][2]],
            [m[2][0], m[2][1], m[2][2]],
        ];
        Self::new(Quat::from_matrix(&r), Vec3::new(m[0][3], m[1][3], m[2][3]))
    }

    pub fn to_dual_quat(&self) -> DualQuat<T> {
        DualQuat::from_pose(self)
    }

    pub fn is_finite(&self) -> bool {
        self.rotation.to_array().iter().chain(self.translation.to_array().iter()).all(|c| c.is_finite())
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        let q = self.rotation;
        Pose::new(
            Quat::new(
                U::lit(q.w.to_f64_lossy()),
                U::lit(q.x.to_f64_lossy()),
                U::lit(q.y.to_f64_lossy()),
                U::lit(q.z.to_f64_lossy()),
            ),
            self.translation.cast(),
        )
    }
}

impl<T: Real> Mul for Pose<T> {
    type Output = Pose<T>;

    fn mul(self, rhs: Pose<T>) -> Pose<T> {
        self.compose(&rhs)
    }
}

impl<'a, T: Real> Mul<&'a Pose<T>> for &'a Pose<T> {
    type Output = Pose<T>;

    fn mul(self, rhs: &'a Pose<T>) -> Pose<T> {
        self.compose(rhs)
    }
}

/// Unit dual quaternion `real + eps * dual` with `dual = t * real / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualQuat<T> {
    pub real: Quat<T>,
    pub dual: Quat<T>,
}

impl<T: Real> DualQuat<T> {
    pub fn from_pose(p: &Pose<T>) -> Self {
        let t = p.translation;
        let tq = Quat::new(T::zero(), t.x, t.y, t.z);
        Self { real: p.rotation, dual: (tq * p.rotation).scale(T::lit(0.5)) }
    }

    pub fn to_pose(&self) -> Pose<T> {
        let n = self.real.norm();
        let real = self.real.scale(T::one() / n);
        let dual = self.dual.scale(T::one() / n);
        let t = (dual * real.conjugate()).scale(T::lit(2.0));
        Pose::new(real, t.vector())
    }

    pub fn conjugate(&self) -> Self {
        Self { real: self.real.conjugate(), dual: self.dual.conjugate() }
    }
}

impl<T: Real> Mul for DualQuat<T> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self { real: self.real * o.real, dual: (self.real * o.dual).add(&(self.dual * o.real)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Pose<f64> {
        Pose::new(
            Quat::from_axis_angle(Vec3::new(0.0, 0.6, 0.8), 0.9),
            Vec3::new(0.1, -0.2, 0.3),
        )
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let g = sample();
        assert!(g.compose(&g.inverse()).distance(&Pose::identity()) < 1e-12);
        assert!(Pose::identity().compose(&g).distance(&g) < 1e-15);
    }

    #[test]
    fn dual_quaternion_product_matches_compose() {
        let a = sample();
        let b = Pose::planar(0.4, 0.1, -0.2, 2.5);
        let via_dq = (a.to_dual_quat() * b.to_dual_quat()).to_pose();
        assert!(via_dq.distance(&a.compose(&b)) < 1e-12);
        assert!(a.to_dual_quat().to_pose().distance(&a) < 1e-15);
    }

    #[test]
    fn json_interchange_shape() {
        let p = Pose::<f64>::from_translation(Vec3::new(1.0, 2.0, 3.0));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"q":[1.0,0.0,0.0,0.0],"t":[1.0,2.0,3.0]}"#);
        let back: Pose<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_rejects_non_unit_quaternion() {
        let bad = r#"{"q":[2.0,0.0,0.0,0.0],"t":[0,0,0]}"#;
        assert!(serde_json::from_str::<Pose<f64>>(bad).is_err());
    }

    #[test]
    fn deserialized_quaternion_is_canonicalized() {
        let p: Pose<f64> = serde_json::from_str(r#"{"q":[-1.0,0.0,0.0,0.0],"t":[0,0,0]}"#).unwrap();
        assert_eq!(p.rotation().w, 1.0);
    }

    #[test]
    fn distance_is_max_of_parts() {
        let a = Pose::<f64>::identity();
        let b = Pose::planar(0.1, 0.0, 0.0, 0.5);
        assert!((a.distance(&b) - 0.5).abs() < 1e-12);
        let c = Pose::planar(2.0, 0.0, 0.0, 0.5);
        assert!((a.distance(&c) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn f32_compose_inverse() {
        let g = sample().cast::<f32>();
        assert!(g.compose(&g.inverse()).distance(&Pose::identity()) < 1e-5);
    }
}
