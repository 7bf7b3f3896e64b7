//! Screw (Chasles) decomposition of rigid motions and screw linear interpolation.
//!
//! Every rigid motion is a rotation by `angle` about a fixed axis combined with a
//! translation along that same axis. `screw_log` extracts those parameters,
//! `screw_exp` walks a fraction of the motion, and `sclerp` is the constant-screw
//! path between two poses. Internally the motion is handled as a unit-time twist
//! `(omega, v)` so that small rotation angles do not lose precision.

use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Quat, Vec3};
use crate::scalar::Real;

/// Below this quaternion-vector magnitude the rotation is treated as exactly zero.
fn rotation_floor<T: Real>() -> T {
    T::epsilon() * T::lit(16.0)
}

/// Below `|w|` of this value the rotation axis is taken from the rotation matrix.
const ANTIPODE_W: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ScrewParameters<T> {
    /// Unit direction of the screw axis. `(0,0,1)` by convention for the identity.
    pub axis_direction: Vec3<T>,
    /// Point on the axis closest to the origin. Zero for translations and the identity.
    pub axis_point: Vec3<T>,
    /// Rotation angle about the axis, in `[0, pi]`.
    pub angle: T,
    /// Displacement along the axis (pitch times angle), meters.
    pub translation_along_axis: T,
    pub is_pure_translation: bool,
    /// Identity motion; the axis carries no information.
    pub is_identity: bool,
}

impl<T: Real> ScrewParameters<T> {
    pub fn identity() -> Self {
        Self {
            axis_direction: Vec3::unit_z(),
            axis_point: Vec3::zeros(),
            angle: T::zero(),
            translation_along_axis: T::zero(),
            is_pure_translation: false,
            is_identity: true,
        }
    }

    /// Unit-time twist `(omega, v)` with `exp` of it equal to the full motion.
    pub fn twist(&self) -> (Vec3<T>, Vec3<T>) {
        if self.is_identity {
            return (Vec3::zeros(), Vec3::zeros());
        }
        let u = self.axis_direction;
        if self.is_pure_translation {
            return (Vec3::zeros(), u * self.translation_along_axis);
        }
        let omega = u * self.angle;
        let v = -omega.cross(&self.axis_point) + u * self.translation_along_axis;
        (omega, v)
    }

    /// Scales the motion by `tau` (a point along the same screw).
    pub fn scaled(&self, tau: T) -> Self {
        let mut s = *self;
        s.angle = self.angle * tau;
        s.translation_along_axis = self.translation_along_axis * tau;
        s
    }
}

/// `(1 - cos p) / p^2` and `(p - sin p) / p^3`, with series near zero.
fn exp_coefficients<T: Real>(phi: T) -> (T, T) {
    if phi.abs() < T::lit(1e-4) {
        let p2 = phi * phi;
        (T::lit(0.5) - p2 / T::lit(24.0), T::lit(1.0 / 6.0) - p2 / T::lit(120.0))
    } else {
        let p2 = phi * phi;
        ((T::one() - phi.cos()) / p2, (phi - phi.sin()) / (p2 * phi))
    }
}

/// `(1 - theta sin theta / (2 (1 - cos theta))) / theta^2`, with series near zero.
fn log_coefficient<T: Real>(theta: T) -> T {
    if theta.abs() < T::lit(1e-4) {
        T::lit(1.0 / 12.0) + theta * theta / T::lit(720.0)
    } else {
        let t2 = theta * theta;
        (T::one() - theta * theta.sin() / (T::lit(2.0) * (T::one() - theta.cos()))) / t2
    }
}

/// Rotation axis and angle in `[0, pi]`, or `None` for a (numerically) zero rotation.
fn rotation_axis_angle<T: Real>(q: Quat<T>) -> Option<(Vec3<T>, T)> {
    let q = q.canonical();
    let s = q.vector().norm();
    if s <= rotation_floor::<T>() {
        return None;
    }
    let angle = T::lit(2.0) * s.atan2(q.w);
    if q.w.abs() >= T::lit(ANTIPODE_W) {
        return Some((q.vector() * (T::one() / s), angle));
    }
    // Near pi: u u^T = (sym(R) - cos(angle) I) / (1 - cos(angle)).
    let r = q.to_matrix();
    let c = angle.cos();
    let denom = T::one() - c;
    let outer = |i: usize, j: usize| {
        let sym = (r[i][j] + r[j][i]) * T::lit(0.5);
        let id = if i == j { c } else { T::zero() };
        (sym - id) / denom
    };
    let k = (0..3)
        .max_by(|&a, &b| outer(a, a).partial_cmp(&outer(b, b)).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let scale = outer(k, k).max(T::zero()).sqrt();
    let mut axis = Vec3::new(outer(0, k), outer(1, k), outer(2, k)) * (T::one() / scale);
    if axis.dot(&q.vector()) < T::zero() {
        axis = -axis;
    }
    Some((axis.try_normalize(T::zero())?, angle))
}

/// Screw parameters of `g` such that `screw_exp(&screw_log(g), 1) == g`.
pub fn screw_log<T: Real>(g: &Pose<T>) -> ScrewParameters<T> {
    let t = g.translation();
    match rotation_axis_angle(g.rotation()) {
        None => match t.try_normalize(rotation_floor::<T>()) {
            None => ScrewParameters::identity(),
            Some(dir) => ScrewParameters {
                axis_direction: dir,
                axis_point: Vec3::zeros(),
                angle: T::zero(),
                translation_along_axis: t.norm(),
                is_pure_translation: true,
                is_identity: false,
            },
        },
        Some((u, theta)) => {
            let omega = u * theta;
            let wxt = omega.cross(&t);
            let v = t - wxt * T::lit(0.5) + omega.cross(&wxt) * log_coefficient(theta);
            ScrewParameters {
                axis_direction: u,
                axis_point: omega.cross(&v) * (T::one() / (theta * theta)),
                angle: theta,
                translation_along_axis: u.dot(&v),
                is_pure_translation: false,
                is_identity: false,
            }
        }
    }
}

/// Pose reached after moving the fraction `tau` along the screw.
pub fn screw_exp<T: Real>(s: &ScrewParameters<T>, tau: T) -> Pose<T> {
    if s.is_identity {
        return Pose::identity();
    }
    if s.is_pure_translation {
        return Pose::from_translation(s.axis_direction * (s.translation_along_axis * tau));
    }
    let (omega, v) = s.twist();
    let (omega, v) = (omega * tau, v * tau);
    let phi = s.angle * tau;
    let (a, b) = exp_coefficients(phi);
    let wxv = omega.cross(&v);
    let t = v + wxv * a + omega.cross(&wxv) * b;
    Pose::new(Quat::from_axis_angle(s.axis_direction, phi), t)
}

/// The constant-screw path from one pose to another, with the screw cached.
#[derive(Clone, Copy, Debug)]
pub struct ScrewPath<T> {
    start: Pose<T>,
    screw: ScrewParameters<T>,
}

impl<T: Real> ScrewPath<T> {
    pub fn new(from: &Pose<T>, to: &Pose<T>) -> Self {
        Self { start: *from, screw: screw_log(&from.relative_to(to)) }
    }

    pub fn screw(&self) -> &ScrewParameters<T> {
        &self.screw
    }

    pub fn at(&self, tau: T) -> Pose<T> {
        self.start.compose(&screw_exp(&self.screw, tau))
    }

    /// Pose distance between the endpoints.
    pub fn length(&self) -> T {
        screw_exp(&self.screw, T::one()).distance(&Pose::identity())
    }
}

/// Screw linear interpolation: `g1 * exp(tau * log(g1^-1 g2))`.
pub fn sclerp<T: Real>(g1: &Pose<T>, g2: &Pose<T>, tau: T) -> Pose<T> {
    ScrewPath::new(g1, g2).at(tau)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;

    #[test]
    fn quarter_turn_about_z() {
        let g = Pose::from_axis_angle(Vec3::unit_z(), FRAC_PI_2);
        let s = screw_log(&g);
        assert!((s.axis_direction - Vec3::unit_z()).max_abs() < 1e-12);
        assert!((s.angle - FRAC_PI_2).abs() < 1e-12);
        assert!(s.translation_along_axis.abs() < 1e-12);
        assert!(s.axis_point.max_abs() < 1e-12);
        assert!(!s.is_pure_translation);
    }

    #[test]
    fn pure_translation() {
        let s = screw_log(&Pose::from_translation(Vec3::new(1.0f64, 0.0, 0.0)));
        assert!(s.is_pure_translation);
        assert_eq!(s.axis_direction, Vec3::unit_x());
        assert!((s.translation_along_axis - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_is_flagged_with_conventional_axis() {
        let s = screw_log(&Pose::<f64>::identity());
        assert!(s.is_identity);
        assert_eq!(s.axis_direction, Vec3::unit_z());
        assert_eq!(s.angle, 0.0);
        assert_eq!(screw_exp(&s, 0.7), Pose::identity());
    }

    #[test]
    fn rotation_about_offset_axis_recovers_axis_point() {
        // half turn about z through (1, 0, 0) maps the origin to (2, 0, 0)
        let g = Pose::new(Quat::from_axis_angle(Vec3::unit_z(), PI), Vec3::new(2.0, 0.0, 0.0));
        let s = screw_log(&g);
        assert!((s.angle - PI).abs() < 1e-12);
        assert!((s.axis_point - Vec3::new(1.0, 0.0, 0.0)).max_abs() < 1e-9);
        assert!(screw_exp(&s, 1.0).distance(&g) < 1e-12);
    }

    #[test]
    fn tiny_rotation_round_trip() {
        let g = Pose::new(Quat::from_axis_angle(Vec3::unit_y(), 1e-11), Vec3::new(0.3, 0.2, -0.1));
        let s = screw_log(&g);
        assert!(screw_exp(&s, 1.0).distance(&g) < 1e-12);
        let half = screw_exp(&s, 0.5);
        assert!((half.translation() - Vec3::new(0.15, 0.1, -0.05)).max_abs() < 1e-11);
    }

    #[test]
    fn sclerp_endpoints_and_translation_midpoint() {
        let a = Pose::planar(0.1, 0.2, 0.0, 0.4);
        let b = Pose::new(Quat::from_axis_angle(Vec3::unit_x(), 1.0), Vec3::new(-0.3, 0.5, 0.2));
        assert!(sclerp(&a, &b, 0.0).distance(&a) < 1e-12);
        assert!(sclerp(&a, &b, 1.0).distance(&b) < 1e-12);
        let mid = sclerp(&Pose::identity(), &Pose::from_translation(Vec3::unit_x()), 0.5);
        assert!(mid.distance(&Pose::from_translation(Vec3::new(0.5, 0.0, 0.0))) < 1e-15);
    }

    #[test]
    fn f32_sclerp_endpoints() {
        let a = Pose::<f32>::planar(0.1, 0.2, 0.0, 0.4);
        let b = Pose::<f32>::planar(-0.2, 0.6, 0.1, 2.0);
        assert!(sclerp(&a, &b, 1.0).distance(&b) < 1e-5);
        assert!(sclerp(&a, &b, 0.0).distance(&a) < 1e-6);
    }
}
