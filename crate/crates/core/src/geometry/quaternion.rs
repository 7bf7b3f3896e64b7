use std::ops::Mul;

use crate::geometry::Vec3;
use crate::scalar::Real;

/// Quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quat<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// Rotation of `angle` radians about the unit vector `axis`.
    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Self {
        let half = angle * T::lit(0.5);
        let s = half.sin();
        Self::new(half.cos(), axis.x * s, axis.y * s, axis.z * s)
    }

    pub fn vector(&self) -> Vec3<T> {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn dot(&self, o: &Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn normalize(&self) -> Self {
        self.scale(T::one() / self.norm())
    }

    /// Picks the representative with `w > 0`, or when `w == 0` the one whose
    /// first nonzero component is positive.
    pub fn canonical(&self) -> Self {
        let flip = if self.w != T::zero() {
            self.w < T::zero()
        } else {
            [self.x, self.y, self.z]
                .into_iter()
                .find(|c| *c != T::zero())
                .is_some_and(|c| c < T::zero())
        };
        if flip {
            self.scale(-T::one())
        } else {
            *self
        }
    }

    /// Rotation angle in `[0, pi]` of a unit quaternion.
    pub fn angle(&self) -> T {
        let c = self.canonical();
        T::lit(2.0) * c.vector().norm().atan2(c.w)
    }

    pub fn rotate(&self, v: Vec3<T>) -> Vec3<T> {
        // v' = v + 2w (u x v) + 2 u x (u x v)
        let u = self.vector();
        let t = u.cross(&v) * T::lit(2.0);
        v + t * self.w + u.cross(&t)
    }

    /// Row-major rotation matrix of a unit quaternion.
    pub fn to_matrix(&self) -> [[T; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let two = T::lit(2.0);
        let one = T::one();
        [
            [one - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
            [two * (x * y + w * z), one - two * (x * x + z * z), two * (y * z - w * x)],
            [two * (x * z - w * y), two * (y * z + w * x), one - two * (x * x + y * y)],
        ]
    }

    /// Unit quaternion of a proper rotation matrix (row-major).
    pub fn from_matrix(m: &[[T; 3]; 3]) -> Self {
        let one = T::one();
        let quarter = T::lit(0.25);
        let trace = m[0][0] + m[1][1] + m[2][2];
        let q = if trace > T::zero() {
            let s = (trace + one).sqrt() * T::lit(2.0);
            Self::new(
                quarter * s,
                (m[2][1] - m[1][2]) / s,
                (m[0][2] - m[2][0]) / s,
                (m[1][0] - m[0][1]) / s,
            )
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = (one + m[0][0] - m[1][1] - m[2][2]).sqrt() * T::lit(2.0);
            Self::new(
                (m[2][1] - m[1][2]) / s,
                quarter * s,
                (m[0][1] + m[1][0]) / s,
                (m[0][2] + m[2][0]) / s,
            )
        } else if m[1][1] > m[2][2] {
            let s = (one + m[1][1] - m[0][0] - m[2][2]).sqrt() * T::lit(2.0);
            Self::new(
                (m[0][2] - m[2][0]) / s,
                (m[0][1] + m[1][0]) / s,
                quarter * s,
                (m[1][2] + m[2][1]) / s,
            )
        } else {
            let s = (one + m[2][2] - m[0][0] - m[1][1]).sqrt() * T::lit(2.0);
            Self::new(
                (m[1][0] - m[0][1]) / s,
                (m[0][2] + m[2][0]) / s,
                (m[1][2] + m[2][1]) / s,
                quarter * s,
            )
        };
        q.normalize().canonical()
    }

    /// Rotation vector (axis * angle) with angle in `[0, pi]`.
    pub fn to_rotation_vector(&self) -> Vec3<T> {
        let c = self.canonical();
        let s = c.vector().norm();
        if s < T::epsilon() {
            // first order: angle ~ 2 s, axis ~ v / s
            return c.vector() * T::lit(2.0);
        }
        let angle = T::lit(2.0) * s.atan2(c.w);
        c.vector() * (angle / s)
    }

    pub fn from_rotation_vector(v: Vec3<T>) -> Self {
        let angle = v.norm();
        match v.try_normalize(T::epsilon()) {
            Some(axis) => Self::from_axis_angle(axis, angle),
            None => Self::new(T::one(), v.x * T::lit(0.5), v.y * T::lit(0.5), v.z * T::lit(0.5))
                .normalize(),
        }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl<T: Real> Mul for Quat<T> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}
