use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{Pose, Quat, Vec3};
use crate::scalar::Real;

/// Orientation component of a region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrientationSet<T> {
    /// Every pose in the region has this orientation.
    Fixed(Quat<T>),
    /// The whole rotation group, sampled uniformly.
    Full,
}

/// Axis-aligned box of positions times an orientation set.
///
/// Position intervals may be degenerate (`min == max`) on some axes, e.g. a
/// planar work area at table height; at least one axis must have extent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionRepr<T>", into = "RegionRepr<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Region<T> {
    pos_min: Vec3<T>,
    pos_max: Vec3<T>,
    orientation: OrientationSet<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OrientationTag {
    Fixed,
    Full,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
struct RegionRepr<T> {
    pos_min: Vec3<T>,
    pos_max: Vec3<T>,
    orientation: OrientationTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fixed_q: Option<[T; 4]>,
}

impl<T: Real> TryFrom<RegionRepr<T>> for Region<T> {
    type Error = Error;

    fn try_from(r: RegionRepr<T>) -> Result<Self, Error> {
        let orientation = match r.orientation {
            OrientationTag::Full => OrientationSet::Full,
            OrientationTag::Fixed => {
                let [w, x, y, z] = r.fixed_q.unwrap_or([T::one(), T::zero(), T::zero(), T::zero()]);
                let q = Quat::new(w, x, y, z);
                let n = q.norm();
                if !(n > T::zero()) {
                    return Err(Error::InvalidRegion("fixed_q has zero norm".into()));
                }
                OrientationSet::Fixed(q.normalize().canonical())
            }
        };
        Region::new(r.pos_min, r.pos_max, orientation)
    }
}

impl<T: Real> From<Region<T>> for RegionRepr<T> {
    fn from(r: Region<T>) -> Self {
        let (orientation, fixed_q) = match r.orientation {
            OrientationSet::Full => (OrientationTag::Full, None),
            OrientationSet::Fixed(q) => (OrientationTag::Fixed, Some(q.to_array())),
        };
        RegionRepr { pos_min: r.pos_min, pos_max: r.pos_max, orientation, fixed_q }
    }
}

impl<T: Real> Region<T> {
    pub fn new(pos_min: Vec3<T>, pos_max: Vec3<T>, orientation: OrientationSet<T>) -> Result<Self, Error> {
        for i in 0..3 {
            if !(pos_min[i].is_finite() && pos_max[i].is_finite()) {
                return Err(Error::InvalidRegion("non-finite bound".into()));
            }
            if pos_min[i] > pos_max[i] {
                return Err(Error::InvalidRegion(format!("axis {i}: min {} > max {}", pos_min[i], pos_max[i])));
            }
        }
        let region = Self { pos_min, pos_max, orientation };
        if region.volume() <= T::zero() {
            return Err(Error::InvalidRegion("region has zero volume".into()));
        }
        Ok(region)
    }

    /// Planar rectangle `[x_min, x_max] x [y_min, y_max]` at height `z` with identity orientation.
    pub fn planar(x_min: T, x_max: T, y_min: T, y_max: T, z: T) -> Result<Self, Error> {
        Self::new(
            Vec3::new(x_min, y_min, z),
            Vec3::new(x_max, y_max, z),
            OrientationSet::Fixed(Quat::identity()),
        )
    }

    pub fn pos_min(&self) -> Vec3<T> {
        self.pos_min
    }

    pub fn pos_max(&self) -> Vec3<T> {
        self.pos_max
    }

    pub fn orientation(&self) -> OrientationSet<T> {
        self.orientation
    }

    pub fn extent(&self) -> Vec3<T> {
        self.pos_max - self.pos_min
    }

    pub fn center(&self) -> Vec3<T> {
        (self.pos_min + self.pos_max) * T::lit(0.5)
    }

    /// Product Lebesgue measure over the non-degenerate position axes; the
    /// orientation factor is the normalized Haar measure (1) or a point mass (1).
    pub fn volume(&self) -> T {
        let e = self.extent();
        let mut v = T::one();
        let mut any = false;
        for i in 0..3 {
            if e[i] > T::zero() {
                v = v * e[i];
                any = true;
            }
        }
        if any {
            v
        } else {
            T::zero()
        }
    }

    pub fn contains_position(&self, p: Vec3<T>) -> bool {
        (0..3).all(|i| p[i] >= self.pos_min[i] && p[i] <= self.pos_max[i])
    }

    /// Nearest position inside the box.
    pub fn clamp_position(&self, p: Vec3<T>) -> Vec3<T> {
        Vec3::new(
            p.x.max(self.pos_min.x).min(self.pos_max.x),
            p.y.max(self.pos_min.y).min(self.pos_max.y),
            p.z.max(self.pos_min.z).min(self.pos_max.z),
        )
    }

    /// A pose at `position` with this region's orientation (identity for `Full`).
    pub fn pose_at(&self, position: Vec3<T>) -> Pose<T> {
        match self.orientation {
            OrientationSet::Fixed(q) => Pose::new(q, position),
            OrientationSet::Full => Pose::from_translation(position),
        }
    }

    /// Uniform sample: position uniform in the box, orientation uniform over the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pose<T> {
        let mut coords = [T::zero(); 3];
        for (i, c) in coords.iter_mut().enumerate() {
            let (lo, hi) = (self.pos_min[i], self.pos_max[i]);
            *c = if hi > lo { lo + (hi - lo) * T::lit(rng.random::<f64>()) } else { lo };
        }
        let position = Vec3::from(coords);
        let q = match self.orientation {
            OrientationSet::Fixed(q) => q,
            OrientationSet::Full => uniform_quaternion(rng),
        };
        Pose::new(q, position)
    }

    /// Splits the x and y axes into an `nx` by `ny` grid of cells, row-major in y.
    pub fn grid_xy(&self, nx: usize, ny: usize) -> Result<Vec<Region<T>>, Error> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidRegion("grid needs at least one cell per axis".into()));
        }
        let e = self.extent();
        let mut cells = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                let x0 = self.pos_min.x + e.x * T::lit(ix as f64 / nx as f64);
                let x1 = if ix + 1 == nx { self.pos_max.x } else { self.pos_min.x + e.x * T::lit((ix + 1) as f64 / nx as f64) };
                let y0 = self.pos_min.y + e.y * T::lit(iy as f64 / ny as f64);
                let y1 = if iy + 1 == ny { self.pos_max.y } else { self.pos_min.y + e.y * T::lit((iy + 1) as f64 / ny as f64) };
                cells.push(Region::new(
                    Vec3::new(x0, y0, self.pos_min.z),
                    Vec3::new(x1, y1, self.pos_max.z),
                    self.orientation,
                )?);
            }
        }
        Ok(cells)
    }
}

/// Uniformly distributed unit quaternion (subgroup algorithm of Shoemake).
pub fn uniform_quaternion<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Quat<T> {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    Quat::new(
        T::lit(a * (tau * u2).sin()),
        T::lit(a * (tau * u2).cos()),
        T::lit(b * (tau * u3).sin()),
        T::lit(b * (tau * u3).cos()),
    )
    .normalize()
    .canonical()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn unit_box() -> Region<f64> {
        Region::new(Vec3::new(-1.0, 0.0, 2.0), Vec3::new(1.0, 0.5, 3.0), OrientationSet::Full).unwrap()
    }

    #[test]
    fn rejects_inverted_or_empty_bounds() {
        let fixed = OrientationSet::Fixed(Quat::identity());
        assert!(Region::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), fixed).is_err());
        assert!(Region::new(Vec3::zeros(), Vec3::zeros(), fixed).is_err());
        assert!(Region::<f64>::planar(0.0, 1.0, 0.0, 2.0, 0.0).is_ok());
    }

    #[test]
    fn samples_stay_inside() {
        let r = unit_box();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let p = r.sample(&mut rng);
            assert!(r.contains_position(p.translation()));
            assert!((p.rotation().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let r = unit_box();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| r.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn grid_cells_tile_the_region() {
        let r = Region::<f64>::planar(0.71, 1.08, -0.24, 0.78, 0.0).unwrap();
        let cells = r.grid_xy(4, 4).unwrap();
        let total: f64 = cells.iter().map(|c| c.volume()).sum();
        assert!((total - r.volume()).abs() < 1e-12);
        assert_eq!(cells[15].pos_max(), r.pos_max());
    }

    #[test]
    fn json_shape() {
        let r = Region::<f64>::planar(0.0, 1.0, 0.0, 2.0, 0.0).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"pos_min":[0.0,0.0,0.0],"pos_max":[1.0,2.0,0.0],"orientation":"fixed","fixed_q":[1.0,0.0,0.0,0.0]}"#
        );
        let full: Region<f64> =
            serde_json::from_str(r#"{"pos_min":[0,0,0],"pos_max":[1,1,1],"orientation":"full"}"#).unwrap();
        assert_eq!(full.orientation(), OrientationSet::Full);
    }
}
