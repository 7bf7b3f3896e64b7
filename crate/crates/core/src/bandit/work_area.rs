use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Region, Vec3};

/// The task-instance set split into `k` disjoint grid cells (the bandit arms).
///
/// The grid is chosen among the factorizations `nx * ny = k` to make cells as
/// close to square as possible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WorkAreaRepr", into = "WorkAreaRepr")]
pub struct WorkArea {
    region: Region<f64>,
    nx: usize,
    ny: usize,
    partition: Vec<Region<f64>>,
}

#[derive(Serialize, Deserialize)]
struct WorkAreaRepr {
    region: Region<f64>,
    k: usize,
    #[serde(default, skip_deserializing)]
    partition: Vec<Region<f64>>,
}

impl TryFrom<WorkAreaRepr> for WorkArea {
    type Error = Error;

    fn try_from(r: WorkAreaRepr) -> Result<Self> {
        WorkArea::new(r.region, r.k)
    }
}

impl From<WorkArea> for WorkAreaRepr {
    fn from(w: WorkArea) -> Self {
        WorkAreaRepr { region: w.region, k: w.partition.len(), partition: w.partition }
    }
}

fn squareness(ex: f64, ey: f64, nx: usize, ny: usize) -> f64 {
    let (cx, cy) = (ex / nx as f64, ey / ny as f64);
    if cx <= 0.0 || cy <= 0.0 {
        // a degenerate axis is never split
        return if (cx <= 0.0 && nx > 1) || (cy <= 0.0 && ny > 1) { f64::INFINITY } else { 1.0 };
    }
    (cx / cy).max(cy / cx)
}

impl WorkArea {
    pub fn new(region: Region<f64>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("K must be positive".into()));
        }
        let e = region.extent();
        let (nx, ny) = (1..=k)
            .filter(|nx| k % nx == 0)
            .map(|nx| (nx, k / nx))
            .min_by(|a, b| squareness(e.x, e.y, a.0, a.1).total_cmp(&squareness(e.x, e.y, b.0, b.1)))
            .expect("k >= 1 has a factorization");
        if !squareness(e.x, e.y, nx, ny).is_finite() {
            return Err(Error::InvalidRegion(format!("cannot split the work area into {k} cells along its extent")));
        }
        let partition = region.grid_xy(nx, ny)?;
        Ok(Self { region, nx, ny, partition })
    }

    pub fn region(&self) -> &Region<f64> {
        &self.region
    }

    pub fn k(&self) -> usize {
        self.partition.len()
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn partition(&self) -> &[Region<f64>] {
        &self.partition
    }

    /// Arm whose cell contains `p` (cells are half-open except on the far edges).
    pub fn arm_of(&self, p: Vec3<f64>) -> Option<usize> {
        if !self.region.contains_position(p) {
            return None;
        }
        let lo = self.region.pos_min();
        let e = self.region.extent();
        let cell = |v: f64, lo: f64, ext: f64, n: usize| {
            if ext > 0.0 {
                (((v - lo) / ext * n as f64).floor() as usize).min(n - 1)
            } else {
                0
            }
        };
        Some(cell(p.y, lo.y, e.y, self.ny) * self.nx + cell(p.x, lo.x, e.x, self.nx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> Region<f64> {
        Region::planar(0.71, 1.08, -0.24, 0.78, 0.0).unwrap()
    }

    #[test]
    fn grid_shape_follows_aspect() {
        assert_eq!(WorkArea::new(desk(), 1).unwrap().grid(), (1, 1));
        assert_eq!(WorkArea::new(desk(), 4).unwrap().grid(), (1, 4));
        assert_eq!(WorkArea::new(desk(), 16).unwrap().grid(), (2, 8));
        let segment = Region::planar(0.0, 2.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(WorkArea::new(segment, 5).unwrap().grid(), (5, 1));
        assert!(WorkArea::new(desk(), 0).is_err());
    }

    #[test]
    fn cells_tile_the_region() {
        let wa = WorkArea::new(desk(), 16).unwrap();
        let total: f64 = wa.partition().iter().map(|c| c.volume()).sum();
        assert!((total - desk().volume()).abs() < 1e-12);
        for (j, c) in wa.partition().iter().enumerate() {
            assert_eq!(wa.arm_of(c.center()), Some(j));
        }
        assert_eq!(wa.arm_of(Vec3::new(0.0, 0.0, 0.0)), None);
    }

    #[test]
    fn json_round_trip_rebuilds_partition() {
        let wa = WorkArea::new(desk(), 4).unwrap();
        let text = serde_json::to_string(&wa).unwrap();
        assert!(text.contains("\"k\":4"));
        let back: WorkArea = serde_json::from_str(&text).unwrap();
        assert_eq!(back, wa);
    }
}
