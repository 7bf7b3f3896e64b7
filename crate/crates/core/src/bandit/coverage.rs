use rayon::prelude::*;

use crate::bandit::{CoverageOracle, WorkArea};
use crate::demonstration::TaskInstance;
use crate::error::{Error, Result};
use crate::geometry::{OrientationSet, Region, Vec3};

const MIN_GRID_POINTS: usize = 100;

/// Cell-centre positions of a grid with spacing close to `resolution` along every
/// non-degenerate axis of the region.
pub fn grid_positions(region: &Region<f64>, resolution: f64) -> Result<Vec<Vec3<f64>>> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidParameter(format!("grid resolution must be positive, got {resolution}")));
    }
    if matches!(region.orientation(), OrientationSet::Full) {
        return Err(Error::InvalidRegion("grid coverage needs a fixed orientation".into()));
    }
    let (lo, e) = (region.pos_min(), region.extent());
    let counts: Vec<usize> = (0..3).map(|i| if e[i] > 0.0 { (e[i] / resolution).round().max(1.0) as usize } else { 1 }).collect();
    let total: usize = counts.iter().product();
    if total < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution} gives {total} grid points, need at least {MIN_GRID_POINTS}"
        )));
    }
    let coord = |i: usize, k: usize| if e[i] > 0.0 { lo[i] + e[i] * (k as f64 + 0.5) / counts[i] as f64 } else { lo[i] };
    let mut out = Vec::with_capacity(total);
    for kz in 0..counts[2] {
        for ky in 0..counts[1] {
            for kx in 0..counts[0] {
                out.push(Vec3::new(coord(0, kx), coord(1, ky), coord(2, kz)));
            }
        }
    }
    Ok(out)
}

/// Fraction of grid instances in `region` for which some demonstration gives a plan.
pub fn brute_force_coverage<O: CoverageOracle>(
    region: &Region<f64>,
    demos: &[O::Demo],
    oracle: &O,
    resolution: f64,
) -> Result<f64> {
    let points = grid_positions(region, resolution)?;
    let outcomes = points
        .par_iter()
        .map(|p| oracle.evaluate(&TaskInstance::single(region.pose_at(*p)), demos))
        .collect::<Result<Vec<_>>>()?;
    Ok(outcomes.iter().filter(|o| o.covered).count() as f64 / points.len() as f64)
}

/// Brute-force coverage of every partition cell, each on its own grid of the same spacing.
pub fn partition_coverage<O: CoverageOracle>(
    wa: &WorkArea,
    demos: &[O::Demo],
    oracle: &O,
    resolution: f64,
) -> Result<Vec<f64>> {
    wa.partition().iter().map(|cell| brute_force_coverage(cell, demos, oracle, resolution)).collect()
}

/// Volume-weighted mean of per-cell values.
pub fn volume_weighted_mean(wa: &WorkArea, values: &[f64]) -> f64 {
    let total = wa.region().volume();
    wa.partition().iter().zip(values).map(|(c, v)| c.volume() / total * v).sum()
}
