use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bandit::{BanditOutcome, WorkArea};

/// One partition cell with its failure estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell {
    pub arm_index: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub mu_hat: f64,
    pub n_samples: usize,
    pub n_failures: usize,
}

pub fn heatmap(wa: &WorkArea, outcome: &BanditOutcome) -> Vec<HeatmapCell> {
    wa.partition()
        .iter()
        .zip(&outcome.estimates)
        .map(|(cell, e)| HeatmapCell {
            arm_index: e.arm_index(),
            x_min: cell.pos_min().x,
            x_max: cell.pos_max().x,
            y_min: cell.pos_min().y,
            y_max: cell.pos_max().y,
            mu_hat: e.mu_hat(),
            n_samples: e.n_samples(),
            n_failures: e.failures().len(),
        })
        .collect()
}

pub fn write_heatmap_csv<W: Write>(cells: &[HeatmapCell], mut out: W) -> std::io::Result<()> {
    writeln!(out, "arm_index,x_min,x_max,y_min,y_max,mu_hat,n_samples,n_failures")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.arm_index, c.x_min, c.x_max, c.y_min, c.y_max, c.mu_hat, c.n_samples, c.n_failures
        )?;
    }
    Ok(())
}
