//! Presentation of per-cell estimates: the JSON view shared by the CLI and the
//! service, and an optional PNG rendering.

use std::path::Path;

use anyhow::{Context, Result};
use demosuff::acquisition::SessionState;
use demosuff::bandit::{heatmap, HeatmapCell, WorkArea};
use demosuff::geometry::Region;
use image::{Rgb, RgbImage};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct HeatmapView {
    pub work_area: Region<f64>,
    pub k: usize,
    /// Bandit round the estimates come from; 0 before the first round.
    pub iteration: usize,
    pub cells: Vec<HeatmapCell>,
    /// Positions of the sampled instances that failed in that round.
    pub failures: Vec<[f64; 3]>,
    pub demo_anchors: Vec<[f64; 3]>,
}

impl HeatmapView {
    pub fn of(wa: &WorkArea, state: &SessionState) -> Self {
        let last = state.history().last();
        Self {
            work_area: *wa.region(),
            k: wa.k(),
            iteration: state.iteration(),
            cells: last.map(|o| heatmap(wa, o)).unwrap_or_default(),
            failures: last
                .into_iter()
                .flat_map(|o| &o.estimates)
                .flat_map(|e| e.failures())
                .map(|f| f.instance.reference_pose().translation().to_array())
                .collect(),
            demo_anchors: state.demo_anchors().into_iter().map(|a| a.to_array()).collect(),
        }
    }
}

/// Green at no failures through yellow to red at all failures.
pub fn failure_color(mu_hat: f64) -> Rgb<u8> {
    let m = mu_hat.clamp(0.0, 1.0);
    let (r, g) = if m < 0.5 { (2.0 * m, 1.0) } else { (1.0, 2.0 * (1.0 - m)) };
    Rgb([(r * 255.0).round() as u8, (g * 255.0).round() as u8, 40])
}

/// Top-down rendering of the cells, `px_per_m` pixels per meter, x to the right
/// and y up. Failed samples are drawn as dark dots.
pub fn render_png(view: &HeatmapView, px_per_m: f64, path: &Path) -> Result<()> {
    let (lo, hi) = (view.work_area.pos_min(), view.work_area.pos_max());
    let w = (((hi.x - lo.x) * px_per_m).round() as u32).max(1);
    let h = (((hi.y - lo.y) * px_per_m).round() as u32).max(1);
    let to_px = |x: f64, y: f64| {
        let px = ((x - lo.x) * px_per_m).floor().clamp(0.0, (w - 1) as f64) as u32;
        let py = ((hi.y - y) * px_per_m).floor().clamp(0.0, (h - 1) as f64) as u32;
        (px, py)
    };
    let mut img = RgbImage::from_pixel(w, h, Rgb([128, 128, 128]));
    for c in &view.cells {
        let (x0, y1) = to_px(c.x_min, c.y_min);
        let (x1, y0) = to_px(c.x_max, c.y_max);
        for py in y0..=y1 {
            for px in x0..=x1 {
                img.put_pixel(px, py, failure_color(c.mu_hat));
            }
        }
    }
    for f in &view.failures {
        let (px, py) = to_px(f[0], f[1]);
        img.put_pixel(px, py, Rgb([30, 30, 30]));
    }
    img.save(path).with_context(|| format!("writing {}", path.display()))
}
