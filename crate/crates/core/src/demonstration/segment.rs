use crate::error::{Error, Result};
use crate::geometry::{Pose, ScrewPath};
use crate::scalar::Real;

const COARSE_SAMPLES: usize = 16;
const GOLDEN_ITERATIONS: usize = 40;

/// Smallest pose distance from `p` to the constant-screw path `path` (over `tau` in [0, 1]).
pub fn distance_to_screw_path<T: Real>(path: &ScrewPath<T>, p: &Pose<T>) -> T {
    let f = |tau: T| path.at(tau).distance(p);
    let step = T::one() / T::lit(COARSE_SAMPLES as f64);
    let mut best_k = 0;
    let mut best = f(T::zero());
    for k in 1..=COARSE_SAMPLES {
        let d = f(step * T::lit(k as f64));
        if d < best {
            best = d;
            best_k = k;
        }
    }
    let mut lo = (step * T::lit(best_k as f64) - step).max(T::zero());
    let mut hi = (step * T::lit(best_k as f64) + step).min(T::one());
    let ratio = T::lit(0.618_033_988_749_894_9);
    let mut a = hi - (hi - lo) * ratio;
    let mut b = lo + (hi - lo) * ratio;
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..GOLDEN_ITERATIONS {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - (hi - lo) * ratio;
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + (hi - lo) * ratio;
            fb = f(b);
        }
    }
    best.min(fa).min(fb)
}

fn segment_fits<T: Real>(path: &[Pose<T>], i: usize, j: usize, threshold: T) -> bool {
    if j <= i + 1 {
        return true;
    }
    let screw = ScrewPath::new(&path[i], &path[j]);
    path[i + 1..j].iter().all(|p| distance_to_screw_path(&screw, p) <= threshold)
}

/// Indices of the guiding poses chosen by a greedy maximal-segment scan.
///
/// Starting from the first pose, each segment grows one pose at a time while every
/// interior pose stays within `threshold` of the screw path between the segment's
/// endpoints; the last pose that fits becomes the next guide.
pub fn guiding_indices<T: Real>(path: &[Pose<T>], threshold: T) -> Result<Vec<usize>> {
    if path.len() < 2 {
        return Err(Error::PathTooShort { min: 2, actual: path.len() });
    }
    if !(threshold > T::zero()) {
        return Err(Error::InvalidParameter(format!("segmentation threshold must be positive, got {threshold}")));
    }
    let last = path.len() - 1;
    let mut indices = vec![0];
    let mut i = 0;
    while i < last {
        let mut j = i + 1;
        while j < last && segment_fits(path, i, j + 1, threshold) {
            j += 1;
        }
        indices.push(j);
        i = j;
    }
    Ok(indices)
}

/// Guiding poses of a pose path: a subsequence starting at `path[0]` and ending at
/// the last pose, each consecutive pair spanning one constant-screw segment.
pub fn segment_into_screws<T: Real>(path: &[Pose<T>], threshold: T) -> Result<Vec<Pose<T>>> {
    Ok(guiding_indices(path, threshold)?.into_iter().map(|i| path[i]).collect())
}
