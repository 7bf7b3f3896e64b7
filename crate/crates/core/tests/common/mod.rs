#![allow(dead_code)]

use demosuff::geometry::{uniform_quaternion, Pose, Vec3};
use nalgebra::{Matrix3, Matrix4, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pose<R: Rng>(rng: &mut R, max_translation: f64) -> Pose<f64> {
    let t = Vec3::new(
        rng.random_range(-max_translation..max_translation),
        rng.random_range(-max_translation..max_translation),
        rng.random_range(-max_translation..max_translation),
    );
    Pose::new(uniform_quaternion(rng), t)
}

pub fn to_na(p: &Pose<f64>) -> Matrix4<f64> {
    let m = p.to_matrix();
    Matrix4::from_fn(|r, c| m[r][c])
}

pub fn from_na(m: &Matrix4<f64>) -> Pose<f64> {
    let mut a = [[0.0; 4]; 4];
    for (r, row) in a.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[(r, c)];
        }
    }
    Pose::from_matrix(&a)
}

pub fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// 4x4 twist matrix `[[hat(omega), v], [0, 0]]`.
pub fn twist_matrix(omega: Vec3<f64>, v: Vec3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    let h = hat(&Vector3::new(omega.x, omega.y, omega.z));
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&h);
    m[(0, 3)] = v.x;
    m[(1, 3)] = v.y;
    m[(2, 3)] = v.z;
    m
}

/// Principal matrix logarithm by inverse scaling and squaring: repeated
/// Denman-Beavers square roots until close to the identity, then the
/// Mercator series of log(I + X).
pub fn matrix_log(a: &Matrix4<f64>) -> Matrix4<f64> {
    let id = Matrix4::<f64>::identity();
    let mut y = *a;
    let mut k = 0;
    while (y - id).norm() > 1e-3 {
        let mut z = id;
        let mut yk = y;
        for _ in 0..60 {
            let yi = yk.try_inverse().expect("invertible");
            let zi = z.try_inverse().expect("invertible");
            let yn = (yk + zi) * 0.5;
            z = (z + yi) * 0.5;
            let done = (yn - yk).norm() < 1e-15;
            yk = yn;
            if done {
                break;
            }
        }
        y = yk;
        k += 1;
        assert!(k < 60, "square roots did not approach identity");
    }
    let x = y - id;
    let mut term = x;
    let mut sum = Matrix4::zeros();
    for n in 1..40 {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        sum += term * (sign / n as f64);
        term *= x;
    }
    sum * 2f64.powi(k)
}
