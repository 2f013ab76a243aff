//! Seeded random sampling used by the checks and by the reference media.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMat;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform point on the unit sphere in `R^n`.
pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn unit_vector3(rng: &mut impl Rng) -> [f64; 3] {
    let v = unit_vector(rng, 3);
    [v[0], v[1], v[2]]
}

/// Complex matrix with independent standard normal real and imaginary parts.
pub fn random_cmat(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, |_, _| Complex64::new(normal(rng), normal(rng)))
}

pub fn random_real_mat(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, |_, _| Complex64::new(normal(rng), 0.0))
}

/// Unitary factor of a modified Gram-Schmidt QR of a random matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    orthonormalize(&random_cmat(rng, n))
}

/// Real orthogonal matrix (stored complex).
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> CMat {
    orthonormalize(&random_real_mat(rng, n))
}

/// Proper rotation of `R^3`.
pub fn random_rotation(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let q = random_orthogonal(rng, 3);
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = q[(i, j)].re;
        }
    }
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    if det < 0.0 {
        for row in r.iter_mut() {
            row[0] = -row[0];
        }
    }
    r
}

fn orthonormalize(m: &CMat) -> CMat {
    let n = m.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j)).collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj = crate::linalg::vdot(&done[k], &rest[0]);
            for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                *x -= proj * q;
            }
        }
        crate::linalg::normalize(&mut cols[j]);
    }
    CMat::from_columns(&cols)
}
