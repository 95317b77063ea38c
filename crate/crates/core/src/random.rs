//! Seeded random streams and basic random objects.
//!
//! Every randomized routine derives independent ChaCha streams from `(seed, stream index)`,
//! so results do not depend on how work is split across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Samples drawn per stream by the chunked helpers.
pub const CHUNK: usize = 1024;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex normal: `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(s * normal(rng), s * normal(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| normal(rng)).collect();
        if let Some(u) = crate::linalg::normalize(&v) {
            return u;
        }
    }
}

pub fn complex_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Some(u) = crate::linalg::normalize(&v) {
            return u;
        }
    }
}

/// Uniform unit vector over the field of `T` (the sphere of `ℝ^dim` or of `ℂ^dim`).
pub fn unit_scalar_vector<T: crate::scalar::Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<T> {
    match T::FIELD {
        crate::scalar::Field::Real => unit_vector(rng, dim).into_iter().map(|v| T::from_re_im(v, 0.0)).collect(),
        crate::scalar::Field::Complex => {
            complex_unit_vector(rng, dim).into_iter().map(|c| T::from_re_im(c.re, c.im)).collect()
        }
    }
}

/// `count` uniform points on the unit sphere of `ℝ^dim`, reproducible for any thread count.
pub fn uniform_sphere_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream(seed, c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(move |_| unit_vector(&mut rng, dim))
        })
        .collect()
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign correction).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-distributed unitary matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}
