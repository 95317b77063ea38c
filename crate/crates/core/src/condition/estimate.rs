//! Global estimate of `K(f) = max_x K(f,x)` by refining nets until the grid maximum is
//! certified.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{degree_weights, SINGULAR_TOLERANCE};
use crate::error::{NagError, Result};
use crate::eval::Evaluator;
use crate::grid::SphereGrid;
use crate::norms::{linf_norm_real, CertifiedNorm};
use crate::poly::PolySystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: u32,
    pub points: u64,
    pub grid_max: f64,
}

/// Result of [`k_estimate`]: `(1 - 2^{-k}) k_hat ≤ K(f) ≤ k_hat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub k_hat: f64,
    pub grid_max: f64,
    pub norm: CertifiedNorm,
    pub levels: Vec<LevelRecord>,
}

/// Writes the rows of `jac` projected onto `x^⊥` and scaled by `weights` into `rows`.
pub(crate) fn project_rows(jac: &[f64], x: &[f64], weights: &[f64], rows: &mut [f64]) {
    let m = x.len();
    for (i, w) in weights.iter().enumerate() {
        let r = &jac[i * m..(i + 1) * m];
        let dot: f64 = r.iter().zip(x).map(|(a, b)| a * b).sum();
        for j in 0..m {
            rows[i * m + j] = w * (r[j] - dot * x[j]);
        }
    }
}

/// Smallest and largest eigenvalue of the Gram matrix of `q` rows of length `m`.
pub(crate) fn gram_extremes(rows: &[f64], q: usize, m: usize) -> (f64, f64) {
    let g = |i: usize, j: usize| -> f64 { (0..m).map(|t| rows[i * m + t] * rows[j * m + t]).sum() };
    match q {
        1 => {
            let a = g(0, 0);
            (a, a)
        }
        2 => {
            let (a, b, c) = (g(0, 0), g(0, 1), g(1, 1));
            let lmax = 0.5 * (a + c) + (0.25 * (a - c) * (a - c) + b * b).sqrt();
            if lmax <= 0.0 {
                return (0.0, 0.0);
            }
            // det / λ_max avoids the cancellation in the closed-form λ_min.
            ((a * c - b * b).max(0.0) / lmax, lmax)
        }
        _ => {
            let ev = SymmetricEigen::new(DMatrix::from_fn(q, q, g)).eigenvalues;
            let lo = ev.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
            let hi = ev.iter().copied().fold(0.0, f64::max);
            (lo, hi)
        }
    }
}

/// `σ_q` of the projected, scaled Jacobian rows.
///
/// Projecting the full Jacobian onto the tangent space gives the same nonzero singular values
/// as the tangent derivative, and `q ≤ n` keeps `σ_q` among them. The Gram matrix is `q × q`,
/// so this is much cheaper than an SVD per grid point.
pub(crate) fn sigma_q_projected(jac: &[f64], x: &[f64], weights: &[f64], rows: &mut [f64]) -> f64 {
    let q = weights.len();
    let m = x.len();
    if q > m - 1 {
        return 0.0;
    }
    project_rows(jac, x, weights, rows);
    gram_extremes(rows, q, m).0.sqrt()
}

/// Largest value of `√q·t / max{‖f(x)‖, σ_q(Δ^{-1} D_x f)}` over the half net of `level`.
/// `+∞` as soon as a denominator vanishes.
fn grid_max(f: &PolySystem<f64>, t: f64, level: u32) -> Result<(f64, u64)> {
    let grid = SphereGrid::new(f.n(), level)?;
    let ev = Evaluator::new(f);
    let q = f.q();
    let m = f.n() + 1;
    let weights = degree_weights(&f.degrees(), 1.0);
    let num = (q as f64).sqrt() * t;
    let floor = SINGULAR_TOLERANCE * t;
    let rows = grid.fold_rows(
        true,
        || (0.0f64, ev.scratch(), vec![0.0; q], vec![0.0; q * m], vec![0.0; q * m]),
        |(best, pow, vals, jac, work), x| {
            ev.eval_jacobian_into(x, pow, vals, jac);
            let res = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
            let den = res.max(sigma_q_projected(jac, x, &weights, work));
            let k = if den <= floor { f64::INFINITY } else { num / den };
            if k > *best {
                *best = k;
            }
        },
    );
    Ok((rows.iter().map(|r| r.0).fold(0.0, f64::max), grid.half_len() as u64))
}

/// Estimates `K(f)` with relative accuracy `2^{-k}`; fails once the estimate reaches `2^b`.
///
/// Between levels the net is refined straight to the first level that could satisfy the
/// stopping rule for the current grid maximum, instead of one level at a time; only the
/// level that stops the loop matters for correctness.
pub fn k_estimate(f: &PolySystem<f64>, k: u32, b: Option<u32>) -> Result<KEstimate> {
    if f.is_zero() {
        return Err(NagError::InvalidInput("K is undefined for the zero system".into()));
    }
    let norm = linf_norm_real(f, k + 1)?;
    let d = f.max_degree() as f64;
    let target = 0.5f64.powi(k as i32 + 1);
    let cap = b.map(|b| 2f64.powi(b.min(1023) as i32));
    let mut levels = Vec::new();
    let mut level = 1u32;
    loop {
        let (kmax, points) = grid_max(f, norm.upper, level)?;
        levels.push(LevelRecord { level, points, grid_max: kmax });
        if let Some(cap) = cap {
            if kmax >= cap {
                return Err(NagError::ConditionOverflow { bits: b.unwrap_or(0), estimate: kmax });
            }
        }
        if !kmax.is_finite() {
            return Err(NagError::Numerical("a net point has a vanishing denominator, so K(f) is infinite".into()));
        }
        if d * kmax * 0.5f64.powi(level as i32) <= target {
            // Prop.-4.7-style bound with the certified t; one factor (1 - 2^{-(k+1)}) on each side.
            let k_hat = kmax / (1.0 - target);
            return Ok(KEstimate { k_hat, grid_max: kmax, norm, levels });
        }
        let needed = ((d * kmax).log2() + (k + 1) as f64).ceil() as u32;
        level = needed.max(level + 1);
    }
}
