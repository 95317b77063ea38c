//! Spherical nets obtained by centrally projecting a uniform grid on the boundary of the
//! cube `[-1, 1]^{n+1}`.
//!
//! Each face is split into `m` intervals per axis. Any point of a face lies within chord
//! distance `√n/m` of a lattice point; radial projection onto the sphere is the metric
//! projection onto the unit ball for points outside it, hence 1-Lipschitz; a chord `c`
//! subtends the arc `2·asin(c/2)`. The certified mesh is therefore `2·asin(√n/(2m))`.
//!
//! Nets are never materialized by the norm and condition code: points are streamed row by
//! row. Every homogeneous quantity used there is even under `x ↦ -x`, so the "half" net
//! (faces with a `+1` coordinate) suffices for maxima.

use rayon::prelude::*;

use crate::error::{NagError, Result};
use crate::linalg::sphere_distance;

pub const MAX_N: usize = 8;
pub const MAX_LEVEL: u32 = 24;
pub const DEFAULT_MAX_POINTS: u128 = 50_000_000;
pub const GRID_ENV: &str = "NAG_MAX_GRID";

/// Grid guard: `NAG_MAX_GRID` if set and valid, otherwise [`DEFAULT_MAX_POINTS`].
pub fn max_grid_points() -> u128 {
    std::env::var(GRID_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u128>().ok())
        .unwrap_or(DEFAULT_MAX_POINTS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n: usize,
    level: u32,
    divisions: u64,
    mesh: f64,
}

impl SphereGrid {
    /// The `2^{-k}`-net of `S^n`, subject to the global grid guard.
    pub fn new(n: usize, k: u32) -> Result<Self> {
        Self::with_limit(n, k, max_grid_points())
    }

    pub fn with_limit(n: usize, k: u32, limit: u128) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(NagError::InvalidInput(format!("sphere dimension n = {n} outside 1..={MAX_N}")));
        }
        if k > MAX_LEVEL {
            return Err(NagError::SizeLimit { guard: "grid level", predicted: k as u128, limit: MAX_LEVEL as u128 });
        }
        let divisions = Self::divisions_for(n, k);
        let g = SphereGrid { n, level: k, divisions, mesh: mesh_for(n, divisions) };
        let predicted = g.len();
        if predicted > limit {
            return Err(NagError::SizeLimit { guard: "grid points", predicted, limit });
        }
        Ok(g)
    }

    /// Smallest `m` with `2·asin(√n/(2m)) < 2^{-k}`.
    pub fn divisions_for(n: usize, k: u32) -> u64 {
        let delta = 0.5f64.powi(k as i32);
        let target = (n as f64).sqrt() / (2.0 * (delta / 2.0).sin());
        let mut m = (target * (1.0 + 1e-12)).floor().max(0.0) as u64 + 1;
        while mesh_for(n, m) >= delta {
            m += 1;
        }
        m
    }

    /// Point count of the deduplicated net, without building it.
    pub fn predicted_len(n: usize, k: u32) -> u128 {
        full_count(n, Self::divisions_for(n, k))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Intervals per face axis.
    pub fn divisions(&self) -> u64 {
        self.divisions
    }

    /// Lattice spacing on the cube faces.
    pub fn spacing(&self) -> f64 {
        2.0 / self.divisions as f64
    }

    /// Certified bound: every point of `S^n` is at geodesic distance `< mesh()` from the net.
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    /// The nominal `δ = 2^{-k}`; always `> mesh()`.
    pub fn delta(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    pub fn len(&self) -> u128 {
        full_count(self.n, self.divisions)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Size of the antipodal half net.
    pub fn half_len(&self) -> u128 {
        half_count(self.n, self.divisions)
    }

    fn rows(&self, half: bool) -> Vec<Row> {
        let m = self.divisions as u32;
        let mut rows = Vec::new();
        for axis in 0..=self.n {
            let signs: &[i8] = if half { &[1] } else { &[-1, 1] };
            for &sign in signs {
                let first_free = if axis == 0 { 1 } else { 0 };
                let (lo, hi) = axis_range(first_free, axis, m, half);
                for i0 in lo..=hi {
                    if lo > hi {
                        break;
                    }
                    rows.push(Row { axis, sign, first: i0 });
                }
            }
        }
        rows
    }

    /// Visits every point (unit vectors), one accumulator per row, in a fixed row order.
    /// The returned vector does not depend on the number of worker threads.
    pub fn fold_rows<A, I, V>(&self, half: bool, init: I, visit: V) -> Vec<A>
    where
        A: Send,
        I: Fn() -> A + Sync,
        V: Fn(&mut A, &[f64]) + Sync,
    {
        let rows = self.rows(half);
        rows.par_iter()
            .map(|row| {
                let mut acc = init();
                self.walk_row(row, half, |x| visit(&mut acc, x));
                acc
            })
            .collect()
    }

    fn walk_row(&self, row: &Row, half: bool, mut visit: impl FnMut(&[f64])) {
        let m = self.divisions as u32;
        let dim = self.n + 1;
        let mf = self.divisions as f64;
        let coord = |i: u32| (2.0 * i as f64 - mf) / mf;
        let free: Vec<usize> = (0..dim).filter(|&j| j != row.axis).collect();
        let ranges: Vec<(u32, u32)> = free.iter().map(|&j| axis_range(j, row.axis, m, half)).collect();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return;
        }
        let mut idx: Vec<u32> = ranges.iter().map(|r| r.0).collect();
        idx[0] = row.first;
        let mut y = vec![0.0; dim];
        let mut x = vec![0.0; dim];
        y[row.axis] = row.sign as f64;
        loop {
            for (p, &j) in free.iter().enumerate() {
                y[j] = coord(idx[p]);
            }
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            for j in 0..dim {
                x[j] = y[j] / norm;
            }
            visit(&x);
            // Odometer over free axes 1.. (axis 0 of `free` is fixed by the row).
            let mut p = free.len() - 1;
            loop {
                if p == 0 {
                    return;
                }
                if idx[p] < ranges[p].1 {
                    idx[p] += 1;
                    break;
                }
                idx[p] = ranges[p].0;
                p -= 1;
            }
        }
    }

    /// Materializes the whole net (guarded by the grid limit).
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.fold_rows(false, Vec::new, |acc: &mut Vec<Vec<f64>>, x| acc.push(x.to_vec()))
            .into_iter()
            .flatten()
            .collect()
    }

    /// An upper bound on the geodesic distance from a unit vector `x` to the net, obtained by
    /// scanning lattice points adjacent to the central projections of `x` onto nearby faces.
    pub fn nearest_distance(&self, x: &[f64]) -> f64 {
        let dim = self.n + 1;
        let m = self.divisions as f64;
        let amax = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut best = f64::INFINITY;
        let mut cand = vec![0.0; dim];
        for axis in 0..dim {
            if x[axis].abs() < 0.5 * amax || x[axis] == 0.0 {
                continue;
            }
            let s = x[axis].abs();
            let lower: Vec<f64> = (0..dim)
                .map(|j| {
                    let y = (x[j] / s).clamp(-1.0, 1.0);
                    ((y + 1.0) * m / 2.0).floor().min(m - 1.0).max(0.0)
                })
                .collect();
            let free: Vec<usize> = (0..dim).filter(|&j| j != axis).collect();
            for mask in 0u32..(1 << free.len()) {
                for (p, &j) in free.iter().enumerate() {
                    let i = lower[j] + ((mask >> p) & 1) as f64;
                    cand[j] = (2.0 * i - m) / m;
                }
                cand[axis] = x[axis].signum();
                let norm = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
                let unit: Vec<f64> = cand.iter().map(|v| v / norm).collect();
                best = best.min(sphere_distance(x, &unit));
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy)]
struct Row {
    axis: usize,
    sign: i8,
    first: u32,
}

/// Admissible lattice indices on free axis `j` of face `axis`, chosen so every boundary point
/// is produced exactly once (`half`: only faces with a `+1` coordinate).
fn axis_range(j: usize, axis: usize, m: u32, half: bool) -> (u32, u32) {
    if j < axis {
        if half {
            (0, m - 1)
        } else {
            (1, m.saturating_sub(1))
        }
    } else {
        (0, m)
    }
}

fn mesh_for(n: usize, m: u64) -> f64 {
    let c = (n as f64).sqrt() / (2.0 * m as f64);
    2.0 * c.min(1.0).asin()
}

fn full_count(n: usize, m: u64) -> u128 {
    let m = m as u128;
    (0..=n as u32).map(|a| 2 * (m - 1).pow(a) * (m + 1).pow(n as u32 - a)).sum()
}

fn half_count(n: usize, m: u64) -> u128 {
    let m = m as u128;
    (0..=n as u32).map(|a| m.pow(a) * (m + 1).pow(n as u32 - a)).sum()
}

/// Statistical cover check: the largest distance from `samples` uniform points to the net.
pub fn net_cover_check(net: &SphereGrid, samples: usize, seed: u64) -> f64 {
    let pts = crate::random::uniform_sphere_points(net.n() + 1, samples, seed);
    pts.par_iter().map(|x| net.nearest_distance(x)).reduce(|| 0.0, f64::max)
}

/// Cover check for an explicit point set by brute force.
pub fn explicit_cover_check(points: &[Vec<f64>], dim: usize, samples: usize, seed: u64) -> f64 {
    let pts = crate::random::uniform_sphere_points(dim, samples, seed);
    pts.par_iter()
        .map(|x| points.iter().map(|p| sphere_distance(x, p)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}
