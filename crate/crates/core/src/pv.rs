//! Interval subdivision for real hypersurfaces in `[-a, a]^n`, with the sup-norm of the
//! homogenization as the only global quantity.
//!
//! A box is accepted when its center certifies, through Lipschitz bounds on the normalized
//! value and gradient maps, that either `f` has no zero in the box or gradients in the box
//! pairwise make acute angles.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::k_local;
use crate::error::{NagError, Result};
use crate::norms::{linf_norm_real, CertifiedNorm};
use crate::poly::{AffinePoly, PolySystem};
use crate::random;

/// Axis-aligned cube `center + [-width/2, width/2]^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Box {
    pub center: Vec<f64>,
    pub width: f64,
}

impl Box {
    /// `[-a, a]^n`.
    pub fn root(n: usize, a: f64) -> Self {
        Box { center: vec![0.0; n], width: 2.0 * a }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.center.iter().zip(x).all(|(c, v)| (v - c).abs() <= self.width / 2.0)
    }

    /// A uniform point of the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.center.iter().map(|c| c + self.width * (rng.gen::<f64>() - 0.5)).collect()
    }
}

/// `2^n` children of width `w/2` centered at `m ± w/4`; exact for dyadic inputs.
pub fn standard_subdivision(b: &Box) -> Vec<Box> {
    let n = b.center.len();
    let q = b.width / 4.0;
    (0..1usize << n)
        .map(|mask| Box {
            center: b.center.iter().enumerate().map(|(j, c)| if mask >> j & 1 == 1 { c + q } else { c - q }).collect(),
            width: b.width / 2.0,
        })
        .collect()
}

/// `IO(x) = (1, x)/√(1 + ‖x‖²)`.
pub fn io_map(x: &[f64]) -> Vec<f64> {
    let s = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
    std::iter::once(1.0 / s).chain(x.iter().map(|v| v / s)).collect()
}

/// The polynomial together with its homogenization and certified norm bound `Q`.
#[derive(Debug, Clone)]
pub struct PvInput {
    pub f: AffinePoly,
    pub degree: u32,
    pub homogenized: PolySystem<f64>,
    pub norm: CertifiedNorm,
}

impl PvInput {
    pub fn new(f: AffinePoly, k_norm: u32) -> Result<Self> {
        let degree = f.degree();
        if f.terms().is_empty() {
            return Err(NagError::InvalidInput("the zero polynomial has no zero-set subdivision".into()));
        }
        if f.n() == 0 {
            return Err(NagError::InvalidInput("need at least one variable".into()));
        }
        let homogenized = PolySystem::new(vec![f.homogenize(degree)?])?;
        let norm = linf_norm_real(&homogenized, k_norm)?;
        Ok(PvInput { f, degree, homogenized, norm })
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// `(f̂(x), ‖∇̂f(x)‖)` with the certified bound `Q` in place of `‖f‖∞`.
    pub fn hat_values(&self, x: &[f64]) -> (f64, f64) {
        let d = self.degree as f64;
        let s = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        let q = self.norm.upper;
        let value = self.f.eval(x) / (q * s.powf((d - 1.0) / 2.0));
        let grad = self.f.gradient(x).iter().map(|g| g * g).sum::<f64>().sqrt();
        let grad = if self.degree == 0 { 0.0 } else { grad / (d * q * s.powf(d / 2.0 - 1.0)) };
        (value, grad)
    }

    pub fn box_predicate(&self, b: &Box) -> Predicate {
        let d = self.degree as f64;
        let rn = (self.n() as f64).sqrt();
        let (value, grad) = self.hat_values(&b.center);
        if value.abs() > 2.0 * d * rn * b.width {
            Predicate::Accept(Clause::Value)
        } else if grad > 2.0 * std::f64::consts::SQRT_2 * d * rn * b.width {
            Predicate::Accept(Clause::Gradient)
        } else {
            Predicate::Reject
        }
    }

    /// `K(f^h, IO(x))` with the certified norm.
    pub fn k_at(&self, x: &[f64]) -> Result<f64> {
        Ok(k_local(&self.homogenized, &io_map(x), &self.norm)?.value)
    }

    /// `1/(2^{3/2} d^{3/2} √n K(f^h, IO(x)))^n`.
    pub fn local_size_bound(&self, x: &[f64]) -> Result<f64> {
        Ok(size_bound_from_k(self.degree, self.n(), self.k_at(x)?))
    }
}

pub fn size_bound_from_k(degree: u32, n: usize, k: f64) -> f64 {
    let d = degree as f64;
    let base = 2f64.powf(1.5) * d.powf(1.5) * (n as f64).sqrt() * k;
    base.powi(n as i32).recip()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    Value,
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Accept(Clause),
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedBox {
    #[serde(flatten)]
    pub cell: Box,
    pub clause: Clause,
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvStats {
    /// Boxes on which the predicate was evaluated.
    pub processed: u64,
    pub accepted: u64,
    pub max_depth: u32,
    pub norm: CertifiedNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvResult {
    /// Sorted by center, then width.
    pub accepted: Vec<AcceptedBox>,
    pub stats: PvStats,
}

pub const DEFAULT_MAX_DEPTH: u32 = 20;

/// Subdivides `[-a, a]^n` until every box satisfies the predicate.
pub fn pv_subdivide(f: &AffinePoly, a: f64, k_norm: u32, max_depth: u32) -> Result<PvResult> {
    let input = PvInput::new(f.clone(), k_norm)?;
    pv_subdivide_input(&input, a, max_depth)
}

pub fn pv_subdivide_input(input: &PvInput, a: f64, max_depth: u32) -> Result<PvResult> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(NagError::InvalidInput(format!("half-width a must be positive and finite, got {a}")));
    }
    let mut frontier = vec![Box::root(input.n(), a)];
    let mut accepted = Vec::new();
    let mut processed = 0u64;
    let mut depth = 0u32;
    let mut deepest = 0u32;
    while !frontier.is_empty() {
        processed += frontier.len() as u64;
        let verdicts: Vec<Predicate> = frontier.par_iter().map(|b| input.box_predicate(b)).collect();
        let mut rejected = Vec::new();
        for (b, v) in frontier.into_iter().zip(verdicts) {
            match v {
                Predicate::Accept(clause) => {
                    deepest = deepest.max(depth);
                    accepted.push(AcceptedBox { cell: b, clause, depth });
                }
                Predicate::Reject => rejected.push(b),
            }
        }
        if !rejected.is_empty() && depth == max_depth {
            return Err(NagError::MaxDepth { max_depth, boxes: rejected });
        }
        frontier = rejected.iter().flat_map(standard_subdivision).collect();
        depth += 1;
    }
    accepted.sort_by(|x, y| {
        x.cell
            .center
            .iter()
            .zip(&y.cell.center)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.cell.width.total_cmp(&y.cell.width))
    });
    let stats = PvStats { processed, accepted: accepted.len() as u64, max_depth: deepest, norm: input.norm };
    Ok(PvResult { accepted, stats })
}

/// Outcome of sampling the exact condition on one box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub sign_change: bool,
    pub obtuse_gradients: bool,
}

impl SampleCheck {
    /// Neither clause of the exact condition is contradicted.
    pub fn holds(&self) -> bool {
        !(self.sign_change && self.obtuse_gradients)
    }
}

/// Samples `f` and `∇f` at `samples` uniform points (plus the corners) of `b` and reports
/// whether the values change sign and whether two gradients make an obtuse angle.
pub fn sample_condition(f: &AffinePoly, b: &Box, samples: usize, seed: u64) -> SampleCheck {
    let mut rng = random::stream(seed, 0);
    let n = b.center.len();
    let corners = (0..1usize << n).map(|mask| {
        b.center.iter().enumerate().map(|(j, c)| if mask >> j & 1 == 1 { c + b.width / 2.0 } else { c - b.width / 2.0 }).collect()
    });
    let pts: Vec<Vec<f64>> = corners.chain((0..samples).map(|_| b.sample(&mut rng))).collect();
    let (mut pos, mut neg) = (false, false);
    for p in &pts {
        let v = f.eval(p);
        pos |= v > 0.0;
        neg |= v < 0.0;
    }
    let sign_change = (pos && neg) || pts.iter().any(|p| f.eval(p) == 0.0);
    let obtuse_gradients = sign_change && {
        let grads: Vec<Vec<f64>> = pts.iter().map(|p| f.gradient(p)).collect();
        has_obtuse_pair(&grads)
    };
    SampleCheck { sign_change, obtuse_gradients }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Whether two of the vectors have a nonpositive inner product.
pub fn has_obtuse_pair(v: &[Vec<f64>]) -> bool {
    if v.len() < 2 {
        return false;
    }
    if v.iter().any(|g| g.iter().all(|c| *c == 0.0)) {
        return true;
    }
    if v[0].len() != 2 {
        return v.par_iter().enumerate().any(|(i, g)| v[i + 1..].iter().any(|h| dot(g, h) <= 0.0));
    }
    // In the plane the most obtuse partner of each vector is the one angularly nearest its
    // antipode; checking the two sorted neighbours of the antipode with exact dot products
    // decides the question in O(m log m).
    let mut by_angle: Vec<(f64, usize)> = v.iter().enumerate().map(|(i, g)| (g[1].atan2(g[0]), i)).collect();
    by_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = by_angle.len();
    by_angle.iter().any(|&(theta, i)| {
        let target = if theta > 0.0 { theta - std::f64::consts::PI } else { theta + std::f64::consts::PI };
        let pos = by_angle.partition_point(|&(a, _)| a < target);
        [pos % m, (pos + m - 1) % m, (pos + 1) % m].iter().any(|&k| dot(&v[i], &v[by_angle[k].1]) <= 0.0)
    })
}

/// Monte-Carlo mean of `K(f^h, IO(r))^n` over `r` uniform in `[-a, a]^n`, with its standard error.
pub fn expected_k_power(input: &PvInput, a: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let n = input.n();
    let root = Box::root(n, a);
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::stream(seed, i as u64);
            input.k_at(&root.sample(&mut rng)).map(|k| k.powi(n as i32))
        })
        .collect::<Result<_>>()?;
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0).max(1.0);
    Ok((mean, (var / m).sqrt()))
}

/// `d^{3n/2}·max{1, a^n}·2^{n log₂ n / 2 + 11n}`, the factor multiplying `E K^n` in the
/// final-subdivision size bound.
pub fn box_count_prefactor(degree: u32, n: usize, a: f64) -> f64 {
    let nf = n as f64;
    let log_term = if n > 1 { nf * nf.log2() / 2.0 } else { 0.0 };
    (degree as f64).powf(1.5 * nf) * a.powi(n as i32).max(1.0) * 2f64.powf(log_term + 11.0 * nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn circle() -> AffinePoly {
        AffinePoly::new(2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0), (vec![0, 0], -0.25)]).unwrap()
    }

    fn x1(n: usize) -> AffinePoly {
        let mut a = vec![0u32; n];
        a[0] = 1;
        AffinePoly::new(n, [(a, 1.0)]).unwrap()
    }

    #[test]
    fn obtuse_pair_matches_pairwise_scan() {
        let mut rng = random::stream(9, 0);
        for trial in 0..400 {
            let m = 2 + trial % 30;
            let spread = 0.2 + 3.0 * (trial as f64 / 400.0);
            let base: f64 = rng.gen_range(-3.0..3.0);
            let v: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    let a = base + rng.gen_range(-spread..spread);
                    let r = rng.gen_range(0.1..2.0);
                    vec![r * a.cos(), r * a.sin()]
                })
                .collect();
            let brute = (0..m).any(|i| (i + 1..m).any(|j| dot(&v[i], &v[j]) <= 0.0));
            assert_eq!(has_obtuse_pair(&v), brute, "{v:?}");
        }
        assert!(has_obtuse_pair(&[vec![1.0, 0.0], vec![0.0, 1.0]]));
        assert!(!has_obtuse_pair(&[vec![1.0, 0.0], vec![1.0, 1e-9]]));
        assert!(has_obtuse_pair(&[vec![1.0, 0.0], vec![0.0, 0.0]]));
    }

    #[test]
    fn io_map_values() {
        assert_eq!(io_map(&[0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let y = io_map(&[1.0, 0.0]);
        assert_relative_eq!(y[0], s, epsilon = 1e-15);
        assert_relative_eq!(y[1], s, epsilon = 1e-15);
        let mut rng = random::stream(9, 0);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| 10.0 * random::normal(&mut rng)).collect();
            assert_relative_eq!(crate::linalg::norm2(&io_map(&x)), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn hat_values_examples() {
        let lin = PvInput::new(x1(2), 7).unwrap();
        // ‖X_1‖∞ = 1 exactly, so Q = 1 up to the certified slack.
        assert!(lin.norm.upper >= 1.0 && lin.norm.upper <= 1.0 / (1.0 - 2f64.powi(-7)));
        let (v, g) = lin.hat_values(&[0.0, 0.0]);
        assert_eq!(v, 0.0);
        assert_relative_eq!(g * lin.norm.upper, 1.0, epsilon = 1e-15);
        let c = PvInput::new(circle(), 7).unwrap();
        let (v, _) = c.hat_values(&[0.0, 0.0]);
        assert_relative_eq!(v, -0.25 / c.norm.upper, epsilon = 1e-15);
    }

    #[test]
    fn hat_values_are_bounded_by_the_projective_factor() {
        // f̂(x) = f^h(IO x)·√(1+‖x‖²)/Q and ∂_j f(x)/(dQ(1+‖x‖²)^{d/2-1}) = ∂_j f^h(IO x)·√(1+‖x‖²)/(dQ),
        // so Kellogg's bound gives √(1+‖x‖²), not 1.
        let c = PvInput::new(circle(), 7).unwrap();
        let d = c.degree as f64;
        let mut rng = random::stream(3, 0);
        for _ in 0..2000 {
            let x: Vec<f64> = (0..2).map(|_| 5.0 * random::normal(&mut rng)).collect();
            let s = 1.0 + x.iter().map(|t| t * t).sum::<f64>();
            let (v, _) = c.hat_values(&x);
            assert!(v.abs() <= s.sqrt() * (1.0 + 1e-12));
            for gj in c.f.gradient(&x) {
                assert!((gj / (d * c.norm.upper * s.powf(d / 2.0 - 1.0))).abs() <= s.sqrt() * (1.0 + 1e-12));
            }
        }
        // Without the factor the range claim fails far from the origin.
        let (v, _) = c.hat_values(&[10.0, 0.0]);
        assert!(v > 1.0 / 0.99);
    }

    #[test]
    fn predicate_examples() {
        let lin = PvInput::new(x1(2), 7).unwrap();
        let b = Box { center: vec![1.0, 0.0], width: 0.01 };
        assert_eq!(lin.box_predicate(&b), Predicate::Accept(Clause::Value));
        let b = Box { center: vec![0.0, 0.0], width: 2.0 };
        assert_eq!(lin.box_predicate(&b), Predicate::Reject);
        // At a regular zero the gradient clause kicks in once w is small.
        let b = Box { center: vec![0.0, 0.3], width: 0.05 };
        assert_eq!(lin.box_predicate(&b), Predicate::Accept(Clause::Gradient));
    }

    #[test]
    fn subdivision_children() {
        let kids = standard_subdivision(&Box::root(1, 1.0));
        assert_eq!(kids, vec![Box { center: vec![-0.5], width: 1.0 }, Box { center: vec![0.5], width: 1.0 }]);
        let kids = standard_subdivision(&Box { center: vec![0.5, 0.5], width: 1.0 });
        assert_eq!(kids.len(), 4);
        let centers: Vec<Vec<f64>> = kids.iter().map(|b| b.center.clone()).collect();
        for c in [[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]] {
            assert!(centers.contains(&c.to_vec()));
        }
    }

    fn assert_tiles(res: &PvResult, n: usize, a: f64) {
        // Dyadic boxes: exact volume sum and pairwise disjoint interiors.
        let vol: f64 = res.accepted.iter().map(|b| b.cell.width.powi(n as i32)).sum();
        assert_eq!(vol, (2.0 * a).powi(n as i32));
        for (i, p) in res.accepted.iter().enumerate() {
            for q in &res.accepted[i + 1..] {
                let overlap = p.cell.center.iter().zip(&q.cell.center).all(|(x, y)| (x - y).abs() < (p.cell.width + q.cell.width) / 2.0);
                assert!(!overlap, "{p:?} overlaps {q:?}");
            }
        }
    }

    #[test]
    fn circle_subdivision() {
        let res = pv_subdivide(&circle(), 1.0, 7, DEFAULT_MAX_DEPTH).unwrap();
        assert_tiles(&res, 2, 1.0);
        for b in &res.accepted {
            let crosses = b.cell.center.iter().map(|c| c * c).sum::<f64>().sqrt() - 0.5;
            if crosses.abs() <= b.cell.width / std::f64::consts::SQRT_2 {
                // Boxes meeting the circle can only be certified by the gradient clause.
                let check = sample_condition(&circle(), &b.cell, 200, 1);
                if check.sign_change {
                    assert_eq!(b.clause, Clause::Gradient);
                }
            }
            assert!(sample_condition(&circle(), &b.cell, 300, 2).holds());
        }
    }

    #[test]
    fn line_and_zero_free_subdivisions() {
        let res = pv_subdivide(&x1(2), 1.0, 7, DEFAULT_MAX_DEPTH).unwrap();
        assert_tiles(&res, 2, 1.0);
        for b in res.accepted.iter().filter(|b| b.cell.center[0].abs() <= b.cell.width / 2.0) {
            assert!(b.cell.width <= 0.25);
        }
        let pos = AffinePoly::new(2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0), (vec![0, 0], 1.0)]).unwrap();
        let res = pv_subdivide(&pos, 1.0, 7, DEFAULT_MAX_DEPTH).unwrap();
        assert!(res.accepted.iter().all(|b| b.clause == Clause::Value));
        assert!(res.accepted.iter().all(|b| !sample_condition(&pos, &b.cell, 100, 3).sign_change));
    }

    #[test]
    fn max_depth_carries_offending_boxes() {
        // A singular zero at the origin: boxes around it never pass.
        let sing = AffinePoly::new(2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap();
        match pv_subdivide(&sing, 1.0, 7, 6) {
            Err(NagError::MaxDepth { max_depth, boxes }) => {
                assert_eq!(max_depth, 6);
                assert!(boxes.iter().any(|b| b.contains(&[0.0, 0.0])));
            }
            other => panic!("expected MaxDepth, got {other:?}"),
        }
    }

    #[test]
    fn size_bound_arithmetic() {
        assert_relative_eq!(size_bound_from_k(1, 1, 1.0), 1.0 / 2f64.powf(1.5), epsilon = 1e-15);
        let c = PvInput::new(circle(), 7).unwrap();
        let mut rng = random::stream(5, 0);
        for _ in 0..200 {
            let x: Vec<f64> = (0..2).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
            let b = c.local_size_bound(&x).unwrap();
            assert!(b > 0.0 && b <= 1.0);
        }
    }

    #[test]
    fn value_or_gradient_dichotomy() {
        let c = PvInput::new(circle(), 7).unwrap();
        let d = c.degree as f64;
        let mut rng = random::stream(6, 0);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..2).map(|_| 3.0 * random::normal(&mut rng)).collect();
            let k = c.k_at(&x).unwrap();
            let t = 1.0 / (2.0 * std::f64::consts::SQRT_2 * d * k);
            let (v, g) = c.hat_values(&x);
            assert!(v.abs() > t || g > t, "x = {x:?}: |f̂| = {v}, |∇̂f| = {g}, threshold {t}");
        }
    }
}
