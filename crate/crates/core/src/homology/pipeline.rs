//! The grid-selection-nerve pipeline computing Betti numbers of `Z_S(f)`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::cohomology::{cech_betti, CechBetti};
use super::complex::BettiVector;
use crate::condition::{k_estimate, KEstimate};
use crate::error::{NagError, Result};
use crate::eval::Evaluator;
use crate::grid::SphereGrid;
use crate::linalg;
use crate::norms::{linf_norm_real, CertifiedNorm};
use crate::poly::PolySystem;

/// Accuracy exponent used for `Q` and `K̂`.
pub const PIPELINE_ACCURACY: u32 = 7;

/// Full-parameter runs refuse nets larger than this.
pub const FULL_GRID_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedCloud {
    pub points: Vec<Vec<f64>>,
    /// `√q·D·Q·δ`; every point has `‖f(x)‖` strictly below it.
    pub threshold: f64,
    /// Ball radius, once the nerve parameters are fixed.
    pub epsilon: Option<f64>,
    /// `δ`, the covering radius of the source net.
    pub source_mesh: f64,
}

impl SelectedCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Net points with `‖f(x)‖ < √q·D·Q·δ`, in net order.
pub fn select_points(f: &PolySystem<f64>, net: &SphereGrid, q_norm: f64, delta: f64) -> Result<SelectedCloud> {
    if net.n() != f.n() {
        return Err(NagError::Dimension(format!("net on S^{} for a system on S^{}", net.n(), f.n())));
    }
    let threshold = (f.q() as f64).sqrt() * f.max_degree() as f64 * q_norm * delta;
    let ev = Evaluator::new(f);
    let rows = net.fold_rows(
        false,
        || (Vec::new(), ev.scratch(), vec![0.0; f.q()]),
        |(acc, pow, vals), x| {
            ev.eval_into(x, pow, vals);
            if vals.iter().map(|v| v * v).sum::<f64>().sqrt() < threshold {
                acc.push(x.to_vec());
            }
        },
    );
    let points = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(SelectedCloud { points, threshold, epsilon: None, source_mesh: delta })
}

/// Ball radii for which the union of balls around the cloud retracts onto the zero set:
/// the open interval `(6DK̂δ, 1/(14DK̂))`, provided `90D²K̂²δ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusWindow {
    pub lower: f64,
    pub upper: f64,
    /// `90D²K̂²δ`.
    pub density: f64,
}

impl RadiusWindow {
    pub fn new(degree: u32, k_hat: f64, delta: f64) -> Self {
        let dk = degree as f64 * k_hat;
        RadiusWindow { lower: 6.0 * dk * delta, upper: 1.0 / (14.0 * dk), density: 90.0 * dk * dk * delta }
    }

    pub fn admits(&self, eps: f64) -> bool {
        self.density < 1.0 && self.lower < eps && eps < self.upper
    }

    fn check(&self, eps: f64) -> Result<()> {
        if self.admits(eps) {
            return Ok(());
        }
        Err(NagError::Precondition(format!(
            "90 D^2 K^2 delta < 1 and epsilon in (6 D K delta, 1/(14 D K)); got 90 D^2 K^2 delta = {:.6e}, \
             epsilon = {eps:.6e}, window = ({:.6e}, {:.6e})",
            self.density, self.lower, self.upper
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum BettiMode {
    /// `ℓ = 7 + ⌈2log₂D + 2log₂K̂⌉`, `ε = 3/(50DK̂)`.
    Full,
    /// User level and radius, accepted only inside the radius window.
    Relaxed { level: u32, epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyBettiReport {
    pub betti: BettiVector,
    pub mode: BettiMode,
    pub norm: CertifiedNorm,
    pub k_hat: f64,
    pub level: u32,
    pub epsilon: f64,
    pub window: RadiusWindow,
    pub cloud: SelectedCloud,
    pub nerve: CechBetti,
}

/// `ℓ = 7 + ⌈2log₂D + 2log₂K̂⌉`.
pub fn full_level(degree: u32, k_hat: f64) -> u32 {
    let extra = 2.0 * (degree as f64).log2() + 2.0 * k_hat.log2();
    PIPELINE_ACCURACY + extra.ceil().max(0.0) as u32
}

/// Betti numbers `β_0..β_n` of the zero set of `f` in `S^n`.
pub fn polybetti(f: &PolySystem<f64>, mode: BettiMode) -> Result<PolyBettiReport> {
    if f.q() > f.n() {
        return Err(NagError::Precondition(format!("q <= n (got q = {}, n = {})", f.q(), f.n())));
    }
    let norm = linf_norm_real(f, PIPELINE_ACCURACY)?;
    let KEstimate { k_hat, .. } = k_estimate(f, PIPELINE_ACCURACY, None)?;
    let d = f.max_degree();
    let (level, eps) = match mode {
        BettiMode::Full => {
            let level = full_level(d, k_hat);
            let predicted = SphereGrid::predicted_len(f.n(), level);
            if predicted > FULL_GRID_LIMIT {
                return Err(NagError::SizeLimit {
                    guard: "full-parameter grid (use relaxed mode)",
                    predicted,
                    limit: FULL_GRID_LIMIT,
                });
            }
            (level, 3.0 / (50.0 * d as f64 * k_hat))
        }
        BettiMode::Relaxed { level, epsilon } => (level, epsilon),
    };
    let net = SphereGrid::new(f.n(), level)?;
    let delta = net.mesh();
    let window = RadiusWindow::new(d, k_hat, delta);
    window.check(eps)?;
    let mut cloud = select_points(f, &net, norm.upper, delta)?;
    cloud.epsilon = Some(eps);
    let nerve = cech_betti(&cloud.points, eps, f.n())?;
    Ok(PolyBettiReport { betti: nerve.betti.clone(), mode, norm, k_hat, level, epsilon: eps, window, cloud, nerve })
}

/// Symmetric Hausdorff distance (geodesic) between two finite subsets of the sphere;
/// `+∞` when exactly one of them is empty.
pub fn hausdorff_estimate(cloud: &[Vec<f64>], zero_samples: &[Vec<f64>]) -> f64 {
    match (cloud.is_empty(), zero_samples.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let directed = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .map(|x| b.iter().map(|y| linalg::sphere_distance(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(cloud, zero_samples).max(directed(zero_samples, cloud))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub point: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton's method for `f` restricted to the sphere: minimum-norm tangent steps followed by
/// renormalization, until `‖f(x)‖ < tol`.
pub fn refine_on_sphere(f: &PolySystem<f64>, x: &[f64], max_iter: usize, tol: f64) -> Result<Refined> {
    let mut x = linalg::normalize(x).ok_or_else(|| NagError::InvalidInput("zero starting point".into()))?;
    for it in 0..=max_iter {
        let fx = f.eval(&x)?;
        let residual = linalg::norm2(&fx);
        if residual < tol {
            return Ok(Refined { point: x, residual, iterations: it });
        }
        if it == max_iter {
            break;
        }
        let basis = linalg::tangent_basis(&x);
        let dx = f.full_derivative(&x)? * &basis;
        let pinv = dx.pseudo_inverse(1e-14).map_err(|e| NagError::Numerical(e.to_string()))?;
        let step = &basis * (pinv * DVector::from_vec(fx));
        let next: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
        x = linalg::normalize(&next).ok_or_else(|| NagError::Numerical("Newton iterate collapsed to zero".into()))?;
    }
    Err(NagError::Numerical(format!("sphere Newton did not reach residual {tol:e} in {max_iter} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::HomogeneousPoly;

    fn coordinates(n: usize, which: &[usize]) -> PolySystem<f64> {
        let comps = which
            .iter()
            .map(|&j| {
                let mut a = vec![0u32; n + 1];
                a[j] = 1;
                HomogeneousPoly::monomial(&a, 1.0)
            })
            .collect();
        PolySystem::new(comps).unwrap()
    }

    #[test]
    fn equator_selection_stays_near_equator() {
        let f = coordinates(2, &[0]);
        let net = SphereGrid::new(2, 6).unwrap();
        let cloud = select_points(&f, &net, 1.0, net.mesh()).unwrap();
        assert!(!cloud.is_empty());
        // Distance to the equator is asin|x_0| < asin(Dδ).
        for p in &cloud.points {
            assert!(p[0].abs().asin() < 2.0 * net.mesh());
            assert!(p[0].abs() < cloud.threshold);
        }
    }

    #[test]
    fn zero_free_system_selects_nothing() {
        // X_0² + X_1² + X_2² ≡ 1 on the sphere.
        let g = HomogeneousPoly::from_terms(2, 2, [(&[2u32, 0, 0][..], 1.0), (&[0, 2, 0][..], 1.0), (&[0, 0, 2][..], 1.0)])
            .unwrap();
        let f = PolySystem::new(vec![g]).unwrap();
        let net = SphereGrid::new(2, 5).unwrap();
        assert!(select_points(&f, &net, 1.0, net.mesh()).unwrap().is_empty());
    }

    #[test]
    fn two_points_selection_hugs_the_poles() {
        let f = coordinates(2, &[1, 2]);
        let net = SphereGrid::new(2, 6).unwrap();
        let cloud = select_points(&f, &net, 1.0, net.mesh()).unwrap();
        assert!(!cloud.is_empty());
        for p in &cloud.points {
            let to_zero = p[0].abs().acos();
            assert!(to_zero < 2.0 * 2f64.sqrt() * net.mesh(), "{p:?}");
        }
    }

    #[test]
    fn hausdorff_sentinels() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(hausdorff_estimate(&a, &a), 0.0);
        assert_eq!(hausdorff_estimate(&[], &a), f64::INFINITY);
        let b = vec![vec![1.0, 0.0]];
        assert!((hausdorff_estimate(&a, &b) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn circle_full_parameters() {
        let f = coordinates(1, &[1]);
        let r = polybetti(&f, BettiMode::Full).unwrap();
        assert_eq!(r.betti.0, vec![2, 0]);
        assert!(r.window.admits(r.epsilon));
    }

    #[test]
    fn relaxed_rejects_radius_outside_window() {
        let f = coordinates(1, &[1]);
        let err = polybetti(&f, BettiMode::Relaxed { level: 8, epsilon: 0.5 }).unwrap_err();
        assert!(matches!(err, NagError::Precondition(_)));
    }

    #[test]
    fn newton_refines_selected_points() {
        let f = coordinates(2, &[1, 2]);
        let net = SphereGrid::new(2, 5).unwrap();
        let cloud = select_points(&f, &net, 1.0, net.mesh()).unwrap();
        for p in &cloud.points {
            let r = refine_on_sphere(&f, p, 30, 1e-10).unwrap();
            assert!(r.residual < 1e-10);
            assert!((r.point[0].abs() - 1.0).abs() < 1e-12);
        }
    }
}
