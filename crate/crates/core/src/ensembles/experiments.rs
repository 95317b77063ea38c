//! Monte-Carlo experiments comparing empirical statistics of random systems with the
//! corresponding probabilistic bounds. Every comparison is one-sided: empirical value at most
//! bound plus a three-standard-error margin.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{coefficient_count, draw_kss_complex, draw_system, EnsembleSpec, Law};
use crate::condition::{k_local, kappa_local};
use crate::error::{NagError, Result};
use crate::homotopy::{solve_with, AlhOptions, FastPath};
use crate::linalg::sigma_q;
use crate::multiindex::binomial;
use crate::norms::{linf_norm_complex, linf_norm_real};
use crate::poly::{AffinePoly, PolySystem};
use crate::pv::{pv_subdivide, DEFAULT_MAX_DEPTH};
use crate::random::{complex_normal, stream, unit_vector};

/// Accuracy exponent of the certified norms in the numerators.
pub const EXPERIMENT_NORM_ACCURACY: u32 = 4;
/// Accuracy exponent of the complex norms in the tail experiment; the `√2` slack of `k = 1` only
/// over-counts exceedances.
pub const COMPLEX_TAIL_ACCURACY: u32 = 1;
/// Accuracy exponent of the norm used by the subdivision predicate.
pub const PV_NORM_ACCURACY: u32 = 7;
const SIGMAS: f64 = 3.0;

/// One per-trial value, for CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub value: f64,
}

fn records(values: &[f64]) -> Vec<TrialRecord> {
    values.iter().enumerate().map(|(trial, &value)| TrialRecord { trial, value }).collect()
}

fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0).max(1.0);
    (mean, (var / m).sqrt())
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}

fn max_degree(degrees: &[u32]) -> u32 {
    degrees.iter().copied().max().unwrap_or(0)
}

fn ln_ed(d: u32) -> f64 {
    (std::f64::consts::E * d as f64).ln()
}

fn real_law(spec: &EnsembleSpec) -> Result<()> {
    if spec.law == Law::KssComplex {
        return Err(NagError::InvalidInput("this experiment needs a real law (kss-real or weyl-uniform)".into()));
    }
    Ok(())
}

fn check_shape(n: usize, degrees: &[u32], trials: usize, min_trials: usize) -> Result<()> {
    if degrees.is_empty() || degrees.iter().any(|&d| d == 0) {
        return Err(NagError::InvalidInput(format!("degrees must be positive and nonempty, got {degrees:?}")));
    }
    if n == 0 {
        return Err(NagError::InvalidInput("n must be at least 1".into()));
    }
    if trials < min_trials {
        return Err(NagError::Precondition(format!("trials >= {min_trials} (got {trials})")));
    }
    Ok(())
}

/// `‖f‖∞/‖f‖_W` with certified numerators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub spec: EnsembleSpec,
    pub trials: usize,
    pub coefficient_count: usize,
    pub mean: f64,
    pub std_error: f64,
    pub second_moment: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub max: f64,
    /// `890√2·Kρ·√(n ln(eD))/√(N−2)`.
    pub bound: f64,
    pub holds: bool,
    pub values: Vec<TrialRecord>,
}

pub fn ratio_statistics(n: usize, degrees: &[u32], spec: &EnsembleSpec, trials: usize, seed: u64) -> Result<RatioSummary> {
    check_shape(n, degrees, trials, 50)?;
    real_law(spec)?;
    let big_n = coefficient_count(n, degrees);
    if big_n <= 2 {
        return Err(NagError::Precondition(format!("N > 2 (got N = {big_n})")));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let f: PolySystem<f64> = draw_system(n, degrees, spec.law, &mut stream(seed, i as u64))?;
            Ok(linf_norm_real(&f, EXPERIMENT_NORM_ACCURACY)?.upper / f.weyl_norm())
        })
        .collect::<Result<_>>()?;
    let (mean, std_error) = mean_and_error(&values);
    let second_moment = values.iter().map(|v| v * v).sum::<f64>() / trials as f64;
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let bound = 890.0 * 2f64.sqrt() * spec.krho * (n as f64 * ln_ed(max_degree(degrees))).sqrt() / ((big_n - 2) as f64).sqrt();
    Ok(RatioSummary {
        n,
        degrees: degrees.to_vec(),
        spec: *spec,
        trials,
        coefficient_count: big_n,
        mean,
        std_error,
        second_moment,
        q10: quantile(&sorted, 0.1),
        median: quantile(&sorted, 0.5),
        q90: quantile(&sorted, 0.9),
        max: sorted[trials - 1],
        bound,
        holds: mean <= bound + SIGMAS * std_error,
        values: records(&values),
    })
}

/// Exceedance frequency at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: f64,
    pub bound: f64,
    pub exceedances: usize,
    pub empirical: f64,
    /// `3·√(p(1−p)/trials)` with `p` the bound.
    pub margin: f64,
    /// Bounds at least 1 say nothing and are not checked.
    pub vacuous: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailTable {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub spec: EnsembleSpec,
    pub trials: usize,
    pub rows: Vec<TailRow>,
    pub values: Vec<TrialRecord>,
}

impl TailTable {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Tail bound for `‖f‖∞`: real dobro `q√(2π)√(n+1)(eD/2)^n e^{−t²/(17K²)}`, complex KSS
/// `2n(3D/2)^{2n} e^{−(t/3)²}`.
pub fn tail_bound(n: usize, degrees: &[u32], spec: &EnsembleSpec, t: f64) -> f64 {
    let d = max_degree(degrees) as f64;
    let nf = n as f64;
    match spec.law {
        Law::KssComplex => 2.0 * nf * (1.5 * d).powf(2.0 * nf) * (-(t / 3.0).powi(2)).exp(),
        _ => {
            let q = degrees.len() as f64;
            q * (2.0 * std::f64::consts::PI).sqrt()
                * (nf + 1.0).sqrt()
                * (std::f64::consts::E * d / 2.0).powf(nf)
                * (-t * t / (17.0 * spec.k * spec.k)).exp()
        }
    }
}

pub fn tail_statistics(
    n: usize,
    degrees: &[u32],
    spec: &EnsembleSpec,
    trials: usize,
    thresholds: &[f64],
    seed: u64,
) -> Result<TailTable> {
    check_shape(n, degrees, trials, 1)?;
    if spec.law == Law::KssComplex && degrees.len() != n {
        return Err(NagError::Precondition(format!("complex tail bound needs q = n (q = {}, n = {n})", degrees.len())));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            // Upper bounds over-count exceedances, which keeps the comparison sound.
            match spec.law {
                Law::KssComplex => Ok(linf_norm_complex(&draw_kss_complex(n, degrees, &mut rng)?, COMPLEX_TAIL_ACCURACY)?.upper),
                _ => Ok(linf_norm_real(&draw_system::<f64, _>(n, degrees, spec.law, &mut rng)?, EXPERIMENT_NORM_ACCURACY)?.upper),
            }
        })
        .collect::<Result<_>>()?;
    let rows = thresholds
        .iter()
        .map(|&t| {
            let bound = tail_bound(n, degrees, spec, t);
            let exceedances = values.iter().filter(|&&v| v >= t).count();
            let empirical = exceedances as f64 / trials as f64;
            let vacuous = bound >= 1.0;
            let margin = if vacuous { 0.0 } else { SIGMAS * (bound * (1.0 - bound) / trials as f64).sqrt() };
            TailRow { t, bound, exceedances, empirical, margin, vacuous, holds: vacuous || empirical <= bound + margin }
        })
        .collect();
    Ok(TailTable { n, degrees: degrees.to_vec(), spec: *spec, trials, rows, values: records(&values) })
}

/// Local ratios `K(f,x)/κ(f,x)` at random sphere points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRatioSummary {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub spec: EnsembleSpec,
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `1780·Kρ·√(qnD ln(eD))/√(N−2)`.
    pub bound: f64,
    /// Samples outside `[‖f‖∞/‖f‖_W, √(2qD)·‖f‖∞/‖f‖_W]`.
    pub sandwich_violations: usize,
    pub holds: bool,
    pub values: Vec<TrialRecord>,
}

pub fn condition_ratio_statistics(
    n: usize,
    degrees: &[u32],
    spec: &EnsembleSpec,
    trials: usize,
    seed: u64,
) -> Result<ConditionRatioSummary> {
    check_shape(n, degrees, trials, 2)?;
    real_law(spec)?;
    let q = degrees.len();
    if q > n + 1 {
        return Err(NagError::Precondition(format!("q <= n + 1 (q = {q}, n = {n})")));
    }
    let big_n = coefficient_count(n, degrees);
    if big_n <= 2 {
        return Err(NagError::Precondition(format!("N > 2 (got N = {big_n})")));
    }
    let d = max_degree(degrees);
    let outcomes: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let f: PolySystem<f64> = draw_system(n, degrees, spec.law, &mut rng)?;
            let x = unit_vector(&mut rng, n + 1);
            let norm = linf_norm_real(&f, EXPERIMENT_NORM_ACCURACY)?;
            let ratio = k_local(&f, &x, &norm)?.value / kappa_local(&f, &x)?.value;
            let w = f.weyl_norm();
            let low = norm.lower / w;
            let high = (2.0 * q as f64 * d as f64).sqrt() * norm.upper / w;
            let inside = ratio >= low * (1.0 - 1e-12) && ratio <= high * (1.0 + 1e-12);
            Ok((ratio, inside))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let sandwich_violations = outcomes.iter().filter(|o| !o.1).count();
    let (mean, std_error) = mean_and_error(&values);
    let bound = 1780.0 * spec.krho * ((q * n) as f64 * d as f64 * ln_ed(d)).sqrt() / ((big_n - 2) as f64).sqrt();
    Ok(ConditionRatioSummary {
        n,
        degrees: degrees.to_vec(),
        spec: *spec,
        trials,
        mean,
        std_error,
        bound,
        sandwich_violations,
        holds: sandwich_violations == 0 && mean <= bound + SIGMAS * std_error,
        values: records(&values),
    })
}

/// Final-subdivision sizes of the subdivision on random hypersurfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvCountSummary {
    pub n: usize,
    pub degree: u32,
    pub spec: EnsembleSpec,
    pub trials: usize,
    pub a: f64,
    pub mean: f64,
    pub std_error: f64,
    /// `a^n D^{3n/2} (ln eD)^{(n+1)/2} 2^{(3/2)n log₂n + 13n + 2log₂n + 7} (Kρ)^{n+1}`.
    pub bound: f64,
    /// `a^n D^n N^{(n+1)/2} 2^{n log₂n + 13n + (3/2)log₂n + 17/2} (Kρ)^{n+1}`, for comparison.
    pub weyl_bound: f64,
    /// Trials whose subdivision is the root box alone.
    pub single_box: usize,
    pub holds: bool,
    pub values: Vec<TrialRecord>,
}

pub fn pv_count_bound(n: usize, d: u32, krho: f64, a: f64) -> f64 {
    let nf = n as f64;
    let l = nf.log2();
    let df = d as f64;
    a.powf(nf) * df.powf(1.5 * nf) * ln_ed(d).powf((nf + 1.0) / 2.0) * 2f64.powf(1.5 * nf * l + 13.0 * nf + 2.0 * l + 7.0) * krho.powf(nf + 1.0)
}

pub fn pv_weyl_count_bound(n: usize, d: u32, krho: f64, a: f64) -> f64 {
    let nf = n as f64;
    let l = nf.log2();
    let big_n = binomial((n + d as usize) as u64, n as u64);
    a.powf(nf) * (d as f64).powf(nf) * big_n.powf((nf + 1.0) / 2.0) * 2f64.powf(nf * l + 13.0 * nf + 1.5 * l + 8.5) * krho.powf(nf + 1.0)
}

pub fn pv_box_count_experiment(n: usize, d: u32, spec: &EnsembleSpec, trials: usize, a: f64, seed: u64) -> Result<PvCountSummary> {
    check_shape(n, &[d], trials, 2)?;
    real_law(spec)?;
    if n > 3 {
        return Err(NagError::SizeLimit { guard: "subdivision experiment dimension", predicted: n as u128, limit: 3 });
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let f: PolySystem<f64> = draw_system(n, &[d], spec.law, &mut stream(seed, i as u64))?;
            let affine = AffinePoly::dehomogenize(&f.components()[0]);
            Ok(pv_subdivide(&affine, a, PV_NORM_ACCURACY, DEFAULT_MAX_DEPTH)?.stats.accepted as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, std_error) = mean_and_error(&values);
    let bound = pv_count_bound(n, d, spec.krho, a);
    Ok(PvCountSummary {
        n,
        degree: d,
        spec: *spec,
        trials,
        a,
        mean,
        std_error,
        bound,
        weyl_bound: pv_weyl_count_bound(n, d, spec.krho, a),
        single_box: values.iter().filter(|&&v| v == 1.0).count(),
        holds: mean <= bound + SIGMAS * std_error,
        values: records(&values),
    })
}

/// `P(‖A†‖ ≥ t)` for complex Gaussian `n × (n+1)` matrices against `n²/(16t⁴)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinvTailRow {
    pub t: f64,
    pub bound: f64,
    pub empirical: f64,
    pub margin: f64,
    pub holds: bool,
}

pub fn pinv_tail_statistics(n: usize, draws: usize, thresholds: &[f64], seed: u64) -> Result<Vec<PinvTailRow>> {
    if n == 0 || draws == 0 {
        return Err(NagError::InvalidInput("need n >= 1 and at least one draw".into()));
    }
    let norms: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let a = DMatrix::from_fn(n, n + 1, |_, _| complex_normal(&mut rng));
            1.0 / sigma_q::<Complex64>(&a)
        })
        .collect();
    Ok(thresholds
        .iter()
        .map(|&t| {
            let bound = (n * n) as f64 / (16.0 * t.powi(4));
            let empirical = norms.iter().filter(|&&v| v >= t).count() as f64 / draws as f64;
            let p = bound.min(1.0);
            let margin = SIGMAS * (p * (1.0 - p) / draws as f64).sqrt();
            PinvTailRow { t, bound, empirical, margin, holds: empirical <= bound + margin }
        })
        .collect())
}

/// Iteration counts of the homotopy solver on complex KSS inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyStepSummary {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub trials: usize,
    pub fast_path: FastPath,
    pub accepted: usize,
    pub mean_iterations: f64,
    pub std_error: f64,
    pub max_iterations: usize,
    /// `n³D² ln(eD)`; the constant in front is not asserted.
    pub shape: f64,
    /// Runs where the measured count exceeds the a-posteriori step bound.
    pub step_bound_violations: usize,
    pub values: Vec<TrialRecord>,
}

pub fn homotopy_step_statistics(n: usize, degrees: &[u32], trials: usize, fast: FastPath, seed: u64) -> Result<HomotopyStepSummary> {
    check_shape(n, degrees, trials, 1)?;
    let outcomes: Vec<(usize, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let f = draw_kss_complex(n, degrees, &mut stream(seed, i as u64))?;
            let sol = solve_with(&f, seed.wrapping_add(1).wrapping_mul(1_000_003).wrapping_add(i as u64), fast, AlhOptions::default())?;
            let k = sol.trace.iterations;
            Ok((k, sol.certificate.accepted, (k as f64) <= sol.trace.step_bound()))
        })
        .collect::<Result<_>>()?;
    let iters: Vec<f64> = outcomes.iter().map(|o| o.0 as f64).collect();
    let (mean, std_error) = mean_and_error(&iters);
    let d = max_degree(degrees) as f64;
    Ok(HomotopyStepSummary {
        n,
        degrees: degrees.to_vec(),
        trials,
        fast_path: fast,
        accepted: outcomes.iter().filter(|o| o.1).count(),
        mean_iterations: mean,
        std_error,
        max_iterations: outcomes.iter().map(|o| o.0).max().unwrap_or(0),
        shape: (n as f64).powi(3) * d * d * ln_ed(max_degree(degrees)),
        step_bound_violations: outcomes.iter().filter(|o| !o.2).count(),
        values: records(&iters),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_quadratic_ratio_never_exceeds_one() {
        let spec = EnsembleSpec::new(Law::KssReal);
        let s = ratio_statistics(1, &[2], &spec, 60, 1).unwrap();
        // Upper bounds carry the (1 − 2^{-k})^{-1} factor of the certificate.
        let slack = 1.0 / (1.0 - 0.5f64.powi(EXPERIMENT_NORM_ACCURACY as i32));
        assert!(s.values.iter().all(|r| r.value <= slack));
    }

    #[test]
    fn ratio_is_small_and_under_bound() {
        let spec = EnsembleSpec::new(Law::WeylUniform);
        let s = ratio_statistics(2, &[3, 3], &spec, 60, 2).unwrap();
        assert!(s.holds);
        assert!(s.mean < 1.0);
    }

    #[test]
    fn tail_rows_skip_vacuous_thresholds() {
        let spec = EnsembleSpec::new(Law::KssReal);
        let t = tail_statistics(2, &[3], &spec, 100, &[0.1, 10.0 * spec.k, 20.0 * spec.k], 3).unwrap();
        assert!(t.rows[0].vacuous);
        assert!(!t.rows[2].vacuous);
        assert!(t.holds());
    }

    #[test]
    fn linear_ratio_is_one_at_critical_points() {
        // For f = a·X, K(f, ±a/‖a‖)/κ(f, ±a/‖a‖) = 1 = ‖f‖∞/‖f‖_W.
        let a = [0.6, -0.8, 0.0];
        let f = PolySystem::new(vec![crate::poly::HomogeneousPoly::linear_power(&a, 1)]).unwrap();
        let norm = crate::norms::CertifiedNorm::exact(1.0);
        let r = k_local(&f, &a, &norm).unwrap().value / kappa_local(&f, &a).unwrap().value;
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn condition_ratio_sandwich() {
        let spec = EnsembleSpec::new(Law::KssReal);
        let s = condition_ratio_statistics(2, &[3], &spec, 40, 4).unwrap();
        assert_eq!(s.sandwich_violations, 0);
        assert!(s.holds);
    }

    #[test]
    fn pinv_tail_matches_closed_form_for_one_by_two() {
        // For a ∈ ℂ^{1×2}, ‖a†‖ = 1/‖a‖ and ‖a‖² ~ Gamma(2, 1): P(‖a†‖ ≥ t) = 1 − e^{−s}(1 + s), s = 1/t².
        let draws = 20_000;
        let rows = pinv_tail_statistics(1, draws, &[1.0, 2.0], 5).unwrap();
        for row in rows {
            let s = 1.0 / (row.t * row.t);
            let exact = 1.0 - (-s).exp() * (1.0 + s);
            let se = (exact * (1.0 - exact) / draws as f64).sqrt();
            assert!((row.empirical - exact).abs() <= 4.0 * se, "{row:?} vs {exact}");
        }
    }

    #[test]
    fn pinv_tail_exceeds_the_quartic_bound_at_small_n() {
        // The quartic bound n²/(16t⁴) is below the exact tail 1 − e^{−s}(1 + s) ≈ s²/2 for n = 1.
        let t = 2.0f64;
        let s = 1.0 / (t * t);
        assert!(1.0 - (-s).exp() * (1.0 + s) > 6.0 / (16.0 * t.powi(4)));
        let rows = pinv_tail_statistics(1, 20_000, &[t], 6).unwrap();
        assert!(!rows[0].holds);
    }

    #[test]
    fn experiments_are_seed_deterministic() {
        let spec = EnsembleSpec::new(Law::KssReal);
        let a = ratio_statistics(1, &[3], &spec, 50, 9).unwrap();
        let b = ratio_statistics(1, &[3], &spec, 50, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn count_bounds_are_positive_and_ordered_in_a() {
        assert!(pv_count_bound(2, 4, 2.0 / std::f64::consts::PI.sqrt(), 1.0) > 1.0);
        assert!(pv_count_bound(2, 4, 0.5, 2.0) > pv_count_bound(2, 4, 0.5, 1.0));
        assert!(pv_weyl_count_bound(2, 4, 0.5, 1.0) > 1.0);
    }
}
