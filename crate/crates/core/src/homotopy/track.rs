//! Linear homotopy `q_t = t·f + (1−t)·g` with the sup-norm step rule.
//!
//! The step is `Δt = 0.03·Ū/(U·D·M²)` with `M = √n·Ū/σ_n(Δ^{-1}D_z q_t)`, i.e.
//! `Δt = 0.03·σ_n²/(U·D·n·Ū)`. Here `U ≥ ‖f−g‖∞^ℂ` and `Ū ≥ ‖q_t‖∞^ℂ`, so every step is no
//! longer than the one taken with exact norms. A lower bound `L ≤ ‖q_t‖∞^ℂ` is recorded for the
//! a-posteriori step-count and speed checks.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::newton::{certify, projective_newton, Certificate, NEWTON_SIGMA_MIN};
use super::pair::{bp_sample_with, StandardPair};
use super::quadratic::{quadratic_inf_norm, QuadraticSystem};
use crate::error::{NagError, Result};
use crate::grid::SphereGrid;
use crate::linalg::{projective_distance, scale_rows, sigma_q};
use crate::norms::{linf_norm_complex, net_level};
use crate::poly::PolySystem;
use crate::random::{complex_unit_vector, stream};

pub const STEP_CONSTANT: f64 = 0.03;
pub const MIN_STEP: f64 = 1e-15;
pub const DEFAULT_MAX_STEPS: usize = 2_000_000;
/// Points sampled once per run for the lower bound `L(q_t)`.
pub const LOWER_BOUND_SAMPLES: usize = 64;
/// Largest net for which the general path certifies `‖·‖∞^ℂ` instead of using Weyl norms.
pub const CERTIFIED_NET_BUDGET: u128 = 2_000_000;

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Homotopy parameter at the start of the step.
    pub t: f64,
    pub dt: f64,
    /// `M(q_t, z_t)` computed with `norm_upper`.
    pub m: f64,
    /// `Ū(q_t)`, the norm bound entering the step.
    pub norm_upper: f64,
    /// `L(q_t)`.
    pub norm_lower: f64,
    /// Projective distance moved by the Newton step.
    pub displacement: f64,
}

/// Which norm bounds drove the step rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathNorm {
    General,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyTrace {
    pub steps: Vec<StepRecord>,
    pub z: Vec<Complex64>,
    pub iterations: usize,
    /// `U ≥ ‖f−g‖∞^ℂ`.
    pub u_diff: f64,
    pub degree: u32,
    pub path_norm: PathNorm,
    /// `M` and `L` at `t = 1`, closing the trapezoid rule.
    pub final_m: f64,
    pub final_norm_lower: f64,
}

impl HomotopyTrace {
    /// `1 + 2·45·D·U·∫ M²/L dt`, trapezoid rule over the recorded steps.
    pub fn step_bound(&self) -> f64 {
        let g = |m: f64, l: f64| m * m / l;
        let mut integral = 0.0;
        for (i, s) in self.steps.iter().enumerate() {
            let here = g(s.m, s.norm_lower);
            let next = match self.steps.get(i + 1) {
                Some(n) => g(n.m, n.norm_lower),
                None => g(self.final_m, self.final_norm_lower),
            };
            let width = (1.0 - s.t).min(s.dt);
            integral += 0.5 * width * (here + next);
        }
        1.0 + 2.0 * 45.0 * self.degree as f64 * self.u_diff * integral
    }

    /// Steps whose finite-difference speed exceeds `1.1·M·U/L`.
    pub fn speed_violations(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| {
                let width = (1.0 - s.t).min(s.dt);
                s.displacement / width > 1.1 * s.m * self.u_diff / s.norm_lower
            })
            .count()
    }
}

/// Norm bounds along the path.
trait PathBounds {
    fn u_diff(&self) -> f64;
    /// `(Ū(q_t), L(q_t))`.
    fn bounds(&self, t: f64, q: &PolySystem<Complex64>) -> (f64, f64);
    fn kind(&self) -> PathNorm;
}

fn max_weyl(p: &PolySystem<Complex64>) -> f64 {
    p.components().iter().map(|c| c.weyl_norm_sq().sqrt()).fold(0.0, f64::max)
}

/// `min(max_i ‖p_i‖_W, certified ‖p‖∞^ℂ)`; the certified bound is skipped when its net is too large.
pub fn sup_upper_bound(p: &PolySystem<Complex64>) -> f64 {
    let weyl = max_weyl(p);
    let n = p.n();
    if n > 3 || p.max_degree() == 0 {
        return weyl;
    }
    let level = net_level(3, 2 * p.max_degree());
    if SphereGrid::predicted_len(2 * n + 1, level) > CERTIFIED_NET_BUDGET {
        return weyl;
    }
    match linf_norm_complex(p, 3) {
        Ok(c) => weyl.min(c.upper),
        Err(_) => weyl,
    }
}

struct GeneralBounds {
    u_f: f64,
    u_g: f64,
    u_diff: f64,
    f_samples: Vec<Vec<Complex64>>,
    g_samples: Vec<Vec<Complex64>>,
}

impl GeneralBounds {
    fn new<R: Rng + ?Sized>(f: &PolySystem<Complex64>, g: &PolySystem<Complex64>, rng: &mut R) -> Result<Self> {
        let mut f_samples = Vec::with_capacity(LOWER_BOUND_SAMPLES);
        let mut g_samples = Vec::with_capacity(LOWER_BOUND_SAMPLES);
        for _ in 0..LOWER_BOUND_SAMPLES {
            let y = complex_unit_vector(rng, f.n() + 1);
            f_samples.push(f.eval(&y)?);
            g_samples.push(g.eval(&y)?);
        }
        Ok(GeneralBounds { u_f: sup_upper_bound(f), u_g: sup_upper_bound(g), u_diff: sup_upper_bound(&f.sub(g)?), f_samples, g_samples })
    }
}

impl PathBounds for GeneralBounds {
    fn u_diff(&self) -> f64 {
        self.u_diff
    }

    fn bounds(&self, t: f64, q: &PolySystem<Complex64>) -> (f64, f64) {
        let upper = (t * self.u_f + (1.0 - t) * self.u_g).min(max_weyl(q));
        let lower = self
            .f_samples
            .iter()
            .zip(&self.g_samples)
            .flat_map(|(fy, gy)| fy.iter().zip(gy).map(move |(a, b)| (a * t + b * (1.0 - t)).norm()))
            .fold(0.0, f64::max);
        (upper, lower.min(upper))
    }

    fn kind(&self) -> PathNorm {
        PathNorm::General
    }
}

struct QuadraticBounds {
    f: QuadraticSystem,
    g: QuadraticSystem,
    u_diff: f64,
}

impl PathBounds for QuadraticBounds {
    fn u_diff(&self) -> f64 {
        self.u_diff
    }

    fn bounds(&self, t: f64, _q: &PolySystem<Complex64>) -> (f64, f64) {
        let s = quadratic_inf_norm(&self.f.lerp(&self.g, t)).surrogate;
        (s, s / (self.f.matrices().len() as f64).sqrt())
    }

    fn kind(&self) -> PathNorm {
        PathNorm::Quadratic
    }
}

/// `(σ_n(Δ^{-1}D_z q), M)` for the norm bound `upper`.
fn condition_at(q: &PolySystem<Complex64>, z: &[Complex64], upper: f64) -> Result<(f64, f64)> {
    let w: Vec<f64> = q.degrees().iter().map(|&d| 1.0 / d as f64).collect();
    let sigma = sigma_q(&scale_rows(&q.tangent_derivative(z)?, &w));
    if !(sigma > NEWTON_SIGMA_MIN) {
        return Err(NagError::SingularDerivative { sigma });
    }
    Ok((sigma, (q.n() as f64).sqrt() * upper / sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlhOptions {
    pub max_steps: usize,
}

impl Default for AlhOptions {
    fn default() -> Self {
        AlhOptions { max_steps: DEFAULT_MAX_STEPS }
    }
}

fn check_pair(f: &PolySystem<Complex64>, g: &PolySystem<Complex64>, zeta: &[Complex64]) -> Result<()> {
    if f.n() != g.n() || f.degrees() != g.degrees() {
        return Err(NagError::Dimension(format!(
            "start system has n = {}, degrees {:?}; target has n = {}, degrees {:?}",
            g.n(),
            g.degrees(),
            f.n(),
            f.degrees()
        )));
    }
    if f.q() != f.n() {
        return Err(NagError::Precondition(format!("square system (q = {}, n = {})", f.q(), f.n())));
    }
    crate::condition::check_unit(g, zeta)
}

fn run_alh(
    f: &PolySystem<Complex64>,
    g: &PolySystem<Complex64>,
    zeta: &[Complex64],
    bounds: &dyn PathBounds,
    opts: AlhOptions,
) -> Result<HomotopyTrace> {
    let degree = f.max_degree();
    let u_diff = bounds.u_diff();
    let mut trace = HomotopyTrace {
        steps: Vec::new(),
        z: zeta.to_vec(),
        iterations: 0,
        u_diff,
        degree,
        path_norm: bounds.kind(),
        final_m: 0.0,
        final_norm_lower: 0.0,
    };
    if u_diff == 0.0 {
        return Ok(trace);
    }
    let mut t = 0.0f64;
    let mut q = g.clone();
    let mut z = zeta.to_vec();
    let n = f.n() as f64;
    while t < 1.0 {
        if trace.steps.len() >= opts.max_steps {
            return Err(NagError::SizeLimit {
                guard: "max homotopy steps",
                predicted: trace.steps.len() as u128 + 1,
                limit: opts.max_steps as u128,
            });
        }
        let (upper, lower) = bounds.bounds(t, &q);
        let (sigma, m) = condition_at(&q, &z, upper)?;
        let dt = STEP_CONSTANT * sigma * sigma / (u_diff * degree as f64 * n * upper);
        if !(dt >= MIN_STEP) {
            return Err(NagError::StepUnderflow { t, dt });
        }
        let t_next = (t + dt).min(1.0);
        q = f.lin_comb(Complex64::from(t_next), g, Complex64::from(1.0 - t_next))?;
        let z_next = projective_newton(&q, &z)?;
        trace.steps.push(StepRecord { t, dt, m, norm_upper: upper, norm_lower: lower, displacement: projective_distance(&z, &z_next) });
        z = z_next;
        t = t_next;
    }
    let (upper, lower) = bounds.bounds(1.0, &q);
    trace.final_m = condition_at(&q, &z, upper)?.1;
    trace.final_norm_lower = lower;
    trace.iterations = trace.steps.len();
    trace.z = z;
    Ok(trace)
}

/// General-degree path tracking from the zero `zeta` of `g` towards `f`.
pub fn alh(f: &PolySystem<Complex64>, g: &PolySystem<Complex64>, zeta: &[Complex64], seed: u64) -> Result<HomotopyTrace> {
    alh_with(f, g, zeta, seed, AlhOptions::default())
}

pub fn alh_with(
    f: &PolySystem<Complex64>,
    g: &PolySystem<Complex64>,
    zeta: &[Complex64],
    seed: u64,
    opts: AlhOptions,
) -> Result<HomotopyTrace> {
    check_pair(f, g, zeta)?;
    let bounds = GeneralBounds::new(f, g, &mut stream(seed, 1))?;
    run_alh(f, g, zeta, &bounds, opts)
}

/// Quadratic path tracking; norms come from the matrix surrogate.
pub fn alh_quadratic(f: &QuadraticSystem, g: &QuadraticSystem, zeta: &[Complex64], opts: AlhOptions) -> Result<HomotopyTrace> {
    let fs = f.to_system();
    let gs = g.to_system();
    check_pair(&fs, &gs, zeta)?;
    let bounds = QuadraticBounds { f: f.clone(), g: g.clone(), u_diff: quadratic_inf_norm(&f.sub(g)).surrogate };
    run_alh(&fs, &gs, zeta, &bounds, opts)
}

/// Approximate zero with its certificate and the path that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub zero: Vec<Complex64>,
    pub certificate: Certificate,
    pub trace: HomotopyTrace,
}

/// Whether the quadratic surrogate drives the steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FastPath {
    /// Use the surrogate exactly when every degree is 2.
    #[default]
    Auto,
    On,
    Off,
}

impl std::str::FromStr for FastPath {
    type Err = NagError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FastPath::Auto),
            "on" => Ok(FastPath::On),
            "off" => Ok(FastPath::Off),
            other => Err(NagError::InvalidInput(format!("unknown fast-path mode `{other}` (expected auto, on or off)"))),
        }
    }
}

fn start_pair(f: &PolySystem<Complex64>, seed: u64) -> Result<StandardPair> {
    if f.is_zero() {
        return Err(NagError::Precondition("f != 0".into()));
    }
    if f.q() != f.n() {
        return Err(NagError::Precondition(format!("square system (q = {}, n = {})", f.q(), f.n())));
    }
    bp_sample_with(f.n(), &f.degrees(), &mut stream(seed, 0))
}

fn finish(f: &PolySystem<Complex64>, trace: HomotopyTrace) -> Result<Solution> {
    let (zero, certificate) = certify(f, &trace.z)?;
    Ok(Solution { zero, certificate, trace })
}

/// Draws a standard pair from `seed` and tracks its zero to `f` with the general bounds.
pub fn solve(f: &PolySystem<Complex64>, seed: u64) -> Result<Solution> {
    solve_with(f, seed, FastPath::Off, AlhOptions::default())
}

/// Same start pair as [`solve`], with the quadratic surrogate in the step rule.
pub fn solve_quadratic(f: &QuadraticSystem, seed: u64) -> Result<Solution> {
    solve_with(&f.to_system(), seed, FastPath::On, AlhOptions::default())
}

pub fn solve_with(f: &PolySystem<Complex64>, seed: u64, fast: FastPath, opts: AlhOptions) -> Result<Solution> {
    let quadratic = f.degrees().iter().all(|&d| d == 2);
    let use_fast = match fast {
        FastPath::Auto => quadratic,
        FastPath::On if !quadratic => {
            return Err(NagError::Precondition(format!("all degrees equal 2 for the fast path (got {:?})", f.degrees())))
        }
        FastPath::On => true,
        FastPath::Off => false,
    };
    let pair = start_pair(f, seed)?;
    let trace = if use_fast {
        let fq = QuadraticSystem::from_system(f)?;
        let gq = QuadraticSystem::from_system(&pair.g)?;
        alh_quadratic(&fq, &gq, &pair.zeta, opts)?
    } else {
        alh_with(f, &pair.g, &pair.zeta, seed, opts)?
    };
    finish(f, trace)
}
