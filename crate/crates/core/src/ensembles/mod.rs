//! Dobro random polynomial tuples and the statistical experiments built on them.
//!
//! A dobro tuple has coefficients `C(d,α)^{1/2}·c_α` with the `c_α` independent, centered,
//! subgaussian (ψ₂-norm at most `K`) and anti-concentrated (density at most `ρ`).

mod experiments;

pub use experiments::{
    condition_ratio_statistics, homotopy_step_statistics, pinv_tail_statistics, pv_box_count_experiment,
    ratio_statistics, tail_statistics, ConditionRatioSummary, HomotopyStepSummary, PinvTailRow, PvCountSummary,
    RatioSummary, TailRow, TailTable, TrialRecord,
};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NagError, Result};
use crate::multiindex::multinomial;
use crate::poly::{HomogeneousPoly, PolySystem};
use crate::random::{complex_normal, normal, stream};
use crate::scalar::{Field, Scalar};

/// Coefficient law of a dobro ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    /// Standard normal `c_α`.
    KssReal,
    /// Standard complex normal `c_α` with `E|c_α|² = 1`.
    KssComplex,
    /// Uniform `c_α` on `[−1, 1]`.
    WeylUniform,
}

impl Law {
    pub fn field(self) -> Field {
        match self {
            Law::KssComplex => Field::Complex,
            Law::KssReal | Law::WeylUniform => Field::Real,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Law::KssReal => "kss-real",
            Law::KssComplex => "kss-complex",
            Law::WeylUniform => "weyl-uniform",
        }
    }

    fn coefficient<T: Scalar, R: Rng + ?Sized>(self, rng: &mut R) -> T {
        match self {
            Law::KssReal => T::from_real(normal(rng)),
            Law::WeylUniform => T::from_real(rng.gen_range(-1.0..=1.0)),
            Law::KssComplex => {
                let c = complex_normal(rng);
                T::from_re_im(c.re, c.im)
            }
        }
    }
}

impl std::str::FromStr for Law {
    type Err = NagError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kss-real" => Ok(Law::KssReal),
            "kss-complex" => Ok(Law::KssComplex),
            "weyl-uniform" => Ok(Law::WeylUniform),
            other => Err(NagError::InvalidInput(format!(
                "unknown law `{other}` (expected kss-real, kss-complex or weyl-uniform)"
            ))),
        }
    }
}

/// A law together with its ψ₂ bound `K`, its anti-concentration constant `ρ` and `Kρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub law: Law,
    pub k: f64,
    pub rho: f64,
    pub krho: f64,
}

impl EnsembleSpec {
    /// Standard constants: `Kρ = 2/√π` with `ρ = 1/√(2π)` for the Gaussian laws, and
    /// `K = 1`, `ρ = 1/2` for the uniform law.
    pub fn new(law: Law) -> Self {
        let (k, rho) = match law {
            Law::KssReal | Law::KssComplex => (2.0 * std::f64::consts::SQRT_2, 1.0 / (2.0 * std::f64::consts::PI).sqrt()),
            Law::WeylUniform => (1.0, 0.5),
        };
        EnsembleSpec { law, k, rho, krho: k * rho }
    }

    /// Custom constants; rejects pairs with `6Kρ < 1`, which no random variable satisfies.
    pub fn with_constants(law: Law, k: f64, rho: f64) -> Result<Self> {
        if !(k > 0.0 && rho > 0.0) || 6.0 * k * rho < 1.0 {
            return Err(NagError::InvalidInput(format!("ensemble constants need 6·K·ρ >= 1 (K = {k}, ρ = {rho})")));
        }
        Ok(EnsembleSpec { law, k, rho, krho: k * rho })
    }
}

/// One dobro polynomial of degree `d` in `n + 1` variables.
pub fn draw_poly<T: Scalar, R: Rng + ?Sized>(n: usize, d: u32, law: Law, rng: &mut R) -> HomogeneousPoly<T> {
    let mut p = HomogeneousPoly::<T>::zero(n, d);
    let weights: Vec<f64> = p.basis().iter().map(|a| multinomial(a).sqrt()).collect();
    for (c, w) in p.coeffs_mut().iter_mut().zip(weights) {
        *c = law.coefficient::<T, R>(rng) * T::from_real(w);
    }
    p
}

/// A dobro tuple drawn from an existing stream.
pub fn draw_system<T: Scalar, R: Rng + ?Sized>(n: usize, degrees: &[u32], law: Law, rng: &mut R) -> Result<PolySystem<T>> {
    if law.field() != T::FIELD {
        return Err(NagError::InvalidInput(format!("law {} does not produce {:?} coefficients", law.name(), T::FIELD)));
    }
    PolySystem::new(degrees.iter().map(|&d| draw_poly::<T, R>(n, d, law, rng)).collect())
}

/// A dobro tuple determined by `seed`.
pub fn sample_dobro<T: Scalar>(n: usize, degrees: &[u32], spec: &EnsembleSpec, seed: u64) -> Result<PolySystem<T>> {
    draw_system(n, degrees, spec.law, &mut stream(seed, 0))
}

/// Complex KSS tuple from an existing stream.
pub fn draw_kss_complex<R: Rng + ?Sized>(n: usize, degrees: &[u32], rng: &mut R) -> Result<PolySystem<Complex64>> {
    draw_system(n, degrees, Law::KssComplex, rng)
}

/// `N`, the total number of coefficients of the tuple.
pub fn coefficient_count(n: usize, degrees: &[u32]) -> usize {
    degrees.iter().map(|&d| crate::multiindex::basis_len(n + 1, d)).sum()
}
