//! Functional norms on the sphere: certified sup-norms by grid search, Monte-Carlo `L_p`
//! norms, and the scaled directional-derivative systems of Kellogg's inequality.
//!
//! For a homogeneous `g` of degree `D` and a net of mesh `δ` with `Dδ < √2`, the grid
//! maximum `m` satisfies `‖g‖∞ ≤ m / (1 - D²δ²/2)`. Choosing `δ = 2^{-ℓ}` with
//! `ℓ = ⌈(k-1)/2 + log₂ D⌉` makes the correction at most `1/(1 - 2^{-k})`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NagError, Result};
use crate::eval::Evaluator;
use crate::grid::SphereGrid;
use crate::poly::{HomogeneousPoly, PolySystem};
use crate::random;
use crate::scalar::Scalar;

/// A certified two-sided bound `lower ≤ ‖f‖∞ ≤ upper` with `lower ≥ (1 - 2^{-k})·upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedNorm {
    pub upper: f64,
    pub lower: f64,
    pub k: u32,
    pub grid_level: u32,
    pub grid_size: u64,
}

impl CertifiedNorm {
    /// A norm known exactly (closed form), with no grid behind it.
    pub fn exact(value: f64) -> Self {
        CertifiedNorm { upper: value, lower: value, k: 0, grid_level: 0, grid_size: 0 }
    }

    pub fn is_exact(&self) -> bool {
        self.upper == self.lower
    }
}

/// Net level used for a given accuracy exponent and degree.
pub fn net_level(k: u32, degree: u32) -> u32 {
    ((k as f64 - 1.0) / 2.0 + (degree as f64).log2()).ceil().max(0.0) as u32
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(NagError::InvalidInput("accuracy exponent k must be at least 1".into()));
    }
    Ok(())
}

fn max_abs_constant<T: Scalar>(f: &PolySystem<T>) -> f64 {
    f.components().iter().map(|c| c.coeffs()[0].modulus()).fold(0.0, f64::max)
}

/// Certified `‖f‖∞^ℝ = max_{x∈S^n} max_i |f_i(x)|`.
pub fn linf_norm_real(f: &PolySystem<f64>, k: u32) -> Result<CertifiedNorm> {
    check_k(k)?;
    let d = f.max_degree();
    if f.is_zero() {
        return Ok(CertifiedNorm { upper: 0.0, lower: 0.0, k, grid_level: 0, grid_size: 0 });
    }
    if d == 0 {
        let v = max_abs_constant(f);
        return Ok(CertifiedNorm { upper: v, lower: v, k, grid_level: 0, grid_size: 0 });
    }
    let level = net_level(k, d);
    let grid = SphereGrid::new(f.n(), level)?;
    let ev = Evaluator::new(f);
    let q = f.q();
    let maxima = grid.fold_rows(
        true,
        || (0.0f64, ev.scratch(), vec![0.0; q]),
        |(best, pow, out), x| {
            ev.eval_into(x, pow, out);
            for v in out.iter() {
                let a = v.abs();
                if a > *best {
                    *best = a;
                }
            }
        },
    );
    let m = maxima.iter().map(|r| r.0).fold(0.0, f64::max);
    let upper = m / (1.0 - 0.5f64.powi(k as i32));
    Ok(CertifiedNorm { upper, lower: m, k, grid_level: level, grid_size: grid.half_len() as u64 })
}

/// Certified `‖f‖∞^ℂ = max_{z∈ℙ^n} max_i |f_i(z)|`.
///
/// `|f_i(x + iy)|²` is a real homogeneous form of degree `2d_i` on `S^{2n+1}`; it is evaluated
/// pointwise through complex arithmetic rather than expanded.
pub fn linf_norm_complex<T: Scalar>(f: &PolySystem<T>, k: u32) -> Result<CertifiedNorm> {
    check_k(k)?;
    let n = f.n();
    if n > 3 {
        return Err(NagError::SizeLimit { guard: "complex sup-norm dimension", predicted: n as u128, limit: 3 });
    }
    let fc = f.to_complex();
    let d = fc.max_degree();
    if fc.is_zero() {
        return Ok(CertifiedNorm { upper: 0.0, lower: 0.0, k, grid_level: 0, grid_size: 0 });
    }
    if d == 0 {
        let v = max_abs_constant(&fc);
        return Ok(CertifiedNorm { upper: v, lower: v, k, grid_level: 0, grid_size: 0 });
    }
    let level = net_level(k, 2 * d);
    let grid = SphereGrid::new(2 * n + 1, level)?;
    let ev = Evaluator::new(&fc);
    let q = fc.q();
    let dim = n + 1;
    let maxima = grid.fold_rows(
        true,
        || (0.0f64, ev.scratch(), vec![Complex64::new(0.0, 0.0); q], vec![Complex64::new(0.0, 0.0); dim]),
        |(best, pow, out, z), x| {
            for j in 0..dim {
                z[j] = Complex64::new(x[j], x[dim + j]);
            }
            ev.eval_into(z, pow, out);
            for v in out.iter() {
                let a = v.norm_sqr();
                if a > *best {
                    *best = a;
                }
            }
        },
    );
    let m2 = maxima.iter().map(|r| r.0).fold(0.0, f64::max);
    let upper = (m2 / (1.0 - 0.5f64.powi(k as i32))).sqrt();
    Ok(CertifiedNorm { upper, lower: m2.sqrt(), k, grid_level: level, grid_size: grid.half_len() as u64 })
}

/// Monte-Carlo estimate with its jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// `(E ‖f(x)‖_p^p)^{1/p}` over uniform `x` on the sphere of `F^{n+1}`.
pub fn lp_norm_mc<T: Scalar>(f: &PolySystem<T>, p: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(NagError::InvalidInput(format!("p = {p} must lie in [1, ∞)")));
    }
    if samples < 100 {
        return Err(NagError::InvalidInput(format!("{samples} samples; at least 100 required")));
    }
    let ev = Evaluator::new(f);
    let dim = f.n() + 1;
    let chunks = samples.div_ceil(random::CHUNK);
    let values: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = random::stream(seed, c as u64);
            let len = random::CHUNK.min(samples - c * random::CHUNK);
            let mut pow = ev.scratch();
            let mut out = vec![T::zero_(); ev.q()];
            (0..len)
                .map(|_| {
                    let x: Vec<T> = random::unit_scalar_vector(&mut rng, dim);
                    ev.eval_into(&x, &mut pow, &mut out);
                    out.iter().map(|v| v.modulus().powf(p)).sum::<f64>()
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(jackknife_power_mean(&values, p, samples))
}

fn jackknife_power_mean(values: &[f64], p: f64, samples: usize) -> McEstimate {
    let n = values.len() as f64;
    let total: f64 = values.iter().sum();
    let value = (total / n).powf(1.0 / p);
    let loo: Vec<f64> = values.iter().map(|v| ((total - v) / (n - 1.0)).max(0.0).powf(1.0 / p)).collect();
    let mean_loo = loo.iter().sum::<f64>() / n;
    let var = loo.iter().map(|t| (t - mean_loo).powi(2)).sum::<f64>() * (n - 1.0) / n;
    McEstimate { value, std_error: var.sqrt(), samples }
}

/// `Δ^{-1} D̄_X f · v` as a system of degrees `d_i - 1`; degree-0 inputs map to zero constants.
pub fn scaled_directional_system<T: Scalar>(f: &PolySystem<T>, v: &[T]) -> Result<PolySystem<T>> {
    if v.len() != f.n() + 1 {
        return Err(NagError::Dimension(format!("direction has {} entries, expected {}", v.len(), f.n() + 1)));
    }
    if v.iter().all(|c| *c == T::zero_()) {
        return Err(NagError::InvalidInput("direction must be nonzero".into()));
    }
    let comps = f
        .components()
        .iter()
        .map(|c| {
            let d = c.degree();
            if d == 0 {
                HomogeneousPoly::zero(c.n(), 0)
            } else {
                c.directional(v).scale(T::from_real(1.0 / d as f64))
            }
        })
        .collect();
    PolySystem::new(comps)
}

/// Exact `‖f‖∞` of a linear system: the largest row 2-norm of its coefficient matrix.
pub fn linear_inf_norm<T: Scalar>(f: &PolySystem<T>) -> Result<f64> {
    if let Some(bad) = f.degrees().iter().find(|&&d| d != 1) {
        return Err(NagError::InvalidInput(format!("linear_inf_norm needs degree-1 components, found degree {bad}")));
    }
    Ok(f.components()
        .iter()
        .map(|c| c.coeffs().iter().map(|a| a.modulus_squared()).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::binomial;
    use approx::assert_relative_eq;

    fn c_d(d: u32) -> HomogeneousPoly<f64> {
        let mut p = HomogeneousPoly::zero(1, d);
        for j in (0..=d).step_by(2) {
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let idx = p.basis().index_of(&[d - j, j]).unwrap();
            p.coeffs_mut()[idx] = sign * binomial(d as u64, j as u64);
        }
        p
    }

    fn sys<T: Scalar>(c: Vec<HomogeneousPoly<T>>) -> PolySystem<T> {
        PolySystem::new(c).unwrap()
    }

    #[test]
    fn real_norm_of_examples() {
        for d in 1..=6 {
            let r = linf_norm_real(&sys(vec![c_d(d)]), 7).unwrap();
            assert!(r.lower <= 1.0 + 1e-12 && 1.0 <= r.upper, "d={d}: {r:?}");
            assert!(r.upper <= 1.0 / (1.0 - 2f64.powi(-7)) + 1e-12);
        }
        let m = linf_norm_real(&sys(vec![HomogeneousPoly::monomial(&[1, 1], 1.0)]), 7).unwrap();
        assert!(m.lower <= 0.5 && 0.5 <= m.upper);
        let z = linf_norm_real(&sys(vec![HomogeneousPoly::<f64>::zero(2, 3)]), 7).unwrap();
        assert_eq!(z.upper, 0.0);
    }

    #[test]
    fn complex_norm_of_examples() {
        let m = linf_norm_complex(&sys(vec![HomogeneousPoly::monomial(&[1, 1], 1.0)]), 6).unwrap();
        assert!(m.lower <= 0.5 + 1e-12 && 0.5 <= m.upper, "{m:?}");
        for d in 2..=4 {
            let v = 2f64.powf(d as f64 / 2.0 - 1.0);
            let r = linf_norm_complex(&sys(vec![c_d(d)]), 5).unwrap();
            assert!(r.lower <= v + 1e-12 && v <= r.upper, "d={d}: {r:?}");
        }
        let s = HomogeneousPoly::linear_power(&[1.0, 0.0], 2)
            .lin_comb(1.0, &HomogeneousPoly::linear_power(&[0.0, 1.0], 2), 1.0)
            .unwrap();
        let r = linf_norm_complex(&sys(vec![s]), 5).unwrap();
        assert!(r.lower <= 1.0 + 1e-12 && 1.0 <= r.upper);
    }

    #[test]
    fn lp_examples() {
        let sq = |n: usize| {
            let mut p = HomogeneousPoly::<f64>::zero(n, 2);
            for j in 0..=n {
                let mut a = vec![0u32; n + 1];
                a[j] = 2;
                let idx = p.basis().index_of(&a).unwrap();
                p.coeffs_mut()[idx] = 1.0;
            }
            p
        };
        for p in [1.0, 2.0, 3.5] {
            let e = lp_norm_mc(&sys(vec![sq(2)]), p, 500, 1).unwrap();
            assert_relative_eq!(e.value, 1.0, epsilon = 1e-12);
        }
        let e = lp_norm_mc(&sys(vec![sq(2).to_complex()]), 2.0, 40_000, 2).unwrap();
        assert!((e.value - 0.5f64.sqrt()).abs() < 3.0 * e.std_error, "{e:?}");
        let x0 = sys(vec![HomogeneousPoly::<f64>::monomial(&[1, 0], 1.0)]);
        let e = lp_norm_mc(&x0, 2.0, 40_000, 3).unwrap();
        assert!((e.value - 0.5f64.sqrt()).abs() < 3.0 * e.std_error, "{e:?}");
        assert!(lp_norm_mc(&x0, 0.5, 500, 3).is_err());
    }

    #[test]
    fn directional_examples() {
        // (1/d) D̄ c_d · v = v_X c_{d-1} - v_Y s_{d-1}, s_{d-1} = Im (X + iY)^{d-1}.
        let d = 4;
        let v = [0.3, -1.7];
        let g = scaled_directional_system(&sys(vec![c_d(d)]), &v).unwrap();
        let mut s = HomogeneousPoly::<f64>::zero(1, d - 1);
        for j in (1..=d - 1).step_by(2) {
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let idx = s.basis().index_of(&[d - 1 - j, j]).unwrap();
            s.coeffs_mut()[idx] = sign * binomial(d as u64 - 1, j as u64);
        }
        let expected = c_d(d - 1).lin_comb(v[0], &s, -v[1]).unwrap();
        for (a, b) in g.components()[0].coeffs().iter().zip(expected.coeffs()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-13);
        }
        let g = scaled_directional_system(&sys(vec![HomogeneousPoly::monomial(&[3, 0, 0], 1.0)]), &[1.0, 0.0, 0.0])
            .unwrap();
        assert_eq!(g.components()[0], HomogeneousPoly::monomial(&[2, 0, 0], 1.0));
        let lin = sys(vec![HomogeneousPoly::monomial(&[0, 1], 2.0)]);
        let g = scaled_directional_system(&lin, &[0.0, 1.0]).unwrap();
        assert_eq!(g.degrees(), vec![0]);
        assert_eq!(g.components()[0].coeffs()[0], 2.0);
    }

    #[test]
    fn linear_norms() {
        let id = sys(vec![HomogeneousPoly::monomial(&[0, 1, 0], 1.0), HomogeneousPoly::monomial(&[0, 0, 1], 1.0)]);
        assert_eq!(linear_inf_norm(&id).unwrap(), 1.0);
        let row = sys(vec![HomogeneousPoly::from_coeffs(1, 1, vec![3.0, 4.0]).unwrap()]);
        assert_eq!(linear_inf_norm(&row).unwrap(), 5.0);
        let r = linf_norm_real(&row, 7).unwrap();
        assert!(r.lower <= 5.0 + 1e-12 && 5.0 <= r.upper);
        assert!(linear_inf_norm(&sys(vec![c_d(2)])).is_err());
    }
}
