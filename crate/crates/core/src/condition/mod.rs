//! Condition numbers of polynomial systems at points of the sphere.
//!
//! The local quantities share two singular values of the tangent derivative: `σ_q` of
//! `Δ^{-1/2} D_x f` (Weyl scaling) and of `Δ^{-1} D_x f` (sup-norm scaling). `σ_q(A)` equals
//! `‖A†‖^{-1}` for surjective `A`, which is how the pseudo-inverse norms in the definitions
//! are evaluated.

mod distance;
mod estimate;
mod gamma;

pub use distance::{c1_norms, construct_minimizer, dist_inf_estimate, dist_to_sigma, C1Norms, C1_LEVEL};
pub use estimate::{k_estimate, KEstimate, LevelRecord};
pub use gamma::{smale_gamma, GammaEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{NagError, Result};
use crate::linalg::{self, sigma_q};
use crate::norms::CertifiedNorm;
use crate::poly::PolySystem;
use crate::scalar::Scalar;

/// Points further than this from the unit sphere are rejected.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// Denominators at or below this multiple of the numerator norm count as zero.
pub const SINGULAR_TOLERANCE: f64 = 1e-14;

/// Which term of the denominator was active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `‖f(x)‖` dominated.
    Value,
    /// The singular-value term dominated.
    Regularity,
    /// Both terms vanished: the value is `+∞`.
    Singular,
}

/// The norm placed in a numerator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormUsed {
    Weyl { value: f64 },
    Certified(CertifiedNorm),
}

impl NormUsed {
    /// The value used in numerators (the certified upper bound when there is one).
    pub fn value(&self) -> f64 {
        match self {
            NormUsed::Weyl { value } => *value,
            NormUsed::Certified(c) => c.upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub value: f64,
    pub branch: Branch,
    pub sigma_q: f64,
    /// `‖f(x)‖`.
    pub residual: f64,
    pub norm_used: NormUsed,
}

/// Value and both scaled singular values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalData {
    pub residual: f64,
    /// `σ_q(Δ^{-1/2} D_x f)`.
    pub sigma_weyl: f64,
    /// `σ_q(Δ^{-1} D_x f)`.
    pub sigma_sup: f64,
}

/// Rejects points that are not unit vectors of the right length.
pub fn check_unit<T: Scalar>(f: &PolySystem<T>, x: &[T]) -> Result<()> {
    if x.len() != f.n() + 1 {
        return Err(NagError::Dimension(format!("point has {} coordinates, system expects {}", x.len(), f.n() + 1)));
    }
    let r = linalg::norm2(x);
    if (r - 1.0).abs() > UNIT_TOLERANCE {
        return Err(NagError::InvalidInput(format!("point is not on the unit sphere (norm {r})")));
    }
    Ok(())
}

/// Row weights `d_i^{-power}`; degree-0 rows have zero derivative and get weight 0.
pub(crate) fn degree_weights(degrees: &[u32], power: f64) -> Vec<f64> {
    degrees.iter().map(|&d| if d == 0 { 0.0 } else { (d as f64).powf(-power) }).collect()
}

pub fn local_data<T: Scalar>(f: &PolySystem<T>, x: &[T]) -> Result<LocalData> {
    check_unit(f, x)?;
    let residual = linalg::norm2(&f.eval(x)?);
    let dx = f.tangent_derivative(x)?;
    let degrees = f.degrees();
    let sigma_weyl = sigma_q(&linalg::scale_rows(&dx, &degree_weights(&degrees, 0.5)));
    let sigma_sup = sigma_q(&linalg::scale_rows(&dx, &degree_weights(&degrees, 1.0)));
    Ok(LocalData { residual, sigma_weyl, sigma_sup })
}

fn report(numerator: f64, denominator: f64, branch: Branch, sigma: f64, residual: f64, norm: NormUsed) -> ConditionReport {
    if denominator <= SINGULAR_TOLERANCE * norm.value() || denominator == 0.0 {
        return ConditionReport { value: f64::INFINITY, branch: Branch::Singular, sigma_q: sigma, residual, norm_used: norm };
    }
    ConditionReport { value: numerator / denominator, branch, sigma_q: sigma, residual, norm_used: norm }
}

/// `κ(f,x) = ‖f‖_W / √(‖f(x)‖² + σ_q(Δ^{-1/2} D_x f)²)`.
pub fn kappa_local(f: &PolySystem<f64>, x: &[f64]) -> Result<ConditionReport> {
    let ld = local_data(f, x)?;
    let w = f.weyl_norm();
    let den = ld.residual.hypot(ld.sigma_weyl);
    let branch = if ld.residual >= ld.sigma_weyl { Branch::Value } else { Branch::Regularity };
    Ok(report(w, den, branch, ld.sigma_weyl, ld.residual, NormUsed::Weyl { value: w }))
}

/// `K(f,x) = √q ‖f‖∞ / max{‖f(x)‖, σ_q(Δ^{-1} D_x f)}` with the certified upper bound on top.
pub fn k_local(f: &PolySystem<f64>, x: &[f64], norm: &CertifiedNorm) -> Result<ConditionReport> {
    let ld = local_data(f, x)?;
    Ok(k_from_local(&ld, f.q(), norm))
}

pub(crate) fn k_from_local(ld: &LocalData, q: usize, norm: &CertifiedNorm) -> ConditionReport {
    let (den, branch) =
        if ld.residual >= ld.sigma_sup { (ld.residual, Branch::Value) } else { (ld.sigma_sup, Branch::Regularity) };
    let num = (q as f64).sqrt() * norm.upper;
    report(num, den, branch, ld.sigma_sup, ld.residual, NormUsed::Certified(*norm))
}

fn check_underdetermined(q: usize, n: usize) -> Result<()> {
    if q > n {
        return Err(NagError::Precondition(format!("q <= n (got q = {q}, n = {n})")));
    }
    Ok(())
}

/// `μ_norm(f,z) = ‖f‖_W / σ_q(Δ^{-1/2} D_z f)`.
pub fn mu_norm<T: Scalar>(f: &PolySystem<T>, z: &[T]) -> Result<ConditionReport> {
    check_underdetermined(f.q(), f.n())?;
    let ld = local_data(f, z)?;
    let w = f.weyl_norm();
    Ok(report(w, ld.sigma_weyl, Branch::Regularity, ld.sigma_weyl, ld.residual, NormUsed::Weyl { value: w }))
}

/// `M(f,z) = √q ‖f‖∞^ℂ / σ_q(Δ^{-1} D_z f)`.
pub fn m_local<T: Scalar>(f: &PolySystem<T>, z: &[T], norm: NormUsed) -> Result<ConditionReport> {
    check_underdetermined(f.q(), f.n())?;
    let ld = local_data(f, z)?;
    let num = (f.q() as f64).sqrt() * norm.value();
    Ok(report(num, ld.sigma_sup, Branch::Regularity, ld.sigma_sup, ld.residual, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::linf_norm_real;
    use crate::poly::HomogeneousPoly;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    pub(crate) fn coordinate_system<T: Scalar>(n: usize) -> PolySystem<T> {
        let comps = (1..=n)
            .map(|j| {
                let mut a = vec![0u32; n + 1];
                a[j] = 1;
                HomogeneousPoly::monomial(&a, T::one_())
            })
            .collect();
        PolySystem::new(comps).unwrap()
    }

    fn e0<T: Scalar>(n: usize) -> Vec<T> {
        let mut x = vec![T::zero_(); n + 1];
        x[0] = T::one_();
        x
    }

    #[test]
    fn linear_system_values() {
        for n in 1..=4 {
            let f = coordinate_system::<f64>(n);
            let x = e0(n);
            let rt = (n as f64).sqrt();
            assert_relative_eq!(kappa_local(&f, &x).unwrap().value, rt, epsilon = 1e-13);
            let k = k_local(&f, &x, &CertifiedNorm::exact(1.0)).unwrap();
            assert_relative_eq!(k.value, rt, epsilon = 1e-13);
            assert_eq!(k.branch, Branch::Regularity);
            let fc = coordinate_system::<Complex64>(n);
            let z = e0(n);
            assert_relative_eq!(mu_norm(&fc, &z).unwrap().value, rt, epsilon = 1e-13);
            assert_relative_eq!(m_local(&fc, &z, NormUsed::Weyl { value: 1.0 }).unwrap().value, rt, epsilon = 1e-13);
        }
    }

    #[test]
    fn singular_zero_is_infinite() {
        let f = PolySystem::new(vec![HomogeneousPoly::monomial(&[0, 2], 1.0)]).unwrap();
        let r = kappa_local(&f, &[1.0, 0.0]).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        assert_eq!(r.branch, Branch::Singular);
        let fc = f.to_complex();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(mu_norm(&fc, &[one, zero]).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn chebyshev_attains_lower_bound() {
        // c_3 = X^3 - 3XY^2 has |c_3(1,0)| = 1 = ‖c_3‖∞.
        let c3 = HomogeneousPoly::from_terms(1, 3, [(&[3u32, 0][..], 1.0), (&[1, 2][..], -3.0)]).unwrap();
        let f = PolySystem::new(vec![c3]).unwrap();
        let k = k_local(&f, &[1.0, 0.0], &CertifiedNorm::exact(1.0)).unwrap();
        assert_relative_eq!(k.value, 1.0, epsilon = 1e-14);
        assert_eq!(k.branch, Branch::Value);
    }

    #[test]
    fn kappa_is_scale_invariant_exactly() {
        let f = PolySystem::new(vec![
            HomogeneousPoly::from_terms(2, 2, [(&[2u32, 0, 0][..], 0.7), (&[0, 1, 1][..], -1.3)]).unwrap(),
        ])
        .unwrap();
        let x = linalg::normalize(&[0.3, -0.4, 0.5]).unwrap();
        let a = kappa_local(&f, &x).unwrap().value;
        let b = kappa_local(&f.scale(3.0), &x).unwrap().value;
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn k_at_least_one_with_certified_norm() {
        let f = PolySystem::new(vec![
            HomogeneousPoly::from_terms(2, 3, [(&[3u32, 0, 0][..], 0.5), (&[1, 1, 1][..], 2.0), (&[0, 0, 3][..], -1.0)])
                .unwrap(),
        ])
        .unwrap();
        let t = linf_norm_real(&f, 5).unwrap();
        for x in crate::random::uniform_sphere_points(3, 200, 4) {
            assert!(k_local(&f, &x, &t).unwrap().value >= 1.0);
        }
    }

    #[test]
    fn rejects_non_unit_points() {
        let f = coordinate_system::<f64>(2);
        assert!(matches!(kappa_local(&f, &[1.0, 1.0, 0.0]), Err(NagError::InvalidInput(_))));
        assert!(matches!(kappa_local(&f, &[1.0, 0.0]), Err(NagError::Dimension(_))));
    }
}
