//! Projective Newton operator and the heuristic approximate-zero certificate.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{NagError, Result};
use crate::linalg::{normalize, projective_distance, sigma_q, tangent_basis};
use crate::poly::PolySystem;
use crate::scalar::Scalar;

/// Newton steps fail below this smallest singular value of the tangent derivative.
pub const NEWTON_SIGMA_MIN: f64 = 1e-14;

/// `N_q(z) = normalize(z − B (D_z q·B)^{-1} q(z))`, `B` the tangent basis at `z`.
pub fn projective_newton<T: Scalar>(q: &PolySystem<T>, z: &[T]) -> Result<Vec<T>> {
    if q.q() != q.n() {
        return Err(NagError::Precondition(format!("square system (q = {}, n = {})", q.q(), q.n())));
    }
    let b = tangent_basis(z);
    let a = q.full_derivative(z)? * &b;
    let sigma = sigma_q(&a);
    if !(sigma > NEWTON_SIGMA_MIN) {
        return Err(NagError::SingularDerivative { sigma });
    }
    let rhs = DVector::from_vec(q.eval(z)?);
    let c = a.lu().solve(&rhs).ok_or(NagError::SingularDerivative { sigma })?;
    let step = b * c;
    let moved: Vec<T> = z.iter().zip(step.iter()).map(|(zi, si)| *zi - *si).collect();
    normalize(&moved).ok_or_else(|| NagError::Numerical("Newton iterate collapsed to zero".into()))
}

/// Outcome of the post-hoc Newton check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Projective displacements of the successive Newton steps.
    pub displacements: Vec<f64>,
    /// `‖f(z)‖ / ‖f‖_W` at the final point.
    pub residual: f64,
    pub accepted: bool,
}

/// Displacements at this level count as converged regardless of the contraction pattern.
const DISPLACEMENT_FLOOR: f64 = 1e-13;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const CERTIFICATE_STEPS: usize = 3;

/// Runs `CERTIFICATE_STEPS` Newton steps from `z` and checks the quadratic contraction pattern
/// `d_{j+1} ≤ 4·2^{1−2^j}·d_1` together with the Weyl-normalized residual bound. A singular
/// Newton step rejects the point.
pub fn certify<T: Scalar>(f: &PolySystem<T>, z: &[T]) -> Result<(Vec<T>, Certificate)> {
    let w = f.weyl_norm();
    let mut cur = z.to_vec();
    let mut displacements = Vec::with_capacity(CERTIFICATE_STEPS);
    for _ in 0..CERTIFICATE_STEPS {
        match projective_newton(f, &cur) {
            Ok(next) => {
                displacements.push(projective_distance(&cur, &next));
                cur = next;
            }
            Err(NagError::SingularDerivative { .. }) => {
                let residual = crate::linalg::norm2(&f.eval(&cur)?) / w;
                return Ok((cur, Certificate { displacements, residual, accepted: false }));
            }
            Err(e) => return Err(e),
        }
    }
    let residual = crate::linalg::norm2(&f.eval(&cur)?) / w;
    let d1 = displacements[0];
    let contracts = displacements
        .iter()
        .enumerate()
        .skip(1)
        .all(|(j, &d)| d <= DISPLACEMENT_FLOOR || d <= 4.0 * 0.5f64.powi((1 << j) - 1) * d1);
    let accepted = contracts && residual < RESIDUAL_TOLERANCE;
    Ok((cur, Certificate { displacements, residual, accepted }))
}
