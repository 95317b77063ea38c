//! Smale's projective γ via lower-bound estimates of multilinear operator norms.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::check_unit;
use crate::error::{NagError, Result};
use crate::poly::{HomogeneousPoly, PolySystem};
use crate::random;
use crate::scalar::Scalar;

/// Random unit tuples tried per derivative order before refinement.
pub const GAMMA_PROBES: usize = 1000;
const GAMMA_SEED: u64 = 0x6a09_e667_f3bc_c908;
const MAX_SWEEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    /// Lower estimate of `γ(f,x)`.
    pub gamma: f64,
    /// Estimated `‖(1/k!) D_x f† D̄^k_x f‖` for `k = 2, …, D`.
    pub order_norms: Vec<f64>,
    pub method: String,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `D_x f†` for a surjective tangent derivative, as an `n × q` matrix in tangent coordinates.
fn tangent_pseudo_inverse<T: Scalar>(f: &PolySystem<T>, x: &[T]) -> Result<DMatrix<T>> {
    let a = f.tangent_derivative(x)?;
    let q = a.nrows();
    if q > a.ncols() {
        return Err(NagError::SingularDerivative { sigma: 0.0 });
    }
    let svd = a.svd(true, true);
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(NagError::SingularDerivative { sigma: smin });
    }
    let u = svd.u.ok_or_else(|| NagError::Numerical("SVD without U".into()))?;
    let vt = svd.v_t.ok_or_else(|| NagError::Numerical("SVD without V".into()))?;
    let inv = DMatrix::from_diagonal(&DVector::from_iterator(q, s.iter().map(|v| T::from_real(1.0 / v))));
    Ok(vt.adjoint() * inv * u.adjoint())
}

/// Contracts each component with all vectors but one slot and returns the gradients at `x`:
/// row `i` is the linear map `v ↦ D̄^k f_i(x)(…, v, …)`.
fn slot_map<T: Scalar>(f: &PolySystem<T>, x: &[T], fixed: &[&[T]], order: u32) -> DMatrix<T> {
    let m = f.n() + 1;
    let mut out = DMatrix::from_element(f.q(), m, T::zero_());
    for (i, c) in f.components().iter().enumerate() {
        if c.degree() < order {
            continue;
        }
        let mut p: HomogeneousPoly<T> = c.clone();
        for v in fixed {
            p = p.directional(v);
        }
        for (j, g) in p.gradient(x).into_iter().enumerate() {
            out[(i, j)] = g;
        }
    }
    out
}

fn order_norm<T: Scalar>(f: &PolySystem<T>, x: &[T], pinv: &DMatrix<T>, order: u32) -> Result<f64> {
    let m = f.n() + 1;
    let scale = T::from_real(1.0 / factorial(order));
    let apply = |vs: &[Vec<T>]| -> Result<f64> {
        let refs: Vec<&[T]> = vs.iter().map(|v| v.as_slice()).collect();
        let val = f.kth_derivative_apply(x, &refs)?;
        let out = pinv * DVector::from_vec(val) * scale;
        Ok(out.norm())
    };
    let mut rng = random::stream(GAMMA_SEED, order as u64);
    let mut best_val = -1.0;
    let mut best: Vec<Vec<T>> = Vec::new();
    for _ in 0..GAMMA_PROBES {
        let tuple: Vec<Vec<T>> = (0..order).map(|_| random::unit_scalar_vector::<T, _>(&mut rng, m)).collect();
        let v = apply(&tuple)?;
        if v > best_val {
            best_val = v;
            best = tuple;
        }
    }
    // Alternating maximization: each slot is linear, so its optimum is a top singular vector.
    for _ in 0..MAX_SWEEPS {
        let before = best_val;
        for slot in 0..order as usize {
            let fixed: Vec<&[T]> =
                best.iter().enumerate().filter(|(j, _)| *j != slot).map(|(_, v)| v.as_slice()).collect();
            let l = pinv * slot_map(f, x, &fixed, order) * scale;
            let svd = l.svd(false, true);
            let vt = svd.v_t.ok_or_else(|| NagError::Numerical("SVD without V".into()))?;
            let (idx, &s) = svd
                .singular_values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .ok_or_else(|| NagError::Numerical("empty SVD".into()))?;
            if s > best_val {
                best_val = s;
                best[slot] = vt.row(idx).adjoint().iter().copied().collect();
            }
        }
        if best_val <= before * (1.0 + 1e-13) {
            break;
        }
    }
    Ok(best_val.max(0.0))
}

/// `γ(f,x) = max_{2≤k≤D} ‖(1/k!) D_x f† D̄^k_x f‖^{1/(k-1)}`, estimated from below.
pub fn smale_gamma<T: Scalar>(f: &PolySystem<T>, x: &[T]) -> Result<GammaEstimate> {
    check_unit(f, x)?;
    let pinv = tangent_pseudo_inverse(f, x)?;
    let mut order_norms = Vec::new();
    let mut gamma = 0.0f64;
    for order in 2..=f.max_degree() {
        let v = order_norm(f, x, &pinv, order)?;
        gamma = gamma.max(v.powf(1.0 / (order as f64 - 1.0)));
        order_norms.push(v);
    }
    Ok(GammaEstimate { gamma, order_norms, method: "random-probes+alternating-power".into() })
}
