//! Distances to systems singular at a point, the explicit nearest singular system, and grid
//! maxima of the C¹-type norms `‖f‖_∞` and `‖f‖_{∞,d}`.

use serde::{Deserialize, Serialize};

use super::estimate::{gram_extremes, project_rows};
use super::{degree_weights, local_data};
use crate::error::Result;
use crate::eval::Evaluator;
use crate::grid::SphereGrid;
use crate::linalg::{self, sigma_q, sigma_q_triple};
use crate::poly::{HomogeneousPoly, PolySystem};

/// `√(‖f(x)‖² + σ_q(Δ^{-1/2} D_x f)²)`, the Weyl distance from `f` to the systems singular at `x`.
pub fn dist_to_sigma(f: &PolySystem<f64>, x: &[f64]) -> Result<f64> {
    let ld = local_data(f, x)?;
    Ok(ld.residual.hypot(ld.sigma_weyl))
}

/// `√(‖f(x)‖² + σ_q(D_x f)²)`, the C¹ distance to maps singular at `x`.
pub fn dist_inf_estimate(f: &PolySystem<f64>, x: &[f64]) -> Result<f64> {
    super::check_unit(f, x)?;
    let r = linalg::norm2(&f.eval(x)?);
    Ok(r.hypot(sigma_q(&f.tangent_derivative(x)?)))
}

/// The system `g` singular at `x` nearest to `f` in the Weyl norm.
///
/// With `(s, u, v)` the q-th singular triple of `Δ^{-1/2} D_x f` and `w` the tangent vector of
/// `v`, `f − g` has components `f_i(x)⟨x,X⟩^{d_i} + √d_i·s·u_i⟨x,X⟩^{d_i−1}⟨w,X⟩`. The two
/// parts are Weyl-orthogonal and `‖⟨x,X⟩^{d−1}⟨w,X⟩‖_W² = 1/d`, so `‖f − g‖_W² = ‖f(x)‖² + s²`.
pub fn construct_minimizer(f: &PolySystem<f64>, x: &[f64]) -> Result<PolySystem<f64>> {
    super::check_unit(f, x)?;
    let fx = f.eval(x)?;
    let basis = linalg::tangent_basis(x);
    let dx = f.tangent_derivative(x)?;
    let degrees = f.degrees();
    let a = linalg::scale_rows(&dx, &degree_weights(&degrees, 0.5));
    let triple = sigma_q_triple(&a).filter(|t| t.0 > 0.0);
    if triple.is_none() && fx.iter().all(|v| *v == 0.0) {
        return Ok(f.clone());
    }
    let (s, u, w) = match &triple {
        Some((s, u, v)) => (*s, u.as_slice().to_vec(), (&basis * v).as_slice().to_vec()),
        None => (0.0, vec![0.0; f.q()], vec![0.0; f.n() + 1]),
    };
    let comps = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let d = c.degree();
            let mut h = HomogeneousPoly::linear_power(x, d).scale(fx[i]);
            if d >= 1 && s > 0.0 {
                let tail = HomogeneousPoly::linear_power_times_linear(x, d - 1, &w);
                h = h.lin_comb(1.0, &tail, (d as f64).sqrt() * s * u[i])?;
            }
            c.lin_comb(1.0, &h, -1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    PolySystem::new(comps)
}

/// Grid maxima of `‖f‖_∞ = max √(‖f(x)‖² + ‖D_x f‖²)`, of its `Δ^{-1/2}`-scaled variant
/// `‖f‖_{∞,d}` and of `‖f‖∞^ℝ`. All three are lower bounds of the true maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C1Norms {
    pub c1: f64,
    pub c1_weighted: f64,
    pub values: f64,
    pub level: u32,
    pub points: u64,
}

/// Default net level for [`c1_norms`].
pub const C1_LEVEL: u32 = 6;

pub fn c1_norms(f: &PolySystem<f64>, level: u32) -> Result<C1Norms> {
    let grid = SphereGrid::new(f.n(), level)?;
    let ev = Evaluator::new(f);
    let q = f.q();
    let m = f.n() + 1;
    let ones = vec![1.0; q];
    let weights = degree_weights(&f.degrees(), 0.5);
    let rows = grid.fold_rows(
        true,
        || ([0.0f64; 3], ev.scratch(), vec![0.0; q], vec![0.0; q * m], vec![0.0; q * m]),
        |(best, pow, vals, jac, work), x| {
            ev.eval_jacobian_into(x, pow, vals, jac);
            let r2: f64 = vals.iter().map(|v| v * v).sum();
            project_rows(jac, x, &ones, work);
            let full = (r2 + gram_extremes(work, q, m).1).sqrt();
            project_rows(jac, x, &weights, work);
            let scaled = (r2 + gram_extremes(work, q, m).1).sqrt();
            let vmax = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
            best[0] = best[0].max(full);
            best[1] = best[1].max(scaled);
            best[2] = best[2].max(vmax);
        },
    );
    let mut out = [0.0f64; 3];
    for r in &rows {
        for j in 0..3 {
            out[j] = out[j].max(r.0[j]);
        }
    }
    Ok(C1Norms { c1: out[0], c1_weighted: out[1], values: out[2], level, points: grid.half_len() as u64 })
}
