//! Random standard pairs `(g, ζ)`: `g` complex KSS and `ζ` a uniformly chosen zero of `g`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::ensembles::draw_poly;
use crate::ensembles::Law;
use crate::error::{NagError, Result};
use crate::linalg::{norm2, sigma_q, tangent_basis};
use crate::poly::{HomogeneousPoly, PolySystem};
use crate::random::{complex_normal, stream};

/// Pairs are redrawn when the kernel is numerically ambiguous below this `σ_n(M)`.
const KERNEL_SIGMA_MIN: f64 = 1e-8;
const PAIR_RESIDUAL: f64 = 1e-10;
const MAX_REDRAWS: usize = 64;

/// `g(ζ) ≈ 0` with `D_ζ g` surjective.
#[derive(Debug, Clone)]
pub struct StandardPair {
    pub g: PolySystem<Complex64>,
    pub zeta: Vec<Complex64>,
    /// The Gaussian matrix `Δ^{-1/2} D̄_ζ g` used in the construction.
    pub m: DMatrix<Complex64>,
}

/// Unit kernel vector of an `n × (n+1)` matrix and `σ_n`.
fn kernel_vector(m: &DMatrix<Complex64>) -> (Vec<Complex64>, f64) {
    let n = m.nrows();
    let mut padded = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
    padded.rows_mut(0, n).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (idx, _) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
    let v: Vec<Complex64> = vt.row(idx).iter().map(|c| c.conj()).collect();
    (v, sigma_q(m))
}

/// Draws a standard pair from `rng`.
pub fn bp_sample_with<R: Rng + ?Sized>(n: usize, degrees: &[u32], rng: &mut R) -> Result<StandardPair> {
    if degrees.len() != n {
        return Err(NagError::Dimension(format!("{} degrees for n = {n}; a square system needs n", degrees.len())));
    }
    if degrees.iter().any(|&d| d == 0) {
        return Err(NagError::InvalidInput("standard pairs need positive degrees".into()));
    }
    for _ in 0..MAX_REDRAWS {
        let m = DMatrix::from_fn(n, n + 1, |_, _| complex_normal(rng));
        let (kernel, sigma) = kernel_vector(&m);
        if sigma < KERNEL_SIGMA_MIN {
            continue;
        }
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let phase = Complex64::from_polar(1.0, theta);
        let zeta: Vec<Complex64> = kernel.iter().map(|c| c * phase).collect();
        // U = [ζ | B] is unitary; in coordinates Y = U^*X the point ζ becomes e_0.
        let b = tangent_basis(&zeta);
        let mut u = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
        u.column_mut(0).copy_from_slice(&zeta);
        u.columns_mut(1, n).copy_from(&b);
        let mu = &m * &u;
        let u_adj = u.adjoint();
        let mut e0 = vec![Complex64::new(0.0, 0.0); n + 1];
        e0[0] = Complex64::new(1.0, 0.0);
        let comps: Vec<HomogeneousPoly<Complex64>> = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let sd = (d as f64).sqrt();
                let w: Vec<Complex64> = (0..=n).map(|j| mu[(i, j)] * sd).collect();
                let lead = HomogeneousPoly::linear_power_times_linear(&e0, d - 1, &w);
                // Dropping the monomials Y_0^d and Y_0^{d-1}Y_j is the Weyl-orthogonal
                // projection onto polynomials vanishing to order two at e_0.
                let mut h = draw_poly::<Complex64, R>(n, d, Law::KssComplex, rng);
                let keep: Vec<bool> = h.basis().iter().map(|a| a[0] + 1 < d).collect();
                for (c, k) in h.coeffs_mut().iter_mut().zip(keep) {
                    if !k {
                        *c = Complex64::new(0.0, 0.0);
                    }
                }
                let tilde = lead.lin_comb(Complex64::new(1.0, 0.0), &h, Complex64::new(1.0, 0.0)).expect("same shape");
                tilde.compose_linear(&u_adj)
            })
            .collect();
        let g = PolySystem::new(comps)?;
        let residual = norm2(&g.eval(&zeta)?);
        let tangent = crate::linalg::scale_rows(
            &g.tangent_derivative(&zeta)?,
            &degrees.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect::<Vec<_>>(),
        );
        if residual > PAIR_RESIDUAL * g.weyl_norm() || sigma_q(&tangent) <= 1e-12 {
            continue;
        }
        return Ok(StandardPair { g, zeta, m });
    }
    Err(NagError::Numerical(format!("no nondegenerate standard pair after {MAX_REDRAWS} draws")))
}

/// Standard pair determined by `seed`.
pub fn bp_sample(n: usize, degrees: &[u32], seed: u64) -> Result<StandardPair> {
    bp_sample_with(n, degrees, &mut stream(seed, 0))
}
