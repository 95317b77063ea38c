//! Quadratic systems `q_i = XᵀA_iX` and their complex sup-norms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NagError, Result};
use crate::linalg::singular_values;
use crate::poly::{HomogeneousPoly, PolySystem};

/// Complex-symmetric (not Hermitian) matrices of a quadratic tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSystem {
    matrices: Vec<DMatrix<Complex64>>,
}

/// The `√λ_max(Σ A_i^* A_i)` surrogate together with the exact component norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticNorm {
    /// `√λ_max(Σ A_i^* A_i)`.
    pub surrogate: f64,
    /// `σ_max(A_i) = ‖q_i‖∞^ℂ`.
    pub exact_components: Vec<f64>,
}

impl QuadraticNorm {
    /// `‖q‖∞^ℂ = max_i σ_max(A_i)`.
    pub fn exact(&self) -> f64 {
        self.exact_components.iter().copied().fold(0.0, f64::max)
    }
}

impl QuadraticSystem {
    /// Accepts matrices after checking shape and `A = Aᵀ` up to `1e-12` relative.
    pub fn new(matrices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(NagError::InvalidInput("quadratic system needs at least one matrix".into()));
        };
        let m = first.nrows();
        for (i, a) in matrices.iter().enumerate() {
            if a.nrows() != m || a.ncols() != m {
                return Err(NagError::Dimension(format!("matrix {i} is {}x{}, expected {m}x{m}", a.nrows(), a.ncols())));
            }
            let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            if (a - a.transpose()).iter().any(|c| c.norm() > 1e-12 * scale) {
                return Err(NagError::InvalidInput(format!("matrix {i} is not complex symmetric")));
            }
        }
        Ok(QuadraticSystem { matrices })
    }

    /// Reads the matrices off a system whose components all have degree 2.
    pub fn from_system(f: &PolySystem<Complex64>) -> Result<Self> {
        if f.degrees().iter().any(|&d| d != 2) {
            return Err(NagError::Precondition(format!("all degrees equal 2 (got {:?})", f.degrees())));
        }
        let m = f.n() + 1;
        let matrices = f
            .components()
            .iter()
            .map(|p| {
                let mut a = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
                for (alpha, c) in p.terms() {
                    let idx: Vec<usize> = (0..m).filter(|&j| alpha[j] > 0).collect();
                    match idx.as_slice() {
                        [j] => a[(*j, *j)] = c,
                        [j, k] => {
                            a[(*j, *k)] = c * 0.5;
                            a[(*k, *j)] = c * 0.5;
                        }
                        _ => unreachable!("degree-2 monomial"),
                    }
                }
                a
            })
            .collect();
        Ok(QuadraticSystem { matrices })
    }

    pub fn to_system(&self) -> PolySystem<Complex64> {
        let m = self.nvars();
        let comps = self
            .matrices
            .iter()
            .map(|a| {
                let mut terms: Vec<(Vec<u32>, Complex64)> = Vec::new();
                for j in 0..m {
                    for k in j..m {
                        let mut alpha = vec![0u32; m];
                        alpha[j] += 1;
                        alpha[k] += 1;
                        let c = if j == k { a[(j, j)] } else { a[(j, k)] + a[(k, j)] };
                        terms.push((alpha, c));
                    }
                }
                HomogeneousPoly::from_terms(m - 1, 2, terms.iter().map(|(a, c)| (a.as_slice(), *c))).expect("valid exponents")
            })
            .collect();
        PolySystem::new(comps).expect("components share n")
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.matrices
    }

    pub fn nvars(&self) -> usize {
        self.matrices[0].nrows()
    }

    /// `t·self + (1−t)·other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        let matrices = self.matrices.iter().zip(&other.matrices).map(|(a, b)| a * Complex64::from(t) + b * Complex64::from(1.0 - t)).collect();
        QuadraticSystem { matrices }
    }

    pub fn sub(&self, other: &Self) -> Self {
        QuadraticSystem { matrices: self.matrices.iter().zip(&other.matrices).map(|(a, b)| a - b).collect() }
    }
}

/// Surrogate and exact component norms; `max σ_max(A_i) ≤ surrogate ≤ √q·max σ_max(A_i)`.
pub fn quadratic_inf_norm(qs: &QuadraticSystem) -> QuadraticNorm {
    let m = qs.nvars();
    let q = qs.matrices.len();
    // Σ A_i^*A_i = SᵀS for the stacked matrix S, so the surrogate is σ_max(S).
    let stacked = DMatrix::from_fn(q * m, m, |r, c| qs.matrices[r / m][(r % m, c)]);
    let surrogate = singular_values(&stacked).first().copied().unwrap_or(0.0);
    let exact_components = qs.matrices.iter().map(|a| singular_values(a).first().copied().unwrap_or(0.0)).collect();
    QuadraticNorm { surrogate, exact_components }
}
