//! Dense homogeneous polynomials and polynomial systems over ℝ or ℂ.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{NagError, Result};
use crate::linalg;
use crate::multiindex::{basis_len, multinomial, MonomialBasis};
use crate::scalar::{Field, Scalar};

fn shared_basis(nvars: usize, degree: u32) -> Arc<MonomialBasis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("basis cache poisoned");
    guard
        .entry((nvars, degree))
        .or_insert_with(|| Arc::new(MonomialBasis::new(nvars, degree)))
        .clone()
}

/// A homogeneous polynomial of degree `degree` in the `n + 1` variables `X_0..X_n`.
///
/// Coefficients are stored densely in the order of [`MonomialBasis`].
#[derive(Debug, Clone)]
pub struct HomogeneousPoly<T> {
    n: usize,
    basis: Arc<MonomialBasis>,
    coeffs: Vec<T>,
}

impl<T: Scalar> PartialEq for HomogeneousPoly<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.degree() == other.degree() && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> HomogeneousPoly<T> {
    pub fn zero(n: usize, degree: u32) -> Self {
        let basis = shared_basis(n + 1, degree);
        let coeffs = vec![T::zero_(); basis.len()];
        HomogeneousPoly { n, basis, coeffs }
    }

    pub fn from_coeffs(n: usize, degree: u32, coeffs: Vec<T>) -> Result<Self> {
        let expected = basis_len(n + 1, degree);
        if coeffs.len() != expected {
            return Err(NagError::Dimension(format!(
                "degree {degree} in {} variables needs {expected} coefficients, got {}",
                n + 1,
                coeffs.len()
            )));
        }
        Ok(HomogeneousPoly { n, basis: shared_basis(n + 1, degree), coeffs })
    }

    /// Builds a polynomial from (exponent, coefficient) pairs; repeated exponents accumulate.
    pub fn from_terms<'a, I>(n: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [u32], T)>,
    {
        let mut p = Self::zero(n, degree);
        for (alpha, c) in terms {
            let idx = p.basis.index_of(alpha).ok_or_else(|| {
                NagError::InvalidInput(format!(
                    "exponent {alpha:?} is not a monomial of degree {degree} in {} variables",
                    n + 1
                ))
            })?;
            p.coeffs[idx] += c;
        }
        Ok(p)
    }

    pub fn monomial(alpha: &[u32], c: T) -> Self {
        let degree = alpha.iter().sum();
        let n = alpha.len() - 1;
        let mut p = Self::zero(n, degree);
        let idx = p.basis.index_of(alpha).expect("valid exponent");
        p.coeffs[idx] = c;
        p
    }

    /// The power `(a · X)^d` of a linear form.
    pub fn linear_power(a: &[T], degree: u32) -> Self {
        let n = a.len() - 1;
        let mut p = Self::zero(n, degree);
        for (c, alpha) in p.coeffs.iter_mut().zip(p.basis.iter()) {
            *c = T::from_real(multinomial(alpha)) * monomial_value(a, alpha);
        }
        p
    }

    /// The product `(a · X)^e (w · X)`, a polynomial of degree `e + 1`.
    pub fn linear_power_times_linear(a: &[T], e: u32, w: &[T]) -> Self {
        let n = a.len() - 1;
        let mut p = Self::zero(n, e + 1);
        let mut beta = vec![0u32; n + 1];
        for (c, alpha) in p.coeffs.iter_mut().zip(p.basis.iter()) {
            let mut acc = T::zero_();
            for j in 0..=n {
                if alpha[j] == 0 || w[j] == T::zero_() {
                    continue;
                }
                beta.copy_from_slice(alpha);
                beta[j] -= 1;
                acc += w[j] * T::from_real(multinomial(&beta)) * monomial_value(a, &beta);
            }
            *c = acc;
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn coeff(&self, alpha: &[u32]) -> T {
        self.basis.index_of(alpha).map(|i| self.coeffs[i]).unwrap_or_else(T::zero_)
    }

    /// Iterates over the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], T)> + '_ {
        self.basis
            .iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != T::zero_())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == T::zero_())
    }

    pub fn eval(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.nvars());
        let mut acc = T::zero_();
        for (alpha, c) in self.terms() {
            acc += c * monomial_value(x, alpha);
        }
        acc
    }

    /// Gradient `(∂f/∂X_0, …, ∂f/∂X_n)` at `x`.
    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::zero_(); self.nvars()];
        let mut beta = vec![0u32; self.nvars()];
        for (alpha, c) in self.terms() {
            for j in 0..self.nvars() {
                if alpha[j] == 0 {
                    continue;
                }
                beta.copy_from_slice(alpha);
                beta[j] -= 1;
                g[j] += c * T::from_real(alpha[j] as f64) * monomial_value(x, &beta);
            }
        }
        g
    }

    /// `∂f/∂X_j` as a polynomial of degree `d - 1` (the zero constant when `d = 0`).
    pub fn partial(&self, j: usize) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::zero(self.n, 0);
        }
        let mut out = Self::zero(self.n, d - 1);
        let mut beta = vec![0u32; self.nvars()];
        for (alpha, c) in self.terms() {
            if alpha[j] == 0 {
                continue;
            }
            beta.copy_from_slice(alpha);
            beta[j] -= 1;
            let idx = out.basis.index_of(&beta).expect("lowered exponent");
            out.coeffs[idx] += c * T::from_real(alpha[j] as f64);
        }
        out
    }

    /// `Σ_j v_j ∂f/∂X_j` as a polynomial of degree `d - 1`.
    pub fn directional(&self, v: &[T]) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::zero(self.n, 0);
        }
        let mut out = Self::zero(self.n, d - 1);
        let mut beta = vec![0u32; self.nvars()];
        for (alpha, c) in self.terms() {
            for j in 0..self.nvars() {
                if alpha[j] == 0 || v[j] == T::zero_() {
                    continue;
                }
                beta.copy_from_slice(alpha);
                beta[j] -= 1;
                let idx = out.basis.index_of(&beta).expect("lowered exponent");
                out.coeffs[idx] += c * v[j] * T::from_real(alpha[j] as f64);
            }
        }
        out
    }

    pub fn weyl_norm_sq(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.coeffs)
            .map(|(alpha, c)| c.modulus_squared() / multinomial(alpha))
            .sum()
    }

    /// Weyl inner product `Σ C(d,α)^{-1} f_α conj(g_α)`.
    pub fn weyl_dot(&self, other: &Self) -> T {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        let mut acc = T::zero_();
        for ((alpha, a), b) in self.basis.iter().zip(&self.coeffs).zip(&other.coeffs) {
            acc += *a * b.conjugate() * T::from_real(1.0 / multinomial(alpha));
        }
        acc
    }

    pub fn std_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.modulus_squared()).sum()
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// `a·self + b·other` for polynomials of equal shape.
    pub fn lin_comb(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.n != other.n || self.degree() != other.degree() {
            return Err(NagError::Dimension(format!(
                "cannot combine degree {} (n={}) with degree {} (n={})",
                self.degree(),
                self.n,
                other.degree(),
                other.n
            )));
        }
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c = a * *c + b * *o;
        }
        Ok(out)
    }

    pub fn to_complex(&self) -> HomogeneousPoly<Complex64> {
        HomogeneousPoly {
            n: self.n,
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c.to_complex()).collect(),
        }
    }

    /// Product of two homogeneous polynomials in the same variables.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n, self.degree() + other.degree());
        let mut gamma = vec![0u32; self.nvars()];
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                for j in 0..gamma.len() {
                    gamma[j] = a[j] + b[j];
                }
                let idx = out.basis.index_of(&gamma).expect("sum exponent");
                out.coeffs[idx] += ca * cb;
            }
        }
        out
    }

    /// The polynomial `X ↦ f(U X)` for a square matrix `U`.
    pub fn compose_linear(&self, u: &DMatrix<T>) -> Self {
        let m = self.nvars();
        assert_eq!(u.nrows(), m);
        assert_eq!(u.ncols(), m);
        let rows: Vec<Self> = (0..m)
            .map(|j| {
                let coeffs: Vec<T> = (0..m).map(|k| u[(j, k)]).collect();
                Self::linear_power(&coeffs, 1)
            })
            .collect();
        let mut out = Self::zero(self.n, self.degree());
        for (alpha, c) in self.terms() {
            let mut term = Self::from_coeffs(self.n, 0, vec![c]).expect("constant");
            for (j, &e) in alpha.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&rows[j]);
                }
            }
            for (o, t) in out.coeffs.iter_mut().zip(&term.coeffs) {
                *o += *t;
            }
        }
        out
    }
}

impl HomogeneousPoly<Complex64> {
    /// Real parts of the coefficients; fails if any imaginary part is nonzero.
    pub fn to_real(&self) -> Result<HomogeneousPoly<f64>> {
        if self.coeffs.iter().any(|c| c.im != 0.0) {
            return Err(NagError::InvalidInput("polynomial has non-real coefficients".into()));
        }
        Ok(HomogeneousPoly {
            n: self.n,
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c.re).collect(),
        })
    }
}

/// `x^α` by repeated multiplication.
pub fn monomial_value<T: Scalar>(x: &[T], alpha: &[u32]) -> T {
    let mut acc = T::one_();
    for (&xi, &a) in x.iter().zip(alpha) {
        for _ in 0..a {
            acc *= xi;
        }
    }
    acc
}

/// A tuple `(f_1, …, f_q)` of homogeneous polynomials in the same `n + 1` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem<T: Scalar> {
    n: usize,
    components: Vec<HomogeneousPoly<T>>,
}

impl<T: Scalar> PolySystem<T> {
    pub fn new(components: Vec<HomogeneousPoly<T>>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| NagError::InvalidInput("a system needs at least one component".into()))?;
        let n = first.n();
        if let Some(bad) = components.iter().find(|c| c.n() != n) {
            return Err(NagError::Dimension(format!(
                "components live in different spaces (n = {n} vs n = {})",
                bad.n()
            )));
        }
        Ok(PolySystem { n, components })
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[HomogeneousPoly<T>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [HomogeneousPoly<T>] {
        &mut self.components
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.degree()).collect()
    }

    /// `D = max d_i`.
    pub fn max_degree(&self) -> u32 {
        self.components.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    /// `N_i = C(n + d_i, d_i)`.
    pub fn component_dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.coeffs().len()).collect()
    }

    /// `N = Σ N_i`.
    pub fn dim(&self) -> usize {
        self.component_dims().iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n + 1 {
            return Err(NagError::Dimension(format!(
                "point has {} coordinates, system expects {}",
                x.len(),
                self.n + 1
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        Ok(self.components.iter().map(|c| c.eval(x)).collect())
    }

    /// `D̄_x f`, the `q × (n+1)` matrix of all partial derivatives.
    pub fn full_derivative(&self, x: &[T]) -> Result<DMatrix<T>> {
        self.check_point(x)?;
        let q = self.q();
        let mut m = DMatrix::from_element(q, self.n + 1, T::zero_());
        for (i, c) in self.components.iter().enumerate() {
            for (j, g) in c.gradient(x).into_iter().enumerate() {
                m[(i, j)] = g;
            }
        }
        Ok(m)
    }

    /// `D_x f` in the Householder tangent basis of `x`, a `q × n` matrix.
    pub fn tangent_derivative(&self, x: &[T]) -> Result<DMatrix<T>> {
        let full = self.full_derivative(x)?;
        Ok(full * linalg::tangent_basis(x))
    }

    /// `D̄_x^k f (v_1, …, v_k)`.
    pub fn kth_derivative_apply(&self, x: &[T], vectors: &[&[T]]) -> Result<Vec<T>> {
        self.check_point(x)?;
        for v in vectors {
            self.check_point(v)?;
        }
        Ok(self
            .components
            .iter()
            .map(|c| {
                if vectors.len() as u32 > c.degree() {
                    return T::zero_();
                }
                let mut p = c.clone();
                for v in vectors {
                    p = p.directional(v);
                }
                p.eval(x)
            })
            .collect())
    }

    pub fn weyl_norm(&self) -> f64 {
        self.components.iter().map(|c| c.weyl_norm_sq()).sum::<f64>().sqrt()
    }

    pub fn std_norm(&self) -> f64 {
        self.components.iter().map(|c| c.std_norm_sq()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        PolySystem { n: self.n, components: self.components.iter().map(|c| c.scale(s)).collect() }
    }

    /// `a·self + b·other` componentwise.
    pub fn lin_comb(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.q() != other.q() {
            return Err(NagError::Dimension(format!(
                "systems have {} and {} components",
                self.q(),
                other.q()
            )));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| x.lin_comb(a, y, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolySystem { n: self.n, components })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(T::one_(), other, -T::one_())
    }

    pub fn to_complex(&self) -> PolySystem<Complex64> {
        PolySystem { n: self.n, components: self.components.iter().map(|c| c.to_complex()).collect() }
    }

    pub fn compose_linear(&self, u: &DMatrix<T>) -> Self {
        PolySystem {
            n: self.n,
            components: self.components.iter().map(|c| c.compose_linear(u)).collect(),
        }
    }
}

impl PolySystem<Complex64> {
    pub fn to_real(&self) -> Result<PolySystem<f64>> {
        Ok(PolySystem {
            n: self.n,
            components: self.components.iter().map(|c| c.to_real()).collect::<Result<_>>()?,
        })
    }
}

/// A real polynomial in `n` affine variables, stored as sorted merged terms.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoly {
    n: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl AffinePoly {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut map: std::collections::BTreeMap<Vec<u32>, f64> = Default::default();
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(NagError::Dimension(format!(
                    "affine exponent {alpha:?} has length {}, expected {n}",
                    alpha.len()
                )));
            }
            *map.entry(alpha).or_insert(0.0) += c;
        }
        let terms = map.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Ok(AffinePoly { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(a, _)| a.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(a, c)| c * monomial_value(x, a)).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        let mut beta = vec![0u32; self.n];
        for (a, c) in &self.terms {
            for j in 0..self.n {
                if a[j] == 0 {
                    continue;
                }
                beta.copy_from_slice(a);
                beta[j] -= 1;
                g[j] += c * a[j] as f64 * monomial_value(x, &beta);
            }
        }
        g
    }

    /// `f^h(X_0, …, X_n) = X_0^d f(X_1/X_0, …, X_n/X_0)`.
    pub fn homogenize(&self, d: u32) -> Result<HomogeneousPoly<f64>> {
        if self.degree() > d {
            return Err(NagError::InvalidInput(format!(
                "cannot homogenize a degree-{} polynomial to degree {d}",
                self.degree()
            )));
        }
        let mut p = HomogeneousPoly::zero(self.n, d);
        let mut alpha = vec![0u32; self.n + 1];
        for (a, c) in &self.terms {
            alpha[0] = d - a.iter().sum::<u32>();
            alpha[1..].copy_from_slice(a);
            let idx = p.basis().index_of(&alpha).expect("padded exponent");
            p.coeffs_mut()[idx] += *c;
        }
        Ok(p)
    }

    /// `x ↦ f(1, x)`.
    pub fn dehomogenize(f: &HomogeneousPoly<f64>) -> Self {
        let terms = f.terms().map(|(a, c)| (a[1..].to_vec(), c));
        AffinePoly::new(f.n(), terms).expect("consistent lengths")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// c_d = Re (X + iY)^d.
    fn chebyshev_like(d: u32) -> HomogeneousPoly<f64> {
        let mut terms = Vec::new();
        for j in (0..=d).step_by(2) {
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            terms.push((vec![d - j, j], sign * crate::multiindex::binomial(d as u64, j as u64)));
        }
        HomogeneousPoly::from_terms(1, d, terms.iter().map(|(a, c)| (a.as_slice(), *c))).unwrap()
    }

    #[test]
    fn evaluates_simple_examples() {
        let p = HomogeneousPoly::<f64>::monomial(&[3, 0, 0], 1.0);
        assert_eq!(p.eval(&[1.0, 0.0, 0.0]), 1.0);
        let c2 = chebyshev_like(2);
        let t = std::f64::consts::PI / 6.0;
        assert_relative_eq!(c2.eval(&[t.cos(), t.sin()]), 0.5, epsilon = 1e-15);
        let s = PolySystem::new(vec![HomogeneousPoly::linear_power(&[1.0, 0.0, 0.0], 2)
            .lin_comb(1.0, &HomogeneousPoly::linear_power(&[0.0, 1.0, 0.0], 2), 1.0)
            .unwrap()
            .lin_comb(1.0, &HomogeneousPoly::linear_power(&[0.0, 0.0, 1.0], 2), 1.0)
            .unwrap()])
        .unwrap();
        let x = [0.6, 0.0, 0.8];
        assert_relative_eq!(s.eval(&x).unwrap()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn derivatives_match_hand_values() {
        let f = PolySystem::new(vec![HomogeneousPoly::<f64>::monomial(&[2, 0], 1.0)]).unwrap();
        let d = f.full_derivative(&[1.0, 0.0]).unwrap();
        assert_eq!((d[(0, 0)], d[(0, 1)]), (2.0, 0.0));
        let c2 = PolySystem::new(vec![chebyshev_like(2)]).unwrap();
        let d = c2.full_derivative(&[1.0, 0.0]).unwrap();
        assert_eq!((d[(0, 0)], d[(0, 1)]), (2.0, 0.0));
        let t = f.tangent_derivative(&[1.0, 0.0]).unwrap();
        assert_eq!(t[(0, 0)], 0.0);
    }

    #[test]
    fn kth_derivatives() {
        let f = PolySystem::new(vec![HomogeneousPoly::<f64>::monomial(&[2, 0], 1.0)]).unwrap();
        let e0 = [1.0, 0.0];
        let x = [0.3, -0.7];
        assert_eq!(f.kth_derivative_apply(&x, &[&e0, &e0]).unwrap(), vec![2.0]);
        assert_eq!(f.kth_derivative_apply(&x, &[&e0, &e0, &e0]).unwrap(), vec![0.0]);
        let g = PolySystem::new(vec![HomogeneousPoly::<f64>::monomial(&[1, 1], 1.0)]).unwrap();
        assert_eq!(g.kth_derivative_apply(&x, &[&e0, &[0.0, 1.0]]).unwrap(), vec![1.0]);
    }

    #[test]
    fn norms_of_examples() {
        let m = PolySystem::new(vec![HomogeneousPoly::<f64>::monomial(&[1, 1], 1.0)]).unwrap();
        assert_relative_eq!(m.weyl_norm(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(m.std_norm(), 1.0);
        for d in 1..=8 {
            let c = PolySystem::new(vec![chebyshev_like(d)]).unwrap();
            assert_relative_eq!(c.weyl_norm(), 2f64.powf((d as f64 - 1.0) / 2.0), max_relative = 1e-14);
        }
        let c3 = PolySystem::new(vec![chebyshev_like(3)]).unwrap();
        assert_relative_eq!(c3.std_norm(), 10f64.sqrt(), epsilon = 1e-14);
        assert_eq!(PolySystem::new(vec![HomogeneousPoly::<f64>::zero(2, 3)]).unwrap().std_norm(), 0.0);
        let p = PolySystem::new(vec![HomogeneousPoly::<f64>::monomial(&[0, 4, 0], 1.0)]).unwrap();
        assert_eq!(p.weyl_norm(), 1.0);
    }

    #[test]
    fn linear_forms_expand_correctly() {
        let a = [0.3, -1.2, 0.5];
        let w = [1.0, 0.25, -2.0];
        let p = HomogeneousPoly::linear_power(&a, 3);
        let q = HomogeneousPoly::linear_power_times_linear(&a, 2, &w);
        let x = [0.7, 0.1, -0.4];
        let ax: f64 = a.iter().zip(&x).map(|(u, v)| u * v).sum();
        let wx: f64 = w.iter().zip(&x).map(|(u, v)| u * v).sum();
        assert_relative_eq!(p.eval(&x), ax.powi(3), epsilon = 1e-14);
        assert_relative_eq!(q.eval(&x), ax.powi(2) * wx, epsilon = 1e-14);
    }

    #[test]
    fn homogenize_roundtrip() {
        let p = AffinePoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0), (vec![0, 0], -0.25)]).unwrap();
        let h = p.homogenize(2).unwrap();
        assert_eq!(h.coeff(&[0, 2, 0]), 1.0);
        assert_eq!(h.coeff(&[0, 0, 2]), 1.0);
        assert_eq!(h.coeff(&[2, 0, 0]), -0.25);
        assert!(p.homogenize(1).is_err());
        let x = AffinePoly::new(1, vec![(vec![1], 1.0)]).unwrap();
        assert_eq!(x.homogenize(1).unwrap().coeff(&[0, 1]), 1.0);
        assert_eq!(AffinePoly::dehomogenize(&h), p);
    }

    #[test]
    fn dimension_errors() {
        let f = PolySystem::new(vec![HomogeneousPoly::<f64>::monomial(&[1, 1], 1.0)]).unwrap();
        assert!(matches!(f.eval(&[1.0, 0.0, 0.0]), Err(NagError::Dimension(_))));
        let g = HomogeneousPoly::<f64>::monomial(&[1, 1, 0], 1.0);
        assert!(PolySystem::new(vec![f.components()[0].clone(), g]).is_err());
    }
}
