//! Small dense linear-algebra helpers shared by the condition and homotopy code.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

/// Orthonormal basis of the (Hermitian) orthogonal complement of a unit vector `x`,
/// returned as the columns `1..=n` of the Householder reflector sending `e_0` to a
/// unimodular multiple of `x`. Deterministic in `x`.
pub fn tangent_basis<T: Scalar>(x: &[T]) -> DMatrix<T> {
    let m = x.len();
    let abs0 = x[0].modulus();
    // alpha = -x_0/|x_0| keeps w = x - alpha e_0 away from zero: |w|^2 = 2 + 2|x_0|.
    let alpha = if abs0 > 0.0 { -x[0] * T::from_real(1.0 / abs0) } else { -T::one_() };
    let mut w: Vec<T> = x.to_vec();
    w[0] -= alpha;
    let wn: f64 = w.iter().map(|c| c.modulus_squared()).sum();
    let s = T::from_real(2.0 / wn);
    let mut b = DMatrix::from_element(m, m - 1, T::zero_());
    for j in 1..m {
        let wj = w[j].conjugate();
        for i in 0..m {
            let delta = if i == j { T::one_() } else { T::zero_() };
            b[(i, j - 1)] = delta - s * w[i] * wj;
        }
    }
    b
}

/// Singular values in descending order.
pub fn singular_values<T: Scalar>(a: &DMatrix<T>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let svd = a.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `σ_q(A)` for a `q × n` matrix: the q-th largest singular value, zero when `q > n`.
pub fn sigma_q<T: Scalar>(a: &DMatrix<T>) -> f64 {
    let q = a.nrows();
    if q == 0 {
        return f64::INFINITY;
    }
    if q > a.ncols() {
        return 0.0;
    }
    singular_values(a)[q - 1]
}

/// Full SVD triple for the q-th singular value of a `q × n` matrix with `q ≤ n`:
/// `(σ_q, u_q, v_q)` with `A v_q = σ_q u_q`.
pub fn sigma_q_triple<T: Scalar>(a: &DMatrix<T>) -> Option<(f64, DVector<T>, DVector<T>)> {
    let q = a.nrows();
    if q == 0 || q > a.ncols() {
        return None;
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref()?;
    let vt = svd.v_t.as_ref()?;
    let (idx, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let uq = u.column(idx).into_owned();
    let vq = vt.row(idx).adjoint().into_owned();
    Some((s, uq, vq))
}

/// Scales each row `i` of `a` by `w[i]`.
pub fn scale_rows<T: Scalar>(a: &DMatrix<T>, w: &[f64]) -> DMatrix<T> {
    let mut out = a.clone();
    for (i, &s) in w.iter().enumerate() {
        out.row_mut(i).scale_mut(s);
    }
    out
}

pub fn norm2<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|c| c.modulus_squared()).sum::<f64>().sqrt()
}

/// Returns `v / ‖v‖`; `None` for the zero vector.
pub fn normalize<T: Scalar>(v: &[T]) -> Option<Vec<T>> {
    let n = norm2(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    let s = T::from_real(1.0 / n);
    Some(v.iter().map(|c| *c * s).collect())
}

/// Geodesic distance on the unit sphere between unit vectors.
pub fn sphere_distance(x: &[f64], y: &[f64]) -> f64 {
    // 2·asin(chord/2) is accurate for nearby points, unlike acos of the dot product.
    let chord: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    2.0 * (chord / 2.0).min(1.0).asin()
}

/// Projective (Fubini–Study angle) distance between unit vectors of `ℂ^{n+1}` or `ℝ^{n+1}`.
pub fn projective_distance<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    let mut dot = T::zero_();
    for (a, b) in x.iter().zip(y) {
        dot += a.conjugate() * *b;
    }
    // The sine is the norm of the part of y orthogonal to x, which stays accurate near zero
    // where 1 − |⟨x,y⟩|² cancels.
    let sin: f64 = x.iter().zip(y).map(|(a, b)| (*b - *a * dot).modulus_squared()).sum::<f64>().sqrt();
    sin.atan2(dot.modulus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn basis_at_e0_is_canonical() {
        let b = tangent_basis(&[1.0, 0.0, 0.0]);
        assert_eq!(b, DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn basis_is_orthonormal_and_orthogonal_to_x() {
        let x = normalize(&[Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.9), Complex64::new(0.1, 0.4)])
            .unwrap();
        let b = tangent_basis(&x);
        let gram = b.adjoint() * &b;
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(gram[(i, j)].re, e, epsilon = 1e-14);
                assert_relative_eq!(gram[(i, j)].im, 0.0, epsilon = 1e-14);
            }
            let dot: Complex64 = (0..3).map(|k| x[k].conj() * b[(k, i)]).sum();
            assert!(dot.norm() < 1e-14);
        }
    }

    #[test]
    fn sigma_q_conventions() {
        let a = DMatrix::from_row_slice(2, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        assert_relative_eq!(sigma_q(&a), 2.0, epsilon = 1e-14);
        let tall = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        assert_eq!(sigma_q(&tall), 0.0);
        let (s, u, v) = sigma_q_triple(&a).unwrap();
        let r = &a * &v - &u * s;
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn distances() {
        let x = [1.0, 0.0];
        let y = [0.0, 1.0];
        assert_relative_eq!(sphere_distance(&x, &y), std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(projective_distance(&x, &[-1.0, 0.0]), 0.0, epsilon = 1e-15);
    }
}
