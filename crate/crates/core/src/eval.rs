//! Sparse compiled evaluator for repeated evaluation of one system at many points.

use crate::poly::PolySystem;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Evaluator<T: Scalar> {
    nvars: usize,
    stride: usize,
    exps: Vec<u8>,
    coeffs: Vec<T>,
    ranges: Vec<(usize, usize)>,
}

impl<T: Scalar> Evaluator<T> {
    pub fn new(f: &PolySystem<T>) -> Self {
        let nvars = f.n() + 1;
        let stride = f.max_degree() as usize + 1;
        let mut exps = Vec::new();
        let mut coeffs = Vec::new();
        let mut ranges = Vec::with_capacity(f.q());
        for comp in f.components() {
            let start = coeffs.len();
            for (alpha, c) in comp.terms() {
                exps.extend(alpha.iter().map(|&a| a as u8));
                coeffs.push(c);
            }
            ranges.push((start, coeffs.len()));
        }
        Evaluator { nvars, stride, exps, coeffs, ranges }
    }

    pub fn q(&self) -> usize {
        self.ranges.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Scratch buffer for the power table.
    pub fn scratch(&self) -> Vec<T> {
        vec![T::zero_(); self.nvars * self.stride]
    }

    fn fill_powers(&self, x: &[T], pow: &mut [T]) {
        for (j, &xj) in x.iter().enumerate() {
            let row = &mut pow[j * self.stride..(j + 1) * self.stride];
            row[0] = T::one_();
            for e in 1..self.stride {
                row[e] = row[e - 1] * xj;
            }
        }
    }

    pub fn eval_into(&self, x: &[T], pow: &mut [T], out: &mut [T]) {
        self.fill_powers(x, pow);
        for (i, &(s, e)) in self.ranges.iter().enumerate() {
            let mut acc = T::zero_();
            for t in s..e {
                let ex = &self.exps[t * self.nvars..(t + 1) * self.nvars];
                let mut m = self.coeffs[t];
                for (j, &a) in ex.iter().enumerate() {
                    m *= pow[j * self.stride + a as usize];
                }
                acc += m;
            }
            out[i] = acc;
        }
    }

    /// Values and the row-major `q × (n+1)` Jacobian.
    pub fn eval_jacobian_into(&self, x: &[T], pow: &mut [T], vals: &mut [T], jac: &mut [T]) {
        self.fill_powers(x, pow);
        jac.iter_mut().for_each(|v| *v = T::zero_());
        let m = self.nvars;
        for (i, &(s, e)) in self.ranges.iter().enumerate() {
            let mut acc = T::zero_();
            for t in s..e {
                let ex = &self.exps[t * m..(t + 1) * m];
                let c = self.coeffs[t];
                let mut full = c;
                for (j, &a) in ex.iter().enumerate() {
                    full *= pow[j * self.stride + a as usize];
                }
                acc += full;
                for (j, &aj) in ex.iter().enumerate() {
                    if aj == 0 {
                        continue;
                    }
                    let mut d = c * T::from_real(aj as f64) * pow[j * self.stride + aj as usize - 1];
                    for (k, &a) in ex.iter().enumerate() {
                        if k != j {
                            d *= pow[k * self.stride + a as usize];
                        }
                    }
                    jac[i * m + j] += d;
                }
            }
            vals[i] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::HomogeneousPoly;
    use approx::assert_relative_eq;

    #[test]
    fn agrees_with_direct_evaluation() {
        let f = PolySystem::new(vec![
            HomogeneousPoly::linear_power(&[0.5, -1.0, 2.0], 3),
            HomogeneousPoly::linear_power_times_linear(&[1.0, 0.2, 0.0], 1, &[0.0, 1.0, -3.0]),
        ])
        .unwrap();
        let ev = Evaluator::new(&f);
        let x = [0.3, -0.4, 0.5];
        let mut pow = ev.scratch();
        let mut vals = [0.0; 2];
        let mut jac = [0.0; 6];
        ev.eval_jacobian_into(&x, &mut pow, &mut vals, &mut jac);
        let direct = f.eval(&x).unwrap();
        let dj = f.full_derivative(&x).unwrap();
        for i in 0..2 {
            assert_relative_eq!(vals[i], direct[i], epsilon = 1e-14);
            for j in 0..3 {
                assert_relative_eq!(jac[i * 3 + j], dj[(i, j)], epsilon = 1e-13);
            }
        }
        let mut out = [0.0; 2];
        ev.eval_into(&x, &mut pow, &mut out);
        assert_eq!(out, vals);
    }
}
