use nalgebra::ComplexField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Ground field of a polynomial system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Coefficient scalar: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + std::fmt::Debug + 'static {
    const FIELD: Field;

    /// Builds a scalar from parts; the imaginary part is dropped for `f64`.
    fn from_re_im(re: f64, im: f64) -> Self;

    fn to_complex(self) -> Complex64;

    fn zero_() -> Self {
        Self::from_real(0.0)
    }

    fn one_() -> Self {
        Self::from_real(1.0)
    }
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    fn from_re_im(re: f64, _im: f64) -> Self {
        re
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    fn from_re_im(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn to_complex(self) -> Complex64 {
        self
    }
}
