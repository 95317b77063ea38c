//! Serde form of polynomial systems: `{"field", "n", "degrees", "terms": [[i, α, re, im]]}`.
//!
//! Parsing lives with the caller (any serde format works); this module only validates the
//! document and converts it to and from [`PolySystem`].

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NagError, Result};
use crate::poly::{HomogeneousPoly, PolySystem};
use crate::scalar::{Field, Scalar};

/// One coefficient: component index, exponent vector of length `n + 1`, real and imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term(pub usize, pub Vec<u32>, pub f64, pub f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDocument {
    pub field: Field,
    pub n: usize,
    pub degrees: Vec<u32>,
    pub terms: Vec<Term>,
}

/// A validated system over either field.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySystem {
    Real(PolySystem<f64>),
    Complex(PolySystem<Complex64>),
}

impl AnySystem {
    pub fn field(&self) -> Field {
        match self {
            AnySystem::Real(_) => Field::Real,
            AnySystem::Complex(_) => Field::Complex,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnySystem::Real(f) => f.n(),
            AnySystem::Complex(f) => f.n(),
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        match self {
            AnySystem::Real(f) => f.degrees(),
            AnySystem::Complex(f) => f.degrees(),
        }
    }

    /// Complexification; complex systems are returned unchanged.
    pub fn to_complex(&self) -> PolySystem<Complex64> {
        match self {
            AnySystem::Real(f) => f.to_complex(),
            AnySystem::Complex(f) => f.clone(),
        }
    }

    pub fn into_real(self) -> Result<PolySystem<f64>> {
        match self {
            AnySystem::Real(f) => Ok(f),
            AnySystem::Complex(_) => Err(NagError::InvalidInput("command needs a real system (field = \"real\")".into())),
        }
    }
}

impl PolyDocument {
    /// Checks shapes, degrees, duplicates and finiteness, then builds the system.
    pub fn to_system(&self) -> Result<AnySystem> {
        if self.degrees.is_empty() {
            return Err(NagError::InvalidInput("degrees must list at least one component".into()));
        }
        if let Some(i) = self.degrees.iter().position(|&d| d == 0) {
            return Err(NagError::InvalidInput(format!("component {i} has degree 0")));
        }
        let q = self.degrees.len();
        let mut seen = BTreeSet::new();
        for (k, Term(i, alpha, re, im)) in self.terms.iter().enumerate() {
            if *i >= q {
                return Err(NagError::InvalidInput(format!("term {k}: component {i} out of range (q = {q})")));
            }
            if alpha.len() != self.n + 1 {
                return Err(NagError::InvalidInput(format!(
                    "term {k}: exponent has length {}, expected n + 1 = {}",
                    alpha.len(),
                    self.n + 1
                )));
            }
            let deg: u32 = alpha.iter().sum();
            if deg != self.degrees[*i] {
                return Err(NagError::InvalidInput(format!(
                    "term {k}: total degree {deg} differs from degrees[{i}] = {}",
                    self.degrees[*i]
                )));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(NagError::InvalidInput(format!("term {k}: non-finite coefficient")));
            }
            if self.field == Field::Real && *im != 0.0 {
                return Err(NagError::InvalidInput(format!("term {k}: real field needs im = 0, got {im}")));
            }
            if !seen.insert((*i, alpha.clone())) {
                return Err(NagError::InvalidInput(format!("term {k}: duplicate monomial {alpha:?} in component {i}")));
            }
        }
        Ok(match self.field {
            Field::Real => AnySystem::Real(self.build()?),
            Field::Complex => AnySystem::Complex(self.build()?),
        })
    }

    fn build<T: Scalar>(&self) -> Result<PolySystem<T>> {
        let comps = self
            .degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let terms: Vec<(&[u32], T)> = self
                    .terms
                    .iter()
                    .filter(|t| t.0 == i)
                    .map(|Term(_, a, re, im)| (a.as_slice(), T::from_re_im(*re, *im)))
                    .collect();
                HomogeneousPoly::from_terms(self.n, d, terms)
            })
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(comps)
    }

    /// Nonzero coefficients in basis order.
    pub fn from_system<T: Scalar>(f: &PolySystem<T>) -> Self {
        let terms = f
            .components()
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                p.terms().filter_map(move |(a, c)| {
                    let z = c.to_complex();
                    (z.re != 0.0 || z.im != 0.0).then(|| Term(i, a.to_vec(), z.re, z.im))
                })
            })
            .collect();
        PolyDocument { field: T::FIELD, n: f.n(), degrees: f.degrees(), terms }
    }
}
