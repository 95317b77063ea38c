//! Explicit simplicial complexes with GF(2) boundary matrices, and the Čech nerve of
//! equal-radius Euclidean balls.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::miniball::{extend, miniball, Ball};
use super::neighbors::NeighborGraph;
use crate::error::{NagError, Result};

/// Clouds larger than this are refused by [`cech_nerve`].
pub const MAX_NERVE_POINTS: usize = 5000;
/// Total simplex budget of an explicit nerve.
pub const MAX_NERVE_SIMPLICES: usize = 2_000_000;

/// `(β_0, …, β_top)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Simplices grouped by dimension; each is a strictly increasing vertex list and each
/// dimension is sorted lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<Vec<u32>>>,
}

impl SimplicialComplex {
    pub fn new() -> Self {
        SimplicialComplex::default()
    }

    /// Closure under faces of the given simplices.
    pub fn from_simplices<I, S>(simplices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let mut by_dim: Vec<std::collections::BTreeSet<Vec<u32>>> = Vec::new();
        for s in simplices {
            let mut v = s.as_ref().to_vec();
            v.sort_unstable();
            v.dedup();
            if v.is_empty() {
                continue;
            }
            let k = v.len();
            for mask in 1u64..(1 << k) {
                let face: Vec<u32> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| v[i]).collect();
                let d = face.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, Default::default);
                }
                by_dim[d].insert(face);
            }
        }
        SimplicialComplex { simplices: by_dim.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    fn from_sorted(simplices: Vec<Vec<Vec<u32>>>) -> Self {
        let mut s = simplices;
        while s.last().is_some_and(|v| v.is_empty()) {
            s.pop();
        }
        SimplicialComplex { simplices: s }
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn simplices(&self, k: usize) -> &[Vec<u32>] {
        self.simplices.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn total(&self) -> usize {
        self.simplices.iter().map(|v| v.len()).sum()
    }

    pub fn is_closed(&self) -> bool {
        (1..self.simplices.len()).all(|k| {
            self.simplices[k].iter().all(|s| {
                (0..s.len()).all(|drop| {
                    let face: Vec<u32> = s.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, v)| *v).collect();
                    self.simplices[k - 1].binary_search(&face).is_ok()
                })
            })
        })
    }

    /// `∂_k` over GF(2): one bit column per k-simplex, rows indexed by (k-1)-simplices.
    pub fn boundary_matrix(&self, k: usize) -> BitMatrix {
        let rows = if k == 0 { 0 } else { self.count(k - 1) };
        let mut m = BitMatrix::zeros(rows, self.count(k));
        if k == 0 {
            return m;
        }
        let index: HashMap<&[u32], usize> =
            self.simplices(k - 1).iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        for (j, s) in self.simplices(k).iter().enumerate() {
            for drop in 0..s.len() {
                let face: Vec<u32> = s.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, v)| *v).collect();
                if let Some(&i) = index.get(face.as_slice()) {
                    m.toggle(i, j);
                }
            }
        }
        m
    }
}

/// Dense GF(2) matrix stored by columns of 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    words: usize,
    cols: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = rows.div_ceil(64);
        BitMatrix { rows, words, cols: vec![vec![0; words]; cols] }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[j][i / 64] >> (i % 64) & 1 == 1
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        self.cols[j][i / 64] ^= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.iter().all(|w| *w == 0))
    }

    /// `self · other` over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols(), other.nrows());
        let mut out = BitMatrix::zeros(self.rows, other.ncols());
        for (j, col) in other.cols.iter().enumerate() {
            for k in 0..other.rows {
                if col[k / 64] >> (k % 64) & 1 == 1 {
                    for w in 0..self.words {
                        out.cols[j][w] ^= self.cols[k][w];
                    }
                }
            }
        }
        out
    }

    /// Rank by column reduction on lowest set bits.
    pub fn rank(&self) -> usize {
        let mut owner: HashMap<usize, Vec<u64>> = HashMap::new();
        let mut rank = 0;
        for col in &self.cols {
            let mut c = col.clone();
            while let Some(low) = lowest(&c) {
                match owner.get(&low) {
                    Some(o) => c.iter_mut().zip(o).for_each(|(a, b)| *a ^= b),
                    None => {
                        owner.insert(low, c);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }
}

fn lowest(c: &[u64]) -> Option<usize> {
    c.iter().enumerate().rev().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// `β_k = dim C_k − rank ∂_k − rank ∂_{k+1}` for `k = 0..=top`.
pub fn betti_numbers(complex: &SimplicialComplex, top: usize) -> BettiVector {
    let ranks: Vec<usize> = (0..=top + 1).map(|k| complex.boundary_matrix(k).rank()).collect();
    BettiVector((0..=top).map(|k| complex.count(k) - ranks[k] - ranks[k + 1]).collect())
}

pub(crate) fn check_cloud(points: &[Vec<f64>], limit: usize) -> Result<()> {
    if points.len() > limit {
        return Err(NagError::SizeLimit { guard: "nerve points", predicted: points.len() as u128, limit: limit as u128 });
    }
    if let Some(p) = points.first() {
        if points.iter().any(|q| q.len() != p.len()) {
            return Err(NagError::Dimension("cloud points have different dimensions".into()));
        }
    }
    Ok(())
}

/// Simplices of dimension `0..=max_dim` whose vertices fit in a ball of radius `eps`.
pub fn cech_nerve(points: &[Vec<f64>], eps: f64, max_dim: usize) -> Result<SimplicialComplex> {
    check_cloud(points, MAX_NERVE_POINTS)?;
    if !(eps >= 0.0) {
        return Err(NagError::InvalidInput(format!("ball radius must be nonnegative, got {eps}")));
    }
    let graph = NeighborGraph::new(points, 2.0 * eps);
    let mut levels: Vec<Vec<Vec<u32>>> = vec![(0..points.len() as u32).map(|v| vec![v]).collect()];
    let mut total = points.len();
    for _ in 1..=max_dim {
        let prev = levels.last().expect("vertex level");
        let mut next = Vec::new();
        for s in prev {
            let pts: Vec<&[f64]> = s.iter().map(|&v| points[v as usize].as_slice()).collect();
            let ball: Ball = miniball(&pts);
            let last = *s.last().expect("nonempty simplex");
            for v in graph.common_neighbors(s).into_iter().filter(|&v| v > last) {
                if extend(&pts, &ball, &points[v as usize]).radius <= eps {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                }
            }
            if total + next.len() > MAX_NERVE_SIMPLICES {
                return Err(NagError::SizeLimit {
                    guard: "nerve simplices",
                    predicted: (total + next.len()) as u128,
                    limit: MAX_NERVE_SIMPLICES as u128,
                });
            }
        }
        if next.is_empty() {
            break;
        }
        total += next.len();
        next.sort_unstable();
        levels.push(next);
    }
    if points.is_empty() {
        return Ok(SimplicialComplex::new());
    }
    Ok(SimplicialComplex::from_sorted(levels))
}
