//! Pairs of cloud points within a distance bound.

use rayon::prelude::*;

/// Sorted adjacency lists of the graph `|p_i − p_j| ≤ radius`. Clouds are capped at a few
/// thousand points, so the all-pairs scan is cheap.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    adj: Vec<Vec<u32>>,
}

impl NeighborGraph {
    pub fn new(points: &[Vec<f64>], radius: f64) -> Self {
        let r2 = radius * radius;
        let adj = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let p = &points[i];
                (0..points.len() as u32)
                    .filter(|&j| {
                        j as usize != i
                            && p.iter().zip(&points[j as usize]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2
                    })
                    .collect()
            })
            .collect();
        NeighborGraph { adj }
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Vertices adjacent to every vertex of `simplex`.
    pub fn common_neighbors(&self, simplex: &[u32]) -> Vec<u32> {
        let Some((&first, rest)) = simplex.split_first() else {
            return Vec::new();
        };
        let mut out: Vec<u32> = self.neighbors(first).to_vec();
        for &v in rest {
            let other = self.neighbors(v);
            out.retain(|x| other.binary_search(x).is_ok());
            if out.is_empty() {
                break;
            }
        }
        out
    }
}
