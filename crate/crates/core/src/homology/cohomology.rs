//! Betti numbers of a Čech nerve without materializing its top-dimensional simplices.
//!
//! Simplices are keyed by their colexicographic rank and ordered by (squared diameter, key);
//! ranks do not depend on the order, and the diameter order keeps most pivots apparent.
//! For each dimension `k` the coboundary matrix `δ^k` is reduced column by column, columns in
//! decreasing order and pivots at the smallest entry, with coboundaries regenerated from the
//! neighbor graph on demand. A k-simplex that is the pivot of a reduced column of `δ^{k-1}` has
//! a column of `δ^k` that reduces to zero, so it is skipped (clearing). Over GF(2),
//! `β_k = #k-simplices − rank δ^k − rank δ^{k-1}`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::{check_cloud, BettiVector, MAX_NERVE_POINTS};
use super::miniball::{miniball, miniball_radius};
use super::neighbors::NeighborGraph;
use crate::error::{NagError, Result};

/// Simplices of dimension `≤ top` kept in memory at once.
pub const MAX_STORED_SIMPLICES: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CechBetti {
    pub betti: BettiVector,
    /// Simplices per dimension `0..=top`.
    pub simplex_counts: Vec<usize>,
    /// `rank δ^k` for `k = 0..=top`.
    pub coboundary_ranks: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    /// Squared diameter, computed exactly the same way from every face.
    diam2: f64,
    key: u128,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diam2.total_cmp(&other.diam2).then(self.key.cmp(&other.key))
    }
}

/// Colexicographic ranks of sorted vertex lists.
struct Codec {
    binom: Vec<Vec<u128>>,
}

impl Codec {
    fn new(nverts: usize, max_len: usize) -> Self {
        let mut binom = vec![vec![0u128; max_len + 1]; nverts + 1];
        for v in 0..=nverts {
            binom[v][0] = 1;
            for j in 1..=max_len.min(v) {
                binom[v][j] = binom[v - 1][j - 1] + if j <= v - 1 { binom[v - 1][j] } else { 0 };
            }
        }
        Codec { binom }
    }

    fn encode(&self, verts: &[u32]) -> u128 {
        verts.iter().enumerate().map(|(i, &v)| self.binom[v as usize][i + 1]).sum()
    }

    fn decode(&self, mut key: u128, len: usize, out: &mut Vec<u32>) {
        out.clear();
        out.resize(len, 0);
        let mut hi = self.binom.len();
        for i in (0..len).rev() {
            // Largest v < hi with C(v, i+1) ≤ key.
            let (mut lo, mut up) = (i, hi);
            while up - lo > 1 {
                let mid = (lo + up) / 2;
                if self.binom[mid][i + 1] <= key {
                    lo = mid;
                } else {
                    up = mid;
                }
            }
            out[i] = lo as u32;
            key -= self.binom[lo][i + 1];
            hi = lo;
        }
    }
}

struct Nerve<'a> {
    points: &'a [Vec<f64>],
    eps: f64,
    graph: NeighborGraph,
    codec: Codec,
}

impl Nerve<'_> {
    /// Enclosing radius computed from the sorted vertex list, so every face of a simplex
    /// reaches the same membership decision.
    fn radius(&self, verts: &[u32]) -> f64 {
        let mut pts: [&[f64]; 8] = [&[]; 8];
        if verts.len() > pts.len() {
            let all: Vec<&[f64]> = verts.iter().map(|&v| self.points[v as usize].as_slice()).collect();
            return miniball_radius(&all);
        }
        for (p, &v) in pts.iter_mut().zip(verts) {
            *p = &self.points[v as usize];
        }
        miniball_radius(&pts[..verts.len()])
    }

    fn dist2(&self, a: u32, b: u32) -> f64 {
        let (a, b) = (a.min(b), a.max(b));
        self.points[a as usize].iter().zip(&self.points[b as usize]).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    fn face_context(&self, verts: &[u32]) -> Face {
        let mut diam2 = 0.0f64;
        for (i, &a) in verts.iter().enumerate() {
            for &b in &verts[i + 1..] {
                diam2 = diam2.max(self.dist2(a, b));
            }
        }
        let pts: Vec<&[f64]> = verts.iter().map(|&u| self.points[u as usize].as_slice()).collect();
        Face { diam2, ball: miniball(&pts) }
    }

    /// Whether `verts ∪ {v}` (sorted into `buf`) belongs to the nerve.
    ///
    /// Bounds from the face's ball `B(c, r)` settle the question when they are decisive by a
    /// relative margin far above rounding: a point at distance `d` from `c` gives
    /// `(d² + r²)/(2d) ≤ radius ≤ max(r, d)` (the lower bound for `d > r`, since the support of
    /// the face ball surrounds `c`). Otherwise the radius is computed from the sorted vertices.
    fn admits(&self, face: &Face, v: u32, buf: &[u32]) -> bool {
        const MARGIN: f64 = 1e-9;
        let r = face.ball.radius;
        let d = face.ball.center.iter().zip(&self.points[v as usize]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if d > r && (d * d + r * r) > 2.0 * d * self.eps * (1.0 + MARGIN) {
            return false;
        }
        if r.max(d) * (1.0 + 1e-12) <= self.eps * (1.0 - MARGIN) {
            return true;
        }
        self.radius(buf) <= self.eps
    }

    fn insert_sorted(verts: &[u32], v: u32, buf: &mut Vec<u32>) {
        buf.clear();
        buf.extend_from_slice(verts);
        let pos = buf.partition_point(|&x| x < v);
        buf.insert(pos, v);
    }

    /// Cofacets of `verts` inside the nerve, optionally only those adding a larger vertex.
    fn cofacets(&self, verts: &[u32], only_larger: bool, mut visit: impl FnMut(Entry)) {
        let last = *verts.last().expect("nonempty simplex");
        let face = self.face_context(verts);
        let mut buf = Vec::with_capacity(verts.len() + 1);
        for v in self.graph.common_neighbors(verts) {
            if only_larger && v < last {
                continue;
            }
            Self::insert_sorted(verts, v, &mut buf);
            if self.admits(&face, v, &buf) {
                let diam2 = verts.iter().map(|&u| self.dist2(u, v)).fold(face.diam2, f64::max);
                visit(Entry { diam2, key: self.codec.encode(&buf) });
            }
        }
    }

    /// The smallest cofacet, testing membership in increasing order only until one is found.
    fn min_cofacet(&self, verts: &[u32]) -> Option<Entry> {
        let face = self.face_context(verts);
        let mut buf = Vec::with_capacity(verts.len() + 1);
        let mut candidates: Vec<(Entry, u32)> = self
            .graph
            .common_neighbors(verts)
            .into_iter()
            .map(|v| {
                Self::insert_sorted(verts, v, &mut buf);
                let diam2 = verts.iter().map(|&u| self.dist2(u, v)).fold(face.diam2, f64::max);
                (Entry { diam2, key: self.codec.encode(&buf) }, v)
            })
            .collect();
        candidates.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        candidates.into_iter().find_map(|(e, v)| {
            Self::insert_sorted(verts, v, &mut buf);
            self.admits(&face, v, &buf).then_some(e)
        })
    }
}

struct Face {
    diam2: f64,
    ball: super::miniball::Ball,
}

fn pop_pivot(heap: &mut BinaryHeap<Reverse<Entry>>) -> Option<Entry> {
    loop {
        let Reverse(top) = heap.pop()?;
        if heap.peek().is_some_and(|Reverse(next)| *next == top) {
            heap.pop();
            continue;
        }
        return Some(top);
    }
}

/// Kruskal over edges in increasing order: the component count and the merging edges. The
/// merging edges are exactly the pivots of the reduced `δ^0`, so their `δ^1` columns vanish.
fn spanning_forest(nverts: usize, edges: &[Entry], codec: &Codec) -> (usize, HashSet<u128>) {
    let mut parent: Vec<u32> = (0..nverts as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    let mut merging = HashSet::new();
    let mut buf = Vec::new();
    for e in edges {
        codec.decode(e.key, 2, &mut buf);
        let (a, b) = (find(&mut parent, buf[0]), find(&mut parent, buf[1]));
        if a != b {
            parent[a as usize] = b;
            merging.insert(e.key);
        }
    }
    (nverts - merging.len(), merging)
}

/// `β_0..β_top` of the Čech nerve of balls of radius `eps` around `points`.
pub fn cech_betti(points: &[Vec<f64>], eps: f64, top: usize) -> Result<CechBetti> {
    check_cloud(points, MAX_NERVE_POINTS)?;
    if !(eps >= 0.0) {
        return Err(NagError::InvalidInput(format!("ball radius must be nonnegative, got {eps}")));
    }
    if points.is_empty() {
        return Ok(CechBetti {
            betti: BettiVector(vec![0; top + 1]),
            simplex_counts: vec![0; top + 1],
            coboundary_ranks: vec![0; top + 1],
        });
    }
    let nerve = Nerve {
        points,
        eps,
        graph: NeighborGraph::new(points, 2.0 * eps),
        codec: Codec::new(points.len(), top + 2),
    };

    // Simplices of dimension 0..=top, level by level.
    let mut levels: Vec<Vec<Entry>> =
        vec![(0..points.len() as u32).map(|v| Entry { diam2: 0.0, key: nerve.codec.encode(&[v]) }).collect()];
    let mut stored = points.len();
    let mut verts = Vec::new();
    for k in 1..=top {
        let mut next = Vec::new();
        for e in &levels[k - 1] {
            nerve.codec.decode(e.key, k, &mut verts);
            nerve.cofacets(&verts, true, |c| next.push(c));
        }
        stored += next.len();
        if stored > MAX_STORED_SIMPLICES {
            return Err(NagError::SizeLimit {
                guard: "nerve simplices",
                predicted: stored as u128,
                limit: MAX_STORED_SIMPLICES as u128,
            });
        }
        next.sort_unstable();
        levels.push(next);
    }

    let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    let mut ranks = vec![0usize; top + 1];
    let (c, mut cleared) = if top >= 1 {
        spanning_forest(points.len(), &levels[1], &nerve.codec)
    } else {
        let mut edges = Vec::new();
        for v in 0..points.len() as u32 {
            nerve.cofacets(&[v], true, |e| edges.push(e));
        }
        edges.sort_unstable();
        spanning_forest(points.len(), &edges, &nerve.codec)
    };
    ranks[0] = points.len() - c;

    for k in 1..=top {
        let mut pivot_of: HashMap<u128, usize> = HashMap::new();
        let mut reductions: Vec<Vec<u128>> = Vec::new();
        let mut heap: BinaryHeap<Reverse<Entry>> = BinaryHeap::new();
        let push_coboundary = |key: u128, heap: &mut BinaryHeap<Reverse<Entry>>, verts: &mut Vec<u32>| {
            nerve.codec.decode(key, k + 1, verts);
            nerve.cofacets(verts, false, |e| heap.push(Reverse(e)));
        };
        let columns: Vec<Entry> = levels[k].iter().rev().filter(|c| !cleared.contains(&c.key)).copied().collect();
        // The unreduced pivot of each column, found in parallel; most columns keep it.
        let apparent: Vec<Option<Entry>> = columns
            .par_iter()
            .map_init(Vec::new, |verts, col| {
                nerve.codec.decode(col.key, k + 1, verts);
                nerve.min_cofacet(verts)
            })
            .collect();
        for (col, first) in columns.iter().zip(apparent) {
            let Some(first) = first else { continue };
            if !pivot_of.contains_key(&first.key) {
                pivot_of.insert(first.key, reductions.len());
                reductions.push(vec![col.key]);
                continue;
            }
            heap.clear();
            push_coboundary(col.key, &mut heap, &mut verts);
            let mut chain = vec![col.key];
            while let Some(p) = pop_pivot(&mut heap) {
                match pivot_of.get(&p.key) {
                    Some(&idx) => {
                        heap.push(Reverse(p));
                        for &s in &reductions[idx] {
                            push_coboundary(s, &mut heap, &mut verts);
                        }
                        chain.extend_from_slice(&reductions[idx]);
                    }
                    None => {
                        chain.sort_unstable();
                        let mut reduced = Vec::with_capacity(chain.len());
                        for s in chain.drain(..) {
                            if reduced.last() == Some(&s) {
                                reduced.pop();
                            } else {
                                reduced.push(s);
                            }
                        }
                        pivot_of.insert(p.key, reductions.len());
                        reductions.push(reduced);
                        break;
                    }
                }
            }
        }
        ranks[k] = pivot_of.len();
        cleared = pivot_of.into_keys().collect();
    }

    let betti = (0..=top).map(|k| counts[k] - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 }).collect();
    Ok(CechBetti { betti: BettiVector(betti), simplex_counts: counts, coboundary_ranks: ranks })
}
