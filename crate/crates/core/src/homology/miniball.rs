//! Smallest enclosing balls of small point sets (Welzl's recursion).
//!
//! The sets handled here are simplices of a nerve, so they have at most `dim + 2` points and
//! the recursion is cheap. Inclusion tests carry a relative slack so that cospherical
//! configurations, common on symmetric nets, never ask for a circumball of an affinely
//! dependent support set.

const INCLUSION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    /// `-1` marks the empty ball.
    pub radius: f64,
}

impl Ball {
    pub fn empty() -> Self {
        Ball { center: Vec::new(), radius: -1.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.radius < 0.0
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if self.is_empty() {
            return false;
        }
        let d2: f64 = self.center.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
        d2.sqrt() <= self.radius * (1.0 + INCLUSION_SLACK) + 1e-15
    }
}

/// Ball through `pts` with center in their affine hull; `None` when the points are affinely
/// dependent (numerically).
pub fn circumball(pts: &[&[f64]]) -> Option<Ball> {
    let Some(p0) = pts.first() else {
        return Some(Ball::empty());
    };
    let m = p0.len();
    let k = pts.len() - 1;
    if k == 0 {
        return Some(Ball { center: p0.to_vec(), radius: 0.0 });
    }
    if k > m {
        return None;
    }
    let rows: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(p0.iter()).map(|(a, b)| a - b).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // Gram system G λ = b with b_i = |a_i|²/2, solved by Gaussian elimination with pivoting.
    let mut g = vec![0.0; k * (k + 1)];
    let mut scale = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            g[i * (k + 1) + j] = dot(&rows[i], &rows[j]);
        }
        g[i * (k + 1) + k] = 0.5 * g[i * (k + 1) + i];
        scale = scale.max(g[i * (k + 1) + i]);
    }
    let w = k + 1;
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| g[a * w + col].abs().total_cmp(&g[b * w + col].abs()))?;
        if g[piv * w + col].abs() <= 1e-12 * scale {
            return None;
        }
        if piv != col {
            for j in 0..w {
                g.swap(piv * w + j, col * w + j);
            }
        }
        for r in 0..k {
            if r != col {
                let f = g[r * w + col] / g[col * w + col];
                if f != 0.0 {
                    for j in col..w {
                        g[r * w + j] -= f * g[col * w + j];
                    }
                }
            }
        }
    }
    let mut center = p0.to_vec();
    for (i, row) in rows.iter().enumerate() {
        let lambda = g[i * w + k] / g[i * w + i];
        for (c, a) in center.iter_mut().zip(row) {
            *c += lambda * a;
        }
    }
    let radius = pts
        .iter()
        .map(|p| p.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Some(Ball { center, radius })
}

fn welzl(pts: &[&[f64]], n: usize, boundary: &mut Vec<usize>, dim: usize) -> Option<Ball> {
    if n == 0 || boundary.len() == dim + 1 {
        let r: Vec<&[f64]> = boundary.iter().map(|&i| pts[i]).collect();
        return circumball(&r);
    }
    let ball = welzl(pts, n - 1, boundary, dim)?;
    if ball.contains(pts[n - 1]) {
        return Some(ball);
    }
    boundary.push(n - 1);
    let out = welzl(pts, n - 1, boundary, dim);
    boundary.pop();
    out
}

/// Fallback: the smallest circumball of a support subset that encloses every point.
fn by_enumeration(pts: &[&[f64]]) -> Ball {
    let k = pts.len();
    let mut best = Ball { center: Vec::new(), radius: f64::INFINITY };
    for mask in 1u32..(1 << k) {
        let sub: Vec<&[f64]> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| pts[i]).collect();
        if let Some(b) = circumball(&sub) {
            if b.radius < best.radius && pts.iter().all(|p| b.contains(p)) {
                best = b;
            }
        }
    }
    best
}

/// Smallest enclosing ball of a few points.
pub fn miniball(pts: &[&[f64]]) -> Ball {
    if pts.is_empty() {
        return Ball::empty();
    }
    let dim = pts[0].len();
    welzl(pts, pts.len(), &mut Vec::new(), dim).unwrap_or_else(|| by_enumeration(pts))
}

/// Size bound (points and ambient dimension) of the allocation-free path.
const FAST: usize = 8;

type Center = [f64; FAST];

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn fast_contains(center: &Center, radius: f64, p: &[f64]) -> bool {
    radius >= 0.0 && dist2(&center[..p.len()], p).sqrt() <= radius * (1.0 + INCLUSION_SLACK) + 1e-15
}

/// Same construction as [`circumball`] on stack storage.
fn fast_circumball(pts: &[&[f64]], support: &[usize], dim: usize) -> Option<(Center, f64)> {
    let mut center = [0.0; FAST];
    let Some(&i0) = support.first() else {
        return Some((center, -1.0));
    };
    let p0 = pts[i0];
    center[..dim].copy_from_slice(p0);
    let k = support.len() - 1;
    if k == 0 {
        return Some((center, 0.0));
    }
    if k > dim {
        return None;
    }
    let mut rows = [[0.0; FAST]; FAST];
    for (r, &i) in rows.iter_mut().zip(&support[1..]) {
        for j in 0..dim {
            r[j] = pts[i][j] - p0[j];
        }
    }
    let w = k + 1;
    let mut g = [[0.0; FAST + 1]; FAST];
    let mut scale = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            g[i][j] = rows[i][..dim].iter().zip(&rows[j][..dim]).map(|(a, b)| a * b).sum();
        }
        g[i][k] = 0.5 * g[i][i];
        scale = scale.max(g[i][i]);
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))?;
        if g[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        g.swap(piv, col);
        for r in 0..k {
            if r != col {
                let f = g[r][col] / g[col][col];
                if f != 0.0 {
                    for j in col..w {
                        g[r][j] -= f * g[col][j];
                    }
                }
            }
        }
    }
    for i in 0..k {
        let lambda = g[i][k] / g[i][i];
        for j in 0..dim {
            center[j] += lambda * rows[i][j];
        }
    }
    let radius = support.iter().map(|&i| dist2(&center[..dim], pts[i]).sqrt()).fold(0.0, f64::max);
    Some((center, radius))
}

fn fast_welzl(pts: &[&[f64]], n: usize, boundary: &mut [usize; FAST], blen: usize, dim: usize) -> Option<(Center, f64)> {
    if n == 0 || blen == dim + 1 {
        return fast_circumball(pts, &boundary[..blen], dim);
    }
    let (c, r) = fast_welzl(pts, n - 1, boundary, blen, dim)?;
    if fast_contains(&c, r, pts[n - 1]) {
        return Some((c, r));
    }
    boundary[blen] = n - 1;
    fast_welzl(pts, n - 1, boundary, blen + 1, dim)
}

/// Radius of [`miniball`], without heap allocation for small inputs. Deterministic in the
/// order of `pts`.
pub fn miniball_radius(pts: &[&[f64]]) -> f64 {
    let Some(first) = pts.first() else {
        return -1.0;
    };
    let dim = first.len();
    if pts.len() <= FAST && dim < FAST {
        if let Some((_, r)) = fast_welzl(pts, pts.len(), &mut [0; FAST], 0, dim) {
            return r;
        }
    }
    miniball(pts).radius
}

/// Smallest enclosing ball of `base ∪ {extra}` given the ball of `base`.
pub fn extend(base_pts: &[&[f64]], base: &Ball, extra: &[f64]) -> Ball {
    if base.contains(extra) {
        return base.clone();
    }
    let mut all: Vec<&[f64]> = base_pts.to_vec();
    all.push(extra);
    let dim = extra.len();
    let last = all.len() - 1;
    let mut boundary = vec![last];
    welzl(&all, last, &mut boundary, dim).unwrap_or_else(|| by_enumeration(&all))
}
