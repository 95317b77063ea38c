//! Monomial bases of fixed degree in graded-lex (lexicographically descending) order.
//!
//! The first monomial of degree `d` is `X_0^d`, the last is `X_n^d`.

/// Binomial coefficient as `f64`; exact while the value fits in 53 bits.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Exact binomial coefficient in `u128`; panics on overflow (desk-scale inputs never get close).
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Multinomial coefficient `d! / prod(alpha_i!)` with `d = |alpha|`.
pub fn multinomial(alpha: &[u32]) -> f64 {
    let mut acc = 1.0f64;
    let mut total = 0u64;
    for &a in alpha {
        for j in 1..=a as u64 {
            total += 1;
            acc = acc * total as f64 / j as f64;
        }
    }
    acc.round()
}

/// Number of monomials of degree `degree` in `nvars` variables.
pub fn basis_len(nvars: usize, degree: u32) -> usize {
    if nvars == 0 {
        return usize::from(degree == 0);
    }
    binomial_u128(nvars as u64 - 1 + degree as u64, degree as u64) as usize
}

/// All exponent vectors of a fixed degree, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    nvars: usize,
    degree: u32,
    exps: Vec<u32>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: u32) -> Self {
        assert!(nvars >= 1, "a monomial basis needs at least one variable");
        let len = basis_len(nvars, degree);
        let mut exps = Vec::with_capacity(len * nvars);
        let mut cur = vec![0u32; nvars];
        fill(&mut exps, &mut cur, 0, degree);
        debug_assert_eq!(exps.len(), len * nvars);
        MonomialBasis { nvars, degree, exps }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len() / self.nvars
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, i: usize) -> &[u32] {
        &self.exps[i * self.nvars..(i + 1) * self.nvars]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.exps.chunks_exact(self.nvars)
    }

    /// Position of `alpha` in this basis, or `None` if it has the wrong length or degree.
    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        if alpha.len() != self.nvars || alpha.iter().sum::<u32>() != self.degree {
            return None;
        }
        Some(rank(alpha, self.degree))
    }
}

fn fill(out: &mut Vec<u32>, cur: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.extend_from_slice(cur);
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill(out, cur, pos + 1, remaining - a);
    }
    cur[pos] = 0;
}

/// Closed-form rank in lexicographically descending order.
///
/// Monomials sharing the prefix `alpha_0..alpha_{j-1}` but with a larger `alpha_j` number
/// `C(r_j - alpha_j + m - j - 2, m - j - 1)` where `r_j` is the degree left at position `j`.
fn rank(alpha: &[u32], degree: u32) -> usize {
    let m = alpha.len();
    let mut remaining = degree as u64;
    let mut r = 0u128;
    for (j, &a) in alpha.iter().enumerate().take(m.saturating_sub(1)) {
        let a = a as u64;
        let parts = (m - j - 1) as u64;
        if remaining > a {
            r += binomial_u128(remaining - a + parts - 1, parts);
        }
        remaining -= a;
    }
    r as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_starts_with_pure_powers() {
        let b = MonomialBasis::new(3, 2);
        assert_eq!(b.len(), 6);
        assert_eq!(b.exponent(0), &[2, 0, 0]);
        assert_eq!(b.exponent(1), &[1, 1, 0]);
        assert_eq!(b.exponent(5), &[0, 0, 2]);
    }

    #[test]
    fn rank_inverts_enumeration() {
        for nvars in 1..=5 {
            for d in 0..=6 {
                let b = MonomialBasis::new(nvars, d);
                assert_eq!(b.len(), basis_len(nvars, d));
                for (i, a) in b.iter().enumerate() {
                    assert_eq!(b.index_of(a), Some(i));
                }
            }
        }
    }

    #[test]
    fn wrong_degree_has_no_index() {
        let b = MonomialBasis::new(2, 3);
        assert_eq!(b.index_of(&[1, 1]), None);
        assert_eq!(b.index_of(&[1, 1, 1]), None);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[1, 1]), 2.0);
        assert_eq!(multinomial(&[2, 1, 1]), 12.0);
        assert_eq!(multinomial(&[6]), 1.0);
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial_u128(60, 30), 118264581564861424);
    }
}
