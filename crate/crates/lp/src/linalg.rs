//! Exact Gaussian elimination helpers.

use num_traits::Zero;

use crate::Rational;

/// Incremental row-echelon basis of a set of vectors of equal length.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    /// Reduced vectors, each normalised to 1 at its pivot.
    rows: Vec<(usize, Vec<Rational>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let reduced = self.reduce(v);
        let Some(pivot) = reduced.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = reduced[pivot].recip();
        let row: Vec<Rational> = reduced.into_iter().map(|x| x * &inv).collect();
        // Keep existing rows reduced at the new pivot so `reduce` is one pass.
        for (_, other) in self.rows.iter_mut() {
            if other[pivot].is_zero() {
                continue;
            }
            let factor = other[pivot].clone();
            for (x, r) in other.iter_mut().zip(&row) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
        }
        self.rows.push((pivot, row));
        true
    }
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(vectors: &[Vec<Rational>]) -> Vec<usize> {
    let mut basis = EchelonBasis::new();
    vectors
        .iter()
        .enumerate()
        .filter_map(|(i, v)| basis.insert(v).then_some(i))
        .collect()
}

pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    independent_subset(vectors).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn greedy_basis_skips_dependent_vectors() {
        let vs = vec![v(&[1, 2, 0]), v(&[2, 4, 0]), v(&[0, 1, 1]), v(&[1, 3, 1])];
        assert_eq!(independent_subset(&vs), vec![0, 2]);
        assert_eq!(rank(&vs), 2);
    }

    #[test]
    fn span_membership() {
        let mut b = EchelonBasis::new();
        b.insert(&v(&[1, 1, 0]));
        b.insert(&v(&[0, 1, 1]));
        assert!(b.contains(&v(&[1, 0, -1])));
        assert!(!b.contains(&v(&[0, 0, 1])));
        assert!(b.contains(&v(&[0, 0, 0])));
    }
}
