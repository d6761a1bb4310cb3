//! Exact kernels of integer matrices by fraction-free elimination.
//!
//! Rows arrive one at a time and are reduced against the current echelon
//! form, so tall systems never need to be stored.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::{integerize, Q};

/// Row echelon form over `Z` built incrementally.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    /// `(pivot column, row)`; each row is zero in earlier pivot columns.
    pivots: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Reduce a row; returns true when it increased the rank.
    pub fn push(&mut self, mut row: Vec<BigInt>) -> bool {
        assert_eq!(row.len(), self.ncols);
        for (c, p) in &self.pivots {
            if row[*c].is_zero() {
                continue;
            }
            let (a, b) = (p[*c].clone(), row[*c].clone());
            for (x, y) in row.iter_mut().zip(p) {
                *x = &a * &*x - &b * y;
            }
            make_primitive(&mut row);
        }
        match row.iter().position(|x| !x.is_zero()) {
            Some(c) => {
                make_primitive(&mut row);
                self.pivots.push((c, row));
                true
            }
            None => false,
        }
    }

    pub fn push_rational(&mut self, row: &[Q]) -> bool {
        let (ints, _) = integerize(row);
        self.push(ints)
    }

    /// Kernel basis: one primitive integer vector per free column, whose first
    /// nonzero entry is positive.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let n = self.ncols;
        // Reduced row echelon form over Q.
        let mut rows: Vec<(usize, Vec<Q>)> =
            self.pivots.iter().map(|(c, r)| (*c, r.iter().map(|x| Q::from_integer(x.clone())).collect())).collect();
        rows.sort_by_key(|(c, _)| *c);
        for i in (0..rows.len()).rev() {
            let (c, _) = rows[i];
            let inv = Q::one() / &rows[i].1[c];
            for x in rows[i].1.iter_mut() {
                *x *= &inv;
            }
            let pivot_row = rows[i].1.clone();
            for (_, other) in rows.iter_mut().take(i) {
                let f = other[c].clone();
                if !f.is_zero() {
                    for (x, y) in other.iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        let pivot_cols: Vec<usize> = rows.iter().map(|(c, _)| *c).collect();
        (0..n)
            .filter(|c| !pivot_cols.contains(c))
            .map(|free| {
                let mut v = vec![Q::zero(); n];
                v[free] = Q::one();
                for (c, r) in &rows {
                    v[*c] = -r[free].clone();
                }
                let (mut ints, _) = integerize(&v);
                make_primitive(&mut ints);
                if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                    ints.iter_mut().for_each(|x| *x = -&*x);
                }
                ints
            })
            .collect()
    }
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}
