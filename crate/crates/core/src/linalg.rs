//! Gaussian elimination over a field: one solution of `A t = b`, right
//! kernels and rank.
//!
//! Pivoting is deterministic: for each column in order, the first row (at or
//! below the current pivot row) with a nonzero entry becomes the pivot.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Vector};
use crate::ring::Field;

/// Row echelon form restricted to the first `pivot_cols` columns. Returns
/// the pivot column of each pivot row; pivots are normalised to one.
fn eliminate<F: Field>(m: &mut Matrix<F>, pivot_cols: usize, reduced: bool) -> Vec<usize> {
    let ring = m.ring().clone();
    let (rows, cols) = (m.rows(), m.cols());
    let data = m.data_mut();
    let mut pivots = Vec::new();
    for c in 0..pivot_cols {
        let r = pivots.len();
        if r == rows {
            break;
        }
        let Some(found) = (r..rows).find(|&i| !ring.is_zero(&data[i * cols + c])) else {
            continue;
        };
        if found != r {
            for j in c..cols {
                data.swap(r * cols + j, found * cols + j);
            }
        }
        let inv = ring.inv(&data[r * cols + c]).expect("pivot is nonzero");
        for v in &mut data[r * cols + c..(r + 1) * cols] {
            *v = ring.mul(&inv, v);
        }
        let (head, tail) = data.split_at_mut(r * cols);
        let (pivot_row, below) = tail.split_at_mut(cols);
        let pivot_tail = &pivot_row[c..];
        for row in below.chunks_exact_mut(cols) {
            if !ring.is_zero(&row[c]) {
                let factor = ring.neg(&row[c]);
                ring.axpy(&mut row[c..], &factor, pivot_tail);
            }
        }
        if reduced {
            for row in head.chunks_exact_mut(cols) {
                if !ring.is_zero(&row[c]) {
                    let factor = ring.neg(&row[c]);
                    ring.axpy(&mut row[c..], &factor, pivot_tail);
                }
            }
        }
        pivots.push(c);
    }
    pivots
}

/// One solution of `A t = b`, with every free variable set to zero.
pub fn solve_linear<F: Field>(a: &Matrix<F>, b: &Vector<F>) -> Result<Vector<F>> {
    if a.ring() != b.ring() {
        return Err(Error::Incompatible("matrix and right-hand side".into()));
    }
    if a.rows() != b.len() {
        return Err(Error::Shape(format!(
            "{}x{} system with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let ring = a.ring().clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut aug = Matrix::from_fn(ring.clone(), rows, cols + 1, |i, j| {
        if j < cols {
            a.get(i, j).clone()
        } else {
            b.get(i).clone()
        }
    });
    let pivots = eliminate(&mut aug, cols, false);
    if (pivots.len()..rows).any(|i| !ring.is_zero(aug.get(i, cols))) {
        return Err(Error::NoSolution);
    }
    let mut t = vec![ring.zero(); cols];
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let row = aug.row(i);
        let acc = ring.dot(&row[pc + 1..cols], &t[pc + 1..]);
        t[pc] = ring.sub(&row[cols], &acc);
    }
    Ok(Vector::from_raw(ring, t))
}

/// Basis of the right null space, one vector per free column.
pub fn kernel_basis<F: Field>(a: &Matrix<F>) -> Vec<Vector<F>> {
    let ring = a.ring().clone();
    let cols = a.cols();
    let mut r = a.clone();
    let pivots = eliminate(&mut r, cols, true);
    let mut is_pivot = vec![false; cols];
    for &pc in &pivots {
        is_pivot[pc] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut u = vec![ring.zero(); cols];
            u[f] = ring.one();
            for (i, &pc) in pivots.iter().enumerate() {
                u[pc] = ring.neg(r.get(i, f));
            }
            Vector::from_raw(ring.clone(), u)
        })
        .collect()
}

pub fn rank<F: Field>(a: &Matrix<F>) -> usize {
    let mut r = a.clone();
    let cols = r.cols();
    eliminate(&mut r, cols, false).len()
}
