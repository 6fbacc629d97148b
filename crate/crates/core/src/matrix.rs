//! Dense row-major matrices and vectors over any [`Ring`].

use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<R: Ring> {
    ring: R,
    rows: usize,
    cols: usize,
    data: Vec<R::Elem>,
}

fn same_ring<R: Ring>(a: &R, b: &R) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Incompatible(format!("{a:?} vs {b:?}")))
    }
}

impl<R: Ring> Matrix<R> {
    pub fn new(ring: R, rows: usize, cols: usize, data: Vec<R::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|e| !ring.contains(e)) {
            return Err(Error::InvalidInput(format!("{bad:?} is not an element of the ring")));
        }
        Ok(Matrix { ring, rows, cols, data })
    }

    pub fn from_rows(ring: R, rows: Vec<Vec<R::Elem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(ring, r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(ring: R, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ring, rows, cols, data }
    }

    pub fn zeros(ring: R, rows: usize, cols: usize) -> Self {
        let z = ring.zero();
        Matrix {
            data: vec![z; rows * cols],
            ring,
            rows,
            cols,
        }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let (zero, one) = (ring.zero(), ring.one());
        Self::from_fn(ring, n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn random<G: rand::Rng + ?Sized>(ring: R, rows: usize, cols: usize, rng: &mut G) -> Self {
        let data = (0..rows * cols).map(|_| ring.sample(rng)).collect();
        Matrix { ring, rows, cols, data }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[R::Elem] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [R::Elem] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<R::Elem> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<R::Elem>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[_]>::to_vec)
            .take(self.rows)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.ring.is_zero(e))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R::Elem, &R::Elem) -> R::Elem) -> Result<Self> {
        same_ring(&self.ring, &other.ring)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.ring.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        self.map(|e| self.ring.neg(e))
    }

    /// Left scalar multiple `s * A`.
    pub fn scalar_mul(&self, s: &R::Elem) -> Self {
        self.map(|e| self.ring.mul(s, e))
    }

    pub fn map(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring.clone(), self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_ring(&self.ring, &other.ring)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rhs_t = other.transpose();
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..other.cols {
                data.push(self.ring.dot(row, rhs_t.row(j)));
            }
        }
        Ok(Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn mul_vector(&self, v: &Vector<R>) -> Result<Vector<R>> {
        same_ring(&self.ring, &v.ring)?;
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let data = (0..self.rows).map(|i| self.ring.dot(self.row(i), &v.data)).collect();
        Ok(Vector {
            ring: self.ring.clone(),
            data,
        })
    }

    /// `A^e` by square-and-multiply; `A^0 = I`.
    pub fn pow(&self, mut e: u64) -> Result<Self> {
        self.require_square()?;
        let mut acc = Self::identity(self.ring.clone(), self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `[I, A, A^2, ..., A^(count-1)]`.
    pub fn powers(&self, count: usize) -> Result<Vec<Self>> {
        self.require_square()?;
        let mut out = Vec::with_capacity(count);
        let mut cur = Self::identity(self.ring.clone(), self.rows);
        for i in 0..count {
            if i + 1 < count {
                let next = cur.mul(self)?;
                out.push(cur);
                cur = next;
            } else {
                out.push(cur.clone());
            }
        }
        Ok(out)
    }

    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        Self::from_fn(self.ring.clone(), h, w, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }
}

/// A column vector over a ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vector<R: Ring> {
    ring: R,
    data: Vec<R::Elem>,
}

impl<R: Ring> Vector<R> {
    pub fn new(ring: R, data: Vec<R::Elem>) -> Result<Self> {
        if let Some(bad) = data.iter().find(|e| !ring.contains(e)) {
            return Err(Error::InvalidInput(format!("{bad:?} is not an element of the ring")));
        }
        Ok(Vector { ring, data })
    }

    pub(crate) fn from_raw(ring: R, data: Vec<R::Elem>) -> Self {
        Vector { ring, data }
    }

    pub fn zeros(ring: R, len: usize) -> Self {
        let z = ring.zero();
        Vector {
            data: vec![z; len],
            ring,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &R::Elem {
        &self.data[i]
    }

    pub fn data(&self) -> &[R::Elem] {
        &self.data
    }

    pub fn into_data(self) -> Vec<R::Elem> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.ring.is_zero(e))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.ring.sub(a, b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R::Elem, &R::Elem) -> R::Elem) -> Result<Self> {
        same_ring(&self.ring, &other.ring)?;
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Vector {
            ring: self.ring.clone(),
            data,
        })
    }
}
