// SPDX-License-Identifier: Apache-2.0

//! Dense linear algebra over F_p: rank, right kernel, nullity.
//!
//! Matrices here stay below a few thousand rows, so everything is a plain
//! row-major `Vec<u64>` and elimination always works on a private copy.

use crate::error::{Error, Result};
use crate::field::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatFp {
    rows: usize,
    cols: usize,
    field: PrimeField,
    data: Vec<u64>,
}

impl MatFp {
    pub fn zeros(rows: usize, cols: usize, field: PrimeField) -> Self {
        MatFp {
            rows,
            cols,
            field,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        let mut m = MatFp::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry mod p.
    pub fn from_rows_i64(rows: &[Vec<i64>], field: PrimeField) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| field.from_i64(v))).collect();
        Ok(MatFp {
            rows: rows.len(),
            cols,
            field,
            data,
        })
    }

    pub fn from_rows(rows: &[Vec<u64>], field: PrimeField) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let p = field.modulus();
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| v % p)).collect();
        Ok(MatFp {
            rows: rows.len(),
            cols,
            field,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        let p = self.field.modulus();
        self.data[r * self.cols + c] = v % p;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(0, |acc, (&a, &b)| f.mul_add(acc, a, b)))
            .collect())
    }

    /// Reduced row echelon form of a copy; returns it with its pivot columns.
    pub fn rref(&self) -> (MatFp, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(true);
        (m, pivots)
    }

    /// In-place Gaussian elimination. Pivot choice is the first nonzero entry
    /// in the column. With `reduce` set, entries above each pivot are cleared
    /// too (full RREF); otherwise only below.
    fn eliminate(&mut self, reduce: bool) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..cols {
            if prow == self.rows {
                break;
            }
            let Some(sel) = (prow..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if sel != prow {
                for j in c..cols {
                    self.data.swap(sel * cols + j, prow * cols + j);
                }
            }
            let inv = f.inv(self.data[prow * cols + c]);
            for j in c..cols {
                let x = self.data[prow * cols + j];
                self.data[prow * cols + j] = f.mul(x, inv);
            }
            let (head, tail) = self.data.split_at_mut(prow * cols);
            let (pivot_row, below) = tail.split_at_mut(cols);
            let clear = |row: &mut [u64]| {
                let factor = row[c];
                if factor != 0 {
                    for j in c..cols {
                        row[j] = f.mul_sub(row[j], factor, pivot_row[j]);
                    }
                }
            };
            for row in below.chunks_mut(cols) {
                clear(row);
            }
            if reduce {
                for row in head.chunks_mut(cols) {
                    clear(row);
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut m = self.clone();
        m.eliminate(false).len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the right null space `{v : Mv = 0}`.
    ///
    /// The returned vectors form the rows of a matrix in reduced row echelon
    /// form: each has leading coordinate 1, and no other returned vector is
    /// nonzero at that coordinate.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let raw: Vec<Vec<u64>> = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u64; self.cols];
                v[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(i, free));
                }
                v
            })
            .collect();
        if raw.is_empty() {
            return raw;
        }
        let k = MatFp::from_rows(&raw, f).expect("rectangular by construction");
        let (kr, kp) = k.rref();
        (0..kp.len()).map(|i| kr.row(i).to_vec()).collect()
    }
}
