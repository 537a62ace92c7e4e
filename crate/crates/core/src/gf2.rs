//! Dense linear algebra over GF(2).
//!
//! Rows are packed into `u64` words so that row reduction is a word-level
//! XOR. Sizes met in practice are a few thousand cells per object complex.

use alloc::vec;
use alloc::vec::Vec;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A bit vector with XOR addition.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Gf2Vector { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Vector with ones at the given indices (repeated indices cancel).
    pub fn from_support(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// In-place addition over GF(2).
    pub fn xor_assign(&mut self, other: &Gf2Vector) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Gf2Vector) -> Gf2Vector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the overlap with `other`.
    pub fn dot(&self, other: &Gf2Vector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }
}

impl core::fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense `rows x cols` matrix over GF(2), stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf2Vector>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix { rows, cols, data: vec![Gf2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row-major `0/1` entries.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v & 1 == 1);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Gf2Vector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for r in col.ones() {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &Gf2Vector {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> Gf2Vector {
        let mut v = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &Gf2Vector) -> Gf2Vector {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        let mut out = Gf2Vector::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.dot(x) {
                out.set(r, true);
            }
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Gf2Vector::is_zero)
    }

    /// Rank by Gaussian elimination with first-nonzero pivoting.
    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Some `x` with `self * x = b`, or `None` when `b` is outside the column span.
    ///
    /// Free variables are set to zero.
    pub fn solve(&self, b: &Gf2Vector) -> Option<Gf2Vector> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        // Augment each row with the matching entry of b in an extra column.
        let mut rows: Vec<Gf2Vector> = Vec::with_capacity(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            let mut aug = Gf2Vector::zeros(self.cols + 1);
            for c in row.ones() {
                aug.set(c, true);
            }
            aug.set(self.cols, b.get(r));
            rows.push(aug);
        }
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        // A zero row with a nonzero right-hand side means no solution.
        if rows[rank..].iter().any(|row| row.get(self.cols)) {
            return None;
        }
        let mut x = Gf2Vector::zeros(self.cols);
        for (r, &col) in pivots.iter().enumerate() {
            if rows[r].get(self.cols) {
                x.set(col, true);
            }
        }
        Some(x)
    }

    pub fn in_column_span(&self, b: &Gf2Vector) -> bool {
        self.solve(b).is_some()
    }
}

impl core::fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}
