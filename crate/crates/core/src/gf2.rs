//! Dense linear algebra over GF(2).
//!
//! Row vectors multiply matrices from the left (`b · A`), matching the way
//! generator matrices and labeling rules are written throughout the crate.
//! Component `b_0` is the leftmost entry of a vector and the lowest bit-channel
//! index.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

const WORD: usize = 64;

/// A dense binary matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    /// All-zero `rows x cols` matrix.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let stride = cols.div_ceil(WORD);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix entrywise.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of `0`/`1` entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.is_empty() || cols == 0 {
            return Err(Error::DimensionMismatch("matrix must be non-empty"));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows"));
            }
            for (c, &bit) in row.iter().enumerate() {
                match bit {
                    0 => {}
                    1 => m.set(r, c, true),
                    _ => return Err(Error::InvalidParameter("entries must be 0 or 1")),
                }
            }
        }
        Ok(m)
    }

    /// Permutation matrix sending component `i` of a row vector to position `map(i)`.
    ///
    /// `map` must be a bijection on `0..n`.
    pub fn permutation(n: usize, map: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, map(i), true);
        }
        debug_assert!(m.is_permutation());
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at `(r, c)`.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.words[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    /// Sets the entry at `(r, c)`.
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Row `r` as `0`/`1` bytes.
    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| u8::from(self.get(r, c))).collect()
    }

    /// All rows as `0`/`1` bytes.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_row_into(dst: &mut [u64], src: &[u64]) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d ^= s;
        }
    }

    /// Whether the matrix is square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Exactly one `1` in every row and every column.
    pub fn is_permutation(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let mut col_seen = vec![false; self.cols];
        for r in 0..self.rows {
            let mut ones = 0;
            for c in 0..self.cols {
                if self.get(r, c) {
                    ones += 1;
                    if col_seen[c] {
                        return false;
                    }
                    col_seen[c] = true;
                }
            }
            if ones != 1 {
                return false;
            }
        }
        true
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                if !self.get(ar, ac) {
                    continue;
                }
                for br in 0..other.rows {
                    for bc in 0..other.cols {
                        if other.get(br, bc) {
                            out.set(ar * other.rows + br, ac * other.cols + bc, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("inner dimensions of product differ"));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = vec![0u64; other.stride];
            for k in 0..self.cols {
                if self.get(r, k) {
                    Self::xor_row_into(&mut acc, other.row_words(k));
                }
            }
            out.words[r * out.stride..(r + 1) * out.stride].copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn vec_mul(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut acc = vec![0u64; self.stride];
        for (k, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                Self::xor_row_into(&mut acc, self.row_words(k));
            }
        }
        Ok((0..self.cols)
            .map(|c| ((acc[c / WORD] >> (c % WORD)) & 1) as u8)
            .collect())
    }

    /// Transpose.
    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Inverse over GF(2) by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        let stride = a.stride;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col)).ok_or(Error::Singular)?;
            if pivot != col {
                for w in 0..stride {
                    a.words.swap(pivot * stride + w, col * stride + w);
                    inv.words.swap(pivot * stride + w, col * stride + w);
                }
            }
            let a_pivot: Vec<u64> = a.row_words(col).to_vec();
            let inv_pivot: Vec<u64> = inv.row_words(col).to_vec();
            for r in 0..n {
                if r != col && a.get(r, col) {
                    Self::xor_row_into(&mut a.words[r * stride..(r + 1) * stride], &a_pivot);
                    Self::xor_row_into(&mut inv.words[r * stride..(r + 1) * stride], &inv_pivot);
                }
            }
        }
        Ok(inv)
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let stride = a.stride;
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| a.get(r, col)) else {
                continue;
            };
            if pivot != rank {
                for w in 0..stride {
                    a.words.swap(pivot * stride + w, rank * stride + w);
                }
            }
            let p: Vec<u64> = a.row_words(rank).to_vec();
            for r in rank + 1..self.rows {
                if a.get(r, col) {
                    Self::xor_row_into(&mut a.words[r * stride..(r + 1) * stride], &p);
                }
            }
            rank += 1;
        }
        rank
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

/// Rows of `0`/`1` characters separated by newlines (no trailing newline).
impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut line = String::with_capacity(self.cols);
        for r in 0..self.rows {
            line.clear();
            for c in 0..self.cols {
                line.push(if self.get(r, c) { '1' } else { '0' });
            }
            if r + 1 < self.rows {
                writeln!(f, "{line}")?;
            } else {
                write!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

/// Reverses the lowest `bits` bits of `i`.
#[inline]
pub fn reverse_bits(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `log2(n)` for a power of two.
pub fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::NotPowerOfTwo(n))
    } else {
        Ok(n.trailing_zeros())
    }
}

/// The bit-reversal permutation `B_n`.
pub fn bit_reversal(n: usize) -> Result<BitMatrix> {
    let k = log2_exact(n)?;
    Ok(BitMatrix::permutation(n, |i| reverse_bits(i, k)))
}

/// The stride permutation `P_{k1,k2}`: component `k2·i + j` moves to position `i + k1·j`.
pub fn stride_permutation(k1: usize, k2: usize) -> BitMatrix {
    assert!(k1 > 0 && k2 > 0);
    BitMatrix::permutation(k1 * k2, |idx| {
        let (i, j) = (idx / k2, idx % k2);
        i + k1 * j
    })
}

/// The polarization kernel `F_2 = [[1,0],[1,1]]`.
pub fn kernel() -> BitMatrix {
    BitMatrix::from_fn(2, 2, |r, c| r >= c)
}

/// `F_N`, the `n_exp`-fold Kronecker power of `F_2` (`F_1 = I_1`).
pub fn kernel_power(n_exp: u32) -> BitMatrix {
    let f2 = kernel();
    let mut out = BitMatrix::identity(1);
    for _ in 0..n_exp {
        out = f2.kron(&out);
    }
    out
}

/// The polar generator `G_N = B_N · F_N` for `N = 2^n_exp`.
pub fn polar_generator(n_exp: u32) -> BitMatrix {
    let n = 1usize << n_exp;
    let b = bit_reversal(n).expect("power of two");
    b.mul(&kernel_power(n_exp)).expect("square operands")
}
