//! Dense linear algebra over F2.
//!
//! Bits are packed little-endian into `u64` words; bit `k` of a vector lives
//! in word `k / 64` at position `k % 64`. The packing never leaks into any
//! external format: text forms use one `'0'`/`'1'` character per bit.

use std::fmt;

use num::{BigUint, One};
use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for k in 0..len {
            v.set(k, true);
        }
        v
    }

    /// Unit vector `e_k`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(k, true);
        v
    }

    /// Builds a vector from the low `len` bits of `value` (bit `k` of the
    /// integer becomes entry `k`).
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD {
                u64::MAX
            } else {
                (1u64 << len) - 1
            };
            v.words[0] = value & mask;
        }
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Parses a string of `'0'`/`'1'` characters; character `k` is entry `k`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = Self::zeros(s.len());
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(k, true),
                other => return Err(Error::Parse(format!("unexpected bit character {other:?}"))),
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.len, "bit index {k} out of range {}", self.len);
        (self.words[k / WORD] >> (k % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize, bit: bool) {
        assert!(k < self.len, "bit index {k} out of range {}", self.len);
        let mask = 1u64 << (k % WORD);
        if bit {
            self.words[k / WORD] |= mask;
        } else {
            self.words[k / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, k: usize) {
        assert!(k < self.len, "bit index {k} out of range {}", self.len);
        self.words[k / WORD] ^= 1u64 << (k % WORD);
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    /// In-place XOR. Panics on length mismatch.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |k| self.get(k))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * WORD + t)
                }
            })
        })
    }

    /// Entries as an integer (entry `k` becomes bit `k`). Only for `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "to_u64 on a vector longer than 64 bits");
        self.words.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// A dense row-major matrix over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|k| BitVector::unit(n, k)).collect(),
        }
    }

    /// Assembles a matrix from rows, which must all share `cols` as length.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Parses the text format: one row per line, `'0'`/`'1'` characters.
    /// Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(BitVector::parse)
            .collect::<Result<Vec<_>>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(cols, rows)
    }

    /// Text format: one row per line, newline terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * (self.cols + 1));
        for r in &self.rows {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        self.rows[i].set(j, bit)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bits(self.rows.iter().map(|r| r.get(j)))
    }

    pub fn transpose(&self) -> Gf2Matrix {
        Gf2Matrix {
            cols: self.rows.len(),
            rows: (0..self.cols).map(|j| self.column(j)).collect(),
        }
    }

    /// New matrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Gf2Matrix {
        let rows = self
            .rows
            .iter()
            .map(|r| BitVector::from_bits(cols.iter().map(|&c| r.get(c))))
            .collect();
        Gf2Matrix {
            cols: cols.len(),
            rows,
        }
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok(BitVector::from_bits(self.rows.iter().map(|r| r.dot(x))))
    }

    /// `u · self` for a row vector `u`.
    pub fn vec_mul(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                got: u.len(),
            });
        }
        let mut acc = BitVector::zeros(self.cols);
        for i in u.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        Ok(acc)
    }

    /// Reduced row echelon form together with the pivot column of each
    /// nonzero row. Zero rows are kept at the bottom.
    pub fn rref_with_pivots(&self) -> (Gf2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..m.cols {
            if next == m.rows.len() {
                break;
            }
            let Some(p) = (next..m.rows.len()).find(|&r| m.rows[r].get(col)) else {
                continue;
            };
            m.rows.swap(next, p);
            let pivot_row = m.rows[next].clone();
            for (r, row) in m.rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> Gf2Matrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Row-reduced basis of the row space: the nonzero rows of the RREF.
    pub fn row_basis(&self) -> Gf2Matrix {
        let (mut m, pivots) = self.rref_with_pivots();
        m.rows.truncate(pivots.len());
        m
    }

    /// True iff `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let (basis, pivots) = self.rref_with_pivots();
        let mut rest = v.clone();
        for (row, &p) in basis.rows.iter().zip(&pivots) {
            if rest.get(p) {
                rest.xor_assign(row);
            }
        }
        Ok(rest.is_zero())
    }

    /// Basis of the right kernel `{x : self · x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<BitVector> {
        let (basis, pivots) = self.rref_with_pivots();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = BitVector::unit(self.cols, free);
                for (row, &p) in basis.rows.iter().zip(&pivots) {
                    if row.get(free) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows.len() == self.cols && self.rank() == self.cols
    }

    /// Row-space equality, independent of the chosen basis.
    pub fn same_row_space(&self, other: &Gf2Matrix) -> bool {
        self.cols == other.cols && self.row_basis() == other.row_basis()
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows.len(), self.cols)?;
        f.write_str(&self.to_text())
    }
}

pub fn rank(m: &Gf2Matrix) -> usize {
    m.rank()
}

pub fn solve_membership(m: &Gf2Matrix, v: &BitVector) -> Result<bool> {
    m.row_space_contains(v)
}

/// Number of `d`-dimensional subspaces of F2^m.
pub fn gaussian_binomial(m: usize, d: usize) -> Result<BigUint> {
    if d > m {
        return Err(Error::invalid(format!(
            "subspace dimension {d} exceeds ambient {m}"
        )));
    }
    let two = BigUint::from(2u32);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        num *= two.pow((m - i) as u32) - 1u32;
        den *= two.pow((d - i) as u32) - 1u32;
    }
    Ok(num / den)
}

/// Uniformly random `d x m` matrix over F2.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Gf2Matrix {
    let rows = (0..rows)
        .map(|_| BitVector::from_bits((0..cols).map(|_| rng.gen::<bool>())))
        .collect();
    Gf2Matrix { cols, rows }
}

/// Basis (`d x m`, full rank) of a uniformly random `d`-dimensional subspace
/// of F2^m. Rejection-samples full-rank matrices; every subspace has the same
/// number of ordered bases, so the induced law on subspaces is uniform.
pub fn random_subspace<R: Rng + ?Sized>(m: usize, d: usize, rng: &mut R) -> Result<Gf2Matrix> {
    if d == 0 || d > m {
        return Err(Error::invalid(format!(
            "random subspace needs 0 < d <= m, got d={d}, m={m}"
        )));
    }
    loop {
        let candidate = random_matrix(d, m, rng);
        if candidate.rank() == d {
            return Ok(candidate);
        }
    }
}

/// Uniformly random invertible `m x m` matrix.
pub fn random_invertible<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Gf2Matrix {
    loop {
        let candidate = random_matrix(m, m, rng);
        if candidate.rank() == m {
            return candidate;
        }
    }
}
