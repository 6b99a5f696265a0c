//! Reed-Muller codes RM(m, r).
//!
//! Coordinate `k` of a codeword is the value of the polynomial at the point of
//! F2^m whose little-endian binary expansion is `k`; variable `x_{t+1}` reads
//! bit `t` of the index. Generator rows are monomial evaluation vectors in
//! degree-then-lexicographic order, e.g. `1, x1, x2, x3, x1x2, x1x3, x2x3, ...`.

use num::rational::Ratio;

use crate::camellia::AffineCoset;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Gf2Matrix};

/// Largest supported ambient dimension (block length `2^20`).
pub const MAX_M: usize = 20;

/// Codeword enumeration is refused beyond `2^24` codewords.
pub const ENUMERATION_LIMIT_ROWS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RmCode {
    m: usize,
    r: usize,
    monomials: Vec<u32>,
    generator: Gf2Matrix,
}

/// Point of F2^m for coordinate `index`.
pub fn point(index: usize, m: usize) -> BitVector {
    BitVector::from_u64(index as u64, m)
}

/// Coordinate of a point of F2^m.
pub fn index_of(point: &BitVector) -> usize {
    point.to_u64() as usize
}

/// Monomials of degree at most `r` in `m` variables, as variable bitmasks, in
/// canonical order.
pub fn monomials(m: usize, r: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for deg in 0..=r.min(m) {
        let mut chosen = Vec::with_capacity(deg);
        push_combinations(m, deg, 0, &mut chosen, &mut out);
    }
    out
}

fn push_combinations(
    m: usize,
    deg: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<u32>,
) {
    if chosen.len() == deg {
        out.push(chosen.iter().fold(0u32, |acc, &v| acc | (1 << v)));
        return;
    }
    for v in start..m {
        chosen.push(v);
        push_combinations(m, deg, v + 1, chosen, out);
        chosen.pop();
    }
}

/// Evaluation vector of a monomial over all `2^m` points.
pub fn monomial_evaluations(m: usize, monomial: u32) -> BitVector {
    let mask = monomial as usize;
    BitVector::from_bits((0..1usize << m).map(|k| k & mask == mask))
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `sum_{i <= r} C(m, i)`, the dimension of RM(m, r).
pub fn rm_dimension(m: usize, r: usize) -> u64 {
    (0..=r.min(m)).map(|i| binomial(m, i)).sum()
}

impl RmCode {
    pub fn new(m: usize, r: usize) -> Result<Self> {
        if m > MAX_M {
            return Err(Error::invalid(format!(
                "m={m} outside supported range 0..={MAX_M}"
            )));
        }
        if r > m {
            return Err(Error::invalid(format!("degree r={r} exceeds m={m}")));
        }
        let monomials = monomials(m, r);
        let rows = monomials
            .iter()
            .map(|&mono| monomial_evaluations(m, mono))
            .collect();
        let generator = Gf2Matrix::from_rows(1 << m, rows)?;
        Ok(Self {
            m,
            r,
            monomials,
            generator,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Block length `2^m`.
    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn dimension(&self) -> usize {
        self.generator.num_rows()
    }

    pub fn generator(&self) -> &Gf2Matrix {
        &self.generator
    }

    pub fn monomials(&self) -> &[u32] {
        &self.monomials
    }

    pub fn rate_exact(&self) -> Ratio<u64> {
        Ratio::new(self.dimension() as u64, self.n() as u64)
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.n() as f64
    }

    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        self.generator.vec_mul(message)
    }

    /// Generator of the code restricted to the coset's coordinates, listed in
    /// the coset's parameter order and row-reduced to full rank.
    pub fn restrict(&self, coset: &AffineCoset) -> Result<Gf2Matrix> {
        if coset.m() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: coset.m(),
            });
        }
        Ok(self.generator.select_columns(coset.members()).row_basis())
    }

    /// Coordinate permutation `k -> index(A * point(k) + b)`.
    pub fn affine_permutation(&self, a: &Gf2Matrix, b: &BitVector) -> Result<Vec<usize>> {
        affine_permutation(self.m, a, b)
    }
}

pub fn build_rm(m: usize, r: usize) -> Result<RmCode> {
    RmCode::new(m, r)
}

pub fn rate(code: &RmCode) -> f64 {
    code.rate()
}

pub fn encode(code: &RmCode, message: &BitVector) -> Result<BitVector> {
    code.encode(message)
}

pub fn restrict_code(code: &RmCode, coset: &AffineCoset) -> Result<Gf2Matrix> {
    code.restrict(coset)
}

pub fn apply_affine(code: &RmCode, a: &Gf2Matrix, b: &BitVector) -> Result<Vec<usize>> {
    code.affine_permutation(a, b)
}

/// `k -> index(A * point(k) + b)` on F2^m. Fails unless `A` is invertible.
pub fn affine_permutation(m: usize, a: &Gf2Matrix, b: &BitVector) -> Result<Vec<usize>> {
    if a.num_rows() != m || a.num_cols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: a.num_rows().max(a.num_cols()),
        });
    }
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.len(),
        });
    }
    if !a.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    // A * p is the XOR of the columns of A selected by p
    let columns: Vec<usize> = (0..m).map(|j| a.column(j).to_u64() as usize).collect();
    let shift = b.to_u64() as usize;
    Ok((0..1usize << m)
        .map(|k| {
            let image = columns
                .iter()
                .enumerate()
                .filter(|(j, _)| (k >> j) & 1 == 1)
                .fold(0, |acc, (_, &c)| acc ^ c);
            image ^ shift
        })
        .collect())
}

/// Moves entry `k` of `word` to position `perm[k]`.
pub fn permute(word: &BitVector, perm: &[usize]) -> BitVector {
    let mut out = BitVector::zeros(word.len());
    for k in word.iter_ones() {
        out.set(perm[k], true);
    }
    out
}

/// Every codeword of the row space of `generator`, each exactly once, in
/// Gray-code order starting from zero.
pub fn enumerate_codewords(generator: &Gf2Matrix) -> Result<CodewordIter<'_>> {
    let k = generator.num_rows();
    if k > ENUMERATION_LIMIT_ROWS {
        return Err(Error::budget(
            "codeword enumeration",
            2f64.powi(k as i32),
            2f64.powi(ENUMERATION_LIMIT_ROWS as i32),
        ));
    }
    if generator.rank() != k {
        return Err(Error::invalid(
            "codeword enumeration needs a full-rank generator",
        ));
    }
    Ok(CodewordIter {
        generator,
        current: BitVector::zeros(generator.num_cols()),
        step: 0,
        total: 1u64 << k,
    })
}

pub struct CodewordIter<'a> {
    generator: &'a Gf2Matrix,
    current: BitVector,
    step: u64,
    total: u64,
}

impl Iterator for CodewordIter<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        if self.step == self.total {
            return None;
        }
        if self.step > 0 {
            let flip = self.step.trailing_zeros() as usize;
            self.current.xor_assign(self.generator.row(flip));
        }
        self.step += 1;
        Some(self.current.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.step) as usize;
        (left, Some(left))
    }
}
