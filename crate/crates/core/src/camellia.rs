//! Coset camellias for Reed-Muller codes.
//!
//! The petals are all cosets of `d`-dimensional subspaces of F2^m. The
//! collection is invariant under every affine map, the code restricted to a
//! petal is RM(d, r), and for `i != j` a uniform petal containing `i` also
//! contains `j` with probability exactly `(2^d - 1) / (2^m - 1)`.

use std::collections::HashSet;

use num::rational::Ratio;
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{random_invertible, random_subspace, BitVector, Gf2Matrix};
use crate::rm::{affine_permutation, RmCode};

/// Largest ambient dimension handled by the exhaustive petal checks.
pub const EXHAUSTIVE_MAX_M: usize = 6;

/// Number of random affine maps applied by the invariance check.
const INVARIANCE_SAMPLES: usize = 8;

/// A petal: `{shift + t * basis : t in F2^d}`.
///
/// `members()[t]` is the coordinate of `shift + sum_k t_k basis_k`, so the
/// shift itself is always member 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineCoset {
    basis: Gf2Matrix,
    shift: BitVector,
    members: Vec<usize>,
}

impl AffineCoset {
    pub fn new(basis: Gf2Matrix, shift: BitVector) -> Result<Self> {
        let m = basis.num_cols();
        if shift.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: shift.len(),
            });
        }
        if m > 63 {
            return Err(Error::invalid("cosets are limited to m <= 63"));
        }
        let d = basis.num_rows();
        if basis.rank() != d {
            return Err(Error::invalid("coset basis is not full rank"));
        }
        let rows: Vec<usize> = basis.rows().iter().map(|r| r.to_u64() as usize).collect();
        let origin = shift.to_u64() as usize;
        let mut members = Vec::with_capacity(1 << d);
        members.push(origin);
        // member t differs from member t with its lowest bit cleared by one basis row
        for t in 1usize..1 << d {
            let low = t.trailing_zeros() as usize;
            let prev = members[t & (t - 1)];
            members.push(prev ^ rows[low]);
        }
        Ok(Self {
            basis,
            shift,
            members,
        })
    }

    /// Ambient dimension.
    pub fn m(&self) -> usize {
        self.basis.num_cols()
    }

    /// Petal dimension.
    pub fn d(&self) -> usize {
        self.basis.num_rows()
    }

    pub fn basis(&self) -> &Gf2Matrix {
        &self.basis
    }

    pub fn shift(&self) -> &BitVector {
        &self.shift
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, index: usize) -> bool {
        self.position(index).is_some()
    }

    /// Parameter `t` with `members()[t] == index`.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.members.iter().position(|&k| k == index)
    }

    /// Members as a bitmask over coordinates; only for `m <= 6`.
    pub fn member_mask(&self) -> u64 {
        assert!(self.m() <= 6, "member_mask needs n <= 64");
        self.members.iter().fold(0u64, |acc, &k| acc | (1 << k))
    }

    pub fn to_descriptor(&self) -> PetalDescriptor {
        PetalDescriptor {
            basis: self.basis.rows().iter().map(BitVector::to_string).collect(),
            shift: self.shift.to_string(),
        }
    }
}

/// Petal descriptor as serialized to JSON: basis rows and shift as 0/1 strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetalDescriptor {
    pub basis: Vec<String>,
    pub shift: String,
}

impl PetalDescriptor {
    pub fn to_coset(&self) -> Result<AffineCoset> {
        let shift = BitVector::parse(&self.shift)?;
        let rows = self
            .basis
            .iter()
            .map(|r| BitVector::parse(r))
            .collect::<Result<Vec<_>>>()?;
        AffineCoset::new(Gf2Matrix::from_rows(shift.len(), rows)?, shift)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CamelliaSpec {
    pub m: usize,
    pub d: usize,
    pub rho: Ratio<u64>,
}

impl CamelliaSpec {
    pub fn new(m: usize, d: usize) -> Result<Self> {
        Ok(Self {
            m,
            d,
            rho: correlation_rho(m, d)?,
        })
    }

    /// The spec with the default petal dimension for `m`.
    pub fn for_dimension(m: usize) -> Result<Self> {
        Self::new(m, petal_dimension(m)?)
    }
}

/// `m - ceil(2 sqrt(m) / log2(m))`, clamped to `[1, m - 1]`.
pub fn petal_dimension(m: usize) -> Result<usize> {
    if m < 5 {
        return Err(Error::invalid(format!(
            "petal dimension needs m >= 5, got {m}"
        )));
    }
    let mf = m as f64;
    let deficiency = (2.0 * mf.sqrt() / mf.log2()).ceil() as usize;
    Ok(m.saturating_sub(deficiency).clamp(1, m - 1))
}

fn check_dims(m: usize, d: usize) -> Result<()> {
    if d == 0 || d > m {
        return Err(Error::invalid(format!(
            "petal dimension must satisfy 1 <= d <= m, got d={d}, m={m}"
        )));
    }
    if m > 63 {
        return Err(Error::invalid("petals are limited to m <= 63"));
    }
    Ok(())
}

/// `P(j in P | i in P) = (2^d - 1) / (2^m - 1)` for any `i != j`.
pub fn correlation_rho(m: usize, d: usize) -> Result<Ratio<u64>> {
    check_dims(m, d)?;
    Ok(Ratio::new((1u64 << d) - 1, (1u64 << m) - 1))
}

/// `2^-(m - d)` with `d = petal_dimension(m)`; dominates the exact correlation.
pub fn rho_asymptotic_bound(m: usize) -> Result<f64> {
    let d = petal_dimension(m)?;
    Ok(2f64.powi(d as i32 - m as i32))
}

/// Uniform petal among the `d`-dimensional cosets containing coordinate `i`.
pub fn sample_petal_containing<R: Rng + ?Sized>(
    m: usize,
    d: usize,
    i: usize,
    rng: &mut R,
) -> Result<AffineCoset> {
    check_dims(m, d)?;
    if i >= 1 << m {
        return Err(Error::invalid(format!("coordinate {i} outside [0, 2^{m})")));
    }
    let basis = random_subspace(m, d, rng)?;
    AffineCoset::new(basis, crate::rm::point(i, m))
}

/// Every `d`-dimensional subspace of F2^m as its RREF basis.
pub fn enumerate_subspaces(m: usize, d: usize) -> Result<Vec<Gf2Matrix>> {
    if d > m {
        return Err(Error::invalid(format!("d={d} exceeds m={m}")));
    }
    if m > 24 {
        return Err(Error::budget(
            "subspace enumeration",
            2f64.powi((m * d) as i32),
            2f64.powi(24),
        ));
    }
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(d);
    subspaces_with_pivots(m, d, 0, &mut pivots, &mut out);
    Ok(out)
}

fn subspaces_with_pivots(
    m: usize,
    d: usize,
    start: usize,
    pivots: &mut Vec<usize>,
    out: &mut Vec<Gf2Matrix>,
) {
    if pivots.len() == d {
        // free entries: row r may be nonzero at non-pivot columns after its pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &*pivots;
                (p + 1..m)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        for fill in 0u64..1 << free.len() {
            let mut basis = Gf2Matrix::zeros(d, m);
            for (r, &p) in pivots.iter().enumerate() {
                basis.set(r, p, true);
            }
            for (k, &(r, c)) in free.iter().enumerate() {
                if (fill >> k) & 1 == 1 {
                    basis.set(r, c, true);
                }
            }
            out.push(basis);
        }
        return;
    }
    for p in start..m {
        pivots.push(p);
        subspaces_with_pivots(m, d, p + 1, pivots, out);
        pivots.pop();
    }
}

/// Every `d`-dimensional coset of F2^m: each subspace with one shift per
/// coset, the shifts ranging over vectors supported off the pivot columns.
pub fn enumerate_cosets(m: usize, d: usize) -> Result<Vec<AffineCoset>> {
    let mut out = Vec::new();
    for basis in enumerate_subspaces(m, d)? {
        let (_, pivots) = basis.rref_with_pivots();
        let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
        for fill in 0u64..1 << free.len() {
            let mut shift = BitVector::zeros(m);
            for (k, &c) in free.iter().enumerate() {
                if (fill >> k) & 1 == 1 {
                    shift.set(c, true);
                }
            }
            out.push(AffineCoset::new(basis.clone(), shift)?);
        }
    }
    Ok(out)
}

/// Every `d`-dimensional coset containing coordinate `i`.
pub fn petals_containing(m: usize, d: usize, i: usize) -> Result<Vec<AffineCoset>> {
    check_dims(m, d)?;
    enumerate_subspaces(m, d)?
        .into_iter()
        .map(|basis| AffineCoset::new(basis, crate::rm::point(i, m)))
        .collect()
}

/// Outcome of checking the camellia-code conditions on the coset petals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CamelliaReport {
    pub m: usize,
    pub d: usize,
    pub petal_count: usize,
    /// Every sampled affine map sends every petal to a petal.
    pub invariant: bool,
    pub max_restricted_rate: f64,
    /// `max_restricted_rate - rate(code)`.
    pub delta: f64,
    /// Measured `max_{i != j} P(j in P | i in P)` over all petals.
    pub rho_exact: f64,
    /// Closed form `(2^d - 1) / (2^m - 1)`.
    pub rho_bound: f64,
    /// Measured `max_j P(j in P)` for a uniform petal.
    pub rho_unconditional: f64,
    pub pass: bool,
}

impl CamelliaReport {
    /// Whether the petals are also spread enough for a demanded correlation.
    pub fn meets_correlation(&self, threshold: f64) -> bool {
        self.pass && self.rho_exact <= threshold
    }
}

/// Exhaustive check of the camellia-code conditions for the `d`-dimensional
/// coset petals of `code`. Feasible for `m <= 6`.
pub fn verify_camellia(code: &RmCode, d: usize, rate_margin: f64) -> Result<CamelliaReport> {
    let m = code.m();
    check_dims(m, d)?;
    if m > EXHAUSTIVE_MAX_M {
        return Err(Error::budget(
            "exhaustive petal check",
            2f64.powi(m as i32),
            2f64.powi(EXHAUSTIVE_MAX_M as i32),
        ));
    }
    let n = code.n();
    let petals = enumerate_cosets(m, d)?;
    let masks: Vec<u64> = petals.iter().map(AffineCoset::member_mask).collect();
    let collection: HashSet<u64> = masks.iter().copied().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut invariant = collection.len() == petals.len();
    for _ in 0..INVARIANCE_SAMPLES {
        let a = random_invertible(m, &mut rng);
        let b = BitVector::from_bits((0..m).map(|_| rng.gen::<bool>()));
        let perm = affine_permutation(m, &a, &b)?;
        for p in &petals {
            let image = p
                .members()
                .iter()
                .fold(0u64, |acc, &k| acc | (1 << perm[k]));
            if !collection.contains(&image) || !is_coset_mask(image, m, d) {
                invariant = false;
            }
        }
    }

    let mut max_rank = 0;
    for p in &petals {
        max_rank = max_rank.max(code.restrict(p)?.num_rows());
    }
    let max_restricted_rate = max_rank as f64 / (1u64 << d) as f64;
    let delta = max_restricted_rate - code.rate();

    let mut containing = vec![0u64; n];
    let mut both = vec![0u64; n * n];
    for &mask in &masks {
        let members: Vec<usize> = (0..n).filter(|&k| (mask >> k) & 1 == 1).collect();
        for &i in &members {
            containing[i] += 1;
            for &j in &members {
                both[i * n + j] += 1;
            }
        }
    }
    let mut rho_max = Ratio::new(0u64, 1);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            rho_max = rho_max.max(Ratio::new(both[i * n + j], containing[i]));
        }
    }
    let rho_formula = correlation_rho(m, d)?;
    let unconditional = Ratio::new(*containing.iter().max().unwrap_or(&0), petals.len() as u64);

    let pass = invariant && delta <= rate_margin && rho_max <= rho_formula;
    Ok(CamelliaReport {
        m,
        d,
        petal_count: petals.len(),
        invariant,
        max_restricted_rate,
        delta,
        rho_exact: rho_max.to_f64().unwrap_or(f64::NAN),
        rho_bound: rho_formula.to_f64().unwrap_or(f64::NAN),
        rho_unconditional: unconditional.to_f64().unwrap_or(f64::NAN),
        pass,
    })
}

/// True when the set of coordinates in `mask` is a `d`-dimensional coset.
fn is_coset_mask(mask: u64, m: usize, d: usize) -> bool {
    if mask.count_ones() != 1 << d {
        return false;
    }
    let origin = mask.trailing_zeros() as usize;
    let shifted: Vec<usize> = (0..1usize << m)
        .filter(|&k| (mask >> k) & 1 == 1)
        .map(|k| k ^ origin)
        .collect();
    let set: HashSet<usize> = shifted.iter().copied().collect();
    shifted
        .iter()
        .all(|&a| shifted.iter().all(|&b| set.contains(&(a ^ b))))
}
