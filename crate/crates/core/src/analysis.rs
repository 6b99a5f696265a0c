//! Exact oracles for the quantities behind camellia boosting on small
//! instances: the Efron-Stein decomposition of a petal's correctness
//! function, the average covariance between petal votes, the second-moment
//! majority bound, and the chain-rule entropy audit of the channel output.

use rand::Rng;
use serde::Serialize;

use crate::camellia::{correlation_rho, petals_containing};
use crate::channel::{NoiseState, SymmetricChannel, NOISE_ENUMERATION_LIMIT};
use crate::decoder::{ExactDecoder, PetalDecoder};
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::rm::RmCode;
use num::ToPrimitive;

/// Largest table a [`TabulatedFunction`] decomposes.
pub const TABLE_LIMIT: usize = 1 << 16;

/// Coordinates beyond this make the `2^c` subset decomposition unreasonable.
pub const MAX_COORDS: usize = 8;

const EXACT_TOLERANCE: f64 = 1e-9;

/// A real function of independent discrete coordinates, tabulated in
/// mixed-radix order (coordinate 0 varies fastest), with the product measure
/// given by per-coordinate probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedFunction {
    probs: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl TabulatedFunction {
    pub fn new(probs: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if probs.len() > MAX_COORDS {
            return Err(Error::budget(
                "contribution table",
                probs.len() as f64,
                MAX_COORDS as f64,
            ));
        }
        let size = probs
            .iter()
            .try_fold(1usize, |acc, p| acc.checked_mul(p.len()))
            .unwrap_or(usize::MAX);
        if size > TABLE_LIMIT {
            return Err(Error::budget(
                "contribution table",
                size as f64,
                TABLE_LIMIT as f64,
            ));
        }
        if values.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: values.len(),
            });
        }
        for p in &probs {
            let total: f64 = p.iter().sum();
            if p.is_empty() || p.iter().any(|&x| x < 0.0) || (total - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(
                    "coordinate probabilities must be a distribution",
                ));
            }
        }
        Ok(Self { probs, values })
    }

    /// Tabulates `f` over every joint state.
    pub fn from_fn<F: FnMut(&[usize]) -> f64>(probs: Vec<Vec<f64>>, mut f: F) -> Result<Self> {
        let radices: Vec<usize> = probs.iter().map(Vec::len).collect();
        let size: usize = radices.iter().product();
        if size > TABLE_LIMIT {
            return Err(Error::budget(
                "contribution table",
                size as f64,
                TABLE_LIMIT as f64,
            ));
        }
        let mut digits = vec![0; radices.len()];
        let mut values = Vec::with_capacity(size);
        for idx in 0..size {
            decode_index(idx, &radices, &mut digits);
            values.push(f(&digits));
        }
        Self::new(probs, values)
    }

    pub fn coords(&self) -> usize {
        self.probs.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    fn radices(&self) -> Vec<usize> {
        self.probs.iter().map(Vec::len).collect()
    }

    /// Probability of each joint state.
    pub fn weights(&self) -> Vec<f64> {
        let radices = self.radices();
        let mut digits = vec![0; radices.len()];
        (0..self.values.len())
            .map(|idx| {
                decode_index(idx, &radices, &mut digits);
                digits
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| self.probs[j][a])
                    .product()
            })
            .collect()
    }

    pub fn expectation(&self) -> f64 {
        self.weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// `E[f g]` for two tables over the same measure.
    pub fn inner(&self, other: &TabulatedFunction) -> f64 {
        assert_eq!(
            self.probs, other.probs,
            "inner product of tables on different spaces"
        );
        self.weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    /// Replaces the table by its average over coordinate `j`.
    pub fn average_out(&self, j: usize) -> TabulatedFunction {
        let radices = self.radices();
        let stride: usize = radices[..j].iter().product();
        let r = radices[j];
        let mut out = self.values.clone();
        for (idx, slot) in out.iter_mut().enumerate() {
            let digit = (idx / stride) % r;
            let base = idx - digit * stride;
            *slot = (0..r)
                .map(|a| self.probs[j][a] * self.values[base + a * stride])
                .sum();
        }
        TabulatedFunction {
            probs: self.probs.clone(),
            values: out,
        }
    }

    /// `E[f(Z) | Z_S = z_S]` as a table over all coordinates; `subset` is a
    /// bitmask of the conditioned coordinates.
    pub fn conditional_expectation(&self, subset: u32) -> TabulatedFunction {
        (0..self.coords())
            .filter(|j| (subset >> j) & 1 == 0)
            .fold(self.clone(), |acc, j| acc.average_out(j))
    }
}

fn decode_index(mut idx: usize, radices: &[usize], digits: &mut [usize]) {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d = idx % r;
        idx /= r;
    }
}

/// Efron-Stein contributions of a tabulated function: for each subset `S`
/// (bitmask), `Q_S = sum_{S' in S} (-1)^{|S|-|S'|} E[Q | Z_{S'}]`.
#[derive(Clone, Debug)]
pub struct ContributionTable {
    function: TabulatedFunction,
    parts: Vec<TabulatedFunction>,
    energies: Vec<f64>,
}

impl ContributionTable {
    pub fn build(function: &TabulatedFunction) -> Self {
        let c = function.coords();
        let conditionals: Vec<TabulatedFunction> = (0..1u32 << c)
            .map(|s| function.conditional_expectation(s))
            .collect();
        let parts: Vec<TabulatedFunction> = (0..1u32 << c)
            .map(|s| {
                let mut values = vec![0.0; function.values.len()];
                // iterate over all submasks of s
                let mut sub = s;
                loop {
                    let sign = if (s.count_ones() - sub.count_ones()) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    for (v, x) in values.iter_mut().zip(&conditionals[sub as usize].values) {
                        *v += sign * x;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & s;
                }
                TabulatedFunction {
                    probs: function.probs.clone(),
                    values,
                }
            })
            .collect();
        let energies = parts.iter().map(|p| p.inner(p)).collect();
        Self {
            function: function.clone(),
            parts,
            energies,
        }
    }

    /// `Q_S` for the subset bitmask `s`.
    pub fn part(&self, s: u32) -> &TabulatedFunction {
        &self.parts[s as usize]
    }

    /// `E[Q_S^2]` for every subset, indexed by bitmask.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn function(&self) -> &TabulatedFunction {
        &self.function
    }
}

/// `Q_S` for one subset.
pub fn contribution(function: &TabulatedFunction, subset: u32) -> Result<TabulatedFunction> {
    if subset >> function.coords() != 0 {
        return Err(Error::invalid(
            "subset mentions coordinates the table does not have",
        ));
    }
    Ok(ContributionTable::build(function).part(subset).clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct ParsevalReport {
    pub total_energy: f64,
    pub sum_of_energies: f64,
    pub energies: Vec<f64>,
    pub parseval_violation: f64,
    pub max_orthogonality_violation: f64,
    pub max_reconstruction_violation: f64,
}

impl ParsevalReport {
    pub fn max_violation(&self) -> f64 {
        self.parseval_violation
            .max(self.max_orthogonality_violation)
            .max(self.max_reconstruction_violation)
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.max_violation() <= tolerance
    }
}

/// Checks that the contributions sum back to the function, are pairwise
/// orthogonal, and that their energies add up to `E[Q^2]`.
pub fn parseval_check(function: &TabulatedFunction) -> ParsevalReport {
    let table = ContributionTable::build(function);
    let total_energy = function.inner(function);
    let sum_of_energies: f64 = table.energies.iter().sum();
    let mut ortho: f64 = 0.0;
    for a in 0..table.parts.len() {
        for b in a + 1..table.parts.len() {
            ortho = ortho.max(table.parts[a].inner(&table.parts[b]).abs());
        }
    }
    let mut recon: f64 = 0.0;
    for (idx, &v) in function.values.iter().enumerate() {
        let sum: f64 = table.parts.iter().map(|p| p.values[idx]).sum();
        recon = recon.max((sum - v).abs());
    }
    ParsevalReport {
        total_energy,
        sum_of_energies,
        energies: table.energies.clone(),
        parseval_violation: (total_energy - sum_of_energies).abs(),
        max_orthogonality_violation: ortho,
        max_reconstruction_violation: recon,
    }
}

/// Exact average covariance between the votes of two independent uniform
/// petals through a coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct CovarianceAudit {
    pub m: usize,
    pub d: usize,
    pub target: usize,
    pub petals: usize,
    /// `E_{P,P'} Cov(E_{P,i}, E_{P',i})`.
    pub expected_covariance: f64,
    /// `E_P E[E_{P,i}]`.
    pub mean_e: f64,
    pub rho: f64,
    pub sqrt_rho: f64,
    pub within_bound: bool,
}

/// One petal's correctness variable tabulated over the noise of its
/// non-target members.
struct PetalTable {
    coords: Vec<usize>,
    values: Vec<i8>,
    mean: f64,
}

pub fn exact_expected_covariance(
    code: &RmCode,
    channel: &SymmetricChannel,
    i: usize,
    d: usize,
) -> Result<CovarianceAudit> {
    let m = code.m();
    if i >= code.n() {
        return Err(Error::invalid(format!(
            "coordinate {i} outside [0, {})",
            code.n()
        )));
    }
    let rho = correlation_rho(m, d)?.to_f64().unwrap_or(f64::NAN);
    let alphabet = channel.noise_alphabet();
    let a = alphabet.len();
    let worst_union = (2usize << d).min(code.n()) - 1;
    let needed = (a as f64).powi(worst_union as i32);
    if needed > NOISE_ENUMERATION_LIMIT {
        return Err(Error::budget(
            "petal-pair noise enumeration",
            needed,
            NOISE_ENUMERATION_LIMIT,
        ));
    }
    let decoder = PetalDecoder::new(code, d)?;
    let petals = petals_containing(m, d, i)?;

    let mut tables = Vec::with_capacity(petals.len());
    for petal in &petals {
        // member 0 is the target itself
        let coords: Vec<usize> = petal.members()[1..].to_vec();
        let radices = vec![a; coords.len()];
        let size = a.pow(coords.len() as u32);
        let mut digits = vec![0; coords.len()];
        let mut z = vec![
            NoiseState {
                component: 0,
                flip: false
            };
            coords.len() + 1
        ];
        let mut values = Vec::with_capacity(size);
        let mut mean = 0.0;
        for idx in 0..size {
            decode_index(idx, &radices, &mut digits);
            let mut p = 1.0;
            for (s, &dig) in digits.iter().enumerate() {
                z[s + 1] = alphabet[dig].1;
                p *= alphabet[dig].0;
            }
            let e = decoder.e_variable_at(channel, 0, &z)?.value();
            mean += p * e as f64;
            values.push(e);
        }
        tables.push(PetalTable {
            coords,
            values,
            mean,
        });
    }

    let mut total = 0.0;
    for (x, px) in tables.iter().enumerate() {
        for py in &tables[x..] {
            let cov = pair_covariance(px, py, &alphabet);
            // off-diagonal pairs appear twice among ordered pairs
            total += if std::ptr::eq(px, py) { cov } else { 2.0 * cov };
        }
    }
    let count = tables.len() as f64;
    let expected_covariance = total / (count * count);
    let mean_e = tables.iter().map(|t| t.mean).sum::<f64>() / count;
    Ok(CovarianceAudit {
        m,
        d,
        target: i,
        petals: tables.len(),
        expected_covariance,
        mean_e,
        rho,
        sqrt_rho: rho.sqrt(),
        within_bound: expected_covariance <= rho.sqrt(),
    })
}

fn pair_covariance(p: &PetalTable, q: &PetalTable, alphabet: &[(f64, NoiseState)]) -> f64 {
    let mut union: Vec<usize> = p.coords.iter().chain(&q.coords).copied().collect();
    union.sort_unstable();
    union.dedup();
    let a = alphabet.len();
    let slot = |coords: &[usize]| -> Vec<usize> {
        coords
            .iter()
            .map(|c| union.binary_search(c).expect("coordinate in union"))
            .collect()
    };
    let (ps, qs) = (slot(&p.coords), slot(&q.coords));
    let radices = vec![a; union.len()];
    let mut digits = vec![0; union.len()];
    let mut joint = 0.0;
    for idx in 0..a.pow(union.len() as u32) {
        decode_index(idx, &radices, &mut digits);
        let prob: f64 = digits.iter().map(|&dg| alphabet[dg].0).product();
        let index_in = |slots: &[usize]| slots.iter().rev().fold(0, |acc, &s| acc * a + digits[s]);
        let ep = p.values[index_in(&ps)] as f64;
        let eq = q.values[index_in(&qs)] as f64;
        joint += prob * ep * eq;
    }
    joint - p.mean * q.mean
}

/// `min(1, c_k / mean^2)`: Chebyshev's bound on `P(sum_i E_i <= 0)` for
/// variables with average mean `mean` and average pairwise covariance `c_k`.
pub fn chebyshev_majority_bound(mean: f64, avg_cov: f64) -> Result<f64> {
    if mean.is_nan() || mean <= 0.0 {
        return Err(Error::invalid(format!(
            "majority bound needs a positive mean, got {mean}"
        )));
    }
    Ok((avg_cov / (mean * mean)).clamp(0.0, 1.0))
}

/// Exchangeable `{-1, 0, +1}` variables driven by a shared latent coin: with
/// probability `q` every variable independently takes `+1` w.p. `up[1]`,
/// otherwise `up[0]`; each is `0` w.p. `tie`, and `-1` otherwise.
#[derive(Clone, Copy, Debug)]
pub struct LatentEnsemble {
    pub k: usize,
    pub q: f64,
    pub up: [f64; 2],
    pub tie: f64,
}

impl LatentEnsemble {
    fn conditional_mean(&self, g: usize) -> f64 {
        2.0 * self.up[g] + self.tie - 1.0
    }

    pub fn mean(&self) -> f64 {
        self.q * self.conditional_mean(1) + (1.0 - self.q) * self.conditional_mean(0)
    }

    /// `c_k = (1/k^2) sum_{i,j} Cov(E_i, E_j)`.
    pub fn avg_covariance(&self) -> f64 {
        let mu = self.mean();
        let var = 1.0 - self.tie - mu * mu;
        let (m0, m1) = (self.conditional_mean(0), self.conditional_mean(1));
        let cross = self.q * m1 * m1 + (1.0 - self.q) * m0 * m0 - mu * mu;
        let k = self.k as f64;
        (k * var + k * (k - 1.0) * cross) / (k * k)
    }

    /// One draw of `sum_i E_i`.
    pub fn sample_sum<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let g = usize::from(rng.gen::<f64>() < self.q);
        (0..self.k)
            .map(|_| {
                let u: f64 = rng.gen();
                if u < self.up[g] {
                    1
                } else if u < self.up[g] + self.tie {
                    0
                } else {
                    -1
                }
            })
            .sum()
    }
}

/// Chain-rule entropy audit of the channel output under a uniform codeword.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyAudit {
    pub n: usize,
    pub dimension: usize,
    pub rate: f64,
    pub capacity: f64,
    /// `H(Y)` from the joint output law.
    pub output_entropy: f64,
    /// `H(Y_j | Y_<j)` for each `j`.
    pub chain_entropies: Vec<f64>,
    pub chain_sum: f64,
    /// `H(Y_j)` for each `j`.
    pub marginal_entropies: Vec<f64>,
    /// A coordinate not identically zero on the code, when one exists.
    pub reference_coordinate: Option<usize>,
    /// `n (H(Y_i) - (C - R))` at the reference coordinate.
    pub entropy_bound: Option<f64>,
    pub bound_holds: bool,
    /// Exact `P_loc,j`, ties counted as errors.
    pub p_loc: Vec<f64>,
}

impl EntropyAudit {
    pub fn chain_rule_violation(&self) -> f64 {
        (self.chain_sum - self.output_entropy).abs()
    }

    /// Coordinates whose local error is at most `threshold`.
    pub fn informative_coordinates(&self, threshold: f64) -> usize {
        self.p_loc.iter().filter(|&&p| p <= threshold).count()
    }
}

/// Joint output-law budget: `(2 * components)^n` entries times codewords.
pub const ENTROPY_WORK_LIMIT: f64 = (1u64 << 28) as f64;

pub fn entropy_audit(code: &RmCode, channel: &SymmetricChannel) -> Result<EntropyAudit> {
    entropy_audit_generator(code.generator(), channel)
}

/// Same audit for any linear code given by a full-rank generator (possibly
/// with zero rows, the trivial code).
pub fn entropy_audit_generator(
    generator: &Gf2Matrix,
    channel: &SymmetricChannel,
) -> Result<EntropyAudit> {
    let n = generator.num_cols();
    let k = generator.num_rows();
    if k > 12 {
        return Err(Error::budget(
            "entropy audit codewords",
            2f64.powi(k as i32),
            4096.0,
        ));
    }
    let comps = channel.components();
    let symbols = 2 * comps.len();
    let states = (symbols as f64).powi(n as i32);
    if states * 2f64.powi(k as i32) > ENTROPY_WORK_LIMIT || states > NOISE_ENUMERATION_LIMIT {
        return Err(Error::budget(
            "entropy audit output law",
            states,
            NOISE_ENUMERATION_LIMIT,
        ));
    }
    let codewords: Vec<u64> = crate::rm::enumerate_codewords(generator)?
        .map(|c| c.iter_ones().fold(0u64, |acc, j| acc | 1 << j))
        .collect();
    let size = symbols.pow(n as u32);

    // symbol s of a coordinate: component s / 2, output bit s % 2
    let emit = |s: usize, x: bool| -> f64 {
        let c = &comps[s / 2];
        let out = s % 2 == 1;
        c.weight * if out == x { 1.0 - c.epsilon } else { c.epsilon }
    };
    let radices = vec![symbols; n];
    let mut digits = vec![0; n];
    let mut joint = Vec::with_capacity(size);
    for idx in 0..size {
        decode_index(idx, &radices, &mut digits);
        let p: f64 = codewords
            .iter()
            .map(|&c| {
                digits
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| emit(s, (c >> j) & 1 == 1))
                    .product::<f64>()
            })
            .sum::<f64>()
            / codewords.len() as f64;
        joint.push(p);
    }
    let plogp = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    let output_entropy: f64 = joint.iter().map(|&p| plogp(p)).sum();

    // prefix marginals: P(y_0..y_j) indexed by idx mod symbols^(j+1)
    let mut prefixes: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let width = symbols.pow(j as u32 + 1);
        let mut marg = vec![0.0; width];
        for (idx, &p) in joint.iter().enumerate() {
            marg[idx % width] += p;
        }
        prefixes.push(marg);
    }
    let chain_entropies: Vec<f64> = (0..n)
        .map(|j| {
            let cur = &prefixes[j];
            let width_prev = symbols.pow(j as u32);
            cur.iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(idx, &p)| {
                    let prev = if j == 0 {
                        1.0
                    } else {
                        prefixes[j - 1][idx % width_prev]
                    };
                    -p * (p / prev).log2()
                })
                .sum()
        })
        .collect();
    let chain_sum = chain_entropies.iter().sum();

    let marginal_entropies: Vec<f64> = (0..n)
        .map(|j| {
            let stride = symbols.pow(j as u32);
            let mut marg = vec![0.0; symbols];
            for (idx, &p) in joint.iter().enumerate() {
                marg[(idx / stride) % symbols] += p;
            }
            marg.into_iter().map(plogp).sum()
        })
        .collect();

    let rate = k as f64 / n as f64;
    let capacity = channel.capacity();
    let reference_coordinate = (0..n).find(|&j| !generator.column(j).is_zero());
    let entropy_bound =
        reference_coordinate.map(|j| n as f64 * (marginal_entropies[j] - (capacity - rate)));
    let bound_holds = entropy_bound.is_none_or(|b| output_entropy <= b + EXACT_TOLERANCE);

    let decoder = ExactDecoder::from_generator(generator)?;
    let mut p_loc = vec![0.0; n];
    for (p, z) in channel.enumerate_noise(n)? {
        let y: Vec<_> = z
            .iter()
            .map(|&s| channel.use_from_noise(false, s))
            .collect();
        for (j, slot) in p_loc.iter_mut().enumerate() {
            if !decoder.local_map(j, &y)?.guess.is_correct(false) {
                *slot += p;
            }
        }
    }

    Ok(EntropyAudit {
        n,
        dimension: k,
        rate,
        capacity,
        output_entropy,
        chain_entropies,
        chain_sum,
        marginal_entropies,
        reference_coordinate,
        entropy_bound,
        bound_holds,
        p_loc,
    })
}

/// Exact `P_bit,i` (or `P_loc,i` when `local`) of whole-code bit-MAP for every
/// coordinate, ties counted as errors.
pub fn exact_bit_error(code: &RmCode, channel: &SymmetricChannel, local: bool) -> Result<Vec<f64>> {
    let decoder = ExactDecoder::new(code)?;
    let n = code.n();
    let mut err = vec![0.0; n];
    for (p, z) in channel.enumerate_noise(n)? {
        let y: Vec<_> = z
            .iter()
            .map(|&s| channel.use_from_noise(false, s))
            .collect();
        for (i, slot) in err.iter_mut().enumerate() {
            let d = if local {
                decoder.local_map(i, &y)?
            } else {
                decoder.bit_map(i, &y)?
            };
            if !d.guess.is_correct(false) {
                *slot += p;
            }
        }
    }
    Ok(err)
}
