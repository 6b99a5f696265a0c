//! Bit-MAP decoding on petals and on whole codes, the per-petal correctness
//! variables, and the majority-vote boosting decoder.
//!
//! Every decision here is exact bit-MAP under a uniform codeword prior. Two
//! evaluation routes exist: enumeration of the codewords with log-domain
//! likelihood sums, and, when every observed use is either noiseless or pure
//! noise, linear algebra on the observed generator columns (a bit is then
//! either determined by the unerased coordinates or uniformly distributed).

use rand::Rng;

use crate::camellia::{sample_petal_containing, AffineCoset};
use crate::channel::{ChannelUse, NoiseState, SymmetricChannel};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Gf2Matrix};
use crate::rm::{enumerate_codewords, RmCode};

/// Relative tolerance under which the two posterior masses count as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Largest restricted-code dimension a petal decoder enumerates.
pub const PETAL_DIMENSION_LIMIT: usize = 24;

/// Largest code dimension the whole-code decoders enumerate.
pub const EXACT_DIMENSION_LIMIT: usize = 20;

/// Default number of sampled petals per boosted decision.
pub const DEFAULT_PETALS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Guess {
    Zero,
    One,
    Tie,
}

impl Guess {
    pub fn bit(self) -> Option<bool> {
        match self {
            Guess::Zero => Some(false),
            Guess::One => Some(true),
            Guess::Tie => None,
        }
    }

    /// Correct only when the guess is exactly the transmitted bit.
    pub fn is_correct(self, transmitted: bool) -> bool {
        self.bit() == Some(transmitted)
    }
}

/// Outcome of bit-MAP on one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub guess: Guess,
    /// `S_1 / S_0`, the ratio of posterior masses of the two bit values.
    pub posterior_ratio: f64,
}

impl Decision {
    fn from_log_masses(log_s0: f64, log_s1: f64) -> Result<Self> {
        if log_s0 == f64::NEG_INFINITY && log_s1 == f64::NEG_INFINITY {
            return Err(Error::ContradictoryEvidence);
        }
        let ratio = (log_s1 - log_s0).exp();
        let guess = if (ratio - 1.0).abs() <= TIE_TOLERANCE {
            Guess::Tie
        } else if ratio > 1.0 {
            Guess::One
        } else {
            Guess::Zero
        };
        Ok(Self {
            guess,
            posterior_ratio: ratio,
        })
    }

    fn determined(bit: bool) -> Self {
        Self {
            guess: if bit { Guess::One } else { Guess::Zero },
            posterior_ratio: if bit { f64::INFINITY } else { 0.0 },
        }
    }

    fn tie() -> Self {
        Self {
            guess: Guess::Tie,
            posterior_ratio: 1.0,
        }
    }
}

/// A linear code held column-wise: bit `a` of `columns[j]` is entry `(a, j)`
/// of a full-rank generator. Supports dimensions up to 32.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnCode {
    dim: usize,
    columns: Vec<u32>,
}

/// Streaming log-sum-exp.
#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    const EMPTY: LogSum = LogSum {
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    fn value(self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

#[inline]
fn log_likelihoods(u: &ChannelUse) -> (f64, f64) {
    let (good, bad) = ((1.0 - u.epsilon).ln(), u.epsilon.ln());
    if u.output {
        (bad, good)
    } else {
        (good, bad)
    }
}

impl ColumnCode {
    pub fn from_generator(generator: &Gf2Matrix, limit: usize) -> Result<Self> {
        let dim = generator.num_rows();
        if dim > limit.min(32) {
            return Err(Error::budget(
                "codeword enumeration",
                2f64.powi(dim as i32),
                2f64.powi(limit.min(32) as i32),
            ));
        }
        if generator.rank() != dim {
            return Err(Error::invalid("generator must have full row rank"));
        }
        let columns = (0..generator.num_cols())
            .map(|j| generator.column(j).to_u64() as u32)
            .collect();
        Ok(Self { dim, columns })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Bit-MAP of coordinate `target` from the uses that `evidence` returns.
    /// Coordinates mapped to `None` are unobserved.
    pub fn decide<F>(&self, target: usize, evidence: F) -> Result<Decision>
    where
        F: Fn(usize) -> Option<ChannelUse>,
    {
        let erasure_only = (0..self.columns.len())
            .filter_map(&evidence)
            .all(|u| u.epsilon == 0.0 || u.epsilon == 0.5);
        if erasure_only {
            self.decide_by_elimination(target, evidence)
        } else {
            self.decide_by_enumeration(target, evidence)
        }
    }

    /// Sums codeword likelihoods per value of the target bit.
    pub fn decide_by_enumeration<F>(&self, target: usize, evidence: F) -> Result<Decision>
    where
        F: Fn(usize) -> Option<ChannelUse>,
    {
        // pure-noise uses scale every codeword equally and are skipped
        let observed: Vec<(u32, f64, f64)> = (0..self.columns.len())
            .filter_map(|j| evidence(j).filter(|u| u.epsilon != 0.5).map(|u| (j, u)))
            .map(|(j, u)| {
                let (l0, l1) = log_likelihoods(&u);
                (self.columns[j], l0, l1)
            })
            .collect();
        let target_col = self.columns[target];
        let mut sums = [LogSum::EMPTY; 2];
        for msg in 0u32..(1u64 << self.dim) as u32 {
            let mut score = 0.0;
            for &(col, l0, l1) in &observed {
                score += if (msg & col).count_ones() & 1 == 1 {
                    l1
                } else {
                    l0
                };
                if score == f64::NEG_INFINITY {
                    break;
                }
            }
            let bit = ((msg & target_col).count_ones() & 1) as usize;
            sums[bit].add(score);
        }
        Decision::from_log_masses(sums[0].value(), sums[1].value())
    }

    /// Exact when every observed use has `epsilon` in `{0, 1/2}`: the target
    /// is determined iff its column lies in the span of the noiseless columns.
    pub fn decide_by_elimination<F>(&self, target: usize, evidence: F) -> Result<Decision>
    where
        F: Fn(usize) -> Option<ChannelUse>,
    {
        // basis[b] holds a reduced (column, value) pair whose highest bit is b
        let mut basis: [(u32, bool); 32] = [(0, false); 32];
        let reduce = |basis: &[(u32, bool); 32], mut col: u32, mut val: bool| {
            while col != 0 {
                let top = 31 - col.leading_zeros() as usize;
                let (bcol, bval) = basis[top];
                if bcol == 0 {
                    break;
                }
                col ^= bcol;
                val ^= bval;
            }
            (col, val)
        };
        for j in 0..self.columns.len() {
            let Some(u) = evidence(j) else { continue };
            if u.epsilon == 0.5 {
                continue;
            }
            debug_assert!(u.epsilon == 0.0);
            let (col, val) = reduce(&basis, self.columns[j], u.output);
            if col == 0 {
                if val {
                    return Err(Error::ContradictoryEvidence);
                }
                continue;
            }
            basis[31 - col.leading_zeros() as usize] = (col, val);
        }
        let (col, val) = reduce(&basis, self.columns[target], false);
        Ok(if col == 0 {
            Decision::determined(val)
        } else {
            Decision::tie()
        })
    }
}

/// Bit-MAP decision for one petal.
#[derive(Clone, Debug, PartialEq)]
pub struct PetalDecision {
    pub petal: AffineCoset,
    pub target: usize,
    pub guess: Guess,
    pub posterior_ratio: f64,
}

/// `E_{P,i}`: +1 when the petal decodes the target correctly, -1 when it
/// decodes it wrongly, 0 on a tie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EVariable(i8);

impl EVariable {
    pub const CORRECT: EVariable = EVariable(1);
    pub const INCORRECT: EVariable = EVariable(-1);
    pub const TIE: EVariable = EVariable(0);

    pub fn from_guess(guess: Guess, transmitted: bool) -> Self {
        match guess.bit() {
            None => Self::TIE,
            Some(b) if b == transmitted => Self::CORRECT,
            Some(_) => Self::INCORRECT,
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }
}

/// Decodes a target coordinate of `code` from the uses on `petal` minus the
/// target. `y` is the full channel output, indexed by code coordinate.
pub fn petal_bit_map(
    code: &RmCode,
    petal: &AffineCoset,
    i: usize,
    y: &[ChannelUse],
) -> Result<PetalDecision> {
    check_output_len(code, y)?;
    let t = petal.position(i).ok_or(Error::NotInPetal(i))?;
    let restricted = ColumnCode::from_generator(&code.restrict(petal)?, PETAL_DIMENSION_LIMIT)?;
    let members = petal.members();
    let decision = restricted.decide(t, |s| (s != t).then(|| y[members[s]]))?;
    Ok(PetalDecision {
        petal: petal.clone(),
        target: i,
        guess: decision.guess,
        posterior_ratio: decision.posterior_ratio,
    })
}

/// `E_{P,i}` as a function of the noise on the petal, under the all-zero
/// codeword. `z` is indexed by the petal's parameter order; the target's
/// entry is ignored.
pub fn e_variable(
    code: &RmCode,
    channel: &SymmetricChannel,
    petal: &AffineCoset,
    i: usize,
    z: &[NoiseState],
) -> Result<EVariable> {
    let decoder = PetalDecoder::new(code, petal.d())?;
    decoder.e_variable(channel, petal, i, z)
}

fn check_output_len(code: &RmCode, y: &[ChannelUse]) -> Result<()> {
    if y.len() != code.n() {
        return Err(Error::DimensionMismatch {
            expected: code.n(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Petal decoder for a fixed code and petal dimension.
///
/// Restricted to a `d`-dimensional coset in its parameter order, RM(m, r) is
/// exactly RM(d, min(r, d)), so one column code serves every petal.
#[derive(Clone, Debug)]
pub struct PetalDecoder {
    m: usize,
    d: usize,
    local: ColumnCode,
}

impl PetalDecoder {
    pub fn new(code: &RmCode, d: usize) -> Result<Self> {
        if d == 0 || d > code.m() {
            return Err(Error::invalid(format!(
                "petal dimension {d} outside [1, {}]",
                code.m()
            )));
        }
        let local = RmCode::new(d, code.r().min(d))?;
        Ok(Self {
            m: code.m(),
            d,
            local: ColumnCode::from_generator(local.generator(), PETAL_DIMENSION_LIMIT)?,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn check_petal(&self, petal: &AffineCoset) -> Result<()> {
        if petal.m() != self.m || petal.d() != self.d {
            return Err(Error::invalid(format!(
                "petal of dimension {} in F2^{} does not match decoder (d={}, m={})",
                petal.d(),
                petal.m(),
                self.d,
                self.m
            )));
        }
        Ok(())
    }

    pub fn decide(&self, petal: &AffineCoset, i: usize, y: &[ChannelUse]) -> Result<Decision> {
        self.check_petal(petal)?;
        let t = petal.position(i).ok_or(Error::NotInPetal(i))?;
        let members = petal.members();
        self.local.decide(t, |s| (s != t).then(|| y[members[s]]))
    }

    pub fn e_variable(
        &self,
        channel: &SymmetricChannel,
        petal: &AffineCoset,
        i: usize,
        z: &[NoiseState],
    ) -> Result<EVariable> {
        self.check_petal(petal)?;
        if z.len() != petal.members().len() {
            return Err(Error::DimensionMismatch {
                expected: petal.members().len(),
                got: z.len(),
            });
        }
        let t = petal.position(i).ok_or(Error::NotInPetal(i))?;
        self.e_variable_at(channel, t, z)
    }

    /// `E_{P,i}` for the target at parameter `t`, noise in parameter order.
    pub fn e_variable_at(
        &self,
        channel: &SymmetricChannel,
        t: usize,
        z: &[NoiseState],
    ) -> Result<EVariable> {
        let d = self
            .local
            .decide(t, |s| (s != t).then(|| channel.use_from_noise(false, z[s])))?;
        Ok(EVariable::from_guess(d.guess, false))
    }
}

/// Result of one boosted decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoostOutcome {
    /// Majority over non-tied petal votes; an even split resolves to 0.
    pub bit: bool,
    /// True when the votes split evenly (including when every petal tied).
    pub tie: bool,
    pub votes_zero: usize,
    pub votes_one: usize,
    pub abstentions: usize,
}

impl BoostOutcome {
    /// Ties count as errors.
    pub fn is_correct(&self, transmitted: bool) -> bool {
        !self.tie && self.bit == transmitted
    }
}

/// Majority vote over `k` petals drawn independently and uniformly among the
/// `d`-dimensional cosets containing `i`.
pub struct BoostedDecoder {
    m: usize,
    k: usize,
    petals: PetalDecoder,
}

impl BoostedDecoder {
    pub fn new(code: &RmCode, k: usize, d: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("boosting needs at least one petal"));
        }
        Ok(Self {
            m: code.m(),
            k,
            petals: PetalDecoder::new(code, d)?,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.petals.d()
    }

    pub fn petal_decoder(&self) -> &PetalDecoder {
        &self.petals
    }

    pub fn decode_bit<R: Rng + ?Sized>(
        &self,
        i: usize,
        y: &[ChannelUse],
        rng: &mut R,
    ) -> Result<BoostOutcome> {
        if y.len() != 1 << self.m {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.m,
                got: y.len(),
            });
        }
        let (mut zero, mut one, mut abstain) = (0, 0, 0);
        for _ in 0..self.k {
            let petal = sample_petal_containing(self.m, self.petals.d(), i, rng)?;
            match self.petals.decide(&petal, i, y)?.guess {
                Guess::Zero => zero += 1,
                Guess::One => one += 1,
                Guess::Tie => abstain += 1,
            }
        }
        Ok(BoostOutcome {
            bit: one > zero,
            tie: one == zero,
            votes_zero: zero,
            votes_one: one,
            abstentions: abstain,
        })
    }
}

pub fn boost_decode_bit<R: Rng + ?Sized>(
    code: &RmCode,
    i: usize,
    y: &[ChannelUse],
    k: usize,
    d: usize,
    rng: &mut R,
) -> Result<BoostOutcome> {
    BoostedDecoder::new(code, k, d)?.decode_bit(i, y, rng)
}

/// Whole-code decoders by codeword enumeration.
#[derive(Clone, Debug)]
pub struct ExactDecoder {
    columns: ColumnCode,
}

impl ExactDecoder {
    pub fn new(code: &RmCode) -> Result<Self> {
        Self::from_generator(code.generator())
    }

    pub fn from_generator(generator: &Gf2Matrix) -> Result<Self> {
        Ok(Self {
            columns: ColumnCode::from_generator(generator, EXACT_DIMENSION_LIMIT)?,
        })
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// Bit-MAP of `x_i` from the full output.
    pub fn bit_map(&self, i: usize, y: &[ChannelUse]) -> Result<Decision> {
        self.check(i, y)?;
        self.columns.decide(i, |j| Some(y[j]))
    }

    /// Bit-MAP of `x_i` from every output except `y_i`.
    pub fn local_map(&self, i: usize, y: &[ChannelUse]) -> Result<Decision> {
        self.check(i, y)?;
        self.columns.decide(i, |j| (j != i).then(|| y[j]))
    }

    fn check(&self, i: usize, y: &[ChannelUse]) -> Result<()> {
        if y.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: y.len(),
            });
        }
        if i >= self.n() {
            return Err(Error::invalid(format!(
                "coordinate {i} outside [0, {})",
                self.n()
            )));
        }
        Ok(())
    }
}

pub fn exact_bit_map(code: &RmCode, i: usize, y: &[ChannelUse]) -> Result<Guess> {
    Ok(ExactDecoder::new(code)?.bit_map(i, y)?.guess)
}

/// `y` is the full output; `y[i]` is ignored.
pub fn exact_local_map(code: &RmCode, i: usize, y: &[ChannelUse]) -> Result<Guess> {
    Ok(ExactDecoder::new(code)?.local_map(i, y)?.guess)
}

/// Maximum-likelihood codeword, or `None` when the best likelihood is shared
/// (within the tie tolerance) by several codewords.
pub fn exact_block_map(code: &RmCode, y: &[ChannelUse]) -> Result<Option<BitVector>> {
    check_output_len(code, y)?;
    if code.dimension() > EXACT_DIMENSION_LIMIT {
        return Err(Error::budget(
            "codeword enumeration",
            2f64.powi(code.dimension() as i32),
            2f64.powi(EXACT_DIMENSION_LIMIT as i32),
        ));
    }
    let mut best: Option<(f64, BitVector)> = None;
    let mut shared = false;
    for c in enumerate_codewords(code.generator())? {
        let score: f64 = y
            .iter()
            .enumerate()
            .map(|(j, u)| {
                let (l0, l1) = log_likelihoods(u);
                if c.get(j) {
                    l1
                } else {
                    l0
                }
            })
            .sum();
        match &best {
            Some((b, _)) if (score - b).abs() <= TIE_TOLERANCE => shared = true,
            Some((b, _)) if score < *b => {}
            _ if score == f64::NEG_INFINITY => {}
            _ => {
                best = Some((score, c));
                shared = false;
            }
        }
    }
    match best {
        None => Err(Error::ContradictoryEvidence),
        Some(_) if shared => Ok(None),
        Some((_, c)) => Ok(Some(c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camellia::{enumerate_cosets, petals_containing};
    use crate::channel::{likelihood, make_bec, make_bsc};
    use crate::gf2::random_subspace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uses(eps: f64, outputs: &[bool]) -> Vec<ChannelUse> {
        outputs
            .iter()
            .map(|&output| ChannelUse {
                component: 0,
                epsilon: eps,
                flip: output,
                output,
            })
            .collect()
    }

    /// Straight posterior sums from the codeword list, no logs.
    fn posterior_ratio_direct(
        generator: &Gf2Matrix,
        target: usize,
        y: &[Option<ChannelUse>],
    ) -> f64 {
        let mut s = [0.0f64; 2];
        for c in enumerate_codewords(generator).unwrap() {
            let p: f64 = y
                .iter()
                .enumerate()
                .filter_map(|(j, u)| u.map(|u| likelihood(&u, c.get(j))))
                .product();
            s[c.get(target) as usize] += p;
        }
        s[1] / s[0]
    }

    #[test]
    fn petal_noiseless_recovers_bit() {
        let code = RmCode::new(4, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let msg = BitVector::parse("10110").unwrap();
        let x = code.encode(&msg).unwrap();
        let y = make_bsc(0.0).unwrap().transmit(&x, &mut rng);
        for _ in 0..20 {
            let i = rng.gen_range(0..16);
            let petal = sample_petal_containing(4, 3, i, &mut rng).unwrap();
            let d = petal_bit_map(&code, &petal, i, &y).unwrap();
            assert_eq!(d.guess.bit(), Some(x.get(i)));
        }
    }

    #[test]
    fn petal_all_erased_ties() {
        let code = RmCode::new(3, 1).unwrap();
        let y = uses(0.5, &[false, true, false, false, true, true, false, false]);
        for petal in petals_containing(3, 2, 0).unwrap() {
            let d = petal_bit_map(&code, &petal, 0, &y).unwrap();
            assert_eq!(d.guess, Guess::Tie);
            assert_eq!(d.posterior_ratio, 1.0);
        }
    }

    #[test]
    fn petal_full_space_clean_zero() {
        let code = RmCode::new(3, 1).unwrap();
        let whole =
            crate::camellia::AffineCoset::new(Gf2Matrix::identity(3), BitVector::zeros(3)).unwrap();
        let y = uses(0.1, &[false; 8]);
        let d = petal_bit_map(&code, &whole, 0, &y).unwrap();
        assert_eq!(d.guess, Guess::Zero);
        assert!(d.posterior_ratio < 1.0);
        let mut masked: Vec<Option<ChannelUse>> = y.iter().copied().map(Some).collect();
        masked[0] = None;
        let direct = posterior_ratio_direct(code.generator(), 0, &masked);
        assert!((d.posterior_ratio - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn petal_errors() {
        let code = RmCode::new(3, 1).unwrap();
        let petal = crate::camellia::AffineCoset::new(
            Gf2Matrix::parse("100\n").unwrap(),
            BitVector::zeros(3),
        )
        .unwrap();
        let y = uses(0.1, &[false; 8]);
        assert_eq!(
            petal_bit_map(&code, &petal, 2, &y).unwrap_err(),
            Error::NotInPetal(2)
        );
        assert!(petal_bit_map(&code, &petal, 0, &y[..4]).is_err());
        // noiseless evidence no codeword explains
        let y = uses(0.0, &[true, false, false, false, false, false, false, true]);
        let whole =
            crate::camellia::AffineCoset::new(Gf2Matrix::identity(3), BitVector::zeros(3)).unwrap();
        assert_eq!(
            petal_bit_map(&code, &whole, 0, &y).unwrap_err(),
            Error::ContradictoryEvidence
        );
    }

    #[test]
    fn enumeration_matches_direct_posterior() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = RmCode::new(4, 2).unwrap();
        let cols = ColumnCode::from_generator(code.generator(), 24).unwrap();
        let ch = crate::channel::SymmetricChannel::mixture(&[(0.3, 0.05), (0.5, 0.2), (0.2, 0.5)])
            .unwrap();
        for _ in 0..50 {
            let y = ch.transmit(&BitVector::zeros(16), &mut rng);
            let i = rng.gen_range(0..16);
            let ev: Vec<Option<ChannelUse>> = (0..16).map(|j| (j != i).then(|| y[j])).collect();
            let d = cols.decide_by_enumeration(i, |j| ev[j]).unwrap();
            let direct = posterior_ratio_direct(code.generator(), i, &ev);
            assert!((d.posterior_ratio - direct).abs() <= 1e-9 * direct.max(1.0));
        }
    }

    #[test]
    fn elimination_matches_enumeration_on_erasures() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (m, r) in [(3, 1), (4, 1), (4, 2), (5, 2)] {
            let code = RmCode::new(m, r).unwrap();
            let cols = ColumnCode::from_generator(code.generator(), 24).unwrap();
            for p in [0.2, 0.5, 0.8] {
                let ch = make_bec(p).unwrap();
                for _ in 0..40 {
                    let msg =
                        BitVector::from_bits((0..code.dimension()).map(|_| rng.gen::<bool>()));
                    let x = code.encode(&msg).unwrap();
                    let y = ch.transmit(&x, &mut rng);
                    let i = rng.gen_range(0..code.n());
                    let ev = |j: usize| (j != i).then(|| y[j]);
                    let a = cols.decide_by_elimination(i, ev).unwrap();
                    let b = cols.decide_by_enumeration(i, ev).unwrap();
                    assert_eq!(a.guess, b.guess);
                    assert_eq!(a.posterior_ratio, b.posterior_ratio);
                    if let Some(bit) = a.guess.bit() {
                        assert_eq!(bit, x.get(i));
                    }
                }
            }
        }
    }

    #[test]
    fn petal_decoder_agrees_with_restriction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = make_bsc(0.15).unwrap();
        for (m, r, d) in [(4, 1, 2), (5, 2, 3), (5, 1, 4), (4, 3, 2)] {
            let code = RmCode::new(m, r).unwrap();
            let fast = PetalDecoder::new(&code, d).unwrap();
            for _ in 0..30 {
                let i = rng.gen_range(0..code.n());
                let petal = sample_petal_containing(m, d, i, &mut rng).unwrap();
                let y = ch.transmit(&BitVector::zeros(code.n()), &mut rng);
                let slow = petal_bit_map(&code, &petal, i, &y).unwrap();
                let quick = fast.decide(&petal, i, &y).unwrap();
                assert_eq!(slow.guess, quick.guess);
                assert!(
                    (slow.posterior_ratio - quick.posterior_ratio).abs()
                        <= 1e-9 * slow.posterior_ratio.max(1.0)
                );
            }
        }
    }

    #[test]
    fn e_variable_examples() {
        let code = RmCode::new(3, 1).unwrap();
        let bsc = make_bsc(0.3).unwrap();
        let clean = vec![
            NoiseState {
                component: 0,
                flip: false
            };
            4
        ];
        for petal in petals_containing(3, 2, 0).unwrap() {
            assert_eq!(
                e_variable(&code, &bsc, &petal, 0, &clean).unwrap(),
                EVariable::CORRECT
            );
        }
        let bec = make_bec(1.0).unwrap();
        let erased = vec![
            NoiseState {
                component: 1,
                flip: false
            };
            4
        ];
        for petal in petals_containing(3, 2, 0).unwrap() {
            assert_eq!(
                e_variable(&code, &bec, &petal, 0, &erased).unwrap(),
                EVariable::TIE
            );
        }
        // exact expectation over the three other petal coordinates is positive
        let petal = &petals_containing(3, 2, 0).unwrap()[0];
        let mut mean = 0.0;
        for (p, z3) in bsc.enumerate_noise(3).unwrap() {
            let mut z = vec![NoiseState {
                component: 0,
                flip: false,
            }];
            z.extend(z3);
            mean += p * e_variable(&code, &bsc, petal, 0, &z).unwrap().value() as f64;
        }
        assert!(mean > 0.0, "{mean}");
    }

    #[test]
    fn boost_noiseless_and_single_petal() {
        let code = RmCode::new(6, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let msg = BitVector::from_bits((0..7).map(|_| rng.gen::<bool>()));
        let x = code.encode(&msg).unwrap();
        let y = make_bsc(0.0).unwrap().transmit(&x, &mut rng);
        for k in [1, 3, 64] {
            let out = boost_decode_bit(&code, 5, &y, k, 4, &mut rng).unwrap();
            assert!(out.is_correct(x.get(5)));
            assert_eq!(out.votes_zero + out.votes_one, k);
        }
        assert!(boost_decode_bit(&code, 5, &y, 0, 4, &mut rng).is_err());

        // K = 1 consumes the rng exactly like one petal draw and one petal decision
        let ch = make_bsc(0.2).unwrap();
        let y = ch.transmit(&BitVector::zeros(64), &mut rng);
        let decoder = PetalDecoder::new(&code, 4).unwrap();
        for seed in 0..20 {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            let out = boost_decode_bit(&code, 9, &y, 1, 4, &mut a).unwrap();
            let petal = sample_petal_containing(6, 4, 9, &mut b).unwrap();
            let g = decoder.decide(&petal, 9, &y).unwrap().guess;
            assert_eq!(out.tie, g == Guess::Tie);
            if !out.tie {
                assert_eq!(Some(out.bit), g.bit());
            }
        }
    }

    #[test]
    fn boost_tie_resolves_to_zero() {
        let code = RmCode::new(5, 1).unwrap();
        let y = uses(0.5, &[true; 32]);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let out = boost_decode_bit(&code, 3, &y, 8, 3, &mut rng).unwrap();
        assert!(out.tie);
        assert!(!out.bit);
        assert_eq!(out.abstentions, 8);
        assert!(!out.is_correct(false));
    }

    #[test]
    fn exact_examples() {
        let code = RmCode::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let msg = BitVector::parse("1101").unwrap();
        let x = code.encode(&msg).unwrap();
        let y = make_bsc(0.0).unwrap().transmit(&x, &mut rng);
        for i in 0..8 {
            assert_eq!(exact_bit_map(&code, i, &y).unwrap().bit(), Some(x.get(i)));
            assert_eq!(exact_local_map(&code, i, &y).unwrap().bit(), Some(x.get(i)));
        }
        let erased = uses(0.5, &[false; 8]);
        assert_eq!(exact_bit_map(&code, 2, &erased).unwrap(), Guess::Tie);

        for flip in 0..8 {
            let mut out = vec![false; 8];
            out[flip] = true;
            let y = uses(0.1, &out);
            for i in 0..8 {
                assert_eq!(
                    exact_bit_map(&code, i, &y).unwrap(),
                    Guess::Zero,
                    "flip {flip} i {i}"
                );
            }
        }

        let rep = RmCode::new(1, 0).unwrap();
        let y = vec![
            ChannelUse {
                component: 0,
                epsilon: 0.5,
                flip: false,
                output: false,
            },
            ChannelUse {
                component: 0,
                epsilon: 0.0,
                flip: false,
                output: true,
            },
        ];
        assert_eq!(exact_local_map(&rep, 0, &y).unwrap(), Guess::One);
        assert_eq!(exact_local_map(&rep, 1, &y).unwrap(), Guess::Tie);
    }

    #[test]
    fn local_map_error_below_half() {
        let code = RmCode::new(3, 1).unwrap();
        let ch = make_bsc(0.1).unwrap();
        let dec = ExactDecoder::new(&code).unwrap();
        for i in 0..8 {
            let mut err = 0.0;
            for (p, z) in ch.enumerate_noise(8).unwrap() {
                let y: Vec<ChannelUse> = z.iter().map(|&s| ch.use_from_noise(false, s)).collect();
                if !dec.local_map(i, &y).unwrap().guess.is_correct(false) {
                    err += p;
                }
            }
            assert!(err < 0.5, "{err}");
        }
    }

    #[test]
    fn bit_map_is_bayes_optimal_against_boosting() {
        // exact error of full bit-MAP vs exact error of a single fixed-petal rule
        let code = RmCode::new(3, 1).unwrap();
        let ch = make_bsc(0.1).unwrap();
        let dec = ExactDecoder::new(&code).unwrap();
        let petal_dec = PetalDecoder::new(&code, 2).unwrap();
        for petal in enumerate_cosets(3, 2)
            .unwrap()
            .into_iter()
            .filter(|p| p.contains(0))
        {
            let (mut map_err, mut petal_err) = (0.0, 0.0);
            for (p, z) in ch.enumerate_noise(8).unwrap() {
                let y: Vec<ChannelUse> = z.iter().map(|&s| ch.use_from_noise(false, s)).collect();
                if !dec.bit_map(0, &y).unwrap().guess.is_correct(false) {
                    map_err += p;
                }
                if !petal_dec
                    .decide(&petal, 0, &y)
                    .unwrap()
                    .guess
                    .is_correct(false)
                {
                    petal_err += p;
                }
            }
            assert!(map_err <= petal_err + 1e-15);
        }
    }

    #[test]
    fn block_map_examples() {
        let code = RmCode::new(3, 1).unwrap();
        let y = uses(
            0.1,
            &[false, true, false, false, false, false, false, false],
        );
        assert_eq!(
            exact_block_map(&code, &y).unwrap(),
            Some(BitVector::zeros(8))
        );
        let erased = uses(0.5, &[false; 8]);
        assert_eq!(exact_block_map(&code, &erased).unwrap(), None);
    }

    #[test]
    fn petal_decoder_rejects_mismatched_petal() {
        let code = RmCode::new(4, 1).unwrap();
        let dec = PetalDecoder::new(&code, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let basis = random_subspace(4, 3, &mut rng).unwrap();
        let petal = crate::camellia::AffineCoset::new(basis, BitVector::zeros(4)).unwrap();
        let y = uses(0.1, &[false; 16]);
        assert!(dec.decide(&petal, 0, &y).is_err());
    }
}
