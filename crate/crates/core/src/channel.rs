//! Symmetric memoryless channels as finite mixtures of binary symmetric
//! channels. Each use draws a component, reveals its crossover `epsilon` to
//! the receiver, and flips the input bit with probability `epsilon`. The
//! erasure channel is the mixture of `epsilon = 0` and `epsilon = 1/2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Joint noise enumeration is refused beyond this many states.
pub const NOISE_ENUMERATION_LIMIT: f64 = (1u64 << 26) as f64;

const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricChannel {
    components: Vec<Component>,
    cumulative: Vec<f64>,
}

/// One channel use as seen by the receiver: the revealed crossover and the
/// noisy bit. `flip` is kept for bookkeeping; decoders never read it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelUse {
    pub component: usize,
    pub epsilon: f64,
    pub flip: bool,
    pub output: bool,
}

impl ChannelUse {
    /// Erasure-like uses carry no information about the input.
    pub fn is_erasure(&self) -> bool {
        self.epsilon == 0.5
    }
}

/// Noise variable of one coordinate: which component fired and whether it
/// flipped. Identical in law to a [`ChannelUse`] with input 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NoiseState {
    pub component: usize,
    pub flip: bool,
}

impl SymmetricChannel {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("channel needs at least one component"));
        }
        for c in &components {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(Error::invalid(format!(
                    "negative component weight {}",
                    c.weight
                )));
            }
            if !(0.0..=0.5).contains(&c.epsilon) {
                return Err(Error::invalid(format!(
                    "crossover {} outside [0, 1/2]",
                    c.epsilon
                )));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::invalid(format!(
                "component weights sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = components
            .iter()
            .map(|c| {
                acc += c.weight;
                acc
            })
            .collect();
        Ok(Self {
            components,
            cumulative,
        })
    }

    /// Builds a mixture from `(weight, epsilon)` pairs.
    pub fn mixture(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(weight, epsilon)| Component { weight, epsilon })
                .collect(),
        )
    }

    pub fn bsc(eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(Error::invalid(format!(
                "BSC crossover {eps} outside [0, 1/2]"
            )));
        }
        Self::mixture(&[(1.0, eps)])
    }

    pub fn bec(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!(
                "erasure probability {p} outside [0, 1]"
            )));
        }
        Self::mixture(&[(1.0 - p, 0.0), (p, 0.5)])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `1 - sum_k w_k h2(eps_k)`: the crossover is revealed and independent of
    /// the input, so the uniform input achieves this.
    pub fn capacity(&self) -> f64 {
        1.0 - self
            .components
            .iter()
            .map(|c| c.weight * h2(c.epsilon))
            .sum::<f64>()
    }

    /// True when every component with positive weight is noiseless or pure noise.
    pub fn is_erasure_type(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.weight == 0.0 || c.epsilon == 0.0 || c.epsilon == 0.5)
    }

    fn draw_component<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.components.len() == 1 {
            return 0;
        }
        let u: f64 = rng.gen();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or_else(|| {
                // rounding left u above the last partial sum
                self.components
                    .iter()
                    .rposition(|c| c.weight > 0.0)
                    .unwrap_or(0)
            })
    }

    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> NoiseState {
        let component = self.draw_component(rng);
        let eps = self.components[component].epsilon;
        let flip = eps > 0.0 && rng.gen::<f64>() < eps;
        NoiseState { component, flip }
    }

    pub fn use_from_noise(&self, input: bool, z: NoiseState) -> ChannelUse {
        ChannelUse {
            component: z.component,
            epsilon: self.components[z.component].epsilon,
            flip: z.flip,
            output: input ^ z.flip,
        }
    }

    /// Sends `x` through `n = x.len()` independent uses.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &BitVector, rng: &mut R) -> Vec<ChannelUse> {
        x.iter()
            .map(|bit| {
                let z = self.sample_noise(rng);
                self.use_from_noise(bit, z)
            })
            .collect()
    }

    /// Distinct per-coordinate noise states with positive mass. Zero-mass
    /// branches are dropped and the two flip branches of a pure-noise
    /// component are merged into one state with `flip = false`.
    pub fn noise_alphabet(&self) -> Vec<(f64, NoiseState)> {
        let mut out = Vec::new();
        for (k, c) in self.components.iter().enumerate() {
            if c.weight == 0.0 {
                continue;
            }
            let state = |flip| NoiseState { component: k, flip };
            if c.epsilon == 0.5 || c.epsilon == 0.0 {
                out.push((c.weight, state(false)));
            } else {
                out.push((c.weight * (1.0 - c.epsilon), state(false)));
                out.push((c.weight * c.epsilon, state(true)));
            }
        }
        out
    }

    /// Every joint noise realization on `n_coords` coordinates with its exact
    /// probability, in mixed-radix order (coordinate 0 varies fastest).
    pub fn enumerate_noise(&self, n_coords: usize) -> Result<NoiseEnumeration> {
        let alphabet = self.noise_alphabet();
        let needed = (alphabet.len() as f64).powi(n_coords as i32);
        if needed > NOISE_ENUMERATION_LIMIT {
            return Err(Error::budget(
                "noise enumeration",
                needed,
                NOISE_ENUMERATION_LIMIT,
            ));
        }
        Ok(NoiseEnumeration {
            alphabet,
            digits: vec![0; n_coords],
            done: false,
        })
    }
}

pub fn make_bsc(eps: f64) -> Result<SymmetricChannel> {
    SymmetricChannel::bsc(eps)
}

pub fn make_bec(p: f64) -> Result<SymmetricChannel> {
    SymmetricChannel::bec(p)
}

pub fn capacity(ch: &SymmetricChannel) -> f64 {
    ch.capacity()
}

/// `P(y | x = hypothesis)` for one use.
#[inline]
pub fn likelihood(u: &ChannelUse, hypothesis: bool) -> f64 {
    if u.output == hypothesis {
        1.0 - u.epsilon
    } else {
        u.epsilon
    }
}

#[derive(Debug)]
pub struct NoiseEnumeration {
    alphabet: Vec<(f64, NoiseState)>,
    digits: Vec<usize>,
    done: bool,
}

impl NoiseEnumeration {
    pub fn alphabet(&self) -> &[(f64, NoiseState)] {
        &self.alphabet
    }
}

impl Iterator for NoiseEnumeration {
    type Item = (f64, Vec<NoiseState>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.alphabet.is_empty() {
            return None;
        }
        let prob = self.digits.iter().map(|&d| self.alphabet[d].0).product();
        let states = self.digits.iter().map(|&d| self.alphabet[d].1).collect();
        // advance the odometer
        self.done = true;
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < self.alphabet.len() {
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some((prob, states))
    }
}

/// Channel descriptor as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelDescriptor {
    Bsc { eps: f64 },
    Bec { p: f64 },
    Mixture { components: Vec<[f64; 2]> },
}

impl ChannelDescriptor {
    pub fn build(&self) -> Result<SymmetricChannel> {
        match self {
            ChannelDescriptor::Bsc { eps } => SymmetricChannel::bsc(*eps),
            ChannelDescriptor::Bec { p } => SymmetricChannel::bec(*p),
            ChannelDescriptor::Mixture { components } => {
                let pairs: Vec<(f64, f64)> = components.iter().map(|c| (c[0], c[1])).collect();
                SymmetricChannel::mixture(&pairs)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bsc_examples() {
        assert_eq!(make_bsc(0.0).unwrap().capacity(), 1.0);
        assert_eq!(make_bsc(0.5).unwrap().capacity(), 0.0);
        // h2(0.11) = 0.499915...
        let c = make_bsc(0.11).unwrap().capacity();
        assert!(close(c, 0.500_084_8, 1e-6), "{c}");
        assert!(make_bsc(0.6).is_err());
        assert!(make_bsc(-0.1).is_err());
    }

    #[test]
    fn bec_examples() {
        assert_eq!(make_bec(0.0).unwrap().capacity(), 1.0);
        assert_eq!(make_bec(1.0).unwrap().capacity(), 0.0);
        assert!(close(make_bec(0.3).unwrap().capacity(), 0.7, 1e-15));
        assert!(make_bec(1.5).is_err());
        let half = SymmetricChannel::mixture(&[(0.5, 0.0), (0.5, 0.5)]).unwrap();
        assert_eq!(half.capacity(), 0.5);
    }

    #[test]
    fn invalid_mixtures_are_rejected() {
        assert!(SymmetricChannel::mixture(&[(0.5, 0.1), (0.4, 0.2)]).is_err());
        assert!(SymmetricChannel::mixture(&[(1.2, 0.1), (-0.2, 0.2)]).is_err());
        assert!(SymmetricChannel::mixture(&[(1.0, 0.7)]).is_err());
        assert!(SymmetricChannel::mixture(&[]).is_err());
    }

    /// I(X;Y) for input bias q, computed from the joint law of (X, component, output).
    fn mutual_information(ch: &SymmetricChannel, q: f64) -> f64 {
        let px = [1.0 - q, q];
        let mut joint = Vec::new();
        for c in ch.components() {
            for out in [false, true] {
                let row: Vec<f64> = [false, true]
                    .iter()
                    .enumerate()
                    .map(|(xi, &x)| {
                        let p_out = if out == x { 1.0 - c.epsilon } else { c.epsilon };
                        px[xi] * c.weight * p_out
                    })
                    .collect();
                joint.push(row);
            }
        }
        let mut mi = 0.0;
        for row in &joint {
            let py: f64 = row.iter().sum();
            for (xi, &pj) in row.iter().enumerate() {
                if pj > 0.0 {
                    mi += pj * (pj / (py * px[xi])).log2();
                }
            }
        }
        mi
    }

    #[test]
    fn capacity_matches_maximized_mutual_information() {
        let channels = [
            make_bec(0.3).unwrap(),
            make_bsc(0.11).unwrap(),
            SymmetricChannel::mixture(&[(0.2, 0.0), (0.5, 0.1), (0.3, 0.5)]).unwrap(),
        ];
        for ch in &channels {
            let best = (1..1000)
                .map(|k| mutual_information(ch, k as f64 / 1000.0))
                .fold(f64::MIN, f64::max);
            assert!(
                close(best, ch.capacity(), 1e-9),
                "{best} vs {}",
                ch.capacity()
            );
        }
    }

    #[test]
    fn bsc_capacity_is_decreasing() {
        let caps: Vec<f64> = (0..50)
            .map(|k| make_bsc(0.5 * k as f64 / 49.0).unwrap().capacity())
            .collect();
        assert!(caps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn likelihood_examples() {
        let u = |epsilon, output| ChannelUse {
            component: 0,
            epsilon,
            flip: false,
            output,
        };
        assert_eq!(likelihood(&u(0.0, true), true), 1.0);
        assert_eq!(likelihood(&u(0.5, true), true), 0.5);
        assert_eq!(likelihood(&u(0.5, true), false), 0.5);
        assert_eq!(likelihood(&u(0.1, true), false), 0.1);
    }

    #[test]
    fn transmit_noiseless() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = BitVector::parse("1011001").unwrap();
        let y = make_bsc(0.0).unwrap().transmit(&x, &mut rng);
        for (k, u) in y.iter().enumerate() {
            assert_eq!(u.output, x.get(k));
            assert_eq!(u.epsilon, 0.0);
        }
    }

    #[test]
    fn transmit_statistics() {
        let n = 100_000;
        let sigma = (n as f64 * 0.25).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = make_bsc(0.5)
            .unwrap()
            .transmit(&BitVector::zeros(n), &mut rng);
        let flips = y.iter().filter(|u| u.output).count() as f64;
        assert!((flips - n as f64 * 0.5).abs() <= 3.0 * sigma);
        for u in &y {
            assert_eq!(u.output, u.flip);
        }

        let y = make_bec(0.3)
            .unwrap()
            .transmit(&BitVector::zeros(n), &mut rng);
        let erased = y.iter().filter(|u| u.is_erasure()).count() as f64;
        let sigma = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((erased - n as f64 * 0.3).abs() <= 3.0 * sigma);
        assert!(y.iter().filter(|u| !u.is_erasure()).all(|u| !u.output));
    }

    #[test]
    fn noise_enumeration_examples() {
        let ch = make_bsc(0.1).unwrap();
        let single: Vec<_> = ch.enumerate_noise(1).unwrap().collect();
        assert_eq!(single.len(), 2);
        assert!(close(single[0].0, 0.9, 1e-15) && !single[0].1[0].flip);
        assert!(close(single[1].0, 0.1, 1e-15) && single[1].1[0].flip);

        let three: Vec<_> = ch.enumerate_noise(3).unwrap().collect();
        assert_eq!(three.len(), 8);
        assert!(close(three.iter().map(|s| s.0).sum(), 1.0, 1e-12));

        let bec = make_bec(0.3).unwrap();
        let mut masses: Vec<f64> = bec.enumerate_noise(2).unwrap().map(|s| s.0).collect();
        masses.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let expect = [0.49, 0.21, 0.21, 0.09];
        assert_eq!(masses.len(), 4);
        for (a, b) in masses.iter().zip(expect) {
            assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn noise_enumeration_is_normalized() {
        let channels = [
            make_bsc(0.1).unwrap(),
            make_bsc(0.0).unwrap(),
            make_bec(0.4).unwrap(),
            SymmetricChannel::mixture(&[(0.25, 0.0), (0.25, 0.1), (0.5, 0.3)]).unwrap(),
        ];
        for ch in &channels {
            for n in 0..=8 {
                let total: f64 = ch.enumerate_noise(n).unwrap().map(|s| s.0).sum();
                assert!(close(total, 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn noise_enumeration_budget() {
        let ch = SymmetricChannel::mixture(&[(0.5, 0.1), (0.5, 0.2)]).unwrap();
        assert!(ch.enumerate_noise(13).is_ok());
        assert!(ch.enumerate_noise(14).unwrap_err().is_budget());
    }

    #[test]
    fn descriptor_parsing() {
        let bsc: ChannelDescriptor = serde_json::from_str(r#"{"kind":"bsc","eps":0.1}"#).unwrap();
        assert_eq!(bsc.build().unwrap(), make_bsc(0.1).unwrap());
        let bec: ChannelDescriptor = serde_json::from_str(r#"{"kind":"bec","p":0.4}"#).unwrap();
        assert_eq!(bec.build().unwrap(), make_bec(0.4).unwrap());
        let mix: ChannelDescriptor =
            serde_json::from_str(r#"{"kind":"mixture","components":[[0.5,0.0],[0.5,0.5]]}"#)
                .unwrap();
        assert_eq!(mix.build().unwrap().capacity(), 0.5);
        assert!(serde_json::from_str::<ChannelDescriptor>(r#"{"kind":"awgn","snr":3}"#).is_err());
    }
}
