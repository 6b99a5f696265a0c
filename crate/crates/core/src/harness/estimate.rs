//! Monte-Carlo estimators. Trial `t` draws from its own ChaCha stream keyed by
//! the seed and `t`, and results are reduced in trial order, so the output
//! does not depend on the worker count.

use std::collections::HashMap;
use std::time::Instant;

use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{DecoderDescriptor, ExperimentConfig, Target};
use super::report::{CoordLabel, Report, ReportRow};
use super::stats::{jackknife_covariance, wilson_interval, Moments, Z95};
use crate::camellia::{correlation_rho, sample_petal_containing};
use crate::channel::{NoiseState, SymmetricChannel};
use crate::decoder::{exact_block_map, BoostedDecoder, ExactDecoder, PetalDecoder};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::rm::RmCode;

/// Environment variable that sets the worker count when no explicit count
/// is given.
pub const THREADS_ENV: &str = "CAMELLIA_THREADS";

/// Worker pool settings for the estimators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Engine {
    threads: Option<usize>,
}

impl Engine {
    /// `None` uses rayon's default.
    pub fn new(threads: Option<usize>) -> Self {
        Self { threads }
    }

    /// An explicit count wins over `CAMELLIA_THREADS`.
    pub fn from_env(threads: Option<usize>) -> Result<Self> {
        if threads.is_some() {
            return Ok(Self::new(threads));
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => {
                let n: usize = v.trim().parse().map_err(|_| {
                    Error::Config(format!("{THREADS_ENV}={v:?} is not a worker count"))
                })?;
                Ok(Self::new(Some(n)))
            }
            Err(_) => Ok(Self::new(None)),
        }
    }

    pub fn threads(&self) -> Option<usize> {
        self.threads
    }

    /// Runs `f` on every trial index and returns the results in trial order.
    pub fn map_trials<T, F>(&self, trials: u64, seed: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
    {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(Error::Config("worker count must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| f(t, &mut trial_rng(seed, t)))
                .collect()
        })
    }

    /// Dispatches on the configured target.
    pub fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        match cfg.target {
            Target::PBit | Target::PLoc | Target::PGlo => estimate_bit_error(cfg, self),
            Target::EMean => estimate_e_mean(cfg, self),
            Target::Covariance => estimate_covariance(cfg, self),
        }
    }
}

/// The random stream of trial `t`.
pub fn trial_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

enum BitDecoder {
    Exact(ExactDecoder),
    Boosted(BoostedDecoder),
}

fn build_bit_decoder(cfg: &ExperimentConfig, code: &RmCode) -> Result<BitDecoder> {
    Ok(match cfg.decoder {
        DecoderDescriptor::Exact => BitDecoder::Exact(ExactDecoder::new(code)?),
        DecoderDescriptor::Boosted { k, .. } => {
            BitDecoder::Boosted(BoostedDecoder::new(code, k, cfg.petal_dimension()?)?)
        }
    })
}

fn transmitted<R: Rng>(cfg: &ExperimentConfig, code: &RmCode, rng: &mut R) -> Result<BitVector> {
    if cfg.random_codeword {
        let message = BitVector::from_bits((0..code.dimension()).map(|_| rng.gen::<bool>()));
        code.encode(&message)
    } else {
        Ok(BitVector::zeros(code.n()))
    }
}

/// `P_bit,i`, `P_loc,i` or `P_glo` with Wilson intervals. Ties are errors.
/// The boosted decoder never reads `y_i`, so for it `p_bit` and `p_loc`
/// measure the same decision.
pub fn estimate_bit_error(cfg: &ExperimentConfig, engine: &Engine) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let code = cfg.code.build()?;
    let channel = cfg.channel.build()?;
    let decoder = build_bit_decoder(cfg, &code)?;
    let coords = match cfg.target {
        Target::PGlo => (0..code.n()).collect(),
        _ => cfg.coordinates.resolve(code.n())?,
    };
    let local = cfg.target == Target::PLoc;

    let outcomes: Vec<Vec<bool>> = engine.map_trials(cfg.trials, cfg.seed, |_, rng| {
        let x = transmitted(cfg, &code, rng)?;
        let y = channel.transmit(&x, rng);
        if cfg.target == Target::PGlo {
            if let BitDecoder::Exact(_) = decoder {
                return Ok(vec![exact_block_map(&code, &y)?.as_ref() != Some(&x)]);
            }
        }
        let mut errors = Vec::with_capacity(coords.len());
        for &i in &coords {
            let correct = match &decoder {
                BitDecoder::Exact(dec) => {
                    let d = if local {
                        dec.local_map(i, &y)?
                    } else {
                        dec.bit_map(i, &y)?
                    };
                    d.guess.is_correct(x.get(i))
                }
                BitDecoder::Boosted(dec) => dec.decode_bit(i, &y, rng)?.is_correct(x.get(i)),
            };
            errors.push(!correct);
        }
        if cfg.target == Target::PGlo {
            return Ok(vec![errors.iter().any(|&e| e)]);
        }
        Ok(errors)
    })?;

    let metric = cfg.target.metric();
    let row = |coord, errors: u64| {
        let (lo, hi) = wilson_interval(errors, cfg.trials);
        ReportRow {
            coord,
            metric: metric.to_string(),
            estimate: errors as f64 / cfg.trials as f64,
            ci_lo: lo,
            ci_hi: hi,
            trials: cfg.trials,
            seed: cfg.seed,
        }
    };
    let mut rows = Vec::new();
    if cfg.target == Target::PGlo {
        let errors = outcomes.iter().filter(|o| o[0]).count() as u64;
        rows.push(row(CoordLabel::All, errors));
    } else {
        let mut counts = vec![0u64; coords.len()];
        for o in &outcomes {
            for (c, &e) in counts.iter_mut().zip(o) {
                *c += e as u64;
            }
        }
        for (&i, &c) in coords.iter().zip(&counts) {
            rows.push(row(CoordLabel::Index(i), c));
        }
        if coords.len() > 1 {
            // first coordinate attaining the maximum
            let (best, _) =
                counts
                    .iter()
                    .enumerate()
                    .fold((0, 0), |acc, (j, &c)| if c > acc.1 { (j, c) } else { acc });
            let mut max_row = rows[best].clone();
            max_row.coord = CoordLabel::Max;
            rows.push(max_row);
        }
    }
    Ok(Report {
        target: metric.to_string(),
        trials: cfg.trials,
        seed: cfg.seed,
        rows,
        wall_clock: start.elapsed(),
    })
}

fn sample_noise_for(
    channel: &SymmetricChannel,
    members: &[usize],
    shared: &mut HashMap<usize, NoiseState>,
    rng: &mut ChaCha8Rng,
) -> Vec<NoiseState> {
    members
        .iter()
        .map(|&j| *shared.entry(j).or_insert_with(|| channel.sample_noise(rng)))
        .collect()
}

/// Mean of `E_{P,i}` over a uniform petal through `i` and fresh noise, with a
/// normal-approximation 95% interval.
pub fn estimate_e_mean(cfg: &ExperimentConfig, engine: &Engine) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let code = cfg.code.build()?;
    let channel = cfg.channel.build()?;
    let d = cfg.petal_dimension()?;
    let petals = PetalDecoder::new(&code, d)?;
    let coords = cfg.coordinates.resolve(code.n())?;

    let samples: Vec<Vec<i8>> = engine.map_trials(cfg.trials, cfg.seed, |_, rng| {
        coords
            .iter()
            .map(|&i| {
                let petal = sample_petal_containing(code.m(), d, i, rng)?;
                let mut shared = HashMap::new();
                let z = sample_noise_for(&channel, petal.members(), &mut shared, rng);
                Ok(petals.e_variable(&channel, &petal, i, &z)?.value())
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    for (slot, &i) in coords.iter().enumerate() {
        let mut m = Moments::default();
        for s in &samples {
            m.push(s[slot] as f64);
        }
        let (lo, hi) = m.mean_interval();
        rows.push(ReportRow {
            coord: CoordLabel::Index(i),
            metric: "e_mean".into(),
            estimate: m.mean(),
            ci_lo: lo.max(-1.0),
            ci_hi: hi.min(1.0),
            trials: cfg.trials,
            seed: cfg.seed,
        });
    }
    Ok(Report {
        target: "e_mean".into(),
        trials: cfg.trials,
        seed: cfg.seed,
        rows,
        wall_clock: start.elapsed(),
    })
}

/// `E_{P,P'} Cov(E_{P,i}, E_{P',i})` from independent petal pairs through `i`
/// sharing one noise draw, with a jackknife interval, next to `sqrt(rho)`.
pub fn estimate_covariance(cfg: &ExperimentConfig, engine: &Engine) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let code = cfg.code.build()?;
    let channel = cfg.channel.build()?;
    let d = cfg.petal_dimension()?;
    let petals = PetalDecoder::new(&code, d)?;
    let coords = cfg.coordinates.resolve(code.n())?;
    let bound = correlation_rho(code.m(), d)?
        .to_f64()
        .unwrap_or(f64::NAN)
        .sqrt();

    let samples: Vec<Vec<(f64, f64)>> = engine.map_trials(cfg.trials, cfg.seed, |_, rng| {
        coords
            .iter()
            .map(|&i| {
                let first = sample_petal_containing(code.m(), d, i, rng)?;
                let second = sample_petal_containing(code.m(), d, i, rng)?;
                let mut shared = HashMap::new();
                let z1 = sample_noise_for(&channel, first.members(), &mut shared, rng);
                let z2 = sample_noise_for(&channel, second.members(), &mut shared, rng);
                let e1 = petals.e_variable(&channel, &first, i, &z1)?.value() as f64;
                let e2 = petals.e_variable(&channel, &second, i, &z2)?.value() as f64;
                Ok((e1, e2))
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    for (slot, &i) in coords.iter().enumerate() {
        let pairs: Vec<(f64, f64)> = samples.iter().map(|s| s[slot]).collect();
        let (cov, se) = jackknife_covariance(&pairs);
        let base = |metric: &str, estimate, ci_lo, ci_hi| ReportRow {
            coord: CoordLabel::Index(i),
            metric: metric.into(),
            estimate,
            ci_lo,
            ci_hi,
            trials: cfg.trials,
            seed: cfg.seed,
        };
        rows.push(base("covariance", cov, cov - Z95 * se, cov + Z95 * se));
        rows.push(base("sqrt_rho", bound, bound, bound));
    }
    Ok(Report {
        target: "covariance".into(),
        trials: cfg.trials,
        seed: cfg.seed,
        rows,
        wall_clock: start.elapsed(),
    })
}

/// One point of a `P_bit` sweep over `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendPoint {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub row: ReportRow,
}

pub const TREND_HEADER: &str = "m,n,k,d,coord,metric,estimate,ci_lo,ci_hi,trials,seed";

impl TrendPoint {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.m,
            self.n,
            self.k,
            self.d,
            self.row.csv_line()
        )
    }
}

/// Runs `base` once per `m`, keeping its `r`, channel, decoder and seed, and
/// collects the headline `P_bit` row of each run.
pub fn trend(base: &ExperimentConfig, ms: &[usize], engine: &Engine) -> Result<Vec<TrendPoint>> {
    let mut out = Vec::with_capacity(ms.len());
    for &m in ms {
        let mut cfg = base.clone();
        let super::config::CodeDescriptor::Rm { r, .. } = base.code;
        cfg.code = super::config::CodeDescriptor::Rm { m, r };
        let report = estimate_bit_error(&cfg, engine)?;
        let row = report
            .headline()
            .cloned()
            .ok_or_else(|| Error::Config("trend produced no rows".into()))?;
        let (k, d) = match cfg.decoder {
            DecoderDescriptor::Boosted { k, .. } => (k, cfg.petal_dimension()?),
            DecoderDescriptor::Exact => (0, 0),
        };
        out.push(TrendPoint {
            m,
            n: 1 << m,
            k,
            d,
            row,
        });
    }
    Ok(out)
}

pub fn trend_csv(points: &[TrendPoint]) -> String {
    let mut s = String::from(TREND_HEADER);
    s.push('\n');
    for p in points {
        s.push_str(&p.csv_line());
        s.push('\n');
    }
    s
}

/// Strictly decreasing estimates whose consecutive intervals do not overlap.
pub fn strictly_decreasing(points: &[TrendPoint]) -> bool {
    points
        .windows(2)
        .all(|w| w[1].row.estimate < w[0].row.estimate && w[0].row.separated_above(&w[1].row))
}
