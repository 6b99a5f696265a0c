//! Experiment configuration files.

use serde::{Deserialize, Serialize};

use crate::camellia::petal_dimension;
use crate::channel::ChannelDescriptor;
use crate::decoder::EXACT_DIMENSION_LIMIT;
use crate::error::{Error, Result};
use crate::rm::RmCode;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum CodeDescriptor {
    Rm { m: usize, r: usize },
}

impl CodeDescriptor {
    pub fn build(&self) -> Result<RmCode> {
        match *self {
            CodeDescriptor::Rm { m, r } => RmCode::new(m, r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DecoderDescriptor {
    /// Bit-MAP over the whole code by codeword enumeration.
    Exact,
    /// Majority over `k` sampled petals of dimension `d` (default from `m`).
    Boosted {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    PBit,
    PLoc,
    PGlo,
    EMean,
    Covariance,
}

impl Target {
    pub fn metric(self) -> &'static str {
        match self {
            Target::PBit => "p_bit",
            Target::PLoc => "p_loc",
            Target::PGlo => "p_glo",
            Target::EMean => "e_mean",
            Target::Covariance => "covariance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllKeyword {
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coordinates {
    All(AllKeyword),
    List(Vec<usize>),
}

impl Default for Coordinates {
    fn default() -> Self {
        Coordinates::All(AllKeyword::All)
    }
}

impl Coordinates {
    pub fn resolve(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            Coordinates::All(_) => Ok((0..n).collect()),
            Coordinates::List(list) => {
                if list.is_empty() {
                    return Err(Error::Config("coordinate list is empty".into()));
                }
                if let Some(&bad) = list.iter().find(|&&i| i >= n) {
                    return Err(Error::Config(format!("coordinate {bad} outside [0, {n})")));
                }
                Ok(list.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeDescriptor,
    pub channel: ChannelDescriptor,
    pub decoder: DecoderDescriptor,
    pub target: Target,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub coordinates: Coordinates,
    /// Transmit a uniformly random codeword instead of zero.
    #[serde(default)]
    pub random_codeword: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks everything that can be checked without running trials.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let code = self.code.build().map_err(as_config)?;
        self.channel.build().map_err(as_config)?;
        self.coordinates.resolve(code.n())?;
        match (&self.decoder, self.target) {
            (DecoderDescriptor::Exact, Target::EMean | Target::Covariance) => {
                return Err(Error::Config(format!(
                    "target {} needs a boosted decoder",
                    self.target.metric()
                )))
            }
            (DecoderDescriptor::Exact, _) => {
                if code.dimension() > EXACT_DIMENSION_LIMIT {
                    return Err(Error::budget(
                        "exact decoder codewords",
                        2f64.powi(code.dimension() as i32),
                        2f64.powi(EXACT_DIMENSION_LIMIT as i32),
                    ));
                }
            }
            (DecoderDescriptor::Boosted { k, .. }, _) => {
                if *k == 0 {
                    return Err(Error::Config("boosted decoder needs k >= 1".into()));
                }
                self.petal_dimension()?;
            }
        }
        if matches!(self.target, Target::Covariance) && self.trials < 2 {
            return Err(Error::Config("covariance needs at least 2 trials".into()));
        }
        Ok(())
    }

    /// Petal dimension for a boosted decoder: the override, or the default
    /// for `m` (which needs `m >= 5`).
    pub fn petal_dimension(&self) -> Result<usize> {
        let CodeDescriptor::Rm { m, .. } = self.code;
        match self.decoder {
            DecoderDescriptor::Boosted { d: Some(d), .. } => {
                if d == 0 || d > m {
                    return Err(Error::Config(format!(
                        "petal dimension {d} outside [1, {m}]"
                    )));
                }
                Ok(d)
            }
            DecoderDescriptor::Boosted { d: None, .. } => petal_dimension(m).map_err(|_| {
                Error::Config(format!(
                    "no default petal dimension for m={m}; set decoder.d"
                ))
            }),
            DecoderDescriptor::Exact => Err(Error::Config("exact decoder has no petals".into())),
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::BudgetExceeded { .. } => e,
        other => Error::Config(other.to_string()),
    }
}
