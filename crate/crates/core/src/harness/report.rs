//! Estimator output and its CSV / JSON renderings.

use std::fmt;
use std::time::Duration;

use serde::{Serialize, Serializer};

use super::stats::{format_float, round_sig};

pub const CSV_HEADER: &str = "coord,metric,estimate,ci_lo,ci_hi,trials,seed";

/// Which coordinate a row describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordLabel {
    Index(usize),
    /// Maximum over the requested coordinates.
    Max,
    /// The whole block.
    All,
}

impl fmt::Display for CoordLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordLabel::Index(i) => write!(f, "{i}"),
            CoordLabel::Max => f.write_str("max"),
            CoordLabel::All => f.write_str("all"),
        }
    }
}

impl Serialize for CoordLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CoordLabel::Index(i) => s.serialize_u64(*i as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

fn sig<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub coord: CoordLabel,
    pub metric: String,
    #[serde(serialize_with = "sig")]
    pub estimate: f64,
    #[serde(serialize_with = "sig")]
    pub ci_lo: f64,
    #[serde(serialize_with = "sig")]
    pub ci_hi: f64,
    pub trials: u64,
    pub seed: u64,
}

impl ReportRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.coord,
            self.metric,
            format_float(self.estimate),
            format_float(self.ci_lo),
            format_float(self.ci_hi),
            self.trials,
            self.seed
        )
    }

    /// True when this interval lies strictly above `other`'s.
    pub fn separated_above(&self, other: &ReportRow) -> bool {
        self.ci_lo > other.ci_hi
    }
}

/// Result of one simulated experiment.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub target: String,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl Report {
    pub fn rows_for(&self, metric: &str) -> impl Iterator<Item = &ReportRow> {
        let metric = metric.to_string();
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    pub fn row(&self, coord: CoordLabel, metric: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.coord == coord && r.metric == metric)
    }

    /// The summary row: the block row for `p_glo`, the maximum row when
    /// several coordinates were estimated, otherwise the single row.
    pub fn headline(&self) -> Option<&ReportRow> {
        self.row(CoordLabel::All, &self.target)
            .or_else(|| self.row(CoordLabel::Max, &self.target))
            .or_else(|| self.rows_for(&self.target).next())
    }

    /// Every estimated `E[E_{P,i}]` is positive at 95% confidence.
    pub fn e_mean_positive(&self) -> bool {
        let mut rows = self.rows_for("e_mean").peekable();
        rows.peek().is_some() && rows.all(|r| r.ci_lo > 0.0)
    }

    /// Every covariance estimate is compatible with `sqrt(rho)`: the lower
    /// end of its interval does not exceed the bound.
    pub fn covariance_within_bound(&self) -> bool {
        let mut any = false;
        for r in self.rows_for("covariance") {
            any = true;
            match self.row(r.coord, "sqrt_rho") {
                Some(b) if r.ci_lo <= b.estimate => {}
                _ => return false,
            }
        }
        any
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
