//! Interval estimates and number formatting shared by the estimators.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0, "interval of an empty sample");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // keep lo <= p <= hi exactly despite rounding at the boundaries
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

/// Running first and second moments of a sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Unbiased sample variance; zero for fewer than two points.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Normal-approximation 95% interval for the mean.
    pub fn mean_interval(&self) -> (f64, f64) {
        let half = Z95 * (self.variance() / self.count as f64).sqrt();
        let mean = self.mean();
        (mean - half, mean + half)
    }
}

/// Plug-in covariance `mean(ab) - mean(a) mean(b)` with a delete-one
/// jackknife standard error.
pub fn jackknife_covariance(pairs: &[(f64, f64)]) -> (f64, f64) {
    let n = pairs.len();
    assert!(n >= 2, "jackknife needs two samples");
    let (sa, sb, sab) = pairs
        .iter()
        .fold((0.0, 0.0, 0.0), |(sa, sb, sab), &(a, b)| {
            (sa + a, sb + b, sab + a * b)
        });
    let nf = n as f64;
    let theta = sab / nf - (sa / nf) * (sb / nf);
    let m = nf - 1.0;
    let loo: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| (sab - a * b) / m - ((sa - a) / m) * ((sb - b) / m))
        .collect();
    let bar = loo.iter().sum::<f64>() / nf;
    let var = (nf - 1.0) / nf * loo.iter().map(|t| (t - bar).powi(2)).sum::<f64>();
    (theta, var.sqrt())
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let exp_str = if exp < 0 {
            format!("-{:02}", -exp)
        } else {
            format!("+{:02}", exp)
        };
        return format!("{}e{}", trim_zeros(mantissa), exp_str);
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

/// The value `format_float` prints, as a number.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format_float(x).parse().unwrap_or(x)
    } else {
        x
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn formatting() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1.0 - 0.3), "0.7");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-2.25), "-2.25");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(123456.0), "123456");
        assert_eq!(format_float(1e-7), "1e-07");
        assert_eq!(format_float(2.5e13), "2.5e+13");
        assert_eq!(format_float(0.000123), "0.000123");
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.95);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn wilson_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let reps = 1000;
        let covered = (0..reps)
            .filter(|_| {
                let hits = (0..1000).filter(|_| rng.gen::<f64>() < 0.3).count() as u64;
                let (lo, hi) = wilson_interval(hits, 1000);
                lo <= 0.3 && 0.3 <= hi
            })
            .count();
        assert!(covered >= 930, "coverage {covered}/1000");
    }

    #[test]
    fn moments() {
        let mut m = Moments::default();
        for x in [1.0, -1.0, 1.0, 1.0] {
            m.push(x);
        }
        assert_eq!(m.mean(), 0.5);
        assert!((m.variance() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jackknife_on_independent_and_identical_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pairs: Vec<(f64, f64)> = (0..5000)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (c, se) = jackknife_covariance(&pairs);
        assert!(c.abs() < 4.0 * se);
        let same: Vec<(f64, f64)> = pairs.iter().map(|&(a, _)| (a, a)).collect();
        let (v, _) = jackknife_covariance(&same);
        assert!((v - 1.0 / 3.0).abs() < 0.03);
    }
}
