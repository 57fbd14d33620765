//! Monte Carlo error estimation, cost sweeps, and closed-form bounds.
//!
//! Trials are keyed by index: trial `i` draws its instance and its protocol
//! coins from `trial_seed(base_seed, i)`, and results are reduced with a sum,
//! so reports do not depend on how rayon schedules the work.

use rayon::prelude::*;
use serde::Serialize;

use crate::bucket::{collision_prob_bound, Ratio};
use crate::coins::trial_seed;
use crate::error::{invalid, Result};
use crate::gap_test::{gap_message_pair, gap_test_run, GapTestParams, DEFAULT_GAMMA};
use crate::instance::{gen_instance, Verdict};
use crate::protocol::{run_p1, run_protocol, PublicSetup, ProtocolConfig};

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && errors <= trials);
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0).min(p) };
    let hi = if errors == trials { 1.0 } else { (centre + half).min(1.0).max(p) };
    (lo, hi)
}

/// Which part of the protocol a Monte Carlo run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subprotocol {
    /// Gap test (P2) alone, with the configured repetitions.
    Gap,
    /// Bucket reduction plus inner protocol (P1) alone.
    P1,
    /// The composed protocol.
    Full,
}

impl std::str::FromStr for Subprotocol {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gap" => Ok(Subprotocol::Gap),
            "p1" => Ok(Subprotocol::P1),
            "full" => Ok(Subprotocol::Full),
            other => Err(invalid(format!("unknown subprotocol {other:?}"))),
        }
    }
}

impl std::fmt::Display for Subprotocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Subprotocol::Gap => "gap",
            Subprotocol::P1 => "p1",
            Subprotocol::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub trials: u64,
    pub errors: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub seed: u64,
    pub variant: String,
}

impl ErrorReport {
    pub fn new(n: usize, d: usize, k: usize, trials: u64, errors: u64, seed: u64, variant: String) -> Self {
        let (wilson_lo, wilson_hi) = wilson_interval(errors, trials);
        ErrorReport { n, d, k, trials, errors, rate: errors as f64 / trials as f64, wilson_lo, wilson_hi, seed, variant }
    }

    /// Upper Wilson slack above the measured rate.
    pub fn slack(&self) -> f64 {
        self.wilson_hi - self.rate
    }

    /// `rate <= bound + slack`.
    pub fn within(&self, bound: f64) -> bool {
        self.rate <= bound + self.slack()
    }
}

fn variant_label(sub: Subprotocol, config: &ProtocolConfig) -> String {
    match sub {
        Subprotocol::Gap => format!("gap-r{}-g{}", config.reps, config.gamma),
        Subprotocol::P1 => format!("p1-{}", config.inner),
        Subprotocol::Full => format!("full-{}-r{}-g{}", config.inner, config.reps, config.gamma),
    }
}

/// Verdict of one trial. The truth is always `HAM_{n,d}`; off-promise gap-test
/// trials are scored the same way and simply carry no bound.
fn trial_verdict(n: usize, d: usize, k: usize, seed: u64, config: &ProtocolConfig, sub: Subprotocol) -> Result<Verdict> {
    let inst = gen_instance(n, k, seed)?;
    match sub {
        Subprotocol::Gap => {
            let params = config.gap_params(d)?;
            if params.reps == 1 {
                Ok(gap_test_run(&inst.x, &inst.y, &params, seed)?.verdict)
            } else {
                Ok(crate::gap_test::amplified_gap_test(&inst.x, &inst.y, &params, seed)?.verdict)
            }
        }
        Subprotocol::P1 => run_p1(&inst.x, &inst.y, d, config, seed),
        Subprotocol::Full => Ok(run_protocol(&inst.x, &inst.y, d, config, seed)?.final_verdict),
    }
}

pub fn estimate_error(n: usize, d: usize, k: usize, trials: u64, base_seed: u64, config: &ProtocolConfig, sub: Subprotocol) -> Result<ErrorReport> {
    if trials < 1 {
        return Err(invalid("trials must be at least 1"));
    }
    if k > n {
        return Err(invalid(format!("distance {k} exceeds length {n}")));
    }
    // Validates (n, d, config) once before fanning out.
    PublicSetup::new(n, d, config, base_seed)?;
    let truth = Verdict::from_bit(k > d);
    let errors = (0..trials)
        .into_par_iter()
        .map(|i| trial_verdict(n, d, k, trial_seed(base_seed, i), config, sub).map(|v| u64::from(v != truth)))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ErrorReport::new(n, d, k, trials, errors, base_seed, variant_label(sub, config)))
}

/// The error bound that applies to a cell, if any.
///
/// Gap test: `1/50` for the default `gamma` and `d >= 2`, otherwise the
/// Chebyshev bound of the relevant side; nothing off-promise. P1: exact for
/// `k <= d`, `1/8` for `d < k <= 2d`, nothing beyond. Full: `1/4` for `k <= d`,
/// `1/8` above.
pub fn claimed_bound(sub: Subprotocol, d: usize, k: usize, config: &ProtocolConfig) -> Result<Option<f64>> {
    let params = config.gap_params(d)?;
    Ok(match sub {
        Subprotocol::Gap => {
            let theory = TheoryReport::new(d, config.gamma)?;
            if k <= d {
                Some(gap_side_bound(&params, theory.chebyshev_low))
            } else if k >= params.far_k && k > 2 * d {
                Some(gap_side_bound(&params, theory.chebyshev_high))
            } else {
                None
            }
        }
        Subprotocol::P1 => {
            if k <= d {
                Some(0.0)
            } else if k <= 2 * d {
                Some(1.0 / 8.0)
            } else {
                None
            }
        }
        Subprotocol::Full => Some(if k <= d { 0.25 } else { 0.125 }),
    })
}

fn gap_side_bound(params: &GapTestParams, chebyshev: f64) -> f64 {
    if params.gamma == DEFAULT_GAMMA && params.d >= 2 {
        1.0 / 50.0
    } else {
        chebyshev.min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostRow {
    pub d: usize,
    pub n: usize,
    pub variant: String,
    pub bits_per_party: usize,
    /// d-dependent bits over `d log2 max(d, 2)`.
    pub normalized: f64,
    #[serde(skip)]
    pub constant_bits: usize,
    #[serde(skip)]
    pub d_bits: usize,
}

/// Closed-form costs per `d`, read from a real transcript.
pub fn sweep_cost(d_list: &[usize], n: usize, config: &ProtocolConfig) -> Result<Vec<CostRow>> {
    let x = crate::bits::BitString::zeros(n);
    d_list
        .iter()
        .map(|&d| {
            let t = run_protocol(&x, &x, d, config, 0)?;
            let constant_bits = config.gamma * config.reps;
            let d_bits = t.alice_bits - constant_bits;
            let norm = d as f64 * (d.max(2) as f64).log2();
            Ok(CostRow {
                d,
                n,
                variant: config.inner.to_string(),
                bits_per_party: t.alice_bits,
                normalized: d_bits as f64 / norm,
                constant_bits,
                d_bits,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryRow {
    pub k: usize,
    pub alpha: f64,
    pub expected: f64,
    pub sigma_bound: f64,
}

/// Every closed form of the gap-test analysis for one `(d, gamma)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryReport {
    pub d: usize,
    pub gamma: usize,
    pub d_eff: usize,
    /// True when `d = 1` and the `d = 2` bias is used instead.
    pub uses_d_eff: bool,
    pub far_k: usize,
    pub rows: Vec<TheoryRow>,
    pub q: f64,
    pub cutoff: f64,
    pub expected_near: f64,
    pub expected_far: f64,
    /// `E(N_far) - E(N_d)`.
    pub separation: f64,
    /// `gamma t^d (1 - t^d) / 2` with `t = 1 - 1/d_eff`.
    pub separation_closed_form: f64,
    /// Chebyshev bound `alpha_d gamma / (m - E(N_d))^2` for the `k <= d` side.
    pub chebyshev_low: f64,
    /// Same for the far side.
    pub chebyshev_high: f64,
    /// Whether both sides are within `1/50`.
    pub meets_49_of_50: bool,
    pub collision_bound: f64,
    /// Composed bound when `k <= d` (P1 is exact there).
    pub composed_le: f64,
    /// Composed bound when `k > d`.
    pub composed_gt: f64,
}

impl TheoryReport {
    pub fn new(d: usize, gamma: usize) -> Result<Self> {
        let params = GapTestParams::new(d, gamma, 1)?;
        let g = gamma as f64;
        let row = |k: usize| {
            let a = params.alpha(k);
            TheoryRow { k, alpha: a, expected: a * g, sigma_bound: (a * g).sqrt() }
        };
        let mut ks = vec![0, d, 2 * d, 2 * d + 1];
        if !ks.contains(&params.far_k) {
            ks.push(params.far_k);
        }
        ks.sort_unstable();
        ks.dedup();
        let rows: Vec<TheoryRow> = ks.into_iter().map(row).collect();
        let near = row(d);
        let far = row(params.far_k);
        let t = (1.0 - 1.0 / params.d_eff as f64).powf(d as f64);
        let chebyshev_low = near.expected / (params.m - near.expected).powi(2);
        let chebyshev_high = far.expected / (far.expected - params.m).powi(2);
        let collision: Ratio = collision_prob_bound(d);
        let collision_bound = collision.as_f64();
        Ok(TheoryReport {
            d,
            gamma,
            d_eff: params.d_eff,
            uses_d_eff: params.d_eff != d,
            far_k: params.far_k,
            rows,
            q: params.q,
            cutoff: params.m,
            expected_near: near.expected,
            expected_far: far.expected,
            separation: far.expected - near.expected,
            separation_closed_form: 0.5 * g * t * (1.0 - t),
            chebyshev_low,
            chebyshev_high,
            meets_49_of_50: chebyshev_low.max(chebyshev_high) <= 1.0 / 50.0,
            collision_bound,
            composed_le: chebyshev_low.min(1.0),
            composed_gt: collision_bound.max(chebyshev_high).min(1.0),
        })
    }

    /// Fixed-width text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("d = {}  gamma = {}  d_eff = {}{}\n", self.d, self.gamma, self.d_eff, if self.uses_d_eff { "  (d = 1 uses the d = 2 bias)" } else { "" }));
        out.push_str(&format!("{:>8} {:>12} {:>14} {:>12}\n", "k", "alpha_k", "E(N_k)", "sqrt(a*g)"));
        for r in &self.rows {
            out.push_str(&format!("{:>8} {:>12.6} {:>14.3} {:>12.3}\n", r.k, r.alpha, r.expected, r.sigma_bound));
        }
        out.push_str(&format!("cutoff m              {:.4}\n", self.cutoff));
        out.push_str(&format!("separation            {:.4} (closed form {:.4})\n", self.separation, self.separation_closed_form));
        out.push_str(&format!("chebyshev k<=d side   {:.6}\n", self.chebyshev_low));
        out.push_str(&format!("chebyshev far side    {:.6}\n", self.chebyshev_high));
        out.push_str(&format!("meets 49/50           {}\n", self.meets_49_of_50));
        out.push_str(&format!("collision bound       {:.6}\n", self.collision_bound));
        out.push_str(&format!("composed error k<=d   {:.6}\n", self.composed_le));
        out.push_str(&format!("composed error k>d    {:.6}\n", self.composed_gt));
        out
    }
}

pub fn theory_report(d: usize, gamma: usize) -> Result<TheoryReport> {
    TheoryReport::new(d, gamma)
}

/// Statistics of `c = a xor b` over many gap-test runs at a fixed distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionCheck {
    pub d: usize,
    pub k: usize,
    pub gamma: usize,
    pub trials: u64,
    pub alpha: f64,
    pub mean: f64,
    /// `sqrt(alpha (1 - alpha) / (gamma trials))`.
    pub sigma: f64,
    pub mean_ok: bool,
    /// Mean and sample deviation of `N_k` across trials.
    pub count_mean: f64,
    pub count_sd: f64,
    pub count_mean_ok: bool,
    pub count_sd_ok: bool,
    pub lag1_autocorrelation: f64,
    pub autocorrelation_ok: bool,
}

impl DistributionCheck {
    pub fn passed(&self) -> bool {
        self.mean_ok && self.count_mean_ok && self.count_sd_ok && self.autocorrelation_ok
    }
}

pub fn verify_distribution(n: usize, d: usize, k: usize, gamma: usize, trials: u64, base_seed: u64) -> Result<DistributionCheck> {
    if trials < 2 {
        return Err(invalid("need at least two trials"));
    }
    let params = GapTestParams::new(d, gamma, 1)?;
    // Per trial: ones, adjacent-pair products sum, plus first and last bits for pooling.
    let per_trial: Vec<(u64, u64, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(base_seed, i);
            let inst = gen_instance(n, k, seed)?;
            let (a, b) = gap_message_pair(&inst.x, &inst.y, &params, seed, 0)?;
            let c = a.bits.xor(&b.bits)?;
            let ones = c.weight() as u64;
            let mut pairs = 0u64;
            let mut prev = false;
            for (idx, bit) in c.iter().enumerate() {
                if idx > 0 && bit && prev {
                    pairs += 1;
                }
                prev = bit;
            }
            Ok((ones, pairs, c.get(0), c.get(gamma - 1)))
        })
        .collect::<Result<_>>()?;

    let g = gamma as f64;
    let t = trials as f64;
    let samples = g * t;
    let alpha = params.alpha(k);
    let total_ones: u64 = per_trial.iter().map(|r| r.0).sum();
    let mean = total_ones as f64 / samples;
    let sigma = (alpha * (1.0 - alpha) / samples).sqrt();
    let mean_ok = if alpha == 0.0 { total_ones == 0 } else { (mean - alpha).abs() <= 4.0 * sigma };

    let counts: Vec<f64> = per_trial.iter().map(|r| r.0 as f64).collect();
    let count_mean = counts.iter().sum::<f64>() / t;
    let count_sd = (counts.iter().map(|c| (c - count_mean).powi(2)).sum::<f64>() / (t - 1.0)).sqrt();
    let count_sigma = (alpha * (1.0 - alpha) * g / t).sqrt();
    let count_mean_ok = if alpha == 0.0 { count_mean == 0.0 } else { (count_mean - alpha * g).abs() <= 4.0 * count_sigma };
    let count_sd_ok = count_sd <= 1.1 * (alpha * g).sqrt();

    // Lag-1 autocorrelation within each message, pooled over trials.
    let pairs_per_trial = g - 1.0;
    let pair_count = pairs_per_trial * t;
    let sum_pairs: u64 = per_trial.iter().map(|r| r.1).sum();
    // sum over pairs of (c_i - mu)(c_{i+1} - mu) = P - mu (S_head + S_tail) + mu^2 * pairs.
    let heads: f64 = per_trial.iter().map(|r| r.0 as f64 - f64::from(u8::from(r.3))).sum();
    let tails: f64 = per_trial.iter().map(|r| r.0 as f64 - f64::from(u8::from(r.2))).sum();
    let mu = mean;
    let cov = sum_pairs as f64 - mu * (heads + tails) + mu * mu * pair_count;
    let var = total_ones as f64 * (1.0 - mu) * (1.0 - mu) + (samples - total_ones as f64) * mu * mu;
    let lag1 = if var == 0.0 { 0.0 } else { cov / var };
    let autocorrelation_ok = lag1.abs() <= 4.0 / samples.sqrt();

    Ok(DistributionCheck {
        d,
        k,
        gamma,
        trials,
        alpha,
        mean,
        sigma,
        mean_ok,
        count_mean,
        count_sd,
        count_mean_ok,
        count_sd_ok,
        lag1_autocorrelation: lag1,
        autocorrelation_ok,
    })
}

/// CSV with a schema comment line, header row and one row per record.
pub fn to_csv<T: Serialize>(schema: &str, rows: &[T]) -> Result<String> {
    let mut out = format!("# {schema} v{CSV_SCHEMA_VERSION}\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| crate::error::Error::Malformed(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Malformed(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.95);
        let (lo, hi) = wilson_interval(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        // Reference values for 30/100: (0.2189, 0.3958).
        assert!((lo - 0.21886).abs() < 1e-4, "{lo}");
        assert!((hi - 0.39576).abs() < 1e-4, "{hi}");
    }

    #[test]
    fn theory_for_d2() {
        let t = theory_report(2, 20_000).unwrap();
        let e = |k: usize| t.rows.iter().find(|r| r.k == k).unwrap().expected;
        assert_eq!(e(2), 7500.0);
        assert_eq!(e(4), 9375.0);
        assert_eq!(t.cutoff, 8437.5);
        assert_eq!(t.cutoff, (t.expected_near + t.expected_far) / 2.0);
        assert_eq!(t.separation, 1875.0);
        assert_eq!(t.separation, 3.0 / 32.0 * 20_000.0);
        assert_eq!(t.separation_closed_form, 1875.0);
        assert!(t.meets_49_of_50);
        assert!(!t.uses_d_eff);
    }

    #[test]
    fn theory_flags_d1() {
        let t = theory_report(1, 20_000).unwrap();
        assert!(t.uses_d_eff);
        assert_eq!(t.far_k, 3);
        assert!(t.expected_near < t.cutoff && t.cutoff < t.expected_far);
    }

    #[test]
    fn chebyshev_per_side_within_one_in_44() {
        for d in 2..=1000 {
            let t = theory_report(d, 20_000).unwrap();
            assert!(t.chebyshev_low <= 1.0 / 44.0 && t.chebyshev_high <= 1.0 / 44.0, "d={d}");
            assert!(t.chebyshev_low + t.chebyshev_high <= 1.0 / 22.0);
            assert!((t.cutoff - (t.expected_near + t.expected_far) / 2.0).abs() < 1e-7);
            assert!(t.rows.windows(2).all(|w| w[0].alpha < w[1].alpha));
        }
    }

    #[test]
    fn estimate_is_reproducible() {
        let config = ProtocolConfig { gamma: 300, ..ProtocolConfig::default() };
        let a = estimate_error(512, 2, 3, 40, 7, &config, Subprotocol::Full).unwrap();
        let b = estimate_error(512, 2, 3, 40, 7, &config, Subprotocol::Full).unwrap();
        assert_eq!(a, b);
        assert!(a.wilson_lo <= a.rate && a.rate <= a.wilson_hi);
    }

    #[test]
    fn zero_distance_gap_rate_is_zero() {
        let config = ProtocolConfig { gamma: 500, ..ProtocolConfig::default() };
        let r = estimate_error(1024, 4, 0, 50, 3, &config, Subprotocol::Gap).unwrap();
        assert_eq!(r.errors, 0);
    }

    #[test]
    fn cost_rows() {
        let rows = sweep_cost(&[2, 4], 1 << 20, &ProtocolConfig::default()).unwrap();
        assert_eq!(rows[0].bits_per_party, 20_028);
        assert_eq!(rows[0].d_bits, 28);
        assert_eq!(rows[1].d_bits, 8 * 9);
        let csv = to_csv("sweep-cost", &rows).unwrap();
        assert!(csv.starts_with("# sweep-cost v1\nd,n,variant,bits_per_party,normalized\n2,1048576,syndrome,20028,14"));
    }

    #[test]
    fn distribution_zero_distance() {
        let c = verify_distribution(1024, 4, 0, 1000, 5, 1).unwrap();
        assert_eq!(c.mean, 0.0);
        assert!(c.passed());
    }

    #[test]
    fn bounds_per_cell() {
        let c = ProtocolConfig::default();
        assert_eq!(claimed_bound(Subprotocol::Full, 4, 4, &c).unwrap(), Some(0.25));
        assert_eq!(claimed_bound(Subprotocol::Full, 4, 9, &c).unwrap(), Some(0.125));
        assert_eq!(claimed_bound(Subprotocol::Gap, 4, 2, &c).unwrap(), Some(0.02));
        assert_eq!(claimed_bound(Subprotocol::Gap, 4, 6, &c).unwrap(), None);
        assert_eq!(claimed_bound(Subprotocol::P1, 4, 3, &c).unwrap(), Some(0.0));
        assert_eq!(claimed_bound(Subprotocol::P1, 4, 20, &c).unwrap(), None);
        let fast = ProtocolConfig { gamma: 2000, ..c };
        let b = claimed_bound(Subprotocol::Gap, 4, 2, &fast).unwrap().unwrap();
        assert!(b > 0.02 && b <= 1.0);
    }
}
