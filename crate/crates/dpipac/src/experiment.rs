//! Synthetic logistic-classification study.
//!
//! A finite class of linear sign classifiers is drawn once, data comes
//! from a 2-D standard Gaussian with Bernoulli labels through a
//! logistic link, and every budget from [`crate::bounds`] is checked
//! against the realized supremum of binary KL gaps over the class.
//! Repeating that over many independent trials estimates how often the
//! `1 - delta` guarantee fails, which should happen with frequency at
//! most `delta`.
//!
//! Randomness discipline: one master seed, with every consumer owning a
//! ChaCha stream derived from a purpose tag and an index. Growing the
//! trial count or the hypothesis class never perturbs streams already
//! in use, and parallel execution draws exactly the same numbers as
//! serial.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{rhs_for, sweep, Method, SweepRow};
use crate::divergence::{binary_kl, Prob};
use crate::error::{Error, Result};
use crate::math::fmt_f64;

const TAG_HYPOTHESES: u64 = 1;
const TAG_DATASET: u64 = 2;
const TAG_POPULATION: u64 = 3;

/// Dataset stream indices pack the sample count into the high half of
/// the index word, so `n` must stay below 2^24 to leave the tag bits
/// untouched.
const MAX_N: u64 = 1 << 24;

fn stream_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 56) | index);
    rng
}

/// A linear classifier labeling by the sign of `w . x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub w: [f64; 2],
}

impl Hypothesis {
    /// Predicted label: 1 when `w . x > 0`, otherwise 0. The tie
    /// `w . x = 0` deliberately lands on 0 so predictions are a total
    /// deterministic function of the inputs.
    pub fn predict(&self, x: [f64; 2]) -> u8 {
        u8::from(self.w[0] * x[0] + self.w[1] * x[1] > 0.0)
    }
}

/// One labeled observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: [f64; 2],
    pub y: u8,
}

/// Full description of one study; serializable so runs can be
/// reproduced from a config file alone. Unknown fields are rejected to
/// catch typos, and missing fields fall back to the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_values: Vec<u64>,
    pub hypothesis_count: usize,
    pub box_half_width: f64,
    pub w_star: [f64; 2],
    pub delta: f64,
    pub seed: u64,
    pub trials: u64,
    pub population_mc_samples: u64,
    pub orders: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_values: vec![100, 200, 400, 800, 1600],
            hypothesis_count: 50,
            box_half_width: 100.0,
            w_star: [0.5, 0.5],
            delta: 0.025,
            seed: 0,
            trials: 2000,
            population_mc_samples: 1_000_000,
            orders: vec![10.0, 1e3, 1e7],
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_values.is_empty() {
            return fail("n_values must be nonempty".to_string());
        }
        for &n in &self.n_values {
            if n == 0 || n >= MAX_N {
                return fail(format!("sample count {n} outside [1, {MAX_N})"));
            }
        }
        if self.hypothesis_count == 0 {
            return fail("hypothesis_count must be at least 1".to_string());
        }
        if !(self.box_half_width > 0.0 && self.box_half_width.is_finite()) {
            return fail(format!(
                "box_half_width must be positive and finite, got {}",
                self.box_half_width
            ));
        }
        if self.w_star.iter().any(|c| !c.is_finite()) {
            return fail(format!("w_star coordinates must be finite, got {:?}", self.w_star));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return fail(format!("delta must lie in (0, 1], got {}", self.delta));
        }
        if self.trials == 0 || self.trials > u64::from(u32::MAX) {
            return fail(format!("trials {} outside [1, 2^32)", self.trials));
        }
        if self.population_mc_samples == 0 {
            return fail("population_mc_samples must be at least 1".to_string());
        }
        for &order in &self.orders {
            crate::divergence::check_order(order)?;
        }
        Ok(())
    }

    /// Uniform prior mass on the sampled class.
    pub fn q_min(&self) -> f64 {
        1.0 / self.hypothesis_count as f64
    }

    /// Draws the hypothesis class from its dedicated stream.
    pub fn hypotheses(&self) -> Vec<Hypothesis> {
        let mut rng = stream_rng(self.seed, TAG_HYPOTHESES, 0);
        sample_hypotheses(self, &mut rng)
    }
}

/// Numerically stable logistic function.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Draws `hypothesis_count` weight vectors with coordinates uniform on
/// `[-box_half_width, box_half_width]`.
pub fn sample_hypotheses<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Vec<Hypothesis> {
    let h = config.box_half_width;
    (0..config.hypothesis_count)
        .map(|_| Hypothesis {
            w: [rng.random_range(-h..=h), rng.random_range(-h..=h)],
        })
        .collect()
}

/// Draws `n` samples: `x` from a standard 2-D Gaussian, `y` Bernoulli
/// with success probability `sigmoid(x . w_star)`.
pub fn generate_dataset<R: Rng + ?Sized>(n: u64, w_star: [f64; 2], rng: &mut R) -> Vec<Sample> {
    (0..n)
        .map(|_| {
            let x = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
            let p = sigmoid(x[0] * w_star[0] + x[1] * w_star[1]);
            let y = u8::from(rng.random::<f64>() < p);
            Sample { x, y }
        })
        .collect()
}

/// 0-1 loss of one prediction.
pub fn zero_one_loss(sample: &Sample, h: &Hypothesis) -> u8 {
    u8::from(h.predict(sample.x) != sample.y)
}

/// Average 0-1 loss over a dataset.
pub fn empirical_loss(data: &[Sample], h: &Hypothesis) -> Result<Prob> {
    if data.is_empty() {
        return Err(Error::InvalidParameter(
            "empirical loss needs at least one sample".to_string(),
        ));
    }
    let mistakes: u64 = data.iter().map(|s| u64::from(zero_one_loss(s, h))).sum();
    Prob::new(mistakes as f64 / data.len() as f64)
}

/// Monte Carlo estimate of the population 0-1 loss of `h`.
///
/// The label noise is integrated analytically: conditioned on `x`, the
/// expected loss is `sigmoid(x . w_star)` when `h` predicts 0 and the
/// complement when it predicts 1, so only `x` is sampled. Estimates are
/// clamped to `[1/(2 m), 1 - 1/(2 m)]`, half a quantum inside the
/// resolution of an `m`-sample average, so that downstream binary KL
/// gaps against any empirical loss stay finite. The flag reports
/// whether the clamp fired.
pub fn population_loss_oracle<R: Rng + ?Sized>(
    h: &Hypothesis,
    w_star: [f64; 2],
    mc_samples: u64,
    rng: &mut R,
) -> (Prob, bool) {
    assert!(mc_samples >= 1, "population oracle needs at least one sample");
    let mut sum = 0.0;
    for _ in 0..mc_samples {
        let x = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let p_one = sigmoid(x[0] * w_star[0] + x[1] * w_star[1]);
        sum += if h.predict(x) == 0 { p_one } else { 1.0 - p_one };
    }
    let raw = sum / mc_samples as f64;
    let lo = 0.5 / mc_samples as f64;
    let clamped = raw.clamp(lo, 1.0 - lo);
    (Prob::new(clamped).expect("clamped mean is a probability"), clamped != raw)
}

/// Population losses for a whole hypothesis class, computed once and
/// shared (read-only) by every trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationTable {
    pub losses: Vec<Prob>,
    /// How many entries hit the anti-degeneracy clamp.
    pub clamped_count: usize,
}

impl PopulationTable {
    /// Estimates every hypothesis's loss on its own stream (tagged by
    /// hypothesis index), so the table is identical however the work is
    /// scheduled.
    pub fn compute(config: &ExperimentConfig, hypotheses: &[Hypothesis]) -> Self {
        let one = |(index, h): (usize, &Hypothesis)| {
            let mut rng = stream_rng(config.seed, TAG_POPULATION, index as u64);
            population_loss_oracle(h, config.w_star, config.population_mc_samples, &mut rng)
        };
        #[cfg(feature = "parallel")]
        let entries: Vec<(Prob, bool)> = hypotheses.par_iter().enumerate().map(one).collect();
        #[cfg(not(feature = "parallel"))]
        let entries: Vec<(Prob, bool)> = hypotheses.iter().enumerate().map(one).collect();

        PopulationTable {
            losses: entries.iter().map(|e| e.0).collect(),
            clamped_count: entries.iter().filter(|e| e.1).count(),
        }
    }
}

/// A budget family plus its order, if it takes one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSpec {
    pub method: Method,
    pub order: Option<f64>,
}

impl BoundSpec {
    /// Stable map key, e.g. `occams_razor` or `d_alpha:10`.
    pub fn key(&self) -> String {
        match self.order {
            Some(order) => format!("{}:{}", self.method, order),
            None => self.method.to_string(),
        }
    }
}

/// The bounds whose coverage the study checks: the parameter-free
/// families that certify a supremum over the class, plus the two
/// order-parametrized families at each configured order. The plain
/// test-set budget is excluded because it certifies one pre-registered
/// hypothesis, not a supremum.
pub fn coverage_bound_specs(orders: &[f64]) -> Vec<BoundSpec> {
    let mut specs = vec![
        BoundSpec { method: Method::OccamsRazor, order: None },
        BoundSpec { method: Method::PacBayesPointMass, order: None },
        BoundSpec { method: Method::ChiSquared, order: None },
    ];
    for &method in &[Method::DAlpha, Method::HellingerP] {
        for &order in orders {
            specs.push(BoundSpec { method, order: Some(order) });
        }
    }
    specs
}

/// Everything observed in one trial: one fresh dataset, each
/// hypothesis's losses and KL gap, the supremum, and whether that
/// supremum broke each budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: u64,
    pub trial_index: u64,
    pub empirical_losses: Vec<Prob>,
    pub population_losses: Vec<Prob>,
    pub kl_gaps: Vec<f64>,
    pub sup_kl_gap: f64,
    pub violations: BTreeMap<String, bool>,
    /// Copied from the population table; nonzero means some KL gaps
    /// were computed against clamped losses.
    pub clamped_population_count: usize,
}

/// Runs one trial at sample size `n`. The dataset comes from a stream
/// indexed by `(n, trial_index)`, so every trial is independent of
/// every other and of the hypothesis and population streams. A budget
/// is violated when the supremum of KL gaps exceeds it (uniform prior,
/// `q_min = 1/|class|`).
pub fn run_trial(
    config: &ExperimentConfig,
    n: u64,
    hypotheses: &[Hypothesis],
    population: &PopulationTable,
    trial_index: u64,
) -> Result<TrialRecord> {
    if hypotheses.len() != population.losses.len() {
        return Err(Error::LengthMismatch {
            expected: hypotheses.len(),
            actual: population.losses.len(),
        });
    }
    let mut rng = stream_rng(config.seed, TAG_DATASET, (n << 32) | trial_index);
    let data = generate_dataset(n, config.w_star, &mut rng);

    let mut empirical_losses = Vec::with_capacity(hypotheses.len());
    let mut kl_gaps = Vec::with_capacity(hypotheses.len());
    let mut sup_kl_gap: f64 = 0.0;
    for (h, &pop) in hypotheses.iter().zip(&population.losses) {
        let emp = empirical_loss(&data, h)?;
        let gap = binary_kl(emp, pop).value();
        sup_kl_gap = sup_kl_gap.max(gap);
        empirical_losses.push(emp);
        kl_gaps.push(gap);
    }

    let q_min = 1.0 / hypotheses.len() as f64;
    let mut violations = BTreeMap::new();
    for spec in coverage_bound_specs(&config.orders) {
        let budget = rhs_for(spec.method, n, config.delta, q_min, spec.order)?;
        violations.insert(spec.key(), sup_kl_gap > budget);
    }

    Ok(TrialRecord {
        n,
        trial_index,
        empirical_losses,
        population_losses: population.losses.clone(),
        kl_gaps,
        sup_kl_gap,
        violations,
        clamped_population_count: population.clamped_count,
    })
}

/// Violation frequency of one budget at one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageRow {
    pub method: Method,
    pub order: Option<f64>,
    pub n: u64,
    pub trials: u64,
    pub violations: u64,
    pub frequency: f64,
    pub stderr: f64,
}

/// Estimates each budget's violation frequency over `config.trials`
/// independent trials per sample size, with the binomial standard
/// error `sqrt(f (1 - f) / trials)`. Rows are ordered budget-first,
/// then by sample size.
pub fn coverage_estimate(config: &ExperimentConfig) -> Result<Vec<CoverageRow>> {
    config.validate()?;
    let hypotheses = config.hypotheses();
    let population = PopulationTable::compute(config, &hypotheses);
    let specs = coverage_bound_specs(&config.orders);

    let mut counts = vec![vec![0u64; config.n_values.len()]; specs.len()];
    for (n_index, &n) in config.n_values.iter().enumerate() {
        let flags_of = |trial: u64| -> Result<Vec<bool>> {
            let record = run_trial(config, n, &hypotheses, &population, trial)?;
            Ok(specs.iter().map(|s| record.violations[&s.key()]).collect())
        };
        #[cfg(feature = "parallel")]
        let per_trial: Result<Vec<Vec<bool>>> =
            (0..config.trials).into_par_iter().map(flags_of).collect();
        #[cfg(not(feature = "parallel"))]
        let per_trial: Result<Vec<Vec<bool>>> = (0..config.trials).map(flags_of).collect();

        for flags in per_trial? {
            for (spec_index, flag) in flags.into_iter().enumerate() {
                counts[spec_index][n_index] += u64::from(flag);
            }
        }
    }

    let mut rows = Vec::with_capacity(specs.len() * config.n_values.len());
    for (spec_index, spec) in specs.iter().enumerate() {
        for (n_index, &n) in config.n_values.iter().enumerate() {
            let violations = counts[spec_index][n_index];
            let frequency = violations as f64 / config.trials as f64;
            rows.push(CoverageRow {
                method: spec.method,
                order: spec.order,
                n,
                trials: config.trials,
                violations,
                frequency,
                stderr: (frequency * (1.0 - frequency) / config.trials as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}

/// Budget comparison across the configured sample sizes at the study's
/// uniform prior: the three parameter-free reference budgets plus both
/// order-parametrized families at each configured order. Rows are
/// sorted method-first, then order, then sample size, ready for
/// plotting one curve per (method, order).
pub fn budget_table(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let methods = [
        Method::OccamsRazor,
        Method::PacBayesPointMass,
        Method::ChiSquared,
        Method::DAlpha,
        Method::HellingerP,
    ];
    let mut rows = sweep(&methods, &config.n_values, config.delta, config.q_min(), &config.orders)?;
    let position = |m: Method| methods.iter().position(|&c| c == m).unwrap_or(methods.len());
    // Orders are validated finite and positive, so their bit patterns
    // sort like the values themselves.
    rows.sort_by_key(|r| (position(r.method), r.order.map_or(0, f64::to_bits), r.n));
    Ok(rows)
}

/// Header of [`budget_table_csv`] output.
pub const BUDGET_TABLE_CSV_HEADER: &str = "method,order,n,delta,q_min,kl_budget";

/// Renders sweep rows with the order column second, so plotting tools
/// can group curves by (method, order) prefix. The order cell is empty
/// for parameter-free methods; floats carry 17 significant digits.
pub fn budget_table_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(BUDGET_TABLE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let order = row.order.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.method,
            order,
            row.n,
            fmt_f64(row.delta),
            fmt_f64(row.q_min),
            fmt_f64(row.kl_budget)
        ));
    }
    out
}

/// Header of [`coverage_csv`] output.
pub const COVERAGE_CSV_HEADER: &str = "method,order,n,trials,violations,frequency,stderr";

/// Renders coverage rows as CSV with 17-significant-digit floats.
pub fn coverage_csv(rows: &[CoverageRow]) -> String {
    let mut out = String::from(COVERAGE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let order = row.order.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.method,
            order,
            row.n,
            row.trials,
            row.violations,
            fmt_f64(row.frequency),
            fmt_f64(row.stderr)
        ));
    }
    out
}
