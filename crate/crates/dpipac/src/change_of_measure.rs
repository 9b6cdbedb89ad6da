//! Event-probability transfer between distributions.
//!
//! Each bound here turns "the event has probability `q_event` under Q,
//! and P is within divergence `d` of Q" into a certified ceiling on the
//! event's probability under P. These transfers are the engine behind
//! every budget in [`crate::bounds`]; [`verify_lemmas`] hammers them,
//! together with the data-processing inequality, on randomized discrete
//! instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::divergence::{
    chi_squared_divergence, check_order, dpi_check, hellinger_p_divergence, renyi_divergence,
    DiscreteDistribution, DivergenceSelector, DivergenceValue, MarkovKernel, Prob,
};
use crate::error::{Error, Result};
use crate::math::softplus;

/// Membership vector for an event on a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventMask {
    membership: Vec<bool>,
}

impl EventMask {
    pub fn new(membership: Vec<bool>) -> Result<Self> {
        if membership.is_empty() {
            return Err(Error::InvalidParameter("event mask must be nonempty".to_string()));
        }
        Ok(Self { membership })
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.membership
    }

    /// Total mass the distribution places on the event.
    pub fn probability_under(&self, dist: &DiscreteDistribution) -> Result<Prob> {
        if dist.len() != self.membership.len() {
            return Err(Error::LengthMismatch {
                expected: self.membership.len(),
                actual: dist.len(),
            });
        }
        let mass: f64 = self
            .membership
            .iter()
            .zip(dist.masses())
            .filter(|(&inside, _)| inside)
            .map(|(_, &m)| m)
            .sum();
        // construction tolerance lets totals stray past 1 by rounding
        Prob::new(mass.clamp(0.0, 1.0))
    }
}

/// Outcome of a change-of-measure transfer.
///
/// `p_event_bound` is capped at 1 and is a valid ceiling on `P(E)`
/// whenever `applicable` holds and the caller meets any precondition
/// recorded in `precondition_note`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComBoundResult {
    pub p_event_bound: f64,
    pub applicable: bool,
    pub precondition_note: Option<&'static str>,
}

impl ComBoundResult {
    fn plain(p_event_bound: f64) -> Self {
        ComBoundResult {
            p_event_bound,
            applicable: true,
            precondition_note: None,
        }
    }
}

/// Ceiling on `P(E)` from the order-`alpha` Renyi divergence:
/// `q_event^((alpha-1)/alpha) * exp(((alpha-1)/alpha) * d)`.
///
/// Evaluated as `exp((1 - 1/alpha) * (ln q_event + d))`, so tiny event
/// probabilities and large divergences never overflow on the way in.
/// An infinite divergence yields the vacuous ceiling 1.
pub fn renyi_com_bound(
    q_event: Prob,
    divergence: DivergenceValue,
    alpha: f64,
) -> Result<ComBoundResult> {
    check_order(alpha)?;
    if !divergence.is_finite() {
        return Ok(ComBoundResult::plain(1.0));
    }
    let coefficient = 1.0 - 1.0 / alpha;
    let log_bound = coefficient * (q_event.value().ln() + divergence.value());
    Ok(ComBoundResult::plain(log_bound.exp().min(1.0)))
}

const HELLINGER_PRECONDITION: &str =
    "transfer needs P(E) < 1/2 and Q(E) < 1/2; Q(E) is already at least 1/2";
const HELLINGER_CALLER_NOTE: &str =
    "transfer additionally needs P(E) < 1/2, which cannot be checked from these inputs";

/// Ceiling on `P(E)` from the order-`p` Hellinger divergence:
/// `[1 + q_event^(1-p)]^(-1/p) * [(p-1) d + 1]^(1/p)`.
///
/// This transfer is only valid when the event is unlikely on both
/// sides: `P(E) < 1/2` and `Q(E) < 1/2`. The second half is checked
/// here and failing it marks the result inapplicable; the first half
/// cannot be seen from these inputs, so every applicable result carries
/// a note pointing the responsibility at the caller.
pub fn hellinger_com_bound(
    q_event: Prob,
    divergence: DivergenceValue,
    order: f64,
) -> Result<ComBoundResult> {
    check_order(order)?;
    if q_event.value() >= 0.5 {
        return Ok(ComBoundResult {
            p_event_bound: 1.0,
            applicable: false,
            precondition_note: Some(HELLINGER_PRECONDITION),
        });
    }
    let note = Some(HELLINGER_CALLER_NOTE);
    if !divergence.is_finite() {
        return Ok(ComBoundResult {
            p_event_bound: 1.0,
            applicable: true,
            precondition_note: note,
        });
    }
    // ln of [(p-1) d + 1]; falls back to ln(p-1) + ln d if the product
    // overflows (the +1 is then far below one ulp)
    let scaled = (order - 1.0) * divergence.value();
    let numerator = if scaled.is_finite() {
        scaled.ln_1p()
    } else {
        (order - 1.0).ln() + divergence.value().ln()
    };
    // ln of [1 + q_event^(1-p)] without materializing the power
    let denominator = softplus((1.0 - order) * q_event.value().ln());
    let log_bound = (numerator - denominator) / order;
    Ok(ComBoundResult {
        p_event_bound: log_bound.exp().min(1.0),
        applicable: true,
        precondition_note: note,
    })
}

/// Ceiling on `P(E)` from the chi-squared divergence:
/// `sqrt(q_event * (d + 2))`. An infinite divergence yields the vacuous
/// ceiling 1.
pub fn chi2_com_bound(q_event: Prob, divergence: DivergenceValue) -> ComBoundResult {
    if !divergence.is_finite() {
        return ComBoundResult::plain(1.0);
    }
    let bound = (q_event.value() * (divergence.value() + 2.0)).sqrt();
    ComBoundResult::plain(bound.min(1.0))
}

/// Options for [`verify_lemmas`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Number of random instances to draw.
    pub trials: u64,
    /// Largest alphabet size sampled, inclusive; at least 2.
    pub max_support: usize,
    /// Master seed. The sweep is a pure function of the options.
    pub seed: u64,
    /// Divergence orders the sweep cycles through.
    pub orders: Vec<f64>,
    /// Amount subtracted from every computed ceiling before comparison.
    /// Zero in normal operation; tests inject a positive offset to
    /// prove the harness actually detects violations.
    pub bound_offset: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 10_000,
            max_support: 6,
            seed: 0,
            orders: vec![1.5, 2.0, 5.0, 10.0, 100.0],
            bound_offset: 0.0,
        }
    }
}

/// Tally of a [`verify_lemmas`] sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyReport {
    pub trials: u64,
    /// Individual checks evaluated. Each trial contributes the three
    /// transfer bounds (the Hellinger one only when both event
    /// probabilities are below one half) plus one data-processing check
    /// per divergence on each of two channels.
    pub applicable: u64,
    /// Checks where the observation exceeded its ceiling by more than
    /// 1e-12.
    pub violations: u64,
    /// Largest `observed - ceiling` gap seen; at most zero (within
    /// rounding) when the inequalities hold.
    pub max_slack_observed: f64,
    pub seed: u64,
}

/// Tolerance beyond which a check counts as violated.
pub const VIOLATION_SLACK: f64 = 1e-12;

const VERIFY_BATCH: u64 = 256;

#[derive(Clone, Copy)]
struct Tally {
    applicable: u64,
    violations: u64,
    max_slack: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            applicable: 0,
            violations: 0,
            max_slack: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, observed: f64, ceiling: f64, offset: f64) {
        let slack = observed - (ceiling - offset);
        self.applicable += 1;
        if slack > VIOLATION_SLACK {
            self.violations += 1;
        }
        if slack > self.max_slack {
            self.max_slack = slack;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.applicable += other.applicable;
        self.violations += other.violations;
        self.max_slack = self.max_slack.max(other.max_slack);
        self
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, support: usize) -> DiscreteDistribution {
    // normalized exponentials of uniform variates: strictly positive,
    // mass ratios at most e, so every divergence stays finite
    let raw: Vec<f64> = (0..support).map(|_| rng.random::<f64>().exp()).collect();
    let total: f64 = raw.iter().sum();
    DiscreteDistribution::new(raw.into_iter().map(|m| m / total).collect())
        .expect("normalized masses form a distribution")
}

fn verify_one_trial(rng: &mut ChaCha8Rng, options: &VerifyOptions, tally: &mut Tally) -> Result<()> {
    let support = rng.random_range(2..=options.max_support);
    let p = random_distribution(rng, support);
    let q = random_distribution(rng, support);
    let membership: Vec<bool> = (0..support).map(|_| rng.random::<bool>()).collect();
    let order = options.orders[rng.random_range(0..options.orders.len())];
    let output_support = rng.random_range(1..=options.max_support);
    let random_kernel = MarkovKernel::new(
        (0..support)
            .map(|_| random_distribution(rng, output_support))
            .collect(),
    )?;

    let mask = EventMask::new(membership)?;
    let p_event = mask.probability_under(&p)?.value();
    let q_event = mask.probability_under(&q)?;

    let renyi = renyi_divergence(&p, &q, order)?;
    let bound = renyi_com_bound(q_event, renyi, order)?;
    tally.record(p_event, bound.p_event_bound, options.bound_offset);

    let hellinger = hellinger_p_divergence(&p, &q, order)?;
    let bound = hellinger_com_bound(q_event, hellinger, order)?;
    if bound.applicable && p_event < 0.5 {
        tally.record(p_event, bound.p_event_bound, options.bound_offset);
    }

    let chi2 = chi_squared_divergence(&p, &q)?;
    let bound = chi2_com_bound(q_event, chi2);
    tally.record(p_event, bound.p_event_bound, options.bound_offset);

    let indicator = MarkovKernel::event_indicator(mask.as_slice())?;
    for kernel in [&indicator, &random_kernel] {
        for selector in [
            DivergenceSelector::Renyi { alpha: order },
            DivergenceSelector::Hellinger { order },
            DivergenceSelector::ChiSquared,
            DivergenceSelector::Kl,
        ] {
            let (after, before) = dpi_check(kernel, &p, &q, selector)?;
            tally.record(after.value(), before.value(), options.bound_offset);
        }
    }
    Ok(())
}

fn verify_batch(options: &VerifyOptions, batch_index: u64, batch_trials: u64) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(batch_index);
    let mut tally = Tally::new();
    for _ in 0..batch_trials {
        verify_one_trial(&mut rng, options, &mut tally)?;
    }
    Ok(tally)
}

/// Brute-force soundness sweep over random discrete instances.
///
/// Every trial draws a pair of strictly positive distributions, an
/// event, an order from the grid, and a random channel, then checks
/// each transfer bound against the exact `P(E)` and the data-processing
/// inequality for each divergence on both the event-indicator channel
/// and the random one. Trials are partitioned into fixed-size batches,
/// one generator stream per batch, so the report is identical however
/// the batches are scheduled.
pub fn verify_lemmas(options: &VerifyOptions) -> Result<VerifyReport> {
    if options.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".to_string()));
    }
    if options.max_support < 2 {
        return Err(Error::InvalidParameter("max support must be at least 2".to_string()));
    }
    if options.orders.is_empty() {
        return Err(Error::InvalidParameter("orders list must be nonempty".to_string()));
    }
    for &order in &options.orders {
        check_order(order)?;
    }
    if options.bound_offset.is_nan() {
        return Err(Error::InvalidParameter("bound offset must be a number".to_string()));
    }

    let batch_count = options.trials.div_ceil(VERIFY_BATCH);
    let batch_trials =
        |batch: u64| (options.trials - batch * VERIFY_BATCH).min(VERIFY_BATCH);

    #[cfg(feature = "parallel")]
    let tallies: Vec<Result<Tally>> = {
        use rayon::prelude::*;
        (0..batch_count)
            .into_par_iter()
            .map(|batch| verify_batch(options, batch, batch_trials(batch)))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let tallies: Vec<Result<Tally>> = (0..batch_count)
        .map(|batch| verify_batch(options, batch, batch_trials(batch)))
        .collect();

    let mut total = Tally::new();
    for tally in tallies {
        total = total.merge(tally?);
    }
    Ok(VerifyReport {
        trials: options.trials,
        applicable: total.applicable,
        violations: total.violations,
        max_slack_observed: total.max_slack,
        seed: options.seed,
    })
}
