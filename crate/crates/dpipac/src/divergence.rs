//! Discrete probability objects and the divergence toolbox.
//!
//! All functions here operate on finite distributions represented as
//! mass vectors and share two conventions: natural logarithms
//! throughout, and `0 ln 0 = 0`, so points outside the support of the
//! first argument contribute nothing. Mass of `P` at a zero of `Q`
//! makes every order-above-1 divergence infinite; infinity is a value,
//! not an error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::log_sum_exp;

/// A probability, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Prob(f64);

impl Prob {
    pub const ZERO: Prob = Prob(0.0);
    pub const ONE: Prob = Prob(1.0);

    /// Validates that `value` is a number in `[0, 1]`.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidProbability(value));
        }
        Ok(Prob(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Prob {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Prob::new(value)
    }
}

impl From<Prob> for f64 {
    fn from(p: Prob) -> f64 {
        p.0
    }
}

/// Absolute tolerance on the total mass at construction.
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// A probability distribution on the finite set `{0, .., k-1}`.
///
/// Construction validates rather than repairs: masses must be
/// nonnegative and sum to one within [`MASS_SUM_TOLERANCE`]. Inputs off
/// by more are rejected, not renormalized, so a miscomputed mass vector
/// upstream cannot slip through silently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscreteDistribution {
    masses: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidDistribution("empty mass vector".to_string()));
        }
        for (index, &mass) in masses.iter().enumerate() {
            if mass.is_nan() || mass < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "mass {mass} at index {index} is negative or not a number"
                )));
            }
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {sum}, expected 1 within {MASS_SUM_TOLERANCE}"
            )));
        }
        Ok(Self { masses })
    }

    /// Uniform distribution on `k` outcomes.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("empty mass vector".to_string()));
        }
        Self::new(vec![1.0 / k as f64; k])
    }

    /// Two-outcome distribution placing mass `p` on outcome 1.
    pub fn bernoulli(p: Prob) -> Self {
        Self {
            masses: vec![1.0 - p.0, p.0],
        }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Smallest mass over the support.
    pub fn min_mass(&self) -> f64 {
        self.masses.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl From<DiscreteDistribution> for Vec<f64> {
    fn from(d: DiscreteDistribution) -> Vec<f64> {
        d.masses
    }
}

impl TryFrom<Vec<f64>> for DiscreteDistribution {
    type Error = Error;

    fn try_from(masses: Vec<f64>) -> Result<Self> {
        Self::new(masses)
    }
}

/// A row-stochastic transition matrix: one conditional output
/// distribution per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovKernel {
    rows: Vec<DiscreteDistribution>,
}

impl MarkovKernel {
    /// Builds a kernel from conditional rows, which must all share one
    /// output alphabet size.
    pub fn new(rows: Vec<DiscreteDistribution>) -> Result<Self> {
        let width = rows
            .first()
            .ok_or_else(|| Error::InvalidDistribution("kernel needs at least one row".to_string()))?
            .len();
        for row in &rows {
            if row.len() != width {
                return Err(Error::LengthMismatch {
                    expected: width,
                    actual: row.len(),
                });
            }
        }
        Ok(Self { rows })
    }

    /// Identity channel on `k` symbols.
    pub fn identity(k: usize) -> Result<Self> {
        let rows = (0..k)
            .map(|i| {
                let mut masses = vec![0.0; k];
                masses[i] = 1.0;
                DiscreteDistribution::new(masses)
            })
            .collect::<Result<_>>()?;
        Self::new(rows)
    }

    /// Deterministic two-output channel reporting event membership:
    /// input `x` maps to output 1 when `membership[x]` holds, else to
    /// output 0. Pushing a distribution through it yields
    /// `Bernoulli(P(E))`.
    pub fn event_indicator(membership: &[bool]) -> Result<Self> {
        if membership.is_empty() {
            return Err(Error::InvalidDistribution(
                "event indicator needs at least one input symbol".to_string(),
            ));
        }
        let rows = membership
            .iter()
            .map(|&inside| DiscreteDistribution::bernoulli(if inside { Prob::ONE } else { Prob::ZERO }))
            .collect();
        Ok(Self { rows })
    }

    pub fn input_len(&self) -> usize {
        self.rows.len()
    }

    pub fn output_len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[DiscreteDistribution] {
        &self.rows
    }
}

/// A computed divergence: a nonnegative extended real.
///
/// Infinity is a legitimate outcome, reserved for support mismatch and
/// for values whose exact magnitude exceeds the f64 range (possible at
/// extreme orders). It is never conflated with an input error.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DivergenceValue(f64);

impl DivergenceValue {
    pub const ZERO: DivergenceValue = DivergenceValue(0.0);
    pub const INFINITE: DivergenceValue = DivergenceValue(f64::INFINITY);

    /// Wraps an externally computed divergence. Rejects NaN and
    /// negative values; infinity is accepted.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "divergence {value} must be a nonnegative number"
            )));
        }
        Ok(DivergenceValue(value))
    }

    /// Wraps a raw result, flushing rounding-level negatives to zero.
    fn from_computed(value: f64) -> Self {
        debug_assert!(value > -1e-6, "divergence computed as {value}");
        DivergenceValue(value.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

/// Kullback-Leibler divergence between Bernoulli distributions with
/// success probabilities `p` and `q`, in nats.
///
/// Follows the `0 ln 0 = 0` convention and returns infinity when `p`
/// puts mass where `q` puts none (that is, `q = 0 < p` or `q = 1 > p`).
pub fn binary_kl(p: Prob, q: Prob) -> DivergenceValue {
    let (p, q) = (p.0, q.0);
    let mut total = 0.0;
    if p > 0.0 {
        if q == 0.0 {
            return DivergenceValue::INFINITE;
        }
        total += p * (p / q).ln();
    }
    if p < 1.0 {
        if q == 1.0 {
            return DivergenceValue::INFINITE;
        }
        total += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
    }
    DivergenceValue::from_computed(total)
}

/// Largest `q` in `[p_hat, 1)` with `binary_kl(p_hat, q) <= budget`.
///
/// The binary KL divergence is increasing in `q` on that interval, so
/// the supremum is found by bisection: one hundred halvings shrink the
/// bracket below 1e-30, far past f64 resolution, and the lower endpoint
/// is returned so the result never overshoots the budget. A zero budget
/// returns `p_hat` exactly; an infinite budget (or `p_hat = 1`) returns
/// one.
pub fn kl_inverse_upper(p_hat: Prob, budget: f64) -> Prob {
    debug_assert!(!budget.is_nan() && budget >= 0.0);
    let budget = budget.max(0.0);
    if budget == f64::INFINITY || p_hat.0 >= 1.0 {
        return Prob::ONE;
    }
    // Divergence is zero only at q = p_hat; answering directly also
    // sidesteps the bisection predicate, whose computed KL can round to
    // zero a few ulps above p_hat.
    if budget == 0.0 {
        return p_hat;
    }
    let (mut lo, mut hi) = (p_hat.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if binary_kl(p_hat, Prob(mid)).value() <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Prob(lo)
}

/// Risk ceiling from Pinsker's inequality: `min(1, p_hat +
/// sqrt(budget / 2))`. Always at least [`kl_inverse_upper`] at the same
/// arguments, but closed-form.
pub fn pinsker_risk_bound(p_hat: Prob, budget: f64) -> Prob {
    debug_assert!(!budget.is_nan() && budget >= 0.0);
    Prob((p_hat.0 + (budget.max(0.0) / 2.0).sqrt()).min(1.0))
}

fn check_same_len(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    Ok(())
}

// the negated form rejects NaN, which `order <= 1.0` would admit
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub(crate) fn check_order(order: f64) -> Result<()> {
    if !(order > 1.0) || !order.is_finite() {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

/// Natural log of the power sum `sum_x p(x)^e q(x)^(1-e)` for an
/// exponent `e > 1`, or `None` when `p` has mass at a zero of `q`.
/// Working with `e ln p + (1-e) ln q` keeps exponents of order 1e7
/// representable.
fn power_sum_log(p: &[f64], q: &[f64], e: f64) -> Option<f64> {
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return None;
        }
        terms.push(e * pi.ln() + (1.0 - e) * qi.ln());
    }
    Some(log_sum_exp(&terms))
}

/// Renyi divergence of order `alpha > 1`, in nats:
/// `ln(sum_x p(x)^alpha q(x)^(1-alpha)) / (alpha - 1)`.
pub fn renyi_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_same_len(p, q)?;
    check_order(alpha)?;
    match power_sum_log(p.masses(), q.masses(), alpha) {
        None => Ok(DivergenceValue::INFINITE),
        Some(ls) => Ok(DivergenceValue::from_computed(ls / (alpha - 1.0))),
    }
}

/// Chi-squared divergence `sum_x p(x)^2 / q(x) - 1`.
pub fn chi_squared_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<DivergenceValue> {
    check_same_len(p, q)?;
    let mut sum = 0.0;
    for (&pi, &qi) in p.masses().iter().zip(q.masses()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(DivergenceValue::INFINITE);
        }
        sum += pi * pi / qi;
    }
    Ok(DivergenceValue::from_computed(sum - 1.0))
}

/// Hellinger divergence of order `p > 1`:
/// `(sum_x P(x)^p Q(x)^(1-p) - 1) / (p - 1)`.
///
/// The power sum is accumulated in the log domain and exponentiated
/// with `exp_m1`, which keeps near-zero divergences exact. At extreme
/// orders the true value can exceed the f64 range even on strictly
/// positive inputs; such overflow comes back as infinity, never NaN.
pub fn hellinger_p_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    order: f64,
) -> Result<DivergenceValue> {
    check_same_len(p, q)?;
    check_order(order)?;
    match power_sum_log(p.masses(), q.masses(), order) {
        None => Ok(DivergenceValue::INFINITE),
        Some(ls) => Ok(DivergenceValue::from_computed(ls.exp_m1() / (order - 1.0))),
    }
}

// negated comparisons so a generator producing NaN fails validation
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_generator(f: &impl Fn(f64) -> f64) -> Result<()> {
    if !(f(1.0).abs() <= 1e-12) {
        return Err(Error::InvalidGenerator("generator must vanish at 1"));
    }
    for &(a, b) in &[(0.01, 1.0), (1.0, 100.0), (0.01, 100.0)] {
        let mid = f(0.5 * (a + b));
        let chord = 0.5 * (f(a) + f(b));
        let tolerance = 1e-9 * (1.0 + f(a).abs() + f(b).abs());
        if !(mid <= chord + tolerance) {
            return Err(Error::InvalidGenerator(
                "midpoint convexity spot check failed on [0.01, 100]",
            ));
        }
    }
    Ok(())
}

/// f-divergence `sum_x q(x) f(p(x)/q(x))` for a convex generator with
/// `f(1) = 0`.
///
/// The generator is spot-checked before use: it must vanish at 1 and
/// satisfy midpoint convexity on three sample pairs spanning
/// `[0.01, 100]`. That is a cheap guard against passing a concave or
/// shifted function, not a convexity proof; the contract stays with the
/// caller.
///
/// Mass of `p` outside the support of `q` contributes
/// `p(x) * slope_at_infinity`. Pass `None` to treat the slope as
/// infinite, the correct reading for super-linear generators such as
/// `t ln t` or `t^2 - 1`.
pub fn f_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    generator: impl Fn(f64) -> f64,
    slope_at_infinity: Option<f64>,
) -> Result<DivergenceValue> {
    check_same_len(p, q)?;
    check_generator(&generator)?;
    let mut sum = 0.0;
    for (&pi, &qi) in p.masses().iter().zip(q.masses()) {
        if qi == 0.0 {
            if pi == 0.0 {
                continue;
            }
            match slope_at_infinity {
                Some(slope) => sum += pi * slope,
                None => return Ok(DivergenceValue::INFINITE),
            }
        } else {
            sum += qi * generator(pi / qi);
        }
    }
    if sum.is_nan() {
        return Err(Error::InvalidGenerator("generator produced NaN"));
    }
    Ok(DivergenceValue::from_computed(sum))
}

/// Image of `p` under the channel `kernel`.
pub fn pushforward(kernel: &MarkovKernel, p: &DiscreteDistribution) -> Result<DiscreteDistribution> {
    if kernel.input_len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: kernel.input_len(),
            actual: p.len(),
        });
    }
    let mut out = vec![0.0; kernel.output_len()];
    for (row, &mass) in kernel.rows().iter().zip(p.masses()) {
        for (acc, &conditional) in out.iter_mut().zip(row.masses()) {
            *acc += mass * conditional;
        }
    }
    DiscreteDistribution::new(out)
}

/// Selects the divergence a data-processing check evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceSelector {
    Renyi { alpha: f64 },
    Hellinger { order: f64 },
    ChiSquared,
    Kl,
}

impl DivergenceSelector {
    /// Evaluates the selected divergence between `p` and `q`. The KL
    /// arm goes through [`f_divergence`] with the `t ln t` generator.
    pub fn evaluate(
        &self,
        p: &DiscreteDistribution,
        q: &DiscreteDistribution,
    ) -> Result<DivergenceValue> {
        match *self {
            DivergenceSelector::Renyi { alpha } => renyi_divergence(p, q, alpha),
            DivergenceSelector::Hellinger { order } => hellinger_p_divergence(p, q, order),
            DivergenceSelector::ChiSquared => chi_squared_divergence(p, q),
            DivergenceSelector::Kl => {
                f_divergence(p, q, |t| if t == 0.0 { 0.0 } else { t * t.ln() }, None)
            }
        }
    }
}

/// Evaluates one divergence on both sides of a channel.
///
/// Returns `(after, before)`: the divergence between the pushforwards
/// and between the original distributions. Data processing guarantees
/// the first never exceeds the second; the verification sweep checks
/// exactly this pair on random instances.
pub fn dpi_check(
    kernel: &MarkovKernel,
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    selector: DivergenceSelector,
) -> Result<(DivergenceValue, DivergenceValue)> {
    let p_out = pushforward(kernel, p)?;
    let q_out = pushforward(kernel, q)?;
    let after = selector.evaluate(&p_out, &q_out)?;
    let before = selector.evaluate(p, q)?;
    Ok((after, before))
}
