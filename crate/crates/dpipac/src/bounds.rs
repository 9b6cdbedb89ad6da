//! Budget formulas and risk certificates.
//!
//! Every method here produces a budget `b` such that, with probability
//! at least `1 - delta` over the training sample, the binary KL
//! divergence between empirical and population loss stays below `b`.
//! [`certify`] converts a budget into a population-risk ceiling by
//! inverting the binary KL at the observed empirical loss, with the
//! Pinsker relaxation reported alongside.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::divergence::{check_order, kl_inverse_upper, pinsker_risk_bound, Prob};
use crate::error::{Error, Result};
use crate::math::fmt_f64;

/// Certificate family. The tags double as CLI spellings and CSV cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Single pre-registered hypothesis on a held-out set.
    TestSet,
    /// Countable class with a prior; the classical train-set bound.
    OccamsRazor,
    /// PAC-Bayes specialized to a point-mass posterior.
    PacBayesPointMass,
    /// Renyi-divergence family, order above 1.
    DAlpha,
    /// Hellinger-divergence family, order above 1.
    HellingerP,
    /// Chi-squared family with the minimum prior mass.
    ChiSquared,
    /// Limit of the order-parametrized families; numerically identical
    /// to `OccamsRazor`, kept as a distinct tag so certificates record
    /// which family they came from.
    LimitOr,
    /// Chi-squared form evaluated at a specific hypothesis's prior mass
    /// instead of the minimum.
    ChiSquaredCorollary,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::TestSet,
        Method::OccamsRazor,
        Method::PacBayesPointMass,
        Method::DAlpha,
        Method::HellingerP,
        Method::ChiSquared,
        Method::LimitOr,
        Method::ChiSquaredCorollary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::TestSet => "test_set",
            Method::OccamsRazor => "occams_razor",
            Method::PacBayesPointMass => "pac_bayes_point_mass",
            Method::DAlpha => "d_alpha",
            Method::HellingerP => "hellinger_p",
            Method::ChiSquared => "chi_squared",
            Method::LimitOr => "limit_or",
            Method::ChiSquaredCorollary => "chi_squared_corollary",
        }
    }

    /// Whether the budget formula consumes a divergence order.
    pub fn requires_order(self) -> bool {
        matches!(self, Method::DAlpha | Method::HellingerP)
    }

    /// Whether the budget depends on a prior mass at all.
    pub fn uses_prior_mass(self) -> bool {
        !matches!(self, Method::TestSet)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.as_str()).collect();
                Error::InvalidParameter(format!(
                    "unknown method `{s}`; expected one of {}",
                    known.join(", ")
                ))
            })
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".to_string()));
    }
    Ok(())
}

fn check_unit_open_closed(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in (0, 1], got {value}"
        )));
    }
    Ok(())
}

/// Budget for a single pre-registered hypothesis on `n` held-out
/// samples: `ln(1/delta) / n`.
pub fn rhs_test_set(n: u64, delta: f64) -> Result<f64> {
    check_n(n)?;
    check_unit_open_closed("delta", delta)?;
    Ok((1.0 / delta).ln() / n as f64)
}

/// Budget for a countable class with prior mass `q_mass` on the chosen
/// hypothesis: `(ln(1/q_mass) + ln(1/delta)) / n`.
pub fn rhs_occams_razor(n: u64, delta: f64, q_mass: f64) -> Result<f64> {
    check_n(n)?;
    check_unit_open_closed("delta", delta)?;
    check_unit_open_closed("q_mass", q_mass)?;
    Ok(((1.0 / q_mass).ln() + (1.0 / delta).ln()) / n as f64)
}

/// Point-mass PAC-Bayes budget:
/// `(ln(1/q_mass) + ln(2 sqrt(n) / delta)) / n`. Exceeds the Occam
/// budget by exactly `ln(2 sqrt(n)) / n`.
pub fn rhs_pac_bayes_point_mass(n: u64, delta: f64, q_mass: f64) -> Result<f64> {
    check_n(n)?;
    check_unit_open_closed("delta", delta)?;
    check_unit_open_closed("q_mass", q_mass)?;
    Ok(((1.0 / q_mass).ln() + (2.0 * (n as f64).sqrt() / delta).ln()) / n as f64)
}

/// Renyi-family budget of order `alpha > 1`:
/// `(ln(1/q_min) + (alpha/(alpha-1)) ln(1/delta)) / n`. Strictly
/// decreasing in `alpha`, approaching the Occam budget from above.
pub fn rhs_d_alpha(n: u64, delta: f64, q_min: f64, alpha: f64) -> Result<f64> {
    check_n(n)?;
    check_unit_open_closed("delta", delta)?;
    check_unit_open_closed("q_min", q_min)?;
    check_order(alpha)?;
    Ok(((1.0 / q_min).ln() + alpha / (alpha - 1.0) * (1.0 / delta).ln()) / n as f64)
}

/// Hellinger-family budget of order `p > 1`:
/// `ln(q_min^(1-p) delta^(-p) - 1) / ((p-1) n)`.
///
/// With `X = q_min^(1-p) delta^(-p)`, the value equals
/// `(ln(1/q_min) + (p/(p-1)) ln(1/delta) + ln(1 - 1/X)/(p-1)) / n`
/// where `ln X = (p-1) ln(1/q_min) + p ln(1/delta)` supplies
/// `1/X = exp(-ln X)`, so no intermediate power is ever materialized.
/// The first two terms are assembled exactly like [`rhs_d_alpha`] and
/// the third is never positive, which keeps this budget at or below the
/// order-matched Renyi budget in floating point, not just on paper.
/// Once `ln X` passes ~745 the correction underflows and the two
/// budgets coincide bitwise, an error far below 1e-300.
///
/// The formula needs `X > 1`, which only fails at `delta = q_min = 1`;
/// that case is rejected. The result may be negative when `delta` is
/// large (above one half), where the underlying transfer has left its
/// applicable regime; [`certify`] clamps such budgets and attaches a
/// warning.
pub fn rhs_hellinger_p(n: u64, delta: f64, q_min: f64, p: f64) -> Result<f64> {
    check_n(n)?;
    check_unit_open_closed("delta", delta)?;
    check_unit_open_closed("q_min", q_min)?;
    check_order(p)?;
    let ln_x = (p - 1.0) * (1.0 / q_min).ln() + p * (1.0 / delta).ln();
    let correction = (-(-ln_x).exp()).ln_1p();
    if ln_x <= 0.0 || correction == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter(
            "hellinger budget undefined: q_min^(1-p) * delta^(-p) must exceed 1".to_string(),
        ));
    }
    Ok(
        ((1.0 / q_min).ln() + p / (p - 1.0) * (1.0 / delta).ln() + correction / (p - 1.0))
            / n as f64,
    )
}

/// Chi-squared family budget:
/// `(ln((1 + q_min)/q_min) + 2 ln(1/delta)) / n`, with the first term
/// computed as `ln_1p(q_min) + ln(1/q_min)` so tiny masses lose no
/// precision.
pub fn rhs_chi_squared(n: u64, delta: f64, q_min: f64) -> Result<f64> {
    check_n(n)?;
    check_unit_open_closed("delta", delta)?;
    check_unit_open_closed("q_min", q_min)?;
    Ok((q_min.ln_1p() + (1.0 / q_min).ln() + 2.0 * (1.0 / delta).ln()) / n as f64)
}

/// Limiting form of the order-parametrized families as the order grows
/// without bound; coincides with the Occam budget exactly.
pub fn rhs_limit_or(n: u64, delta: f64, q_mass: f64) -> Result<f64> {
    rhs_occams_razor(n, delta, q_mass)
}

/// Chi-squared budget read at a specific hypothesis's prior mass; the
/// same closed form as [`rhs_chi_squared`] with `q_mass` in place of
/// the minimum mass.
pub fn rhs_chi_squared_corollary(n: u64, delta: f64, q_mass: f64) -> Result<f64> {
    rhs_chi_squared(n, delta, q_mass)
}

/// Evaluates the named method's budget. `order` is required for the
/// order-parametrized families and ignored by the rest.
pub fn rhs_for(method: Method, n: u64, delta: f64, q_mass: f64, order: Option<f64>) -> Result<f64> {
    let need_order = || {
        order.ok_or_else(|| {
            Error::InvalidParameter(format!("method {method} needs a divergence order"))
        })
    };
    match method {
        Method::TestSet => rhs_test_set(n, delta),
        Method::OccamsRazor => rhs_occams_razor(n, delta, q_mass),
        Method::PacBayesPointMass => rhs_pac_bayes_point_mass(n, delta, q_mass),
        Method::DAlpha => rhs_d_alpha(n, delta, q_mass, need_order()?),
        Method::HellingerP => rhs_hellinger_p(n, delta, q_mass, need_order()?),
        Method::ChiSquared => rhs_chi_squared(n, delta, q_mass),
        Method::LimitOr => rhs_limit_or(n, delta, q_mass),
        Method::ChiSquaredCorollary => rhs_chi_squared_corollary(n, delta, q_mass),
    }
}

/// Inputs of one certificate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRequest {
    pub method: Method,
    pub n: u64,
    pub delta: f64,
    pub q_mass: f64,
    pub order: Option<f64>,
}

impl BoundRequest {
    /// Validates ranges: `n >= 1`, `delta` and `q_mass` in `(0, 1]`,
    /// and a finite order above 1 whenever the method requires one.
    /// Parameter-free methods accept and echo an order without using
    /// it.
    pub fn new(method: Method, n: u64, delta: f64, q_mass: f64, order: Option<f64>) -> Result<Self> {
        check_n(n)?;
        check_unit_open_closed("delta", delta)?;
        check_unit_open_closed("q_mass", q_mass)?;
        if method.requires_order() {
            match order {
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "method {method} needs a divergence order"
                    )))
                }
                Some(o) => check_order(o)?,
            }
        }
        Ok(BoundRequest {
            method,
            n,
            delta,
            q_mass,
            order,
        })
    }
}

/// A self-contained record of one certified bound evaluation. Field
/// order matches the serialized contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub method: Method,
    pub n: u64,
    pub delta: f64,
    pub q_mass: f64,
    pub order: Option<f64>,
    pub kl_budget: f64,
    pub empirical_loss: Prob,
    pub risk_upper: Prob,
    pub risk_upper_pinsker: Prob,
    pub warnings: Vec<String>,
}

const HELLINGER_DELTA_WARNING: &str = "hellinger_p is only guaranteed for sufficiently small \
     delta; at delta >= 0.5 the certificate may not be valid";
const NEGATIVE_BUDGET_WARNING: &str = "computed budget was negative (transfer outside its \
     applicable regime); clamped to zero, do not rely on this certificate";

/// Produces a certificate: the method's budget, then population-risk
/// ceilings by KL inversion and by the Pinsker relaxation.
pub fn certify(request: &BoundRequest, empirical_loss: Prob) -> Result<BoundCertificate> {
    let raw = rhs_for(
        request.method,
        request.n,
        request.delta,
        request.q_mass,
        request.order,
    )?;
    let mut warnings = Vec::new();
    if request.method == Method::HellingerP && request.delta >= 0.5 {
        warnings.push(HELLINGER_DELTA_WARNING.to_string());
    }
    let kl_budget = if raw < 0.0 {
        warnings.push(NEGATIVE_BUDGET_WARNING.to_string());
        0.0
    } else {
        raw
    };
    Ok(BoundCertificate {
        method: request.method,
        n: request.n,
        delta: request.delta,
        q_mass: request.q_mass,
        order: request.order,
        kl_budget,
        empirical_loss,
        risk_upper: kl_inverse_upper(empirical_loss, kl_budget),
        risk_upper_pinsker: pinsker_risk_bound(empirical_loss, kl_budget),
        warnings,
    })
}

/// One row of a budget table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub method: Method,
    pub n: u64,
    pub order: Option<f64>,
    pub delta: f64,
    pub q_min: f64,
    pub kl_budget: f64,
}

/// Evaluates every method over the sample-size grid. Order-parametrized
/// methods expand over `orders`; the rest contribute one row per `n`.
/// Rows appear in a fixed order regardless of how they are computed:
/// methods outermost, then `n`, then order.
pub fn sweep(
    methods: &[Method],
    n_values: &[u64],
    delta: f64,
    q_min: f64,
    orders: &[f64],
) -> Result<Vec<SweepRow>> {
    if methods.iter().any(|m| m.requires_order()) && orders.is_empty() {
        return Err(Error::InvalidParameter(
            "orders list must be nonempty when an order-parametrized method is requested"
                .to_string(),
        ));
    }
    let mut rows = Vec::new();
    for &method in methods {
        for &n in n_values {
            if method.requires_order() {
                for &order in orders {
                    rows.push(SweepRow {
                        method,
                        n,
                        order: Some(order),
                        delta,
                        q_min,
                        kl_budget: rhs_for(method, n, delta, q_min, Some(order))?,
                    });
                }
            } else {
                rows.push(SweepRow {
                    method,
                    n,
                    order: None,
                    delta,
                    q_min,
                    kl_budget: rhs_for(method, n, delta, q_min, None)?,
                });
            }
        }
    }
    Ok(rows)
}

/// Header of [`sweep_to_csv`] output.
pub const SWEEP_CSV_HEADER: &str = "method,n,order,delta,q_min,kl_budget";

/// Renders sweep rows as CSV. Floats carry 17 significant digits so the
/// table parses back to identical values; the order column is empty for
/// parameter-free methods.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let order = row.order.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.method,
            row.n,
            order,
            fmt_f64(row.delta),
            fmt_f64(row.q_min),
            fmt_f64(row.kl_budget)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    // reference literals keep every oracle digit; rustc rounds to nearest
    #![allow(clippy::excessive_precision)]

    use super::*;
    use approx::assert_abs_diff_eq;

    // Extended-precision reference values (200-bit arithmetic) at
    // n=100, delta=0.025, q=1/50, order=10.
    const TEST_SET_REF: f64 = 0.036888794541139363029;
    const OCCAM_REF: f64 = 0.076009024595420823615;
    const PAC_BAYES_REF: f64 = 0.10596634733096073355;
    const D_ALPHA_10_REF: f64 = 0.080107779544436308396;
    const CHI_SQUARED_REF: f64 = 0.11309584540952198377;
    const CHI_SQUARED_HALF_REF: f64 = 0.084763711968959822971;
    const PAC_BAYES_400_REF: f64 = 0.028224454784140046661;
    const D_ALPHA_1E7_REF: f64 = 0.076009028284300646617;
    const OCCAM_RISK_AT_ZERO: f64 = 0.073192157544170041377;

    #[test]
    fn method_tags_round_trip() {
        for method in Method::ALL {
            assert_eq!(method.as_str().parse::<Method>().unwrap(), method);
            let json = serde_json::to_string(&method).unwrap();
            assert_eq!(json, format!("\"{}\"", method.as_str()));
        }
        assert!("renyi".parse::<Method>().is_err());
    }

    #[test]
    fn reference_budgets_at_the_default_configuration() {
        let q = 1.0 / 50.0;
        assert_abs_diff_eq!(rhs_test_set(100, 0.025).unwrap(), TEST_SET_REF, epsilon = 1e-15);
        assert_abs_diff_eq!(
            rhs_occams_razor(100, 0.025, q).unwrap(),
            OCCAM_REF,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rhs_pac_bayes_point_mass(100, 0.025, q).unwrap(),
            PAC_BAYES_REF,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rhs_d_alpha(100, 0.025, q, 10.0).unwrap(),
            D_ALPHA_10_REF,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rhs_hellinger_p(100, 0.025, q, 10.0).unwrap(),
            D_ALPHA_10_REF,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rhs_chi_squared(100, 0.025, q).unwrap(),
            CHI_SQUARED_REF,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rhs_pac_bayes_point_mass(400, 0.025, q).unwrap(),
            PAC_BAYES_400_REF,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rhs_chi_squared_corollary(100, 0.025, 0.5).unwrap(),
            CHI_SQUARED_HALF_REF,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rhs_d_alpha(100, 0.025, q, 1e7).unwrap(),
            D_ALPHA_1E7_REF,
            epsilon = 1e-15
        );
    }

    #[test]
    fn trivial_reductions() {
        assert_eq!(rhs_test_set(100, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            rhs_occams_razor(100, 0.025, 1.0).unwrap(),
            rhs_test_set(100, 0.025).unwrap(),
            epsilon = 1e-18
        );
        assert_abs_diff_eq!(
            rhs_occams_razor(250, 1.0, 0.2).unwrap(),
            (5.0f64).ln() / 250.0,
            epsilon = 1e-18
        );
        assert_abs_diff_eq!(
            rhs_chi_squared(80, 1.0, 0.25).unwrap(),
            (5.0f64).ln() / 80.0,
            epsilon = 1e-16
        );
        assert_eq!(
            rhs_limit_or(123, 0.3, 0.07).unwrap(),
            rhs_occams_razor(123, 0.3, 0.07).unwrap()
        );
        assert_eq!(
            rhs_chi_squared_corollary(123, 0.3, 0.07).unwrap(),
            rhs_chi_squared(123, 0.3, 0.07).unwrap()
        );
    }

    #[test]
    fn one_over_n_scaling() {
        for n in [1u64, 7, 100] {
            assert_abs_diff_eq!(
                rhs_test_set(2 * n, 0.1).unwrap(),
                rhs_test_set(n, 0.1).unwrap() / 2.0,
                epsilon = 1e-16
            );
            assert_abs_diff_eq!(
                rhs_d_alpha(2 * n, 0.1, 0.3, 2.0).unwrap(),
                rhs_d_alpha(n, 0.1, 0.3, 2.0).unwrap() / 2.0,
                epsilon = 1e-16
            );
        }
    }

    #[test]
    fn d_alpha_strictly_decreasing_in_order() {
        let orders = [1.5, 2.0, 10.0, 1e3, 1e7];
        let budgets: Vec<f64> = orders
            .iter()
            .map(|&a| rhs_d_alpha(100, 0.025, 0.02, a).unwrap())
            .collect();
        for pair in budgets.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        let occam = rhs_occams_razor(100, 0.025, 0.02).unwrap();
        assert!(budgets.last().unwrap() > &occam);
    }

    #[test]
    fn hellinger_rejects_degenerate_point() {
        assert!(rhs_hellinger_p(10, 1.0, 1.0, 2.0).is_err());
        assert!(rhs_hellinger_p(10, 0.5, 1.0, 2.0).is_ok());
    }

    #[test]
    fn hellinger_negative_at_large_delta() {
        // X barely above 1 makes ln(X - 1) strongly negative
        let v = rhs_hellinger_p(100, 0.9, 0.9, 1.5).unwrap();
        assert!(v < 0.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(rhs_test_set(0, 0.1).is_err());
        assert!(rhs_test_set(10, 0.0).is_err());
        assert!(rhs_test_set(10, 1.5).is_err());
        assert!(rhs_test_set(10, f64::NAN).is_err());
        assert!(rhs_occams_razor(10, 0.1, 0.0).is_err());
        assert!(rhs_d_alpha(10, 0.1, 0.5, 1.0).is_err());
        assert!(rhs_for(Method::DAlpha, 10, 0.1, 0.5, None).is_err());
        assert!(rhs_for(Method::TestSet, 10, 0.1, 0.5, None).is_ok());
    }

    #[test]
    fn extreme_parameters_stay_finite() {
        for method in Method::ALL {
            let order = method.requires_order().then_some(1e7);
            let v = rhs_for(method, 100, 1e-9, 1e-9, order).unwrap();
            assert!(v.is_finite() && v > 0.0, "{method}: {v}");
        }
    }

    #[test]
    fn bound_request_validation() {
        assert!(BoundRequest::new(Method::DAlpha, 100, 0.025, 0.02, None).is_err());
        assert!(BoundRequest::new(Method::DAlpha, 100, 0.025, 0.02, Some(0.5)).is_err());
        assert!(BoundRequest::new(Method::TestSet, 100, 0.025, 1.0, None).is_ok());
        assert!(BoundRequest::new(Method::TestSet, 100, 2.0, 1.0, None).is_err());
    }

    #[test]
    fn certify_occam_example() {
        let request = BoundRequest::new(Method::OccamsRazor, 100, 0.025, 0.02, None).unwrap();
        let cert = certify(&request, Prob::ZERO).unwrap();
        assert_abs_diff_eq!(cert.kl_budget, OCCAM_REF, epsilon = 1e-15);
        assert_abs_diff_eq!(cert.risk_upper.value(), OCCAM_RISK_AT_ZERO, epsilon = 1e-12);
        assert!(cert.warnings.is_empty());
        assert!(cert.risk_upper.value() <= cert.risk_upper_pinsker.value());
    }

    #[test]
    fn certify_zero_budget_returns_empirical_loss() {
        let request = BoundRequest::new(Method::TestSet, 100, 1.0, 1.0, None).unwrap();
        let loss = Prob::new(0.3).unwrap();
        let cert = certify(&request, loss).unwrap();
        assert_eq!(cert.kl_budget, 0.0);
        assert_eq!(cert.risk_upper.value(), 0.3);
    }

    #[test]
    fn certify_orders_the_parametric_families() {
        let loss = Prob::new(0.1).unwrap();
        let d_alpha = certify(
            &BoundRequest::new(Method::DAlpha, 100, 0.025, 0.02, Some(1e7)).unwrap(),
            loss,
        )
        .unwrap();
        let pac_bayes = certify(
            &BoundRequest::new(Method::PacBayesPointMass, 100, 0.025, 0.02, None).unwrap(),
            loss,
        )
        .unwrap();
        assert!(d_alpha.risk_upper.value() < pac_bayes.risk_upper.value());
    }

    #[test]
    fn certify_warns_on_large_delta_hellinger() {
        let request = BoundRequest::new(Method::HellingerP, 100, 0.6, 0.02, Some(2.0)).unwrap();
        let cert = certify(&request, Prob::ZERO).unwrap();
        assert!(!cert.warnings.is_empty());
        assert!(cert.kl_budget >= 0.0);
    }

    #[test]
    fn certify_clamps_negative_budget_with_warning() {
        let request = BoundRequest::new(Method::HellingerP, 100, 0.9, 0.9, Some(1.5)).unwrap();
        let cert = certify(&request, Prob::new(0.2).unwrap()).unwrap();
        assert_eq!(cert.kl_budget, 0.0);
        assert_eq!(cert.warnings.len(), 2);
        assert_eq!(cert.risk_upper.value(), 0.2);
    }

    #[test]
    fn certificate_json_field_order() {
        let request = BoundRequest::new(Method::DAlpha, 100, 0.025, 0.02, Some(10.0)).unwrap();
        let cert = certify(&request, Prob::ZERO).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        assert_eq!(
            crate::math::json_keys(&json),
            [
                "method",
                "n",
                "delta",
                "q_mass",
                "order",
                "kl_budget",
                "empirical_loss",
                "risk_upper",
                "risk_upper_pinsker",
                "warnings"
            ]
        );
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["method"], "d_alpha");
        let back: BoundCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn sweep_row_order_and_csv() {
        let rows = sweep(
            &[Method::OccamsRazor, Method::DAlpha],
            &[100, 200],
            0.025,
            0.02,
            &[10.0, 1e3],
        )
        .unwrap();
        assert_eq!(rows.len(), 2 + 4);
        assert_eq!(rows[0].method, Method::OccamsRazor);
        assert_eq!(rows[0].n, 100);
        assert_eq!(rows[2].method, Method::DAlpha);
        assert_eq!((rows[2].n, rows[2].order), (100, Some(10.0)));
        assert_eq!((rows[3].n, rows[3].order), (100, Some(1e3)));
        assert_eq!(rows[4].n, 200);

        let csv = sweep_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER);
        let first = lines.next().unwrap();
        assert!(first.starts_with("occams_razor,100,,"));
        let parsed: f64 = first.split(',').next_back().unwrap().parse().unwrap();
        assert_eq!(parsed, rows[0].kl_budget);
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn sweep_needs_orders_for_parametric_methods() {
        assert!(sweep(&[Method::DAlpha], &[100], 0.025, 0.02, &[]).is_err());
        assert!(sweep(&[Method::OccamsRazor], &[100], 0.025, 0.02, &[]).is_ok());
    }

    #[test]
    fn sweep_budgets_decrease_in_n() {
        let rows = sweep(
            &[Method::PacBayesPointMass],
            &[100, 200, 400, 800, 1600],
            0.025,
            0.02,
            &[],
        )
        .unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].kl_budget < pair[0].kl_budget);
        }
    }
}
