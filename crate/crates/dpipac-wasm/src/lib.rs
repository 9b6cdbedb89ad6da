//! Browser bindings for the certificate library.
//!
//! Every export takes plain numbers and strings and returns a JSON
//! document as a `String`, so the demo page needs no glue beyond
//! `JSON.parse`. Failures come back as `{"error": "..."}` instead of
//! thrown exceptions, which keeps the page's error handling in one
//! place. The underlying crate is built without its thread-pool
//! feature here; everything runs on the browser's main thread.

use std::str::FromStr;

use wasm_bindgen::prelude::*;

use dpipac::bounds::{certify, sweep, BoundRequest, Method};
use dpipac::change_of_measure::{verify_lemmas, VerifyOptions};
use dpipac::divergence::Prob;

fn error_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(error_json)
}

/// Evaluates one certificate. `order` may be omitted (undefined) for
/// the parameter-free families; `q_mass` is ignored by `test_set`.
#[wasm_bindgen]
pub fn certify_json(
    method: &str,
    n: u64,
    delta: f64,
    q_mass: f64,
    empirical_loss: f64,
    order: Option<f64>,
) -> String {
    let method = match Method::from_str(method) {
        Ok(method) => method,
        Err(e) => return error_json(e),
    };
    let order = if method.requires_order() { order } else { None };
    let result = Prob::new(empirical_loss)
        .and_then(|loss| {
            let request = BoundRequest::new(method, n, delta, q_mass, order)?;
            certify(&request, loss)
        });
    match result {
        Ok(certificate) => to_json(&certificate),
        Err(e) => error_json(e),
    }
}

/// Budget curves for the comparison chart: every family the chart
/// shows, on a geometric grid of `points` sample sizes spanning
/// [`n_min`, `n_max`], with the given order for the parametrized
/// families. Returns the same rows the CLI's `compare` subcommand
/// prints, as a JSON array.
#[wasm_bindgen]
pub fn budget_curves_json(
    n_min: u64,
    n_max: u64,
    points: u32,
    delta: f64,
    q_min: f64,
    order: f64,
) -> String {
    if n_min == 0 || n_max < n_min || points < 2 {
        return error_json("need 0 < n_min <= n_max and at least 2 grid points");
    }
    let span = (n_max as f64 / n_min as f64).ln();
    let mut n_values: Vec<u64> = (0..points)
        .map(|i| {
            let t = f64::from(i) / f64::from(points - 1);
            (n_min as f64 * (span * t).exp()).round() as u64
        })
        .collect();
    n_values.dedup();

    let methods = [
        Method::OccamsRazor,
        Method::PacBayesPointMass,
        Method::ChiSquared,
        Method::DAlpha,
        Method::HellingerP,
    ];
    match sweep(&methods, &n_values, delta, q_min, &[order]) {
        Ok(rows) => to_json(&rows),
        Err(e) => error_json(e),
    }
}

/// Runs the randomized soundness sweep in the browser and returns the
/// report: checks performed, violations found, worst slack observed.
#[wasm_bindgen]
pub fn verify_lemmas_json(trials: u32, seed: u32) -> String {
    let options = VerifyOptions {
        trials: u64::from(trials),
        seed: u64::from(seed),
        ..VerifyOptions::default()
    };
    match verify_lemmas(&options) {
        Ok(report) => to_json(&report),
        Err(e) => error_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certify_json_round_trips() {
        let doc = certify_json("occams_razor", 100, 0.025, 0.02, 0.0, None);
        let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(value["method"], "occams_razor");
        assert_eq!(value["kl_budget"], 0.07600902459542082);
        assert!(value.get("error").is_none());
    }

    #[test]
    fn errors_surface_as_json_not_panics() {
        let doc = certify_json("no_such_method", 100, 0.025, 0.02, 0.0, None);
        let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert!(value["error"].as_str().unwrap().contains("no_such_method"));

        let doc = certify_json("d_alpha", 100, 0.025, 0.02, 0.0, None);
        let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert!(value.get("error").is_some(), "missing order must be reported");

        let doc = budget_curves_json(100, 10, 5, 0.025, 0.02, 10.0);
        let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert!(value.get("error").is_some());
    }

    #[test]
    fn curves_cover_the_grid_for_every_family() {
        let doc = budget_curves_json(100, 1600, 9, 0.025, 0.02, 10.0);
        let rows: Vec<serde_json::Value> = serde_json::from_str(&doc).unwrap();
        assert_eq!(rows.len(), 5 * 9);
        assert!(rows.iter().all(|r| r["kl_budget"].as_f64().unwrap() > 0.0));
    }

    #[test]
    fn browser_verify_report_is_clean() {
        let doc = verify_lemmas_json(200, 1);
        let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(value["violations"], 0);
        assert_eq!(value["trials"], 200);
    }
}
