//! Generalization certificates from change-of-measure inequalities.
//!
//! The pipeline has three stages. [`divergence`] evaluates Renyi,
//! Hellinger, chi-squared, and generic f-divergences between finite
//! distributions, all in the log domain where it matters, plus the
//! binary KL function and its inversion. [`change_of_measure`] turns a
//! divergence between two distributions into a transfer of event
//! probabilities from one to the other, and brute-force checks those
//! transfers (and the data-processing inequality behind them) on
//! millions of random instances. [`bounds`] instantiates the transfers
//! as closed-form budgets on the binary KL divergence between
//! empirical and population loss, which [`certify`](bounds::certify)
//! inverts into a population-risk ceiling that holds with probability
//! `1 - delta`.
//!
//! [`experiment`] exercises the whole stack on a synthetic linear
//! classification task: it draws a finite hypothesis class, measures
//! how often each budget's guarantee fails over thousands of
//! independent trials, and tabulates the budgets themselves for
//! comparison plots.
//!
//! The `parallel` feature (on by default) runs verification batches,
//! population-loss estimation, and experiment trials on a work-stealing
//! pool. Outputs are bit-identical with the feature off: every random
//! draw comes from a counter-derived stream, never from thread order.

pub mod bounds;
pub mod change_of_measure;
pub mod divergence;
pub mod error;
pub mod experiment;
mod math;

pub use bounds::{certify, BoundCertificate, BoundRequest, Method};
pub use change_of_measure::{verify_lemmas, VerifyOptions, VerifyReport};
pub use divergence::{
    binary_kl, kl_inverse_upper, DiscreteDistribution, DivergenceSelector, DivergenceValue,
    MarkovKernel, Prob,
};
pub use error::{Error, Result};
pub use experiment::ExperimentConfig;
