//! Estimation of displacement, squeezing and phase of single-mode Gaussian
//! states from simulated measurement records.
//!
//! Displacement and squeezing are handled by a conjugate Gaussian model whose
//! prior is learned with expectation maximization. Phase uses a von Mises
//! prior fitted by maximizing the marginal evidence. Every learned estimator
//! has a genie counterpart that is handed the true prior.

pub mod conjugate;
pub mod displacement;
pub mod error;
pub mod experiments;
pub mod optimize;
pub mod phase;
pub mod sim;
pub mod special;
pub mod squeezing;

pub use conjugate::{EmOptions, EmResult, GaussianParams, LinearGaussianModel};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentSummary, Task, TruePrior};
pub use phase::{EbOptions, VonMisesParam};
pub use sim::{MeasurementBatch, ProbeConfig, RngStream, Scheme};
pub use special::log_i0;
