//! Squeezing-parameter estimation: EM-fitted Bayes estimate from the
//! squeezing-covariant POVM, and a closed-form maximum-likelihood estimate
//! from homodyne outcomes.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use crate::conjugate::{em_fit, gaussian_posterior, EmOptions, GaussianParams, LinearGaussianModel};
use crate::error::{ensure_finite, Error, Result};
use crate::sim::{povm_variance, MeasurementBatch, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SqueezingMethod {
    PovmEm,
    PovmGenie,
    HomodyneMl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingEstimate {
    pub r_hat: f64,
    pub method: SqueezingMethod,
    /// Prior used for the posterior: EM fit, or the true prior for the genie.
    pub fitted_prior: Option<GaussianParams>,
    /// Present for the POVM methods only.
    pub posterior: Option<GaussianParams>,
    /// Wall-clock time spent inside the estimator.
    pub runtime_ns: u64,
    pub converged: bool,
}

fn elapsed_ns(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX)
}

fn povm_model(batch: &MeasurementBatch, alpha_abs: f64) -> Result<LinearGaussianModel> {
    batch.require(Scheme::PovmSqueezing)?;
    LinearGaussianModel::constant(1.0, batch.count(), povm_variance(alpha_abs)?)
}

/// Posterior-mean estimate of `r` with the prior fitted by EM.
pub fn estimate_povm_em(batch: &MeasurementBatch, alpha_abs: f64, opts: &EmOptions) -> Result<SqueezingEstimate> {
    let start = Instant::now();
    let model = povm_model(batch, alpha_abs)?;
    let fit = em_fit(&model, batch.samples_re(), opts)?;
    let runtime_ns = elapsed_ns(start);
    Ok(SqueezingEstimate {
        r_hat: fit.posterior.mean,
        method: SqueezingMethod::PovmEm,
        fitted_prior: Some(fit.prior_estimate),
        posterior: Some(fit.posterior),
        runtime_ns,
        converged: fit.converged,
    })
}

/// Posterior-mean estimate of `r` under the true prior.
pub fn genie_povm_estimate(
    batch: &MeasurementBatch,
    alpha_abs: f64,
    true_prior: &GaussianParams,
) -> Result<SqueezingEstimate> {
    let start = Instant::now();
    let model = povm_model(batch, alpha_abs)?;
    let posterior = gaussian_posterior(true_prior, &model, batch.samples_re())?;
    let runtime_ns = elapsed_ns(start);
    Ok(SqueezingEstimate {
        r_hat: posterior.mean,
        method: SqueezingMethod::PovmGenie,
        fitted_prior: Some(*true_prior),
        posterior: Some(posterior),
        runtime_ns,
        converged: true,
    })
}

/// `log p(q | r) = −(M/2) ln π + M r − e^{2r} Σ (q_i − √2 α_R e^{−r})²`.
pub fn homodyne_squeezing_loglik(q: &[f64], alpha_re: f64, r: f64) -> Result<f64> {
    if q.is_empty() {
        return Err(Error::Argument(
            "homodyne log-likelihood needs at least one sample".into(),
        ));
    }
    ensure_finite("alpha_re", alpha_re)?;
    ensure_finite("r", r)?;
    let m = q.len() as f64;
    let mean = SQRT_2 * alpha_re * (-r).exp();
    let ss: f64 = q.iter().map(|&x| (x - mean) * (x - mean)).sum();
    Ok(-0.5 * m * PI.ln() + m * r - (2.0 * r).exp() * ss)
}

/// Positive root `t = e^{r̂}` of `2q'' t² − 2√2 α_R q' t − M = 0`.
fn ml_exp_r(m: f64, q1: f64, q2: f64, alpha_re: f64) -> f64 {
    let a = 2.0 * SQRT_2 * alpha_re * q1;
    let b = 8.0 * m * q2;
    let s = (a * a + b).sqrt();
    // (a + s)(s − a) = b; pick the cancellation-free form
    let numer = if a >= 0.0 { a + s } else { b / (s - a) };
    numer / (4.0 * q2)
}

/// Closed-form ML estimate of `r` from homodyne outcomes on a coherent
/// probe of known real displacement `α_R`.
pub fn estimate_ml_homodyne(batch: &MeasurementBatch, alpha_re: f64) -> Result<SqueezingEstimate> {
    let start = Instant::now();
    batch.require(Scheme::HomodyneSqueezing)?;
    ensure_finite("alpha_re", alpha_re)?;
    let q = batch.samples_re();
    let q1: f64 = q.iter().sum();
    let q2: f64 = q.iter().map(|x| x * x).sum();
    if q2 <= 0.0 {
        return Err(Error::DegenerateData(
            "all homodyne samples are zero; the ML squeezing estimate is undefined".into(),
        ));
    }
    let r_hat = ml_exp_r(q.len() as f64, q1, q2, alpha_re).ln();
    let runtime_ns = elapsed_ns(start);
    Ok(SqueezingEstimate {
        r_hat,
        method: SqueezingMethod::HomodyneMl,
        fitted_prior: None,
        posterior: None,
        runtime_ns,
        converged: true,
    })
}
