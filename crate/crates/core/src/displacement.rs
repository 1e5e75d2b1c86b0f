//! Displacement estimation from heterodyne and homodyne outcomes, with the
//! EM-fitted prior or (genie) with the true prior.

use std::f64::consts::SQRT_2;

use crate::conjugate::{em_fit, gaussian_posterior, EmOptions, EmResult, GaussianParams, LinearGaussianModel};
use crate::error::{Error, Result};
use crate::sim::{heterodyne_variances, homodyne_variance, MeasurementBatch, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementEstimate {
    pub alpha_re_hat: f64,
    /// Absent for homodyne batches.
    pub alpha_im_hat: Option<f64>,
    pub fitted_prior_re: GaussianParams,
    pub fitted_prior_im: Option<GaussianParams>,
    pub posterior_re: GaussianParams,
    pub posterior_im: Option<GaussianParams>,
    /// `false` when either EM fit ran out of iterations. Always `true` for genie estimates.
    pub converged: bool,
}

/// Per-quadrature likelihoods `(model_re, model_im)` implied by the scheme.
fn quadrature_models(batch: &MeasurementBatch, r: f64) -> Result<(LinearGaussianModel, Option<LinearGaussianModel>)> {
    let m = batch.count();
    match batch.scheme() {
        Scheme::HeterodyneDisplacement => {
            let (var_re, var_im) = heterodyne_variances(r)?;
            Ok((
                LinearGaussianModel::constant(1.0, m, var_re)?,
                Some(LinearGaussianModel::constant(1.0, m, var_im)?),
            ))
        }
        Scheme::HomodyneDisplacement => Ok((LinearGaussianModel::constant(SQRT_2, m, homodyne_variance(r)?)?, None)),
        other => Err(Error::Argument(format!(
            "{} is not a displacement scheme",
            other.name()
        ))),
    }
}

fn from_fits(re: EmResult, im: Option<EmResult>) -> DisplacementEstimate {
    let converged = re.converged && im.as_ref().is_none_or(|f| f.converged);
    DisplacementEstimate {
        alpha_re_hat: re.posterior.mean,
        alpha_im_hat: im.as_ref().map(|f| f.posterior.mean),
        fitted_prior_re: re.prior_estimate,
        fitted_prior_im: im.as_ref().map(|f| f.prior_estimate),
        posterior_re: re.posterior,
        posterior_im: im.as_ref().map(|f| f.posterior),
        converged,
    }
}

/// EM estimate of both quadratures from heterodyne outcomes, with the
/// probe squeezing `r` known.
pub fn estimate_heterodyne(batch: &MeasurementBatch, r: f64, opts: &EmOptions) -> Result<DisplacementEstimate> {
    batch.require(Scheme::HeterodyneDisplacement)?;
    let (model_re, model_im) = quadrature_models(batch, r)?;
    let model_im = model_im.expect("heterodyne has two quadratures");
    let re = em_fit(&model_re, batch.samples_re(), opts)?;
    // decorrelate the imaginary-part initialization from the real part
    let im_opts = EmOptions {
        init_seed: opts.init_seed ^ 0x9e37_79b9_7f4a_7c15,
        ..*opts
    };
    let im = em_fit(&model_im, batch.samples_im(), &im_opts)?;
    Ok(from_fits(re, Some(im)))
}

/// EM estimate of `α_R` from q-quadrature homodyne outcomes.
///
/// For `α_I`, measure the p quadrature and pass those outcomes as a
/// homodyne batch; the result's `alpha_re_hat` is then the `α_I` estimate.
pub fn estimate_homodyne(batch: &MeasurementBatch, r: f64, opts: &EmOptions) -> Result<DisplacementEstimate> {
    batch.require(Scheme::HomodyneDisplacement)?;
    let (model, _) = quadrature_models(batch, r)?;
    let fit = em_fit(&model, batch.samples_re(), opts)?;
    Ok(from_fits(fit, None))
}

/// Bayes estimate with the true prior supplied, bypassing EM.
pub fn genie_estimate(
    batch: &MeasurementBatch,
    r: f64,
    true_prior_re: &GaussianParams,
    true_prior_im: Option<&GaussianParams>,
) -> Result<DisplacementEstimate> {
    let (model_re, model_im) = quadrature_models(batch, r)?;
    let posterior_re = gaussian_posterior(true_prior_re, &model_re, batch.samples_re())?;
    let (posterior_im, fitted_im) = match (model_im, true_prior_im) {
        (Some(model), Some(prior)) => (
            Some(gaussian_posterior(prior, &model, batch.samples_im())?),
            Some(*prior),
        ),
        (Some(_), None) => {
            return Err(Error::Argument(
                "heterodyne batch needs a prior for the imaginary quadrature".into(),
            ))
        }
        (None, _) => (None, None),
    };
    Ok(DisplacementEstimate {
        alpha_re_hat: posterior_re.mean,
        alpha_im_hat: posterior_im.map(|p| p.mean),
        fitted_prior_re: *true_prior_re,
        fitted_prior_im: fitted_im,
        posterior_re,
        posterior_im,
        converged: true,
    })
}
