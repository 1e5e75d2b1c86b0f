//! Gaussian prior / linear-Gaussian likelihood machinery and the EM loop
//! that fits the prior hyperparameters from data.
//!
//! The observation model is `y = u·g + n`, `n ~ N(0, σ_n² I)`, with a scalar
//! latent `u ~ N(μ₀, σ₀²)`. Every displacement and POVM-squeezing estimator
//! is a special case with `g = 1_M` or `g = √2·1_M`.
//!
//! All loops work on the sufficient statistics `(M, gᵀg, gᵀy, yᵀy)`, so an EM
//! iteration costs O(1) once the data have been summarized.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sim::RngStream;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Mean and variance of a scalar Gaussian, used as prior or posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::Domain(format!("Gaussian mean must be finite, got {mean}")));
        }
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::Domain(format!(
                "Gaussian variance must be positive and finite, got {variance}"
            )));
        }
        Ok(Self { mean, variance })
    }

    pub fn precision(&self) -> f64 {
        1.0 / self.variance
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (LN_2PI + self.variance.ln() + d * d / self.variance)
    }
}

/// Likelihood `y ~ N(u·g, σ_n² I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGaussianModel {
    gain: Vec<f64>,
    noise_variance: f64,
}

impl LinearGaussianModel {
    pub fn new(gain: Vec<f64>, noise_variance: f64) -> Result<Self> {
        if gain.is_empty() {
            return Err(Error::Argument("gain vector must be non-empty".into()));
        }
        if gain.iter().any(|g| !g.is_finite()) {
            return Err(Error::Domain("gain entries must be finite".into()));
        }
        if gain.iter().all(|&g| g == 0.0) {
            return Err(Error::Argument("gain vector must not be all zero".into()));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(Error::Domain(format!(
                "noise variance must be positive and finite, got {noise_variance}"
            )));
        }
        Ok(Self { gain, noise_variance })
    }

    /// `g = value·1_M`.
    pub fn constant(value: f64, m: usize, noise_variance: f64) -> Result<Self> {
        Self::new(vec![value; m], noise_variance)
    }

    pub fn gain(&self) -> &[f64] {
        &self.gain
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn len(&self) -> usize {
        self.gain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gain.is_empty()
    }

    /// Reduces `y` to the statistics every routine here needs.
    pub fn summarize(&self, y: &[f64]) -> Result<DataSummary> {
        if y.is_empty() {
            return Err(Error::Argument("observation vector is empty".into()));
        }
        if y.len() != self.gain.len() {
            return Err(Error::Argument(format!(
                "observation length {} does not match gain length {}",
                y.len(),
                self.gain.len()
            )));
        }
        let mut s = DataSummary {
            m: y.len(),
            gtg: 0.0,
            gty: 0.0,
            yty: 0.0,
        };
        for (&g, &v) in self.gain.iter().zip(y) {
            s.gtg += g * g;
            s.gty += g * v;
            s.yty += v * v;
        }
        Ok(s)
    }
}

/// Sufficient statistics of one observation vector under a fixed gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSummary {
    pub m: usize,
    pub gtg: f64,
    pub gty: f64,
    pub yty: f64,
}

impl DataSummary {
    /// `Σ (y_i − g_i u)²`.
    fn residual_sq(&self, u: f64) -> f64 {
        (self.yty - 2.0 * u * self.gty + u * u * self.gtg).max(0.0)
    }
}

pub(crate) fn posterior_from_summary(prior: &GaussianParams, noise_variance: f64, s: &DataSummary) -> GaussianParams {
    let precision = 1.0 / prior.variance + s.gtg / noise_variance;
    let variance = 1.0 / precision;
    let mean = variance * (s.gty / noise_variance + prior.mean / prior.variance);
    GaussianParams { mean, variance }
}

/// Posterior of `u` given `y`: precision `1/σ₀² + gᵀg/σ_n²`, mean
/// `σ_p² (gᵀy/σ_n² + μ₀/σ₀²)`.
pub fn gaussian_posterior(prior: &GaussianParams, model: &LinearGaussianModel, y: &[f64]) -> Result<GaussianParams> {
    let s = model.summarize(y)?;
    Ok(posterior_from_summary(prior, model.noise_variance, &s))
}

fn marginal_ll_from_summary(prior: &GaussianParams, noise_variance: f64, s: &DataSummary) -> f64 {
    // Σ = σ_n² I + σ₀² g gᵀ; det and inverse from the rank-one update
    let m = s.m as f64;
    let denom = noise_variance + prior.variance * s.gtg;
    let rtr = s.residual_sq(prior.mean);
    let gtr = s.gty - prior.mean * s.gtg;
    let quad = (rtr - prior.variance * gtr * gtr / denom) / noise_variance;
    let log_det = m * noise_variance.ln() + (denom / noise_variance).ln();
    -0.5 * (m * LN_2PI + log_det + quad)
}

/// `log N(y; μ₀ g, σ_n² I + σ₀² g gᵀ)`, the evidence that EM climbs.
pub fn marginal_log_likelihood(prior: &GaussianParams, model: &LinearGaussianModel, y: &[f64]) -> Result<f64> {
    let s = model.summarize(y)?;
    Ok(marginal_ll_from_summary(prior, model.noise_variance, &s))
}

/// `log p(y, u | θ)` for a fixed latent value.
pub fn complete_data_log_likelihood(
    u: f64,
    prior: &GaussianParams,
    model: &LinearGaussianModel,
    y: &[f64],
) -> Result<f64> {
    let s = model.summarize(y)?;
    let nv = model.noise_variance;
    let m = s.m as f64;
    Ok(-0.5 * (m * (LN_2PI + nv.ln()) + s.residual_sq(u) / nv) + prior.log_pdf(u))
}

fn q_from_summary(candidate: &GaussianParams, posterior: &GaussianParams, noise_variance: f64, s: &DataSummary) -> f64 {
    let m = s.m as f64;
    let data = (s.residual_sq(posterior.mean) + s.gtg * posterior.variance) / noise_variance;
    let dm = candidate.mean - posterior.mean;
    let prior_term = (2.0 * PI * candidate.variance).ln() + (dm * dm + posterior.variance) / candidate.variance;
    -0.5 * (m * (2.0 * PI * noise_variance).ln() + data + prior_term)
}

/// Expected complete-data log-likelihood `E_{u ~ posterior}[log p(y, u | candidate)]`.
pub fn q_function(
    candidate: &GaussianParams,
    current_posterior: &GaussianParams,
    model: &LinearGaussianModel,
    y: &[f64],
) -> Result<f64> {
    let s = model.summarize(y)?;
    Ok(q_from_summary(candidate, current_posterior, model.noise_variance, &s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    /// Stop once consecutive `Q(θ_t, θ_t)` values differ by less than this.
    pub epsilon_q: f64,
    /// Stop once both `|Δμ₀|` and `|Δσ₀²|` fall below this.
    pub epsilon_param: f64,
    pub max_iter: usize,
    /// Lower clamp for `σ₀²`.
    pub variance_floor: f64,
    /// Seed of the stream that draws the initial `(μ₀, σ₀²)`.
    pub init_seed: u64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            epsilon_q: 1e-3,
            epsilon_param: 1e-9,
            max_iter: 10_000,
            variance_floor: 1e-12,
            init_seed: 0,
        }
    }
}

impl EmOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Argument(format!("EM option {name} must be positive, got {v}")))
            }
        };
        positive("epsilon_q", self.epsilon_q)?;
        positive("epsilon_param", self.epsilon_param)?;
        positive("variance_floor", self.variance_floor)?;
        if self.max_iter == 0 {
            return Err(Error::Argument("EM option max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Random starting point: `σ₀² ~ U[0,1]`, `μ₀ ~ N(0,1)`.
    pub fn initial_prior(&self) -> GaussianParams {
        let mut rng = RngStream::new(self.init_seed, 0);
        let variance = rng.uniform().max(self.variance_floor);
        let mean = rng.normal();
        GaussianParams { mean, variance }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmResult {
    pub initial_prior: GaussianParams,
    pub prior_estimate: GaussianParams,
    /// Posterior of `u` under the fitted prior.
    pub posterior: GaussianParams,
    pub iterations: usize,
    /// `Q(θ_t, θ_t)` for `t = 0..=iterations`.
    pub q_trace: Vec<f64>,
    pub converged: bool,
}

/// One EM update: the new prior is the current posterior, with the
/// variance clamped at `variance_floor`.
pub fn em_update(prior: &GaussianParams, noise_variance: f64, s: &DataSummary, variance_floor: f64) -> GaussianParams {
    let post = posterior_from_summary(prior, noise_variance, s);
    GaussianParams {
        mean: post.mean,
        variance: post.variance.max(variance_floor),
    }
}

/// Fits `(μ₀, σ₀²)` by EM, then returns the posterior under the fit.
///
/// Running out of iterations is not an error; the result carries
/// `converged = false`.
pub fn em_fit(model: &LinearGaussianModel, y: &[f64], opts: &EmOptions) -> Result<EmResult> {
    opts.validate()?;
    let s = model.summarize(y)?;
    let nv = model.noise_variance;

    let initial_prior = opts.initial_prior();
    let mut prior = initial_prior;
    let mut post = posterior_from_summary(&prior, nv, &s);
    let mut q_prev = q_from_summary(&prior, &post, nv, &s);
    let mut q_trace = vec![q_prev];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        let next = GaussianParams {
            mean: post.mean,
            variance: post.variance.max(opts.variance_floor),
        };
        iterations += 1;
        let next_post = posterior_from_summary(&next, nv, &s);
        let q = q_from_summary(&next, &next_post, nv, &s);
        q_trace.push(q);

        let dq = (q - q_prev).abs();
        let dmu = (next.mean - prior.mean).abs();
        let dvar = (next.variance - prior.variance).abs();
        prior = next;
        post = next_post;
        q_prev = q;
        if dq < opts.epsilon_q || (dmu < opts.epsilon_param && dvar < opts.epsilon_param) {
            converged = true;
            break;
        }
    }

    Ok(EmResult {
        initial_prior,
        prior_estimate: prior,
        posterior: post,
        iterations,
        q_trace,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Runs until the parameter deltas are negligible, reaching the fixed point.
    pub(crate) fn fixed_point_opts(seed: u64) -> EmOptions {
        EmOptions {
            epsilon_q: f64::MIN_POSITIVE,
            epsilon_param: 1e-14,
            max_iter: 20_000_000,
            variance_floor: 1e-300,
            init_seed: seed,
        }
    }

    fn prior(mean: f64, variance: f64) -> GaussianParams {
        GaussianParams::new(mean, variance).unwrap()
    }

    // dense Gaussian log-density via Gaussian elimination with partial pivoting
    fn dense_log_pdf(y: &[f64], mean: &[f64], cov: &[Vec<f64>]) -> f64 {
        let n = y.len();
        let mut a: Vec<Vec<f64>> = cov.to_vec();
        let mut b: Vec<f64> = y.iter().zip(mean).map(|(y, m)| y - m).collect();
        let r0 = b.clone();
        let mut log_det = 0.0;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            log_det += a[col][col].abs().ln();
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *dst -= f * src;
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / a[row][row];
        }
        let quad: f64 = r0.iter().zip(&x).map(|(r, x)| r * x).sum();
        -0.5 * (n as f64 * LN_2PI + log_det + quad)
    }

    #[test]
    fn posterior_examples() {
        let m = LinearGaussianModel::new(vec![1.0], 1.0).unwrap();
        let p = gaussian_posterior(&prior(0.0, 1.0), &m, &[2.0]).unwrap();
        assert_abs_diff_eq!(p.mean, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.variance, 0.5, epsilon = 1e-15);

        // prior and data agree
        let m = LinearGaussianModel::new(vec![0.5, 2.0, -1.0], 0.3).unwrap();
        let y: Vec<f64> = m.gain().iter().map(|g| 1.7 * g).collect();
        for v in [0.01, 1.0, 100.0] {
            let p = gaussian_posterior(&prior(1.7, v), &m, &y).unwrap();
            assert_abs_diff_eq!(p.mean, 1.7, epsilon = 1e-12);
        }

        // homodyne r=0, M=10: 2M/σ_q² = 40
        let m = LinearGaussianModel::constant(2f64.sqrt(), 10, 0.5).unwrap();
        let y = vec![28.284 / 10.0; 10];
        let p = gaussian_posterior(&prior(2.0, 1.0), &m, &y).unwrap();
        let expect_mean = (2f64.sqrt() * 28.284 / 0.5 + 2.0) / 41.0;
        assert_abs_diff_eq!(p.mean, expect_mean, epsilon = 1e-12);
        assert_abs_diff_eq!(p.mean, 2.0, epsilon = 1e-4);
        assert_abs_diff_eq!(p.variance, 1.0 / 41.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_homodyne_mean() {
        // Σq = 10·2√2 exactly reproduces the prior mean
        let m = LinearGaussianModel::constant(2f64.sqrt(), 10, 0.5).unwrap();
        let y = vec![2.0 * 2f64.sqrt(); 10];
        let p = gaussian_posterior(&prior(2.0, 1.0), &m, &y).unwrap();
        assert_abs_diff_eq!(p.mean, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn dimension_errors() {
        let m = LinearGaussianModel::new(vec![1.0, 1.0], 1.0).unwrap();
        let p = prior(0.0, 1.0);
        assert!(matches!(gaussian_posterior(&p, &m, &[1.0]), Err(Error::Argument(_))));
        assert!(marginal_log_likelihood(&p, &m, &[1.0, 2.0, 3.0]).is_err());
        assert!(q_function(&p, &p, &m, &[]).is_err());
        assert!(em_fit(&m, &[1.0], &EmOptions::default()).is_err());
        assert!(LinearGaussianModel::new(vec![], 1.0).is_err());
        assert!(LinearGaussianModel::new(vec![0.0, 0.0], 1.0).is_err());
        assert!(LinearGaussianModel::new(vec![1.0], 0.0).is_err());
        assert!(GaussianParams::new(0.0, -1.0).is_err());
        assert!(GaussianParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn marginal_degenerate_prior() {
        let m = LinearGaussianModel::new(vec![1.0], 1.0).unwrap();
        let v = marginal_log_likelihood(&prior(0.7, 1e-300), &m, &[0.7]).unwrap();
        assert_abs_diff_eq!(v, -0.5 * LN_2PI, epsilon = 1e-12);
    }

    #[test]
    fn marginal_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.random_range(1..=5);
            let gain: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let nv = rng.random_range(0.1..3.0);
            let model = LinearGaussianModel::new(gain.clone(), nv).unwrap();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
            let p = prior(rng.random_range(-3.0..3.0), rng.random_range(0.01..4.0));
            let cov: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| p.variance * gain[i] * gain[j] + if i == j { nv } else { 0.0 })
                        .collect()
                })
                .collect();
            let mean: Vec<f64> = gain.iter().map(|g| p.mean * g).collect();
            let dense = dense_log_pdf(&y, &mean, &cov);
            let fast = marginal_log_likelihood(&p, &model, &y).unwrap();
            assert_abs_diff_eq!(fast, dense, epsilon = 1e-8);
        }
    }

    #[test]
    fn marginal_matches_quadrature() {
        let model = LinearGaussianModel::new(vec![1.0, 1.0], 1.0).unwrap();
        let p = prior(0.0, 1.0);
        let y = [1.0, 1.0];
        // composite Simpson on [−15, 15]
        let n = 20_000;
        let (a, b) = (-15.0, 15.0);
        let h = (b - a) / n as f64;
        let f = |u: f64| complete_data_log_likelihood(u, &p, &model, &y).unwrap().exp();
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        let quad = (acc * h / 3.0).ln();
        let v = marginal_log_likelihood(&p, &model, &y).unwrap();
        assert_abs_diff_eq!(v, quad, epsilon = 1e-6);
    }

    #[test]
    fn q_point_mass_limit() {
        let model = LinearGaussianModel::new(vec![1.0, 0.5, -0.3], 0.8).unwrap();
        let y = [0.4, 1.1, -0.2];
        let post = GaussianParams {
            mean: 0.9,
            variance: 1e-300,
        };
        for cand_var in [1e-6, 1e-3, 0.5] {
            let cand = GaussianParams {
                mean: 0.9,
                variance: cand_var,
            };
            let q = q_function(&cand, &post, &model, &y).unwrap();
            let full = complete_data_log_likelihood(0.9, &cand, &model, &y).unwrap();
            assert_abs_diff_eq!(q, full, epsilon = 1e-9);
        }
    }

    #[test]
    fn q_matches_monte_carlo() {
        let mut rng = RngStream::new(77, 3);
        let model = LinearGaussianModel::new(vec![1.0, 2.0, 0.5, -1.0], 0.7).unwrap();
        let y = [0.3, 2.2, 0.1, -0.9];
        for (cand, cur) in [
            (prior(0.5, 0.8), prior(0.0, 1.0)),
            (prior(-1.0, 2.5), prior(1.0, 0.2)),
            (prior(2.0, 0.05), prior(0.4, 3.0)),
        ] {
            let post = gaussian_posterior(&cur, &model, &y).unwrap();
            let q = q_function(&cand, &post, &model, &y).unwrap();
            let n = 100_000;
            let draws: Vec<f64> = (0..n)
                .map(|_| {
                    let u = post.mean + post.variance.sqrt() * rng.normal();
                    complete_data_log_likelihood(u, &cand, &model, &y).unwrap()
                })
                .collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            let se = (var / n as f64).sqrt();
            assert!((q - mean).abs() < 3.0 * se, "Q {q} vs MC {mean} ± {se}");
        }
    }

    #[test]
    fn m_step_increases_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..=20);
            let gain: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let model = LinearGaussianModel::new(gain, rng.random_range(0.05..3.0)).unwrap();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let theta = prior(rng.random_range(-3.0..3.0), rng.random_range(1e-3..5.0));
            let post = gaussian_posterior(&theta, &model, &y).unwrap();
            let s = model.summarize(&y).unwrap();
            let next = em_update(&theta, model.noise_variance(), &s, 1e-300);
            let q_old = q_function(&theta, &post, &model, &y).unwrap();
            let q_new = q_function(&next, &post, &model, &y).unwrap();
            assert!(q_new >= q_old - 1e-12, "{q_new} < {q_old}");
        }
    }

    #[test]
    fn constant_data_fixed_point() {
        // oracle: maximize the evidence over (μ₀, σ₀² ≥ 0) on a grid
        for (c, m, nv) in [(1.3, 5, 0.5), (-2.0, 20, 2.0), (0.4, 1, 0.01)] {
            let model = LinearGaussianModel::constant(1.0, m, nv).unwrap();
            let y = vec![c; m];
            let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
            for i in 0..=400 {
                let mu = c - 2.0 + i as f64 * 0.01;
                for v in [1e-12, 1e-6, 1e-3, 0.01, 0.1, 1.0] {
                    let ll = marginal_log_likelihood(&prior(mu, v), &model, &y).unwrap();
                    if ll > best.0 {
                        best = (ll, mu, v);
                    }
                }
            }
            assert_abs_diff_eq!(best.1, c, epsilon = 1e-9);
            assert_eq!(best.2, 1e-12);

            let res = em_fit(&model, &y, &fixed_point_opts(3)).unwrap();
            assert_abs_diff_eq!(res.prior_estimate.mean, c, epsilon = 1e-6);
            assert_abs_diff_eq!(res.posterior.mean, c, epsilon = 1e-6);
        }
    }

    #[test]
    fn heterodyne_fixed_point_is_sample_mean() {
        let mut rng = RngStream::new(2024, 1);
        let alpha_re = 2.0 + rng.normal();
        let y: Vec<f64> = (0..50).map(|_| alpha_re + 0.5f64.sqrt() * rng.normal()).collect();
        let mean = y.iter().sum::<f64>() / 50.0;
        let model = LinearGaussianModel::constant(1.0, 50, 0.5).unwrap();
        let res = em_fit(&model, &y, &fixed_point_opts(8)).unwrap();
        assert_abs_diff_eq!(res.posterior.mean, mean, epsilon = 1e-6);
        // the evidence at the fit beats nearby means
        let at_fit = marginal_log_likelihood(&res.prior_estimate, &model, &y).unwrap();
        for d in [-1e-3, 1e-3] {
            let other = prior(res.prior_estimate.mean + d, res.prior_estimate.variance);
            assert!(marginal_log_likelihood(&other, &model, &y).unwrap() < at_fit);
        }
    }

    #[test]
    fn variance_iterates_strictly_decrease() {
        let model = LinearGaussianModel::constant(1.0, 7, 0.3).unwrap();
        let y = [0.1, 0.5, -0.2, 0.9, 1.4, 0.3, 0.0];
        let s = model.summarize(&y).unwrap();
        let mut p = EmOptions::default().initial_prior();
        for _ in 0..10_000 {
            let next = em_update(&p, 0.3, &s, 1e-12);
            assert!(next.variance < p.variance);
            assert!(next.variance >= 1e-12);
            p = next;
        }
    }

    #[test]
    fn em_default_run_is_well_formed() {
        let model = LinearGaussianModel::constant(1.0, 30, 0.5).unwrap();
        let mut rng = RngStream::new(9, 9);
        let y: Vec<f64> = (0..30).map(|_| 1.0 + 0.7 * rng.normal()).collect();
        let res = em_fit(
            &model,
            &y,
            &EmOptions {
                init_seed: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 10_000);
        assert_eq!(res.q_trace.len(), res.iterations + 1);
        for w in res.q_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        let again = em_fit(
            &model,
            &y,
            &EmOptions {
                init_seed: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(res, again);
    }

    #[test]
    fn em_reports_non_convergence() {
        let model = LinearGaussianModel::constant(1.0, 3, 0.5).unwrap();
        let opts = EmOptions {
            max_iter: 2,
            epsilon_q: 1e-300,
            ..Default::default()
        };
        let res = em_fit(&model, &[1.0, 2.0, 3.0], &opts).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 2);
        assert!(EmOptions {
            max_iter: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(EmOptions {
            epsilon_q: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    proptest! {
        #[test]
        fn precision_additivity(
            mu in -10.0..10.0f64, var in 1e-4..1e4f64, nv in 1e-3..10.0f64,
            gain in proptest::collection::vec(0.1..3.0f64, 1..30),
            seed in any::<u64>(),
        ) {
            let mut rng = RngStream::new(seed, 0);
            let y: Vec<f64> = gain.iter().map(|g| g * 1.5 + rng.normal()).collect();
            let model = LinearGaussianModel::new(gain, nv).unwrap();
            let p = prior(mu, var);
            let post = gaussian_posterior(&p, &model, &y).unwrap();
            let s = model.summarize(&y).unwrap();
            let precision = 1.0 / var + s.gtg / nv;
            prop_assert!((1.0 / post.variance - precision).abs() <= 1e-12 * precision);
            // convex combination of μ₀ and gᵀy/gᵀg
            let w = post.variance / var;
            let ls = s.gty / s.gtg;
            prop_assert!((0.0..=1.0).contains(&w));
            let combo = w * mu + (1.0 - w) * ls;
            prop_assert!((post.mean - combo).abs() <= 1e-9 * (1.0 + combo.abs()));
        }

        #[test]
        fn em_ascent(
            seed in any::<u64>(), m in 1usize..40, nv in 0.05..3.0f64, g in 0.2..2.0f64,
        ) {
            let mut rng = RngStream::new(seed, 1);
            let u = 2.0 + rng.normal();
            let y: Vec<f64> = (0..m).map(|_| g * u + nv.sqrt() * rng.normal()).collect();
            let model = LinearGaussianModel::constant(g, m, nv).unwrap();
            let res = em_fit(&model, &y, &EmOptions { init_seed: seed, ..Default::default() }).unwrap();
            let start = marginal_log_likelihood(&res.initial_prior, &model, &y).unwrap();
            let end = marginal_log_likelihood(&res.prior_estimate, &model, &y).unwrap();
            prop_assert!(end >= start - 1e-9);
            for w in res.q_trace.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9);
            }
        }
    }
}
