//! Monte Carlo sweeps over the measurement count `M`.
//!
//! Each trial draws the true parameter from the configured prior, simulates
//! one batch, and runs the learned estimator and the genie estimator on that
//! same batch. Trials are seeded from `(base_seed, task, M, trial_index)`
//! alone, so the sweep gives the same numbers whatever the thread count or
//! execution order.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;

use crate::conjugate::{EmOptions, GaussianParams};
use crate::displacement::{estimate_heterodyne, estimate_homodyne, genie_estimate};
use crate::error::{Error, Result};
use crate::phase::{estimate_phase, genie_phase_estimate, EbOptions, VonMisesParam};
use crate::sim::{
    heterodyne_variances, homodyne_variance, povm_variance, sample_von_mises, simulate_displacement_heterodyne,
    simulate_displacement_homodyne, simulate_phase_heterodyne, simulate_squeezing_homodyne, simulate_squeezing_povm,
    ProbeConfig, RngStream,
};
use crate::squeezing::{estimate_ml_homodyne, estimate_povm_em, genie_povm_estimate};

/// Exact CSV header of [`write_summary_csv`].
pub const CSV_HEADER: [&str; 11] = [
    "task",
    "m",
    "estimator",
    "metric",
    "metric_name",
    "metric_stderr",
    "theory",
    "mean_runtime_ns",
    "median_runtime_ns",
    "trials",
    "failed",
];

/// Fraction of failed trials at one `M` above which a summary is degraded.
pub const DEGRADED_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    DisplacementHet,
    DisplacementHom,
    SqueezingPovm,
    SqueezingMlHom,
    SqueezingBoth,
    Phase,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::DisplacementHet,
        Task::DisplacementHom,
        Task::SqueezingPovm,
        Task::SqueezingMlHom,
        Task::SqueezingBoth,
        Task::Phase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::DisplacementHet => "displacement_het",
            Task::DisplacementHom => "displacement_hom",
            Task::SqueezingPovm => "squeezing_povm",
            Task::SqueezingMlHom => "squeezing_ml_hom",
            Task::SqueezingBoth => "squeezing_both",
            Task::Phase => "phase",
        }
    }

    pub fn metric_name(self) -> &'static str {
        match self {
            Task::Phase => "sin2",
            _ => "mse",
        }
    }

    /// Estimator labels reported by this task, in output order.
    pub fn estimators(self) -> &'static [&'static str] {
        match self {
            Task::DisplacementHet => &["em_im", "em_re", "genie_im", "genie_re"],
            Task::DisplacementHom => &["em", "genie"],
            Task::SqueezingPovm => &["povm_em", "povm_genie"],
            Task::SqueezingMlHom => &["homodyne_ml"],
            Task::SqueezingBoth => &["homodyne_ml", "povm_em", "povm_genie"],
            Task::Phase => &["eb", "genie"],
        }
    }

    fn code(self) -> u64 {
        self as u64 + 1
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<_> = Task::ALL.iter().map(|t| t.name()).collect();
            Error::Argument(format!("unknown task `{s}`; expected one of: {}", names.join(", ")))
        })
    }
}

/// Prior from which each trial draws its true parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruePrior {
    /// Displacement (`re`, and `im` for heterodyne) or squeezing (`re` only).
    Gaussian {
        re: GaussianParams,
        im: Option<GaussianParams>,
    },
    VonMises(VonMisesParam),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    /// Known probe quantities: `squeeze_r` for displacement, `α` for squeezing and phase.
    pub probe: ProbeConfig,
    pub true_prior: TruePrior,
    pub em_opts: EmOptions,
    pub eb_opts: EbOptions,
    pub base_seed: u64,
}

impl ExperimentConfig {
    /// Config with default estimator options.
    pub fn new(
        task: Task,
        m_grid: Vec<usize>,
        trials: usize,
        probe: ProbeConfig,
        true_prior: TruePrior,
        base_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            task,
            m_grid,
            trials,
            probe,
            true_prior,
            em_opts: EmOptions::default(),
            eb_opts: EbOptions::default(),
            base_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_grid.contains(&0) {
            return Err(Error::Argument("m_grid entries must be positive".into()));
        }
        if self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("m_grid must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::Argument("trials must be at least 1".into()));
        }
        self.em_opts.validate()?;
        self.eb_opts.validate()?;
        match (self.task, &self.true_prior) {
            (Task::DisplacementHet, TruePrior::Gaussian { im: Some(_), .. }) => Ok(()),
            (Task::DisplacementHet, TruePrior::Gaussian { im: None, .. }) => Err(Error::Argument(
                "displacement_het needs priors for both quadratures (re and im)".into(),
            )),
            (Task::Phase, TruePrior::VonMises(_)) => self.require_alpha_abs().map(|_| ()),
            (Task::Phase, _) => Err(Error::Argument("phase task needs a von Mises prior".into())),
            (_, TruePrior::VonMises(_)) => Err(Error::Argument(format!(
                "task {} needs a Gaussian prior",
                self.task.name()
            ))),
            (Task::SqueezingPovm | Task::SqueezingBoth, _) => self.require_alpha_abs().map(|_| ()),
            _ => Ok(()),
        }
    }

    fn require_alpha_abs(&self) -> Result<f64> {
        let a = self.probe.alpha().norm();
        if a > 0.0 && a.is_finite() {
            Ok(a)
        } else {
            Err(Error::Domain(format!(
                "task {} needs a nonzero probe displacement",
                self.task.name()
            )))
        }
    }

    fn gaussian_prior(&self) -> (GaussianParams, Option<GaussianParams>) {
        match self.true_prior {
            TruePrior::Gaussian { re, im } => (re, im),
            TruePrior::VonMises(_) => unreachable!("validated"),
        }
    }

    /// Analytic genie risk for an estimator row, when one exists.
    pub fn theory(&self, estimator: &str, m: usize) -> Option<f64> {
        let mf = m as f64;
        let (noise, gtg, prior_var) = match (self.task, estimator) {
            (Task::DisplacementHet, "em_re" | "genie_re") => {
                let (re, _) = self.gaussian_prior();
                (heterodyne_variances(self.probe.squeeze_r).ok()?.0, mf, re.variance)
            }
            (Task::DisplacementHet, "em_im" | "genie_im") => {
                let (_, im) = self.gaussian_prior();
                (heterodyne_variances(self.probe.squeeze_r).ok()?.1, mf, im?.variance)
            }
            (Task::DisplacementHom, "em" | "genie") => {
                let (re, _) = self.gaussian_prior();
                (homodyne_variance(self.probe.squeeze_r).ok()?, 2.0 * mf, re.variance)
            }
            (Task::SqueezingPovm | Task::SqueezingBoth, "povm_em" | "povm_genie") => {
                let (re, _) = self.gaussian_prior();
                (povm_variance(self.probe.alpha().norm()).ok()?, mf, re.variance)
            }
            _ => return None,
        };
        theoretical_genie_mse(prior_var, noise, gtg).ok()
    }
}

/// Bayes risk of the genie posterior mean, `(1/σ₀² + gᵀg/σ_n²)^{-1}`.
pub fn theoretical_genie_mse(prior_variance: f64, noise_variance: f64, gain_norm_sq: f64) -> Result<f64> {
    for (name, v) in [
        ("prior variance", prior_variance),
        ("noise variance", noise_variance),
        ("gain norm", gain_norm_sq),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(1.0 / (1.0 / prior_variance + gain_norm_sq / noise_variance))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorRecord {
    pub estimator: &'static str,
    /// Squared error, or `sin²(θ − θ̂)` for phase.
    pub metric: f64,
    pub runtime_ns: u64,
}

/// `(M, trial_index, batch fingerprint, (estimator, metric bits), error)`.
pub type TrialOutcome<'a> = (usize, usize, Option<u64>, Vec<(&'static str, u64)>, Option<&'a str>);

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub m: usize,
    pub trial_index: usize,
    /// Fingerprint of the batch every paired estimator consumed.
    pub batch_fingerprint: Option<u64>,
    pub estimates: Vec<EstimatorRecord>,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// The deterministic part of the record (everything but runtimes).
    pub fn outcome(&self) -> TrialOutcome<'_> {
        (
            self.m,
            self.trial_index,
            self.batch_fingerprint,
            self.estimates
                .iter()
                .map(|e| (e.estimator, e.metric.to_bits()))
                .collect(),
            self.error.as_deref(),
        )
    }

    pub fn metric(&self, estimator: &str) -> Option<f64> {
        self.estimates
            .iter()
            .find(|e| e.estimator == estimator)
            .map(|e| e.metric)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream id of one trial; the seed of its stream is `base_seed`.
pub fn trial_stream_id(task: Task, m: usize, trial_index: usize) -> u64 {
    splitmix64(task.code() ^ splitmix64(m as u64 ^ splitmix64(trial_index as u64)))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, u64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX)))
}

fn record(estimator: &'static str, metric: f64, runtime_ns: u64) -> EstimatorRecord {
    EstimatorRecord {
        estimator,
        metric,
        runtime_ns,
    }
}

fn draw(p: &GaussianParams, rng: &mut RngStream) -> f64 {
    p.mean + p.variance.sqrt() * rng.normal()
}

fn trial_body(config: &ExperimentConfig, m: usize, rng: &mut RngStream) -> Result<(u64, Vec<EstimatorRecord>)> {
    let em_opts = EmOptions {
        init_seed: rng.next_u64(),
        ..config.em_opts
    };
    let r_known = config.probe.squeeze_r;
    match config.task {
        Task::DisplacementHet => {
            let (prior_re, prior_im) = config.gaussian_prior();
            let prior_im = prior_im.expect("validated");
            let (a_re, a_im) = (draw(&prior_re, rng), draw(&prior_im, rng));
            let probe = ProbeConfig::new(a_re, a_im, r_known, 0.0)?;
            let batch = simulate_displacement_heterodyne(&probe, m, rng)?;
            let (em, t_em) = timed(|| estimate_heterodyne(&batch, r_known, &em_opts))?;
            let (genie, t_genie) = timed(|| genie_estimate(&batch, r_known, &prior_re, Some(&prior_im)))?;
            let sq = |x: f64, truth: f64| (x - truth).powi(2);
            Ok((
                batch.fingerprint(),
                vec![
                    record("em_im", sq(em.alpha_im_hat.unwrap_or(f64::NAN), a_im), t_em),
                    record("em_re", sq(em.alpha_re_hat, a_re), t_em),
                    record("genie_im", sq(genie.alpha_im_hat.unwrap_or(f64::NAN), a_im), t_genie),
                    record("genie_re", sq(genie.alpha_re_hat, a_re), t_genie),
                ],
            ))
        }
        Task::DisplacementHom => {
            let (prior_re, _) = config.gaussian_prior();
            let a_re = draw(&prior_re, rng);
            let probe = ProbeConfig::new(a_re, 0.0, r_known, 0.0)?;
            let batch = simulate_displacement_homodyne(&probe, m, rng)?;
            let (em, t_em) = timed(|| estimate_homodyne(&batch, r_known, &em_opts))?;
            let (genie, t_genie) = timed(|| genie_estimate(&batch, r_known, &prior_re, None))?;
            Ok((
                batch.fingerprint(),
                vec![
                    record("em", (em.alpha_re_hat - a_re).powi(2), t_em),
                    record("genie", (genie.alpha_re_hat - a_re).powi(2), t_genie),
                ],
            ))
        }
        Task::SqueezingPovm | Task::SqueezingMlHom | Task::SqueezingBoth => {
            let (prior, _) = config.gaussian_prior();
            let r = draw(&prior, rng);
            let mut records = Vec::new();
            let mut fingerprint = 0;
            if config.task != Task::SqueezingPovm {
                let batch = simulate_squeezing_homodyne(config.probe.alpha_re, r, m, rng)?;
                let ml = estimate_ml_homodyne(&batch, config.probe.alpha_re)?;
                fingerprint = batch.fingerprint();
                records.push(record("homodyne_ml", (ml.r_hat - r).powi(2), ml.runtime_ns));
            }
            if config.task != Task::SqueezingMlHom {
                let alpha_abs = config.probe.alpha().norm();
                let batch = simulate_squeezing_povm(alpha_abs, r, m, rng)?;
                let em = estimate_povm_em(&batch, alpha_abs, &em_opts)?;
                let genie = genie_povm_estimate(&batch, alpha_abs, &prior)?;
                fingerprint = batch.fingerprint();
                records.push(record("povm_em", (em.r_hat - r).powi(2), em.runtime_ns));
                records.push(record("povm_genie", (genie.r_hat - r).powi(2), genie.runtime_ns));
            }
            Ok((fingerprint, records))
        }
        Task::Phase => {
            let kappa0 = match config.true_prior {
                TruePrior::VonMises(v) => v.kappa,
                TruePrior::Gaussian { .. } => unreachable!("validated"),
            };
            let alpha_abs = config.probe.alpha().norm();
            let theta = sample_von_mises(kappa0, rng)?;
            let batch = simulate_phase_heterodyne(alpha_abs, theta, m, rng)?;
            let (eb, t_eb) = timed(|| estimate_phase(&batch, alpha_abs, &config.eb_opts))?;
            let (genie, t_genie) = timed(|| genie_phase_estimate(&batch, alpha_abs, kappa0))?;
            let sin2 = |hat: f64| (theta - hat).sin().powi(2);
            Ok((
                batch.fingerprint(),
                vec![
                    record("eb", sin2(eb.theta_hat), t_eb),
                    record("genie", sin2(genie.theta_hat), t_genie),
                ],
            ))
        }
    }
}

/// One Monte Carlo repetition. Estimator failures mark the trial failed
/// instead of propagating.
pub fn run_trial(config: &ExperimentConfig, m: usize, trial_index: usize) -> Result<TrialRecord> {
    if !config.m_grid.contains(&m) {
        return Err(Error::Argument(format!("M = {m} is not in the configured m_grid")));
    }
    Ok(trial_unchecked(config, m, trial_index))
}

fn trial_unchecked(config: &ExperimentConfig, m: usize, trial_index: usize) -> TrialRecord {
    let mut rng = RngStream::new(config.base_seed, trial_stream_id(config.task, m, trial_index));
    match trial_body(config, m, &mut rng) {
        Ok((fingerprint, estimates)) => TrialRecord {
            m,
            trial_index,
            batch_fingerprint: Some(fingerprint),
            estimates,
            error: None,
        },
        Err(e) => TrialRecord {
            m,
            trial_index,
            batch_fingerprint: None,
            estimates: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

/// All trial records, ordered by `(M, trial_index)`.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .m_grid
        .iter()
        .flat_map(|&m| (0..config.trials).map(move |t| (m, t)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(m, t)| trial_unchecked(config, m, t))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub m: usize,
    pub estimator: String,
    pub metric: f64,
    pub metric_stderr: f64,
    pub theory: Option<f64>,
    pub mean_runtime_ns: f64,
    pub median_runtime_ns: f64,
    /// Successful trials aggregated into this row.
    pub trials: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub task: Task,
    /// Sorted by `M`, then estimator name.
    pub rows: Vec<SummaryRow>,
    pub degraded: bool,
}

impl ExperimentSummary {
    pub fn metric_name(&self) -> &'static str {
        self.task.metric_name()
    }

    pub fn row(&self, m: usize, estimator: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.m == m && r.estimator == estimator)
    }
}

pub(crate) fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Aggregates trial records into one row per `(M, estimator)`.
pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord]) -> ExperimentSummary {
    let mut rows = Vec::new();
    let mut degraded = false;
    let mut estimators: Vec<&str> = config.task.estimators().to_vec();
    estimators.sort_unstable();
    for &m in &config.m_grid {
        let at_m: Vec<&TrialRecord> = records.iter().filter(|r| r.m == m).collect();
        let failed = at_m.iter().filter(|r| r.failed()).count();
        if !at_m.is_empty() && failed as f64 > DEGRADED_FAILURE_RATE * at_m.len() as f64 {
            degraded = true;
        }
        for &name in &estimators {
            let hits: Vec<&EstimatorRecord> = at_m
                .iter()
                .filter(|r| !r.failed())
                .filter_map(|r| r.estimates.iter().find(|e| e.estimator == name))
                .collect();
            let metrics: Vec<f64> = hits.iter().map(|e| e.metric).collect();
            let runtimes: Vec<f64> = hits.iter().map(|e| e.runtime_ns as f64).collect();
            let (metric, metric_stderr) = mean_and_stderr(&metrics);
            let mean_runtime_ns = if runtimes.is_empty() {
                f64::NAN
            } else {
                runtimes.iter().sum::<f64>() / runtimes.len() as f64
            };
            rows.push(SummaryRow {
                m,
                estimator: name.to_string(),
                metric,
                metric_stderr,
                theory: config.theory(name, m),
                mean_runtime_ns,
                median_runtime_ns: median(runtimes),
                trials: metrics.len(),
                failed,
            });
        }
    }
    ExperimentSummary {
        task: config.task,
        rows,
        degraded,
    }
}

/// Runs the full sweep and aggregates it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let records = run_trials(config)?;
    Ok(summarize(config, &records))
}

/// `%.{digits}g`-style formatting: shortest of fixed or exponent notation,
/// trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Streams the summary as CSV with the [`CSV_HEADER`] columns.
pub fn write_summary_csv_to<W: Write>(summary: &ExperimentSummary, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in &summary.rows {
        w.write_record([
            summary.task.name().to_string(),
            row.m.to_string(),
            row.estimator.clone(),
            format_sig(row.metric, 12),
            summary.metric_name().to_string(),
            format_sig(row.metric_stderr, 12),
            row.theory.map(|t| format_sig(t, 12)).unwrap_or_default(),
            format_sig(row.mean_runtime_ns, 12),
            format_sig(row.median_runtime_ns, 12),
            row.trials.to_string(),
            row.failed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the summary as CSV to `path`.
pub fn write_summary_csv(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_summary_csv_to(summary, file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Config helpers for the sweeps reproduced by the acceptance suite.
pub mod presets {
    use super::*;
    use num_complex::Complex64;

    fn gauss(mean: f64, variance: f64) -> GaussianParams {
        GaussianParams { mean, variance }
    }

    /// Heterodyne displacement, `α₀ = 2 + 2i`, `σ₀² = 1` per quadrature.
    pub fn displacement_het(r: f64, m_grid: Vec<usize>, trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(
            Task::DisplacementHet,
            m_grid,
            trials,
            ProbeConfig::new(0.0, 0.0, r, 0.0).expect("finite"),
            TruePrior::Gaussian {
                re: gauss(2.0, 1.0),
                im: Some(gauss(2.0, 1.0)),
            },
            seed,
        )
        .expect("valid preset")
    }

    /// Homodyne displacement, `α₀_R = 2`, `σ₀² = 1`.
    pub fn displacement_hom(r: f64, m_grid: Vec<usize>, trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(
            Task::DisplacementHom,
            m_grid,
            trials,
            ProbeConfig::new(0.0, 0.0, r, 0.0).expect("finite"),
            TruePrior::Gaussian {
                re: gauss(2.0, 1.0),
                im: None,
            },
            seed,
        )
        .expect("valid preset")
    }

    /// POVM EM vs homodyne ML squeezing, `r₀ = 1`, `σ₀² = 0.5`, probe `α`.
    pub fn squeezing_both(alpha: Complex64, m_grid: Vec<usize>, trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(
            Task::SqueezingBoth,
            m_grid,
            trials,
            ProbeConfig::new(alpha.re, alpha.im, 0.0, 0.0).expect("finite"),
            TruePrior::Gaussian {
                re: gauss(1.0, 0.5),
                im: None,
            },
            seed,
        )
        .expect("valid preset")
    }

    /// Phase estimation with `|κ₀| = 4`, `∠κ₀ = 0.5`, real probe amplitude `alpha`.
    pub fn phase(alpha: f64, m_grid: Vec<usize>, trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(
            Task::Phase,
            m_grid,
            trials,
            ProbeConfig::new(alpha, 0.0, 0.0, 0.0).expect("finite"),
            TruePrior::VonMises(VonMisesParam::from_polar(4.0, 0.5).expect("finite")),
            seed,
        )
        .expect("valid preset")
    }
}
