use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use gqest::displacement::{estimate_heterodyne, estimate_homodyne};
use gqest::experiments::{format_sig, run_experiment, write_summary_csv_to, ExperimentSummary};
use gqest::phase::estimate_phase;
use gqest::squeezing::{estimate_ml_homodyne, estimate_povm_em};
use gqest::{EbOptions, EmOptions, MeasurementBatch, Scheme};

use crate::config::{CliConfig, OutputFormat};

/// Gnuplot-style blocks, one per estimator, separated by two blank lines.
pub fn render_plotdata(summary: &ExperimentSummary) -> String {
    let mut names: Vec<&str> = summary.rows.iter().map(|r| r.estimator.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    let mut out = String::new();
    for (i, name) in names.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(
            out,
            "# task={} estimator={name} metric={}",
            summary.task.name(),
            summary.metric_name()
        );
        out.push_str("# m metric metric_stderr theory median_runtime_ns\n");
        for row in summary.rows.iter().filter(|r| r.estimator == *name) {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                row.m,
                format_sig(row.metric, 12),
                format_sig(row.metric_stderr, 12),
                row.theory.map_or_else(|| "NaN".to_string(), |t| format_sig(t, 12)),
                format_sig(row.median_runtime_ns, 12),
            );
        }
    }
    out
}

fn emit(summary: &ExperimentSummary, format: OutputFormat, out: impl Write, label: &str) -> Result<()> {
    let mut out = io::BufWriter::new(out);
    match format {
        OutputFormat::Csv => {
            write_summary_csv_to(summary, &mut out).with_context(|| format!("cannot write {label}"))?
        }
        OutputFormat::Plotdata => out
            .write_all(render_plotdata(summary).as_bytes())
            .with_context(|| format!("cannot write {label}"))?,
    }
    out.flush().with_context(|| format!("cannot write {label}"))
}

/// Runs the sweep and writes it to the configured destination.
pub fn cmd_experiment(cfg: &CliConfig) -> Result<ExperimentSummary> {
    if let Some(path) = &cfg.output_path {
        check_output_parent(path)?;
    }
    let summary = run_experiment(&cfg.experiment)?;
    match &cfg.output_path {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create output file {}", path.display()))?;
            emit(&summary, cfg.format, file, &path.display().to_string())?;
        }
        None => emit(&summary, cfg.format, io::stdout().lock(), "standard output")?,
    }
    Ok(summary)
}

/// Known quantities and options for a single-shot estimate.
#[derive(Debug, Clone, Default)]
pub struct EstimateParams {
    pub squeeze_r: Option<f64>,
    pub alpha_re: Option<f64>,
    pub alpha_abs: Option<f64>,
    pub em_opts: EmOptions,
    pub eb_opts: EbOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOutput {
    /// One line of space-separated `key=value` pairs.
    pub machine: String,
    pub human: String,
}

fn need(value: Option<f64>, flag: &str, scheme: Scheme) -> Result<f64> {
    match value {
        Some(v) => Ok(v),
        None => bail!("scheme {} needs {flag}", scheme.name()),
    }
}

fn kv(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn cmd_estimate(batch: &MeasurementBatch, params: &EstimateParams) -> Result<EstimateOutput> {
    let scheme = batch.scheme();
    let m = batch.count();
    let mut pairs: Vec<(&str, String)> = vec![("scheme", scheme.name().into()), ("m", m.to_string())];
    let human = match scheme {
        Scheme::HeterodyneDisplacement | Scheme::HomodyneDisplacement => {
            let r = params.squeeze_r.unwrap_or(0.0);
            let e = if scheme == Scheme::HeterodyneDisplacement {
                estimate_heterodyne(batch, r, &params.em_opts)?
            } else {
                estimate_homodyne(batch, r, &params.em_opts)?
            };
            pairs.push(("alpha_re_hat", e.alpha_re_hat.to_string()));
            if let Some(im) = e.alpha_im_hat {
                pairs.push(("alpha_im_hat", im.to_string()));
            }
            pairs.push(("prior_re_mean", e.fitted_prior_re.mean.to_string()));
            pairs.push(("prior_re_variance", e.fitted_prior_re.variance.to_string()));
            if let Some(p) = e.fitted_prior_im {
                pairs.push(("prior_im_mean", p.mean.to_string()));
                pairs.push(("prior_im_variance", p.variance.to_string()));
            }
            pairs.push(("posterior_re_variance", e.posterior_re.variance.to_string()));
            if let Some(p) = e.posterior_im {
                pairs.push(("posterior_im_variance", p.variance.to_string()));
            }
            pairs.push(("converged", e.converged.to_string()));
            let im_part = e
                .alpha_im_hat
                .map(|im| format!(" {} {:.6}i", if im < 0.0 { '-' } else { '+' }, im.abs()))
                .unwrap_or_default();
            format!(
                "displacement estimate from {m} {} samples (r = {r}): alpha = {:.6}{im_part}\n\
                 EM fitted prior (re): mean {:.6}, variance {:.3e}; posterior variance (re) {:.3e}{}",
                if scheme == Scheme::HeterodyneDisplacement {
                    "heterodyne"
                } else {
                    "homodyne"
                },
                e.alpha_re_hat,
                e.fitted_prior_re.mean,
                e.fitted_prior_re.variance,
                e.posterior_re.variance,
                if e.converged {
                    ""
                } else {
                    "\nwarning: EM hit max_iter before converging"
                },
            )
        }
        Scheme::PovmSqueezing => {
            let alpha_abs = need(params.alpha_abs, "--alpha-abs", scheme)?;
            let e = estimate_povm_em(batch, alpha_abs, &params.em_opts)?;
            let prior = e.fitted_prior.expect("EM estimate carries its prior");
            let post = e.posterior.expect("EM estimate carries its posterior");
            pairs.push(("r_hat", e.r_hat.to_string()));
            pairs.push(("prior_mean", prior.mean.to_string()));
            pairs.push(("prior_variance", prior.variance.to_string()));
            pairs.push(("posterior_variance", post.variance.to_string()));
            pairs.push(("converged", e.converged.to_string()));
            format!(
                "squeezing estimate (POVM + EM) from {m} samples, |alpha| = {alpha_abs}: r = {:.6}\n\
                 EM fitted prior: mean {:.6}, variance {:.3e}; posterior variance {:.3e}",
                e.r_hat, prior.mean, prior.variance, post.variance
            )
        }
        Scheme::HomodyneSqueezing => {
            let alpha_re = need(params.alpha_re, "--alpha-re", scheme)?;
            let e = estimate_ml_homodyne(batch, alpha_re)?;
            pairs.push(("r_hat", e.r_hat.to_string()));
            format!(
                "squeezing estimate (homodyne ML) from {m} samples, alpha_re = {alpha_re}: r = {:.6}",
                e.r_hat
            )
        }
        Scheme::HeterodynePhase => {
            let alpha_abs = need(params.alpha_abs, "--alpha-abs", scheme)?;
            let e = estimate_phase(batch, alpha_abs, &params.eb_opts)?;
            pairs.push(("theta_hat", e.theta_hat.to_string()));
            pairs.push(("kappa0_re", e.fitted_kappa0.re.to_string()));
            pairs.push(("kappa0_im", e.fitted_kappa0.im.to_string()));
            pairs.push(("kappa_p_re", e.kappa_p.re.to_string()));
            pairs.push(("kappa_p_im", e.kappa_p.im.to_string()));
            format!(
                "phase estimate (empirical Bayes) from {m} samples, |alpha| = {alpha_abs}: theta = {:.6} rad\n\
                 fitted prior concentration {:.6}, posterior concentration {:.6}",
                e.theta_hat,
                e.fitted_kappa0.norm(),
                e.kappa_p.norm()
            )
        }
    };
    Ok(EstimateOutput {
        machine: kv(&pairs),
        human,
    })
}

/// Refuses to write into a directory that does not exist, naming it.
pub fn check_output_parent(path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            bail!(
                "output directory {} does not exist (output path {})",
                dir.display(),
                path.display()
            );
        }
    }
    Ok(())
}
