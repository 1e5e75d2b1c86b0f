//! Fast invariant checks of the library, run by `gqest selftest`.

use std::f64::consts::PI;

use num_complex::Complex64;

use gqest::conjugate::{em_update, gaussian_posterior, marginal_log_likelihood};
use gqest::experiments::{presets, run_experiment, run_trials};
use gqest::phase::{circular_integral, posterior_kappa, von_mises_log_pdf};
use gqest::sim::{simulate_displacement_heterodyne, simulate_phase_heterodyne, simulate_squeezing_homodyne};
use gqest::squeezing::estimate_ml_homodyne;
use gqest::{log_i0, GaussianParams, LinearGaussianModel, ProbeConfig, RngStream};

pub struct Check {
    pub name: &'static str,
    pub result: Result<String, String>,
}

/// Deterministic point in `[lo, hi)` from a golden-ratio sequence.
fn spread(i: usize, salt: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((i as f64 + salt) * 0.618_033_988_749_894_9).fract()
}

fn ensure(ok: bool, pass: String, fail: String) -> Result<String, String> {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn special_values() -> Result<String, String> {
    let refs = [
        (0.0, 0.0),
        (1.0, 0.235_914_358_507_178_65),
        (100.0, 96.779_732_689_942_58),
        (1e6, 999_992.173_306_312_8),
    ];
    let mut worst = 0.0f64;
    for (x, v) in refs {
        let got = log_i0(x).map_err(|e| e.to_string())?;
        let err = if v == 0.0 { got.abs() } else { ((got - v) / v).abs() };
        worst = worst.max(err);
    }
    ensure(
        worst <= 1e-12,
        format!("max relative error {worst:.1e}"),
        format!("relative error {worst:e}"),
    )
}

fn model(i: usize) -> Result<(LinearGaussianModel, Vec<f64>, GaussianParams), String> {
    let m = 1 + i % 12;
    let nv = spread(i, 0.1, 0.05, 2.0);
    let gain: Vec<f64> = (0..m).map(|k| spread(i * 31 + k, 0.2, -2.0, 2.0)).collect();
    let mut rng = RngStream::new(i as u64, 1);
    let probe = ProbeConfig::new(spread(i, 0.3, -2.0, 2.0), 0.0, 0.0, 0.0).map_err(|e| e.to_string())?;
    let noise = simulate_displacement_heterodyne(&probe, m, &mut rng).map_err(|e| e.to_string())?;
    let y: Vec<f64> = gain
        .iter()
        .zip(noise.samples_re())
        .map(|(g, s)| g * probe.alpha_re + (s - probe.alpha_re))
        .collect();
    let prior = GaussianParams::new(spread(i, 0.4, -2.0, 2.0), spread(i, 0.5, 0.05, 3.0)).map_err(|e| e.to_string())?;
    Ok((LinearGaussianModel::new(gain, nv).map_err(|e| e.to_string())?, y, prior))
}

fn precision_additivity() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let (model, y, prior) = model(i)?;
        let post = gaussian_posterior(&prior, &model, &y).map_err(|e| e.to_string())?;
        let gtg: f64 = model.gain().iter().map(|g| g * g).sum();
        let expected = prior.precision() + gtg / model.noise_variance();
        worst = worst.max((post.precision() - expected).abs() / expected);
    }
    ensure(
        worst <= 1e-12,
        format!("max relative error {worst:.1e}"),
        format!("relative error {worst:e}"),
    )
}

fn em_ascent() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let (model, y, mut prior) = model(i)?;
        let s = model.summarize(&y).map_err(|e| e.to_string())?;
        let mut prev = marginal_log_likelihood(&prior, &model, &y).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            prior = em_update(&prior, model.noise_variance(), &s, 1e-12);
            let next = marginal_log_likelihood(&prior, &model, &y).map_err(|e| e.to_string())?;
            worst = worst.max((prev - next) / (1.0 + prev.abs()));
            prev = next;
        }
    }
    ensure(
        worst <= 1e-12,
        format!("worst drop {worst:.1e}"),
        format!("likelihood dropped by {worst:e}"),
    )
}

fn von_mises_conjugacy() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let kappa0 = Complex64::from_polar(spread(i, 0.1, 0.0, 5.0), spread(i, 0.2, -PI, PI));
        let alpha = spread(i, 0.3, 0.2, 2.0);
        let mut rng = RngStream::new(i as u64, 2);
        let batch = simulate_phase_heterodyne(alpha, spread(i, 0.4, -PI, PI), 1 + i % 4, &mut rng)
            .map_err(|e| e.to_string())?;
        let betas: Vec<Complex64> = batch.complex_samples().collect();
        let log_joint = |t: f64| {
            let rot = Complex64::from_polar(1.0, -t);
            (kappa0 * rot).re - betas.iter().map(|b| (b - rot * alpha).norm_sqr()).sum::<f64>()
        };
        let shift = log_joint(0.0);
        let norm = circular_integral(|t| log_joint(t) - shift, 2048);
        let kp = posterior_kappa(kappa0, alpha, &batch).map_err(|e| e.to_string())?;
        for j in 0..16 {
            let t = -PI + (j as f64 + 0.5) * PI / 8.0;
            let closed = von_mises_log_pdf(t, kp).map_err(|e| e.to_string())?.exp();
            worst = worst.max(((log_joint(t) - shift).exp() / norm - closed).abs());
        }
    }
    ensure(
        worst <= 1e-6,
        format!("max density error {worst:.1e}"),
        format!("density error {worst:e}"),
    )
}

fn ml_stationarity() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let alpha_re = spread(i, 0.1, -3.0, 3.0);
        let mut rng = RngStream::new(i as u64, 3);
        let batch = simulate_squeezing_homodyne(alpha_re, spread(i, 0.2, -1.5, 1.5), 1 + i % 50, &mut rng)
            .map_err(|e| e.to_string())?;
        let r = estimate_ml_homodyne(&batch, alpha_re).map_err(|e| e.to_string())?.r_hat;
        let q = batch.samples_re();
        let q1: f64 = q.iter().sum();
        let q2: f64 = q.iter().map(|x| x * x).sum();
        let t = r.exp();
        let terms = [
            2.0 * q2 * t * t,
            2.0 * std::f64::consts::SQRT_2 * alpha_re * q1 * t,
            q.len() as f64,
        ];
        let scale = terms.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        worst = worst.max((terms[0] - terms[1] - terms[2]).abs() / scale);
    }
    ensure(
        worst < 1e-9,
        format!("max relative residual {worst:.1e}"),
        format!("residual {worst:e}"),
    )
}

fn determinism() -> Result<String, String> {
    let cfg = presets::phase(1.0, vec![1, 5], 20, 7);
    let a = run_trials(&cfg).map_err(|e| e.to_string())?;
    let b = run_trials(&cfg).map_err(|e| e.to_string())?;
    let same = a.iter().zip(&b).all(|(x, y)| x.outcome() == y.outcome()) && a.len() == b.len();
    ensure(
        same,
        format!("{} trial records reproduced", a.len()),
        "trial records differ between runs".into(),
    )
}

fn genie_risk() -> Result<String, String> {
    let s = run_experiment(&presets::displacement_het(0.0, vec![10], 2000, 11)).map_err(|e| e.to_string())?;
    let row = s.row(10, "genie_re").ok_or("missing genie_re row")?;
    let z = (row.metric - 1.0 / 21.0) / row.metric_stderr;
    ensure(
        z.abs() <= 4.0,
        format!("M=10 genie MSE within {z:+.2} stderr of 1/21"),
        format!("genie MSE off by {z:.2} stderr"),
    )
}

pub fn run_selftest() -> Vec<Check> {
    vec![
        Check {
            name: "log_i0 reference values",
            result: special_values(),
        },
        Check {
            name: "posterior precision additivity",
            result: precision_additivity(),
        },
        Check {
            name: "EM marginal likelihood ascent",
            result: em_ascent(),
        },
        Check {
            name: "von Mises conjugacy",
            result: von_mises_conjugacy(),
        },
        Check {
            name: "homodyne ML stationarity",
            result: ml_stationarity(),
        },
        Check {
            name: "trial determinism",
            result: determinism(),
        },
        Check {
            name: "genie Bayes risk",
            result: genie_risk(),
        },
    ]
}
