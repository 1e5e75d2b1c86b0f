//! Phase estimation from heterodyne outcomes with a von Mises prior.
//!
//! The von Mises family is conjugate to the heterodyne likelihood: a prior
//! with shaping parameter `κ₀` and outcomes `β_i` give a von Mises posterior
//! with `κ_p = κ₀ + 2α Σ β_i*`. The prior parameter itself is fitted by
//! maximizing the evidence, `log I₀(|κ₀ + 2αβ̃*|) − log I₀(|κ₀|)`.
//!
//! For a fixed `|κ₀|` the evidence is largest when `κ₀` points along
//! `c = 2αβ̃*`, so the search runs over the ray `κ₀ = t·c/|c|`, `t ∈ [0, κ_max]`.
//! Along that ray the objective increases without bound, which is why
//! `kappa_max` exists; the bound does not move the phase estimate, because
//! `κ_p` stays on the same ray.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::optimize::golden_section_max;
use crate::sim::{check_alpha_abs, wrap_angle, MeasurementBatch, Scheme};
use crate::special::log_i0;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Complex shaping parameter; `|κ|` is the concentration and `∠κ` the mean direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesParam {
    pub kappa: Complex64,
}

impl VonMisesParam {
    pub fn new(kappa: Complex64) -> Result<Self> {
        ensure_finite("kappa re", kappa.re)?;
        ensure_finite("kappa im", kappa.im)?;
        Ok(Self { kappa })
    }

    pub fn from_polar(concentration: f64, direction: f64) -> Result<Self> {
        if concentration.is_nan() || concentration < 0.0 {
            return Err(Error::Domain(format!(
                "von Mises concentration must be nonnegative, got {concentration}"
            )));
        }
        Self::new(Complex64::from_polar(concentration, direction))
    }

    pub fn log_pdf(&self, theta: f64) -> Result<f64> {
        von_mises_log_pdf(theta, self.kappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbOptions {
    /// Upper end of the search over `|κ₀|`.
    pub kappa_max: f64,
    pub tol: f64,
    pub max_eval: usize,
}

impl Default for EbOptions {
    fn default() -> Self {
        Self {
            kappa_max: 1e3,
            tol: 1e-6,
            max_eval: 200,
        }
    }
}

impl EbOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_max.is_finite() && self.kappa_max > 0.0) {
            return Err(Error::Argument(format!(
                "kappa_max must be positive, got {}",
                self.kappa_max
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Argument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_eval < 2 {
            return Err(Error::Argument("max_eval must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    /// `∠κ_p`, wrapped to `[−π, π)`.
    pub theta_hat: f64,
    pub fitted_kappa0: Complex64,
    pub kappa_p: Complex64,
    /// Evidence objective at `fitted_kappa0`.
    pub objective_value: f64,
}

/// `Re(κ e^{−iθ}) − ln 2π − ln I₀(|κ|)`.
pub fn von_mises_log_pdf(theta: f64, kappa: Complex64) -> Result<f64> {
    ensure_finite("theta", theta)?;
    ensure_finite("kappa re", kappa.re)?;
    ensure_finite("kappa im", kappa.im)?;
    let aligned = (kappa * Complex64::from_polar(1.0, -theta)).re;
    Ok(aligned - LN_2PI - log_i0(kappa.norm())?)
}

/// `β̃* = Σ β_i*`.
pub fn conjugate_sum(batch: &MeasurementBatch) -> Result<Complex64> {
    batch.require(Scheme::HeterodynePhase)?;
    Ok(batch.complex_samples().map(|b| b.conj()).sum())
}

fn data_term(alpha_abs: f64, batch: &MeasurementBatch) -> Result<Complex64> {
    check_alpha_abs(alpha_abs)?;
    Ok(2.0 * alpha_abs * conjugate_sum(batch)?)
}

/// Posterior shaping parameter `κ₀ + 2α β̃*`.
pub fn posterior_kappa(kappa0: Complex64, alpha_abs: f64, batch: &MeasurementBatch) -> Result<Complex64> {
    ensure_finite("kappa0 re", kappa0.re)?;
    ensure_finite("kappa0 im", kappa0.im)?;
    Ok(kappa0 + data_term(alpha_abs, batch)?)
}

/// Evidence `ln I₀(|κ₀ + c|) − ln I₀(|κ₀|)` for an arbitrary complex `κ₀`.
pub fn evidence_objective(kappa0: Complex64, c: Complex64) -> Result<f64> {
    Ok(log_i0((kappa0 + c).norm())? - log_i0(kappa0.norm())?)
}

/// Evidence restricted to `κ₀ = kappa0_mag · c/|c|`.
pub fn eb_objective(kappa0_mag: f64, c: Complex64) -> Result<f64> {
    ensure_finite("c re", c.re)?;
    ensure_finite("c im", c.im)?;
    if !(kappa0_mag >= 0.0 && kappa0_mag.is_finite()) {
        return Err(Error::Domain(format!("|kappa0| must be nonnegative, got {kappa0_mag}")));
    }
    let c_abs = c.norm();
    if c_abs == 0.0 {
        return Err(Error::DegenerateData(
            "degenerate measurement sum: 2*alpha*sum(conj(beta)) is zero".into(),
        ));
    }
    Ok(log_i0(kappa0_mag + c_abs)? - log_i0(kappa0_mag)?)
}

fn fit_on_ray(c: Complex64, opts: &EbOptions) -> Result<(Complex64, f64)> {
    opts.validate()?;
    if c.norm() == 0.0 {
        return Err(Error::DegenerateData(
            "degenerate measurement sum: the conjugate outcome sum is zero, so the prior direction is undefined".into(),
        ));
    }
    let best = golden_section_max(|t| eb_objective(t, c), 0.0, opts.kappa_max, opts.tol, opts.max_eval)?;
    let direction = c / c.norm();
    Ok((best.x * direction, best.value))
}

/// Empirical-Bayes estimate of `κ₀`.
pub fn fit_kappa0(batch: &MeasurementBatch, alpha_abs: f64, opts: &EbOptions) -> Result<Complex64> {
    let c = data_term(alpha_abs, batch)?;
    Ok(fit_on_ray(c, opts)?.0)
}

fn angle(z: Complex64) -> f64 {
    wrap_angle(z.im.atan2(z.re))
}

/// Phase estimate `∠κ_p` with the prior fitted from the same batch.
pub fn estimate_phase(batch: &MeasurementBatch, alpha_abs: f64, opts: &EbOptions) -> Result<PhaseEstimate> {
    let c = data_term(alpha_abs, batch)?;
    let (kappa0, objective_value) = fit_on_ray(c, opts)?;
    let kappa_p = kappa0 + c;
    Ok(PhaseEstimate {
        theta_hat: angle(kappa_p),
        fitted_kappa0: kappa0,
        kappa_p,
        objective_value,
    })
}

/// Phase estimate under the true prior parameter.
pub fn genie_phase_estimate(batch: &MeasurementBatch, alpha_abs: f64, true_kappa0: Complex64) -> Result<PhaseEstimate> {
    let c = data_term(alpha_abs, batch)?;
    let kappa_p = posterior_kappa(true_kappa0, alpha_abs, batch)?;
    Ok(PhaseEstimate {
        theta_hat: angle(kappa_p),
        fitted_kappa0: true_kappa0,
        kappa_p,
        objective_value: evidence_objective(true_kappa0, c)?,
    })
}

/// Periodic trapezoid integral of `exp(log_f)` over one period.
pub fn circular_integral(log_f: impl Fn(f64) -> f64, points: usize) -> f64 {
    let h = 2.0 * PI / points as f64;
    (0..points).map(|i| log_f(-PI + i as f64 * h).exp()).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_phase_heterodyne, RngStream};
    use approx::assert_abs_diff_eq;

    fn phase_batch(betas: &[Complex64]) -> MeasurementBatch {
        MeasurementBatch::complex(
            Scheme::HeterodynePhase,
            betas.iter().map(|b| b.re).collect(),
            betas.iter().map(|b| b.im).collect(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_density() {
        for t in [-3.0, 0.0, 1.0, 3.1] {
            assert_abs_diff_eq!(
                von_mises_log_pdf(t, Complex64::new(0.0, 0.0)).unwrap(),
                -LN_2PI,
                epsilon = 1e-15
            );
        }
        assert!(von_mises_log_pdf(f64::NAN, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn density_normalizes() {
        for k in [
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(4.0, 0.5),
            Complex64::new(100.0, 0.0),
        ] {
            let total = circular_integral(|t| von_mises_log_pdf(t, k).unwrap(), 4096);
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn mode_at_mean_direction() {
        let k = Complex64::from_polar(3.0, -2.2);
        let peak = von_mises_log_pdf(k.arg(), k).unwrap();
        for i in 0..1000 {
            let t = -PI + i as f64 * 2.0 * PI / 1000.0;
            assert!(von_mises_log_pdf(t, k).unwrap() <= peak);
        }
    }

    #[test]
    fn posterior_kappa_examples() {
        let theta = 0.7;
        let alpha = 1.5;
        let beta = Complex64::from_polar(alpha, -theta);
        let kp = posterior_kappa(Complex64::new(0.0, 0.0), alpha, &phase_batch(&[beta])).unwrap();
        assert_abs_diff_eq!(kp.re, 2.0 * alpha * alpha * theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(kp.arg(), theta, epsilon = 1e-14);

        // β = 1 so β̃* = 1
        let k0 = Complex64::from_polar(4.0, 0.5);
        let kp = posterior_kappa(k0, 1.0, &phase_batch(&[Complex64::new(1.0, 0.0)])).unwrap();
        assert_abs_diff_eq!(kp.re, 5.5104, epsilon = 1e-4);
        assert_abs_diff_eq!(kp.im, 1.9177, epsilon = 1e-4);

        // contributions that cancel leave the prior unchanged
        let b = phase_batch(&[Complex64::new(0.3, -1.0), Complex64::new(-0.3, 1.0)]);
        assert_eq!(posterior_kappa(k0, 2.0, &b).unwrap(), k0);

        let wrong = MeasurementBatch::complex(Scheme::HeterodyneDisplacement, vec![1.0], vec![0.0]).unwrap();
        assert!(matches!(posterior_kappa(k0, 1.0, &wrong), Err(Error::Argument(_))));
    }

    #[test]
    fn objective_examples() {
        let c = Complex64::new(2.0, 0.0);
        assert_abs_diff_eq!(eb_objective(0.0, c).unwrap(), log_i0(2.0).unwrap(), epsilon = 1e-15);
        // mpmath: ln I₀(5) − ln I₀(3) = 3.3046817758 − 1.5853076218
        assert_abs_diff_eq!(eb_objective(3.0, c).unwrap(), 1.7193741540, epsilon = 1e-9);
        let c = Complex64::from_polar(3.5, 2.0);
        let mut last = f64::NEG_INFINITY;
        for i in 0..2000 {
            let v = eb_objective(i as f64 * 0.5, c).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(matches!(
            eb_objective(1.0, Complex64::new(0.0, 0.0)),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn ray_dominates_other_directions() {
        let c = Complex64::from_polar(2.5, 1.2);
        for t in [0.1, 1.0, 7.0] {
            let on_ray = eb_objective(t, c).unwrap();
            for j in 1..64 {
                let off = Complex64::from_polar(t, 1.2 + j as f64 * 2.0 * PI / 64.0);
                assert!(evidence_objective(off, c).unwrap() <= on_ray + 1e-12);
            }
            assert_abs_diff_eq!(
                evidence_objective(Complex64::from_polar(t, 1.2), c).unwrap(),
                on_ray,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fit_is_aligned_and_at_bound() {
        let mut rng = RngStream::new(12, 0);
        for _ in 0..20 {
            let b = simulate_phase_heterodyne(1.3, rng.normal(), 5, &mut rng).unwrap();
            let opts = EbOptions::default();
            let k0 = fit_kappa0(&b, 1.3, &opts).unwrap();
            let c = 2.0 * 1.3 * conjugate_sum(&b).unwrap();
            assert_abs_diff_eq!(k0.arg(), c.arg(), epsilon = 1e-15);
            // grid-scan oracle: the objective is largest at the right end
            let grid_best = (0..=10_000)
                .map(|i| i as f64 * opts.kappa_max / 10_000.0)
                .map(|t| (eb_objective(t, c).unwrap(), t))
                .fold((f64::NEG_INFINITY, 0.0), |a, x| if x.0 > a.0 { x } else { a });
            assert_eq!(grid_best.1, opts.kappa_max);
            assert!((k0.norm() - opts.kappa_max).abs() <= opts.tol);
            let est = estimate_phase(&b, 1.3, &opts).unwrap();
            assert_abs_diff_eq!(est.theta_hat, angle(conjugate_sum(&b).unwrap()), epsilon = 1e-9);
        }
    }

    #[test]
    fn noise_free_recovery() {
        for theta in [-3.0, -1.0, 0.0, 0.4, 2.9] {
            let betas = vec![Complex64::from_polar(2.0, -theta); 6];
            let est = estimate_phase(&phase_batch(&betas), 2.0, &EbOptions::default()).unwrap();
            assert_abs_diff_eq!(est.theta_hat, theta, epsilon = 1e-9);
            assert_abs_diff_eq!(est.kappa_p.arg(), theta, epsilon = 1e-9);
        }
    }

    #[test]
    fn degenerate_sum() {
        let b = phase_batch(&[Complex64::new(1.0, 2.0), Complex64::new(-1.0, -2.0)]);
        let err = estimate_phase(&b, 1.0, &EbOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateData(_)));
        assert!(err.to_string().contains("degenerate measurement sum"));
    }

    #[test]
    fn genie_examples() {
        let b = phase_batch(&[Complex64::new(1.0, 0.0)]);
        let est = genie_phase_estimate(&b, 1.0, Complex64::from_polar(4.0, 0.5)).unwrap();
        assert_abs_diff_eq!(est.theta_hat, 0.33489, epsilon = 1e-4);

        let b = phase_batch(&[Complex64::new(0.3, 0.8), Complex64::new(1.1, -0.2)]);
        let est = genie_phase_estimate(&b, 1.0, Complex64::from_polar(1e9, -1.0)).unwrap();
        assert_abs_diff_eq!(est.theta_hat, -1.0, epsilon = 1e-6);

        let est = genie_phase_estimate(&b, 1.0, Complex64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(est.theta_hat, conjugate_sum(&b).unwrap().arg(), epsilon = 1e-15);
    }

    #[test]
    fn rotation_and_scale_invariance() {
        let betas = [Complex64::new(0.5, -0.9), Complex64::new(1.4, 0.3)];
        let base = genie_phase_estimate(&phase_batch(&betas), 1.0, Complex64::new(0.0, 0.0)).unwrap();
        for delta in [0.3, -2.0, 3.0] {
            // β_i → e^{−iδ} β_i turns β̃* into e^{iδ} β̃*
            let rot: Vec<_> = betas.iter().map(|b| b * Complex64::from_polar(1.0, -delta)).collect();
            let est = genie_phase_estimate(&phase_batch(&rot), 1.0, Complex64::new(0.0, 0.0)).unwrap();
            assert_abs_diff_eq!(wrap_angle(est.theta_hat - base.theta_hat - delta), 0.0, epsilon = 1e-12);
        }
        let kp = Complex64::new(-0.3, 0.9);
        for s in [1e-3, 2.0, 1e6] {
            assert_eq!(angle(kp * s), angle(kp));
        }
    }

    #[test]
    fn conjugacy_against_quadrature() {
        let mut rng = RngStream::new(13, 0);
        let k0 = Complex64::from_polar(2.0, 0.3);
        let b = simulate_phase_heterodyne(1.2, 0.5, 3, &mut rng).unwrap();
        let kp = posterior_kappa(k0, 1.2, &b).unwrap();
        let log_joint = |t: f64| {
            let lik: f64 = b
                .complex_samples()
                .map(|beta| -(Complex64::from_polar(1.0, t) * beta - 1.2).norm_sqr() - PI.ln())
                .sum();
            von_mises_log_pdf(t, k0).unwrap() + lik
        };
        let z = circular_integral(log_joint, 8192);
        for i in 0..200 {
            let t = -PI + i as f64 * 2.0 * PI / 200.0;
            let numeric = log_joint(t).exp() / z;
            let closed = von_mises_log_pdf(t, kp).unwrap().exp();
            assert_abs_diff_eq!(numeric, closed, epsilon = 1e-6);
        }
    }
}
