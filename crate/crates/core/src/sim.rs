//! Seedable simulators for every measurement scheme, plus the closed-form
//! maps from probe parameters to outcome variances.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure_finite, Error, Result};

/// Wraps an angle into `[−π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2π
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id mapped onto the cipher's stream
/// counter, so distinct ids give independent sequences from one seed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub(crate) fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub(crate) fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// True physical parameters of a simulated probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub squeeze_r: f64,
    /// Rotation angle, always in `[−π, π)`.
    pub phase_theta: f64,
}

impl ProbeConfig {
    pub fn new(alpha_re: f64, alpha_im: f64, squeeze_r: f64, phase_theta: f64) -> Result<Self> {
        ensure_finite("alpha_re", alpha_re)?;
        ensure_finite("alpha_im", alpha_im)?;
        ensure_finite("squeeze_r", squeeze_r)?;
        ensure_finite("phase_theta", phase_theta)?;
        Ok(Self {
            alpha_re,
            alpha_im,
            squeeze_r,
            phase_theta: wrap_angle(phase_theta),
        })
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    HeterodyneDisplacement,
    HomodyneDisplacement,
    PovmSqueezing,
    HomodyneSqueezing,
    HeterodynePhase,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::HeterodyneDisplacement,
        Scheme::HomodyneDisplacement,
        Scheme::PovmSqueezing,
        Scheme::HomodyneSqueezing,
        Scheme::HeterodynePhase,
    ];

    /// Whether outcomes are complex (both quadratures recorded).
    pub fn is_complex(self) -> bool {
        matches!(self, Scheme::HeterodyneDisplacement | Scheme::HeterodynePhase)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::HeterodyneDisplacement => "heterodyne_displacement",
            Scheme::HomodyneDisplacement => "homodyne_displacement",
            Scheme::PovmSqueezing => "povm_squeezing",
            Scheme::HomodyneSqueezing => "homodyne_squeezing",
            Scheme::HeterodynePhase => "heterodyne_phase",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Scheme::ALL.into_iter().find(|sch| sch.name() == key).ok_or_else(|| {
            let names: Vec<_> = Scheme::ALL.iter().map(|s| s.name()).collect();
            Error::Argument(format!("unknown scheme `{s}`; expected one of: {}", names.join(", ")))
        })
    }
}

/// `M` i.i.d. outcomes of one measurement scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBatch {
    scheme: Scheme,
    samples_re: Vec<f64>,
    samples_im: Vec<f64>,
}

impl MeasurementBatch {
    /// Batch of real outcomes for a real-valued scheme.
    pub fn real(scheme: Scheme, samples: Vec<f64>) -> Result<Self> {
        if scheme.is_complex() {
            return Err(Error::Argument(format!(
                "scheme {} records complex outcomes",
                scheme.name()
            )));
        }
        Self::validate(&samples)?;
        Ok(Self {
            scheme,
            samples_re: samples,
            samples_im: Vec::new(),
        })
    }

    /// Batch of complex outcomes split into quadratures.
    pub fn complex(scheme: Scheme, samples_re: Vec<f64>, samples_im: Vec<f64>) -> Result<Self> {
        if !scheme.is_complex() {
            return Err(Error::Argument(format!(
                "scheme {} records real outcomes",
                scheme.name()
            )));
        }
        if samples_re.len() != samples_im.len() {
            return Err(Error::Argument(format!(
                "quadrature lengths differ: {} vs {}",
                samples_re.len(),
                samples_im.len()
            )));
        }
        Self::validate(&samples_re)?;
        Self::validate(&samples_im)?;
        Ok(Self {
            scheme,
            samples_re,
            samples_im,
        })
    }

    fn validate(samples: &[f64]) -> Result<()> {
        if samples.is_empty() {
            return Err(Error::Argument("a batch needs at least one sample".into()));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {bad}")));
        }
        Ok(())
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn count(&self) -> usize {
        self.samples_re.len()
    }

    pub fn samples_re(&self) -> &[f64] {
        &self.samples_re
    }

    /// Imaginary parts; empty for real-valued schemes.
    pub fn samples_im(&self) -> &[f64] {
        &self.samples_im
    }

    pub fn complex_samples(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples_re
            .iter()
            .zip(&self.samples_im)
            .map(|(&re, &im)| Complex64::new(re, im))
    }

    pub(crate) fn require(&self, scheme: Scheme) -> Result<()> {
        if self.scheme == scheme {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "expected a {} batch, got {}",
                scheme.name(),
                self.scheme.name()
            )))
        }
    }

    /// Hash of the scheme tag and the exact sample bits.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.scheme.hash(&mut h);
        for v in self.samples_re.iter().chain(&self.samples_im) {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Heterodyne quadrature noise variances `((1+e^{−2r})/4, (1+e^{2r})/4)`.
pub fn heterodyne_variances(r: f64) -> Result<(f64, f64)> {
    ensure_finite("squeezing r", r)?;
    let e = (2.0 * r).exp();
    Ok(((1.0 + 1.0 / e) / 4.0, (1.0 + e) / 4.0))
}

/// Homodyne q-quadrature variance `(cosh 2r − sinh 2r)/2 = e^{−2r}/2`.
pub fn homodyne_variance(r: f64) -> Result<f64> {
    ensure_finite("squeezing r", r)?;
    Ok(0.5 * (-2.0 * r).exp())
}

/// Outcome variance `1/(4|α|²)` of the squeezing-covariant POVM.
pub fn povm_variance(alpha_abs: f64) -> Result<f64> {
    check_alpha_abs(alpha_abs)?;
    Ok(0.25 / (alpha_abs * alpha_abs))
}

pub(crate) fn check_alpha_abs(alpha_abs: f64) -> Result<()> {
    if alpha_abs.is_finite() && alpha_abs > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "probe displacement |alpha| must be positive and finite, got {alpha_abs}"
        )))
    }
}

fn check_count(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::Argument("measurement count M must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn gaussian_samples(mean: f64, variance: f64, m: usize, rng: &mut RngStream) -> Vec<f64> {
    let sd = variance.sqrt();
    (0..m).map(|_| mean + sd * rng.normal()).collect()
}

/// Heterodyne outcomes `β_i` with `Re β ~ N(α_R, σ²_R(r))`, `Im β ~ N(α_I, σ²_I(r))`.
pub fn simulate_displacement_heterodyne(
    probe: &ProbeConfig,
    m: usize,
    rng: &mut RngStream,
) -> Result<MeasurementBatch> {
    check_count(m)?;
    let (var_re, var_im) = heterodyne_variances(probe.squeeze_r)?;
    let sd_re = var_re.sqrt();
    let sd_im = var_im.sqrt();
    let mut re = Vec::with_capacity(m);
    let mut im = Vec::with_capacity(m);
    for _ in 0..m {
        re.push(probe.alpha_re + sd_re * rng.normal());
        im.push(probe.alpha_im + sd_im * rng.normal());
    }
    MeasurementBatch::complex(Scheme::HeterodyneDisplacement, re, im)
}

/// Homodyne q-quadrature outcomes `q_i ~ N(√2 α_R, σ_q²(r))`.
pub fn simulate_displacement_homodyne(probe: &ProbeConfig, m: usize, rng: &mut RngStream) -> Result<MeasurementBatch> {
    check_count(m)?;
    let var = homodyne_variance(probe.squeeze_r)?;
    let samples = gaussian_samples(SQRT_2 * probe.alpha_re, var, m, rng);
    MeasurementBatch::real(Scheme::HomodyneDisplacement, samples)
}

/// POVM outcomes `ξ_i ~ N(r, 1/(4|α|²))`.
pub fn simulate_squeezing_povm(alpha_abs: f64, r_true: f64, m: usize, rng: &mut RngStream) -> Result<MeasurementBatch> {
    let var = povm_variance(alpha_abs)?;
    ensure_finite("r_true", r_true)?;
    check_count(m)?;
    let samples = gaussian_samples(r_true, var, m, rng);
    MeasurementBatch::real(Scheme::PovmSqueezing, samples)
}

/// Homodyne outcomes on a squeezed coherent probe, `q_i ~ N(√2 α_R e^{−r}, e^{−2r}/2)`.
pub fn simulate_squeezing_homodyne(
    alpha_re: f64,
    r_true: f64,
    m: usize,
    rng: &mut RngStream,
) -> Result<MeasurementBatch> {
    ensure_finite("alpha_re", alpha_re)?;
    check_count(m)?;
    let var = homodyne_variance(r_true)?;
    let samples = gaussian_samples(SQRT_2 * alpha_re * (-r_true).exp(), var, m, rng);
    MeasurementBatch::real(Scheme::HomodyneSqueezing, samples)
}

/// Heterodyne outcomes on a rotated coherent probe: `β_i = e^{−iθ}α + n_i`
/// with circular complex Gaussian noise of unit total variance.
pub fn simulate_phase_heterodyne(
    alpha_abs: f64,
    theta_true: f64,
    m: usize,
    rng: &mut RngStream,
) -> Result<MeasurementBatch> {
    check_alpha_abs(alpha_abs)?;
    ensure_finite("theta_true", theta_true)?;
    check_count(m)?;
    let mean = Complex64::from_polar(alpha_abs, -theta_true);
    let mut re = Vec::with_capacity(m);
    let mut im = Vec::with_capacity(m);
    for _ in 0..m {
        re.push(mean.re + FRAC_1_SQRT_2 * rng.normal());
        im.push(mean.im + FRAC_1_SQRT_2 * rng.normal());
    }
    MeasurementBatch::complex(Scheme::HeterodynePhase, re, im)
}

/// Below this concentration the von Mises law is treated as uniform.
const VON_MISES_UNIFORM_KAPPA: f64 = 1e-8;

/// One draw from the von Mises law with concentration `|κ|` and mean
/// direction `∠κ`, by Best–Fisher rejection.
pub fn sample_von_mises(kappa: Complex64, rng: &mut RngStream) -> Result<f64> {
    ensure_finite("kappa re", kappa.re)?;
    ensure_finite("kappa im", kappa.im)?;
    let conc = kappa.norm();
    if conc < VON_MISES_UNIFORM_KAPPA {
        return Ok(wrap_angle(2.0 * PI * rng.uniform() - PI));
    }
    let mean_dir = kappa.arg();
    let tau = 1.0 + (1.0 + 4.0 * conc * conc).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * conc);
    let s = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1 = rng.uniform();
        let u2 = rng.uniform();
        let z = (PI * u1).cos();
        let f = (1.0 + s * z) / (s + z);
        let c = conc * (s - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3 = rng.uniform();
            let offset = f.clamp(-1.0, 1.0).acos();
            let theta = if u3 < 0.5 { mean_dir - offset } else { mean_dir + offset };
            return Ok(wrap_angle(theta));
        }
    }
}
