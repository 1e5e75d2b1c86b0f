//! JSON experiment configs.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{Map, Value};

use gqest::experiments::{ExperimentConfig, Task, TruePrior};
use gqest::{EbOptions, EmOptions, GaussianParams, ProbeConfig, VonMisesParam};

pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Plotdata,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "plotdata" => Ok(Self::Plotdata),
            other => bail!("unknown format `{other}`; expected one of: csv, plotdata"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub experiment: ExperimentConfig,
    /// Standard output when absent.
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// A JSON object together with its dotted location, for error messages.
struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Obj<'a> {
    fn new(path: String, value: &'a Value) -> Result<Self> {
        match value {
            Value::Object(map) => Ok(Self { path, map }),
            _ => bail!("`{}`: expected an object", display_path(&path)),
        }
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn allow_only(&self, keys: &[&str]) -> Result<()> {
        for k in self.map.keys() {
            if !keys.contains(&k.as_str()) {
                bail!("unknown key `{}`; allowed keys here: {}", self.key(k), keys.join(", "));
            }
        }
        Ok(())
    }

    fn get(&self, k: &str) -> Option<&'a Value> {
        self.map.get(k).filter(|v| !v.is_null())
    }

    fn required(&self, k: &str, ty: &str) -> Result<&'a Value> {
        self.get(k)
            .ok_or_else(|| anyhow!("missing key `{}` (expected {ty})", self.key(k)))
    }

    fn object(&self, k: &str) -> Result<Option<Obj<'a>>> {
        self.get(k).map(|v| Obj::new(self.key(k), v)).transpose()
    }

    fn f64_or(&self, k: &str, default: f64) -> Result<f64> {
        self.get(k).map_or(Ok(default), |v| as_f64(&self.key(k), v))
    }

    fn u64_or(&self, k: &str, default: u64) -> Result<u64> {
        self.get(k).map_or(Ok(default), |v| as_u64(&self.key(k), v))
    }
}

fn display_path(p: &str) -> &str {
    if p.is_empty() {
        "<root>"
    } else {
        p
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| anyhow!("key `{key}`: expected a finite number, got {v}"))
}

fn as_u64(key: &str, v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| anyhow!("key `{key}`: expected a nonnegative integer, got {v}"))
}

fn positive_usize(key: &str, v: &Value) -> Result<usize> {
    let n = v
        .as_u64()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("key `{key}`: expected a positive integer, got {v}"))?;
    usize::try_from(n).map_err(|_| anyhow!("key `{key}`: {n} is too large"))
}

fn gaussian(obj: &Obj) -> Result<GaussianParams> {
    obj.allow_only(&["mean", "variance"])?;
    let mean = as_f64(&obj.key("mean"), obj.required("mean", "a number")?)?;
    let variance = as_f64(&obj.key("variance"), obj.required("variance", "a positive number")?)?;
    if variance <= 0.0 {
        bail!(
            "key `{}`: variance must be positive, got {variance}",
            obj.key("variance")
        );
    }
    Ok(GaussianParams::new(mean, variance)?)
}

fn true_prior(task: Task, obj: &Obj) -> Result<TruePrior> {
    if task == Task::Phase {
        obj.allow_only(&["kappa_abs", "kappa_arg"])?;
        let abs = as_f64(
            &obj.key("kappa_abs"),
            obj.required("kappa_abs", "a nonnegative number")?,
        )?;
        if abs < 0.0 {
            bail!(
                "key `{}`: concentration must be nonnegative, got {abs}",
                obj.key("kappa_abs")
            );
        }
        let arg = obj.f64_or("kappa_arg", 0.0)?;
        return Ok(TruePrior::VonMises(VonMisesParam::from_polar(abs, arg)?));
    }
    let allowed: &[&str] = if task == Task::DisplacementHet {
        &["re", "im"]
    } else {
        &["re"]
    };
    obj.allow_only(allowed)?;
    let re_obj = obj.object("re")?.ok_or_else(|| {
        anyhow!(
            "missing key `{}` (expected an object with mean and variance)",
            obj.key("re")
        )
    })?;
    let re = gaussian(&re_obj)?;
    let im = match obj.object("im")? {
        Some(o) => Some(gaussian(&o)?),
        None if task == Task::DisplacementHet => {
            bail!(
                "missing key `{}` (expected an object with mean and variance)",
                obj.key("im")
            )
        }
        None => None,
    };
    Ok(TruePrior::Gaussian { re, im })
}

fn em_options(obj: Option<Obj>) -> Result<EmOptions> {
    let d = EmOptions::default();
    let Some(o) = obj else { return Ok(d) };
    o.allow_only(&["epsilon_q", "epsilon_param", "max_iter", "variance_floor", "init_seed"])?;
    Ok(EmOptions {
        epsilon_q: o.f64_or("epsilon_q", d.epsilon_q)?,
        epsilon_param: o.f64_or("epsilon_param", d.epsilon_param)?,
        max_iter: o
            .get("max_iter")
            .map_or(Ok(d.max_iter), |v| positive_usize(&o.key("max_iter"), v))?,
        variance_floor: o.f64_or("variance_floor", d.variance_floor)?,
        init_seed: o.u64_or("init_seed", d.init_seed)?,
    })
}

fn eb_options(obj: Option<Obj>) -> Result<EbOptions> {
    let d = EbOptions::default();
    let Some(o) = obj else { return Ok(d) };
    o.allow_only(&["kappa_max", "tol", "max_eval"])?;
    Ok(EbOptions {
        kappa_max: o.f64_or("kappa_max", d.kappa_max)?,
        tol: o.f64_or("tol", d.tol)?,
        max_eval: o
            .get("max_eval")
            .map_or(Ok(d.max_eval), |v| positive_usize(&o.key("max_eval"), v))?,
    })
}

/// Parses and validates a config document, applying defaults.
pub fn parse_config_str(text: &str) -> Result<CliConfig> {
    let root: Value = serde_json::from_str(text).context("config is not valid JSON")?;
    let root = Obj::new(String::new(), &root)?;
    root.allow_only(&[
        "task",
        "m_grid",
        "trials",
        "probe",
        "true_prior",
        "em_opts",
        "eb_opts",
        "base_seed",
        "output_path",
        "format",
    ])?;

    let task_value = root.required("task", "a string")?;
    let task: Task = task_value
        .as_str()
        .ok_or_else(|| anyhow!("key `task`: expected a string, got {task_value}"))?
        .parse()?;

    let grid_value = root.required("m_grid", "an array of positive integers")?;
    let m_grid = grid_value
        .as_array()
        .ok_or_else(|| anyhow!("key `m_grid`: expected an array of positive integers, got {grid_value}"))?
        .iter()
        .enumerate()
        .map(|(i, v)| positive_usize(&format!("m_grid[{i}]"), v))
        .collect::<Result<Vec<_>>>()?;

    let trials = root
        .get("trials")
        .map_or(Ok(DEFAULT_TRIALS), |v| positive_usize("trials", v))?;

    let probe = match root.object("probe")? {
        Some(p) => {
            p.allow_only(&["alpha_re", "alpha_im", "squeeze_r"])?;
            ProbeConfig::new(
                p.f64_or("alpha_re", 0.0)?,
                p.f64_or("alpha_im", 0.0)?,
                p.f64_or("squeeze_r", 0.0)?,
                0.0,
            )?
        }
        None => ProbeConfig::new(0.0, 0.0, 0.0, 0.0)?,
    };

    let prior_obj = root
        .object("true_prior")?
        .ok_or_else(|| anyhow!("missing key `true_prior` (expected an object)"))?;
    let true_prior = true_prior(task, &prior_obj)?;

    let output_path = match root.get("output_path") {
        Some(v) => {
            Some(PathBuf::from(v.as_str().ok_or_else(|| {
                anyhow!("key `output_path`: expected a string, got {v}")
            })?))
        }
        None => None,
    };
    let format = match root.get("format") {
        Some(v) => v
            .as_str()
            .ok_or_else(|| anyhow!("key `format`: expected a string, got {v}"))?
            .parse()?,
        None => OutputFormat::Csv,
    };

    let experiment = ExperimentConfig {
        task,
        m_grid,
        trials,
        probe,
        true_prior,
        em_opts: em_options(root.object("em_opts")?)?,
        eb_opts: eb_options(root.object("eb_opts")?)?,
        base_seed: root.u64_or("base_seed", 0)?,
    };
    experiment.validate()?;
    Ok(CliConfig {
        experiment,
        output_path,
        format,
    })
}

pub fn parse_config(path: &Path) -> Result<CliConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config_str(&text).with_context(|| format!("invalid config {}", path.display()))
}
