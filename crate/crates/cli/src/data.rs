//! Plain-text measurement files: one sample per line, `re im` for complex
//! schemes, `#` starts a comment.

use std::path::Path;

use anyhow::{bail, Context, Result};

use gqest::{MeasurementBatch, Scheme};

pub fn parse_measurements(scheme: Scheme, text: &str) -> Result<MeasurementBatch> {
    let width = if scheme.is_complex() { 2 } else { 1 };
    let mut re = Vec::new();
    let mut im = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != width {
            let hint = match (width, fields.len()) {
                (1, 2) => " (complex `re im` data supplied for a real-valued scheme)",
                (2, 1) => " (real data supplied for a complex-valued scheme)",
                _ => "",
            };
            bail!(
                "line {}: scheme {} expects {width} value(s) per line, found {}{hint}",
                i + 1,
                scheme.name(),
                fields.len()
            );
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .with_context(|| format!("line {}: `{s}` is not a number", i + 1))?;
            if !v.is_finite() {
                bail!("line {}: sample `{s}` is not finite", i + 1);
            }
            Ok(v)
        };
        re.push(parse(fields[0])?);
        if width == 2 {
            im.push(parse(fields[1])?);
        }
    }
    if re.is_empty() {
        bail!("no samples found");
    }
    Ok(if width == 2 {
        MeasurementBatch::complex(scheme, re, im)?
    } else {
        MeasurementBatch::real(scheme, re)?
    })
}

pub fn read_measurements(scheme: Scheme, path: &Path) -> Result<MeasurementBatch> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read data file {}", path.display()))?;
    parse_measurements(scheme, &text).with_context(|| format!("invalid data file {}", path.display()))
}
