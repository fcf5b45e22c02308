//! Run configuration: a TOML file, flags layered on top, and the resolved
//! snapshot written back next to every output file.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use walsh_lab::{CesaroOrder, ConeSpec};

use crate::Failure;

/// Every knob a run can carry, all optional. A config file fills some of
/// them, flags override field by field, and command-specific defaults fill
/// the rest. The fully resolved version of this struct is the sidecar
/// snapshot: feeding it back through `--config` reproduces the run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    /// Catalog cone name or path to a cone TOML file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone: Option<String>,
    /// Resolved cone table; takes precedence over `cone` when present, so
    /// a snapshot stays reproducible after the original file moves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone_spec: Option<ConeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))
    }

    /// A config written by one subcommand must not drive another.
    pub fn check_command(&self, name: &str) -> Result<(), Failure> {
        match &self.command {
            Some(c) if c != name => Err(Failure::config(format!(
                "config was written for `{c}`, not `{name}`"
            ))),
            _ => Ok(()),
        }
    }
}

/// Inclusive `a..b` ranges and comma lists, e.g. `4..12` or `4,6,8`.
pub fn parse_index_list(text: &str) -> Result<Vec<u32>, Failure> {
    let text = text.trim();
    let items: Vec<u32> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = parse_scalar(lo, text)?;
        let hi: u32 = parse_scalar(hi, text)?;
        if hi < lo {
            return Err(Failure::config(format!("empty range `{text}`")));
        }
        (lo..=hi).collect()
    } else {
        text.split(',')
            .map(|part| parse_scalar(part, text))
            .collect::<Result<_, _>>()?
    };
    if items.is_empty() {
        return Err(Failure::config(format!("empty index list `{text}`")));
    }
    Ok(items)
}

fn parse_scalar(part: &str, whole: &str) -> Result<u32, Failure> {
    part.trim()
        .parse()
        .map_err(|_| Failure::config(format!("bad index `{part}` in `{whole}`")))
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| Failure::config(format!("bad number `{part}` in `{text}`")))
        })
        .collect()
}

pub fn to_orders(raw: &[f64]) -> Result<Vec<CesaroOrder>, Failure> {
    raw.iter()
        .map(|&a| CesaroOrder::new(a).map_err(Failure::from_setup))
        .collect()
}

/// Point coordinates as a bit mask, decimal or `0b` binary.
pub fn parse_bits(text: &str) -> Result<u64, Failure> {
    let text = text.trim();
    let parsed = match text.strip_prefix("0b") {
        Some(bin) => u64::from_str_radix(bin, 2),
        None => text.parse(),
    };
    parsed.map_err(|_| Failure::config(format!("bad point mask `{text}`")))
}

/// Renders a resolved index list back into canonical config form.
pub fn render_index_list(items: &[u32]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Resolves the cone: an embedded snapshot wins, then a catalog name or
/// TOML file path, then the identity catalog cone. Returns the spec plus
/// the label recorded in the sidecar.
pub fn resolve_cone(
    label: Option<&str>,
    embedded: Option<&ConeSpec>,
    dims: usize,
) -> Result<(ConeSpec, String), Failure> {
    // a reloaded sidecar carries the label "embedded" next to its snapshot;
    // route that back to the snapshot branch
    if label.is_none() || (label == Some("embedded") && embedded.is_some()) {
        if let Some(spec) = embedded {
            // revalidate: a hand-edited snapshot must not sneak past the
            // constructor checks
            let spec = ConeSpec::new(spec.axes().to_vec()).map_err(Failure::from_setup)?;
            if spec.dims() != dims {
                return Err(Failure::config(format!(
                    "cone has {} axes but {} orders were given",
                    spec.dims(),
                    dims
                )));
            }
            return Ok((spec, "embedded".to_string()));
        }
    }
    let label = label.unwrap_or("identity");
    let path = std::path::Path::new(label);
    let spec = if label.ends_with(".toml") || path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read cone file {label}: {e}")))?;
        ConeSpec::from_toml_str(&text).map_err(Failure::from_setup)?
    } else {
        ConeSpec::catalog(label, dims).map_err(Failure::from_setup)?
    };
    if spec.dims() != dims {
        return Err(Failure::config(format!(
            "cone `{label}` has {} axes but {} orders were given",
            spec.dims(),
            dims
        )));
    }
    Ok((spec, label.to_string()))
}
