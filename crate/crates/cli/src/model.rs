//! Model documents, variant flags and list/grid parsing.

use clap::Args;
use mgcp::shock::ThresholdDist;
use mgcp::{RateMatrix, VariantSpec};
use serde::{Deserialize, Serialize};

/// Rates plus whatever process description the command needs. A bare rate matrix
/// (`{"ks": …, "rates": …}`) is accepted as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub rates: RateMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdDist>,
}

/// Rates of the two-component model with `k = (1, 2)` used in the reliability figures.
pub fn figure_rates(name: &str) -> Option<RateMatrix> {
    let l = match name {
        "fig1" => 0.5,
        "fig2" => 1.0,
        _ => return None,
    };
    Some(RateMatrix::new(vec![vec![l], vec![l, l]]).expect("valid preset"))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            format!("model: {}", e.inner())
        } else {
            format!("model: at {path}: {}", e.inner())
        }
    })
}

/// Reads a model from inline JSON (leading `{`), a file path, or the preset names
/// `fig1`/`fig2`.
pub fn load_model(arg: Option<&str>) -> Result<ModelDoc, String> {
    let arg = arg.unwrap_or("fig1");
    if let Some(rates) = figure_rates(arg) {
        return Ok(ModelDoc { rates, variant: None, alpha: None, threshold: None });
    }
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| format!("model file '{arg}': {e}"))?
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("model: {e}"))?;
    if value.get("ks").is_some() {
        let rates: RateMatrix = parse_json(&text)?;
        Ok(ModelDoc { rates, variant: None, alpha: None, threshold: None })
    } else {
        parse_json(&text)
    }
}

#[derive(Debug, Clone, Args)]
pub struct VariantArgs {
    /// mgcp, mgsfcp, mgfcp, mgstfcp, tempered, gamma or ig
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long = "a")]
    pub a: Option<f64>,
    #[arg(long = "b")]
    pub b: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

impl VariantArgs {
    /// Variant from the flags, else from the model document, else the MGCP.
    pub fn resolve(&self, doc: &ModelDoc) -> Result<VariantSpec, String> {
        let Some(name) = self.variant.as_deref() else {
            let v = doc.variant.unwrap_or(VariantSpec::Mgcp);
            v.validate().map_err(|e| e.to_string())?;
            return Ok(v);
        };
        let need = |x: Option<f64>, flag: &str| x.ok_or_else(|| format!("--{flag} is required for variant {name}"));
        let v = match name {
            "mgcp" => VariantSpec::Mgcp,
            "mgsfcp" => VariantSpec::Mgsfcp { alpha: need(self.alpha, "alpha")? },
            "mgfcp" => VariantSpec::Mgfcp { beta: need(self.beta, "beta")? },
            "mgstfcp" => VariantSpec::Mgstfcp { alpha: need(self.alpha, "alpha")?, beta: need(self.beta, "beta")? },
            "tempered" => VariantSpec::Tempered { alpha: need(self.alpha, "alpha")?, theta: need(self.theta, "theta")? },
            "gamma" => VariantSpec::Gamma { a: need(self.a, "a")?, b: need(self.b, "b")? },
            "ig" => VariantSpec::Ig { delta: need(self.delta, "delta")?, gamma: need(self.gamma, "gamma")? },
            other => return Err(format!("unknown variant '{other}'")),
        };
        v.validate().map_err(|e| e.to_string())?;
        Ok(v)
    }
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad integer '{x}' in '{s}'"))).collect()
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number '{x}' in '{s}'"))).collect()
}

/// `start:end:step` (inclusive, points computed as `start + k·step`) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 1 {
        return parse_f64_list(s);
    }
    if parts.len() != 3 {
        return Err(format!("grid '{s}': expected start:end:step"));
    }
    let v = parse_f64_list(&parts.join(","))?;
    let (start, end, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || !(end >= start) {
        return Err(format!("grid '{s}': need step > 0 and end ≥ start"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}
