//! `mgcp`: pmf tables, pgf values, Lévy measures, moments, simulation, Monte-Carlo
//! reports and reliability curves.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical-quality warnings or failure.

mod model;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mgcp::gcp::{pmf_box, preset_rates, PresetKind};
use mgcp::montecarlo::{
    estimate_codifference, estimate_covariance, estimate_pmf, estimate_reliability, sample_histogram, EstimateReport,
};
use mgcp::shock::{reliability_curve, CurveCase, ShockModel, ThresholdDist};
use mgcp::variants::{
    codifference, covariance, holding_rate, variant_levy_measure, variant_mean, variant_pgf, PmfEvaluator, Route,
};
use mgcp::{SeriesConfig, VariantSpec};
use model::{load_model, parse_f64_list, parse_grid, parse_usize_list, ModelDoc, VariantArgs};
use output::{csv_row, emit, json, num, Format};
use serde_json::json;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "mgcp", version, about = "Multivariate generalized counting processes and their time changes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pmf table over a box of states.
    Pmf(PmfArgs),
    /// Probability generating function at one point.
    Pgf(PgfArgs),
    /// Lévy measure (jump rates) over a box of jump states.
    Levy(LevyArgs),
    /// Means, covariance and codifference of two components.
    Moments(MomentsArgs),
    /// Histogram of simulated states.
    Simulate(SimulateArgs),
    /// Monte-Carlo estimate compared with the closed form.
    Estimate(EstimateArgs),
    /// Shock-model survival curve.
    Reliability(ReliabilityArgs),
    /// Named and generated rate matrices.
    Presets(PresetsArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Model JSON: inline, a file path, or `fig1`/`fig2` (default `fig1`)
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; relative paths resolve against $MGCP_OUTPUT_DIR when set
    #[arg(long)]
    output: Option<String>,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Series,
    Wright,
}

#[derive(Debug, Args)]
struct PmfArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    variant: VariantArgs,
    #[arg(long)]
    t: f64,
    /// Upper corner, e.g. `8,8` (default: MGCP mean + 12 sd per component)
    #[arg(long = "box")]
    upper: Option<String>,
    #[arg(long, value_enum, default_value_t = RouteArg::Series)]
    route: RouteArg,
}

#[derive(Debug, Args)]
struct PgfArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    variant: VariantArgs,
    #[arg(long)]
    t: f64,
    /// Argument ū, e.g. `0.5,0.5`
    #[arg(long)]
    u: String,
}

#[derive(Debug, Args)]
struct LevyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    variant: VariantArgs,
    /// Upper corner of the jump box (default: the jump sizes k_i)
    #[arg(long = "box")]
    upper: Option<String>,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    variant: VariantArgs,
    #[arg(long)]
    t: f64,
    /// First component (numbered from 0)
    #[arg(long, default_value_t = 0)]
    i: usize,
    /// Second component (numbered from 0)
    #[arg(long, default_value_t = 0)]
    l: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    variant: VariantArgs,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    t: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimateKind {
    Pmf,
    Covariance,
    Codifference,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    variant: VariantArgs,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long, value_enum, default_value_t = EstimateKind::Pmf)]
    kind: EstimateKind,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long = "box")]
    upper: Option<String>,
    #[arg(long, default_value_t = 0)]
    i: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
}

#[derive(Debug, Args)]
struct ReliabilityArgs {
    #[command(flatten)]
    common: Common,
    /// fig1 (geometric), fig2 (logarithmic), fig3 (incomplete gamma), fig4 (sine) or general
    #[arg(long, default_value = "general")]
    case: String,
    #[arg(long)]
    alpha: Option<f64>,
    /// `geometric:P`, `logarithmic:P`, `incgamma:A:P`, `sine:A:P` or `custom:Q0,Q1,…`
    #[arg(long)]
    threshold: Option<String>,
    /// `start:end:step` or a comma list
    #[arg(long, default_value = "0:5:0.1")]
    tgrid: String,
    /// Estimate the curve by simulation with this many samples instead
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug, Args)]
struct PresetsArgs {
    /// fig1, fig2, order-k or polya-aeppli; omit to list the named presets
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    ks: Option<String>,
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    output: Option<String>,
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<mgcp::Error> for Failure {
    fn from(e: mgcp::Error) -> Self {
        match e {
            mgcp::Error::Domain(_) => Failure::Validation(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Validation(s)
    }
}

impl From<&str> for Failure {
    fn from(s: &str) -> Self {
        Failure::Validation(s.to_string())
    }
}

type Outcome = Result<Vec<String>, Failure>;

fn model_echo(doc: &ModelDoc, v: VariantSpec) -> ModelDoc {
    ModelDoc { rates: doc.rates.clone(), variant: Some(v), alpha: None, threshold: None }
}

fn state_header(q: usize, last: &str) -> String {
    csv_row((1..=q).map(|i| format!("n{i}")).chain(std::iter::once(last.to_string())))
}

fn state_row(n: &[usize], value: String) -> String {
    csv_row(n.iter().map(|x| x.to_string()).chain(std::iter::once(value)))
}

fn format_state(n: &[usize]) -> String {
    let parts: Vec<String> = n.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn cmd_pmf(a: &PmfArgs) -> Outcome {
    let doc = load_model(a.common.model.as_deref())?;
    let v = a.variant.resolve(&doc)?;
    let upper = match &a.upper {
        Some(s) => parse_usize_list(s)?,
        None => pmf_box(&doc.rates, a.t),
    };
    doc.rates.check_state(&upper)?;
    let cfg = SeriesConfig::default();
    let route = match a.route {
        RouteArg::Series => Route::Series,
        RouteArg::Wright => Route::Wright,
    };
    let mut ev = PmfEvaluator::with_route(&v, &doc.rates, a.t, &cfg, route)?;
    let mut warnings = Vec::new();
    let mut cells = Vec::new();
    for n in mgcp::variants::box_cells(&upper) {
        let p = ev.pmf(&n)?;
        for w in p.quality.warnings() {
            warnings.push(format!("state {}: {w}", format_state(&n)));
        }
        cells.push((n, p.value));
    }
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = state_header(doc.rates.q(), "pmf");
            for (n, p) in &cells {
                s += &state_row(n, num(*p));
            }
            s
        }
        Format::Json => json(&json!({
            "model": model_echo(&doc, v),
            "t": a.t,
            "cells": cells.iter().map(|(n, p)| json!({"n": n, "pmf": p})).collect::<Vec<_>>(),
            "warnings": warnings,
        })),
    };
    emit(&text, a.common.output.as_deref())?;
    Ok(warnings)
}

fn cmd_pgf(a: &PgfArgs) -> Outcome {
    let doc = load_model(a.common.model.as_deref())?;
    let v = a.variant.resolve(&doc)?;
    let u = parse_f64_list(&a.u)?;
    let g = variant_pgf(&v, &doc.rates, &u, a.t, &SeriesConfig::default())?;
    let warnings = g.quality.warnings();
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let head = csv_row((1..=u.len()).map(|i| format!("u{i}")).chain(["t".to_string(), "pgf".to_string()]));
            head + &csv_row(u.iter().map(|x| num(*x)).chain([num(a.t), num(g.value)]))
        }
        Format::Json => json(&json!({
            "model": model_echo(&doc, v), "t": a.t, "u": u, "pgf": g.value, "warnings": warnings,
        })),
    };
    emit(&text, a.common.output.as_deref())?;
    Ok(warnings)
}

fn cmd_levy(a: &LevyArgs) -> Outcome {
    let doc = load_model(a.common.model.as_deref())?;
    let v = a.variant.resolve(&doc)?;
    let upper = match &a.upper {
        Some(s) => parse_usize_list(s)?,
        None => doc.rates.ks(),
    };
    doc.rates.check_state(&upper)?;
    let holding = holding_rate(&v, &doc.rates)?;
    let mut cells = Vec::new();
    for n in mgcp::variants::box_cells(&upper).skip(1) {
        let m = variant_levy_measure(&v, &doc.rates, &n)?;
        cells.push((n, m));
    }
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = state_header(doc.rates.q(), "levy");
            for (n, m) in &cells {
                s += &state_row(n, num(*m));
            }
            s
        }
        Format::Json => json(&json!({
            "model": model_echo(&doc, v),
            "holding_rate": holding,
            "cells": cells.iter().map(|(n, m)| json!({"n": n, "levy": m})).collect::<Vec<_>>(),
        })),
    };
    emit(&text, a.common.output.as_deref())?;
    Ok(Vec::new())
}

fn cmd_moments(a: &MomentsArgs) -> Outcome {
    let doc = load_model(a.common.model.as_deref())?;
    let v = a.variant.resolve(&doc)?;
    doc.rates.check_component(a.i)?;
    doc.rates.check_component(a.l)?;
    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    let mut keep = |r: mgcp::Result<f64>, what: &str| match r {
        Ok(x) => Some(x),
        Err(e) => {
            notes.push(format!("{what}: {e}"));
            None
        }
    };
    let mean_i = keep(variant_mean(&v, &doc.rates, a.i, a.t), "mean_i");
    let mean_l = keep(variant_mean(&v, &doc.rates, a.l, a.t), "mean_l");
    let cov = keep(covariance(&v, &doc.rates, a.i, a.l, a.t), "covariance");
    let cod = match codifference(&v, &doc.rates, a.i, a.l, a.t, &SeriesConfig::default()) {
        Ok(c) => {
            warnings.extend(c.quality.warnings());
            Some(json!({"re": c.value.re, "im": c.value.im}))
        }
        Err(e) => {
            notes.push(format!("codifference: {e}"));
            None
        }
    };
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let f = |x: Option<f64>| x.map(num).unwrap_or_default();
            let (re, im) = cod
                .as_ref()
                .map(|c| (num(c["re"].as_f64().unwrap_or(f64::NAN)), num(c["im"].as_f64().unwrap_or(f64::NAN))))
                .unwrap_or_default();
            csv_row(["mean_i", "mean_l", "covariance", "codifference_re", "codifference_im"].map(String::from))
                + &csv_row([f(mean_i), f(mean_l), f(cov), re, im])
        }
        Format::Json => json(&json!({
            "model": model_echo(&doc, v), "t": a.t, "i": a.i, "l": a.l,
            "mean_i": mean_i, "mean_l": mean_l, "covariance": cov, "codifference": cod,
            "notes": notes, "warnings": warnings,
        })),
    };
    emit(&text, a.common.output.as_deref())?;
    Ok(warnings)
}

fn cmd_simulate(a: &SimulateArgs) -> Outcome {
    let doc = load_model(a.common.model.as_deref())?;
    let v = a.variant.resolve(&doc)?;
    let hist = sample_histogram(&v, &doc.rates, a.t, a.mc.samples, a.mc.seed, a.mc.workers)?;
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = state_header(doc.rates.q(), "count");
            for (n, c) in &hist {
                s += &state_row(n, c.to_string());
            }
            s
        }
        Format::Json => json(&json!({
            "model": model_echo(&doc, v), "t": a.t, "seed": a.mc.seed, "samples": a.mc.samples,
            "counts": hist.iter().map(|(n, c)| json!({"n": n, "count": c})).collect::<Vec<_>>(),
        })),
    };
    emit(&text, a.common.output.as_deref())?;
    Ok(Vec::new())
}

fn report_text(report: &EstimateReport, model: serde_json::Value, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = csv_row(["label", "empirical", "se", "analytic", "z"].map(String::from));
            for e in &report.estimates {
                s += &csv_row([
                    e.label.clone(),
                    num(e.empirical),
                    num(e.se),
                    e.analytic.map(num).unwrap_or_default(),
                    e.z.map(num).unwrap_or_default(),
                ]);
            }
            s
        }
        Format::Json => json(&json!({"model": model, "report": report})),
    }
}

fn cmd_estimate(a: &EstimateArgs) -> Outcome {
    let doc = load_model(a.common.model.as_deref())?;
    let v = a.variant.resolve(&doc)?;
    let (r, mc) = (&doc.rates, &a.mc);
    let report = match a.kind {
        EstimateKind::Pmf => {
            let upper = match &a.upper {
                Some(s) => parse_usize_list(s)?,
                None => pmf_box(r, a.t),
            };
            estimate_pmf(&v, r, a.t, &upper, mc.samples, mc.seed, mc.workers)?
        }
        EstimateKind::Covariance => estimate_covariance(&v, r, a.i, a.l, a.t, mc.samples, mc.seed, mc.workers)?,
        EstimateKind::Codifference => estimate_codifference(&v, r, a.i, a.l, a.t, mc.samples, mc.seed, mc.workers)?,
    };
    let model = serde_json::to_value(model_echo(&doc, v)).expect("model serializes");
    emit(&report_text(&report, model, a.common.format.unwrap_or(Format::Json)), a.common.output.as_deref())?;
    Ok(report.warnings.clone())
}

fn default_threshold(case: CurveCase) -> Option<ThresholdDist> {
    Some(match case {
        CurveCase::Fig1 => ThresholdDist::Geometric { p: 0.5 },
        CurveCase::Fig2 => ThresholdDist::Logarithmic { p: 0.5 },
        CurveCase::Fig3 => ThresholdDist::IncGamma { a: 0.0, p: 0.5 },
        CurveCase::Fig4 => ThresholdDist::SineIntegral { a: 0.0, p: 0.5 },
        CurveCase::General => return None,
    })
}

fn cmd_reliability(a: &ReliabilityArgs) -> Outcome {
    let case: CurveCase = a.case.parse()?;
    let doc = load_model(a.common.model.as_deref())?;
    let alpha = a.alpha.or(doc.alpha).ok_or("--alpha is required")?;
    let threshold = match &a.threshold {
        Some(s) => s.parse::<ThresholdDist>()?,
        None => doc.threshold.clone().or(default_threshold(case)).ok_or("--threshold is required")?,
    };
    let m = ShockModel::new(doc.rates.clone(), alpha, threshold)?;
    let grid = parse_grid(&a.tgrid)?;
    let echo = ModelDoc { rates: m.rates.clone(), variant: None, alpha: Some(m.alpha), threshold: Some(m.threshold.clone()) };
    if let Some(n) = a.samples {
        reliability_curve(&m, &[], case)?;
        let report = estimate_reliability(&m, &grid, n, a.seed, a.workers)?;
        let model = serde_json::to_value(&echo).expect("model serializes");
        emit(&report_text(&report, model, a.common.format.unwrap_or(Format::Json)), a.common.output.as_deref())?;
        return Ok(report.warnings.clone());
    }
    let curve = reliability_curve(&m, &grid, case)?;
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = csv_row(["t".to_string(), "L_T".to_string()]);
            for (t, l) in &curve {
                s += &csv_row([num(*t), num(*l)]);
            }
            s
        }
        Format::Json => json(&json!({
            "model": echo, "case": case,
            "curve": curve.iter().map(|(t, l)| json!({"t": t, "L_T": l})).collect::<Vec<_>>(),
        })),
    };
    emit(&text, a.common.output.as_deref())?;
    Ok(Vec::new())
}

fn cmd_presets(a: &PresetsArgs) -> Outcome {
    let wrap = |r: mgcp::RateMatrix| ModelDoc { rates: r, variant: None, alpha: None, threshold: None };
    let value = match a.name.as_deref() {
        None => json!({
            "fig1": wrap(model::figure_rates("fig1").expect("preset")),
            "fig2": wrap(model::figure_rates("fig2").expect("preset")),
        }),
        Some(name @ ("fig1" | "fig2")) => json!(wrap(model::figure_rates(name).expect("preset"))),
        Some(name @ ("order-k" | "polya-aeppli")) => {
            let ks = parse_usize_list(a.ks.as_deref().ok_or("--ks is required")?)?;
            let base = parse_f64_list(a.base.as_deref().ok_or("--base is required")?)?;
            let kind = if name == "order-k" {
                PresetKind::OrderK
            } else {
                PresetKind::PolyaAeppli { nu: a.nu.ok_or("--nu is required for polya-aeppli")? }
            };
            json!(wrap(preset_rates(kind, &ks, &base)?))
        }
        Some(other) => return Err(Failure::Validation(format!("unknown preset '{other}'"))),
    };
    emit(&json(&value), a.output.as_deref())?;
    Ok(Vec::new())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Pmf(a) => cmd_pmf(a),
        Command::Pgf(a) => cmd_pgf(a),
        Command::Levy(a) => cmd_levy(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Reliability(a) => cmd_reliability(a),
        Command::Presets(a) => cmd_presets(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(warnings) if warnings.is_empty() => ExitCode::SUCCESS,
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(3)
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
