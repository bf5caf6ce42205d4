//! Density sweeps and their CSV/JSON output.
//!
//! CSV layout, in this order:
//!
//! ```text
//! lambda, mean_delay_censored, ci_halfwidth, std_error, survival_at_tmax,
//! censored_count, realizations, tmax, capacity, capacity_per_bs,
//! capacity_per_mu, eta_measured, eta_used, mean_n0, resamples,
//! <one column per configured bound>, <one column per reference curve>,
//! strategy, coordination_k, antennas, seed
//! ```
//!
//! Lines starting with `#` before the header carry the tool version, the seed
//! and the full normalized configuration. JSON output holds the same rows as
//! objects, with `columns` giving the CSV order.

use std::io::Write;

use cellcap_core::arq_sim::simulate_delay;
use cellcap_core::bounds::{evaluate, BoundKind, BoundParams};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Setting, SweepConfig};
use crate::error::CliError;
use crate::reference::{emit_reference_curve, fit_exp_slope, ReferenceKind};

pub const TOOL: &str = "cellcap";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const BASE_COLUMNS: [&str; 15] = [
    "lambda",
    "mean_delay_censored",
    "ci_halfwidth",
    "std_error",
    "survival_at_tmax",
    "censored_count",
    "realizations",
    "tmax",
    "capacity",
    "capacity_per_bs",
    "capacity_per_mu",
    "eta_measured",
    "eta_used",
    "mean_n0",
    "resamples",
];

pub const ECHO_COLUMNS: [&str; 4] = ["strategy", "coordination_k", "antennas", "seed"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub mean_delay_censored: f64,
    pub ci_halfwidth: f64,
    pub std_error: f64,
    pub survival_at_tmax: f64,
    pub censored_count: u64,
    pub realizations: u64,
    pub tmax: u64,
    /// λ/E{D}.
    pub capacity: f64,
    pub capacity_per_bs: f64,
    pub capacity_per_mu: f64,
    pub eta_measured: f64,
    /// η handed to the bound evaluators.
    pub eta_used: f64,
    pub mean_n0: f64,
    pub resamples: u64,
    pub bounds: Vec<(String, f64)>,
    pub references: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

fn bound_params(cfg: &SweepConfig, lambda: f64, eta: f64) -> BoundParams<f64> {
    let mut p = BoundParams::from_config(&cfg.network(lambda), cfg.epsilon, eta);
    p.tau = cfg.tau;
    p.delta = cfg.bound_delta;
    p
}

/// Simulates every grid point and co-evaluates the configured bounds.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput, CliError> {
    cfg.validate()?;
    let kinds: Vec<BoundKind> = cfg.bound_kinds();
    let mut rows = cfg
        .grid
        .par_iter()
        .map(|&lambda| -> Result<SweepRow, CliError> {
            let st = simulate_delay(&cfg.scenario(lambda)?)?;
            let eta_used = match cfg.eta {
                Setting::Value(v) => v,
                Setting::Named(_) => st.eta_measured,
            };
            let params = bound_params(cfg, lambda, eta_used);
            let bounds = kinds
                .iter()
                .map(|&k| Ok((k.name(), evaluate(k, &params)?)))
                .collect::<Result<Vec<_>, cellcap_core::Error>>()?;
            Ok(SweepRow {
                lambda,
                mean_delay_censored: st.mean_censored,
                ci_halfwidth: st.ci_halfwidth,
                std_error: st.std_error(),
                survival_at_tmax: st.survival(st.max_slots),
                censored_count: st.censored_count,
                realizations: st.n,
                tmax: st.max_slots,
                capacity: st.capacity_network(),
                capacity_per_bs: st.capacity_per_bs(),
                capacity_per_mu: st.capacity_per_mu(),
                eta_measured: st.eta_measured,
                eta_used,
                mean_n0: st.mean_n0,
                resamples: st.resample_count,
                bounds,
                references: Vec::new(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    if !cfg.reference.is_empty() {
        let anchor = (rows[0].lambda, rows[0].mean_delay_censored);
        for name in &cfg.reference {
            let kind = if name == "poly" {
                ReferenceKind::Poly {
                    pathloss_exp: cfg.pathloss_exp,
                }
            } else {
                let lb: Vec<f64> = rows
                    .iter()
                    .map(|r| r.bounds.iter().find(|(n, _)| n == "lb_highdensity").map(|b| b.1).unwrap_or(f64::NAN))
                    .collect();
                let slope = if rows.len() >= 2 {
                    fit_exp_slope(&cfg.grid, &lb)
                } else {
                    std::f64::consts::PI * bound_params(cfg, rows[0].lambda, rows[0].eta_used).c2()
                };
                ReferenceKind::Exp { slope }
            };
            let curve = emit_reference_curve(kind, &cfg.grid, anchor)?;
            for (row, v) in rows.iter_mut().zip(curve) {
                row.references.push((kind.column().to_string(), v));
            }
        }
    }
    Ok(SweepOutput { config: cfg.clone(), rows })
}

impl SweepOutput {
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
        if let Some(r) = self.rows.first() {
            cols.extend(r.bounds.iter().map(|b| b.0.clone()));
            cols.extend(r.references.iter().map(|b| b.0.clone()));
        }
        cols.extend(ECHO_COLUMNS.iter().map(|s| s.to_string()));
        cols
    }

    fn row_values(&self, r: &SweepRow) -> Vec<Value> {
        let num = |v: f64| serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null);
        let mut out = vec![
            num(r.lambda),
            num(r.mean_delay_censored),
            num(r.ci_halfwidth),
            num(r.std_error),
            num(r.survival_at_tmax),
            Value::from(r.censored_count),
            Value::from(r.realizations),
            Value::from(r.tmax),
            num(r.capacity),
            num(r.capacity_per_bs),
            num(r.capacity_per_mu),
            num(r.eta_measured),
            num(r.eta_used),
            num(r.mean_n0),
            Value::from(r.resamples),
        ];
        out.extend(r.bounds.iter().map(|b| num(b.1)));
        out.extend(r.references.iter().map(|b| num(b.1)));
        out.push(Value::from(self.config.strategy.clone()));
        out.push(Value::from(self.config.coordination_k as u64));
        out.push(Value::from(self.config.antennas));
        out.push(Value::from(self.config.seed));
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), CliError> {
        let io = |e| CliError::io("writing csv", e);
        writeln!(w, "# {TOOL} {VERSION}").map_err(io)?;
        writeln!(w, "# seed = {}", self.config.seed).map_err(io)?;
        for line in self.config.to_toml().lines() {
            writeln!(w, "# config: {line}").map_err(io)?;
        }
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| CliError::io("writing csv", std::io::Error::other(e));
        out.write_record(self.columns()).map_err(csv_err)?;
        for r in &self.rows {
            let cells: Vec<String> = self
                .row_values(r)
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => s,
                    Value::Null => "NaN".into(),
                    other => other.to_string(),
                })
                .collect();
            out.write_record(&cells).map_err(csv_err)?;
        }
        out.flush().map_err(io)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Doc<'a> {
            tool: &'a str,
            version: &'a str,
            seed: u64,
            config: &'a SweepConfig,
            columns: Vec<String>,
            rows: Vec<Map<String, Value>>,
        }
        let columns = self.columns();
        let rows = self
            .rows
            .iter()
            .map(|r| columns.iter().cloned().zip(self.row_values(r)).collect::<Map<_, _>>())
            .collect();
        let doc = Doc {
            tool: TOOL,
            version: VERSION,
            seed: self.config.seed,
            config: &self.config,
            columns,
            rows,
        };
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| CliError::io("writing json", e.into()))?;
        writeln!(w).map_err(|e| CliError::io("writing json", e))
    }

    pub fn write<W: Write>(&self, w: W) -> Result<(), CliError> {
        if self.config.format == "json" {
            self.write_json(w)
        } else {
            self.write_csv(w)
        }
    }
}
