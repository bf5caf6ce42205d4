//! Flat key/value sweep configuration.
//!
//! Every key is optional; missing keys take the defaults listed in
//! [`SweepConfig::default`]. Unknown keys are rejected.

use cellcap_core::arq_sim::{Engine, SimScenario};
use cellcap_core::bounds::BoundKind;
use cellcap_core::channel::FadingModel;
use cellcap_core::geometry::NetworkConfig;
use cellcap_core::strategies::{Cutoff, Strategy, StrategyKind};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A number or one of a few named settings such as `"auto"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Setting {
    Value(f64),
    Named(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    strategy: Option<String>,
    grid: Option<Vec<f64>>,
    mu_density_ratio: Option<f64>,
    pathloss_exp: Option<f64>,
    sinr_threshold: Option<f64>,
    proc_gain: Option<f64>,
    noise: Option<f64>,
    avg_power: Option<f64>,
    antennas: Option<u32>,
    window_mean_points: Option<f64>,
    epsilon: Option<f64>,
    aloha_p: Option<f64>,
    aloha_power: Option<f64>,
    aloha_inversion: Option<f64>,
    tau: Option<f64>,
    csit_fading: Option<String>,
    csit_delta: Option<Setting>,
    coordination_k: Option<usize>,
    enhanced_mode: Option<bool>,
    engine: Option<String>,
    tmax: Option<u64>,
    realizations: Option<u64>,
    seed: Option<u64>,
    bounds: Option<Vec<String>>,
    eta: Option<Setting>,
    bound_delta: Option<f64>,
    reference: Option<Vec<String>>,
    format: Option<String>,
}

/// Fully resolved configuration. Serializes back to the same flat format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub strategy: String,
    pub grid: Vec<f64>,
    pub mu_density_ratio: f64,
    pub pathloss_exp: f64,
    pub sinr_threshold: f64,
    pub proc_gain: f64,
    pub noise: f64,
    pub avg_power: f64,
    pub antennas: u32,
    pub window_mean_points: f64,
    pub epsilon: f64,
    pub aloha_p: f64,
    pub aloha_power: f64,
    pub aloha_inversion: f64,
    pub tau: f64,
    pub csit_fading: String,
    pub csit_delta: Setting,
    pub coordination_k: usize,
    pub enhanced_mode: bool,
    pub engine: String,
    pub tmax: u64,
    pub realizations: u64,
    pub seed: u64,
    pub bounds: Vec<String>,
    pub eta: Setting,
    pub bound_delta: f64,
    pub reference: Vec<String>,
    pub format: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            strategy: "power_control".into(),
            grid: vec![1.0],
            mu_density_ratio: 10.0,
            pathloss_exp: 3.0,
            sinr_threshold: 1.0,
            proc_gain: 1.0,
            noise: 1.0,
            avg_power: 1.0,
            antennas: 1,
            window_mean_points: 200.0,
            epsilon: 0.5,
            aloha_p: 0.5,
            aloha_power: 2.0,
            aloha_inversion: 0.0,
            tau: 1.0,
            csit_fading: "exp".into(),
            csit_delta: Setting::Named("auto".into()),
            coordination_k: 0,
            enhanced_mode: false,
            engine: "auto".into(),
            tmax: 10_000,
            realizations: 10_000,
            seed: 0,
            bounds: Vec::new(),
            eta: Setting::Named("measured".into()),
            bound_delta: 0.0,
            reference: Vec::new(),
            format: "csv".into(),
        }
    }
}

pub const STRATEGIES: [&str; 4] = ["power_control", "pure_aloha", "distance_aloha", "csit_threshold"];
pub const BOUND_NAMES: [&str; 5] = ["lb_lowdensity", "lb_highdensity", "lb_csir", "ub_powercontrol", "lb_coordination"];

fn err(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Parses a configuration file's text, fills defaults and checks every
/// invariant. Errors name the offending key.
pub fn parse_config(text: &str) -> Result<SweepConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let key = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.starts_with("unknown field"))
            .unwrap_or("<file>")
            .to_string();
        CliError::Config { key, reason: msg }
    })?;
    let d = SweepConfig::default();
    let cfg = SweepConfig {
        strategy: raw.strategy.unwrap_or(d.strategy),
        grid: raw.grid.unwrap_or(d.grid),
        mu_density_ratio: raw.mu_density_ratio.unwrap_or(d.mu_density_ratio),
        pathloss_exp: raw.pathloss_exp.unwrap_or(d.pathloss_exp),
        sinr_threshold: raw.sinr_threshold.unwrap_or(d.sinr_threshold),
        proc_gain: raw.proc_gain.unwrap_or(d.proc_gain),
        noise: raw.noise.unwrap_or(d.noise),
        avg_power: raw.avg_power.unwrap_or(d.avg_power),
        antennas: raw.antennas.unwrap_or(d.antennas),
        window_mean_points: raw.window_mean_points.unwrap_or(d.window_mean_points),
        epsilon: raw.epsilon.unwrap_or(d.epsilon),
        aloha_p: raw.aloha_p.unwrap_or(d.aloha_p),
        aloha_power: raw.aloha_power.unwrap_or(d.aloha_power),
        aloha_inversion: raw.aloha_inversion.unwrap_or(d.aloha_inversion),
        tau: raw.tau.unwrap_or(d.tau),
        csit_fading: raw.csit_fading.unwrap_or(d.csit_fading),
        csit_delta: raw.csit_delta.unwrap_or(d.csit_delta),
        coordination_k: raw.coordination_k.unwrap_or(d.coordination_k),
        enhanced_mode: raw.enhanced_mode.unwrap_or(d.enhanced_mode),
        engine: raw.engine.unwrap_or(d.engine),
        tmax: raw.tmax.unwrap_or(d.tmax),
        realizations: raw.realizations.unwrap_or(d.realizations),
        seed: raw.seed.unwrap_or(d.seed),
        bounds: raw.bounds.unwrap_or(d.bounds),
        eta: raw.eta.unwrap_or(d.eta),
        bound_delta: raw.bound_delta.unwrap_or(d.bound_delta),
        reference: raw.reference.unwrap_or(d.reference),
        format: raw.format.unwrap_or(d.format),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !STRATEGIES.contains(&self.strategy.as_str()) {
            return Err(err("strategy", format!("unknown strategy {:?}; expected one of {STRATEGIES:?}", self.strategy)));
        }
        if self.grid.is_empty() {
            return Err(err("grid", "must list at least one density"));
        }
        if self.grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(err("grid", "densities must be positive"));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(err("grid", "must be strictly increasing"));
        }
        if !(self.mu_density_ratio >= 0.0) {
            return Err(err("mu_density_ratio", "must be non-negative"));
        }
        if self.realizations < 1 {
            return Err(err("realizations", "must be at least 1"));
        }
        if self.tmax < 1 {
            return Err(err("tmax", "must be at least 1"));
        }
        for b in &self.bounds {
            if !BOUND_NAMES.contains(&b.as_str()) {
                return Err(err("bounds", format!("unknown bound {b:?}; expected any of {BOUND_NAMES:?}")));
            }
        }
        for r in &self.reference {
            if r != "poly" && r != "exp" {
                return Err(err("reference", format!("unknown reference curve {r:?}; expected \"poly\" or \"exp\"")));
            }
        }
        if self.reference.iter().any(|r| r == "exp") && !self.bounds.iter().any(|b| b == "lb_highdensity") {
            return Err(err("reference", "the exp reference takes its slope from lb_highdensity; add it to bounds"));
        }
        if self.format != "csv" && self.format != "json" {
            return Err(err("format", "must be \"csv\" or \"json\""));
        }
        match &self.eta {
            Setting::Named(s) if s == "measured" => {}
            Setting::Value(v) if (0.0..=1.0).contains(v) => {}
            _ => return Err(err("eta", "must be \"measured\" or a number in [0, 1]")),
        }
        match &self.csit_delta {
            Setting::Named(s) if s == "auto" => {}
            Setting::Value(v) if *v >= 0.0 => {}
            _ => return Err(err("csit_delta", "must be \"auto\" or a non-negative number")),
        }
        if !(self.bound_delta >= 0.0 && self.bound_delta.is_finite()) {
            return Err(err("bound_delta", "must be finite and non-negative"));
        }
        self.fading()?;
        self.engine()?;
        for &lam in &self.grid {
            self.scenario(lam)?.validate().map_err(CliError::from)?;
        }
        Ok(())
    }

    fn fading(&self) -> Result<FadingModel, CliError> {
        let n_ant = self.antennas;
        match self.csit_fading.as_str() {
            "exp" => Ok(FadingModel::ExpUnit),
            "stronger" => Ok(FadingModel::StrongerScalar),
            "chisq" => Ok(FadingModel::ChiSq { n_ant }),
            "stronger_vector" => Ok(FadingModel::StrongerVector { n_ant }),
            other => Err(err(
                "csit_fading",
                format!("unknown fading law {other:?}; expected exp, stronger, chisq or stronger_vector"),
            )),
        }
    }

    fn engine(&self) -> Result<Engine, CliError> {
        match self.engine.as_str() {
            "auto" => Ok(Engine::Auto),
            "slots" => Ok(Engine::Slots),
            "geometric" => Ok(Engine::Geometric),
            other => Err(err("engine", format!("unknown engine {other:?}; expected auto, slots or geometric"))),
        }
    }

    pub fn network(&self, bs_density: f64) -> NetworkConfig<f64> {
        NetworkConfig {
            bs_density,
            mu_density: self.mu_density_ratio * bs_density,
            pathloss_exp: self.pathloss_exp,
            sinr_threshold: self.sinr_threshold,
            proc_gain: self.proc_gain,
            noise: self.noise,
            avg_power: self.avg_power,
            antennas: self.antennas,
            window_mean_points: self.window_mean_points,
        }
    }

    pub fn strategy(&self, cfg: &NetworkConfig<f64>) -> Result<Strategy<f64>, CliError> {
        let kind = match self.strategy.as_str() {
            "power_control" => StrategyKind::PowerControl { epsilon: self.epsilon },
            "pure_aloha" => StrategyKind::PureAloha {
                p: self.aloha_p,
                power: self.aloha_power,
            },
            "distance_aloha" => StrategyKind::DistanceAloha {
                p: self.aloha_p,
                power_scale: self.aloha_power,
                inversion: self.aloha_inversion,
            },
            _ => StrategyKind::CsitThreshold {
                cutoff: match self.csit_delta {
                    Setting::Value(v) => Cutoff::Fixed(v),
                    Setting::Named(_) => Cutoff::Auto,
                },
                target: cfg.proc_gain * cfg.sinr_threshold,
                fading: self.fading()?,
            },
        };
        let mut s = Strategy::new(kind, cfg);
        s.tau_floor = self.tau;
        Ok(s)
    }

    /// The simulation scenario at one density of the grid.
    pub fn scenario(&self, bs_density: f64) -> Result<SimScenario<f64>, CliError> {
        let cfg = self.network(bs_density);
        let mut s = SimScenario::new(cfg, self.strategy(&cfg)?);
        s.coordination_k = self.coordination_k;
        s.enhanced_mode = self.enhanced_mode;
        s.max_slots = self.tmax;
        s.n_realizations = self.realizations;
        s.seed = self.seed;
        s.engine = self.engine()?;
        Ok(s)
    }

    pub fn bound_kinds(&self) -> Vec<BoundKind> {
        self.bounds
            .iter()
            .map(|b| match b.as_str() {
                "lb_lowdensity" => BoundKind::LbLowDensity,
                "lb_highdensity" => BoundKind::LbHighDensity,
                "lb_csir" => BoundKind::LbCsir,
                "ub_powercontrol" => BoundKind::UbPowerControl,
                // the first interferer left active is the (k+2)-th nearest basestation
                _ => BoundKind::LbCoordination {
                    k: self.coordination_k as u32 + 1,
                },
            })
            .collect()
    }

    /// Normalized echo in the input format.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }
}

/// Presets shipped with the tool.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "fig3" => Some(include_str!("../presets/fig3.toml")),
        "fig4" => Some(include_str!("../presets/fig4.toml")),
        "fig5" => Some(include_str!("../presets/fig5.toml")),
        "fig6" => Some(include_str!("../presets/fig6.toml")),
        _ => None,
    }
}
