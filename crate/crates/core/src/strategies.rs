//! Per-slot transmission rules: which basestations transmit and at what power.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{pathloss, Decision, FadingModel};
use crate::error::{Error, Result};
use crate::geometry::{NetworkConfig, NetworkRealization};
use crate::quad::{bisect, integrate_to_inf, QuadOptions};
use crate::scalar::Scalar;
use crate::special;

/// Fading cutoff of the channel-inversion policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cutoff<T> {
    Fixed(T),
    /// Solve for the cutoff that meets the average power budget on each link.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StrategyKind<T> {
    /// Transmit w.p. `p` at power `power` regardless of distance.
    PureAloha { p: T, power: T },
    /// Power `power_scale·ℓ(d)^{−inversion}` with transmit probability
    /// min{p, M/P(d)}, so the average power never exceeds M.
    DistanceAloha { p: T, power_scale: T, inversion: T },
    /// Power c/ℓ(d) with c = M/(1 − ε), transmit probability M/P.
    PowerControl { epsilon: T },
    /// Transmit only when the fading gain clears the cutoff, with power
    /// `target/(ℓ(d)·h)` so the received signal equals `target` (= γβ).
    CsitThreshold { cutoff: Cutoff<T>, target: T, fading: FadingModel },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strategy<T> {
    pub kind: StrategyKind<T>,
    /// Average power constraint M.
    pub avg_power: T,
    /// τ ≥ 1: average power per slot must lie in [M/τ, M].
    pub tau_floor: T,
    pub pathloss_exp: T,
}

/// Resolved per-link rule for a fixed served distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkPlan<T> {
    Bernoulli { p: T, power: T },
    Threshold { delta: T, target: T, gain: T },
}

impl<T: Scalar> LinkPlan<T> {
    /// `h` is the fading gain on the served link, needed only by threshold plans.
    pub fn decide<R: Rng + ?Sized>(&self, h: Option<T>, rng: &mut R) -> Result<Decision<T>> {
        match *self {
            LinkPlan::Bernoulli { p, power } => Ok(Decision {
                transmit: T::sample_open01(rng) < p,
                power,
            }),
            LinkPlan::Threshold { delta, target, gain } => {
                let h = h.ok_or_else(|| Error::Contract("threshold policy needs the served-link fading gain".into()))?;
                if h >= delta && h > T::zero() {
                    Ok(Decision {
                        transmit: true,
                        power: target / (gain * h),
                    })
                } else {
                    Ok(Decision::silent())
                }
            }
        }
    }

    pub fn needs_fading(&self) -> bool {
        matches!(self, LinkPlan::Threshold { .. })
    }

    /// Probability of transmitting in a slot; `fading` is the served-link law.
    pub fn transmit_prob(&self, fading: FadingModel) -> T {
        match *self {
            LinkPlan::Bernoulli { p, .. } => p,
            LinkPlan::Threshold { delta, .. } => fading.survival(delta),
        }
    }
}

/// Outcome of solving the average-power equation for the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRegime<T> {
    Cutoff(T),
    /// Budget suffices to invert every fade: cutoff 0 and zero outage.
    FullInversion,
}

impl<T: Scalar> ThresholdRegime<T> {
    pub fn delta(&self) -> T {
        match *self {
            ThresholdRegime::Cutoff(d) => d,
            ThresholdRegime::FullInversion => T::zero(),
        }
    }
}

impl<T: Scalar> Strategy<T> {
    pub fn new(kind: StrategyKind<T>, cfg: &NetworkConfig<T>) -> Self {
        Strategy {
            kind,
            avg_power: cfg.avg_power,
            tau_floor: T::one(),
            pathloss_exp: cfg.pathloss_exp,
        }
    }

    pub fn power_control(epsilon: T, cfg: &NetworkConfig<T>) -> Self {
        Self::new(StrategyKind::PowerControl { epsilon }, cfg)
    }

    pub fn pure_aloha(p: T, power: T, cfg: &NetworkConfig<T>) -> Self {
        Self::new(StrategyKind::PureAloha { p, power }, cfg)
    }

    /// Channel inversion towards γβ with automatically solved cutoffs.
    pub fn csit_threshold(cfg: &NetworkConfig<T>, fading: FadingModel) -> Self {
        Self::new(
            StrategyKind::CsitThreshold {
                cutoff: Cutoff::Auto,
                target: cfg.proc_gain * cfg.sinr_threshold,
                fading,
            },
            cfg,
        )
    }

    pub fn validate(&self, cfg: &NetworkConfig<T>) -> Result<()> {
        let m = self.avg_power;
        if !(m.is_finite() && m > T::zero()) {
            return Err(Error::config("avg_power", "must be positive"));
        }
        if !(self.tau_floor >= T::one()) {
            return Err(Error::config("tau", "must be at least 1"));
        }
        let slack = T::one() + T::lit(1e-12);
        match self.kind {
            StrategyKind::PureAloha { p, power } => {
                if !(p > T::zero() && p <= T::one()) {
                    return Err(Error::config("aloha_p", "must lie in (0, 1]"));
                }
                if !(power > T::zero()) {
                    return Err(Error::config("aloha_power", "must be positive"));
                }
                if p * power > m * slack {
                    return Err(Error::config("aloha_power", format!("p·P = {} exceeds the average power M = {m}", p * power)));
                }
                if p * power * self.tau_floor * slack < m {
                    return Err(Error::config("aloha_power", format!("p·P = {} is below M/τ", p * power)));
                }
            }
            StrategyKind::DistanceAloha { p, power_scale, inversion } => {
                if !(p > T::zero() && p <= T::one()) {
                    return Err(Error::config("aloha_p", "must lie in (0, 1]"));
                }
                if !(power_scale > T::zero()) {
                    return Err(Error::config("aloha_power", "must be positive"));
                }
                if !(inversion >= T::zero()) {
                    return Err(Error::config("aloha_inversion", "must be non-negative"));
                }
            }
            StrategyKind::PowerControl { epsilon } => {
                if !(epsilon > T::zero() && epsilon < T::one()) {
                    return Err(Error::config("epsilon", "must lie in (0, 1)"));
                }
                let kappa = cfg.sinr_threshold * cfg.proc_gain * (T::one() - epsilon);
                if kappa >= T::one() {
                    return Err(Error::config(
                        "epsilon",
                        format!("power control needs beta*gamma*(1-epsilon) < 1, got {kappa}"),
                    ));
                }
            }
            StrategyKind::CsitThreshold { cutoff, target, .. } => {
                if !(target > T::zero()) {
                    return Err(Error::config("csit_target", "must be positive"));
                }
                if let Cutoff::Fixed(d) = cutoff {
                    if !(d >= T::zero()) {
                        return Err(Error::config("csit_delta", "must be non-negative"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolves the rule for a link of length `d`.
    pub fn plan(&self, d: T) -> Result<LinkPlan<T>> {
        self.plan_for_gain(pathloss(d, self.pathloss_exp))
    }

    /// Resolves the rule for a link with path gain `gain` = ℓ(d).
    pub fn plan_for_gain(&self, gain: T) -> Result<LinkPlan<T>> {
        let m = self.avg_power;
        Ok(match self.kind {
            StrategyKind::PureAloha { p, power } => LinkPlan::Bernoulli { p, power },
            StrategyKind::DistanceAloha { p, power_scale, inversion } => {
                let power = power_scale * gain.powf(-inversion);
                LinkPlan::Bernoulli {
                    p: p.min(m / power),
                    power,
                }
            }
            StrategyKind::PowerControl { epsilon } => {
                let c = m / (T::one() - epsilon);
                let power = c / gain;
                LinkPlan::Bernoulli { p: m / power, power }
            }
            StrategyKind::CsitThreshold { cutoff, target, fading } => {
                let delta = match cutoff {
                    Cutoff::Fixed(d) => d,
                    Cutoff::Auto => solve_threshold_target(m, target, gain, fading)?.delta(),
                };
                LinkPlan::Threshold { delta, target, gain }
            }
        })
    }
}

/// One slot's decision for a basestation serving a user at distance `d`.
pub fn decide<T: Scalar, R: Rng + ?Sized>(strategy: &Strategy<T>, d: T, h: Option<T>, rng: &mut R) -> Result<Decision<T>> {
    strategy.plan(d)?.decide(h, rng)
}

/// Average power ∫_δ^∞ (target/(ℓ·x)) f(x) dx of the inversion policy, by quadrature.
pub fn threshold_power<T: Scalar>(delta: T, target: T, gain: T, fading: FadingModel) -> Result<T> {
    let scale = target / gain;
    let r = integrate_to_inf(
        |x: T| if x > T::zero() { fading.pdf(x) / x } else { T::zero() },
        delta,
        &QuadOptions::default(),
    )?;
    Ok(scale * r.value)
}

/// Cutoff δ meeting the average power budget M for target γβ and path gain ℓd.
pub fn solve_threshold<T: Scalar>(
    avg_power: T,
    beta: T,
    proc_gain: T,
    gain: T,
    fading: FadingModel,
) -> Result<ThresholdRegime<T>> {
    solve_threshold_target(avg_power, proc_gain * beta, gain, fading)
}

fn solve_threshold_target<T: Scalar>(m: T, target: T, gain: T, fading: FadingModel) -> Result<ThresholdRegime<T>> {
    if !(m > T::zero() && target > T::zero() && gain > T::zero()) {
        return Err(Error::Domain("threshold needs positive power, target and gain".into()));
    }
    let scale = target / gain;
    let ratio = m / scale;
    match fading {
        FadingModel::StrongerScalar => {
            // ∫_δ^∞ (target/(ℓx)) x e^{-x} dx = (target/ℓ) e^{-δ}
            if ratio >= T::one() {
                Ok(ThresholdRegime::FullInversion)
            } else {
                Ok(ThresholdRegime::Cutoff(-ratio.ln()))
            }
        }
        FadingModel::ExpUnit | FadingModel::ChiSq { n_ant: 1 } => {
            // (target/ℓ) E1(δ) = M; E1 is infinite at 0 so a cutoff always exists
            let f = |d: T| special::exp_integral_e1(d) - ratio;
            let mut hi = T::one();
            while f(hi) > T::zero() {
                hi = hi + hi;
            }
            let lo = T::min_positive_value();
            Ok(ThresholdRegime::Cutoff(bisect(f, lo, hi, T::tol_floor())?))
        }
        _ => {
            let at_zero = threshold_power(T::zero(), target, gain, fading)?;
            if at_zero <= m {
                return Ok(ThresholdRegime::FullInversion);
            }
            let g = |d: T| threshold_power(d, target, gain, fading).unwrap_or(T::nan()) - m;
            let mut hi = T::one();
            while g(hi) > T::zero() {
                hi = hi + hi;
            }
            Ok(ThresholdRegime::Cutoff(bisect(g, T::zero(), hi, T::lit(1e-12).max(T::tol_floor()))?))
        }
    }
}

/// P(h ≥ δ) under `fading`: the per-slot success probability of the inversion policy.
pub fn success_prob_threshold<T: Scalar>(delta: T, fading: FadingModel) -> T {
    fading.survival(delta)
}

/// For each basestation, the distance to the user it serves this slot.
///
/// Active non-serving basestations pick one of their users uniformly; the
/// serving basestation (busy with the typical user) and empty cells are `None`.
pub fn interferer_assignment<T: Scalar, R: Rng + ?Sized>(real: &NetworkRealization<T>, rng: &mut R) -> Vec<Option<T>> {
    (0..real.bs_count())
        .map(|b| {
            let cell = real.cell(b);
            if b == real.serving || cell.is_empty() {
                None
            } else {
                let pick = rng.random_range(0..cell.len());
                Some(real.link_distance(cell[pick]))
            }
        })
        .collect()
}
