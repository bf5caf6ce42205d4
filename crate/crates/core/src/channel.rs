//! Path loss, fading laws and per-slot SINR at the typical user.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_realization, NetworkConfig, NetworkRealization};
use crate::quad::{integrate_to_inf, QuadOptions};
use crate::rng::{self, Purpose};
use crate::scalar::Scalar;
use crate::special;
use crate::stats::Moments;

/// Distribution of a power fading gain |h|².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FadingModel {
    /// EXP(1), Rayleigh fading.
    ExpUnit,
    /// PDF x·e^{−x}; stochastically dominates `ExpUnit`.
    StrongerScalar,
    /// Beamforming gain with `n_ant` antennas: chi-square with 2·n_ant degrees
    /// of freedom at unit per-antenna power, PDF x^{N−1}e^{−x}/(N−1)!.
    ChiSq { n_ant: u32 },
    /// PDF ∝ x·e^{−x/N}, normalised numerically.
    StrongerVector { n_ant: u32 },
}

impl FadingModel {
    pub fn sample<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            FadingModel::ExpUnit => T::sample_exp1(rng),
            FadingModel::StrongerScalar => T::sample_exp1(rng) + T::sample_exp1(rng),
            FadingModel::ChiSq { n_ant } => (0..n_ant).fold(T::zero(), |s, _| s + T::sample_exp1(rng)),
            FadingModel::StrongerVector { n_ant } => {
                T::lit(f64::from(n_ant)) * (T::sample_exp1(rng) + T::sample_exp1(rng))
            }
        }
    }

    /// Normalising constant of the density. Closed form for all but the
    /// stronger vector law, whose constant comes from quadrature.
    pub fn normalizer<T: Scalar>(&self) -> T {
        match *self {
            FadingModel::ExpUnit | FadingModel::StrongerScalar => T::one(),
            FadingModel::ChiSq { n_ant } => (-special::ln_factorial::<T>(n_ant - 1)).exp(),
            FadingModel::StrongerVector { n_ant } => {
                let n = T::lit(f64::from(n_ant));
                let mass = integrate_to_inf(|x: T| x * (-x / n).exp(), T::zero(), &QuadOptions::default())
                    .map(|r| r.value)
                    .unwrap_or(n * n);
                T::one() / mass
            }
        }
    }

    pub fn pdf<T: Scalar>(&self, x: T) -> T {
        if x < T::zero() {
            return T::zero();
        }
        match *self {
            FadingModel::ExpUnit => (-x).exp(),
            FadingModel::StrongerScalar => x * (-x).exp(),
            FadingModel::ChiSq { n_ant } => {
                if n_ant == 1 {
                    (-x).exp()
                } else if x == T::zero() {
                    T::zero()
                } else {
                    (T::lit(f64::from(n_ant - 1)) * x.ln() - x - special::ln_factorial::<T>(n_ant - 1)).exp()
                }
            }
            FadingModel::StrongerVector { n_ant } => {
                let n = T::lit(f64::from(n_ant));
                self.normalizer::<T>() * x * (-x / n).exp()
            }
        }
    }

    /// P(h ≥ x).
    pub fn survival<T: Scalar>(&self, x: T) -> T {
        if x <= T::zero() {
            return T::one();
        }
        match *self {
            FadingModel::ExpUnit => (-x).exp(),
            FadingModel::StrongerScalar => (T::one() + x) * (-x).exp(),
            FadingModel::ChiSq { n_ant } => special::gamma_q_int(n_ant, x),
            FadingModel::StrongerVector { n_ant } => {
                let z = x / T::lit(f64::from(n_ant));
                (T::one() + z) * (-z).exp()
            }
        }
    }

    pub fn cdf<T: Scalar>(&self, x: T) -> T {
        T::one() - self.survival(x)
    }

    pub fn mean<T: Scalar>(&self) -> T {
        match *self {
            FadingModel::ExpUnit => T::one(),
            FadingModel::StrongerScalar => T::lit(2.0),
            FadingModel::ChiSq { n_ant } => T::lit(f64::from(n_ant)),
            FadingModel::StrongerVector { n_ant } => T::lit(2.0 * f64::from(n_ant)),
        }
    }
}

/// Draws one gain from `model`.
pub fn draw_fading<T: Scalar, R: Rng + ?Sized>(model: FadingModel, rng: &mut R) -> T {
    model.sample(rng)
}

/// Non-amplifying path gain min{1, d^{−α}}.
#[inline]
pub fn pathloss<T: Scalar>(d: T, alpha: T) -> T {
    if d <= T::one() {
        T::one()
    } else {
        d.powf(-alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGain<T> {
    pub gain: T,
    /// Set when the amplifying model hit its cap at d = 0.
    pub capped: bool,
}

/// Path gain under either model. The amplifying law d^{−α} is only meant for
/// comparisons with the unbounded-gain literature model.
pub fn pathloss_with<T: Scalar>(d: T, alpha: T, amplifying: bool) -> PathGain<T> {
    if !amplifying {
        return PathGain {
            gain: pathloss(d, alpha),
            capped: false,
        };
    }
    let cap = T::max_value().sqrt();
    let g = d.powf(-alpha);
    if !g.is_finite() || g > cap {
        PathGain { gain: cap, capped: true }
    } else {
        PathGain { gain: g, capped: false }
    }
}

/// What one basestation does in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Decision<T> {
    pub transmit: bool,
    pub power: T,
}

impl<T: Scalar> Decision<T> {
    pub fn silent() -> Self {
        Decision {
            transmit: false,
            power: T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome<T> {
    pub signal_power: T,
    /// Σ P_z h_z ℓ(|z|) over transmitting, non-serving, non-silenced basestations.
    pub interference: T,
    pub sinr: T,
    pub success: bool,
    pub transmitted: bool,
}

/// Variations on the link model used by the specialised experiments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SinrOptions {
    /// Use d^{−α} instead of min{1, d^{−α}}.
    pub amplifying: bool,
    /// Force ℓ(d0) = 1 on the serving link.
    pub unit_serving_gain: bool,
    /// Ignore additive noise.
    pub drop_noise: bool,
}

/// SINR at the typical user for one slot,
/// P_s h_s ℓ(d0) 1_s / (γ Σ_z P_z 1_z h_z ℓ(|z|) + N).
///
/// `decisions`, `fading` and `silenced` are indexed by basestation.
pub fn compute_sinr<T: Scalar>(
    real: &NetworkRealization<T>,
    decisions: &[Decision<T>],
    fading: &[T],
    cfg: &NetworkConfig<T>,
    silenced: &[bool],
    opts: &SinrOptions,
) -> Result<SlotOutcome<T>> {
    let n = real.bs_count();
    if decisions.len() != n || fading.len() != n || silenced.len() != n {
        return Err(Error::Contract(format!(
            "per-basestation inputs must have length {n}"
        )));
    }
    let s = real.serving;
    if silenced[s] {
        return Err(Error::Contract("the serving basestation cannot be silenced".into()));
    }
    let alpha = cfg.pathloss_exp;
    let mut interference = T::zero();
    for z in 0..n {
        if z == s || silenced[z] || !decisions[z].transmit {
            continue;
        }
        let g = pathloss_with(real.bs_dist[z], alpha, opts.amplifying).gain;
        interference += decisions[z].power * fading[z] * g;
    }
    let serving_gain = if opts.unit_serving_gain {
        T::one()
    } else {
        pathloss_with(real.typical_d0, alpha, opts.amplifying).gain
    };
    let transmitted = decisions[s].transmit;
    let signal_power = if transmitted {
        decisions[s].power * fading[s] * serving_gain
    } else {
        T::zero()
    };
    let noise = if opts.drop_noise { T::zero() } else { cfg.noise };
    Ok(outcome(signal_power, interference, cfg.proc_gain, noise, cfg.sinr_threshold, transmitted))
}

#[inline]
pub(crate) fn outcome<T: Scalar>(
    signal_power: T,
    interference: T,
    proc_gain: T,
    noise: T,
    threshold: T,
    transmitted: bool,
) -> SlotOutcome<T> {
    let denom = proc_gain * interference + noise;
    let sinr = if signal_power <= T::zero() {
        T::zero()
    } else if denom <= T::zero() {
        T::infinity()
    } else {
        signal_power / denom
    };
    SlotOutcome {
        signal_power,
        interference,
        sinr,
        success: transmitted && sinr > threshold,
        transmitted,
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub std_error: T,
    pub n: u64,
}

impl<T: Scalar> Estimate<T> {
    pub(crate) fn from_moments(m: &Moments) -> Self {
        Estimate {
            value: T::lit(m.mean),
            std_error: T::lit(m.std_error()),
            n: m.n,
        }
    }

    /// |a − b| in units of the combined standard error.
    pub fn z_distance(&self, other: &Estimate<T>) -> T {
        let se = (self.std_error * self.std_error + other.std_error * other.std_error).sqrt();
        (self.value - other.value).abs() / se
    }
}

/// One-shot connection probability P(SINR > β) when every basestation
/// transmits at power M with EXP(1) fading, over `n_real` deployments.
pub fn one_shot_connection_prob<T: Scalar>(
    cfg: &NetworkConfig<T>,
    amplifying: bool,
    n_real: u64,
    seed: u64,
) -> Result<Estimate<T>> {
    let mut geo = *cfg;
    // users play no role when every basestation is on
    geo.mu_density = T::zero();
    let opts = SinrOptions {
        amplifying,
        ..SinrOptions::default()
    };
    let mut m = Moments::default();
    for i in 0..n_real {
        let real = sample_realization(&geo, seed, i)?;
        let mut rng = rng::stream(seed, i, Purpose::Slots);
        let n = real.bs_count();
        let decisions = vec![
            Decision {
                transmit: true,
                power: cfg.avg_power
            };
            n
        ];
        let fading: Vec<T> = (0..n).map(|_| T::sample_exp1(&mut rng)).collect();
        let out = compute_sinr(&real, &decisions, &fading, cfg, &vec![false; n], &opts)?;
        m.push(if out.success { 1.0 } else { 0.0 });
    }
    Ok(Estimate::from_moments(&m))
}
