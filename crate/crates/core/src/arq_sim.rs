//! Time-slotted ARQ simulation of the typical user's delay
//! D = min{t : SINR(t) > β}.
//!
//! Two engines produce the same law of D:
//!
//! * [`Engine::Slots`] draws every slot explicitly: the user each interferer
//!   serves, every transmit decision and every fading gain.
//! * [`Engine::Geometric`] uses that, given the deployment, slots are i.i.d.:
//!   D is geometric with a per-slot success probability that has a closed
//!   product form when no decision depends on fading. It computes that
//!   probability exactly and draws D directly, which makes very long
//!   censoring horizons affordable.
//!
//! [`Engine::Auto`] picks the geometric engine whenever it applies.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{outcome, pathloss, Decision, FadingModel, SlotOutcome};
use crate::error::{Error, Result};
use crate::geometry::{sample_realization, NetworkConfig, NetworkRealization};
use crate::rng::{self, Purpose, SimRng};
use crate::scalar::Scalar;
use crate::stats::Moments;
use crate::strategies::{LinkPlan, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Engine {
    #[default]
    Auto,
    Slots,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimScenario<T> {
    pub cfg: NetworkConfig<T>,
    /// Rule of the serving basestation (and of every other one unless
    /// `interferer_strategy` overrides it).
    pub strategy: Strategy<T>,
    pub interferer_strategy: Option<Strategy<T>>,
    /// Number of nearest non-serving basestations kept silent.
    pub coordination_k: usize,
    /// Lower-bound network: unit gain on the typical link, no noise, and
    /// every other basestation plans as if its users were at unit gain.
    pub enhanced_mode: bool,
    /// Censoring horizon T_max.
    pub max_slots: u64,
    pub n_realizations: u64,
    pub seed: u64,
    pub engine: Engine,
}

impl<T: Scalar> SimScenario<T> {
    pub fn new(cfg: NetworkConfig<T>, strategy: Strategy<T>) -> Self {
        SimScenario {
            cfg,
            strategy,
            interferer_strategy: None,
            coordination_k: 0,
            enhanced_mode: false,
            max_slots: 10_000,
            n_realizations: 10_000,
            seed: 0,
            engine: Engine::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.strategy.validate(&self.cfg)?;
        if let Some(s) = &self.interferer_strategy {
            s.validate(&self.cfg)?;
        }
        if self.max_slots < 1 {
            return Err(Error::config("max_slots", "must be at least 1"));
        }
        if self.n_realizations < 1 {
            return Err(Error::config("n_realizations", "must be at least 1"));
        }
        if T::from_usize_lossy(self.coordination_k) >= self.cfg.window_mean_points {
            return Err(Error::config(
                "coordination_k",
                "must be below the expected basestation count of the window",
            ));
        }
        Ok(())
    }

    fn interferers(&self) -> &Strategy<T> {
        self.interferer_strategy.as_ref().unwrap_or(&self.strategy)
    }

    /// Law of the beamforming gain on the serving link.
    pub fn serving_fading(&self) -> FadingModel {
        FadingModel::ChiSq {
            n_ant: self.cfg.antennas,
        }
    }
}

/// Censored delay statistics over many realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayStats<T> {
    pub n: u64,
    pub censored_count: u64,
    pub max_slots: u64,
    /// Mean of min{D, T_max}.
    pub mean_censored: T,
    /// Half-width of the normal 95% interval on `mean_censored`.
    pub ci_halfwidth: T,
    /// Mean per-slot transmit probability of the interfering basestations.
    pub eta_measured: T,
    /// Mean size of the typical cell, typical user included.
    pub mean_n0: T,
    pub resample_count: u64,
    pub bs_density: T,
    /// Sorted observed delays; censored entries hold `max_slots + 1`.
    delays: Vec<u64>,
    moments: Moments,
    eta: Moments,
    n0: Moments,
}

/// Per-realization result, before aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationRecord {
    /// min{D, T_max + 1}.
    pub delay: u64,
    pub eta: f64,
    pub n0: usize,
    pub resamples: u32,
}

impl<T: Scalar> DelayStats<T> {
    pub fn from_records(records: &[RealizationRecord], max_slots: u64, bs_density: T) -> Self {
        let mut delays: Vec<u64> = records.iter().map(|r| r.delay).collect();
        delays.sort_unstable();
        let moments: Moments = records.iter().map(|r| r.delay.min(max_slots) as f64).collect();
        let eta: Moments = records.iter().map(|r| r.eta).collect();
        let n0: Moments = records.iter().map(|r| r.n0 as f64).collect();
        let resample_count = records.iter().map(|r| u64::from(r.resamples)).sum();
        Self::assemble(delays, moments, eta, n0, resample_count, max_slots, bs_density)
    }

    fn assemble(
        delays: Vec<u64>,
        moments: Moments,
        eta: Moments,
        n0: Moments,
        resample_count: u64,
        max_slots: u64,
        bs_density: T,
    ) -> Self {
        let censored_count = delays.iter().filter(|&&d| d > max_slots).count() as u64;
        DelayStats {
            n: delays.len() as u64,
            censored_count,
            max_slots,
            mean_censored: T::lit(moments.mean),
            ci_halfwidth: T::lit(1.959_963_984_540_054 * moments.std_error()),
            eta_measured: T::lit(eta.mean),
            mean_n0: T::lit(n0.mean),
            resample_count,
            bs_density,
            delays,
            moments,
            eta,
            n0,
        }
    }

    /// Combines two runs over the same horizon.
    pub fn merge(&self, other: &DelayStats<T>) -> Result<Self> {
        if self.max_slots != other.max_slots {
            return Err(Error::Request("cannot merge runs with different horizons".into()));
        }
        let mut delays = Vec::with_capacity(self.delays.len() + other.delays.len());
        let (mut i, mut j) = (0, 0);
        while i < self.delays.len() || j < other.delays.len() {
            if j == other.delays.len() || (i < self.delays.len() && self.delays[i] <= other.delays[j]) {
                delays.push(self.delays[i]);
                i += 1;
            } else {
                delays.push(other.delays[j]);
                j += 1;
            }
        }
        Ok(Self::assemble(
            delays,
            self.moments.merge(&other.moments),
            self.eta.merge(&other.eta),
            self.n0.merge(&other.n0),
            self.resample_count + other.resample_count,
            self.max_slots,
            self.bs_density,
        ))
    }

    /// Empirical P(D > t). Exact for t ≤ T_max.
    pub fn survival(&self, t: u64) -> T {
        if self.n == 0 {
            return T::nan();
        }
        let at_most = self.delays.partition_point(|&d| d <= t);
        T::from_usize_lossy(self.delays.len() - at_most) / T::from_usize_lossy(self.delays.len())
    }

    /// P̂(D > t) for t = 0..=upto (capped at T_max).
    pub fn survival_curve(&self, upto: u64) -> Vec<T> {
        (0..=upto.min(self.max_slots)).map(|t| self.survival(t)).collect()
    }

    /// Mean of min{D, horizon} for horizon ≤ T_max.
    pub fn censored_mean_at(&self, horizon: u64) -> T {
        let h = horizon.min(self.max_slots);
        let s: f64 = self.delays.iter().map(|&d| d.min(h) as f64).sum();
        T::lit(s / self.delays.len() as f64)
    }

    pub fn std_error(&self) -> T {
        T::lit(self.moments.std_error())
    }

    pub fn delays(&self) -> &[u64] {
        &self.delays
    }

    /// 1/E{D}: packets per slot delivered by one basestation.
    pub fn capacity_per_bs(&self) -> T {
        T::one() / self.mean_censored
    }

    /// λ/E{D}.
    pub fn capacity_network(&self) -> T {
        self.bs_density / self.mean_censored
    }

    /// 1/(n0·E{D}) with n0 the mean size of the typical cell.
    pub fn capacity_per_mu(&self) -> T {
        T::one() / (self.mean_n0 * self.mean_censored)
    }
}

/// λ·P(D ≤ R)/E{min(D, R)}: capacity when a packet is dropped after R attempts.
pub fn finite_r_capacity<T: Scalar>(stats: &DelayStats<T>, r: u64, bs_density: T) -> Result<T> {
    if r < 1 || r > stats.max_slots {
        return Err(Error::Request(format!(
            "retransmission cap {r} must lie in [1, {}]",
            stats.max_slots
        )));
    }
    let success = T::one() - stats.survival(r);
    Ok(bs_density * success / stats.censored_mean_at(r))
}

/// A deployment resolved against a scenario: silenced set, per-user plans and
/// everything else that stays fixed across slots.
pub(crate) struct Prepared<'a, T> {
    real: &'a NetworkRealization<T>,
    cfg: NetworkConfig<T>,
    serving_plan: LinkPlan<T>,
    serving_gain: T,
    serving_fading: FadingModel,
    own_fading: FadingModel,
    noise: T,
    /// Active non-serving basestations, silenced ones included.
    interferers: Vec<usize>,
    silenced: Vec<bool>,
    plan_offsets: Vec<usize>,
    plans: Vec<LinkPlan<T>>,
    eta: f64,
    decisions: Vec<Decision<T>>,
    fading: Vec<T>,
}

impl<'a, T: Scalar> Prepared<'a, T> {
    pub(crate) fn new(real: &'a NetworkRealization<T>, s: &SimScenario<T>) -> Result<Self> {
        let alpha = s.cfg.pathloss_exp;
        let n = real.bs_count();
        let mut silenced = vec![false; n];
        for &z in real.order.iter().skip(1).take(s.coordination_k) {
            silenced[z] = true;
        }
        let serving_gain = if s.enhanced_mode {
            T::one()
        } else {
            pathloss(real.typical_d0, alpha)
        };
        let serving_plan = s.strategy.plan_for_gain(serving_gain)?;
        let own_fading = s.serving_fading();

        let strat = s.interferers();
        let unit_plan = strat.plan_for_gain(T::one())?;
        let mut interferers = Vec::new();
        let mut plan_offsets = vec![0usize];
        let mut plans = Vec::new();
        let mut eta_sum = 0.0;
        for z in 0..n {
            let cell = real.cell(z);
            if z == real.serving || cell.is_empty() {
                continue;
            }
            interferers.push(z);
            let mut p_sum = 0.0;
            for &u in cell {
                let gain = if s.enhanced_mode {
                    T::one()
                } else {
                    pathloss(real.link_distance(u), alpha)
                };
                let plan = if gain == T::one() { unit_plan } else { strat.plan_for_gain(gain)? };
                p_sum += plan.transmit_prob(own_fading).as_f64();
                plans.push(plan);
            }
            eta_sum += p_sum / cell.len() as f64;
            plan_offsets.push(plans.len());
        }
        let eta = if interferers.is_empty() {
            0.0
        } else {
            eta_sum / interferers.len() as f64
        };
        Ok(Prepared {
            real,
            cfg: s.cfg,
            serving_plan,
            serving_gain,
            serving_fading: s.serving_fading(),
            own_fading,
            noise: if s.enhanced_mode { T::zero() } else { s.cfg.noise },
            interferers,
            silenced,
            plan_offsets,
            plans,
            eta,
            decisions: vec![Decision::silent(); n],
            fading: vec![T::zero(); n],
        })
    }

    fn user_plans(&self, slot: usize) -> &[LinkPlan<T>] {
        &self.plans[self.plan_offsets[slot]..self.plan_offsets[slot + 1]]
    }

    fn supports_geometric(&self) -> bool {
        !self.serving_plan.needs_fading() && !self.plans.iter().any(LinkPlan::needs_fading)
    }

    /// Draws one slot. Every interferer is drawn, silenced or not, so runs that
    /// differ only in `silenced` consume identical random numbers.
    pub(crate) fn slot(&mut self, rng: &mut SimRng, silenced: &[bool]) -> Result<SlotOutcome<T>> {
        let s = self.real.serving;
        let h_serving: T = self.serving_fading.sample(rng);
        self.decisions[s] = self.serving_plan.decide(Some(h_serving), rng)?;
        self.fading[s] = h_serving;

        for k in 0..self.interferers.len() {
            let z = self.interferers[k];
            let (lo, hi) = (self.plan_offsets[k], self.plan_offsets[k + 1]);
            let plan = self.plans[lo + rng.random_range(0..hi - lo)];
            let h_own = if plan.needs_fading() {
                Some(self.own_fading.sample(rng))
            } else {
                None
            };
            self.decisions[z] = plan.decide(h_own, rng)?;
            // fading towards the typical user
            self.fading[z] = T::sample_exp1(rng);
        }

        let alpha = self.cfg.pathloss_exp;
        let mut interference = T::zero();
        for &z in &self.interferers {
            if silenced[z] || !self.decisions[z].transmit {
                continue;
            }
            interference += self.decisions[z].power * self.fading[z] * pathloss(self.real.bs_dist[z], alpha);
        }
        let d = self.decisions[s];
        let signal = if d.transmit {
            d.power * h_serving * self.serving_gain
        } else {
            T::zero()
        };
        Ok(outcome(
            signal,
            interference,
            self.cfg.proc_gain,
            self.noise,
            self.cfg.sinr_threshold,
            d.transmit,
        ))
    }

    /// Slot-by-slot delay, `max_slots + 1` when censored.
    fn run_slots(&mut self, rng: &mut SimRng, max_slots: u64) -> Result<u64> {
        let silenced = std::mem::take(&mut self.silenced);
        let mut result = max_slots + 1;
        for t in 1..=max_slots {
            if self.slot(rng, &silenced)?.success {
                result = t;
                break;
            }
        }
        self.silenced = silenced;
        Ok(result)
    }

    /// Exact per-slot success probability for fading-independent decisions.
    ///
    /// With serving gain h ~ Gamma(N, 1), success in a slot is
    /// h > s(γI + N0) with s = β/(P0ℓ0), so
    /// q = p0 Σ_{k<N} E[e^{−y} y^k]/k!, y = s(γI + N0).
    /// The moments E[e^{−uI} I^m] come from the Taylor coefficients of the
    /// Laplace transform of I, a product of per-interferer mixtures.
    pub(crate) fn success_prob(&self) -> Result<T> {
        let (p0, power0) = match self.serving_plan {
            LinkPlan::Bernoulli { p, power } => (p, power),
            LinkPlan::Threshold { .. } => {
                return Err(Error::Request("the closed-form success probability needs fading-independent decisions".into()))
            }
        };
        if p0 <= T::zero() {
            return Ok(T::zero());
        }
        let n_ant = self.cfg.antennas as usize;
        let s = self.cfg.sinr_threshold / (power0 * self.serving_gain);
        let u = s * self.cfg.proc_gain;
        let alpha = self.cfg.pathloss_exp;

        // series of L(u − ε) in ε up to degree n_ant − 1, kept as exp(log_scale)·coef
        let mut coef = vec![T::zero(); n_ant];
        coef[0] = T::one();
        let mut log_scale = T::zero();
        let mut factor = vec![T::zero(); n_ant];
        let mut next = vec![T::zero(); n_ant];
        for (k, &z) in self.interferers.iter().enumerate() {
            if self.silenced[z] {
                continue;
            }
            let gain = pathloss(self.real.bs_dist[z], alpha);
            let plans = self.user_plans(k);
            factor.iter_mut().for_each(|f| *f = T::zero());
            for plan in plans {
                let (p, power) = match *plan {
                    LinkPlan::Bernoulli { p, power } => (p, power),
                    LinkPlan::Threshold { .. } => {
                        return Err(Error::Request("interferer decisions depend on fading".into()))
                    }
                };
                let a = power * gain;
                let big_a = T::one() + u * a;
                factor[0] += T::one() - p + p / big_a;
                let mut pw = p / big_a;
                for f in factor.iter_mut().skip(1) {
                    pw = pw * a / big_a;
                    *f += pw;
                }
            }
            let inv = T::one() / T::from_usize_lossy(plans.len());
            let c0 = factor[0] * inv;
            if c0 <= T::zero() {
                return Ok(T::zero());
            }
            log_scale += c0.ln();
            for f in factor.iter_mut() {
                *f = *f * inv / c0;
            }
            for (m, slot) in next.iter_mut().enumerate() {
                *slot = (0..=m).fold(T::zero(), |acc, j| acc + coef[j] * factor[m - j]);
            }
            std::mem::swap(&mut coef, &mut next);
        }

        // E[e^{-uI} I^m] = m!·c_m; accumulate Σ_k (1/k!) Σ_m C(k,m) (sN0)^{k−m} u^m m! c_m
        let sn = s * self.noise;
        let mut total = T::zero();
        let mut k_fact = T::one();
        for k in 0..n_ant {
            if k > 0 {
                k_fact *= T::from_usize_lossy(k);
            }
            let mut inner = T::zero();
            let mut binom = T::one();
            let mut m_fact = T::one();
            for m in 0..=k {
                if m > 0 {
                    binom = binom * T::from_usize_lossy(k - m + 1) / T::from_usize_lossy(m);
                    m_fact *= T::from_usize_lossy(m);
                }
                inner += binom * sn.powi((k - m) as i32) * u.powi(m as i32) * m_fact * coef[m];
            }
            total += inner / k_fact;
        }
        let q = p0 * (log_scale - sn).exp() * total;
        Ok(q.min(T::one()))
    }
}

/// Draws D ~ Geometric(q) on {1, 2, …}, censored at `max_slots + 1`.
fn sample_geometric<T: Scalar, R: Rng + ?Sized>(q: T, max_slots: u64, rng: &mut R) -> u64 {
    if q >= T::one() {
        return 1;
    }
    if q <= T::zero() {
        return max_slots + 1;
    }
    let u = T::sample_open01(rng);
    let t = (u.ln() / (-q).ln_1p()).floor() + T::one();
    if t > T::lit(max_slots as f64) {
        max_slots + 1
    } else {
        t.to_u64().unwrap_or(max_slots + 1).min(max_slots + 1)
    }
}

fn use_geometric<T: Scalar>(prep: &Prepared<'_, T>, engine: Engine) -> Result<bool> {
    match engine {
        Engine::Slots => Ok(false),
        Engine::Auto => Ok(prep.supports_geometric()),
        Engine::Geometric if prep.supports_geometric() => Ok(true),
        Engine::Geometric => Err(Error::config(
            "engine",
            "the geometric engine needs decisions that do not depend on fading",
        )),
    }
}

fn run_realization<T: Scalar>(s: &SimScenario<T>, real: &NetworkRealization<T>, index: u64) -> Result<RealizationRecord> {
    let mut prep = Prepared::new(real, s)?;
    let mut rng = rng::stream(s.seed, index, Purpose::Slots);
    let delay = if use_geometric(&prep, s.engine)? {
        let q = prep.success_prob()?;
        sample_geometric(q, s.max_slots, &mut rng)
    } else {
        prep.run_slots(&mut rng, s.max_slots)?
    };
    Ok(RealizationRecord {
        delay,
        eta: prep.eta,
        n0: real.n0,
        resamples: real.resample_count,
    })
}

/// Runs `n_realizations` independent deployments and aggregates the delays.
/// Deterministic in the seed regardless of thread count.
pub fn simulate_delay<T: Scalar>(s: &SimScenario<T>) -> Result<DelayStats<T>> {
    s.validate()?;
    let records = (0..s.n_realizations)
        .into_par_iter()
        .map(|i| {
            let real = sample_realization(&s.cfg, s.seed, i)?;
            run_realization(s, &real, i)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DelayStats::from_records(&records, s.max_slots, s.cfg.bs_density))
}

/// Repeats the slot dynamics `n_realizations` times on one fixed deployment.
pub fn simulate_on_realization<T: Scalar>(s: &SimScenario<T>, real: &NetworkRealization<T>) -> Result<DelayStats<T>> {
    s.validate()?;
    let records = (0..s.n_realizations)
        .into_par_iter()
        .map(|i| run_realization(s, real, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(DelayStats::from_records(&records, s.max_slots, s.cfg.bs_density))
}

/// Closed-form per-slot success probability of the typical user on a fixed
/// deployment, for fading-independent strategies.
pub fn conditional_success_prob<T: Scalar>(s: &SimScenario<T>, real: &NetworkRealization<T>) -> Result<T> {
    Prepared::new(real, s)?.success_prob()
}

/// Delay in the lower-bound network (see [`SimScenario::enhanced_mode`]).
pub fn simulate_enhanced_lb_network<T: Scalar>(s: &SimScenario<T>) -> Result<DelayStats<T>> {
    if !s.enhanced_mode {
        return Err(Error::Contract("enhanced simulation requires enhanced_mode".into()));
    }
    simulate_delay(s)
}

/// `simulate_delay` with `n_ant` beamforming antennas at every basestation.
pub fn simulate_multiantenna<T: Scalar>(s: &SimScenario<T>, n_ant: u32) -> Result<DelayStats<T>> {
    let mut s = *s;
    s.cfg.antennas = n_ant;
    simulate_delay(&s)
}
