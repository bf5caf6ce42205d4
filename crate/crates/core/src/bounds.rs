//! Analytic lower and upper bounds on the expected ARQ delay.
//!
//! Integrals against the nearest-basestation law are evaluated in the
//! variable v = πλy², where the density becomes e^{−v}. Improper upper limits
//! are cut where an analytic bound on the remaining tail is below 1e−16 of the
//! running value; that bound is added to the reported error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arq_sim::{Prepared, SimScenario};
use crate::channel::{pathloss, Estimate};
use crate::error::{Error, Result};
use crate::geometry::{kth_nearest_pdf, NetworkConfig, NetworkRealization};
use crate::quad::{integrate, QuadOptions, QuadResult};
use crate::rng::{self, Purpose};
use crate::scalar::Scalar;
use crate::special::{gamma, gamma_q};
use crate::stats::Moments;
use crate::strategies::{LinkPlan, Strategy};

const TAIL_REL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams<T> {
    pub bs_density: T,
    pub pathloss_exp: T,
    pub sinr_threshold: T,
    pub proc_gain: T,
    pub noise: T,
    pub avg_power: T,
    /// τ ≥ 1: the per-slot average power of every basestation is at least M/τ.
    pub tau: T,
    /// Power-control margin ε.
    pub epsilon: T,
    /// Floor on the mean transmit probability of interferers.
    pub eta: T,
    /// Cutoff of the threshold policy at the typical basestation.
    pub delta: T,
}

impl<T: Scalar> BoundParams<T> {
    pub fn from_config(cfg: &NetworkConfig<T>, epsilon: T, eta: T) -> Self {
        BoundParams {
            bs_density: cfg.bs_density,
            pathloss_exp: cfg.pathloss_exp,
            sinr_threshold: cfg.sinr_threshold,
            proc_gain: cfg.proc_gain,
            noise: cfg.noise,
            avg_power: cfg.avg_power,
            tau: T::one(),
            epsilon,
            eta,
            delta: T::zero(),
        }
    }

    pub fn with_density(mut self, bs_density: T) -> Self {
        self.bs_density = bs_density;
        self
    }

    /// κ = βγ(1 − ε).
    pub fn kappa(&self) -> T {
        self.sinr_threshold * self.proc_gain * (T::one() - self.epsilon)
    }

    /// c2 = ηe^{−τ/M}/(1 − ηe^{−τ/M}).
    pub fn c2(&self) -> T {
        let x = self.eta * (-self.tau / self.avg_power).exp();
        x / (T::one() - x)
    }

    /// c8 = (1 + Mγβ)/(1 + Mγβ − η(M/τ)γβ) − 1.
    pub fn c8(&self) -> T {
        let gb = self.proc_gain * self.sinr_threshold;
        let num = T::one() + self.avg_power * gb;
        num / (num - self.eta * (self.avg_power / self.tau) * gb) - T::one()
    }

    fn check_common(&self) -> Result<()> {
        let pos = |v: T, name: &str| -> Result<()> {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(Error::BoundParams(format!("{name} must be positive, got {v}")))
            }
        };
        pos(self.bs_density, "bs_density")?;
        pos(self.avg_power, "avg_power")?;
        pos(self.sinr_threshold, "sinr_threshold")?;
        pos(self.proc_gain, "proc_gain")?;
        if !(self.pathloss_exp > T::lit(2.0)) {
            return Err(Error::BoundParams("pathloss_exp must exceed 2".into()));
        }
        if !(self.noise >= T::zero()) {
            return Err(Error::BoundParams("noise must be non-negative".into()));
        }
        if !(self.tau >= T::one()) {
            return Err(Error::BoundParams("tau must be at least 1".into()));
        }
        if !(self.eta >= T::zero() && self.eta <= T::one()) {
            return Err(Error::BoundParams(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if !(self.delta >= T::zero() && self.delta.is_finite()) {
            return Err(Error::BoundParams("delta must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn check_c2(&self) -> Result<T> {
        self.check_common()?;
        let c2 = self.c2();
        if !(c2 > T::zero() && c2.is_finite()) {
            return Err(Error::BoundParams(format!("c2 = {c2} must be positive (needs eta > 0)")));
        }
        Ok(c2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    LbLowDensity,
    LbHighDensity,
    LbCsir,
    UbPowerControl,
    LbCoordination { k: u32 },
}

impl BoundKind {
    pub fn name(&self) -> String {
        match self {
            BoundKind::LbLowDensity => "lb_lowdensity".into(),
            BoundKind::LbHighDensity => "lb_highdensity".into(),
            BoundKind::LbCsir => "lb_csir".into(),
            BoundKind::UbPowerControl => "ub_powercontrol".into(),
            BoundKind::LbCoordination { k } => format!("lb_coordination_k{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve<T> {
    pub grid: Vec<T>,
    pub values: Vec<T>,
    pub kind: BoundKind,
    pub params: BoundParams<T>,
    pub quadrature_tol: QuadTol<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadTol<T> {
    pub abs: T,
    pub rel: T,
}

fn quad_opts<T: Scalar>() -> QuadOptions<T> {
    QuadOptions::default()
}

/// Adds the analytic tail bound to a finite-range result.
fn with_tail<T: Scalar>(mut r: QuadResult<T>, tail: T) -> QuadResult<T> {
    r.value += tail;
    r.abs_error += tail;
    r
}

/// Smallest V ≥ lo (stepping by `step`) with `tail(V) ≤ 1e−16·scale(V)`.
fn truncation_point<T: Scalar>(lo: T, tail: impl Fn(T) -> T, scale: T) -> T {
    let mut v = lo.max(T::zero()) + T::lit(40.0);
    for _ in 0..200 {
        if tail(v) <= T::lit(TAIL_REL) * scale || tail(v) < T::min_positive_value() {
            return v;
        }
        v += T::lit(20.0);
    }
    v
}

/// Expected-delay lower bound from the best single-link strategy with no
/// interference, averaged over the serving distance. Noise is folded into
/// the threshold as b = βN.
pub fn lb_lowdensity<T: Scalar>(p: &BoundParams<T>) -> Result<T> {
    Ok(lb_lowdensity_quad(p)?.value)
}

pub fn lb_lowdensity_quad<T: Scalar>(p: &BoundParams<T>) -> Result<QuadResult<T>> {
    p.check_common()?;
    let alpha = p.pathloss_exp;
    let m = p.avg_power;
    let b = p.sinr_threshold * p.noise;
    let pl = T::PI() * p.bs_density;
    if b <= T::zero() {
        // every link meets the threshold in one slot
        return Ok(QuadResult {
            value: T::one(),
            abs_error: T::zero(),
            intervals: 0,
        });
    }
    // links with Mℓ(y) ≥ b succeed in one slot; y* is the edge of that region
    let ratio = b / m;
    let y_star = if ratio <= T::one() {
        ratio.powf(-alpha.recip())
    } else {
        T::zero()
    };
    let v_star = pl * y_star * y_star;
    let near = T::one() - (-v_star).exp();

    let integrand = |v: T| -> T {
        let y = (v / pl).sqrt();
        let gain = pathloss(y, alpha);
        let x = m * gain / b;
        (ratio / gain) / (T::one() - x.ln()) * (-v).exp()
    };
    // 1/(1 − ln x) ≤ 1 and ℓ^{−1} ≤ max(1, y^α), so the tail past V is at
    // most (b/M)·[Q(1, V) + (πλ)^{−α/2} Γ(α/2 + 1) Q(α/2 + 1, V)]
    let half = alpha / T::lit(2.0);
    let gamma_half = gamma(half + T::one());
    let tail = |v: T| ratio * ((-v).exp() + pl.powf(-half) * gamma_half * gamma_q(half + T::one(), v));
    let scale = near + ratio * pl.powf(-half) * gamma_half * gamma_q(half + T::one(), v_star);
    let v_max = truncation_point(v_star.max(pl), tail, scale);

    let opts = quad_opts();
    let mut total = QuadResult {
        value: near,
        abs_error: T::zero(),
        intervals: 0,
    };
    let mut pieces = Vec::new();
    if v_star < pl {
        pieces.push((v_star, pl));
        pieces.push((pl, v_max));
    } else {
        pieces.push((v_star, v_max));
    }
    for (a, c) in pieces {
        let r = integrate(integrand, a, c, &opts)?;
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.intervals += r.intervals;
    }
    Ok(with_tail(total, tail(v_max)))
}

/// Closed-form lower bound in the high-density regime:
/// e^δ e^{πλc2} (1 − e^{−πλ(1 + c2)})/(1 + c2).
pub fn lb_highdensity<T: Scalar>(p: &BoundParams<T>) -> Result<T> {
    let c2 = p.check_c2()?;
    let pl = T::PI() * p.bs_density;
    Ok(p.delta.exp() * (pl * c2).exp() * (T::one() - (-pl * (T::one() + c2)).exp()) / (T::one() + c2))
}

/// Lower bound for basestations that know their own channel:
/// (e^{πλc8}/M)(1 − e^{−πλ(1 + c8)})/(1 + c8).
pub fn lb_csir<T: Scalar>(p: &BoundParams<T>) -> Result<T> {
    p.check_common()?;
    let c8 = p.c8();
    if !(c8 >= T::zero() && c8.is_finite()) {
        return Err(Error::BoundParams(format!(
            "c8 = {c8} is invalid; needs eta*(M/tau)*gamma*beta < 1 + M*gamma*beta"
        )));
    }
    let pl = T::PI() * p.bs_density;
    Ok((pl * c8).exp() / p.avg_power * (T::one() - (-pl * (T::one() + c8)).exp()) / (T::one() + c8))
}

/// Bound on E{p0^{−2}} for power control: (c/M)²(1 + Γ(α + 1)/(πλ)^α).
pub fn inverse_prob_moment<T: Scalar>(p: &BoundParams<T>) -> T {
    let c_over_m = T::one() / (T::one() - p.epsilon);
    let pl = T::PI() * p.bs_density;
    c_over_m * c_over_m * (T::one() + gamma(p.pathloss_exp + T::one()) / pl.powf(p.pathloss_exp))
}

/// E_{d0}[exp(A·G(d0))] with A = 4πλκ/(1 − κ)² and G(x) the integral of
/// ℓ(r)·r over r > x, split at x = 1.
pub fn interference_factor<T: Scalar>(p: &BoundParams<T>) -> Result<QuadResult<T>> {
    let kappa = p.kappa();
    let alpha = p.pathloss_exp;
    let pl = T::PI() * p.bs_density;
    let two = T::lit(2.0);
    let a = T::lit(4.0) * pl * kappa / ((T::one() - kappa) * (T::one() - kappa));
    let far = (alpha - two).recip();
    let inner = |v: T| (a * ((T::one() - v / pl) / two + far) - v).exp();
    let outer = |v: T| {
        let y = (v / pl).sqrt();
        (a * y.powf(two - alpha) * far - v).exp()
    };
    let opts = quad_opts();
    let r1 = integrate(inner, T::zero(), pl, &opts)?;
    // the outer exponent is at most A/(α − 2), so the tail past V is ≤ e^{A/(α−2) − V}
    let tail = |v: T| (a * far - v).exp();
    let v_max = truncation_point(pl, tail, r1.value + (a * far - pl).exp());
    let r2 = integrate(outer, pl, v_max, &opts)?;
    Ok(with_tail(
        QuadResult {
            value: r1.value + r2.value,
            abs_error: r1.abs_error + r2.abs_error,
            intervals: r1.intervals + r2.intervals,
        },
        tail(v_max),
    ))
}

/// Upper bound on the expected delay of power control:
/// e^{βN/c}·sqrt(E{p0^{−2}} bound × interference factor).
pub fn ub_powercontrol<T: Scalar>(p: &BoundParams<T>) -> Result<T> {
    p.check_common()?;
    if !(p.epsilon > T::zero() && p.epsilon < T::one()) {
        return Err(Error::BoundParams("epsilon must lie in (0, 1)".into()));
    }
    let kappa = p.kappa();
    if kappa >= T::one() {
        return Err(Error::BoundParams(format!(
            "power control needs beta*gamma*(1-epsilon) < 1, got {kappa}"
        )));
    }
    let c = p.avg_power / (T::one() - p.epsilon);
    let f = interference_factor(p)?.value;
    Ok((p.sinr_threshold * p.noise / c).exp() * (inverse_prob_moment(p) * f).sqrt())
}

/// High-density lower bound when the k − 1 nearest non-serving basestations
/// are silenced: ∫₀¹ e^δ e^{πλc2(1 − x²)} f_{d_k}(x) dx.
pub fn lb_coordination<T: Scalar>(p: &BoundParams<T>, k: u32) -> Result<T> {
    Ok(lb_coordination_quad(p, k)?.value)
}

pub fn lb_coordination_quad<T: Scalar>(p: &BoundParams<T>, k: u32) -> Result<QuadResult<T>> {
    let c2 = p.check_c2()?;
    if k < 1 {
        return Err(Error::BoundParams("coordination order k must be at least 1".into()));
    }
    let pl = T::PI() * p.bs_density;
    let lam = p.bs_density;
    let scale = p.delta.exp();
    // split at the mode of f_{d_k} so narrow peaks are not missed
    let mode = ((T::from_usize_lossy(k as usize) - T::lit(0.5)) / pl).sqrt().min(T::one());
    let f = |x: T| {
        let pdf = kth_nearest_pdf(lam, k, x).unwrap_or(T::zero());
        scale * (pl * c2 * (T::one() - x * x)).exp() * pdf
    };
    let opts = quad_opts();
    let a = integrate(f, T::zero(), mode, &opts)?;
    let b = integrate(f, mode, T::one(), &opts)?;
    Ok(QuadResult {
        value: a.value + b.value,
        abs_error: a.abs_error + b.abs_error,
        intervals: a.intervals + b.intervals,
    })
}

pub fn evaluate<T: Scalar>(kind: BoundKind, p: &BoundParams<T>) -> Result<T> {
    match kind {
        BoundKind::LbLowDensity => lb_lowdensity(p),
        BoundKind::LbHighDensity => lb_highdensity(p),
        BoundKind::LbCsir => lb_csir(p),
        BoundKind::UbPowerControl => ub_powercontrol(p),
        BoundKind::LbCoordination { k } => lb_coordination(p, k),
    }
}

/// Evaluates `kind` on every density of `grid`, in parallel.
pub fn bound_curve<T: Scalar>(kind: BoundKind, params: &BoundParams<T>, grid: &[T]) -> Result<BoundCurve<T>> {
    if grid.is_empty() {
        return Err(Error::Request("density grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Request("density grid must be strictly increasing".into()));
    }
    let values = grid
        .par_iter()
        .map(|&lam| evaluate(kind, &params.with_density(lam)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > T::zero())) {
        return Err(Error::BoundParams(format!("{} produced a non-positive or non-finite value {v}", kind.name())));
    }
    let opts: QuadOptions<T> = quad_opts();
    Ok(BoundCurve {
        grid: grid.to_vec(),
        values,
        kind,
        params: *params,
        quadrature_tol: QuadTol {
            abs: opts.abs_tol,
            rel: opts.rel_tol,
        },
    })
}

/// Laplace transform E{exp(−aγI)} of the interference at the typical user on
/// a fixed deployment: the analytic product over basestations of
/// mean_u[(1 − p_u) + p_u/(1 + aγℓ(z)P_u)] against a Monte Carlo estimate
/// over `n_slots` independent slots.
pub fn laplace_product_check<T: Scalar>(
    real: &NetworkRealization<T>,
    cfg: &NetworkConfig<T>,
    strategy: &Strategy<T>,
    a: T,
    n_slots: u64,
    seed: u64,
) -> Result<(T, Estimate<T>)> {
    let ag = a * cfg.proc_gain;
    let alpha = cfg.pathloss_exp;
    let mut analytic = T::one();
    for z in 0..real.bs_count() {
        let cell = real.cell(z);
        if z == real.serving || cell.is_empty() {
            continue;
        }
        let lz = pathloss(real.bs_dist[z], alpha);
        let mut mean = T::zero();
        for &u in cell {
            match strategy.plan(real.link_distance(u))? {
                LinkPlan::Bernoulli { p, power } => {
                    mean += T::one() - p + p / (T::one() + ag * lz * power);
                }
                LinkPlan::Threshold { .. } => {
                    return Err(Error::Request("the product form needs fading-independent decisions".into()))
                }
            }
        }
        analytic = analytic * mean / T::from_usize_lossy(cell.len());
    }

    let scenario = SimScenario::new(*cfg, *strategy);
    let mut prep = Prepared::new(real, &scenario)?;
    let none = vec![false; real.bs_count()];
    let mut rng = rng::stream(seed, 0, Purpose::Auxiliary);
    let mut m = Moments::default();
    for _ in 0..n_slots {
        let out = prep.slot(&mut rng, &none)?;
        m.push((-ag * out.interference).exp().as_f64());
    }
    Ok((analytic, Estimate::from_moments(&m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base() -> BoundParams<f64> {
        BoundParams::from_config(&NetworkConfig::<f64>::new(1.0), 0.5, 0.5)
    }

    #[test]
    fn constants() {
        let p = base();
        assert_relative_eq!(p.c2(), 0.225_399_6, max_relative = 1e-6);
        assert_relative_eq!(p.c8(), 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(p.kappa(), 0.5);
    }

    #[test]
    fn highdensity_value() {
        let p = base();
        let c2: f64 = 0.5 * (-1.0f64).exp() / (1.0 - 0.5 * (-1.0f64).exp());
        let expect = (std::f64::consts::PI * c2).exp() / (1.0 + c2) * (1.0 - (-std::f64::consts::PI * (1.0 + c2)).exp());
        let v = lb_highdensity(&p).unwrap();
        assert_relative_eq!(v, expect, max_relative = 1e-12);
        assert!((v - 1.62).abs() < 0.005);
    }

    #[test]
    fn highdensity_small_density_slope() {
        let mut p = base();
        p.delta = 0.3;
        let lam = 1e-7;
        let v = lb_highdensity(&p.with_density(lam)).unwrap();
        assert_relative_eq!(v / lam, 0.3f64.exp() * std::f64::consts::PI, max_relative = 1e-5);
    }

    #[test]
    fn highdensity_rejects_zero_eta() {
        let mut p = base();
        p.eta = 0.0;
        assert!(matches!(lb_highdensity(&p), Err(Error::BoundParams(_))));
    }

    #[test]
    fn csir_value_and_floor() {
        let p = base();
        assert!((lb_csir(&p).unwrap() - 2.10).abs() < 0.01);
        let mut q = p;
        q.eta = 0.0;
        q.avg_power = 2.0;
        let lam: f64 = 0.7;
        let v = lb_csir(&q.with_density(lam)).unwrap();
        assert_relative_eq!(v, (1.0 - (-std::f64::consts::PI * lam).exp()) / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn csir_increasing_above_one() {
        let p = base();
        let vals: Vec<f64> = (0..40).map(|i| lb_csir(&p.with_density(1.0 + 0.25 * i as f64)).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn inverse_moment_value() {
        let p = base().with_density(1.0 / std::f64::consts::PI);
        assert_relative_eq!(inverse_prob_moment(&p), 28.0, max_relative = 1e-12);
    }

    #[test]
    fn interference_factor_vanishing_kappa() {
        let mut p = base();
        p.sinr_threshold = 1e-12;
        let f = interference_factor(&p).unwrap();
        assert_relative_eq!(f.value, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn interference_factor_inner_piece_closed_form() {
        // both pieces against an independent split: inner piece has a closed form
        let p = base().with_density(0.3);
        let pl = std::f64::consts::PI * 0.3;
        let a = 4.0 * pl * 0.5 / 0.25;
        let inner = (a / 2.0 + a).exp() * (1.0 - (-(a / (2.0 * pl) + 1.0) * pl).exp()) / (a / (2.0 * pl) + 1.0);
        let outer = crate::quad::integrate_to_inf(
            |y: f64| (a * y.powf(-1.0) - pl * y * y).exp() * 2.0 * pl * y,
            1.0,
            &QuadOptions::default(),
        )
        .unwrap()
        .value;
        let f = interference_factor(&p).unwrap().value;
        assert_relative_eq!(f, inner + outer, max_relative = 1e-7);
    }

    #[test]
    fn ub_rejects_kappa() {
        let mut p = base();
        p.sinr_threshold = 4.0;
        assert!(matches!(ub_powercontrol(&p), Err(Error::BoundParams(m)) if m.contains("beta*gamma*(1-epsilon) < 1")));
    }

    #[test]
    fn ub_log_affine_at_high_density() {
        let p = base();
        let x: Vec<f64> = (0..9).map(|i| 4.0 + i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&l| ub_powercontrol(&p.with_density(l)).unwrap().ln()).collect();
        let fit = crate::stats::linear_fit(&x, &y);
        assert!(fit.slope > 0.0 && fit.r_squared > 0.999);
    }

    #[test]
    fn lowdensity_boundary_is_finite() {
        // at the region edge Mℓ/b = 1 the log term equals one
        let p = base().with_density(0.05);
        let r = lb_lowdensity_quad(&p).unwrap();
        assert!(r.value.is_finite() && r.value > 1.0);
        let mut q = p;
        q.noise = 0.0;
        assert_eq!(lb_lowdensity(&q).unwrap(), 1.0);
    }

    #[test]
    fn lowdensity_matches_sampled_oracle() {
        // E over d0 of the conditional bound, d0 drawn by inverse CDF
        use rand::Rng;
        let lam = 0.1;
        let p = base().with_density(lam);
        let mut rng = rng::stream(11, 0, Purpose::Auxiliary);
        let n = 2_000_000;
        let mut m = Moments::default();
        for _ in 0..n {
            let u: f64 = rng.random();
            let d0 = (-(1.0 - u).ln() / (std::f64::consts::PI * lam)).sqrt();
            let l = d0.powf(-3.0).min(1.0);
            m.push(if l >= 1.0 { 1.0 } else { 1.0 / ((1.0 - l.ln()) * l) });
        }
        let v = lb_lowdensity(&p).unwrap();
        assert!(m.std_error() / m.mean < 0.003);
        assert!((v - m.mean).abs() / m.mean < 0.01, "{v} vs {}", m.mean);
    }

    #[test]
    fn lowdensity_above_unit_ratio() {
        // b > M: no link finishes in one slot; constant pieces still integrate
        let mut p = base().with_density(0.2);
        p.noise = 2.0;
        let v = lb_lowdensity(&p).unwrap();
        let near = (1.0 - (-std::f64::consts::PI * 0.2f64).exp()) * 2.0 / (1.0 + 2.0f64.ln());
        assert!(v > near);
    }

    #[test]
    fn coordination_reduces_to_closed_form() {
        for lam in [0.5, 2.0, 8.0] {
            let p = base().with_density(lam);
            let a = lb_coordination(&p, 1).unwrap();
            let b = lb_highdensity(&p).unwrap();
            assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn coordination_decreases_in_k() {
        let p = base().with_density(2.0);
        let v: Vec<f64> = (1..=8).map(|k| lb_coordination(&p, k).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    }

    #[test]
    fn coordination_slope_unchanged() {
        let p = base();
        let slope = |k| {
            let a: f64 = lb_coordination(&p.with_density(7.5), k).unwrap();
            let b: f64 = lb_coordination(&p.with_density(8.5), k).unwrap();
            b.ln() - a.ln()
        };
        let (s1, s8) = (slope(1), slope(8));
        assert!((s8 - s1).abs() / s1 < 0.10, "{s1} {s8}");
    }

    #[test]
    fn highdensity_log_slope() {
        let p = base();
        let c2 = p.c2();
        for lam in [8.0, 16.0, 32.0] {
            let a = lb_highdensity(&p.with_density(lam)).unwrap().ln();
            let b = lb_highdensity(&p.with_density(2.0 * lam)).unwrap().ln();
            assert!(((b - a) - std::f64::consts::PI * c2 * lam).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_validation() {
        let p = base();
        assert!(bound_curve(BoundKind::LbHighDensity, &p, &[]).is_err());
        assert!(bound_curve(BoundKind::LbHighDensity, &p, &[1.0, 1.0]).is_err());
        let c = bound_curve(BoundKind::UbPowerControl, &p, &[0.1, 1.0, 2.0]).unwrap();
        assert_eq!(c.values.len(), 3);
        assert_eq!(c.values, bound_curve(BoundKind::UbPowerControl, &p, &[0.1, 1.0, 2.0]).unwrap().values);
    }

    #[test]
    fn laplace_single_interferer() {
        let cfg = NetworkConfig::<f64>::new(1.0);
        let real = NetworkRealization::from_points(vec![[0.5, 0.0], [-1.0, 0.0]], vec![[-1.2, 0.0]], 5.0).unwrap();
        let s = Strategy::pure_aloha(1.0, 1.0, &cfg);
        let (an, emp) = laplace_product_check(&real, &cfg, &s, 1.0, 100_000, 1).unwrap();
        assert_relative_eq!(an, 0.5, max_relative = 1e-12);
        assert!((emp.value - an).abs() < 3.0 * emp.std_error);
    }

    #[test]
    fn laplace_without_interferers() {
        let cfg = NetworkConfig::<f64>::new(1.0);
        let real = NetworkRealization::from_points(vec![[0.5, 0.0]], vec![], 5.0).unwrap();
        let s = Strategy::power_control(0.5, &cfg);
        let (an, emp) = laplace_product_check(&real, &cfg, &s, 1.0, 100, 1).unwrap();
        assert_eq!(an, 1.0);
        assert_eq!(emp.value, 1.0);
    }
}
