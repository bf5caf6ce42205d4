//! Poisson deployments on a disc window, nearest-basestation association and
//! the analytic laws of the nearest-neighbour distances.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::scalar::Scalar;
use crate::special;

/// Physical parameters of the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig<T> {
    /// Basestation density λ (points per m²).
    pub bs_density: T,
    /// Mobile-user density μ (points per m²).
    pub mu_density: T,
    /// Path-loss exponent α, must exceed 2.
    pub pathloss_exp: T,
    /// SINR threshold β.
    pub sinr_threshold: T,
    /// Processing gain γ in (0, 1].
    pub proc_gain: T,
    /// Noise power N.
    pub noise: T,
    /// Average power constraint M.
    pub avg_power: T,
    /// Basestation antennas.
    pub antennas: u32,
    /// Expected number of basestations inside the simulation disc.
    pub window_mean_points: T,
}

impl<T: Scalar> NetworkConfig<T> {
    /// Defaults: α = 3, β = 1, γ = 1, N = 1, M = 1, one antenna,
    /// 200 basestations per window and ten users per basestation.
    pub fn new(bs_density: T) -> Self {
        NetworkConfig {
            bs_density,
            mu_density: bs_density * T::lit(10.0),
            pathloss_exp: T::lit(3.0),
            sinr_threshold: T::one(),
            proc_gain: T::one(),
            noise: T::one(),
            avg_power: T::one(),
            antennas: 1,
            window_mean_points: T::lit(200.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: T| v.is_finite() && v > T::zero();
        if !finite_pos(self.bs_density) {
            return Err(Error::config("bs_density", "must be positive and finite"));
        }
        if !(self.mu_density.is_finite() && self.mu_density >= T::zero()) {
            return Err(Error::config("mu_density", "must be non-negative and finite"));
        }
        if !(self.pathloss_exp.is_finite() && self.pathloss_exp > T::lit(2.0)) {
            return Err(Error::config("pathloss_exp", "pathloss_exp must exceed 2"));
        }
        if !finite_pos(self.sinr_threshold) {
            return Err(Error::config("sinr_threshold", "must be positive"));
        }
        if !(self.proc_gain > T::zero() && self.proc_gain <= T::one()) {
            return Err(Error::config("proc_gain", "must lie in (0, 1]"));
        }
        if !(self.noise.is_finite() && self.noise >= T::zero()) {
            return Err(Error::config("noise", "must be non-negative"));
        }
        if !finite_pos(self.avg_power) {
            return Err(Error::config("avg_power", "must be positive"));
        }
        if self.antennas < 1 {
            return Err(Error::config("antennas", "must be at least 1"));
        }
        if !(self.window_mean_points.is_finite() && self.window_mean_points >= T::one()) {
            return Err(Error::config("window_mean_points", "must be at least 1"));
        }
        Ok(())
    }

    /// Radius of the disc holding `window_mean_points` basestations on average.
    pub fn window_radius(&self) -> T {
        (self.window_mean_points / (self.bs_density * T::PI())).sqrt()
    }
}

/// One sampled deployment around a typical user at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization<T> {
    pub bs_points: Vec<[T; 2]>,
    /// Users other than the typical one.
    pub mu_points: Vec<[T; 2]>,
    /// `association[u]` is the basestation serving `mu_points[u]`.
    pub association: Vec<usize>,
    /// Distance from the origin to each basestation.
    pub bs_dist: Vec<T>,
    /// Basestation indices sorted by distance to the origin, ties by index.
    pub order: Vec<usize>,
    /// Sorted basestation distances: `typical_dk[k - 1]` is the k-th nearest.
    pub typical_dk: Vec<T>,
    pub typical_d0: T,
    /// Serving basestation of the typical user.
    pub serving: usize,
    /// Users in the typical cell, including the typical user.
    pub n0: usize,
    pub window_radius: T,
    /// Number of empty draws discarded before this one.
    pub resample_count: u32,
    cell_offsets: Vec<usize>,
    cell_members: Vec<usize>,
}

impl<T: Scalar> NetworkRealization<T> {
    /// Users (indices into `mu_points`) attached to basestation `bs`.
    pub fn cell(&self, bs: usize) -> &[usize] {
        &self.cell_members[self.cell_offsets[bs]..self.cell_offsets[bs + 1]]
    }

    /// A basestation with no user is switched off. The serving one always has
    /// the typical user.
    pub fn is_active(&self, bs: usize) -> bool {
        bs == self.serving || !self.cell(bs).is_empty()
    }

    pub fn bs_count(&self) -> usize {
        self.bs_points.len()
    }

    /// Distance between a user and its basestation.
    pub fn link_distance(&self, mu: usize) -> T {
        dist(self.mu_points[mu], self.bs_points[self.association[mu]])
    }

    /// Builds a realization from explicit coordinates. Useful for fixed
    /// geometries in tests and hand-constructed examples.
    pub fn from_points(bs_points: Vec<[T; 2]>, mu_points: Vec<[T; 2]>, window_radius: T) -> Result<Self> {
        if bs_points.is_empty() {
            return Err(Error::Request("a realization needs at least one basestation".into()));
        }
        Ok(assemble(bs_points, mu_points, window_radius, 0))
    }
}

#[inline]
fn dist<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
fn dist2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Uniform grid over the window for exact nearest-point queries.
struct GridIndex<T> {
    lo: T,
    cell: T,
    dim: usize,
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl<T: Scalar> GridIndex<T> {
    fn build(points: &[[T; 2]], radius: T) -> Self {
        // about one point per cell
        let dim = ((points.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let lo = -radius;
        let cell = (radius + radius) / T::from_usize_lossy(dim);
        let mut idx = GridIndex {
            lo,
            cell,
            dim,
            starts: vec![0; dim * dim + 1],
            items: vec![0; points.len()],
        };
        let keys: Vec<usize> = points.iter().map(|p| idx.key(*p)).collect();
        for &k in &keys {
            idx.starts[k + 1] += 1;
        }
        for i in 0..dim * dim {
            idx.starts[i + 1] += idx.starts[i];
        }
        let mut fill = idx.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            idx.items[fill[k]] = i;
            fill[k] += 1;
        }
        idx
    }

    fn coord(&self, v: T) -> usize {
        let c = ((v - self.lo) / self.cell).floor();
        if c <= T::zero() {
            0
        } else {
            c.to_usize().unwrap_or(usize::MAX).min(self.dim - 1)
        }
    }

    fn key(&self, p: [T; 2]) -> usize {
        self.coord(p[1]) * self.dim + self.coord(p[0])
    }

    /// Nearest indexed point to `q`, ties resolved towards the lower index.
    fn nearest(&self, points: &[[T; 2]], q: [T; 2]) -> usize {
        let cx = self.coord(q[0]) as isize;
        let cy = self.coord(q[1]) as isize;
        let dim = self.dim as isize;
        let mut best: Option<(T, usize)> = None;
        for ring in 0..=dim {
            for dy in -ring..=ring {
                let y = cy + dy;
                if y < 0 || y >= dim {
                    continue;
                }
                let on_edge_row = dy.abs() == ring;
                let step = if on_edge_row { 1 } else { (2 * ring).max(1) };
                let mut dx = -ring;
                while dx <= ring {
                    let x = cx + dx;
                    if x >= 0 && x < dim {
                        let k = (y * dim + x) as usize;
                        for &i in &self.items[self.starts[k]..self.starts[k + 1]] {
                            let d = dist2(points[i], q);
                            best = match best {
                                Some((bd, bi)) if bd < d || (bd == d && bi < i) => Some((bd, bi)),
                                _ => Some((d, i)),
                            };
                        }
                    }
                    dx += step;
                }
            }
            if let Some((bd, _)) = best {
                let reach = self.cell * T::from_usize_lossy(ring as usize);
                if bd < reach * reach {
                    break;
                }
            }
        }
        best.map(|(_, i)| i).expect("grid holds at least one point")
    }
}

fn uniform_in_disc<T: Scalar, R: Rng + ?Sized>(rng: &mut R, radius: T) -> [T; 2] {
    let r = radius * T::sample_open01(rng).sqrt();
    let theta = T::TAU() * T::sample_open01(rng);
    [r * theta.cos(), r * theta.sin()]
}

fn assemble<T: Scalar>(
    bs_points: Vec<[T; 2]>,
    mu_points: Vec<[T; 2]>,
    window_radius: T,
    resample_count: u32,
) -> NetworkRealization<T> {
    let origin = [T::zero(), T::zero()];
    let bs_dist: Vec<T> = bs_points.iter().map(|p| dist(*p, origin)).collect();
    let mut order: Vec<usize> = (0..bs_points.len()).collect();
    order.sort_by(|&a, &b| bs_dist[a].partial_cmp(&bs_dist[b]).unwrap().then(a.cmp(&b)));
    let typical_dk: Vec<T> = order.iter().map(|&i| bs_dist[i]).collect();
    let serving = order[0];

    let radius = window_radius.max(
        bs_points
            .iter()
            .chain(mu_points.iter())
            .fold(T::zero(), |m, p| m.max(p[0].abs()).max(p[1].abs())),
    );
    let grid = GridIndex::build(&bs_points, radius);
    let association: Vec<usize> = mu_points.iter().map(|&p| grid.nearest(&bs_points, p)).collect();

    let mut cell_offsets = vec![0usize; bs_points.len() + 1];
    for &b in &association {
        cell_offsets[b + 1] += 1;
    }
    for i in 0..bs_points.len() {
        cell_offsets[i + 1] += cell_offsets[i];
    }
    let mut fill = cell_offsets.clone();
    let mut cell_members = vec![0usize; mu_points.len()];
    for (u, &b) in association.iter().enumerate() {
        cell_members[fill[b]] = u;
        fill[b] += 1;
    }
    let n0 = 1 + cell_offsets[serving + 1] - cell_offsets[serving];

    NetworkRealization {
        typical_d0: typical_dk[0],
        bs_points,
        mu_points,
        association,
        bs_dist,
        order,
        typical_dk,
        serving,
        n0,
        window_radius,
        resample_count,
        cell_offsets,
        cell_members,
    }
}

/// Samples realization `index` of the run seeded by `seed`.
///
/// The basestation count is Poisson with mean `window_mean_points`, users are
/// Poisson with mean μπr², both uniform on the disc of radius
/// r = √(window_mean_points/(λπ)). The typical user sits at the origin and is
/// not part of `mu_points`. Draws with no basestation are discarded and
/// counted in `resample_count`.
pub fn sample_realization<T: Scalar>(cfg: &NetworkConfig<T>, seed: u64, index: u64) -> Result<NetworkRealization<T>> {
    cfg.validate()?;
    let mut rng = rng::stream(seed, index, Purpose::Geometry);
    let radius = cfg.window_radius();
    let bs_mean = cfg.window_mean_points.as_f64();
    let mu_mean = (cfg.mu_density * T::PI() * radius * radius).as_f64();
    let bs_law = Poisson::new(bs_mean).map_err(|e| Error::config("window_mean_points", e.to_string()))?;

    let mut resamples = 0u32;
    let n_bs = loop {
        let n = bs_law.sample(&mut rng) as usize;
        if n > 0 {
            break n;
        }
        resamples += 1;
    };
    let bs_points: Vec<[T; 2]> = (0..n_bs).map(|_| uniform_in_disc(&mut rng, radius)).collect();
    let n_mu = if mu_mean > 0.0 {
        Poisson::new(mu_mean)
            .map_err(|e| Error::config("mu_density", e.to_string()))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let mu_points: Vec<[T; 2]> = (0..n_mu).map(|_| uniform_in_disc(&mut rng, radius)).collect();
    Ok(assemble(bs_points, mu_points, radius, resamples))
}

/// CDF of the nearest-basestation distance: 1 − exp(−λπy²).
pub fn nearest_dist_cdf<T: Scalar>(density: T, y: T) -> T {
    if y <= T::zero() {
        return T::zero();
    }
    -(-density * T::PI() * y * y).exp_m1()
}

/// PDF of the k-th nearest basestation distance,
/// 2(λπ)^k y^{2k−1} exp(−λπy²)/(k−1)!.
pub fn kth_nearest_pdf<T: Scalar>(density: T, k: u32, y: T) -> Result<T> {
    if k == 0 {
        return Err(Error::Domain("k-th nearest distance needs k >= 1".into()));
    }
    if y <= T::zero() {
        return Ok(T::zero());
    }
    let lp = density * T::PI();
    let kf = T::lit(f64::from(k));
    let ln = T::LN_2() + kf * lp.ln() + (kf + kf - T::one()) * y.ln() - lp * y * y - special::ln_factorial::<T>(k - 1);
    Ok(ln.exp())
}

/// CDF of the k-th nearest distance, 1 − Σ_{i=0}^{k−1} e^{−λπy²}(λπy²)^i/i!.
pub fn kth_nearest_cdf<T: Scalar>(density: T, k: u32, y: T) -> Result<T> {
    if k == 0 {
        return Err(Error::Domain("k-th nearest distance needs k >= 1".into()));
    }
    if y <= T::zero() {
        return Ok(T::zero());
    }
    let v = density * T::PI() * y * y;
    Ok(special::gamma_p_int(k, v))
}

/// The `k` basestations nearest to the origin, by distance then index.
pub fn voronoi_neighbors<T: Scalar>(real: &NetworkRealization<T>, k: usize) -> Result<Vec<usize>> {
    if k > real.bs_count() {
        return Err(Error::Request(format!(
            "asked for {k} neighbours but the realization has {} basestations",
            real.bs_count()
        )));
    }
    Ok(real.order[..k].to_vec())
}
