//! Network geometry, clustering into subnetworks, and large-scale fading.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        libm::sqrt(self.dist2(other))
    }
}

/// Three-slope path-loss amplitude with near-field clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    d0: f64,
    d1: f64,
    near: f64,
    mid_scale: f64,
}

impl PathLoss {
    pub fn new(d0: f64, d1: f64) -> Result<Self> {
        if !(d0.is_finite() && d1.is_finite() && d0 > 0.0 && d0 < d1) {
            return Err(Error::InvalidThresholds { d0, d1 });
        }
        let mid_scale = libm::pow(d1, -0.75);
        Ok(Self {
            d0,
            d1,
            near: mid_scale / d0,
            mid_scale,
        })
    }

    #[inline]
    pub fn gain(&self, d: f64) -> f64 {
        if d > self.d1 {
            libm::pow(d, -1.75)
        } else if d > self.d0 {
            self.mid_scale / d
        } else {
            self.near
        }
    }
}

/// `d^-1.75` beyond `d1`, `d1^-0.75 / d` on `(d0, d1]`, `d1^-0.75 / d0` below.
pub fn path_loss(d: f64, d0: f64, d1: f64) -> Result<f64> {
    Ok(PathLoss::new(d0, d1)?.gain(d))
}

/// Draws `ceil(beta K / antennas_per_bs)` BS and `K` user positions,
/// i.i.d. uniform on the square `[0, D]^2`.
pub fn place_uniform<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> (Vec<Point>, Vec<Point>) {
    let side = config.area_side;
    let mut draw = |n: usize| -> Vec<Point> {
        (0..n)
            .map(|_| Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
            .collect()
    };
    let bs = draw(config.num_bs());
    let users = draw(config.total_users);
    (bs, users)
}

fn nearest(p: &Point, centroids: &[Point]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, q) in centroids.iter().enumerate() {
        let d = p.dist2(q);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// k-means++ seeding: first centre uniform, the rest with probability
/// proportional to the squared distance to the nearest chosen centre.
pub fn kmeans_pp_seeds<R: Rng + ?Sized>(points: &[Point], k: usize, rng: &mut R) -> Vec<Point> {
    assert!(!points.is_empty() && k >= 1);
    let mut centres = Vec::with_capacity(k);
    centres.push(points[rng.random_range(0..points.len())]);
    let mut d2: Vec<f64> = points.iter().map(|p| p.dist2(&centres[0])).collect();
    while centres.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut idx = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target {
                    idx = i;
                    break;
                }
            }
            idx
        } else {
            // all points coincide with chosen centres
            rng.random_range(0..points.len())
        };
        let c = points[pick];
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(p.dist2(&c));
        }
        centres.push(c);
    }
    centres
}

/// Result of Lloyd's iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Point>,
    pub sweeps: usize,
}

/// Lloyd's algorithm from the given centres. Stops when no centre moves more
/// than `tol` or after `max_sweeps`. Empty clusters keep their centre.
pub fn lloyd(points: &[Point], init: Vec<Point>, tol: f64, max_sweeps: usize) -> Clustering {
    let k = init.len();
    let mut centroids = init;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut sum = vec![(0.0f64, 0.0f64, 0usize); k];
        for p in points {
            let c = nearest(p, &centroids);
            sum[c].0 += p.x;
            sum[c].1 += p.y;
            sum[c].2 += 1;
        }
        let mut moved = 0.0f64;
        for (c, &(sx, sy, n)) in centroids.iter_mut().zip(&sum) {
            if n > 0 {
                let next = Point::new(sx / n as f64, sy / n as f64);
                moved = moved.max(c.dist(&next));
                *c = next;
            }
        }
        if moved < tol {
            break;
        }
    }
    let assignment = points.iter().map(|p| nearest(p, &centroids)).collect();
    Clustering {
        assignment,
        centroids,
        sweeps,
    }
}

/// Subnetwork labels for BSs and users.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignments {
    pub bs: Vec<usize>,
    pub users: Vec<usize>,
}

/// Joint K-means on BS and user coordinates. Fails with `Degenerate` if a
/// subnetwork gets no BS or no user.
pub fn cluster_kmeans<R: Rng + ?Sized>(
    bs_positions: &[Point],
    user_positions: &[Point],
    num_subnetworks: usize,
    area_side: f64,
    rng: &mut R,
) -> Result<Assignments> {
    let points: Vec<Point> = bs_positions.iter().chain(user_positions).copied().collect();
    let seeds = kmeans_pp_seeds(&points, num_subnetworks, rng);
    let clustering = lloyd(&points, seeds, 1e-6 * area_side, 100);
    let (bs, users) = clustering.assignment.split_at(bs_positions.len());
    let assignments = Assignments {
        bs: bs.to_vec(),
        users: users.to_vec(),
    };
    for m in 0..num_subnetworks {
        if !assignments.bs.contains(&m) || !assignments.users.contains(&m) {
            return Err(Error::Degenerate { subnetwork: m });
        }
    }
    Ok(assignments)
}

/// Members of one subnetwork.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Subnetwork {
    /// Global BS indices, ascending.
    pub bs: Vec<usize>,
    /// Global user indices, ascending.
    pub users: Vec<usize>,
    /// Total transmit antennas `N_m`.
    pub antennas: usize,
}

impl Subnetwork {
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn beta(&self) -> f64 {
        self.antennas as f64 / self.users.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Topology {
    pub area_side: f64,
    pub antennas_per_bs: usize,
    pub bs_positions: Vec<Point>,
    pub user_positions: Vec<Point>,
    pub bs_assignment: Vec<usize>,
    pub user_assignment: Vec<usize>,
    pub subnetworks: Vec<Subnetwork>,
    pub central_index: usize,
}

impl Topology {
    pub fn from_assignments(
        area_side: f64,
        antennas_per_bs: usize,
        bs_positions: Vec<Point>,
        user_positions: Vec<Point>,
        assignments: Assignments,
        num_subnetworks: usize,
    ) -> Result<Self> {
        if assignments.bs.len() != bs_positions.len() || assignments.users.len() != user_positions.len() {
            return Err(Error::DimensionMismatch("assignment length"));
        }
        let mut subnetworks: Vec<Subnetwork> = (0..num_subnetworks)
            .map(|_| Subnetwork {
                bs: Vec::new(),
                users: Vec::new(),
                antennas: 0,
            })
            .collect();
        for (b, &m) in assignments.bs.iter().enumerate() {
            let s = subnetworks
                .get_mut(m)
                .ok_or(Error::DimensionMismatch("subnetwork label"))?;
            s.bs.push(b);
            s.antennas += antennas_per_bs;
        }
        for (u, &m) in assignments.users.iter().enumerate() {
            let s = subnetworks
                .get_mut(m)
                .ok_or(Error::DimensionMismatch("subnetwork label"))?;
            s.users.push(u);
        }
        if let Some(m) = subnetworks.iter().position(|s| s.bs.is_empty() || s.users.is_empty()) {
            return Err(Error::Degenerate { subnetwork: m });
        }
        let mut topo = Self {
            area_side,
            antennas_per_bs,
            bs_positions,
            user_positions,
            bs_assignment: assignments.bs,
            user_assignment: assignments.users,
            subnetworks,
            central_index: 0,
        };
        topo.central_index = central_subnetwork(&topo);
        Ok(topo)
    }

    pub fn num_subnetworks(&self) -> usize {
        self.subnetworks.len()
    }

    /// `(K_m, N_m, beta_m)` for every subnetwork.
    pub fn per_subnetwork(&self) -> Vec<(usize, usize, f64)> {
        self.subnetworks
            .iter()
            .map(|s| (s.users.len(), s.antennas, s.beta()))
            .collect()
    }

    pub fn total_antennas(&self) -> usize {
        self.subnetworks.iter().map(|s| s.antennas).sum()
    }

    /// Centroid of all nodes (BSs and users) of subnetwork `m`.
    pub fn node_centroid(&self, m: usize) -> Point {
        let s = &self.subnetworks[m];
        let pts =
            s.bs.iter()
                .map(|&b| self.bs_positions[b])
                .chain(s.users.iter().map(|&u| self.user_positions[u]));
        let (mut x, mut y, mut n) = (0.0, 0.0, 0usize);
        for p in pts {
            x += p.x;
            y += p.y;
            n += 1;
        }
        Point::new(x / n as f64, y / n as f64)
    }
}

/// Index of the subnetwork whose node centroid is closest to the centre of
/// the area; ties go to the lowest index.
pub fn central_subnetwork(topology: &Topology) -> usize {
    let half = topology.area_side / 2.0;
    let centre = Point::new(half, half);
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for m in 0..topology.num_subnetworks() {
        let d = topology.node_centroid(m).dist2(&centre);
        if d < best_d {
            best_d = d;
            best = m;
        }
    }
    best
}

/// Per-pair large-scale coefficients `l^{m,n}` (users of `m` by antennas of
/// `n`) and their squares `theta^{m,n}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LargeScaleProfile {
    num_subnetworks: usize,
    amplitude: Vec<RMatrix>,
    variance: Vec<RMatrix>,
}

impl LargeScaleProfile {
    /// Builds a profile from amplitude blocks in `(m, n)` row-major order.
    pub fn from_amplitudes(num_subnetworks: usize, amplitude: Vec<RMatrix>) -> Result<Self> {
        let m2 = num_subnetworks * num_subnetworks;
        if amplitude.len() != m2 {
            return Err(Error::DimensionMismatch("profile needs M^2 blocks"));
        }
        for m in 0..num_subnetworks {
            for n in 0..num_subnetworks {
                let b = &amplitude[m * num_subnetworks + n];
                if b.rows() != amplitude[m * num_subnetworks].rows()
                    || b.cols() != amplitude[n * num_subnetworks + n].cols()
                {
                    return Err(Error::DimensionMismatch("inconsistent profile block shapes"));
                }
            }
        }
        let variance = amplitude.iter().map(|b| b.map(|l| l * l)).collect();
        Ok(Self {
            num_subnetworks,
            amplitude,
            variance,
        })
    }

    pub fn num_subnetworks(&self) -> usize {
        self.num_subnetworks
    }

    /// `l^{m,n}`, `K_m x N_n`.
    pub fn l(&self, m: usize, n: usize) -> &RMatrix {
        &self.amplitude[m * self.num_subnetworks + n]
    }

    /// `theta^{m,n} = l^{m,n} o l^{m,n}`.
    pub fn theta(&self, m: usize, n: usize) -> &RMatrix {
        &self.variance[m * self.num_subnetworks + n]
    }

    pub fn users(&self, m: usize) -> usize {
        self.l(m, m).rows()
    }

    pub fn antennas(&self, n: usize) -> usize {
        self.l(n, n).cols()
    }
}

/// Evaluates the path loss for every user/antenna pair. Antennas of the same
/// BS share the coefficient of that BS.
pub fn build_large_scale(topology: &Topology, d0: f64, d1: f64) -> Result<LargeScaleProfile> {
    let pl = PathLoss::new(d0, d1)?;
    let m_count = topology.num_subnetworks();
    let per_bs = topology.antennas_per_bs;
    let mut blocks = Vec::with_capacity(m_count * m_count);
    for sm in &topology.subnetworks {
        for sn in &topology.subnetworks {
            let block = RMatrix::from_fn(sm.users.len(), sn.antennas, |k, j| {
                let user = topology.user_positions[sm.users[k]];
                let bs = topology.bs_positions[sn.bs[j / per_bs]];
                pl.gain(user.dist(&bs))
            });
            blocks.push(block);
        }
    }
    LargeScaleProfile::from_amplitudes(m_count, blocks)
}

/// Upper bound on resampling attempts before a configuration is declared
/// unusable.
pub const MAX_RESAMPLES: usize = 1000;

/// A network realization: topology, its profile and how many draws were
/// rejected before it.
#[derive(Debug, Clone)]
pub struct Network {
    pub topology: Topology,
    pub profile: LargeScaleProfile,
    pub resamples: usize,
}

/// Draws network realization `index` of the scenario. Degenerate clusterings
/// (and, under ZF, subnetworks with `beta_m <= 1`) are rejected and the whole
/// network is redrawn from the same stream.
pub fn sample_network(config: &NetworkConfig, index: u64) -> Result<Network> {
    config.validate()?;
    let mut rng = rng::stream(config.seed, &[rng::NETWORK, index]);
    let mut last = Error::Degenerate { subnetwork: 0 };
    for resamples in 0..MAX_RESAMPLES {
        let (bs, users) = place_uniform(config, &mut rng);
        let assignments = match cluster_kmeans(&bs, &users, config.num_subnetworks, config.area_side, &mut rng) {
            Ok(a) => a,
            Err(e) => {
                last = e;
                continue;
            }
        };
        let topology = Topology::from_assignments(
            config.area_side,
            config.antennas_per_bs,
            bs,
            users,
            assignments,
            config.num_subnetworks,
        )?;
        if config.reg_policy.is_zf() {
            if let Some(m) = topology.subnetworks.iter().position(|s| s.antennas <= s.users.len()) {
                last = Error::Degenerate { subnetwork: m };
                continue;
            }
        }
        let profile = build_large_scale(&topology, config.near_threshold, config.far_threshold)?;
        return Ok(Network {
            topology,
            profile,
            resamples,
        });
    }
    Err(last)
}
