//! Precoding, exact SINR and the Monte Carlo rate oracle.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::config::RegPolicy;
use crate::error::{Error, Result};
use crate::linalg::{gram, matmul, CMatrix, Cholesky};
use crate::topology::LargeScaleProfile;

/// Above this condition estimate the ZF Gram matrix counts as singular.
pub const ZF_CONDITION_LIMIT: f64 = 1e12;

/// `F^m = G^{m H} (G^m G^{m H} + N_m alpha I)^{-1}`, `N_m x K_m`.
///
/// `alpha = 0` gives the right pseudo-inverse (zero forcing) and fails with
/// [`Error::Singular`] when the Gram matrix is numerically rank deficient.
pub fn rzf_matrix(g: &CMatrix, alpha: f64) -> Result<CMatrix> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig("regularization must be finite and >= 0"));
    }
    let n = g.cols();
    if alpha == 0.0 && n <= g.rows() {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let mut a = gram(g);
    a.shift_diag(n as f64 * alpha);
    let ch = Cholesky::factor(&a)?;
    if alpha == 0.0 {
        let condition = ch.condition_estimate();
        if condition > ZF_CONDITION_LIMIT {
            return Err(Error::Singular { condition });
        }
    }
    Ok(matmul(&g.adjoint(), &ch.inverse()))
}

/// `xi = sqrt(P / tr(F F^H))`.
pub fn power_normalization(f: &CMatrix, tx_power: f64) -> Result<f64> {
    let tr = f.frobenius_sq();
    if !(tr > 0.0) {
        return Err(Error::ZeroPrecoder);
    }
    Ok(libm::sqrt(tx_power / tr))
}

/// Per-subnetwork precoders and their normalization.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    /// `F^m`, `N_m x K_m`.
    pub f: Vec<CMatrix>,
    pub xi: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl PrecoderSet {
    pub fn build(channel: &ChannelRealization, alpha: &[f64], tx_power: f64) -> Result<Self> {
        let mm = channel.num_subnetworks();
        if alpha.len() != mm {
            return Err(Error::DimensionMismatch("one alpha per subnetwork"));
        }
        let mut f = Vec::with_capacity(mm);
        let mut xi = Vec::with_capacity(mm);
        for (m, &a) in alpha.iter().enumerate() {
            let fm = rzf_matrix(channel.own(m), a)?;
            xi.push(power_normalization(&fm, tx_power)?);
            f.push(fm);
        }
        Ok(Self {
            f,
            xi,
            alpha: alpha.to_vec(),
        })
    }

    /// Normalized precoder `W^m = xi_m F^m`.
    pub fn w(&self, m: usize) -> CMatrix {
        let mut w = self.f[m].clone();
        w.scale(self.xi[m]);
        w
    }
}

/// SINR of one user with its decomposition. `noise` is `N0 / xi_m^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub desired: f64,
    pub intra: f64,
    pub inter: f64,
    pub noise: f64,
    pub sinr: f64,
    pub rate: f64,
}

impl RateSample {
    pub fn from_terms(desired: f64, intra: f64, inter: f64, noise: f64) -> Self {
        let sinr = desired / (noise + intra + inter);
        Self {
            desired,
            intra,
            inter,
            noise,
            sinr,
            rate: libm::log2(1.0 + sinr),
        }
    }
}

fn check_user(channel: &ChannelRealization, precoders: &PrecoderSet, m: usize, k: usize) -> Result<()> {
    let mm = channel.num_subnetworks();
    if m >= mm || precoders.f.len() != mm {
        return Err(Error::DimensionMismatch("subnetwork index"));
    }
    if k >= channel.own(m).rows() {
        return Err(Error::DimensionMismatch("user index"));
    }
    for n in 0..mm {
        let g = channel
            .try_block(m, n)
            .ok_or(Error::DimensionMismatch("missing channel block"))?;
        if g.cols() != precoders.f[n].rows() {
            return Err(Error::DimensionMismatch("channel/precoder antenna count"));
        }
    }
    Ok(())
}

fn row_times(g_row: &[Complex64], f: &CMatrix) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); f.cols()];
    for (gi, frow) in g_row.iter().zip(f.as_slice().chunks_exact(f.cols().max(1))) {
        for (o, x) in out.iter_mut().zip(frow) {
            *o += gi * x;
        }
    }
    out
}

/// Exact SINR of user `k` of subnetwork `m` in the un-normalized form with
/// `N0 / xi_m^2` as noise and `xi_n^2 / xi_m^2` weighting the
/// inter-subnetwork terms.
pub fn compute_sinr(
    m: usize,
    k: usize,
    channel: &ChannelRealization,
    precoders: &PrecoderSet,
    noise_power: f64,
) -> Result<RateSample> {
    check_user(channel, precoders, m, k)?;
    let own = row_times(channel.own(m).row(k), &precoders.f[m]);
    let desired = own[k].norm_sqr();
    let intra: f64 = own
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    let xm2 = precoders.xi[m] * precoders.xi[m];
    let mut inter = 0.0;
    for n in (0..channel.num_subnetworks()).filter(|&n| n != m) {
        let v = row_times(channel.block(m, n).row(k), &precoders.f[n]);
        let xn2 = precoders.xi[n] * precoders.xi[n];
        inter += xn2 / xm2 * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(RateSample::from_terms(desired, intra, inter, noise_power / xm2))
}

/// SINR of user `k` computed from the normalized precoders `w = xi f`, i.e.
/// received powers at the antenna output with noise `N0`.
pub fn compute_sinr_normalized(
    m: usize,
    k: usize,
    channel: &ChannelRealization,
    precoders: &PrecoderSet,
    noise_power: f64,
) -> Result<f64> {
    check_user(channel, precoders, m, k)?;
    let mut signal = 0.0;
    let mut rest = noise_power;
    for n in 0..channel.num_subnetworks() {
        let v = row_times(channel.block(m, n).row(k), &precoders.w(n));
        for (j, z) in v.iter().enumerate() {
            if n == m && j == k {
                signal += z.norm_sqr();
            } else {
                rest += z.norm_sqr();
            }
        }
    }
    Ok(signal / rest)
}

/// All users of subnetwork `m`, using block products `G^{m,n} F^n`.
pub fn subnetwork_sinrs(
    m: usize,
    channel: &ChannelRealization,
    precoders: &PrecoderSet,
    noise_power: f64,
) -> Result<Vec<RateSample>> {
    let mm = channel.num_subnetworks();
    if m >= mm {
        return Err(Error::DimensionMismatch("subnetwork index"));
    }
    let km = channel.own(m).rows();
    let mut inter = vec![0.0; km];
    let xm2 = precoders.xi[m] * precoders.xi[m];
    for n in (0..mm).filter(|&n| n != m) {
        let g = channel
            .try_block(m, n)
            .ok_or(Error::DimensionMismatch("missing channel block"))?;
        if g.cols() != precoders.f[n].rows() {
            return Err(Error::DimensionMismatch("channel/precoder antenna count"));
        }
        let p = matmul(g, &precoders.f[n]);
        let w = precoders.xi[n] * precoders.xi[n] / xm2;
        for (acc, row) in inter.iter_mut().zip(p.as_slice().chunks_exact(p.cols().max(1))) {
            *acc += w * row.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    let s = matmul(channel.own(m), &precoders.f[m]);
    let noise = noise_power / xm2;
    Ok((0..km)
        .map(|k| {
            let row = s.row(k);
            let desired = row[k].norm_sqr();
            let total: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            RateSample::from_terms(desired, (total - desired).max(0.0), inter[k], noise)
        })
        .collect())
}

/// Which users a Monte Carlo draw evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserScope {
    All,
    /// Only the users of one subnetwork. Channel blocks that cannot affect
    /// them are not drawn.
    Subnetwork(usize),
}

impl UserScope {
    pub fn includes(&self, m: usize) -> bool {
        match *self {
            UserScope::All => true,
            UserScope::Subnetwork(c) => c == m,
        }
    }

    fn needs_block(&self, m: usize, n: usize) -> bool {
        m == n || self.includes(m)
    }
}

/// Regularization of every subnetwork under `policy`.
pub fn regularization(profile: &LargeScaleProfile, policy: RegPolicy, tx_power: f64, noise_power: f64) -> Vec<f64> {
    (0..profile.num_subnetworks())
        .map(|m| {
            let beta = profile.antennas(m) as f64 / profile.users(m) as f64;
            policy.alpha(beta, tx_power, noise_power)
        })
        .collect()
}

/// Inputs shared by all Monte Carlo draws of one network.
#[derive(Debug, Clone, Copy)]
pub struct McSetup<'a> {
    pub profile: &'a LargeScaleProfile,
    pub alpha: &'a [f64],
    pub tx_power: f64,
    pub noise_power: f64,
    pub seed: u64,
    pub network: u64,
    pub scope: UserScope,
}

/// Stream offset between retries of a draw whose ZF Gram matrix was singular.
const RETRY_STRIDE: u64 = 1 << 32;
const MAX_RETRIES: u64 = 64;

/// Outcome of one fading draw: per-subnetwork user samples (empty outside
/// the scope) and how many singular draws were replaced.
#[derive(Debug, Clone)]
pub struct DrawOutcome {
    pub samples: Vec<Vec<RateSample>>,
    pub resampled: usize,
}

/// Evaluates fading draw `draw`. A singular ZF draw is replaced by the next
/// retry stream of the same draw index.
pub fn mc_draw(setup: &McSetup<'_>, draw: u64) -> Result<DrawOutcome> {
    let mm = setup.profile.num_subnetworks();
    let mut last = Error::Singular {
        condition: f64::INFINITY,
    };
    for attempt in 0..MAX_RETRIES {
        let key = draw + attempt * RETRY_STRIDE;
        let channel = ChannelRealization::keyed(setup.profile, setup.seed, setup.network, key, |m, n| {
            setup.scope.needs_block(m, n)
        });
        let precoders = match PrecoderSet::build(&channel, setup.alpha, setup.tx_power) {
            Ok(p) => p,
            Err(e @ Error::Singular { .. }) => {
                last = e;
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut samples = Vec::with_capacity(mm);
        for m in 0..mm {
            if setup.scope.includes(m) {
                samples.push(subnetwork_sinrs(m, &channel, &precoders, setup.noise_power)?);
            } else {
                samples.push(Vec::new());
            }
        }
        return Ok(DrawOutcome {
            samples,
            resampled: attempt as usize,
        });
    }
    Err(last)
}

/// Per-user ergodic rates averaged over draws.
#[derive(Debug, Clone, PartialEq)]
pub struct McRates {
    /// `per_user[m][k]`; empty for subnetworks outside the scope.
    pub per_user: Vec<Vec<f64>>,
    pub draws: usize,
    pub resampled: usize,
}

impl McRates {
    /// Average rate over the users of subnetwork `m`.
    pub fn subnetwork_mean(&self, m: usize) -> f64 {
        let r = &self.per_user[m];
        r.iter().sum::<f64>() / r.len() as f64
    }
}

/// Accumulates draw outcomes in the order given.
pub fn average_draws<I: IntoIterator<Item = DrawOutcome>>(num_subnetworks: usize, outcomes: I) -> McRates {
    let mut sums: Vec<Vec<f64>> = vec![Vec::new(); num_subnetworks];
    let mut draws = 0;
    let mut resampled = 0;
    for o in outcomes {
        draws += 1;
        resampled += o.resampled;
        for (acc, s) in sums.iter_mut().zip(&o.samples) {
            if acc.is_empty() {
                acc.resize(s.len(), 0.0);
            }
            for (a, x) in acc.iter_mut().zip(s) {
                *a += x.rate;
            }
        }
    }
    for acc in &mut sums {
        acc.iter_mut().for_each(|a| *a /= draws as f64);
    }
    McRates {
        per_user: sums,
        draws,
        resampled,
    }
}

/// Sequential Monte Carlo estimate over draws `0..draws`.
pub fn mc_ergodic_rate(setup: &McSetup<'_>, draws: usize) -> Result<McRates> {
    if draws == 0 {
        return Err(Error::InvalidConfig("at least one draw"));
    }
    let outcomes = (0..draws as u64)
        .map(|d| mc_draw(setup, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(average_draws(setup.profile.num_subnetworks(), outcomes))
}

/// Diagonals of `Q = (G G^H / N - z I)^{-1}`, `S = Q^2` and of the
/// co-resolvents `Q~ = (G^H G / N - z I)^{-1}`, `S~ = Q~^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventDiag {
    pub q: Vec<f64>,
    pub s: Vec<f64>,
    pub q_tilde: Vec<f64>,
    pub s_tilde: Vec<f64>,
}

fn resolvent_and_square_diag(gram_n: &CMatrix, z: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = gram_n.clone();
    a.shift_diag(-z);
    let q = Cholesky::factor(&a)?.inverse();
    let n = q.rows();
    let d: Vec<f64> = (0..n).map(|i| q[(i, i)].re).collect();
    // Q is Hermitian, so [Q^2]_ii = sum_j |Q_ij|^2
    let s = (0..n).map(|i| q.row(i).iter().map(|x| x.norm_sqr()).sum()).collect();
    Ok((d, s))
}

/// Direct inversion; `z` must be negative.
pub fn empirical_resolvent_diag(g: &CMatrix, z: f64) -> Result<ResolventDiag> {
    if !(z < 0.0) {
        return Err(Error::InvalidConfig("resolvent needs z < 0"));
    }
    let n = g.cols() as f64;
    let mut inner = gram(g);
    inner.scale(1.0 / n);
    let mut outer = gram(&g.adjoint());
    outer.scale(1.0 / n);
    let (q, s) = resolvent_and_square_diag(&inner, z)?;
    let (q_tilde, s_tilde) = resolvent_and_square_diag(&outer, z)?;
    Ok(ResolventDiag { q, s, q_tilde, s_tilde })
}
