//! Small-scale fading and channel assembly.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::rng;
use crate::topology::LargeScaleProfile;

/// `rows x cols` matrix of i.i.d. CN(0, 1) entries: real and imaginary parts
/// are independent N(0, 1/2).
pub fn draw_small_scale<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Channel matrices `G^{m,n} = l^{m,n} o H^{m,n}` for one fading draw.
/// Blocks that were not requested are absent.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    num_subnetworks: usize,
    blocks: Vec<Option<CMatrix>>,
}

impl ChannelRealization {
    pub fn num_subnetworks(&self) -> usize {
        self.num_subnetworks
    }

    pub fn try_block(&self, m: usize, n: usize) -> Option<&CMatrix> {
        self.blocks.get(m * self.num_subnetworks + n)?.as_ref()
    }

    /// `G^{m,n}`; panics if the block was not drawn.
    pub fn block(&self, m: usize, n: usize) -> &CMatrix {
        self.try_block(m, n).expect("channel block was not drawn")
    }

    /// `G^m = G^{m,m}`.
    pub fn own(&self, m: usize) -> &CMatrix {
        self.block(m, m)
    }

    /// Draws each requested block from its own stream keyed by
    /// `(seed, FADING, network, draw, m, n)`.
    pub fn keyed(
        profile: &LargeScaleProfile,
        seed: u64,
        network: u64,
        draw: u64,
        mut wanted: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mm = profile.num_subnetworks();
        let mut blocks = Vec::with_capacity(mm * mm);
        for m in 0..mm {
            for n in 0..mm {
                if wanted(m, n) {
                    let mut r = rng::stream(seed, &[rng::FADING, network, draw, m as u64, n as u64]);
                    blocks.push(Some(apply_profile(profile, m, n, &mut r)));
                } else {
                    blocks.push(None);
                }
            }
        }
        Self {
            num_subnetworks: mm,
            blocks,
        }
    }

    pub fn from_blocks(num_subnetworks: usize, blocks: Vec<CMatrix>) -> Self {
        assert_eq!(blocks.len(), num_subnetworks * num_subnetworks);
        Self {
            num_subnetworks,
            blocks: blocks.into_iter().map(Some).collect(),
        }
    }
}

fn apply_profile<R: Rng + ?Sized>(profile: &LargeScaleProfile, m: usize, n: usize, rng: &mut R) -> CMatrix {
    let l = profile.l(m, n);
    let mut h = draw_small_scale(l.rows(), l.cols(), rng);
    for (z, &a) in h.as_mut_slice().iter_mut().zip(l.as_slice()) {
        *z *= a;
    }
    h
}

/// Draws every block `(m, n)` in order from one stream.
pub fn assemble_channel<R: Rng + ?Sized>(profile: &LargeScaleProfile, rng: &mut R) -> ChannelRealization {
    let mm = profile.num_subnetworks();
    let mut blocks = Vec::with_capacity(mm * mm);
    for m in 0..mm {
        for n in 0..mm {
            blocks.push(apply_profile(profile, m, n, rng));
        }
    }
    ChannelRealization::from_blocks(mm, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMatrix;

    #[test]
    fn unit_power_and_zero_mean() {
        let mut r = rng::stream(42, &[]);
        let n = 100_000;
        let h = draw_small_scale(1, n, &mut r);
        let power: f64 = h.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((power - 1.0).abs() < 0.02, "E|h|^2 = {power}");
        let mean: Complex64 = h.as_slice().iter().sum::<Complex64>() / n as f64;
        // each component of the mean has std sqrt(1/2 / n)
        let sigma = (0.5 / n as f64).sqrt();
        assert!(
            mean.re.abs() < 3.0 * sigma && mean.im.abs() < 3.0 * sigma,
            "mean {mean}"
        );
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = draw_small_scale(3, 4, &mut rng::stream(9, &[1]));
        let b = draw_small_scale(3, 4, &mut rng::stream(9, &[1]));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_profile_block_annihilates() {
        let l = alloc::vec![
            RMatrix::filled(2, 3, 1.0),
            RMatrix::zeros(2, 2),
            RMatrix::filled(1, 3, 0.5),
            RMatrix::filled(1, 2, 2.0),
        ];
        let p = LargeScaleProfile::from_amplitudes(2, l).unwrap();
        let g = assemble_channel(&p, &mut rng::stream(3, &[]));
        assert!(g.block(0, 1).as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(g.block(0, 0).frobenius_sq() > 0.0);
    }

    #[test]
    fn keyed_blocks_do_not_depend_on_selection() {
        let l = alloc::vec![
            RMatrix::filled(2, 3, 1.0),
            RMatrix::filled(2, 2, 1.0),
            RMatrix::filled(1, 3, 1.0),
            RMatrix::filled(1, 2, 1.0)
        ];
        let p = LargeScaleProfile::from_amplitudes(2, l).unwrap();
        let all = ChannelRealization::keyed(&p, 5, 0, 3, |_, _| true);
        let some = ChannelRealization::keyed(&p, 5, 0, 3, |m, _| m == 1);
        assert!(some.try_block(0, 0).is_none());
        assert_eq!(all.block(1, 0), some.block(1, 0));
        assert_eq!(all.block(1, 1), some.block(1, 1));
        let other = ChannelRealization::keyed(&p, 5, 0, 4, |_, _| true);
        assert_ne!(all.block(0, 0), other.block(0, 0));
    }
}
