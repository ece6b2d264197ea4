#![allow(dead_code)]

use cfnet_core::linalg::RMatrix;
use cfnet_core::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense complex matrix as nested rows, kept separate from the library type.
pub type Dense = Vec<Vec<Complex64>>;

pub fn zeros(r: usize, c: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); c]; r]
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let (r, inner, c) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(r, c);
    for i in 0..r {
        for k in 0..inner {
            let x = a[i][k];
            for j in 0..c {
                out[i][j] += x * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Dense) -> Dense {
    let (r, c) = (a.len(), a[0].len());
    let mut out = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = zeros(n, n);
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))
            .unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != Complex64::new(0.0, 0.0) {
                    for j in 0..n {
                        let (mc, ic) = (m[col][j], inv[col][j]);
                        m[r][j] -= f * mc;
                        inv[r][j] -= f * ic;
                    }
                }
            }
        }
    }
    inv
}

pub fn from_lib(g: &cfnet_core::CMatrix) -> Dense {
    (0..g.rows()).map(|i| g.row(i).to_vec()).collect()
}

/// Box-Muller CN(0, 1) sample, independent of the library's sampler.
pub fn cn(rng: &mut impl Rng) -> Complex64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    Complex64::new(r * t.cos(), r * t.sin())
}

/// Variance profile with i.i.d. uniform entries on `[0, scale]`.
pub fn uniform_profile(k: usize, n: usize, scale: f64, rng: &mut impl Rng) -> RMatrix {
    RMatrix::from_fn(k, n, |_, _| scale * rng.random::<f64>())
}

/// Channel with `E|g_ij|^2 = theta_ij`.
pub fn channel_from_profile(theta: &RMatrix, rng: &mut impl Rng) -> cfnet_core::CMatrix {
    cfnet_core::CMatrix::from_fn(theta.rows(), theta.cols(), |i, j| cn(rng) * theta.get(i, j).sqrt())
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
