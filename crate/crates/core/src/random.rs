//! Seeded random sampling of vectors, unitaries, states and effects.
//!
//! Every random stream is a ChaCha8 generator addressed by `(seed, stream)`,
//! which gives identical sequences on every platform and lets independent
//! work items (restarts, shot partitions) draw without coordination.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::qops::{CMatrix, CVector, C64};

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random unit vector.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| gaussian_c64(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    let qr = z.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Ginibre-ensemble density matrix of the given rank.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian_c64(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

/// Rank-one projector onto a Haar-random vector.
pub fn haar_projector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let v = haar_vector(dim, rng);
    &v * v.adjoint()
}

/// Random effect `U diag(u) U^dagger` with eigenvalues uniform in [0, 1].
pub fn random_effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary(dim, rng);
    let d = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(rng.random::<f64>(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &u * d * u.adjoint()
}

/// Random Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    (&g + g.adjoint()).scale(0.5)
}

/// Uniform point on the probability simplex (Dirichlet(1, ..., 1)).
pub fn dirichlet_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let xs: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = xs.iter().sum();
    xs.into_iter().map(|x| x / s).collect()
}

/// Kraus operators `K_i = <i|_env V` of a Haar-random isometry `V: C^d -> C^d (x) C^k`.
pub fn random_kraus<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<CMatrix> {
    let u = haar_unitary(d * k, rng);
    (0..k)
        .map(|i| CMatrix::from_fn(d, d, |a, b| u[(i * d + a, b)]))
        .collect()
}

/// Kraus operators `sqrt(w_i) U_i` of a random mixture of unitaries.
pub fn random_unital_kraus<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<CMatrix> {
    let w = dirichlet_uniform(k, rng);
    w.into_iter().map(|wi| haar_unitary(d, rng).scale(wi.sqrt())).collect()
}
