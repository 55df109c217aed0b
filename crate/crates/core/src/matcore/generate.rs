//! Seeded random matrix generators for tests, suites and the fuzzer.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::SymMatrix;

/// Shift added to `A` in [`gen_loewner_pair`] so that `A` is positive definite.
pub const LOEWNER_PAIR_EPSILON: f64 = 0.01;

/// Deterministic generator for `(seed, stream)`. Trial `i` of a seeded run
/// uses stream `i`, which keeps parallel runs reproducible.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Entries drawn iid from `N(0, 1/dim)`.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let s = 1.0 / (cols.max(1) as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| {
        let z: f64 = rng.sample(StandardNormal);
        z * s
    })
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SymMatrix {
    SymMatrix::symmetrized(gaussian_matrix(rng, dim, dim))
}

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// Positive definite matrix with eigenvalues log-uniform in `[lo, hi]`.
pub fn random_pd<R: Rng + ?Sized>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> SymMatrix {
    assert!(lo > 0.0 && hi >= lo);
    let q = random_orthogonal(rng, dim);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let eigs: Vec<f64> = (0..dim)
        .map(|_| (llo + (lhi - llo) * rng.random::<f64>()).exp())
        .collect();
    let mut scaled = q.clone();
    for (c, &e) in eigs.iter().enumerate() {
        scaled.column_mut(c).scale_mut(e);
    }
    SymMatrix::symmetrized(scaled * q.transpose())
}

/// Gram matrix `CᵀC` with `C` of shape `rank × dim`. `rank < dim` makes it singular.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> SymMatrix {
    let c = gaussian_matrix(rng, rank.max(1), dim);
    SymMatrix::symmetrized(c.transpose() * c)
}

/// Pair with `A ⩾ B ⩾ 0` and `A > 0`: `B = CᵀC`, `A = B + DᵀD + ε·I`.
pub fn gen_loewner_pair(seed: u64, dim: usize) -> (SymMatrix, SymMatrix) {
    let mut rng = rng_for(seed, 0);
    gen_loewner_pair_from(&mut rng, dim)
}

pub fn gen_loewner_pair_from<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (SymMatrix, SymMatrix) {
    assert!(dim >= 1, "dimension must be at least 1");
    let c = gaussian_matrix(rng, dim, dim);
    let d = gaussian_matrix(rng, dim, dim);
    let b = c.transpose() * c;
    let gap = d.transpose() * d + DMatrix::identity(dim, dim) * LOEWNER_PAIR_EPSILON;
    let a = &b + gap;
    (SymMatrix::symmetrized(a), SymMatrix::symmetrized(b))
}
