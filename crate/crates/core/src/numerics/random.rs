//! Seeded random matrices for the sampled suites.
//!
//! Everything draws from a caller-supplied `ChaCha8Rng` so that verification
//! runs are reproducible from a single `u64` seed.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{c, cr, CMat};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut SeededRng) -> f64 {
    // Box-Muller; two uniform draws per normal keeps the stream simple.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian(rng: &mut SeededRng) -> Complex64 {
    c(gaussian(rng), gaussian(rng))
}

/// Dense complex Gaussian matrix.
pub fn matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> CMat {
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMat::from_fn(rows, cols, |i, j| entries[i * cols + j])
}

pub fn hermitian(rng: &mut SeededRng, n: usize) -> CMat {
    matrix(rng, n, n).hermitian_part()
}

/// Hermitian with operator norm scaled to `norm`.
pub fn hermitian_with_norm(rng: &mut SeededRng, n: usize, norm: f64) -> CMat {
    let h = hermitian(rng, n);
    let cur = h.op_norm();
    if cur == 0.0 {
        return h;
    }
    h.scale_f(norm / cur)
}

/// Well-conditioned invertible matrix (Gaussian shifted away from
/// singularity by a multiple of the identity).
pub fn invertible(rng: &mut SeededRng, n: usize) -> CMat {
    loop {
        let m = matrix(rng, n, n).scale_f(1.0 / (n as f64).sqrt());
        let shifted = m + CMat::scalar(n, cr(2.0));
        if shifted.is_invertible(1e-6) {
            return shifted;
        }
    }
}

/// Haar-like unitary from the QR factorization of a Gaussian matrix.
pub fn unitary(rng: &mut SeededRng, n: usize) -> CMat {
    let m = matrix(rng, n, n);
    let qr = m.into_inner().qr();
    let q = qr.q();
    let r = qr.r();
    // fix phases so the distribution does not depend on the QR convention
    let phases: Vec<Complex64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                cr(1.0)
            }
        })
        .collect();
    CMat::from(q) * CMat::diag_c(&phases)
}

/// Random hermitian (self-adjoint) involution: a unitary conjugate of a
/// random signature matrix.  `signature` forces the number of +1 eigenvalues
/// when given.
pub fn hermitian_involution(rng: &mut SeededRng, n: usize, plus: Option<usize>) -> CMat {
    let u = unitary(rng, n);
    let k = plus.unwrap_or_else(|| 1 + rng.random_range(0..n.max(2) - 1).min(n - 1));
    let signs: Vec<f64> = (0..n).map(|i| if i < k { 1.0 } else { -1.0 }).collect();
    &(&u * &CMat::diag_f(&signs)) * &u.adjoint_m()
}

/// Positive definite hermitian matrix with eigenvalues in `[lo, hi]`.
pub fn positive_definite(rng: &mut SeededRng, n: usize, lo: f64, hi: f64) -> CMat {
    let u = unitary(rng, n);
    let eigs: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    &(&u * &CMat::diag_f(&eigs)) * &u.adjoint_m()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_have_expected_structure() {
        let mut rng = rng_from_seed(7);
        let u = unitary(&mut rng, 5);
        assert!(u.is_unitary(1e-10));
        let f = hermitian_involution(&mut rng, 4, Some(2));
        assert!(f.is_involution(1e-10));
        assert!(f.is_hermitian(1e-10));
        let q = positive_definite(&mut rng, 4, 0.5, 2.0);
        let (vals, _) = q.hermitian_eigen();
        assert!(vals[0] > 0.4);
    }

    #[test]
    fn determinism_from_seed() {
        let a = matrix(&mut rng_from_seed(42), 3, 3);
        let b = matrix(&mut rng_from_seed(42), 3, 3);
        assert_eq!(a, b);
    }
}
