//! Constructed module families used by the randomized suites, the
//! acceptance tests and the CLI's sampled checks.
//!
//! The basic shape is `C^d (x) C^2` with the algebra acting on the first
//! factor, so the commutant is `1 (x) M_2` and every structural element
//! (grading, planted contractions, compatible involutions) can be written
//! down in closed form and then hidden behind a random unitary change of
//! basis.

use crate::fredholm::FredholmModule;
use crate::moebius::{self, MoebiusElement};
use crate::numerics::random::SeededRng;
use crate::numerics::{c, cr, random, CMat};
use crate::polarized::{self, PolarizedModule};
use crate::star_algebra::StarAlgebra;

fn flip() -> CMat {
    CMat::from_rows_f(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}

fn sigma3() -> CMat {
    CMat::diag_f(&[1.0, -1.0])
}

/// Even module on `C^d (x) C^2`: `pi(a) = a (x) 1`, grading `1 (x) diag(1,-1)`,
/// `F = 1 (x) flip`, standard inner product.
pub fn tensor_even_module(d: usize) -> FredholmModule {
    let alg = StarAlgebra::full(d, 1e-9);
    let id2 = CMat::identity(2);
    let pi: Vec<CMat> = alg.basis().iter().map(|a| a.kron(&id2)).collect();
    let gamma = CMat::identity(d).kron(&sigma3());
    let f = CMat::identity(d).kron(&flip());
    FredholmModule::new(pi, Some(gamma), f, None).expect("tensor fixture is well formed")
}

/// Random Moebius element in the commutant `1 (x) M_2` of the tensor module.
pub fn commutant_moebius(rng: &mut SeededRng, d: usize) -> MoebiusElement {
    let x2 = random::invertible(rng, 2);
    let x = CMat::identity(d).kron(&x2);
    moebius::from_invertible(&x, 1e-9).expect("invertible block gives a Moebius element")
}

/// Random gram-unitary commuting with the representation of the tensor
/// module (an element `1 (x) u`).
pub fn commutant_unitary(rng: &mut SeededRng, d: usize) -> CMat {
    CMat::identity(d).kron(&random::unitary(rng, 2))
}

/// A synthetic polarized module with one known compatible involution and
/// generators for further ones.
pub struct SyntheticPolarized {
    pub module: PolarizedModule,
    /// A compatible involution, rotated along with the module.
    pub gamma0: CMat,
    /// Change of basis applied to the closed-form construction.
    rotation: CMat,
    /// Weights of the fiber inner product before rotation.
    weights: (f64, f64),
    d: usize,
}

impl SyntheticPolarized {
    pub fn dim(&self) -> usize {
        2 * self.d
    }

    /// A random contraction that is hermitian for the `gamma0` inner
    /// product, anticommutes with `gamma0`, lies in the commutant of the
    /// representation, and has `gamma0`-operator norm `norm`.
    pub fn planted_contraction(&self, rng: &mut SeededRng, norm: f64) -> CMat {
        let (p1, p2) = self.weights;
        let z = random::complex_gaussian(rng);
        let z = if z.norm() < 1e-6 { cr(1.0) } else { z };
        // fiber block [[0, w], [z, 0]] with w = conj(z) p2/p1 is P-hermitian
        // and anticommutes with diag(1, -1)
        let w = z.conj() * cr(p2 / p1);
        let fiber = CMat::from_rows_c(&[vec![cr(0.0), w], vec![z, cr(0.0)]]);
        let m0 = CMat::identity(self.d).kron(&fiber);
        let m = &(&self.rotation * &m0) * &self.rotation.adjoint_m();
        let ip0 = self
            .module
            .inner_product_of(&self.gamma0, 1e-9)
            .expect("gamma0 is compatible");
        let cur = ip0.op_norm(&m);
        m.scale_f(norm / cur)
    }

    /// A fresh compatible involution at distance controlled by `norm`.
    pub fn random_compatible(&self, rng: &mut SeededRng, norm: f64) -> CMat {
        let m = self.planted_contraction(rng, norm);
        polarized::deform_involution(&self.gamma0, &m, 1e-12)
            .expect("1 + m is invertible for a strict contraction")
    }

    /// Random gram-unitary (for the `gamma0` lift) commuting with the
    /// representation.
    pub fn commutant_unitary(&self, rng: &mut SeededRng) -> CMat {
        let (p1, p2) = self.weights;
        let p_half = CMat::diag_f(&[p1.sqrt(), p2.sqrt()]);
        let p_half_inv = CMat::diag_f(&[1.0 / p1.sqrt(), 1.0 / p2.sqrt()]);
        let v = &(&p_half_inv * &random::unitary(rng, 2)) * &p_half;
        let u0 = CMat::identity(self.d).kron(&v);
        &(&self.rotation * &u0) * &self.rotation.adjoint_m()
    }
}

/// Builds a rotated synthetic polarized module of dimension `2d`:
/// fiber weights `(p1, p2)` give the Krein form `1 (x) diag(p1, -p2)`, the
/// isotropic subspace is spanned by `e_i (x) (sqrt(p2), sqrt(p1))`, and the
/// whole structure is conjugated by a random unitary.
pub fn synthetic_polarized(rng: &mut SeededRng, d: usize) -> SyntheticPolarized {
    let p1 = 0.5 + 1.5 * rng_f(rng);
    let p2 = 0.5 + 1.5 * rng_f(rng);
    let alg = StarAlgebra::full(d, 1e-9);
    let id2 = CMat::identity(2);
    let pi0: Vec<CMat> = alg.basis().iter().map(|a| a.kron(&id2)).collect();
    let gamma0 = CMat::identity(d).kron(&sigma3());
    let s0 = CMat::identity(d).kron(&CMat::diag_f(&[p1, -p2]));
    let norm = (p1 + p2).sqrt();
    let v = [p2.sqrt() / norm, p1.sqrt() / norm];
    let e0 = CMat::from_fn(2 * d, d, |row, col| {
        if row / 2 == col {
            cr(v[row % 2])
        } else {
            cr(0.0)
        }
    });
    let u = random::unitary(rng, 2 * d);
    let ud = u.adjoint_m();
    let module = PolarizedModule::new(
        &(&u * &s0) * &ud,
        pi0.iter().map(|p| &(&u * p) * &ud).collect(),
        &u * &e0,
    )
    .expect("synthetic module is well formed");
    SyntheticPolarized {
        module,
        gamma0: &(&u * &gamma0) * &ud,
        rotation: u,
        weights: (p1, p2),
        d,
    }
}

fn rng_f(rng: &mut SeededRng) -> f64 {
    use rand::Rng;
    rng.random::<f64>()
}

/// A dim-2 fixture that is real with `epsilon = -1`: the Krein form
/// `[[0, i], [-i, 0]]` serves as its own compatible involution.
pub fn imaginary_real_fixture() -> (PolarizedModule, CMat) {
    let s = CMat::from_rows_c(&[vec![cr(0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), cr(0.0)]]);
    let e = CMat::from_rows_f(&[vec![1.0], vec![1.0]]).scale_f(1.0 / 2.0_f64.sqrt());
    let p = PolarizedModule::new(s.clone(), vec![CMat::identity(2)], e)
        .expect("fixture is well formed");
    (p, s)
}

/// Samples a hermitian involution inside a *-algebra span by taking the
/// sign of a random hermitian member (sign computed by the involution
/// repair, which stays inside the algebra).
pub fn involution_in_algebra(alg: &StarAlgebra, rng: &mut SeededRng) -> Option<CMat> {
    for _ in 0..20 {
        let mut h = CMat::zeros(alg.ambient_dim(), alg.ambient_dim());
        for b in alg.basis() {
            h = h + b.scale_c(random::complex_gaussian(rng));
        }
        let h = h.hermitian_part();
        let (vals, _) = h.hermitian_eigen();
        let min_abs = vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let max_abs = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if max_abs == 0.0 || min_abs < 0.05 * max_abs {
            continue;
        }
        // all eigenvalues of the same sign give +-identity; keep those too,
        // they are legitimate involutions
        let sign = h.hermitian_fn(f64::signum);
        if sign.involution_residual() < 1e-10 && alg.contains(&sign, 1e-7) {
            return Some(sign);
        }
    }
    None
}
