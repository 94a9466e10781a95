//! The Moebius group of pairs `(a, b)` satisfying the Connes identities.
//!
//! Through `x = a + b` the group is isomorphic to the invertible elements of
//! the algebra, which gives unitary/positive classification, two polar
//! decompositions, the Cayley transform between positive elements and
//! self-adjoint contractions, the hyperbolic parametrization of positive
//! elements, and the deformation retraction onto the unitary subgroup.

use crate::error::{Error, Result};
use crate::numerics::{CMat, InnerProduct};
use crate::projective::TwoByTwo;
use crate::report::{Check, CheckReport};

/// An element of the Moebius group: the block matrix `[[a, b], [b, a]]`
/// whose coefficients satisfy the Connes identities.
#[derive(Clone, Debug)]
pub struct MoebiusElement {
    pub a: CMat,
    pub b: CMat,
}

/// Residuals of the four Connes identities
/// `a*a - b*b = 1`, `a*b - b*a = 0`, `aa* - bb* = 1`, `ab* - ba* = 0`.
#[derive(Clone, Debug)]
pub struct ConnesReport {
    pub residuals: [f64; 4],
    pub max_residual: f64,
    pub pass: bool,
}

/// Checks the Connes identities with adjoints taken in the inner product
/// `ip` (plain adjoints for the identity Gram matrix).
pub fn connes_check_weighted(a: &CMat, b: &CMat, ip: &InnerProduct, tol: f64) -> ConnesReport {
    let n = a.nrows();
    let id = CMat::identity(n);
    let astar = ip.adjoint(a);
    let bstar = ip.adjoint(b);
    let residuals = [
        (&(&astar * a) - &(&bstar * b) - &id).op_norm(),
        (&(&astar * b) - &(&bstar * a)).op_norm(),
        (&(a * &astar) - &(b * &bstar) - &id).op_norm(),
        (&(a * &bstar) - &(b * &astar)).op_norm(),
    ];
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    ConnesReport {
        residuals,
        max_residual,
        pass: max_residual < tol,
    }
}

/// Connes identities in the standard inner product.
pub fn connes_check(a: &CMat, b: &CMat, tol: f64) -> ConnesReport {
    connes_check_weighted(a, b, &InnerProduct::identity(a.nrows()), tol)
}

/// Which polar decomposition: `g = diag(u,u) g_m` (left) or
/// `g = g_m diag(u,u)` (right).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub enum Classification {
    /// `b = 0` and `a` unitary.
    Unitary { u: CMat },
    /// `a = (1 - m^2)^{-1/2}`, `b = -m (1 - m^2)^{-1/2}` for a hermitian
    /// contraction `m`.
    Positive { m: CMat },
    General,
}

impl MoebiusElement {
    /// Validates the Connes identities before accepting the pair.
    pub fn new(a: CMat, b: CMat, tol: f64) -> Result<Self> {
        if a.shape() != b.shape() || !a.is_square() {
            return Err(Error::DimensionMismatch("moebius element".into()));
        }
        let report = connes_check(&a, &b, tol);
        if !report.pass {
            return Err(Error::NotMoebius {
                residual: report.max_residual,
            });
        }
        Ok(MoebiusElement { a, b })
    }

    pub fn identity(n: usize) -> Self {
        MoebiusElement {
            a: CMat::identity(n),
            b: CMat::zeros(n, n),
        }
    }

    /// The group isomorphism image `x = a + b`.
    pub fn x(&self) -> CMat {
        &self.a + &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn block(&self) -> Result<TwoByTwo> {
        TwoByTwo::symmetric(self.a.clone(), self.b.clone())
    }

    /// Group product (block-matrix product).
    pub fn compose(&self, rhs: &MoebiusElement) -> MoebiusElement {
        MoebiusElement {
            a: &(&self.a * &rhs.a) + &(&self.b * &rhs.b),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.a),
        }
    }

    /// Inverse through the Connes identities: `(a + b)^{-1} = a* - b*`.
    pub fn inverse(&self) -> MoebiusElement {
        MoebiusElement {
            a: self.a.adjoint_m(),
            b: -&self.b.adjoint_m(),
        }
    }

    pub fn distance(&self, rhs: &MoebiusElement) -> f64 {
        ((&self.a - &rhs.a).fro_norm().powi(2) + (&self.b - &rhs.b).fro_norm().powi(2)).sqrt()
    }
}

/// Builds the Moebius element of an invertible `x`:
/// `a = (x + (x*)^{-1})/2`, `b = (x - (x*)^{-1})/2`.
pub fn from_invertible(x: &CMat, tol: f64) -> Result<MoebiusElement> {
    let xstar_inv = x.adjoint_m().try_inverse_m(tol)?;
    let a = (x + &xstar_inv).scale_f(0.5);
    let b = (x - &xstar_inv).scale_f(0.5);
    MoebiusElement::new(a, b, (10.0 * tol).max(1e-7))
}

/// Cayley transform of a positive invertible operator:
/// `m = (1 - Q)(1 + Q)^{-1}`, a hermitian contraction.
pub fn cayley(q: &CMat, tol: f64) -> Result<CMat> {
    let res = q.hermitian_residual();
    if res > tol.max(1e-10) * q.fro_norm().max(1.0) {
        return Err(Error::NotHermitian { residual: res });
    }
    let (vals, _) = q.hermitian_eigen();
    let min_eig = vals.first().copied().unwrap_or(0.0);
    if min_eig <= tol {
        return Err(Error::NotPositive { min_eig });
    }
    let n = q.nrows();
    let id = CMat::identity(n);
    let denom_inv = (&id + q).try_inverse_m(tol)?;
    Ok(&(&id - q) * &denom_inv)
}

/// Inverse Cayley transform of a hermitian contraction:
/// `Q = (1 - m)(1 + m)^{-1}`, positive invertible.
pub fn cayley_inv(m: &CMat, tol: f64) -> Result<CMat> {
    let res = m.hermitian_residual();
    if res > tol.max(1e-10) * m.fro_norm().max(1.0) {
        return Err(Error::NotHermitian { residual: res });
    }
    let norm = m.op_norm();
    if norm >= 1.0 - tol {
        return Err(Error::NormTooLarge { norm });
    }
    let n = m.nrows();
    let id = CMat::identity(n);
    let denom_inv = (&id + m).try_inverse_m(tol)?;
    Ok(&(&id - m) * &denom_inv)
}

/// The positive element `g_m` with `a = (1-m^2)^{-1/2}`,
/// `b = -m (1-m^2)^{-1/2}`.
pub fn positive_from_contraction(m: &CMat, tol: f64) -> Result<MoebiusElement> {
    let norm = m.op_norm();
    if norm >= 1.0 - tol {
        return Err(Error::NormTooLarge { norm });
    }
    let a = m.hermitian_fn(|t| 1.0 / (1.0 - t * t).sqrt());
    let b = -&(m * &a);
    MoebiusElement::new(a, b, (10.0 * tol).max(1e-7))
}

/// Unitary/positive classification of a Moebius element.
pub fn classify(g: &MoebiusElement, tol: f64) -> Classification {
    let scale = g.a.op_norm().max(1.0);
    if g.b.op_norm() <= tol * scale && g.a.is_unitary(tol) {
        return Classification::Unitary { u: g.a.clone() };
    }
    let a_inv = match g.a.try_inverse_m(tol) {
        Ok(inv) => inv,
        Err(_) => return Classification::General,
    };
    let m = -&(&a_inv * &g.b);
    if !m.is_hermitian((10.0 * tol).max(1e-8)) {
        return Classification::General;
    }
    if m.op_norm() >= 1.0 - tol {
        return Classification::General;
    }
    let x = g.x();
    if !x.is_hermitian((10.0 * tol).max(1e-8)) {
        return Classification::General;
    }
    let (vals, _) = x.hermitian_eigen();
    if vals.first().copied().unwrap_or(0.0) <= tol {
        return Classification::General;
    }
    let m_herm = m.hermitian_part();
    let a_expect = m_herm.hermitian_fn(|t| 1.0 / (1.0 - t * t).sqrt());
    let resid = (&g.a - &a_expect).op_norm().max((&g.b + &(&m_herm * &a_expect)).op_norm());
    if resid > (100.0 * tol).max(1e-7) * scale {
        return Classification::General;
    }
    Classification::Positive { m: m_herm }
}

/// The positive element with `a = cosh(omega)`, `b = sinh(omega)` for a
/// hermitian generator `omega`.
pub fn from_hermitian_generator(omega: &CMat, tol: f64) -> Result<MoebiusElement> {
    let res = omega.hermitian_residual();
    if res > tol.max(1e-10) * omega.fro_norm().max(1.0) {
        return Err(Error::NotHermitian { residual: res });
    }
    let a = omega.hermitian_fn(f64::cosh);
    let b = omega.hermitian_fn(f64::sinh);
    MoebiusElement::new(a, b, (10.0 * tol).max(1e-7))
}

/// Recovers the unique hermitian generator of a positive element: the
/// principal logarithm of `x = a + b`.
pub fn hermitian_generator(g: &MoebiusElement, tol: f64) -> Result<CMat> {
    let x = g.x();
    let res = x.hermitian_residual();
    if res > (10.0 * tol).max(1e-8) * x.fro_norm().max(1.0) {
        return Err(Error::NotPositive { min_eig: f64::NAN });
    }
    let (vals, _) = x.hermitian_eigen();
    let min_eig = vals.first().copied().unwrap_or(0.0);
    if min_eig <= tol {
        return Err(Error::NotPositive { min_eig });
    }
    Ok(x.hermitian_fn(f64::ln))
}

/// Polar decomposition of a Moebius element into a unitary `u` and the
/// hermitian contraction `m` of the positive factor:
/// left:  `u = a (a*a)^{-1/2}`, `m = -a^{-1} b`, `g = diag(u,u) g_m`;
/// right: `u = (aa*)^{-1/2} a`, `m = -b a^{-1}`, `g = g_m diag(u,u)`.
pub fn polar(g: &MoebiusElement, side: Side, tol: f64) -> Result<(CMat, CMat)> {
    // a*a = 1 + b*b >= 1, so a is always invertible for a Moebius element
    let a_inv = g.a.try_inverse_m(tol)?;
    match side {
        Side::Left => {
            let astar_a = &g.a.adjoint_m() * &g.a;
            let u = &g.a * &astar_a.hermitian_fn(|t| 1.0 / t.sqrt());
            let m = -&(&a_inv * &g.b);
            Ok((u, m.hermitian_part()))
        }
        Side::Right => {
            let a_astar = &g.a * &g.a.adjoint_m();
            let u = &a_astar.hermitian_fn(|t| 1.0 / t.sqrt()) * &g.a;
            let m = -&(&g.b * &a_inv);
            Ok((u, m.hermitian_part()))
        }
    }
}

/// Reconstructs `g` from a polar pair, for residual checks.
pub fn from_polar(u: &CMat, m: &CMat, side: Side, tol: f64) -> Result<MoebiusElement> {
    let gm = positive_from_contraction(m, tol)?;
    let (a, b) = match side {
        Side::Left => (u * &gm.a, u * &gm.b),
        Side::Right => (&gm.a * u, &gm.b * u),
    };
    MoebiusElement::new(a, b, (10.0 * tol).max(1e-7))
}

/// The retraction path `t -> diag(u,u) g_{t m}` from the unitary part
/// (`t = 0`) to `g` itself (`t = 1`).
pub fn retraction_path(g: &MoebiusElement, t: f64, tol: f64) -> Result<MoebiusElement> {
    let (u, m) = polar(g, Side::Left, tol)?;
    let mt = m.scale_f(t);
    let gm = positive_from_contraction(&mt, tol)?;
    Ok(MoebiusElement {
        a: &u * &gm.a,
        b: &u * &gm.b,
    })
}

/// Even-group membership for a graded algebra: `a` even, `b` odd with
/// respect to conjugation by `grading`, and `grading x* grading = x^{-1}`.
pub fn even_group_check(g: &MoebiusElement, grading: &CMat, tol: f64) -> CheckReport {
    let mut report = CheckReport::new();
    let res = grading.involution_residual();
    report.push(Check::required("grading_involution", res, tol.max(1e-9)));
    let a_scale = g.a.op_norm().max(1.0);
    let b_scale = g.b.op_norm().max(1.0);
    report.push(Check::required(
        "a_even",
        grading.commutator(&g.a).op_norm() / a_scale,
        tol,
    ));
    report.push(Check::required(
        "b_odd",
        grading.anticommutator(&g.b).op_norm() / b_scale,
        tol,
    ));
    let x = g.x();
    let gxg = &(grading * &x.adjoint_m()) * grading;
    let resid = (&(&gxg * &x) - &CMat::identity(x.nrows())).op_norm();
    report.push(Check::required("grading_inverse_identity", resid, tol));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cr, random};
    use approx::assert_abs_diff_eq;

    #[test]
    fn connes_examples() {
        let id = CMat::identity(2);
        let zero = CMat::zeros(2, 2);
        assert!(connes_check(&id, &zero, 1e-12).pass);

        // cosh^2 - sinh^2 = 1
        let (ch, sh) = (1.0_f64.cosh(), 1.0_f64.sinh());
        let rep = connes_check(&id.scale_f(ch), &id.scale_f(sh), 1e-12);
        assert!(rep.pass, "{:?}", rep);

        // (1, 1) violates a*a - b*b = 1 by exactly 1
        let rep = connes_check(&id, &id, 1e-9);
        assert!(!rep.pass);
        assert_abs_diff_eq!(rep.residuals[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn from_invertible_examples() {
        let g = from_invertible(&CMat::identity(3), 1e-9).unwrap();
        assert!(g.b.fro_norm() < 1e-13);

        // x = 2 -> (1.25, 0.75)
        let g = from_invertible(&CMat::scalar(1, cr(2.0)), 1e-9).unwrap();
        assert_abs_diff_eq!(g.a[(0, 0)].re, 1.25, epsilon = 1e-12);
        assert_abs_diff_eq!(g.b[(0, 0)].re, 0.75, epsilon = 1e-12);

        // unitary x gives (x, 0)
        let mut rng = random::rng_from_seed(2);
        let u = random::unitary(&mut rng, 4);
        let g = from_invertible(&u, 1e-9).unwrap();
        assert!((&g.a - &u).fro_norm() < 1e-12);
        assert!(g.b.fro_norm() < 1e-12);
    }

    #[test]
    fn from_invertible_is_homomorphism() {
        let mut rng = random::rng_from_seed(3);
        for dim in [1usize, 2, 4] {
            let x1 = random::invertible(&mut rng, dim);
            let x2 = random::invertible(&mut rng, dim);
            let lhs = from_invertible(&(&x1 * &x2), 1e-9).unwrap();
            let rhs = from_invertible(&x1, 1e-9)
                .unwrap()
                .compose(&from_invertible(&x2, 1e-9).unwrap());
            assert!(lhs.distance(&rhs) < 1e-10);
        }
    }

    #[test]
    fn cayley_examples() {
        // Q = identity -> m = 0
        let m = cayley(&CMat::identity(2), 1e-9).unwrap();
        assert!(m.fro_norm() < 1e-13);

        // Q = 3 -> m = -0.5
        let m = cayley(&CMat::scalar(1, cr(3.0)), 1e-9).unwrap();
        assert_abs_diff_eq!(m[(0, 0)].re, -0.5, epsilon = 1e-13);

        // cayley(Q^{-1}) = -cayley(Q); scalar evaluation on diag(2, 4):
        // m = diag(-1/3, -3/5) and the inverse gives diag(1/3, 3/5)
        let q = CMat::diag_f(&[2.0, 4.0]);
        let m = cayley(&q, 1e-9).unwrap();
        assert!((&m - &CMat::diag_f(&[-1.0 / 3.0, -0.6])).fro_norm() < 1e-13);
        let m_inv = cayley(&q.try_inverse_m(1e-12).unwrap(), 1e-9).unwrap();
        assert!((&m_inv + &m).fro_norm() < 1e-13);

        // round trip and commutation
        let mut rng = random::rng_from_seed(5);
        for dim in [2usize, 8, 16] {
            let q = random::positive_definite(&mut rng, dim, 0.2, 5.0);
            let m = cayley(&q, 1e-9).unwrap();
            assert!(m.op_norm() < 1.0);
            let back = cayley_inv(&m, 1e-9).unwrap();
            assert!((&back - &q).op_norm() < 1e-10 * q.op_norm());
            assert!(q.commutator(&m).op_norm() < 1e-11);
        }

        assert!(matches!(
            cayley(&CMat::diag_f(&[1.0, -2.0]), 1e-9),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            cayley_inv(&CMat::diag_f(&[0.5, 1.2]), 1e-9),
            Err(Error::NormTooLarge { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let mut rng = random::rng_from_seed(7);
        let u = random::unitary(&mut rng, 3);
        let g = MoebiusElement::new(u.clone(), CMat::zeros(3, 3), 1e-9).unwrap();
        match classify(&g, 1e-9) {
            Classification::Unitary { u: got } => assert!((&got - &u).fro_norm() < 1e-12),
            other => panic!("expected unitary, got {other:?}"),
        }

        // m = 0.6 scalar: a = 1.25, b = -0.75
        let g = MoebiusElement::new(
            CMat::scalar(1, cr(1.25)),
            CMat::scalar(1, cr(-0.75)),
            1e-9,
        )
        .unwrap();
        match classify(&g, 1e-9) {
            Classification::Positive { m } => {
                assert_abs_diff_eq!(m[(0, 0)].re, 0.6, epsilon = 1e-12)
            }
            other => panic!("expected positive, got {other:?}"),
        }

        // (1.25, 0.75) is positive with m = -0.6
        let g = MoebiusElement::new(CMat::scalar(1, cr(1.25)), CMat::scalar(1, cr(0.75)), 1e-9)
            .unwrap();
        match classify(&g, 1e-9) {
            Classification::Positive { m } => {
                assert_abs_diff_eq!(m[(0, 0)].re, -0.6, epsilon = 1e-12)
            }
            other => panic!("expected positive, got {other:?}"),
        }

        // classify(positive) satisfies x = ((1-m)/(1+m))^{1/2}
        let mh = random::hermitian_with_norm(&mut rng, 3, 0.7);
        let g = positive_from_contraction(&mh, 1e-9).unwrap();
        match classify(&g, 1e-9) {
            Classification::Positive { m } => {
                let q = cayley_inv(&m, 1e-9).unwrap();
                let x_expect = q.positive_sqrt(1e-12).unwrap();
                assert!((&g.x() - &x_expect).op_norm() < 1e-10);
            }
            other => panic!("expected positive, got {other:?}"),
        }
    }

    #[test]
    fn hermitian_generator_examples() {
        // omega = 0 -> identity
        let g = from_hermitian_generator(&CMat::zeros(2, 2), 1e-9).unwrap();
        assert!(g.distance(&MoebiusElement::identity(2)) < 1e-13);

        // omega = 1 scalar -> (1.5431, 1.1752) to 4 decimals
        let g = from_hermitian_generator(&CMat::scalar(1, cr(1.0)), 1e-9).unwrap();
        assert_abs_diff_eq!(g.a[(0, 0)].re, 1.5431, epsilon = 5e-5);
        assert_abs_diff_eq!(g.b[(0, 0)].re, 1.1752, epsilon = 5e-5);

        // omega = diag(1, -1): a = cosh(1) I, b = diag(sinh 1, -sinh 1)
        let g = from_hermitian_generator(&CMat::diag_f(&[1.0, -1.0]), 1e-9).unwrap();
        assert!((&g.a - &CMat::identity(2).scale_f(1.0_f64.cosh())).fro_norm() < 1e-12);
        assert!(
            (&g.b - &CMat::diag_f(&[1.0_f64.sinh(), -(1.0_f64.sinh())])).fro_norm() < 1e-12
        );

        // round trip
        let mut rng = random::rng_from_seed(11);
        let omega = random::hermitian_with_norm(&mut rng, 4, 1.3);
        let g = from_hermitian_generator(&omega, 1e-9).unwrap();
        let back = hermitian_generator(&g, 1e-9).unwrap();
        assert!((&back - &omega).op_norm() < 1e-10);
    }

    #[test]
    fn polar_examples() {
        let mut rng = random::rng_from_seed(13);

        // unitary element decomposes as (u, 0)
        let u = random::unitary(&mut rng, 3);
        let g = MoebiusElement::new(u.clone(), CMat::zeros(3, 3), 1e-9).unwrap();
        let (pu, pm) = polar(&g, Side::Left, 1e-9).unwrap();
        assert!((&pu - &u).fro_norm() < 1e-11);
        assert!(pm.fro_norm() < 1e-11);

        // g from x = 2: u = 1, m = -0.6
        let g = from_invertible(&CMat::scalar(1, cr(2.0)), 1e-9).unwrap();
        let (pu, pm) = polar(&g, Side::Left, 1e-9).unwrap();
        assert_abs_diff_eq!(pu[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pm[(0, 0)].re, -0.6, epsilon = 1e-12);

        // construct-then-decompose: diag(u,u) g_{0.5} recovers (u, 0.5)
        let u = random::unitary(&mut rng, 2);
        let m = CMat::identity(2).scale_f(0.5);
        let g = from_polar(&u, &m, Side::Left, 1e-9).unwrap();
        let (pu, pm) = polar(&g, Side::Left, 1e-9).unwrap();
        assert!((&pu - &u).fro_norm() < 1e-10);
        assert!((&pm - &m).fro_norm() < 1e-10);

        // both sides reconstruct
        for _ in 0..10 {
            let x = random::invertible(&mut rng, 3);
            let g = from_invertible(&x, 1e-9).unwrap();
            for side in [Side::Left, Side::Right] {
                let (pu, pm) = polar(&g, side, 1e-9).unwrap();
                assert!(pu.is_unitary(1e-10));
                assert!(pm.op_norm() < 1.0);
                let back = from_polar(&pu, &pm, side, 1e-9).unwrap();
                assert!(g.distance(&back) < 1e-9);
            }
        }
    }

    #[test]
    fn retraction_examples() {
        let mut rng = random::rng_from_seed(17);
        let x = random::invertible(&mut rng, 3);
        let g = from_invertible(&x, 1e-9).unwrap();
        let (u, _) = polar(&g, Side::Left, 1e-9).unwrap();

        let g0 = retraction_path(&g, 0.0, 1e-9).unwrap();
        assert!((&g0.a - &u).fro_norm() < 1e-10);
        assert!(g0.b.fro_norm() < 1e-12);

        let g1 = retraction_path(&g, 1.0, 1e-9).unwrap();
        assert!(g.distance(&g1) < 1e-10);

        // scalar m = 0.6 at t = 0.5: a = (1 - 0.09)^{-1/2} ~ 1.0483
        let g = positive_from_contraction(&CMat::scalar(1, cr(0.6)), 1e-9).unwrap();
        let gt = retraction_path(&g, 0.5, 1e-9).unwrap();
        assert_abs_diff_eq!(gt.a[(0, 0)].re, 1.0 / 0.91_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(gt.a[(0, 0)].re, 1.0483, epsilon = 1e-4);

        // empirical Lipschitz bound on a 64-point grid stays finite
        let x = random::invertible(&mut rng, 4);
        let g = from_invertible(&x, 1e-9).unwrap();
        let n = 64;
        let mut prev = retraction_path(&g, 0.0, 1e-9).unwrap();
        let mut max_ratio: f64 = 0.0;
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let cur = retraction_path(&g, t, 1e-9).unwrap();
            max_ratio = max_ratio.max(cur.distance(&prev) * n as f64);
            prev = cur;
        }
        assert!(max_ratio.is_finite() && max_ratio < 1e3);
    }

    #[test]
    fn even_group_examples() {
        let grading = CMat::diag_f(&[1.0, -1.0]);
        let g = MoebiusElement::identity(2);
        assert!(even_group_check(&g, &grading, 1e-9).passed());

        // a = cosh(t) 1 (even), b = sinh(t) flip (odd)
        let t = 0.8_f64;
        let flip = CMat::from_rows_f(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let g = MoebiusElement::new(
            CMat::identity(2).scale_f(t.cosh()),
            flip.scale_f(t.sinh()),
            1e-9,
        )
        .unwrap();
        let rep = even_group_check(&g, &grading, 1e-9);
        assert!(rep.passed(), "{:?}", rep.first_failure());

        // even b breaks parity
        let g = MoebiusElement::new(
            CMat::identity(2).scale_f(t.cosh()),
            CMat::identity(2).scale_f(t.sinh()),
            1e-9,
        )
        .unwrap();
        assert!(!even_group_check(&g, &grading, 1e-9).passed());
    }

    #[test]
    fn inverse_is_group_inverse() {
        let mut rng = random::rng_from_seed(19);
        let g = from_invertible(&random::invertible(&mut rng, 3), 1e-9).unwrap();
        let prod = g.compose(&g.inverse());
        assert!(prod.distance(&MoebiusElement::identity(3)) < 1e-10);
    }

    #[test]
    fn rejects_non_moebius_pairs() {
        let id = CMat::identity(2);
        assert!(matches!(
            MoebiusElement::new(id.clone(), id.clone(), 1e-9),
            Err(Error::NotMoebius { .. })
        ));
    }

    #[test]
    fn weighted_connes_check() {
        // G-weighted identities for a G-unitary coefficient pair
        let g = CMat::diag_f(&[1.0, 4.0]);
        let ip = InnerProduct::new(&g, 1e-12).unwrap();
        // x G-unitary: x = G^{-1/2} u G^{1/2}
        let u = random::unitary(&mut random::rng_from_seed(23), 2);
        let ghalf = g.positive_sqrt(1e-12).unwrap();
        let ghalf_inv = ghalf.try_inverse_m(1e-12).unwrap();
        let x = &(&ghalf_inv * &u) * &ghalf;
        let xstar_inv = ip.adjoint(&x).try_inverse_m(1e-12).unwrap();
        let a = (&x + &xstar_inv).scale_f(0.5);
        let b = (&x - &xstar_inv).scale_f(0.5);
        let rep = connes_check_weighted(&a, &b, &ip, 1e-10);
        assert!(rep.pass, "{:?}", rep);
        assert!((&b).fro_norm() < 1e-10, "G-unitary x has b = 0");
    }
}
