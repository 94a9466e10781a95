//! The projective line over a matrix *-algebra and the block transforms
//! acting on it.
//!
//! Points are pairs `(a, b)` of algebra elements modulo right multiplication
//! by an invertible element.  The transforms of interest are the symmetric
//! pairs `[[a, b], [b, a]]`: they fix the trivial involutions, and with the
//! four commutation identities they send self-adjoint involutions to
//! self-adjoint involutions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::random::SeededRng;
use crate::numerics::{cr, random, CMat};
use crate::report::{Check, CheckReport};
use crate::star_algebra::StarAlgebra;

/// A point of the projective line: a pair of algebra elements, not both zero.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    pub a: CMat,
    pub b: CMat,
}

impl ProjPoint {
    pub fn new(a: CMat, b: CMat) -> Result<Self> {
        if a.shape() != b.shape() || !a.is_square() {
            return Err(Error::DimensionMismatch("projective point".into()));
        }
        if a.fro_norm() == 0.0 && b.fro_norm() == 0.0 {
            return Err(Error::Invalid("projective point (0, 0) is excluded".into()));
        }
        Ok(ProjPoint { a, b })
    }
}

/// A 2x2 block matrix with entries in the algebra.
#[derive(Clone, Debug)]
pub struct TwoByTwo {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
}

impl TwoByTwo {
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let shape = a.shape();
        if !a.is_square() || b.shape() != shape || c.shape() != shape || d.shape() != shape {
            return Err(Error::DimensionMismatch("block matrix".into()));
        }
        Ok(TwoByTwo { a, b, c, d })
    }

    /// The symmetric form `[[a, b], [b, a]]`.
    pub fn symmetric(a: CMat, b: CMat) -> Result<Self> {
        let (c, d) = (b.clone(), a.clone());
        Self::new(a, b, c, d)
    }

    pub fn identity(n: usize) -> Self {
        TwoByTwo {
            a: CMat::identity(n),
            b: CMat::zeros(n, n),
            c: CMat::zeros(n, n),
            d: CMat::identity(n),
        }
    }

    pub fn block_dim(&self) -> usize {
        self.a.nrows()
    }

    /// Block-matrix product.
    pub fn mul(&self, rhs: &TwoByTwo) -> TwoByTwo {
        TwoByTwo {
            a: &(&self.a * &rhs.a) + &(&self.b * &rhs.c),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.d),
            c: &(&self.c * &rhs.a) + &(&self.d * &rhs.c),
            d: &(&self.c * &rhs.b) + &(&self.d * &rhs.d),
        }
    }

    /// Apply to a point of the projective line.
    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint {
            a: &(&self.a * &p.a) + &(&self.b * &p.b),
            b: &(&self.c * &p.a) + &(&self.d * &p.b),
        }
    }

    /// Frobenius distance to the identity block matrix.
    pub fn distance_to_identity(&self) -> f64 {
        let n = self.block_dim();
        let id = CMat::identity(n);
        ((&self.a - &id).fro_norm().powi(2)
            + self.b.fro_norm().powi(2)
            + self.c.fro_norm().powi(2)
            + (&self.d - &id).fro_norm().powi(2))
        .sqrt()
    }

    /// The dense `2n x 2n` matrix.
    pub fn dense(&self) -> CMat {
        let n = self.block_dim();
        CMat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => self.a[(i, j)],
            (true, false) => self.b[(i, j - n)],
            (false, true) => self.c[(i - n, j)],
            (false, false) => self.d[(i - n, j - n)],
        })
    }
}

/// Equivalence of projective points: searches for an invertible `lambda`
/// with `a1 = a2 lambda`, `b1 = b2 lambda`.
///
/// The joint linear system is solved in the ambient matrix space; the
/// solution is then projected into the algebra span and the residuals are
/// re-checked, so a solution that exists only outside the algebra does not
/// count.
pub fn proj_equiv(alg: &StarAlgebra, p: &ProjPoint, q: &ProjPoint, tol: f64) -> Result<bool> {
    let n = alg.ambient_dim();
    if p.a.nrows() != n || q.a.nrows() != n {
        return Err(Error::DimensionMismatch("projective point vs algebra".into()));
    }
    // stacked least squares [q.a; q.b] lambda = [p.a; p.b]
    let stacked_lhs = CMat::from_fn(2 * n, n, |i, j| {
        if i < n {
            q.a[(i, j)]
        } else {
            q.b[(i - n, j)]
        }
    });
    let stacked_rhs = CMat::from_fn(2 * n, n, |i, j| {
        if i < n {
            p.a[(i, j)]
        } else {
            p.b[(i - n, j)]
        }
    });
    let lambda = match stacked_lhs.lstsq(&stacked_rhs, 1e-13) {
        Ok(sol) => sol,
        Err(_) => return Ok(false),
    };
    // project into the algebra span
    let mut projected = CMat::zeros(n, n);
    for e in alg.basis() {
        let coeff: Complex64 = e
            .inner()
            .iter()
            .zip(lambda.inner().iter())
            .map(|(x, y)| x.conj() * y)
            .sum();
        projected = projected + e.scale_c(coeff);
    }
    let scale = p.a.fro_norm().max(p.b.fro_norm()).max(1.0);
    let res_a = (&(&q.a * &projected) - &p.a).fro_norm();
    let res_b = (&(&q.b * &projected) - &p.b).fro_norm();
    Ok(res_a <= tol * scale && res_b <= tol * scale && projected.is_invertible(tol))
}

/// The finite-part coordinate `z = a b^{-1}` of a projective point.
pub fn finite_point(p: &ProjPoint, tol: f64) -> Result<CMat> {
    let b_inv = p.b.try_inverse_m(tol)?;
    Ok(&p.a * &b_inv)
}

/// Membership in the subgroup acting trivially on the projective line:
/// diagonal blocks equal to a single invertible central element.
pub fn in_projective_kernel(t: &TwoByTwo, alg: &StarAlgebra, tol: f64) -> Result<bool> {
    let scale = t.a.fro_norm().max(1.0);
    if t.b.fro_norm() > tol * scale || t.c.fro_norm() > tol * scale {
        return Ok(false);
    }
    if (&t.d - &t.a).fro_norm() > tol * scale {
        return Ok(false);
    }
    if !t.a.is_invertible(tol) {
        return Ok(false);
    }
    let center = alg.center()?;
    Ok(center.contains(&t.a, tol.max(alg.tol())))
}

/// Membership in the symmetric-pair subgroup: `c = b`, `d = a` and both
/// `a + b` and `a - b` invertible.
pub fn is_symmetric_pair(t: &TwoByTwo, tol: f64) -> bool {
    let scale = t.a.fro_norm().max(t.b.fro_norm()).max(1.0);
    if (&t.c - &t.b).fro_norm() > tol * scale || (&t.d - &t.a).fro_norm() > tol * scale {
        return false;
    }
    (&t.a + &t.b).is_invertible(tol) && (&t.a - &t.b).is_invertible(tol)
}

/// Inverse of a symmetric pair:
/// `a' = ((a+b)^{-1} + (a-b)^{-1})/2`, `b' = ((a+b)^{-1} - (a-b)^{-1})/2`.
pub fn symmetric_pair_inverse(t: &TwoByTwo, tol: f64) -> Result<TwoByTwo> {
    if !is_symmetric_pair(t, tol) {
        return Err(Error::NotSymmetricPair);
    }
    let sum_inv = (&t.a + &t.b).try_inverse_m(tol)?;
    let diff_inv = (&t.a - &t.b).try_inverse_m(tol)?;
    let a = (&sum_inv + &diff_inv).scale_f(0.5);
    let b = (&sum_inv - &diff_inv).scale_f(0.5);
    TwoByTwo::symmetric(a, b)
}

/// Action of a symmetric pair on an involution:
/// `f -> (a f + b)(b f + a)^{-1}`.
pub fn act_on_involution(t: &TwoByTwo, f: &CMat, tol: f64) -> Result<CMat> {
    let res = f.involution_residual();
    if res > tol.max(1e-8) {
        return Err(Error::NotInvolution { residual: res });
    }
    let denom = &(&t.b * f) + &t.a;
    let denom_inv = denom.try_inverse_m(tol)?;
    Ok(&(&(&t.a * f) + &t.b) * &denom_inv)
}

/// The four commutator residuals deciding whether the transformed
/// involution stays self-adjoint.
#[derive(Clone, Debug)]
pub struct CommutationReport {
    /// `|[a*a - b*b, f]|`, `|[a*b - b*a, f]|`, `|[aa* - bb*, f]|`,
    /// `|[ab* - ba*, f]|`.
    pub residuals: [f64; 4],
    pub pass: bool,
}

pub fn commutation_identities(a: &CMat, b: &CMat, f: &CMat, tol: f64) -> Result<CommutationReport> {
    if !f.is_hermitian(tol.max(1e-8)) {
        return Err(Error::NotHermitian {
            residual: f.hermitian_residual(),
        });
    }
    let res = f.involution_residual();
    if res > tol.max(1e-8) {
        return Err(Error::NotInvolution { residual: res });
    }
    let astar = a.adjoint_m();
    let bstar = b.adjoint_m();
    let exprs = [
        &(&astar * a) - &(&bstar * b),
        &(&astar * b) - &(&bstar * a),
        &(a * &astar) - &(b * &bstar),
        &(a * &bstar) - &(b * &astar),
    ];
    let residuals = [
        exprs[0].commutator(f).op_norm(),
        exprs[1].commutator(f).op_norm(),
        exprs[2].commutator(f).op_norm(),
        exprs[3].commutator(f).op_norm(),
    ];
    let scale = a.op_norm().max(b.op_norm()).powi(2).max(1.0);
    let pass = residuals.iter().all(|&r| r < tol * scale);
    Ok(CommutationReport { residuals, pass })
}

/// Builds the transform `(x, alpha (x*)^{-1})` in symmetric-pair form
/// `a = (x + y)/2, b = (x - y)/2`; such transforms are defined on every
/// involution of a full operator algebra.
pub fn universal_from(x: &CMat, alpha: Complex64, tol: f64) -> Result<TwoByTwo> {
    if alpha.norm() == 0.0 {
        return Err(Error::ZeroScalar);
    }
    let xstar_inv = x.adjoint_m().try_inverse_m(tol)?;
    let y = xstar_inv.scale_c(alpha);
    let a = (x + &y).scale_f(0.5);
    let b = (x - &y).scale_f(0.5);
    TwoByTwo::symmetric(a, b)
}

/// Exact test that the pair acts on *all* self-adjoint involutions: the four
/// sesquilinear combinations must be real/imaginary scalars with
/// `lambda_3 = lambda_1` and `lambda_4 = -lambda_2`, not both zero.
///
/// Valid verbatim when the algebra is a full matrix algebra; for proper
/// subalgebras use [`universal_action_sampled`], which this test may
/// under-approximate.
pub fn universal_action_exact(a: &CMat, b: &CMat, tol: f64) -> Result<CheckReport> {
    let n = a.nrows() as f64;
    let astar = a.adjoint_m();
    let bstar = b.adjoint_m();
    let exprs = [
        &(&astar * a) - &(&bstar * b),
        &(&astar * b) - &(&bstar * a),
        &(a * &astar) - &(b * &bstar),
        &(a * &bstar) - &(b * &astar),
    ];
    let scalars: Vec<Complex64> = exprs.iter().map(|e| e.trace_c() / cr(n)).collect();
    let scale = a.op_norm().max(b.op_norm()).powi(2).max(1.0);
    let mut report = CheckReport::new();
    for (i, e) in exprs.iter().enumerate() {
        let dev = (e - &CMat::scalar(a.nrows(), scalars[i])).op_norm();
        report.push(Check::required(
            format!("scalar_deviation_{}", i + 1),
            dev / scale,
            tol,
        ));
    }
    report.push(Check::required(
        "lambda1_real",
        scalars[0].im.abs() / scale,
        tol,
    ));
    report.push(Check::required(
        "lambda2_imaginary",
        scalars[1].re.abs() / scale,
        tol,
    ));
    report.push(Check::required(
        "lambda3_equals_lambda1",
        (scalars[2] - scalars[0]).norm() / scale,
        tol,
    ));
    report.push(Check::required(
        "lambda4_equals_minus_lambda2",
        (scalars[3] + scalars[1]).norm() / scale,
        tol,
    ));
    report.push(Check::flag(
        "lambdas_not_both_zero",
        scalars[0].norm() + scalars[1].norm() > tol * scale,
    ));
    Ok(report)
}

/// Randomized test over sampled self-adjoint involutions: checks `b f + a`
/// stays invertible and the image squares to the identity.  Sound for any
/// algebra, but only a sampler, never a proof of membership.
pub fn universal_action_sampled(
    a: &CMat,
    b: &CMat,
    samples: usize,
    rng: &mut SeededRng,
    tol: f64,
) -> Result<CheckReport> {
    let n = a.nrows();
    let t = TwoByTwo::symmetric(a.clone(), b.clone())?;
    let mut worst_sv = f64::INFINITY;
    let mut worst_inv = 0.0_f64;
    for _ in 0..samples {
        let f = random::hermitian_involution(rng, n, None);
        let denom = &(b * &f) + a;
        let sv = denom.singular_values_vec()?;
        let ratio = sv.last().unwrap() / sv[0].max(1e-300);
        worst_sv = worst_sv.min(ratio);
        if ratio > tol {
            let image = act_on_involution(&t, &f, tol)?;
            worst_inv = worst_inv.max(image.involution_residual());
        }
    }
    let mut report = CheckReport::new();
    report.push(Check::required(
        "denominator_invertible_min_sv_ratio",
        if worst_sv > tol { 0.0 } else { 1.0 },
        0.5,
    ));
    report.push(Check::diagnostic("min_sv_ratio", worst_sv));
    report.push(Check::required("image_involution_residual", worst_inv, 10.0 * tol));
    Ok(report)
}

/// Complex-scalar helper for 1x1 examples.
pub fn scalar_mat(z: Complex64) -> CMat {
    CMat::scalar(1, z)
}
