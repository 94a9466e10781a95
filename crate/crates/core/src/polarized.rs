//! Krein-space polarized modules and the lifting machinery.
//!
//! A polarized module is `(S, pi, E)`: a nondegenerate hermitian form given
//! by its Gram matrix `S`, a representation, and a Lagrangian subspace `E`
//! on which the form vanishes.  A compatible involution `gamma` (Krein
//! self-adjoint, commuting with `pi`, with `S gamma` positive definite)
//! turns the Krein space into a Hilbert space and lifts the module to an
//! even Fredholm module with `F = +1` on `E` and `-1` on `gamma(E)`.
//!
//! Two compatible involutions are related by the Cayley transform of
//! `Q = gamma_target gamma_source`; the block matrix built from `Q` is the
//! generalized Moebius transformation between the two lifts, and these
//! transformations compose as a groupoid over the set of compatible
//! involutions.
//!
//! Adjoints here are mixed: an operator from the `gamma_1`-Hilbert space to
//! the `gamma_2`-Hilbert space has adjoint `G_1^{-1} X^* G_2` with
//! `G_j = S Gamma_j`.  With that convention the generalized Moebius blocks
//! satisfy the Connes identities exactly.

use crate::error::{Error, Result};
use crate::fredholm::{self, FredholmModule, RealStructure};
use crate::numerics::{CMat, InnerProduct, Tolerances};
use crate::report::{Check, CheckReport};

/// A polarized module: Krein form `S`, representation `pi`, isotropic
/// subspace `E` (columns).
#[derive(Clone, Debug)]
pub struct PolarizedModule {
    pub s: CMat,
    pub pi: Vec<CMat>,
    pub e: CMat,
}

impl PolarizedModule {
    pub fn new(s: CMat, pi: Vec<CMat>, e: CMat) -> Result<Self> {
        let dim = s.nrows();
        if !s.is_square() {
            return Err(Error::DimensionMismatch("S must be square".into()));
        }
        if e.nrows() != dim {
            return Err(Error::DimensionMismatch("E rows must match S".into()));
        }
        for p in &pi {
            if p.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch("representation".into()));
            }
        }
        Ok(PolarizedModule { s, pi, e })
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// The Hilbert inner product `(x, y)_gamma = sigma(x, gamma y)` of a
    /// compatible involution.
    pub fn inner_product_of(&self, gamma: &CMat, tol: f64) -> Result<InnerProduct> {
        let gram = (&self.s * gamma).hermitian_part();
        InnerProduct::new(&gram, tol)
    }
}

/// Structural validation; the compressed-operator norms standing in for the
/// compactness condition are diagnostics.
pub fn validate(p: &PolarizedModule, tols: Tolerances) -> CheckReport {
    let mut report = CheckReport::new();
    let tol = tols.structural;
    let s_scale = p.s.op_norm().max(1e-300);
    report.push(Check::required(
        "s_hermitian",
        p.s.hermitian_residual() / s_scale,
        tol.max(1e-10),
    ));
    report.push(Check::flag("s_invertible", p.s.is_invertible(1e-10)));
    let e_scale = p.e.op_norm().max(1e-300);
    report.push(Check::required(
        "isotropy",
        (&(&p.e.adjoint_m() * &p.s) * &p.e).max_abs() / (s_scale * e_scale * e_scale),
        tol,
    ));
    let k = p.e.ncols();
    report.push(Check::flag("lagrangian_half_dimension", 2 * k == p.dim()));
    let full_rank = match p.e.singular_values_vec() {
        Ok(sv) if !sv.is_empty() => {
            sv.last().copied().unwrap_or(0.0) > 1e-10 * sv[0].max(1e-300)
        }
        _ => false,
    };
    report.push(Check::flag("e_full_rank", full_rank));
    for (i, a) in p.pi.iter().enumerate() {
        let compressed = (&(&p.e.adjoint_m() * &(&p.s * a)) * &p.e).op_norm();
        report.push(Check::diagnostic(
            format!("compressed_multiplier_norm_{i}"),
            compressed,
        ));
    }
    report
}

/// Checks that `gamma` is a compatible involution for `p`: an involution,
/// Krein self-adjoint, commuting with the representation, with `S gamma`
/// positive definite.
pub fn compatible_check(p: &PolarizedModule, gamma: &CMat, tols: Tolerances) -> CheckReport {
    let mut report = CheckReport::new();
    let tol = tols.structural;
    report.push(Check::required(
        "gamma_involution",
        gamma.involution_residual(),
        tol,
    ));
    let s_scale = p.s.op_norm().max(1e-300);
    report.push(Check::required(
        "krein_selfadjoint",
        (&(&gamma.adjoint_m() * &p.s) - &(&p.s * gamma)).op_norm() / s_scale,
        tol,
    ));
    let gram = (&p.s * gamma).hermitian_part();
    let (vals, _) = gram.hermitian_eigen();
    let min_eig = vals.first().copied().unwrap_or(f64::NEG_INFINITY);
    report.push(Check::flag("gram_positive", min_eig > 0.0));
    report.push(Check::diagnostic("gram_min_eigenvalue", min_eig));
    let pi_resid = p
        .pi
        .iter()
        .map(|a| gamma.commutator(a).op_norm() / a.op_norm().max(1e-300))
        .fold(0.0, f64::max);
    report.push(Check::required(
        "pi_commute",
        pi_resid,
        tols.commutation,
    ));
    report
}

fn require_compatible(p: &PolarizedModule, gamma: &CMat, tols: Tolerances) -> Result<()> {
    let rep = compatible_check(p, gamma, tols);
    if let Some(fail) = rep.first_failure() {
        return Err(Error::NotCompatible(format!(
            "{} residual {:.3e} (threshold {:.3e})",
            fail.name, fail.residual, fail.threshold
        )));
    }
    Ok(())
}

/// Conjugates an involution by `(1 + m)`: the inverse direction of
/// [`cayley_between`], used to construct new compatible involutions from a
/// planted contraction.
pub fn deform_involution(gamma0: &CMat, m: &CMat, tol: f64) -> Result<CMat> {
    let n = gamma0.nrows();
    let one_plus = &CMat::identity(n) + m;
    let inv = one_plus.try_inverse_m(tol)?;
    Ok(&(&one_plus * gamma0) * &inv)
}

/// Recovers the contraction linking two compatible involutions:
/// `m = (1 - Q)(1 + Q)^{-1}` with `Q = gamma_0 gamma_1`, so that
/// `gamma_1 = (1 + m) gamma_0 (1 + m)^{-1}`.
///
/// Verifies that `m` anticommutes with `gamma_0`, commutes with the
/// representation, and is a strict contraction in the `gamma_0` norm.
pub fn cayley_between(
    p: &PolarizedModule,
    gamma0: &CMat,
    gamma1: &CMat,
    tols: Tolerances,
) -> Result<CMat> {
    require_compatible(p, gamma0, tols)?;
    require_compatible(p, gamma1, tols)?;
    let n = p.dim();
    let q = gamma0 * gamma1;
    let one_plus_q_inv = (&CMat::identity(n) + &q).try_inverse_m(1e-12)?;
    let m = &(&CMat::identity(n) - &q) * &one_plus_q_inv;

    let recon = deform_involution(gamma0, &m, 1e-12)?;
    let recon_residual = (&recon - gamma1).op_norm();
    if recon_residual > (100.0 * tols.structural).max(1e-8) {
        return Err(Error::NotCompatible(format!(
            "Cayley reconstruction residual {recon_residual:.3e}"
        )));
    }
    let anti = m.anticommutator(gamma0).op_norm();
    if anti > (100.0 * tols.structural).max(1e-8) * m.op_norm().max(1.0) {
        return Err(Error::NotCompatible(format!(
            "contraction fails to anticommute with gamma_0 ({anti:.3e})"
        )));
    }
    let comm = p
        .pi
        .iter()
        .map(|a| m.commutator(a).op_norm() / (m.op_norm().max(1.0) * a.op_norm().max(1e-300)))
        .fold(0.0, f64::max);
    if comm > tols.commutation {
        return Err(Error::NotInCommutant { residual: comm });
    }
    let ip0 = p.inner_product_of(gamma0, tols.structural)?;
    let norm0 = ip0.op_norm(&m);
    if norm0 >= 1.0 {
        return Err(Error::NormTooLarge { norm: norm0 });
    }
    Ok(m)
}

/// Lifts the polarized module at a compatible involution: the Fredholm
/// module with Gram matrix `S gamma`, grading `gamma`, and `F = +1` on `E`,
/// `-1` on `gamma(E)`.
pub fn lift(p: &PolarizedModule, gamma: &CMat, tols: Tolerances) -> Result<FredholmModule> {
    require_compatible(p, gamma, tols)?;
    let n = p.dim();
    let k = p.e.ncols();
    if 2 * k != n {
        return Err(Error::InvalidModule(format!(
            "isotropic subspace has dimension {k}, expected {}",
            n / 2
        )));
    }
    let gamma_e = gamma * &p.e;
    let t = CMat::from_fn(n, n, |i, j| {
        if j < k {
            p.e[(i, j)]
        } else {
            gamma_e[(i, j - k)]
        }
    });
    let sv = t.singular_values_vec()?;
    let gap = sv.last().copied().unwrap_or(0.0) / sv[0].max(1e-300);
    if gap <= tols.structural.min(1e-9) {
        return Err(Error::DegenerateSplit { gap });
    }
    let t_inv = t.try_inverse_m(1e-12)?;
    let signs = CMat::diag_f(
        &(0..n)
            .map(|i| if i < k { 1.0 } else { -1.0 })
            .collect::<Vec<_>>(),
    );
    let f = &(&t * &signs) * &t_inv;
    let gram = (&p.s * gamma).hermitian_part();
    FredholmModule::new(p.pi.clone(), Some(gamma.clone()), f, Some(gram))
}

/// The polarized module underlying an even Fredholm module:
/// `S = G Gamma`, `E` the +1 eigenspace of `F`.
pub fn underlying(fm: &FredholmModule, tols: Tolerances) -> Result<PolarizedModule> {
    let rep = fredholm::validate(fm, tols);
    if let Some(fail) = rep.first_failure() {
        return Err(Error::InvalidModule(format!(
            "{} residual {:.3e}",
            fail.name, fail.residual
        )));
    }
    let gamma = fm
        .gamma
        .as_ref()
        .ok_or_else(|| Error::InvalidModule("underlying module needs an even module".into()))?;
    let s = &fm.gram * gamma;
    // +1 eigenspace of F as the range of the spectral projection (1 + F)/2;
    // avoids eigenvector ambiguity inside the degenerate +-1 clusters.
    let proj = (&fm.f + &CMat::identity(fm.dim())).scale_f(0.5);
    let e = proj.column_span_basis(1e-8)?;
    if 2 * e.ncols() != fm.dim() {
        return Err(Error::InvalidModule(format!(
            "+1 eigenspace of F has dimension {}, expected {}",
            e.ncols(),
            fm.dim() / 2
        )));
    }
    PolarizedModule::new(s, fm.pi.clone(), e)
}

/// A generalized Moebius transformation between two lifts, with blocks
/// `a = (1 + Q)/2`, `b = (1 - Q)/2` for `Q = gamma_target gamma_source`.
#[derive(Clone, Debug)]
pub struct GenMoebius {
    pub a: CMat,
    pub b: CMat,
    pub gamma_source: CMat,
    pub gamma_target: CMat,
    /// The Krein form the endpoints live in.
    pub s: CMat,
}

impl GenMoebius {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn q(&self) -> CMat {
        &self.a - &self.b
    }

    pub fn source_gram(&self) -> CMat {
        (&self.s * &self.gamma_source).hermitian_part()
    }

    pub fn target_gram(&self) -> CMat {
        (&self.s * &self.gamma_target).hermitian_part()
    }

    /// The adjoint of an operator mapping the source Hilbert space to the
    /// target one: `G_source^{-1} X^* G_target`.
    pub fn mixed_adjoint(&self, x: &CMat) -> Result<CMat> {
        let g1_inv = self.source_gram().try_inverse_m(1e-12)?;
        Ok(&(&g1_inv * &x.adjoint_m()) * &self.target_gram())
    }

    /// Residuals of the Connes identities in the mixed adjoint.
    pub fn connes_residuals(&self) -> Result<[f64; 4]> {
        let id = CMat::identity(self.dim());
        let astar = self.mixed_adjoint(&self.a)?;
        let bstar = self.mixed_adjoint(&self.b)?;
        Ok([
            (&(&astar * &self.a) - &(&bstar * &self.b) - &id).op_norm(),
            (&(&astar * &self.b) - &(&bstar * &self.a)).op_norm(),
            (&(&self.a * &astar) - &(&self.b * &bstar) - &id).op_norm(),
            (&(&self.a * &bstar) - &(&self.b * &astar)).op_norm(),
        ])
    }
}

/// Builds the generalized Moebius transformation for an ordered pair of
/// compatible involutions and verifies the Connes identities (mixed
/// adjoints) and commutation with the representation.
pub fn gen_moebius(
    p: &PolarizedModule,
    gamma_target: &CMat,
    gamma_source: &CMat,
    tols: Tolerances,
) -> Result<GenMoebius> {
    require_compatible(p, gamma_target, tols)?;
    require_compatible(p, gamma_source, tols)?;
    let n = p.dim();
    let q = gamma_target * gamma_source;
    let a = (&CMat::identity(n) + &q).scale_f(0.5);
    let b = (&CMat::identity(n) - &q).scale_f(0.5);
    let g = GenMoebius {
        a,
        b,
        gamma_source: gamma_source.clone(),
        gamma_target: gamma_target.clone(),
        s: p.s.clone(),
    };
    let residuals = g.connes_residuals()?;
    let max = residuals.iter().cloned().fold(0.0, f64::max);
    if max > (100.0 * tols.structural).max(1e-8) * q.op_norm().max(1.0) {
        return Err(Error::NotMoebius { residual: max });
    }
    let comm = p
        .pi
        .iter()
        .map(|x| g.a.commutator(x).op_norm().max(g.b.commutator(x).op_norm()) / x.op_norm().max(1e-300))
        .fold(0.0, f64::max);
    if comm > tols.commutation {
        return Err(Error::NotInCommutant { residual: comm });
    }
    Ok(g)
}

/// The polar factorization `g = g_m diag(W, W)`: `m` is the Cayley
/// transform of `Q` and `W = Q^{1/2}`, both in the source inner product.
pub fn gen_polar(g: &GenMoebius, tol: f64) -> Result<(CMat, CMat)> {
    let n = g.dim();
    let q = g.q();
    let ip1 = InnerProduct::new(&g.source_gram(), tol)?;
    let m = &(&CMat::identity(n) - &q) * &(&CMat::identity(n) + &q).try_inverse_m(1e-12)?;
    let w = ip1.positive_sqrt(&q, tol.min(1e-9))?;
    Ok((m, w))
}

/// Groupoid composition: the block product of `g32` and `g21`, defined when
/// the source of `g32` matches the target of `g21`.
pub fn compose(g32: &GenMoebius, g21: &GenMoebius, tol: f64) -> Result<GenMoebius> {
    let residual = (&g32.gamma_source - &g21.gamma_target).op_norm();
    if residual > tol.max(1e-9) {
        return Err(Error::EndpointMismatch { residual });
    }
    Ok(GenMoebius {
        a: &(&g32.a * &g21.a) + &(&g32.b * &g21.b),
        b: &(&g32.a * &g21.b) + &(&g32.b * &g21.a),
        gamma_source: g21.gamma_source.clone(),
        gamma_target: g32.gamma_target.clone(),
        s: g21.s.clone(),
    })
}

/// Applies a generalized Moebius transformation to a lift at its source
/// involution: returns the module
/// `(G_target, W pi W^{-1}, W gamma_source W^{-1}, (aF + b)(bF + a)^{-1})`
/// together with residual checks that the representation is unchanged and
/// the grading lands on the target involution.
pub fn apply(
    g: &GenMoebius,
    fm_source: &FredholmModule,
    tols: Tolerances,
) -> Result<(FredholmModule, CheckReport)> {
    let (_, w) = gen_polar(g, tols.structural)?;
    let w_inv = w.try_inverse_m(1e-12)?;
    let denom = &(&g.b * &fm_source.f) + &g.a;
    let denom_inv = denom.try_inverse_m(1e-12)?;
    let f_new = &(&(&g.a * &fm_source.f) + &g.b) * &denom_inv;
    let pi_new: Vec<CMat> = fm_source.pi.iter().map(|p| &(&w * p) * &w_inv).collect();
    let gamma_new = &(&w * &fm_source.gamma.clone().ok_or_else(|| {
        Error::InvalidModule("generalized Moebius transformations act on even modules".into())
    })?) * &w_inv;

    let mut report = CheckReport::new();
    let pi_resid = fm_source
        .pi
        .iter()
        .zip(pi_new.iter())
        .map(|(p, q)| (p - q).op_norm() / p.op_norm().max(1e-300))
        .fold(0.0, f64::max);
    report.push(Check::required(
        "representation_invariant",
        pi_resid,
        tols.commutation,
    ));
    report.push(Check::required(
        "grading_matches_target",
        (&gamma_new - &g.gamma_target).op_norm(),
        (100.0 * tols.structural).max(1e-8),
    ));
    let out = FredholmModule::new(
        pi_new,
        Some(gamma_new),
        f_new,
        Some(g.target_gram()),
    )?;
    Ok((out, report))
}

/// Checks the real-polarized-module conditions: `C^2 = 1`, the twist
/// `sigma(Cx, Cy) = eps sigma(y, x)`, conjugation of the representation,
/// and `C(E) = E`.
pub fn real_check(p: &PolarizedModule, rs: &RealStructure, tol: f64) -> CheckReport {
    let mut report = CheckReport::new();
    let n = p.dim();
    report.push(Check::required(
        "c_squared",
        (&(&rs.j * &rs.j.conj_m()) - &CMat::identity(n)).op_norm(),
        tol,
    ));
    // sigma(Cx, Cy) = eps sigma(y, x)  <=>  J^* S J = eps conj(S)
    report.push(Check::required(
        "sigma_twist",
        (&(&(&rs.j.adjoint_m() * &p.s) * &rs.j) - &p.s.conj_m().scale_f(rs.epsilon)).op_norm()
            / p.s.op_norm().max(1.0),
        tol,
    ));
    let mut pi_resid = 0.0_f64;
    for (i, op) in p.pi.iter().enumerate() {
        let mut expect = CMat::zeros(n, n);
        for (j, coeff) in rs.c_map[i].iter().enumerate() {
            expect = expect + p.pi[j].scale_c(*coeff);
        }
        match rs.conjugate_operator(op) {
            Ok(conj_op) => {
                pi_resid =
                    pi_resid.max((&conj_op - &expect).op_norm() / op.op_norm().max(1e-300));
            }
            Err(_) => {
                report.push(Check::flag("pi_conjugation_wellposed", false));
                return report;
            }
        }
    }
    report.push(Check::required("pi_conjugation", pi_resid, tol));
    // C(E) = E as column spans
    let ce = rs.apply(&p.e);
    let sines = ce
        .principal_angle_sines(&p.e, 1e-12)
        .unwrap_or_else(|_| vec![1.0]);
    report.push(Check::required(
        "e_invariant",
        sines.first().copied().unwrap_or(0.0),
        tol,
    ));
    report
}
