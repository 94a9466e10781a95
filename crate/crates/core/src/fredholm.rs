//! Fredholm modules and the Moebius action on them.
//!
//! A module is `(pi, F, gamma?, gram)`: a *-representation given on a
//! spanning basis, a self-adjoint involution `F` (adjoints with respect to
//! the supplied Gram matrix), and in the even case a grading `gamma`
//! commuting with the representation and anticommuting with `F`.  At finite
//! dimension the compactness of `[F, pi(a)]` is vacuous; the commutator
//! norms are recorded as diagnostics and their decay under refinement is
//! studied in the sphere model.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moebius::{self, MoebiusElement, Side};
use crate::numerics::{CMat, InnerProduct, Tolerances};
use crate::report::{Check, CheckReport};

/// An even (`gamma` present) or odd (`gamma` absent) Fredholm module.
#[derive(Clone, Debug)]
pub struct FredholmModule {
    /// Representation matrices on a spanning basis of the algebra.
    pub pi: Vec<CMat>,
    /// Grading involution; `None` for odd modules.
    pub gamma: Option<CMat>,
    /// The self-adjoint involution `F`.
    pub f: CMat,
    /// Gram matrix of the ambient inner product.
    pub gram: CMat,
}

impl FredholmModule {
    pub fn new(pi: Vec<CMat>, gamma: Option<CMat>, f: CMat, gram: Option<CMat>) -> Result<Self> {
        let dim = f.nrows();
        if !f.is_square() {
            return Err(Error::DimensionMismatch("F must be square".into()));
        }
        let gram = gram.unwrap_or_else(|| CMat::identity(dim));
        if gram.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch("gram".into()));
        }
        if let Some(g) = &gamma {
            if g.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch("gamma".into()));
            }
        }
        for p in &pi {
            if p.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch("representation".into()));
            }
        }
        Ok(FredholmModule { pi, gamma, f, gram })
    }

    pub fn dim(&self) -> usize {
        self.f.nrows()
    }

    pub fn is_even(&self) -> bool {
        self.gamma.is_some()
    }

    pub fn inner_product(&self) -> Result<InnerProduct> {
        InnerProduct::new(&self.gram, 1e-9)
    }

    /// Commutator norms `|[F, pi_i]|`, the compactness diagnostic.
    pub fn commutator_norms(&self) -> Vec<f64> {
        self.pi
            .iter()
            .map(|p| self.f.commutator(p).op_norm())
            .collect()
    }
}

/// Least-squares residual of fitting `target` into the span of `basis`,
/// relative to `|target|`.
pub(crate) fn span_fit_residual(basis: &[CMat], target: &CMat) -> f64 {
    let norm = target.fro_norm();
    if norm == 0.0 {
        return 0.0;
    }
    let (r, c) = target.shape();
    let k = basis.len();
    if k == 0 {
        return 1.0;
    }
    let stacked = CMat::from_fn(r * c, k, |i, j| basis[j][(i / c, i % c)]);
    let rhs = CMat::from_fn(r * c, 1, |i, _| target[(i / c, i % c)]);
    match stacked.lstsq(&rhs, 1e-13) {
        Ok(sol) => (&(&stacked * &sol) - &rhs).fro_norm() / norm,
        Err(_) => 1.0,
    }
}

/// Validates every structural invariant; `pi_product_closure` and the
/// per-element commutator norms are diagnostics.
pub fn validate(fm: &FredholmModule, tols: Tolerances) -> CheckReport {
    let mut report = CheckReport::new();
    let tol = tols.structural;
    report.push(Check::required(
        "gram_hermitian",
        fm.gram.hermitian_residual() / fm.gram.fro_norm().max(1.0),
        tol.max(1e-10),
    ));
    let ip = match InnerProduct::new(&fm.gram, tol) {
        Ok(ip) => ip,
        Err(_) => {
            report.push(Check::flag("gram_positive", false));
            return report;
        }
    };
    report.push(Check::flag("gram_positive", true));
    report.push(Check::required(
        "f_involution",
        fm.f.involution_residual(),
        tol,
    ));
    report.push(Check::required(
        "f_selfadjoint",
        ip.hermitian_residual(&fm.f) / fm.f.fro_norm().max(1.0),
        tol,
    ));
    if let Some(g) = &fm.gamma {
        report.push(Check::required(
            "gamma_involution",
            g.involution_residual(),
            tol,
        ));
        report.push(Check::required(
            "gamma_selfadjoint",
            ip.hermitian_residual(g) / g.fro_norm().max(1.0),
            tol,
        ));
        report.push(Check::required(
            "gamma_f_anticommute",
            g.anticommutator(&fm.f).op_norm(),
            tol,
        ));
        let gamma_pi = fm
            .pi
            .iter()
            .map(|p| g.commutator(p).op_norm() / p.op_norm().max(1e-300))
            .fold(0.0, f64::max);
        report.push(Check::required(
            "gamma_pi_commute",
            gamma_pi,
            tols.commutation,
        ));
    }
    let adj_closure = fm
        .pi
        .iter()
        .map(|p| span_fit_residual(&fm.pi, &ip.adjoint(p)))
        .fold(0.0, f64::max);
    report.push(Check::required(
        "pi_adjoint_closure",
        adj_closure,
        tol.max(1e-8),
    ));
    let mut prod_closure = 0.0_f64;
    for p in &fm.pi {
        for q in &fm.pi {
            prod_closure = prod_closure.max(span_fit_residual(&fm.pi, &(p * q)));
        }
    }
    report.push(Check::diagnostic("pi_product_closure", prod_closure));
    for (i, norm) in fm.commutator_norms().iter().enumerate() {
        report.push(Check::diagnostic(format!("commutator_norm_{i}"), *norm));
    }
    report
}

fn commutant_residual(m: &CMat, pi: &[CMat]) -> f64 {
    pi.iter()
        .map(|p| m.commutator(p).op_norm() / (m.op_norm().max(1.0) * p.op_norm().max(1e-300)))
        .fold(0.0, f64::max)
}

/// The Moebius action `F -> (aF + b)(bF + a)^{-1}` for `(a, b)` in the
/// commutant of the representation.  In the even case, `transform_gamma`
/// additionally maps `gamma -> (a gamma + b)(b gamma + a)^{-1}`.
pub fn moebius_act(
    g: &MoebiusElement,
    fm: &FredholmModule,
    transform_gamma: bool,
    tols: Tolerances,
) -> Result<FredholmModule> {
    let ip = fm.inner_product()?;
    let connes = moebius::connes_check_weighted(&g.a, &g.b, &ip, tols.structural.max(1e-8));
    if !connes.pass {
        return Err(Error::NotMoebius {
            residual: connes.max_residual,
        });
    }
    let resid = commutant_residual(&g.a, &fm.pi).max(commutant_residual(&g.b, &fm.pi));
    if resid > tols.commutation {
        return Err(Error::NotInCommutant { residual: resid });
    }
    let act = |f: &CMat| -> Result<CMat> {
        let denom = &(&g.b * f) + &g.a;
        let denom_inv = denom.try_inverse_m(tols.structural.min(1e-9))?;
        Ok(&(&(&g.a * f) + &g.b) * &denom_inv)
    };
    let f_new = act(&fm.f)?;
    let gamma_new = match (&fm.gamma, transform_gamma) {
        (Some(gamma), true) => Some(act(gamma)?),
        (Some(gamma), false) => Some(gamma.clone()),
        (None, _) => None,
    };
    Ok(FredholmModule {
        pi: fm.pi.clone(),
        gamma: gamma_new,
        f: f_new,
        gram: fm.gram.clone(),
    })
}

/// Residual of the commutator-transform identity
/// `[F', x] = ((bF + a)^{-1})^* [F, x] (bF + a)^{-1} + K`.
///
/// When `x` commutes with both coefficients the remainder `K` vanishes
/// identically and the returned residual is at rounding level; otherwise it
/// measures `|K|` and is reported as a diagnostic.
pub fn commutator_transform_residual(
    g: &MoebiusElement,
    fm: &FredholmModule,
    x: &CMat,
    tols: Tolerances,
) -> Result<f64> {
    let ip = fm.inner_product()?;
    let transformed = moebius_act(g, fm, false, tols)?;
    let denom = &(&g.b * &fm.f) + &g.a;
    let denom_inv = denom.try_inverse_m(tols.structural.min(1e-9))?;
    let lhs = transformed.f.commutator(x);
    let rhs = &(&ip.adjoint(&denom_inv) * &fm.f.commutator(x)) * &denom_inv;
    Ok((&lhs - &rhs).op_norm())
}

/// Unitary conjugation `(pi, gamma, F) -> (U pi U^{-1}, U gamma U^{-1},
/// U F U^{-1})` by a gram-unitary `U`.
pub fn conjugate_module(u: &CMat, fm: &FredholmModule, tol: f64) -> Result<FredholmModule> {
    let ip = fm.inner_product()?;
    let resid = ip.unitary_residual(u);
    if resid > tol.max(1e-9) * (fm.dim() as f64).max(1.0) {
        return Err(Error::NotUnitary { residual: resid });
    }
    let u_inv = u.try_inverse_m(1e-12)?;
    let conj = |m: &CMat| -> CMat { &(u * m) * &u_inv };
    Ok(FredholmModule {
        pi: fm.pi.iter().map(&conj).collect(),
        gamma: fm.gamma.as_ref().map(&conj),
        f: conj(&fm.f),
        gram: fm.gram.clone(),
    })
}

/// Report of sampling the homotopy `F_t = g_t(F)` along the retraction path.
#[derive(Clone, Debug)]
pub struct HomotopyReport {
    pub n_steps: usize,
    /// Largest norm difference between consecutive samples.
    pub max_step: f64,
    /// Worst involution residual along the path.
    pub max_involution_residual: f64,
    /// Worst self-adjointness residual along the path.
    pub max_selfadjoint_residual: f64,
    /// `|F_0 - u F u^*|` for the polar unitary `u`.
    pub endpoint_unitary_residual: f64,
    /// `|F_1 - g(F)|`.
    pub endpoint_transform_residual: f64,
}

/// Samples `F_t` at `n_steps + 1` equispaced parameters of the retraction
/// path; every sample must stay a self-adjoint involution and the endpoints
/// must match the unitary conjugate and the transformed module.
pub fn homotopy_sample(
    g: &MoebiusElement,
    fm: &FredholmModule,
    n_steps: usize,
    tols: Tolerances,
) -> Result<HomotopyReport> {
    if n_steps == 0 {
        return Err(Error::Invalid("n_steps must be positive".into()));
    }
    let ip = fm.inner_product()?;
    let (u, _) = moebius::polar(g, Side::Left, tols.structural.min(1e-9))?;
    let mut samples: Vec<CMat> = Vec::with_capacity(n_steps + 1);
    let mut max_inv: f64 = 0.0;
    let mut max_sa: f64 = 0.0;
    for k in 0..=n_steps {
        let t = k as f64 / n_steps as f64;
        let gt = moebius::retraction_path(g, t, tols.structural.min(1e-9))?;
        let fmt = moebius_act(&gt, fm, false, tols)?;
        max_inv = max_inv.max(fmt.f.involution_residual());
        max_sa = max_sa.max(ip.hermitian_residual(&fmt.f) / fmt.f.fro_norm().max(1.0));
        samples.push(fmt.f);
    }
    let max_step = samples
        .windows(2)
        .map(|w| (&w[1] - &w[0]).op_norm())
        .fold(0.0, f64::max);
    let u_inv = u.try_inverse_m(1e-12)?;
    let conj = &(&u * &fm.f) * &u_inv;
    let endpoint_unitary_residual = (&samples[0] - &conj).op_norm();
    let direct = moebius_act(g, fm, false, tols)?;
    let endpoint_transform_residual = (samples.last().unwrap() - &direct.f).op_norm();
    Ok(HomotopyReport {
        n_steps,
        max_step,
        max_involution_residual: max_inv,
        max_selfadjoint_residual: max_sa,
        endpoint_unitary_residual,
        endpoint_transform_residual,
    })
}

/// A real structure: the conjugation `C(v) = J conj(v)` together with the
/// sign `epsilon` in `C gamma = epsilon gamma C` and the coefficients of the
/// algebra conjugation `c` on the representation basis.
#[derive(Clone, Debug)]
pub struct RealStructure {
    pub j: CMat,
    pub epsilon: f64,
    /// `c(a_i) = sum_j c_map[i][j] a_j` on the representation basis.
    pub c_map: Vec<Vec<Complex64>>,
}

impl RealStructure {
    /// The identity conjugation (plain entrywise conjugate, `c = id`).
    pub fn entrywise(dim: usize, basis_len: usize, epsilon: f64) -> Self {
        let c_map = (0..basis_len)
            .map(|i| {
                (0..basis_len)
                    .map(|j| {
                        if i == j {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        RealStructure {
            j: CMat::identity(dim),
            epsilon,
            c_map,
        }
    }

    /// Applies the antilinear conjugation to a vector or matrix of column
    /// vectors: `C(v) = J conj(v)`.
    pub fn apply(&self, v: &CMat) -> CMat {
        &self.j * &v.conj_m()
    }

    /// The matrix of `C m C` for a linear operator `m`.
    pub fn conjugate_operator(&self, m: &CMat) -> Result<CMat> {
        let j_inv = self.j.try_inverse_m(1e-12)?;
        Ok(&(&self.j * &m.conj_m()) * &j_inv)
    }
}

/// Checks the five conditions of a real Fredholm module:
/// `C^2 = 1`, antiunitarity, `C gamma = eps gamma C`, `C pi(a) C = pi(c(a))`
/// and `C F = F C`.
pub fn real_check(fm: &FredholmModule, rs: &RealStructure, tol: f64) -> CheckReport {
    let mut report = CheckReport::new();
    let n = fm.dim();
    // C^2 = 1  <=>  J conj(J) = 1
    report.push(Check::required(
        "c_squared",
        (&(&rs.j * &rs.j.conj_m()) - &CMat::identity(n)).op_norm(),
        tol,
    ));
    // antiunitary  <=>  J^* G J = conj(G)
    report.push(Check::required(
        "antiunitary",
        (&(&(&rs.j.adjoint_m() * &fm.gram) * &rs.j) - &fm.gram.conj_m()).op_norm()
            / fm.gram.op_norm().max(1.0),
        tol,
    ));
    if let Some(g) = &fm.gamma {
        // C gamma = eps gamma C  <=>  J conj(gamma) = eps gamma J
        report.push(Check::required(
            "gamma_conjugation",
            (&(&rs.j * &g.conj_m()) - &(g * &rs.j).scale_f(rs.epsilon)).op_norm(),
            tol,
        ));
    }
    let mut pi_resid = 0.0_f64;
    for (i, p) in fm.pi.iter().enumerate() {
        let mut expect = CMat::zeros(n, n);
        for (j, coeff) in rs.c_map[i].iter().enumerate() {
            expect = expect + fm.pi[j].scale_c(*coeff);
        }
        let conj_op = match rs.conjugate_operator(p) {
            Ok(m) => m,
            Err(_) => {
                report.push(Check::flag("pi_conjugation_wellposed", false));
                return report;
            }
        };
        pi_resid = pi_resid.max((&conj_op - &expect).op_norm() / p.op_norm().max(1e-300));
    }
    report.push(Check::required("pi_conjugation", pi_resid, tol));
    // C F = F C  <=>  J conj(F) = F J
    report.push(Check::required(
        "f_commutes",
        (&(&rs.j * &fm.f.conj_m()) - &(&fm.f * &rs.j)).op_norm(),
        tol,
    ));
    report
}
