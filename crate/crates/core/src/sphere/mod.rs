//! Spectral model of the canonical polarized module on the 2-sphere.
//!
//! The truncated space of complexified 1-forms is spanned by the exact
//! forms `dY_lm` (`1 <= l <= lmax`) followed by the round-coexact forms
//! `*dY_lm`, sampled in the orthonormal round frame `(e_theta, e_phi)` on a
//! Gauss-Legendre x uniform grid.  The canonical pairing
//! `sigma(w, n) = -i int conj(w) ^ n` is metric-independent; a Riemannian
//! metric enters only through its pointwise Hodge star, which after
//! projection and involution repair becomes a compatible involution of the
//! canonical polarized module.  Multiplication operators are
//! multiply-then-project, so their commutators with the lifted `F` are
//! genuinely nonzero and shrink as the truncation is refined.

pub mod harmonics;
pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{FredholmModule, RealStructure};
use crate::numerics::{c, cr, CMat, Tolerances};
use crate::polarized::{self, PolarizedModule};
use harmonics::LegendrePoint;
use quadrature::{sphere_grid, QuadNode};

/// Truncated basis of 1-forms with cached quadrature and Gram data.
pub struct SphereBasis {
    pub lmax: usize,
    /// Number of `(l, m)` pairs; the basis has `2 * n_pairs` elements.
    pub n_pairs: usize,
    pub nodes: Vec<QuadNode>,
    /// `(l, m)` in basis order (the coexact block repeats this order).
    pub pairs: Vec<(usize, i32)>,
    n_phi: usize,
    legendre: Vec<LegendrePoint>,
    /// Frame samples, `2 * n_nodes` rows by `2 * n_pairs` columns; row
    /// `2q` is the `e_theta` component at node `q`, row `2q + 1` the
    /// `e_phi` component.
    samples: CMat,
    /// `(W Phi)^*`, the weighted analysis operator.
    analysis: CMat,
    round_gram: CMat,
    round_gram_inv: CMat,
    sigma: CMat,
}

impl SphereBasis {
    pub fn new(lmax: usize) -> Result<Self> {
        if lmax < 1 {
            return Err(Error::Invalid("lmax must be at least 1".into()));
        }
        let n_theta = 2 * (lmax + 2);
        let n_phi = 4 * lmax + 4;
        let nodes = sphere_grid(n_theta, n_phi);
        let legendre: Vec<LegendrePoint> = (0..n_theta)
            .map(|t| LegendrePoint::new(lmax, nodes[t * n_phi].theta))
            .collect();
        let pairs: Vec<(usize, i32)> = (1..=lmax)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
            .collect();
        let n_pairs = pairs.len();
        let n_nodes = nodes.len();

        // frame components of dY_lm: (dQ/dtheta, i m Q / sin) e^{i m phi};
        // the coexact block applies the round star (a, b) -> (-b, a)
        let mut raw = vec![Complex64::new(0.0, 0.0); 2 * n_nodes * 2 * n_pairs];
        let cols = 2 * n_pairs;
        for q in 0..n_nodes {
            let lp = &legendre[q / n_phi];
            let phi = nodes[q].phi;
            for (j, &(l, m)) in pairs.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, m as f64 * phi);
                let comp_theta = phase * lp.dq_dtheta(l, m);
                let comp_phi = phase * c(0.0, m as f64 / lp.s) * lp.q(l, m);
                raw[2 * q * cols + j] = comp_theta;
                raw[(2 * q + 1) * cols + j] = comp_phi;
                raw[2 * q * cols + n_pairs + j] = -comp_phi;
                raw[(2 * q + 1) * cols + n_pairs + j] = comp_theta;
            }
        }
        let samples = CMat::from_fn(2 * n_nodes, cols, |i, j| raw[i * cols + j]);

        let mut weighted = samples.clone();
        for q in 0..n_nodes {
            let w = cr(nodes[q].weight);
            for j in 0..cols {
                weighted[(2 * q, j)] *= w;
                weighted[(2 * q + 1, j)] *= w;
            }
        }
        let analysis = weighted.adjoint_m();
        let round_gram = (&analysis * &samples).hermitian_part();
        let round_gram_inv = round_gram.try_inverse_m(1e-12)?;

        // sigma = -i int conj(w) ^ n: per node the 2x2 block [[0, -iw], [iw, 0]]
        let mut sigma_samples = samples.clone();
        for q in 0..n_nodes {
            let w = nodes[q].weight;
            for j in 0..cols {
                let top = samples[(2 * q, j)];
                let bot = samples[(2 * q + 1, j)];
                sigma_samples[(2 * q, j)] = c(0.0, -w) * bot;
                sigma_samples[(2 * q + 1, j)] = c(0.0, w) * top;
            }
        }
        let sigma = &samples.adjoint_m() * &sigma_samples;

        Ok(SphereBasis {
            lmax,
            n_pairs,
            nodes,
            pairs,
            n_phi,
            legendre,
            samples,
            analysis,
            round_gram,
            round_gram_inv,
            sigma,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n_pairs
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Gram matrix of the canonical pairing `sigma`.
    pub fn sigma_gram(&self) -> &CMat {
        &self.sigma
    }

    /// Round L2 Gram of the basis (diagonal, entries `l(l+1)`).
    pub fn round_gram(&self) -> &CMat {
        &self.round_gram
    }

    /// Round L2 projection of sampled frame data onto the truncated span.
    fn project(&self, x: &CMat) -> CMat {
        &self.round_gram_inv * &(&self.analysis * x)
    }

    /// Samples of the scalar harmonic `Y_lm` at the quadrature nodes.
    pub fn scalar_samples(&self, l: usize, m: i32) -> Result<Vec<Complex64>> {
        if l > self.lmax || m.unsigned_abs() as usize > l {
            return Err(Error::Invalid(format!(
                "harmonic ({l},{m}) outside the basis (lmax {})",
                self.lmax
            )));
        }
        Ok((0..self.n_nodes())
            .map(|q| {
                let lp = &self.legendre[q / self.n_phi];
                Complex64::from_polar(1.0, m as f64 * self.nodes[q].phi) * lp.q(l, m)
            })
            .collect())
    }

    /// The multiplication operator `pi(Y_lm)`: multiply the frame samples
    /// pointwise, then project back onto the truncated span.
    pub fn multiplication_operator(&self, l: usize, m: i32) -> Result<CMat> {
        let f = self.scalar_samples(l, m)?;
        let mut scaled = self.samples.clone();
        for q in 0..self.n_nodes() {
            for j in 0..self.dim() {
                scaled[(2 * q, j)] *= f[q];
                scaled[(2 * q + 1, j)] *= f[q];
            }
        }
        Ok(self.project(&scaled))
    }

    /// The exact round Hodge involution `i * star`, block-antidiagonal on
    /// the (exact, coexact) splitting.
    pub fn round_gamma(&self) -> CMat {
        let n = self.n_pairs;
        CMat::from_fn(2 * n, 2 * n, |i, j| {
            if i == j + n {
                c(0.0, 1.0)
            } else if j == i + n {
                c(0.0, -1.0)
            } else {
                cr(0.0)
            }
        })
    }

    /// The Hodge involution of a metric: pointwise star, round projection,
    /// involution repair, sign fixed by positivity of `S gamma`.
    pub fn gamma_from_metric(&self, metric: &MetricField, _tols: Tolerances) -> Result<CMat> {
        if metric.g.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch("metric node count".into()));
        }
        // pointwise candidate i * star_g acting on frame samples
        let mut transformed = self.samples.clone();
        for (q, gm) in metric.g.iter().enumerate() {
            let [g11, g12, g22] = *gm;
            let det = g11 * g22 - g12 * g12;
            if det <= 0.0 || g11 <= 0.0 {
                return Err(Error::NotSpd { node: q });
            }
            let rd = det.sqrt();
            // star in the round frame: (1/sqrt(det)) [[g12, -g11], [g22, -g12]]
            let (h11, h12) = (g12 / rd, -g11 / rd);
            let (h21, h22) = (g22 / rd, -g12 / rd);
            for j in 0..self.dim() {
                let top = self.samples[(2 * q, j)];
                let bot = self.samples[(2 * q + 1, j)];
                transformed[(2 * q, j)] = c(0.0, 1.0) * (cr(h11) * top + cr(h12) * bot);
                transformed[(2 * q + 1, j)] = c(0.0, 1.0) * (cr(h21) * top + cr(h22) * bot);
            }
        }
        let k = self.project(&transformed);
        let gamma = k.involutive_normalize(1e-12)?;
        // fix the overall sign by positivity of S gamma
        let gram = (&self.sigma * &gamma).hermitian_part();
        let (vals, _) = gram.hermitian_eigen();
        let min_eig = vals.first().copied().unwrap_or(f64::NEG_INFINITY);
        let max_eig = vals.last().copied().unwrap_or(f64::NEG_INFINITY);
        if min_eig > 0.0 {
            Ok(gamma)
        } else if max_eig < 0.0 {
            Ok(-gamma)
        } else {
            Err(Error::NotCompatible(format!(
                "projected Hodge involution gives an indefinite inner product \
                 (eigenvalues in [{min_eig:.3e}, {max_eig:.3e}])"
            )))
        }
    }

    /// Size of the involution repair `|K^2 - 1|` before normalization, a
    /// truncation-convergence diagnostic.
    pub fn hodge_repair_magnitude(&self, metric: &MetricField) -> Result<f64> {
        let mut transformed = self.samples.clone();
        for (q, gm) in metric.g.iter().enumerate() {
            let [g11, g12, g22] = *gm;
            let det = g11 * g22 - g12 * g12;
            if det <= 0.0 || g11 <= 0.0 {
                return Err(Error::NotSpd { node: q });
            }
            let rd = det.sqrt();
            let (h11, h12) = (g12 / rd, -g11 / rd);
            let (h21, h22) = (g22 / rd, -g12 / rd);
            for j in 0..self.dim() {
                let top = self.samples[(2 * q, j)];
                let bot = self.samples[(2 * q + 1, j)];
                transformed[(2 * q, j)] = c(0.0, 1.0) * (cr(h11) * top + cr(h12) * bot);
                transformed[(2 * q + 1, j)] = c(0.0, 1.0) * (cr(h21) * top + cr(h22) * bot);
            }
        }
        let k = self.project(&transformed);
        Ok((&(&k * &k) - &CMat::identity(self.dim())).op_norm())
    }

    /// The canonical polarized module: `S` the sigma Gram matrix, `E` the
    /// exact block, `pi` the multiplication operators of all harmonics with
    /// `l <= func_lmax`.
    pub fn canonical_polarized(&self, func_lmax: usize) -> Result<PolarizedModule> {
        if func_lmax > self.lmax {
            return Err(Error::Invalid(
                "function band must not exceed the form band".into(),
            ));
        }
        let n = self.n_pairs;
        let e = CMat::from_fn(2 * n, n, |i, j| if i == j { cr(1.0) } else { cr(0.0) });
        let mut pi = Vec::new();
        for l in 0..=func_lmax {
            for m in -(l as i32)..=(l as i32) {
                pi.push(self.multiplication_operator(l, m)?);
            }
        }
        PolarizedModule::new(self.sigma.clone(), pi, e)
    }

    /// The involution that is `+1` on the exact block and `-1` on its
    /// `gamma`-image, without going through a full polarized module.
    pub fn f_from_gamma(&self, gamma: &CMat) -> Result<CMat> {
        let n = self.n_pairs;
        let t = CMat::from_fn(2 * n, 2 * n, |i, j| {
            if j < n {
                if i == j {
                    cr(1.0)
                } else {
                    cr(0.0)
                }
            } else {
                gamma[(i, j - n)]
            }
        });
        let t_inv = t.try_inverse_m(1e-12)?;
        let signs = CMat::diag_f(
            &(0..2 * n)
                .map(|i| if i < n { 1.0 } else { -1.0 })
                .collect::<Vec<_>>(),
        );
        Ok(&(&t * &signs) * &t_inv)
    }

    /// Lift of the canonical polarized module at the Hodge involution of
    /// `metric`.
    pub fn conformal_lift(
        &self,
        metric: &MetricField,
        func_lmax: usize,
        tols: Tolerances,
    ) -> Result<FredholmModule> {
        let gamma = self.gamma_from_metric(metric, tols)?;
        let p = self.canonical_polarized(func_lmax)?;
        polarized::lift(&p, &gamma, tols)
    }

    /// Pointwise complex conjugation of frame components, expressed on
    /// coefficients: maps `(l, m)` to `(l, -m)` with the Condon-Shortley
    /// sign in both blocks.  Real with `epsilon = -1`.
    pub fn real_structure(&self, func_lmax: usize) -> RealStructure {
        let n = self.n_pairs;
        let pair_index = |l: usize, m: i32| -> usize { l * l - 1 + (m + l as i32) as usize };
        let mut j = CMat::zeros(2 * n, 2 * n);
        for &(l, m) in &self.pairs {
            let from = pair_index(l, m);
            let to = pair_index(l, -m);
            let sign = if m % 2 != 0 { -1.0 } else { 1.0 };
            j[(to, from)] = cr(sign);
            j[(to + n, from + n)] = cr(sign);
        }
        let mut c_map = Vec::new();
        let fn_index = |l: i32, m: i32| -> usize { (l * l + l + m) as usize };
        for l in 0..=(func_lmax as i32) {
            for m in -l..=l {
                let mut row = vec![Complex64::new(0.0, 0.0); (func_lmax + 1) * (func_lmax + 1)];
                let sign = if m % 2 != 0 { -1.0 } else { 1.0 };
                row[fn_index(l, -m)] = cr(sign);
                c_map.push(row);
            }
        }
        RealStructure {
            j,
            epsilon: -1.0,
            c_map,
        }
    }
}

/// Per-node 2x2 symmetric positive metric in the round orthonormal frame,
/// stored as `[g11, g12, g22]`.
#[derive(Clone, Debug)]
pub struct MetricField {
    pub g: Vec<[f64; 3]>,
}

impl MetricField {
    pub fn round(basis: &SphereBasis) -> Self {
        MetricField {
            g: vec![[1.0, 0.0, 1.0]; basis.n_nodes()],
        }
    }

    pub fn from_fn(basis: &SphereBasis, f: impl Fn(f64, f64) -> [f64; 3]) -> Self {
        MetricField {
            g: basis.nodes.iter().map(|n| f(n.theta, n.phi)).collect(),
        }
    }

    /// Conformal rescaling `exp(2 phi) g`.
    pub fn conformal_scale(&self, basis: &SphereBasis, phi: impl Fn(f64, f64) -> f64) -> Self {
        MetricField {
            g: self
                .g
                .iter()
                .zip(basis.nodes.iter())
                .map(|(g, n)| {
                    let s = (2.0 * phi(n.theta, n.phi)).exp();
                    [g[0] * s, g[1] * s, g[2] * s]
                })
                .collect(),
        }
    }
}

/// Band-limited coefficient list `[(l, m, re, im), ...]` for a real scalar
/// field `Re(sum c_lm Y_lm)`.
pub type CoeffList = Vec<(i32, i32, f64, f64)>;

/// Serializable metric description used by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricSpec {
    Round,
    /// `exp(2 phi)` times the round metric.
    Conformal { phi_coeffs: CoeffList },
    /// Components in the round orthonormal frame.
    Tensor {
        a11: CoeffList,
        a12: CoeffList,
        a22: CoeffList,
    },
}

fn eval_coeffs(coeffs: &CoeffList, nodes: &[QuadNode], n_phi: usize) -> Result<Vec<f64>> {
    let lmax = coeffs
        .iter()
        .map(|&(l, _, _, _)| l)
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    for &(l, m, _, _) in coeffs {
        if l < 0 || m.abs() > l {
            return Err(Error::Invalid(format!("bad harmonic index ({l},{m})")));
        }
    }
    let n_theta = nodes.len() / n_phi;
    let tables: Vec<LegendrePoint> = (0..n_theta)
        .map(|t| LegendrePoint::new(lmax, nodes[t * n_phi].theta))
        .collect();
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(q, node)| {
            let lp = &tables[q / n_phi];
            coeffs
                .iter()
                .map(|&(l, m, re, im)| {
                    let y = Complex64::from_polar(1.0, m as f64 * node.phi) * lp.q(l as usize, m);
                    (c(re, im) * y).re
                })
                .sum()
        })
        .collect())
}

impl MetricSpec {
    pub fn build(&self, basis: &SphereBasis) -> Result<MetricField> {
        match self {
            MetricSpec::Round => Ok(MetricField::round(basis)),
            MetricSpec::Conformal { phi_coeffs } => {
                let phi = eval_coeffs(phi_coeffs, &basis.nodes, basis.n_phi)?;
                Ok(MetricField {
                    g: phi
                        .iter()
                        .map(|&p| {
                            let s = (2.0 * p).exp();
                            [s, 0.0, s]
                        })
                        .collect(),
                })
            }
            MetricSpec::Tensor { a11, a12, a22 } => {
                let v11 = eval_coeffs(a11, &basis.nodes, basis.n_phi)?;
                let v12 = eval_coeffs(a12, &basis.nodes, basis.n_phi)?;
                let v22 = eval_coeffs(a22, &basis.nodes, basis.n_phi)?;
                let g: Vec<[f64; 3]> = v11
                    .iter()
                    .zip(v12.iter())
                    .zip(v22.iter())
                    .map(|((&a, &b), &d)| [a, b, d])
                    .collect();
                for (q, gm) in g.iter().enumerate() {
                    if gm[0] <= 0.0 || gm[0] * gm[2] - gm[1] * gm[1] <= 0.0 {
                        return Err(Error::NotSpd { node: q });
                    }
                }
                Ok(MetricField { g })
            }
        }
    }
}

/// Decay table of `|[F, pi(Y_lm)]|` across truncation levels; the
/// executable rendering of the compactness clauses.
pub fn commutator_decay(
    f_l: usize,
    f_m: i32,
    lmax_list: &[usize],
    spec: &MetricSpec,
    tols: Tolerances,
) -> Result<Vec<(usize, f64)>> {
    let mut table = Vec::new();
    for &lmax in lmax_list {
        if lmax < f_l + 1 {
            return Err(Error::Invalid(format!(
                "lmax {lmax} too small for harmonic degree {f_l}"
            )));
        }
        let basis = SphereBasis::new(lmax)?;
        let metric = spec.build(&basis)?;
        let gamma = basis.gamma_from_metric(&metric, tols)?;
        let f = basis.f_from_gamma(&gamma)?;
        let mult = basis.multiplication_operator(f_l, f_m)?;
        table.push((lmax, f.commutator(&mult).op_norm()));
    }
    Ok(table)
}

/// `|tr(sum pi(f_i) [F, pi(g_i)]) - tr(sum pi(f_i) [u F u^{-1}, pi(g_i)])|`
/// for a gram-unitary `u` commuting with the representation.
pub fn trace_invariance_check(
    fm: &FredholmModule,
    u: &CMat,
    f_idx: &[usize],
    g_idx: &[usize],
    tol: f64,
) -> Result<f64> {
    let ip = fm.inner_product()?;
    let resid = ip.unitary_residual(u);
    if resid > tol.max(1e-8) * (fm.dim() as f64) {
        return Err(Error::NotUnitary { residual: resid });
    }
    let comm = fm
        .pi
        .iter()
        .map(|p| u.commutator(p).op_norm() / p.op_norm().max(1e-300))
        .fold(0.0, f64::max);
    if comm > tol.max(1e-8) * 10.0 {
        return Err(Error::NotInCommutant { residual: comm });
    }
    let trace_of = |f: &CMat| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&fi, &gi) in f_idx.iter().zip(g_idx.iter()) {
            acc += (&fm.pi[fi] * &f.commutator(&fm.pi[gi])).trace_c();
        }
        acc
    };
    let t1 = trace_of(&fm.f);
    let u_inv = u.try_inverse_m(1e-12)?;
    let moved = &(u * &fm.f) * &u_inv;
    let t2 = trace_of(&moved);
    Ok((t1 - t2).norm())
}

#[cfg(test)]
mod tests;
