//! Decompositions, matrix functions and weighted inner products.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use super::{cr, CMat};
use crate::error::{Error, Result};

const SVD_MAX_ITER: usize = 10_000;

impl CMat {
    /// Singular values, descending.
    pub fn singular_values_vec(&self) -> Result<Vec<f64>> {
        if self.len() == 0 {
            return Ok(Vec::new());
        }
        let svd = self
            .inner()
            .clone()
            .try_svd(false, false, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdFailed)?;
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(sv)
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        if self.len() == 0 {
            return 0.0;
        }
        self.singular_values_vec()
            .map(|sv| sv.first().copied().unwrap_or(0.0))
            .unwrap_or(f64::NAN)
    }

    /// Scale-invariant invertibility test: smallest singular value strictly
    /// larger than `tol` times the largest.
    pub fn is_invertible(&self, tol: f64) -> bool {
        if !self.is_square() || self.len() == 0 {
            return false;
        }
        match self.singular_values_vec() {
            Ok(sv) => {
                let max = sv[0];
                let min = *sv.last().unwrap();
                max > 0.0 && min > tol * max
            }
            Err(_) => false,
        }
    }

    /// Inverse with a scale-invariant singularity check.
    pub fn try_inverse_m(&self, tol: f64) -> Result<CMat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square".into()));
        }
        let sv = self.singular_values_vec()?;
        let max = sv[0];
        let min = *sv.last().unwrap();
        if max == 0.0 || min <= tol * max {
            return Err(Error::Singular {
                ratio: if max > 0.0 { min / max } else { 0.0 },
            });
        }
        self.inner()
            .clone()
            .lu()
            .try_inverse()
            .map(CMat::from)
            .ok_or(Error::Singular { ratio: min / max })
    }

    /// Eigendecomposition of a hermitian matrix; returns `(eigenvalues,
    /// eigenvectors)` with eigenvalues ascending and eigenvectors as the
    /// columns of a unitary matrix.  The input is hermitianized first.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMat) {
        let h = self.hermitian_part();
        let se = h.into_inner().symmetric_eigen();
        let n = se.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vecs = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
        (vals, vecs)
    }

    /// Apply a real function to a hermitian matrix through its
    /// eigendecomposition.
    pub fn hermitian_fn(&self, f: impl Fn(f64) -> f64) -> CMat {
        let (vals, vecs) = self.hermitian_eigen();
        let d = CMat::diag_f(&vals.iter().map(|&x| f(x)).collect::<Vec<_>>());
        &(&vecs * &d) * &vecs.adjoint_m()
    }

    /// Positive square root of a hermitian positive definite matrix.
    ///
    /// Errors with `NotPositive` when the smallest eigenvalue is `<= tol`.
    pub fn positive_sqrt(&self, tol: f64) -> Result<CMat> {
        let res = self.hermitian_residual();
        if res > tol.max(1e-12) * self.fro_norm().max(1.0) {
            return Err(Error::NotHermitian { residual: res });
        }
        let (vals, vecs) = self.hermitian_eigen();
        let min_eig = vals.first().copied().unwrap_or(0.0);
        if min_eig <= tol {
            return Err(Error::NotPositive { min_eig });
        }
        let d = CMat::diag_f(&vals.iter().map(|&x| x.sqrt()).collect::<Vec<_>>());
        Ok(&(&vecs * &d) * &vecs.adjoint_m())
    }

    /// Repair a near-involution: returns `K (K^2)^{-1/2}`, which squares to
    /// the identity exactly and commutes with everything `K` commutes with.
    ///
    /// Computed by a Newton-Schulz iteration for the inverse square root of
    /// `K^2`; every iterate is a polynomial in `K^2`, so no eigenbasis of an
    /// indefinite weight is ever needed.  Requires `|K^2 - 1| < 1` in
    /// operator norm.
    pub fn involutive_normalize(&self, _tol: f64) -> Result<CMat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("involutive_normalize".into()));
        }
        self.check_finite()?;
        let n = self.nrows();
        let k2 = self * self;
        let defect = (&k2 - CMat::identity(n)).op_norm();
        if !defect.is_finite() || defect >= 1.0 {
            return Err(Error::NotNormalizable { residual: defect });
        }
        // x_{j+1} = x_j (3 - k2 x_j^2) / 2  converges to (k2)^{-1/2}.
        let mut x = CMat::identity(n);
        for _ in 0..200 {
            let t = &k2 * &(&x * &x);
            let next = &x * &(&(CMat::scalar(n, cr(3.0)) - t) * CMat::scalar(n, cr(0.5)));
            let step = (&next - &x).fro_norm();
            x = next;
            if step < 1e-16 * (n as f64) {
                break;
            }
        }
        Ok(self * &x)
    }

    /// Orthonormal basis of the column span (Euclidean inner product), with a
    /// rank cut at `tol` relative to the largest singular value.
    pub fn column_span_basis(&self, tol: f64) -> Result<CMat> {
        let svd = self
            .inner()
            .clone()
            .try_svd(true, false, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdFailed)?;
        let u = svd.u.ok_or(Error::SvdFailed)?;
        let sv = &svd.singular_values;
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let rank = sv.iter().filter(|&&s| s > tol * max.max(1e-300)).count();
        Ok(CMat::from_fn(self.nrows(), rank, |i, j| u[(i, j)]))
    }

    /// Orthonormal basis of the (right) nullspace: columns `v` with
    /// `M v ~ 0`, singular values `<= tol * sigma_max`.
    pub fn nullspace_basis(&self, tol: f64) -> Result<CMat> {
        let n = self.ncols();
        let svd = self
            .inner()
            .clone()
            .try_svd(false, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdFailed)?;
        let vt = svd.v_t.ok_or(Error::SvdFailed)?;
        let sv = &svd.singular_values;
        let max = sv.iter().cloned().fold(0.0, f64::max);
        // Singular values below the cut, plus directions not reached by the
        // decomposition when rows < cols.
        let mut keep: Vec<usize> = Vec::new();
        for (i, &s) in sv.iter().enumerate() {
            if s <= tol * max.max(1.0) {
                keep.push(i);
            }
        }
        let v = vt.adjoint();
        let mut cols: Vec<Vec<Complex64>> = keep
            .iter()
            .map(|&j| (0..n).map(|i| v[(i, j)]).collect())
            .collect();
        if v.ncols() < n {
            // complete the missing trailing directions by projecting out v
            let have = CMat::from(v.clone());
            let proj = &have * &have.adjoint_m();
            let resid = CMat::identity(n) - proj;
            let extra = resid.column_span_basis(1e-10)?;
            for j in 0..extra.ncols() {
                cols.push((0..n).map(|i| extra[(i, j)]).collect());
            }
        }
        let k = cols.len();
        Ok(CMat::from_fn(n, k, |i, j| cols[j][i]))
    }

    /// Least-squares solve `self * X = rhs` through SVD (minimum norm).
    pub fn lstsq(&self, rhs: &CMat, tol: f64) -> Result<CMat> {
        let svd = self
            .inner()
            .clone()
            .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdFailed)?;
        svd.solve(rhs.inner(), tol)
            .map(CMat::from)
            .map_err(|_| Error::SvdFailed)
    }

    /// Principal angles between the column spans of `self` and `other`
    /// (both orthonormalized internally); returns the sines of the angles,
    /// largest first.
    pub fn principal_angle_sines(&self, other: &CMat, tol: f64) -> Result<Vec<f64>> {
        let u1 = self.column_span_basis(tol)?;
        let u2 = other.column_span_basis(tol)?;
        if u1.ncols() != u2.ncols() {
            return Ok(vec![1.0]);
        }
        let m = &u1.adjoint_m() * &u2;
        let mut sines: Vec<f64> = m
            .singular_values_vec()?
            .iter()
            .map(|&s| (1.0 - s.min(1.0) * s.min(1.0)).max(0.0).sqrt())
            .collect();
        sines.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(sines)
    }
}

/// Adjoint of `m` with respect to the inner product `(x, y) = x^* G y`:
/// `G^{-1} m^* G`.  Errors when `G` is not hermitian positive definite.
pub fn weighted_adjoint(m: &CMat, gram: &CMat, tol: f64) -> Result<CMat> {
    InnerProduct::new(gram, tol).map(|ip| ip.adjoint(m))
}

/// A hermitian positive definite Gram matrix together with its Cholesky
/// factor; the workhorse for adjoints, norms and functional calculus with
/// respect to a non-standard Hilbert inner product `(x, y) = x^* G y`.
#[derive(Clone)]
pub struct InnerProduct {
    gram: CMat,
    /// Lower Cholesky factor, `G = L L^*`.
    l: CMat,
    l_inv: CMat,
    is_identity: bool,
}

impl InnerProduct {
    pub fn new(gram: &CMat, tol: f64) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("gram must be square".into()));
        }
        let res = gram.hermitian_residual();
        if res > tol.max(1e-10) * gram.fro_norm().max(1.0) {
            return Err(Error::NotHermitian { residual: res });
        }
        let n = gram.nrows();
        let is_identity = (gram - &CMat::identity(n)).max_abs() < 1e-14;
        let herm = gram.hermitian_part();
        let (vals, _) = herm.hermitian_eigen();
        let min_eig = vals.first().copied().unwrap_or(f64::NEG_INFINITY);
        let max_eig = vals.last().copied().unwrap_or(0.0);
        if min_eig <= 1e-14 * max_eig.abs().max(1.0) {
            return Err(Error::NotPositive { min_eig });
        }
        let chol: Cholesky<Complex64, Dyn> =
            Cholesky::new(herm.into_inner()).ok_or(Error::NotPositive { min_eig })?;
        let l: DMatrix<Complex64> = chol.l().into();
        if l.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotPositive { min_eig });
        }
        let l_inv = CMat::from(l.clone())
            .try_inverse_m(1e-14)
            .map_err(|_| Error::NotPositive { min_eig })?;
        Ok(InnerProduct {
            gram: gram.clone(),
            l: l.into(),
            l_inv,
            is_identity,
        })
    }

    pub fn identity(n: usize) -> Self {
        InnerProduct {
            gram: CMat::identity(n),
            l: CMat::identity(n),
            l_inv: CMat::identity(n),
            is_identity: true,
        }
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    /// `G^{-1} M^* G`.
    pub fn adjoint(&self, m: &CMat) -> CMat {
        if self.is_identity {
            return m.adjoint_m();
        }
        // G^{-1} M^* G = L^{-*} (L^* M L^{-*})^* L^*
        let t = self.to_plain(m);
        self.from_plain(&t.adjoint_m())
    }

    /// Similarity transform `L^* M L^{-*}` taking G-hermitian operators to
    /// plainly hermitian ones.
    pub fn to_plain(&self, m: &CMat) -> CMat {
        if self.is_identity {
            return m.clone();
        }
        &(&self.l.adjoint_m() * m) * &self.l_inv.adjoint_m()
    }

    pub fn from_plain(&self, m: &CMat) -> CMat {
        if self.is_identity {
            return m.clone();
        }
        &(&self.l_inv.adjoint_m() * m) * &self.l.adjoint_m()
    }

    pub fn hermitian_residual(&self, m: &CMat) -> f64 {
        (m - &self.adjoint(m)).fro_norm()
    }

    pub fn is_hermitian(&self, m: &CMat, tol: f64) -> bool {
        self.hermitian_residual(m) <= tol * m.fro_norm().max(1.0)
    }

    pub fn unitary_residual(&self, m: &CMat) -> f64 {
        (&self.adjoint(m) * m - CMat::identity(m.ncols())).fro_norm()
    }

    pub fn is_unitary(&self, m: &CMat, tol: f64) -> bool {
        self.unitary_residual(m) <= tol * (m.ncols() as f64).max(1.0)
    }

    /// Operator norm with respect to `G`: `|L^* M L^{-*}|_2`.
    pub fn op_norm(&self, m: &CMat) -> f64 {
        self.to_plain(m).op_norm()
    }

    /// Eigendecomposition of a G-hermitian operator: real eigenvalues
    /// ascending and a G-unitary matrix of eigenvectors.
    pub fn hermitian_eigen(&self, m: &CMat) -> (Vec<f64>, CMat) {
        let (vals, vecs) = self.to_plain(m).hermitian_eigen();
        (vals, self.l_inv.adjoint_m() * vecs)
    }

    /// Functional calculus on a G-hermitian operator.
    pub fn hermitian_fn(&self, m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
        self.from_plain(&self.to_plain(m).hermitian_fn(f))
    }

    /// Positive square root of a G-hermitian, G-positive operator.
    pub fn positive_sqrt(&self, m: &CMat, tol: f64) -> Result<CMat> {
        let t = self.to_plain(m);
        let res = t.hermitian_residual();
        if res > tol.max(1e-10) * t.fro_norm().max(1.0) {
            return Err(Error::NotHermitian { residual: res });
        }
        Ok(self.from_plain(&t.positive_sqrt(tol)?))
    }

    /// Smallest eigenvalue of the hermitian part of `L^* M L^{-*}`; positive
    /// iff the sesquilinear form `(x, M y)_G` is positive definite.
    pub fn min_eig(&self, m: &CMat) -> f64 {
        let (vals, _) = self.to_plain(m).hermitian_eigen();
        vals.first().copied().unwrap_or(f64::NEG_INFINITY)
    }
}
