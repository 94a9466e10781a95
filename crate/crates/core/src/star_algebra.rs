//! Finite-dimensional matrix *-algebras.
//!
//! An algebra is stored as an explicit spanning basis of dense matrices,
//! orthonormalized (as vectors in the Frobenius inner product) by a
//! rank-revealing sweep.  Membership is a projection residual; the commutant
//! and the center are nullspaces of stacked commutation constraints.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{cr, CMat};

/// A matrix *-algebra given by a spanning basis, with an optional grading
/// involution acting by conjugation.
#[derive(Clone, Debug)]
pub struct StarAlgebra {
    ambient_dim: usize,
    /// Orthonormal (Frobenius) spanning basis.
    basis: Vec<CMat>,
    unital: bool,
    grading: Option<CMat>,
    tol: f64,
}

fn vec_of(m: &CMat) -> Vec<Complex64> {
    m.inner().iter().copied().collect()
}

fn mat_of(v: &[Complex64], n: usize) -> CMat {
    DMatrix::from_column_slice(n, n, v).into()
}

/// Incrementally orthonormalized span of vectorized matrices.
struct Span {
    n: usize,
    basis: Vec<Vec<Complex64>>,
    tol: f64,
}

impl Span {
    fn new(n: usize, tol: f64) -> Self {
        Span {
            n,
            basis: Vec::new(),
            tol,
        }
    }

    fn project_out(&self, v: &mut [Complex64]) {
        for b in &self.basis {
            let dot: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= dot * bi;
            }
        }
    }

    fn residual_norm(&self, m: &CMat) -> f64 {
        let mut v = vec_of(m);
        // two projection passes for numerical orthogonality
        self.project_out(&mut v);
        self.project_out(&mut v);
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn contains(&self, m: &CMat) -> bool {
        self.residual_norm(m) <= self.tol * m.fro_norm().max(1.0)
    }

    /// Returns true when the matrix added a new direction.
    fn insert(&mut self, m: &CMat) -> bool {
        let norm = m.fro_norm();
        if norm == 0.0 {
            return false;
        }
        let mut v = vec_of(m);
        self.project_out(&mut v);
        self.project_out(&mut v);
        let rnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if rnorm <= self.tol * norm.max(1.0) {
            return false;
        }
        for z in v.iter_mut() {
            *z /= cr(rnorm);
        }
        self.basis.push(v);
        true
    }

    fn matrices(&self) -> Vec<CMat> {
        self.basis.iter().map(|v| mat_of(v, self.n)).collect()
    }
}

impl StarAlgebra {
    /// Builds an algebra from a spanning set, verifying closure under
    /// products and adjoints (and grading conjugation when supplied).
    pub fn new(
        ambient_dim: usize,
        spanning: &[CMat],
        grading: Option<CMat>,
        tol: f64,
    ) -> Result<Self> {
        let mut span = Span::new(ambient_dim, tol);
        for m in spanning {
            if m.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::DimensionMismatch(
                    "algebra element of wrong size".into(),
                ));
            }
            span.insert(m);
        }
        let basis = span.matrices();
        for (i, a) in basis.iter().enumerate() {
            if !span.contains(&a.adjoint_m()) {
                return Err(Error::Invalid(format!(
                    "span not closed under adjoint at basis element {i}"
                )));
            }
            for b in &basis {
                if !span.contains(&(a * b)) {
                    return Err(Error::Invalid(format!(
                        "span not closed under products at basis element {i}"
                    )));
                }
            }
        }
        let unital = span.contains(&CMat::identity(ambient_dim));
        if let Some(g) = &grading {
            if !g.is_involution(tol) {
                return Err(Error::NotInvolution {
                    residual: g.involution_residual(),
                });
            }
            for a in &basis {
                if !span.contains(&(&(g * a) * g)) {
                    return Err(Error::Invalid(
                        "grading conjugation does not preserve the span".into(),
                    ));
                }
            }
        }
        Ok(StarAlgebra {
            ambient_dim,
            basis,
            unital,
            grading,
            tol,
        })
    }

    /// The smallest unital algebra containing the generators, closed under
    /// products (and adjoints when `with_adjoints` is set).  Terminates
    /// because the dimension is bounded by `ambient_dim^2`.
    pub fn generate(
        ambient_dim: usize,
        generators: &[CMat],
        with_adjoints: bool,
        tol: f64,
    ) -> Result<Self> {
        for m in generators {
            if m.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::DimensionMismatch("generator of wrong size".into()));
            }
            m.check_finite()?;
        }
        let cap = ambient_dim * ambient_dim;
        let mut span = Span::new(ambient_dim, tol);
        let mut elems: Vec<CMat> = Vec::new();
        let push = |span: &mut Span, elems: &mut Vec<CMat>, m: CMat| {
            if elems.len() < cap && span.insert(&m) {
                elems.push(m);
            }
        };
        push(&mut span, &mut elems, CMat::identity(ambient_dim));
        for g in generators {
            push(&mut span, &mut elems, g.clone());
            if with_adjoints {
                push(&mut span, &mut elems, g.adjoint_m());
            }
        }
        loop {
            let before = elems.len();
            let snapshot = elems.clone();
            for a in &snapshot {
                for b in &snapshot {
                    if elems.len() >= cap {
                        break;
                    }
                    push(&mut span, &mut elems, a * b);
                }
            }
            if elems.len() == before || elems.len() >= cap {
                break;
            }
        }
        let basis = span.matrices();
        Ok(StarAlgebra {
            ambient_dim,
            unital: true,
            grading: None,
            tol,
            basis,
        })
    }

    /// Full matrix algebra on `C^n`.
    pub fn full(n: usize, tol: f64) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(CMat::from_fn(n, n, |r, c| {
                    if (r, c) == (i, j) {
                        cr(1.0)
                    } else {
                        cr(0.0)
                    }
                }));
            }
        }
        StarAlgebra {
            ambient_dim: n,
            basis,
            unital: true,
            grading: None,
            tol,
        }
    }

    /// Scalar multiples of the identity on `C^n`.
    pub fn scalars(n: usize, tol: f64) -> Self {
        StarAlgebra {
            ambient_dim: n,
            basis: vec![CMat::identity(n).scale_f(1.0 / (n as f64).sqrt())],
            unital: true,
            grading: None,
            tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn grading(&self) -> Option<&CMat> {
        self.grading.as_ref()
    }

    pub fn with_grading(mut self, grading: CMat) -> Result<Self> {
        if !grading.is_involution(self.tol) {
            return Err(Error::NotInvolution {
                residual: grading.involution_residual(),
            });
        }
        self.grading = Some(grading);
        Ok(self)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn span(&self) -> Span {
        let mut span = Span::new(self.ambient_dim, self.tol);
        for b in &self.basis {
            span.insert(b);
        }
        span
    }

    /// Frobenius-norm distance from `m` to the span.
    pub fn membership_residual(&self, m: &CMat) -> f64 {
        self.span().residual_norm(m)
    }

    pub fn contains(&self, m: &CMat, tol: f64) -> bool {
        self.membership_residual(m) <= tol * m.fro_norm().max(1.0)
    }

    /// The commutant `{x : [x, b] = 0 for all basis b}` as a *-algebra,
    /// computed from the nullspace of the stacked commutation constraints.
    pub fn commutant(&self) -> Result<StarAlgebra> {
        let n = self.ambient_dim;
        let id = DMatrix::<Complex64>::identity(n, n);
        let k = self.basis.len();
        let mut stacked = DMatrix::<Complex64>::zeros(k * n * n, n * n);
        for (idx, b) in self.basis.iter().enumerate() {
            // columns index vec(X) column-major: vec(BX - XB) = (I (x) B - B^T (x) I) vec X
            let block = id.kronecker(b.inner()) - b.inner().transpose().kronecker(&id);
            stacked
                .view_mut((idx * n * n, 0), (n * n, n * n))
                .copy_from(&block);
        }
        let null = CMat::from(stacked).nullspace_basis(self.tol)?;
        let basis: Vec<CMat> = (0..null.ncols())
            .map(|j| {
                let col: Vec<Complex64> = (0..n * n).map(|i| null[(i, j)]).collect();
                mat_of(&col, n)
            })
            .collect();
        StarAlgebra::new(n, &basis, None, self.tol)
    }

    /// The center: the intersection of the algebra span with its commutant.
    pub fn center(&self) -> Result<StarAlgebra> {
        let comm = self.commutant()?;
        let n = self.ambient_dim;
        // x = sum_i c_i e_i constrained by (1 - P_comm) x = 0
        let mut own = DMatrix::<Complex64>::zeros(n * n, self.basis.len());
        for (j, b) in self.basis.iter().enumerate() {
            for (i, z) in b.inner().iter().enumerate() {
                own[(i, j)] = *z;
            }
        }
        let mut cspan = DMatrix::<Complex64>::zeros(n * n, comm.basis.len());
        for (j, b) in comm.basis.iter().enumerate() {
            for (i, z) in b.inner().iter().enumerate() {
                cspan[(i, j)] = *z;
            }
        }
        let proj = &cspan * cspan.adjoint();
        let resid = CMat::from(&own - &proj * &own);
        let null = resid.nullspace_basis(self.tol)?;
        let basis: Vec<CMat> = (0..null.ncols())
            .map(|j| {
                let mut acc = CMat::zeros(n, n);
                for (i, b) in self.basis.iter().enumerate() {
                    acc = acc + b.scale_c(null[(i, j)]);
                }
                acc
            })
            .collect();
        StarAlgebra::new(n, &basis, None, self.tol)
    }

    /// Even/odd parts of `x` with respect to the grading:
    /// `even = (x + g x g)/2`, `odd = (x - g x g)/2`.
    pub fn parity_split(&self, x: &CMat) -> Result<(CMat, CMat)> {
        let g = self.grading.as_ref().ok_or(Error::NoGrading)?;
        let gxg = &(g * x) * g;
        let even = (x + &gxg).scale_f(0.5);
        let odd = (x - &gxg).scale_f(0.5);
        Ok((even, odd))
    }

    /// Span containment: every basis element of `other` lies in this span.
    pub fn contains_algebra(&self, other: &StarAlgebra, tol: f64) -> bool {
        other.basis.iter().all(|b| self.contains(b, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random;
    use crate::numerics::DEFAULT_TOL;

    fn e(n: usize, i: usize, j: usize) -> CMat {
        CMat::from_fn(n, n, |r, c| if (r, c) == (i, j) { cr(1.0) } else { cr(0.0) })
    }

    #[test]
    fn generate_examples() {
        // {identity} -> scalars, 1-dimensional
        let alg = StarAlgebra::generate(3, &[CMat::identity(3)], true, DEFAULT_TOL).unwrap();
        assert_eq!(alg.dim(), 1);

        // {e12} with adjoints -> full M2.  Closure enumeration oracle:
        // e12, e21, e12*e21 = e11, e21*e12 = e22 already span all of M2.
        let alg = StarAlgebra::generate(2, &[e(2, 0, 1)], true, DEFAULT_TOL).unwrap();
        assert_eq!(alg.dim(), 4);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!(alg.contains(&e(2, i, j), 1e-9));
        }

        // {diag(1,2)} -> diagonal algebra: 1 and diag(1,2) span it; diag(1,4)
        // is dependent on those two, so the closure stabilizes at dimension 2.
        let alg =
            StarAlgebra::generate(2, &[CMat::diag_f(&[1.0, 2.0])], false, DEFAULT_TOL).unwrap();
        assert_eq!(alg.dim(), 2);
        assert!(alg.contains(&CMat::diag_f(&[5.0, -3.0]), 1e-9));
        assert!(!alg.contains(&e(2, 0, 1), 1e-6));
    }

    #[test]
    fn commutant_examples() {
        // full M2 -> scalars (Schur)
        let m2 = StarAlgebra::full(2, DEFAULT_TOL);
        let comm = m2.commutant().unwrap();
        assert_eq!(comm.dim(), 1);
        assert!(comm.contains(&CMat::identity(2), 1e-9));

        // scalars in dim 3 -> full M3
        let sc = StarAlgebra::scalars(3, DEFAULT_TOL);
        assert_eq!(sc.commutant().unwrap().dim(), 9);

        // diagonal algebra in M2 -> diagonal algebra
        let diag =
            StarAlgebra::generate(2, &[CMat::diag_f(&[1.0, 2.0])], false, DEFAULT_TOL).unwrap();
        let comm = diag.commutant().unwrap();
        assert_eq!(comm.dim(), 2);
        assert!(comm.contains(&CMat::diag_f(&[3.0, 7.0]), 1e-9));
    }

    #[test]
    fn center_examples() {
        let m2 = StarAlgebra::full(2, DEFAULT_TOL);
        assert_eq!(m2.center().unwrap().dim(), 1);

        let diag =
            StarAlgebra::generate(2, &[CMat::diag_f(&[1.0, 2.0])], false, DEFAULT_TOL).unwrap();
        let center = diag.center().unwrap();
        assert_eq!(center.dim(), diag.dim());
        assert!(center.contains_algebra(&diag, 1e-8));

        // M2 (+) M2 block algebra -> 2-dimensional block scalars
        let mut gens = Vec::new();
        for (i, j) in [(0, 1), (1, 0)] {
            gens.push(CMat::from_fn(4, 4, |r, c| {
                if (r, c) == (i, j) {
                    cr(1.0)
                } else {
                    cr(0.0)
                }
            }));
            gens.push(CMat::from_fn(4, 4, |r, c| {
                if (r, c) == (i + 2, j + 2) {
                    cr(1.0)
                } else {
                    cr(0.0)
                }
            }));
        }
        let blocks = StarAlgebra::generate(4, &gens, true, DEFAULT_TOL).unwrap();
        assert_eq!(blocks.dim(), 8);
        let center = blocks.center().unwrap();
        assert_eq!(center.dim(), 2);
        assert!(center.contains(&CMat::diag_f(&[1.0, 1.0, 2.0, 2.0]), 1e-8));
    }

    #[test]
    fn parity_split_examples() {
        let g = CMat::diag_f(&[1.0, -1.0]);
        let alg = StarAlgebra::full(2, DEFAULT_TOL)
            .with_grading(g.clone())
            .unwrap();
        let x = CMat::from_rows_f(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let (even, odd) = alg.parity_split(&x).unwrap();
        assert!((&even - &CMat::diag_f(&[1.0, 4.0])).fro_norm() < 1e-13);
        assert!((&odd - &CMat::from_rows_f(&[vec![0.0, 2.0], vec![3.0, 0.0]])).fro_norm() < 1e-13);
        assert!((&(&even + &odd) - &x).fro_norm() == 0.0);

        // commuting x -> (x, 0); anticommuting x -> (0, x)
        let (e1, o1) = alg.parity_split(&CMat::diag_f(&[2.0, 5.0])).unwrap();
        assert!(o1.fro_norm() < 1e-14 && e1.fro_norm() > 0.0);
        let flip = CMat::from_rows_f(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (e2, o2) = alg.parity_split(&flip).unwrap();
        assert!(e2.fro_norm() < 1e-14 && (&o2 - &flip).fro_norm() < 1e-14);

        // parity components (anti)commute with the grading
        assert!(g.commutator(&even).fro_norm() < 1e-12);
        assert!(g.anticommutator(&odd).fro_norm() < 1e-12);
    }

    #[test]
    fn bicommutant_contains_algebra() {
        let mut rng = random::rng_from_seed(11);
        for ambient in [2usize, 3, 4, 6] {
            let gens: Vec<CMat> = (0..2)
                .map(|_| random::matrix(&mut rng, ambient, ambient))
                .collect();
            let alg = StarAlgebra::generate(ambient, &gens, true, DEFAULT_TOL).unwrap();
            let bicomm = alg.commutant().unwrap().commutant().unwrap();
            assert!(
                bicomm.contains_algebra(&alg, 1e-7),
                "bicommutant must contain the algebra (ambient {ambient})"
            );
            // center = algebra intersect commutant as spans
            let center = alg.center().unwrap();
            assert!(alg.contains_algebra(&center, 1e-7));
            assert!(alg.commutant().unwrap().contains_algebra(&center, 1e-7));
        }
    }
}
