//! Dense complex matrix substrate.
//!
//! Every operator appearing in the crate (algebra elements, involutions,
//! gradings, Moebius coefficients, Gram matrices of inner products) is a
//! [`CMat`]: a dense, double-precision complex matrix.  Predicates are
//! tolerance-parameterized; matrix functions go through hermitian
//! eigendecompositions, optionally weighted by an explicit Gram matrix.

mod linalg;
pub mod random;

pub use linalg::{weighted_adjoint, InnerProduct};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Deref, DerefMut, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default tolerance for the exact-algebra modules.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default tolerance for the sphere spectral model, where quadrature and
/// truncation error dominate.
pub const SPHERE_TOL: f64 = 1e-6;

/// Tolerance pair used by the module-level validators.
///
/// `structural` bounds exact-identity residuals (involutions, adjointness,
/// reconstruction formulas).  `commutation` bounds residuals of commutators
/// with the representation; on the sphere those are limited by spectral
/// truncation rather than by arithmetic, so they carry their own budget.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub structural: f64,
    pub commutation: f64,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            structural: tol,
            commutation: tol,
        }
    }

    pub fn with_commutation(mut self, comm: f64) -> Self {
        self.commutation = comm;
        self
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::uniform(DEFAULT_TOL)
    }
}

/// Shorthand complex constructor.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real number as a complex scalar.
#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense complex matrix.
///
/// Thin wrapper around `nalgebra::DMatrix<Complex64>` fixing the crate-wide
/// JSON encoding (`{"rows": r, "cols": c, "data": [[re, im], ...]}`,
/// row-major) and carrying the tolerance-parameterized predicates.
#[derive(Clone, PartialEq)]
pub struct CMat {
    data: DMatrix<Complex64>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMat({}x{}) {}", self.nrows(), self.ncols(), self.data)
    }
}

impl Deref for CMat {
    type Target = DMatrix<Complex64>;
    fn deref(&self) -> &Self::Target {
        &self.data
    }
}

impl DerefMut for CMat {
    fn deref_mut(&mut self) -> &mut Self::Target {
        &mut self.data
    }
}

impl From<DMatrix<Complex64>> for CMat {
    fn from(data: DMatrix<Complex64>) -> Self {
        CMat { data }
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMatrix::zeros(rows, cols).into()
    }

    pub fn identity(n: usize) -> Self {
        DMatrix::identity(n, n).into()
    }

    /// `z` times the identity.
    pub fn scalar(n: usize, z: Complex64) -> Self {
        (DMatrix::identity(n, n) * z).into()
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        DMatrix::from_fn(rows, cols, f).into()
    }

    /// Row-major construction from complex entries.
    pub fn from_rows_c(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Row-major construction from real entries.
    pub fn from_rows_f(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| cr(rows[i][j]))
    }

    pub fn diag_c(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { cr(0.0) })
    }

    pub fn diag_f(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { cr(entries[i]) } else { cr(0.0) })
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.data.nrows(), self.data.ncols())
    }

    pub fn is_square(&self) -> bool {
        self.data.nrows() == self.data.ncols()
    }

    pub fn adjoint_m(&self) -> CMat {
        self.data.adjoint().into()
    }

    pub fn conj_m(&self) -> CMat {
        self.data.conjugate().into()
    }

    pub fn transpose_m(&self) -> CMat {
        self.data.transpose().into()
    }

    pub fn scale_c(&self, z: Complex64) -> CMat {
        (&self.data * z).into()
    }

    pub fn scale_f(&self, s: f64) -> CMat {
        (&self.data * cr(s)).into()
    }

    pub fn trace_c(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn commutator(&self, other: &CMat) -> CMat {
        (&self.data * &other.data - &other.data * &self.data).into()
    }

    pub fn anticommutator(&self, other: &CMat) -> CMat {
        (&self.data * &other.data + &other.data * &self.data).into()
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        self.data.kronecker(&other.data).into()
    }

    /// Hermitian part `(M + M^*)/2`.
    pub fn hermitian_part(&self) -> CMat {
        ((&self.data + self.data.adjoint()) * cr(0.5)).into()
    }

    /// Residual of hermitian-ness, `|M - M^*|`.
    pub fn hermitian_residual(&self) -> f64 {
        (&self.data - self.data.adjoint()).norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_residual() <= tol * self.fro_norm().max(1.0)
    }

    /// Residual of unitarity, `|M^* M - 1|`.
    pub fn unitary_residual(&self) -> f64 {
        let n = self.data.ncols();
        (self.data.adjoint() * &self.data - DMatrix::<Complex64>::identity(n, n)).norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitary_residual() <= tol * (self.data.ncols() as f64).max(1.0)
    }

    /// Residual of the involution property, `|M^2 - 1|` in operator norm.
    pub fn involution_residual(&self) -> f64 {
        let n = self.data.ncols();
        CMat::from(&self.data * &self.data - DMatrix::<Complex64>::identity(n, n)).op_norm()
    }

    pub fn is_involution(&self, tol: f64) -> bool {
        self.is_square() && self.involution_residual() <= tol
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.all_finite() {
            Ok(())
        } else {
            Err(Error::NotFinite)
        }
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.data[idx]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.data[idx]
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&CMat> for &CMat {
            type Output = CMat;
            fn $method(self, rhs: &CMat) -> CMat {
                (&self.data $op &rhs.data).into()
            }
        }
        impl $trait<CMat> for CMat {
            type Output = CMat;
            fn $method(self, rhs: CMat) -> CMat {
                (self.data $op rhs.data).into()
            }
        }
        impl $trait<&CMat> for CMat {
            type Output = CMat;
            fn $method(self, rhs: &CMat) -> CMat {
                (self.data $op &rhs.data).into()
            }
        }
        impl $trait<CMat> for &CMat {
            type Output = CMat;
            fn $method(self, rhs: CMat) -> CMat {
                (&self.data $op rhs.data).into()
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        (-&self.data).into()
    }
}

impl Neg for CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        (-self.data).into()
    }
}

impl Serialize for CMat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CMat", 3)?;
        st.serialize_field("rows", &self.data.nrows())?;
        st.serialize_field("cols", &self.data.ncols())?;
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.data.nrows() {
            for j in 0..self.data.ncols() {
                data.push([self.data[(i, j)].re, self.data[(i, j)].im]);
            }
        }
        st.serialize_field("data", &data)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CMat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(field_identifier, rename_all = "lowercase")]
        enum Field {
            Rows,
            Cols,
            Data,
        }

        struct CMatVisitor;

        impl<'de> Visitor<'de> for CMatVisitor {
            type Value = CMat;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a matrix object {rows, cols, data}")
            }

            fn visit_map<V: de::MapAccess<'de>>(
                self,
                mut map: V,
            ) -> std::result::Result<CMat, V::Error> {
                let mut rows: Option<usize> = None;
                let mut cols: Option<usize> = None;
                let mut data: Option<Vec<[f64; 2]>> = None;
                while let Some(key) = map.next_key()? {
                    match key {
                        Field::Rows => rows = Some(map.next_value()?),
                        Field::Cols => cols = Some(map.next_value()?),
                        Field::Data => data = Some(map.next_value()?),
                    }
                }
                let rows = rows.ok_or_else(|| de::Error::missing_field("rows"))?;
                let cols = cols.ok_or_else(|| de::Error::missing_field("cols"))?;
                let data = data.ok_or_else(|| de::Error::missing_field("data"))?;
                if data.len() != rows * cols {
                    return Err(de::Error::custom(format!(
                        "matrix data length {} does not match {}x{}",
                        data.len(),
                        rows,
                        cols
                    )));
                }
                Ok(CMat::from_fn(rows, cols, |i, j| {
                    let [re, im] = data[i * cols + j];
                    c(re, im)
                }))
            }

            fn visit_seq<V: SeqAccess<'de>>(
                self,
                mut seq: V,
            ) -> std::result::Result<CMat, V::Error> {
                let rows: usize = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let cols: usize = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let data: Vec<[f64; 2]> = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if data.len() != rows * cols {
                    return Err(de::Error::custom("matrix data length mismatch"));
                }
                Ok(CMat::from_fn(rows, cols, |i, j| {
                    let [re, im] = data[i * cols + j];
                    c(re, im)
                }))
            }
        }

        deserializer.deserialize_struct("CMat", &["rows", "cols", "data"], CMatVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let m = CMat::from_rows_c(&[
            vec![c(1.0 / 3.0, -2.0e-17), c(0.1, 0.2)],
            vec![c(f64::MIN_POSITIVE, 1.0), c(-0.0, 3.5)],
        ]);
        let s = serde_json::to_string(&m).unwrap();
        let back: CMat = serde_json::from_str(&s).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m[(i, j)].re.to_bits(), back[(i, j)].re.to_bits());
                assert_eq!(m[(i, j)].im.to_bits(), back[(i, j)].im.to_bits());
            }
        }
    }

    #[test]
    fn predicates() {
        let f = CMat::from_rows_f(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(f.is_hermitian(1e-12));
        assert!(f.is_unitary(1e-12));
        assert!(f.is_involution(1e-12));
        let g = CMat::from_rows_f(&[vec![0.0, 2.0], vec![0.5, 0.0]]);
        assert!(g.is_involution(1e-12));
        assert!(!g.is_hermitian(1e-12));
        assert!(!g.is_unitary(1e-12));
    }
}
