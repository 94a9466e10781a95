//! Moebius transformations of Fredholm and polarized modules, realized at
//! finite dimension.
//!
//! The crate implements, over dense complex matrices:
//!
//! * the projective line over a matrix *-algebra and the block transforms
//!   `[[a, b], [b, a]]` acting on involutions ([`projective`]);
//! * the Moebius group of pairs satisfying the Connes identities, with the
//!   Cayley transform, both polar decompositions, the hyperbolic
//!   parametrization of positive elements and the retraction onto the
//!   unitary subgroup ([`moebius`]);
//! * matrix *-algebras with commutant, center and grading machinery
//!   ([`star_algebra`]);
//! * Fredholm modules and the Moebius action on them ([`fredholm`]);
//! * Krein-space polarized modules, compatible involutions, lifting to
//!   Fredholm modules and the groupoid of generalized Moebius
//!   transformations between lifts ([`polarized`]);
//! * a spectral model of the canonical polarized module on the 2-sphere
//!   with metric-dependent Hodge involutions and conformal lifts
//!   ([`sphere`]).
//!
//! Every identity is executable: validation operations return
//! [`report::CheckReport`]s of named residuals against explicit tolerances.

pub mod error;
pub mod fixtures;
pub mod fredholm;
pub mod moebius;
pub mod numerics;
pub mod polarized;
pub mod projective;
pub mod report;
pub mod sphere;
pub mod star_algebra;

pub use error::{Error, Result};
pub use numerics::{c, cr, CMat, DEFAULT_TOL, SPHERE_TOL};
pub use report::{Check, CheckReport};
