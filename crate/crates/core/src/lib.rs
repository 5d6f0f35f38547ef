//! Multifold degeneracy points of parameter-dependent matrix families.
//!
//! The exact side (`field`, `poly`, `matfam`, `minors`, `localdim`,
//! `formulas`) counts complex Weyl points as the dimension of a local
//! quotient algebra. The numeric side (`spectral`, `swchart`, `chern`)
//! locates real Weyl points, extracts effective families and computes
//! Chern numbers, which give the lower bound.

pub mod chern;
pub mod error;
pub mod field;
pub mod formulas;
pub mod linalg;
pub mod localdim;
pub mod matfam;
pub mod minors;
pub mod numeric;
pub mod poly;
pub mod spectral;
pub mod swchart;

pub use error::{Error, Result};
pub use field::{Coeff, GaussianRational};
pub use matfam::{Matrix, MatrixFamily, SymmetryClass};
pub use poly::{Poly, Var};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
