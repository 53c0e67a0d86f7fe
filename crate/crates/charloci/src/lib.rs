//! Exact engine for cohomology jump loci on character tori: Gröbner-based
//! commutative algebra over Q, free complexes, the group-ring transform of
//! local systems, jump loci and their subtorus decompositions, perverse
//! coherent t-structures, and intersection complexes.

pub mod complex;
pub mod error;
pub mod groebner;
pub mod ideal;
pub mod intersection;
pub mod io;
pub mod loci;
pub mod matrix;
pub mod modules;
pub mod perversity;
pub mod poly;
pub mod suites;
pub mod torus;
pub mod transform;

pub use error::{Error, Result};
