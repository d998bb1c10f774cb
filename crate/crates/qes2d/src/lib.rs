//! Exact and quasi-exact spectra of two singular-oscillator systems in the
//! plane, with their separation constants, polynomial eigenfunctions, and
//! interbasis expansions.

pub mod error;
pub mod interbasis;
pub mod linalg;
pub mod model;
pub mod niven;
pub mod oracle;
pub mod qes;
pub mod quad;
pub mod recurrence;
pub mod specfn;
pub mod wavefn;

pub use error::{Error, Result};
pub use model::{CoordSystem, ModelV1, ModelV2, Sign};
