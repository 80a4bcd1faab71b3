//! Numerical verification of the functional inequalities.

mod checks;
mod convergence;
mod report;
mod rn;
mod semigroup;
mod testfns;

pub use checks::*;
pub use convergence::*;
pub use report::*;
pub use rn::*;
pub use semigroup::*;
pub use testfns::*;
