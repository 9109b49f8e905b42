//! The Hamiltonian systems whose specializations carry the Pfaff connections,
//! their constraint manifolds, and the birational symmetry.

mod hamiltonian;
mod reduction;
mod symmetry;

pub use hamiltonian::*;
pub use reduction::*;
pub use symmetry::*;
