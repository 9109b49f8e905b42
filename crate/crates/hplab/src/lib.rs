//! Extended Appell hypergeometric series, the linear PDE systems and Pfaff
//! connections they belong to, and the Painlevé-type Hamiltonians whose
//! specializations reproduce those connections. Every formula is paired with a
//! numeric or exact check.

pub mod battery;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod hgseries;
pub mod integrals;
pub mod jet;
pub mod lpde;
pub mod numdiff;
pub mod painleve;
pub mod par;
pub mod pfaff;
pub mod report;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
