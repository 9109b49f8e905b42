//! Logarithmic Pfaff connections, their Riemann schemes, and solution vectors
//! built from the series.

mod connection;
mod scheme;
mod solution;
mod transport;

pub use connection::*;
pub use scheme::*;
pub use solution::*;
pub use transport::*;
