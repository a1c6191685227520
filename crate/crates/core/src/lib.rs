//! Exact computations in the free associative ring `Z<X>`: T-ideals,
//! lower central series terms, and the integer lattice machinery that
//! decides membership and torsion in their multigraded components.

pub mod claims;
pub mod error;
pub mod exprparse;
pub mod freering;
pub mod ideals;
pub mod liebasis;
pub mod par;
pub mod t32basis;
pub mod zlinalg;

pub use error::{ClaimError, IdealError, LinalgError, ParseError, RingError};
pub use freering::{Monomial, MultiDegree, Poly};
