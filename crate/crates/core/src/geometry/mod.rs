//! Plane-curve geometry: nonsingularity, the cusp at infinity, point counts.

pub mod flex;
pub mod points;
pub mod smooth;
pub mod upoly;

pub use flex::{classify_p_infinity, FlexClassification, FlexKind};
pub use points::{count_points, good_primes, PointCount};
pub use smooth::{check_smoothness, smooth_mod_p, SmoothnessCertificate, SmoothnessVerdict, SmoothnessWitness};
