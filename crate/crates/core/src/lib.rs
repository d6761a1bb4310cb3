//! Plane models of genus-3 modular curves.
//!
//! Starting from q-expansions of weight-2 newforms, the library builds a
//! normalized basis of three cusp forms, searches for the homogeneous relation
//! they satisfy, certifies it with a Sturm bound, and checks the resulting
//! plane quartic geometrically.

pub mod basis;
pub mod forms;
pub mod geometry;
pub mod number_field;
pub mod poly;
pub mod records;
pub mod relation;
pub mod ring;
pub mod series;

pub use poly::HomogeneousPolynomial;
pub use ring::{Rationals, Ring, Q};
pub use series::{QSeries, TruncatedSeries, VanishingOrder};
