//! Exact and floating-point machinery for studying unit-distance frameworks
//! in the plane: sparse rational polynomials, Groebner bases, Cayley-Menger
//! determinants, rigidity tests, Newton solving, and unit-pair censuses.

pub mod census;
pub mod exactpoly;
pub mod geometry;
mod graph;
pub mod groebner;
pub mod numeric;
pub mod rigidity;
pub mod rng;
pub mod varieties;
