//! Exact-arithmetic toolkit for the blowup of the projective plane at ten
//! general points: Picard-lattice arithmetic, decision procedures for linear
//! systems, graded Hom dimensions, projection spectral-sequence bookkeeping,
//! deformation-hull quadrics, and a finite-field interpolation oracle.

pub mod picard;
pub mod deformation;
pub mod hom;
pub mod interp;
pub mod parse;
pub mod projection;
pub mod systems;
