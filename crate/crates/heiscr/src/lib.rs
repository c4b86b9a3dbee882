//! Conformal analysis on the Heisenberg group: group arithmetic and
//! Korányi geometry, CR maps and generalized inversions, closed-form
//! decaying field families and their reflection structure,
//! finite-difference sub-Riemannian calculus, a moving-spheres sweep,
//! and a seeded verification suite tying it all together.

// Guards of the form !(x > 0.0) are deliberate: unlike x <= 0.0 they
// also reject NaN, which is the point of the validations they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod crmaps;
pub mod error;
pub mod fields;
pub mod hgroup;
pub mod movesphere;
pub mod rng;
pub mod subcalc;
pub mod verify;
