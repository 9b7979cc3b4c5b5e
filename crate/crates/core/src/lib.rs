//! Game engines for Ehrenfeucht–Fraïssé equivalence over free-group models.
//!
//! The crate has three layers:
//!
//! * ground machinery: [`ordinal`] (Cantor normal forms below ω^ω),
//!   [`freegroup`] (reduced words and the Boolean variant), and
//!   [`structure`] (finite first-order structures with partial maps and
//!   brute-force automorphism search);
//! * the sorted-model layer: [`parameter`] (desk-scale λ-parameters, the
//!   canonical generator-key space and its linkage relation) and [`model`]
//!   (the symbolic model, translation families, finite fragment export);
//! * the game layer: [`efgame`] (exact solver, referee, transcript
//!   verifier) and [`strategy`] (the ISO strategy engine, adversaries,
//!   witness-system checks, and the rigidity obstruction replay).

pub mod efgame;
pub mod freegroup;
pub mod model;
pub mod ordinal;
pub mod parameter;
pub mod rng;
pub mod strategy;
pub mod structure;
