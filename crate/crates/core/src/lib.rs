//! Contour toolkit for ferromagnetic long-range Ising models on `Z^d` with
//! power-law couplings `J|x-y|^-alpha` and polynomially decaying external
//! fields `h*|x|^-delta`.
//!
//! The crate is organized around the pipeline that takes a finite spin
//! configuration to a Peierls-type estimate:
//!
//! * [`lattice`] — exact integer-lattice geometry: `l1` balls and spheres,
//!   boundaries, connectivity, flood-fill volumes, dyadic cubes and minimum
//!   cube covers.
//! * [`model`] — couplings, fields, Hamiltonians with constant exterior
//!   boundary conditions, certified lattice sums, surface energy and exact
//!   small-volume partition functions.
//! * [`contour`] — multiscale partitions of the incorrect-point set, contour
//!   labels and interiors, the erase map and compatibility checks.
//! * [`multiscale`] — the total-volume functional, subordinated-cover
//!   counting, bounded tree covers and exhaustive enumeration of small
//!   contour families.
//! * [`peierls`] — the explicit constant chain (`k_alpha_1`, `M` threshold,
//!   `c2..c5`, truncation radius, `beta_c`) and exact conditioned
//!   probabilities on tiny volumes.
//! * [`montecarlo`] — a seeded Metropolis sampler with exact exterior
//!   interaction and deterministic parameter scans.
//!
//! All set-valued outputs are deterministically ordered, so runs are
//! bit-reproducible.

pub mod constants;
pub mod contour;
pub mod error;
pub mod lattice;
pub mod model;
pub mod montecarlo;
pub mod multiscale;
pub mod peierls;

pub use error::{CtkError, Result};
