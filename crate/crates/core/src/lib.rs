//! Lévy measures of inverse local times for finite gap diffusions.
//!
//! The pipeline, for a birth-death chain reflected at 0:
//!
//! 1. [`jfraction::jfraction_from_chain`] writes the Laplace transform of the
//!    excursion length as a J-continued fraction.
//! 2. [`spectral::spectrum`] turns the fraction into atoms `(x_k, λ_k)` via
//!    the eigen-decomposition of its Jacobi matrix.
//! 3. [`levy::LevyRepresentation`] assembles the completely monotone Lévy
//!    density `n(y) = r_0 Σ λ_k e^{-x_k y}` and the exponent `ψ(z)`.
//!
//! Two independent checks sit beside it: the resolvent oracle
//! [`chain::first_passage_transform`] and the Monte Carlo simulator in
//! [`montecarlo`]. [`refinement`] drives grids of increasing size towards a
//! continuous speed measure.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod cli;
pub mod error;
pub mod formats;
pub mod jfraction;
pub mod levy;
pub mod montecarlo;
pub mod refinement;
pub mod spectral;
pub mod tridiag;

pub use chain::{
    chain_from_masses, chain_from_speed_measure, first_passage_transform, validate_chain,
    ChainSpec, Density, Endpoint, SpeedMeasureSpec,
};
pub use error::{Error, Result};
pub use jfraction::{
    approximant_eval, jfraction_from_chain, polynomial_pair, JFraction, PolynomialPair,
};
pub use levy::{
    knight_functional, laplace_exponent, levy_density, monotonicity_profile, tail_convergence_gap,
    tail_mass, Convention, LevyRepresentation,
};
pub use montecarlo::{empirical_laplace, excursions, inverse_local_time, sample_path, PathRecord};
pub use refinement::{convergence_experiment, refine, RefinementPlan};
pub use spectral::{
    jacobi_from_atoms, jacobi_matrix, spectrum, step_function, stieltjes_eval, SpectralMeasure,
};
