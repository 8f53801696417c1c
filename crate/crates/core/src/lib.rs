//! Bregman divergence geometry on finite-dimensional model spaces.
//!
//! The crate provides, over real vectors and complex Hermitian matrices:
//!
//! - gauge and quasigauge functions, the induced potentials Ψ_φ and their
//!   duality maps ([`gauges`]);
//! - a catalog of Euler–Legendre potentials (KL, Burg, Fermi–Dirac, power
//!   sums, squared p-norms, quadratic forms, spectral lifts) behind one
//!   evaluation interface ([`potentials`]);
//! - the Bregman divergence D_Ψ, its one-sided variant, its algebraic
//!   identities, and extended divergences D_{ℓ,Ψ} through nonlinear
//!   embeddings ([`divergence`], [`embeddings`]);
//! - declarative convex sets with exact Euclidean projection oracles
//!   ([`convex_sets`]);
//! - left and right D_Ψ-projections with certificates, pythagorean
//!   verification, and Alber orthogonal decompositions ([`projections`]);
//! - proximal maps, resolvents, cyclic/Dykstra projection schemes, and
//!   empirical quasinonexpansivity certification ([`operators`]);
//! - empirical measurement of Hölder exponents, convexity/smoothness moduli,
//!   monotonicity strength, and total-convexity moduli ([`metrology`]);
//! - the machine-checkable verification suites behind the `bregproj verify`
//!   command ([`verify`]).

pub mod convex_sets;
pub mod divergence;
pub mod embeddings;
pub mod error;
pub mod gauges;
pub mod metrology;
pub mod operators;
pub mod potentials;
pub mod projections;
pub mod sampling;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use spaces::{NormSpec, PointData, SpaceDescriptor, SpaceKind, SpacePoint};
