//! Ad-invariant Finsler norms on the skew-Hermitian matrices `u(n)`.
//!
//! A weakly unitarily invariant (Ad-invariant) Finsler norm is determined by a
//! permutation-symmetric convex body in `R^n` through the eigenvalues of `-iX`.
//! This crate provides:
//!
//! - [`matrix`]: skew-Hermitian linear algebra (trace pairing, commutators,
//!   spectral clustering, block diagonal/codiagonal splits, Haar unitaries);
//! - [`gauge`]: permutation-symmetric gauges with evaluation, support function
//!   and subgradients (p-gauges, Ky-Fan, spectral, trace, orbit, polytope,
//!   twisted ellipse, toast, membership oracles);
//! - [`norms`]: the lift of a gauge to a matrix norm, dual norms, norming
//!   functionals and their certificates, and the Taylor complexification norm;
//! - [`majorization`]: strong majorization, doubly stochastic witnesses,
//!   Birkhoff decompositions and unitary-orbit hull membership;
//! - [`geometry`]: orbit polytopes, polar duals, self-duality detection and
//!   norming-set enumeration for polytope gauges;
//! - [`io`]: JSON wire formats for matrices, vectors and polytopes;
//! - [`verify`]: a seeded property harness for the sphere-geometry theorems
//!   (commutator annihilation, second-order dissipativity, the `[X_C,N]=0`
//!   equality criterion, lateral derivatives, Birkhoff orthogonality,
//!   adjoint-action expansivity and the strict-inequality corollaries).

pub mod gauge;
pub mod geometry;
pub mod io;
pub mod matrix;
pub mod majorization;
pub mod norms;
pub mod verify;

pub use gauge::{Gauge, GaugeError, GaugeSpec, OrbitGaugeSpec};
pub use geometry::Polytope;
pub use majorization::{HullDecomposition, MajorizationReport};
pub use matrix::{BlockSplit, MatrixError, SkewHermitian, SpectralData};
pub use norms::{MatrixNorm, NormingMatrix};
