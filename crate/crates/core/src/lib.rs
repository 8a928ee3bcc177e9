//! Exact-arithmetic normal forms, invariants, and equivalence decisions for
//! rigid real-analytic hypersurfaces in C^2 and C^3.
//!
//! Everything is computed on truncated polynomials over the Gaussian
//! rationals; no floating point, no field extensions. The main pipeline
//! normalizes a constant-Levi-rank-1, 2-nondegenerate rigid graph
//! `u = F(z, zeta, zbar, zetabar)` against the light-cone model, extracts
//! the relative invariants `I0, V0, Q0` along two independent routes
//! (normal-form jets and CR differential operators), and decides rigid
//! biholomorphic equivalence at the jet level without root extraction.

pub mod cr_fields;
pub mod equivalence;
pub mod error;
pub mod hypersurface;
pub mod lattice;
pub mod normalform_c3;
pub mod rigid_maps;
pub mod scalar;
pub mod series;
pub mod toy_c2;

pub use error::CoreError;
pub use scalar::GaussRat;
pub use series::{Exponent4, HoloSeries2, TruncSeries, Var};
