//! Closed-form concurrence and I-fidelity for maps between cones generated
//! by quadratic forms.
//!
//! The convex and concave roofs of `2√det Υ(x)` over the Lorentz cone, of
//! `2√σ2(Φ(X))` over rank ≤ 2 positive semidefinite matrices, and of the
//! bipartite analogue `√Q1(M)` are all read off the generalized eigenvalues of
//! a real symmetric pencil `P - λJ`:
//!
//! - concurrence `2√(P(x) - λ2 J(x))`,
//! - I-fidelity `2√(P(x) - λmin J(x))`,
//!
//! together with optimal two-point decompositions along the eigenspaces.
//!
//! Modules:
//!
//! - [`lorentz`]: spin-factor structure of `R^m` and the `R^4 ≅ H(2)` isomorphism.
//! - [`herm`]: hermitian matrices, σ2, partial traces, `U_P` bases.
//! - [`pencil`]: generalized eigenvalues of symmetric pencils.
//! - [`maps`]: Lorentz maps, positive maps, Kraus maps, positivity testing.
//! - [`roof`]: the roof formulas and decompositions.
//! - [`graphs`]: graph density matrices and their report table.
//! - [`oracle`]: brute-force decomposition search used as a falsifier.

#![forbid(unsafe_code)]

pub mod error;
pub mod graphs;
pub mod herm;
pub mod lorentz;
pub mod maps;
pub mod oracle;
pub mod pencil;
pub mod roof;

pub use error::{Error, Result};
pub use graphs::{GraphReport, GridGraph};
pub use herm::{BipartiteShape, HermitianMatrix, SubspaceBasis};
pub use lorentz::{ConeMembership, JordanSpectrum, LorentzVector};
pub use maps::{KrausMap, LorentzMap, PositiveMapH, PositivityVerdict};
pub use oracle::OracleEstimate;
pub use pencil::{PencilSpectrum, SymmetricPencil};
pub use roof::{ConicDecomposition, DecompositionKind, Q1Variant, RoofKind, RoofResult};

/// Relative tolerance used when a call does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

pub use nalgebra;
pub use num_complex;
