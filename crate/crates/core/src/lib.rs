//! Finite-atom Dirichlet form toolkit.
//!
//! The crate realizes, on finite atom spaces, the machinery that connects a
//! strong-local Dirichlet form to a measurable Riemannian structure:
//!
//! * [`forms`] — three backends (weighted graphs, gasket cells with the
//!   standard harmonic structure, and a bulk-plus-hyperplane superposition
//!   model) exposing energies and per-atom energy measures exactly;
//! * [`medm`] — minimal energy-dominant measures, Radon-Nikodym density
//!   fields with the `0/0 := 1` convention, and block-partition density
//!   approximations;
//! * [`riemann`] — per-atom density matrices, the pointwise index from
//!   singular-value ranks, Gaussian sampling of coordinate tuples, the
//!   gradient operator, the Schur-complement identity, remainder
//!   negligibility, and energy reconstruction;
//! * [`stoch`] — the reversible jump process attached to a graph form,
//!   Fukushima martingales, stochastic integrals, the vector representation
//!   of martingale additive functionals, and the energy isometry;
//! * [`io`] — JSON model/function files and CSV field output.

pub mod atoms;
pub mod error;
pub mod forms;
pub mod io;
pub mod medm;
pub mod riemann;
pub mod stoch;
pub mod tol;

pub use atoms::{AtomSpace, BackendKind, MeasureVec, SignedMeasureVec};
pub use error::{FormError, Result};
pub use forms::{FormModel, Function, GraphForm, SgForm, SgFunction, SuperFunction, SuperpositionForm};
pub use tol::Tolerances;
