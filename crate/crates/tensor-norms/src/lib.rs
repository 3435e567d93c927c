//! Norms of dense higher-order tensors over ℝ and ℂ.
//!
//! This crate computes and certifies the three classical tensor norms —
//! Hilbert–Schmidt, spectral (injective) and nuclear (projective) — for small
//! dense tensors, together with the machinery that connects them:
//!
//! * [`tensor`] — dense tensor values, rank-one terms and decompositions,
//!   flattenings, and structural predicates;
//! * [`spectral`] — multi-start rank-one maximization (higher-order power
//!   iteration) with symmetric and bi-PSD specializations, plus a brute-force
//!   grid oracle for 2×2×2 instances;
//! * [`nuclear`] — decomposition-based upper bounds, dual-witness lower
//!   bounds, nuclear-decomposition certificates, and the ν_p collapse;
//! * [`pqnorm`] — operator and nuclear (p,q)-norms of real matrices,
//!   including the sign-vector enumerations and the sign-matrix LP;
//! * [`clique`] — the clique-number reduction: graph → 4-tensor whose
//!   spectral norm encodes the clique number via Motzkin–Straus;
//! * [`bounds`] — polynomial-time sandwich bounds from flattenings and the
//!   Hilbert–Schmidt norm;
//! * [`io`] — JSON formats for tensors, decompositions, matrices, graphs and
//!   certificates, plus a DIMACS-like graph reader.
//!
//! Everything is deterministic for a fixed seed: multi-start heuristics use a
//! seeded ChaCha stream and reduce over starts with fixed tie-breaking.

pub mod bounds;
pub mod clique;
pub mod demo;
pub mod io;
pub mod linalg;
pub mod nuclear;
pub mod pqnorm;
pub mod spectral;
pub mod tensor;

pub use tensor::{DenseTensor, Decomposition, Field, RankOneTerm, Scalar, TensorError};
