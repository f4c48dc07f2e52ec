//! Finite-scale frame decompositions.
//!
//! Given an ordered family of unit vectors `{f_i}` with a finite upper frame
//! (Bessel) bound, the constructions in [`decomp`] split the index set into two
//! parts `I₁ ∪ I₂` such that each part is within an `ε` budget (in summed
//! squared distance) of a family whose blocks span mutually orthogonal
//! subspaces. Every construction produces a ledger of the tail-energy
//! inequalities it relied on, and [`decomp::verify_ledger`] re-derives all of
//! them from scratch.
//!
//! Module map:
//!
//! * [`linops`]: vector families, Gram matrices, rank-revealing range bases and
//!   orthogonal projectors, Hermitian spectra.
//! * [`frames`]: frame, Bessel and Riesz bounds, independence margins,
//!   perturbation distances and block-orthogonality checks.
//! * [`decomp`]: the ordered, greedy and Riesz-scaled block constructions, the
//!   ledger verifier, the null-combination residual inequality and the
//!   consecutive-overlap impossibility certificate.
//! * [`zoo`]: generators for the shift-pair family, its dyadic reordering,
//!   unions of random orthonormal bases and random Bessel families.
//! * [`io`]: JSON family and report files.
//! * [`cli`]: the `frame-decomp` command line front end.
//!
//! ```
//! use frame_decomp::{decomp, zoo, DecompConfig};
//!
//! let family = zoo::gen_shift_pair(16).unwrap();
//! let result = decomp::greedy_decompose(&family, 0.01, &DecompConfig::default()).unwrap();
//! assert!(result.energies[0] < 0.01 && result.energies[1] < 0.01);
//! assert!(decomp::verify_ledger(&family, &result, &Default::default()).ok);
//! ```

pub mod cli;
pub mod decomp;
mod error;
pub mod frames;
pub mod io;
pub mod linops;
pub mod zoo;

pub use decomp::{DecompConfig, DecompositionResult, Strategy};
pub use error::{Error, Result};
pub use frames::{CoefficientVector, SpectralReport};
pub use linops::{Label, Projector, Scalar, ScalarKind, Tolerances, VectorFamily};
