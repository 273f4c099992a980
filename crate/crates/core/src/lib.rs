//! Localised frames, spectral matrix algebras and the Banach algebra of
//! rank-four tensors they induce, on finite truncations of `Z^d`.
//!
//! * [`lattice`]: index sets and weights.
//! * [`algebras`]: Jaffard, Schur-type and Sjöstrand norms, operator norms,
//!   solidity and weighted `l^p` diagnostics.
//! * [`tensor4`]: rank-four tensors, the doubly contracted product, adjoint,
//!   the nested norms and inversion diagnostics.
//! * [`frames`]: frames, Gram matrices, canonical duals, tensor product
//!   frames and Gram tensors.
//! * [`io`]: JSON and CSV interchange formats.
//! * [`random`]: seeded generators for reproducible experiments.

pub mod algebras;
pub mod error;
pub mod frames;
pub mod io;
pub mod lattice;
pub mod random;
pub mod tensor4;

pub use algebras::{AlgMatrix, AlgebraSpec, BlockMatrix, LpEndpoint, SchurExponent};
pub use error::{Error, Result};
pub use frames::{Frame, FrameBounds, HsFrame};
pub use lattice::{IndexSet, Weight};
pub use tensor4::{Tensor4, TensorAlgebraSpec};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
