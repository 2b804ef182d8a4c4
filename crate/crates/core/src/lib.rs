//! Separable bipartite states built from pure product ensembles.
//!
//! The crate constructs states `Σ λ_i ω_{e_i⊗f_i}` on `C^m ⊗ C^n`, certifies
//! when such a decomposition is the only one, recovers it from the density
//! matrix, describes the face of the separable set it generates, and
//! normalizes words in the automorphisms of that set.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix `f64`, which is what the default
//! tolerances are tuned for.

pub mod automorphisms;
pub mod decomposition;
pub mod faces;
pub mod numerics;
pub mod sampling;
pub mod septests;
pub mod states;

pub use numerics::{Cx, LinalgError, Matrix, Real, Tolerance};
pub use states::{Dims, Side};

pub type ComplexMatrix = Matrix<f64>;
pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Tolerance64 = Tolerance<f64>;
pub type Tolerance32 = Tolerance<f32>;
pub type ProductVector64 = states::ProductVector<f64>;
pub type Ensemble64 = states::Ensemble<f64>;
pub type Ensemble32 = states::Ensemble<f32>;
pub type DensityMatrix64 = states::DensityMatrix<f64>;
pub type DensityMatrix32 = states::DensityMatrix<f32>;
pub type VkCertificate64 = decomposition::VkCertificate<f64>;
pub type CoarseDecomposition64 = decomposition::CoarseDecomposition<f64>;
pub type BlockSimplexFace64 = faces::BlockSimplexFace<f64>;
pub type AutomorphismWord64 = automorphisms::AutomorphismWord<f64>;
pub type CanonicalAutomorphism64 = automorphisms::CanonicalAutomorphism<f64>;
pub type PptReport64 = septests::PptReport<f64>;
