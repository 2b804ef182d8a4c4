//! Dense complex linear algebra over a generic real scalar.
//!
//! Everything in this crate is written against [`Real`], which is implemented
//! for `f32` and `f64`. Matrices are row-major [`Matrix<T>`] values with
//! entries in `Complex<T>`. The kernels here are small and deterministic:
//! cyclic Jacobi for Hermitian eigenproblems, one-sided Jacobi for the SVD and
//! a shifted Hessenberg QR for the occasional non-Hermitian pencil reduction.

mod eigh;
mod matrix;
mod pencil;
mod schur;
mod svd;

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use thiserror::Error;

pub use eigh::{eig_hermitian, HermitianEigen};
pub use matrix::{
    flatten, inner, kron, kron_vec, norm, normalize, outer, phase_normalize, ray_distance,
    reshape_vec, Matrix,
};
pub use pencil::{pencil_eig, PencilEigen};
pub use schur::eig_general;
pub use svd::{orthonormal_basis, pinv, rank_svd, svd, Svd};

/// Complex scalar over the real type `T`.
pub type Cx<T> = Complex<T>;

/// Real scalar the whole crate is generic over.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Default singular-value cutoff relative to the largest singular value.
    const EPS_RANK: f64;
    /// Default Hermiticity / positivity slack.
    const EPS_HERM: f64;
    /// Default reconstruction slack for matched decompositions.
    const EPS_MATCH: f64;

    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Real for f64 {
    const EPS_RANK: f64 = 1e-9;
    const EPS_HERM: f64 = 1e-9;
    const EPS_MATCH: f64 = 1e-7;
}

impl Real for f32 {
    const EPS_RANK: f64 = 1e-4;
    const EPS_HERM: f64 = 1e-4;
    const EPS_MATCH: f64 = 1e-3;
}

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// Numerical thresholds shared by every rank, Hermiticity and matching decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    /// Singular-value cutoff, relative to the largest singular value.
    pub eps_rank: T,
    /// Hermiticity deviation and eigenvalue positivity slack.
    pub eps_herm: T,
    /// Reconstruction slack (Frobenius) for recovered decompositions.
    pub eps_match: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(eps_rank: T, eps_herm: T, eps_match: T) -> Result<Self, LinalgError> {
        for (name, v) in [("eps_rank", eps_rank), ("eps_herm", eps_herm), ("eps_match", eps_match)] {
            if !(v > T::zero() && v < T::one()) {
                return Err(LinalgError::InvalidTolerance { field: name, value: v.as_f64() });
            }
        }
        Ok(Self { eps_rank, eps_herm, eps_match })
    }

    /// Returns a copy with `eps_rank` replaced.
    pub fn with_eps_rank(self, eps_rank: T) -> Result<Self, LinalgError> {
        Self::new(eps_rank, self.eps_herm, self.eps_match)
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            eps_rank: T::lit(T::EPS_RANK),
            eps_herm: T::lit(T::EPS_HERM),
            eps_match: T::lit(T::EPS_MATCH),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("degenerate pencil: {reason}")]
    DegeneratePencil { reason: String },
    #[error("iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("tolerance {field} = {value} must lie strictly between 0 and 1")]
    InvalidTolerance { field: &'static str, value: f64 },
}
