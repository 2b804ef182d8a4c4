//! Words in the generators of the affine automorphisms of the separable set
//! (local unitaries, the two partial transposes, and the factor swap when
//! `m = n`), their action on states, and a normal form.
//!
//! A word `[g_1, …, g_L]` denotes the composition `g_1 ∘ … ∘ g_L`: the last
//! generator acts first.

use thiserror::Error;

use crate::numerics::{eig_hermitian, flatten, kron, phase_normalize, Cx, Matrix, Real, Tolerance};
use crate::states::{
    partial_transpose_matrix, unit_slack, validate_state, Component, DensityMatrix, Dims, Ensemble, ProductVector,
    Side, StateError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutomorphismError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("generator {index}: {which} is not unitary (deviation {deviation:e})")]
    NotUnitary { index: usize, which: &'static str, deviation: f64 },
    #[error("generator {index}: swap needs m = n, got {dims}")]
    SwapNeedsSquare { index: usize, dims: Dims },
    #[error("witness needs both factors of dimension >= 2, got {0}")]
    DimsTooSmall(Dims),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator<T> {
    /// `ρ ↦ (U ⊗ V) ρ (U ⊗ V)*`.
    LocalUnitary { u: Matrix<T>, v: Matrix<T> },
    PartialTranspose(Side),
    /// `A ⊗ B ↦ B ⊗ A`; only for `m = n`.
    Swap,
}

impl<T: Real> Generator<T> {
    pub fn inverse(&self) -> Self {
        match self {
            Generator::LocalUnitary { u, v } => Generator::LocalUnitary { u: u.adjoint(), v: v.adjoint() },
            g => g.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismWord<T> {
    dims: Dims,
    gens: Vec<Generator<T>>,
}

impl<T: Real> AutomorphismWord<T> {
    /// Checks shapes, unitarity (within `1e-10`) and that swaps only occur for `m = n`.
    pub fn new(dims: Dims, gens: Vec<Generator<T>>) -> Result<Self, AutomorphismError> {
        let slack = unit_slack::<T>(1e-10).max(T::epsilon() * T::lit(1000.0));
        for (index, g) in gens.iter().enumerate() {
            match g {
                Generator::LocalUnitary { u, v } => {
                    for (which, mat, d) in [("U", u, dims.m), ("V", v, dims.n)] {
                        if mat.rows() != d || mat.cols() != d {
                            return Err(AutomorphismError::Dimension(format!(
                                "generator {index}: {which} is {}x{}, expected {d}x{d}",
                                mat.rows(),
                                mat.cols()
                            )));
                        }
                        let dev = (&mat.adjoint().matmul(mat) - &Matrix::identity(d)).frobenius_norm();
                        if dev > slack {
                            return Err(AutomorphismError::NotUnitary { index, which, deviation: dev.as_f64() });
                        }
                    }
                }
                Generator::Swap if dims.m != dims.n => return Err(AutomorphismError::SwapNeedsSquare { index, dims }),
                _ => {}
            }
        }
        Ok(Self { dims, gens })
    }

    pub fn identity(dims: Dims) -> Self {
        Self { dims, gens: Vec::new() }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn generators(&self) -> &[Generator<T>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// The word followed by `other` (so `other` acts first).
    pub fn then_after(&self, other: &Self) -> Self {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Self { dims: self.dims, gens }
    }

    pub fn inverse(&self) -> Self {
        Self { dims: self.dims, gens: self.gens.iter().rev().map(Generator::inverse).collect() }
    }
}

/// Which partial transposes a normal form contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PtPattern {
    None,
    A,
    B,
    Both,
}

impl PtPattern {
    fn toggle(self, side: Side) -> Self {
        let (mut a, mut b) = self.flags();
        match side {
            Side::A => a = !a,
            Side::B => b = !b,
        }
        Self::from_flags(a, b)
    }

    pub fn flags(self) -> (bool, bool) {
        match self {
            PtPattern::None => (false, false),
            PtPattern::A => (true, false),
            PtPattern::B => (false, true),
            PtPattern::Both => (true, true),
        }
    }

    pub fn from_flags(a: bool, b: bool) -> Self {
        match (a, b) {
            (false, false) => PtPattern::None,
            (true, false) => PtPattern::A,
            (false, true) => PtPattern::B,
            (true, true) => PtPattern::Both,
        }
    }
}

/// Normal form `Swap^s ∘ PT-pattern ∘ LocalUnitary(U, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalAutomorphism<T> {
    pub dims: Dims,
    pub swap: bool,
    pub pt: PtPattern,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Real> CanonicalAutomorphism<T> {
    pub fn identity(dims: Dims) -> Self {
        Self { dims, swap: false, pt: PtPattern::None, u: Matrix::identity(dims.m), v: Matrix::identity(dims.n) }
    }

    /// Copy with `U` and `V` scaled so their largest-magnitude entries are real positive.
    pub fn phase_normalized(&self) -> Self {
        let fix = |m: &Matrix<T>| Matrix::new(m.rows(), m.cols(), phase_normalize(&flatten(m))).expect("same shape");
        Self { u: fix(&self.u), v: fix(&self.v), ..self.clone() }
    }

    /// Flags agree and the unitaries agree up to a phase on each factor, within `eps` (Frobenius).
    pub fn equivalent(&self, other: &Self, eps: T) -> bool {
        if self.dims != other.dims || self.swap != other.swap || self.pt != other.pt {
            return false;
        }
        let a = self.phase_normalized();
        let b = other.phase_normalized();
        (&a.u - &b.u).frobenius_norm() <= eps && (&a.v - &b.v).frobenius_norm() <= eps
    }

    pub fn is_identity(&self, eps: T) -> bool {
        self.equivalent(&Self::identity(self.dims), eps)
    }

    /// `[Swap?, PT_A?, PT_B?, LocalUnitary(U, V)]`.
    pub fn to_word(&self) -> AutomorphismWord<T> {
        let mut gens = Vec::new();
        if self.swap {
            gens.push(Generator::Swap);
        }
        let (a, b) = self.pt.flags();
        if a {
            gens.push(Generator::PartialTranspose(Side::A));
        }
        if b {
            gens.push(Generator::PartialTranspose(Side::B));
        }
        gens.push(Generator::LocalUnitary { u: self.u.clone(), v: self.v.clone() });
        AutomorphismWord { dims: self.dims, gens }
    }
}

/// `(U ⊗ V) X (U ⊗ V)*`.
fn conjugate_local<T: Real>(x: &Matrix<T>, u: &Matrix<T>, v: &Matrix<T>) -> Matrix<T> {
    kron(u, v).conjugate_by(x)
}

/// Conjugation by the factor exchange `x ⊗ y ↦ y ⊗ x` (square dims only).
pub fn swap_operator<T: Real>(x: &Matrix<T>, dims: Dims) -> Matrix<T> {
    let n = dims.n;
    let m = dims.m;
    debug_assert_eq!(m, n);
    Matrix::from_fn(x.rows(), x.cols(), |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        x[(k * m + i, l * m + j)]
    })
}

fn apply_generator<T: Real>(g: &Generator<T>, x: &Matrix<T>, dims: Dims) -> Matrix<T> {
    match g {
        Generator::LocalUnitary { u, v } => conjugate_local(x, u, v),
        Generator::PartialTranspose(side) => partial_transpose_matrix(x, dims, *side),
        Generator::Swap => swap_operator(x, dims),
    }
}

/// Linear action of the word on an arbitrary `mn × mn` operator.
pub fn apply_operator<T: Real>(word: &AutomorphismWord<T>, x: &Matrix<T>) -> Result<Matrix<T>, AutomorphismError> {
    let d = word.dims.total();
    if x.rows() != d || x.cols() != d {
        return Err(AutomorphismError::Dimension(format!("{}x{} operator for {}", x.rows(), x.cols(), word.dims)));
    }
    Ok(word.gens.iter().rev().fold(x.clone(), |acc, g| apply_generator(g, &acc, word.dims)))
}

/// Image of a state; fails with a state error if the image is not positive.
pub fn apply<T: Real>(word: &AutomorphismWord<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>, AutomorphismError> {
    if rho.dims() != word.dims {
        return Err(AutomorphismError::Dimension(format!("word is {} but state is {}", word.dims, rho.dims())));
    }
    let out = apply_operator(word, rho.matrix())?;
    Ok(validate_state(&out.hermitian_part(), word.dims, &Tolerance::default())?)
}

/// Image of each pure product term; the result generates `apply(word, density_of(ens))`.
pub fn apply_to_ensemble<T: Real>(word: &AutomorphismWord<T>, ens: &Ensemble<T>) -> Result<Ensemble<T>, AutomorphismError> {
    if ens.dims() != word.dims {
        return Err(AutomorphismError::Dimension(format!("word is {} but ensemble is {}", word.dims, ens.dims())));
    }
    let comps = ens
        .components()
        .iter()
        .map(|c| {
            let (e, f) = word.gens.iter().rev().fold((c.pv.e().to_vec(), c.pv.f().to_vec()), |(e, f), g| match g {
                Generator::LocalUnitary { u, v } => (u.mul_vec(&e), v.mul_vec(&f)),
                Generator::PartialTranspose(Side::A) => (conj(&e), f),
                Generator::PartialTranspose(Side::B) => (e, conj(&f)),
                Generator::Swap => (f, e),
            });
            Ok(Component { weight: c.weight, pv: ProductVector::new(e, f)? })
        })
        .collect::<Result<Vec<_>, StateError>>()?;
    Ok(Ensemble::new(ens.dims(), comps)?)
}

fn conj<T: Real>(v: &[Cx<T>]) -> Vec<Cx<T>> {
    v.iter().map(|z| z.conj()).collect()
}

/// Rewrites a word into `Swap^s ∘ PT-pattern ∘ LocalUnitary(U, V)`.
///
/// Generators are absorbed from the right using `Swap ∘ LU(U,V) = LU(V,U) ∘ Swap`,
/// `PT_A ∘ LU(U,V) = LU(Ū,V) ∘ PT_A` (and the B analogue), `Swap ∘ PT_A = PT_B ∘ Swap`,
/// and the involution and commutation laws of the transposes and the swap.
pub fn canonicalize<T: Real>(word: &AutomorphismWord<T>) -> CanonicalAutomorphism<T> {
    let mut form = CanonicalAutomorphism::identity(word.dims);
    for g in word.gens.iter().rev() {
        match g {
            Generator::LocalUnitary { u: y1, v: y2 } => {
                let (mut z1, mut z2) = if form.swap { (y2.clone(), y1.clone()) } else { (y1.clone(), y2.clone()) };
                let (a, b) = form.pt.flags();
                if a {
                    z1 = z1.conj();
                }
                if b {
                    z2 = z2.conj();
                }
                form.u = z1.matmul(&form.u);
                form.v = z2.matmul(&form.v);
            }
            Generator::PartialTranspose(side) => {
                let side = if form.swap { side.other() } else { *side };
                form.pt = form.pt.toggle(side);
            }
            Generator::Swap => form.swap = !form.swap,
        }
    }
    form
}

/// True iff the automorphism is positive on all states: no transpose or both.
pub fn extends_to_full_state_space<T: Real>(canon: &CanonicalAutomorphism<T>) -> bool {
    matches!(canon.pt, PtPattern::None | PtPattern::Both)
}

/// Maximally entangled state on the first `min(m, n)` levels of each factor,
/// whose partial transpose (either side) has eigenvalue `−1/min(m, n)`.
pub fn witness_nonpositivity<T: Real>(side: Side, dims: Dims) -> Result<(DensityMatrix<T>, T), AutomorphismError> {
    if dims.m < 2 || dims.n < 2 {
        return Err(AutomorphismError::DimsTooSmall(dims));
    }
    let d = dims.m.min(dims.n);
    let amp = T::one() / T::lit(d as f64).sqrt();
    let mut psi = vec![Cx::new(T::zero(), T::zero()); dims.total()];
    for i in 0..d {
        psi[i * dims.n + i] = Cx::new(amp, T::zero());
    }
    let rho = DensityMatrix::pure(dims, &psi)?;
    let pt = partial_transpose_matrix(rho.matrix(), dims, side);
    let min = eig_hermitian(&pt, &Tolerance::default()).expect("partial transpose is Hermitian").min_value();
    Ok((rho, min))
}

/// For a word that does not extend, a state whose image has a negative
/// eigenvalue, with that eigenvalue; `None` for extendable words.
pub fn word_witness<T: Real>(word: &AutomorphismWord<T>) -> Result<Option<(DensityMatrix<T>, T)>, AutomorphismError> {
    let canon = canonicalize(word);
    let side = match canon.pt {
        PtPattern::A => Side::A,
        PtPattern::B => Side::B,
        _ => return Ok(None),
    };
    let (w, _) = witness_nonpositivity::<T>(side, word.dims)?;
    // pull the witness back through the local unitary so the transpose sees it unchanged
    let pulled = conjugate_local(w.matrix(), &canon.u.adjoint(), &canon.v.adjoint());
    let state = validate_state(&pulled.hermitian_part(), word.dims, &Tolerance::default())?;
    let image = apply_operator(word, state.matrix())?;
    let min = eig_hermitian(&image.hermitian_part(), &Tolerance::default())
        .expect("image is Hermitian")
        .min_value();
    Ok(Some((state, min)))
}
