//! Pure product vectors, weighted ensembles and checked density matrices on `C^m ⊗ C^n`.
//!
//! The tensor index convention is row-major: basis vector `|i⟩ ⊗ |k⟩` sits at
//! position `i·n + k`, so the first factor is the slow index.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numerics::{
    czero, eig_hermitian, kron_vec, norm, normalize, outer, ray_distance, reshape_vec, svd, Cx,
    LinalgError, Matrix, Real, Tolerance,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("invalid dimensions: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace differs from 1 by {deviation:e}")]
    TraceNotOne { deviation: f64 },
    #[error("matrix is not positive semidefinite (most negative eigenvalue -{deviation:e})")]
    NotPositive { deviation: f64 },
    #[error("invalid vector: {0}")]
    InvalidVector(String),
    #[error("component {index}: weight {value} must be positive")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("ensemble has no components")]
    Empty,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Local dimensions `(m, n)` of `C^m ⊗ C^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize) -> Result<Self, StateError> {
        if m == 0 || n == 0 {
            return Err(StateError::Dimension(format!("{m}x{n}: both factors must be >= 1")));
        }
        Ok(Self { m, n })
    }

    /// Dimension of the joint space, `m·n`.
    pub fn total(&self) -> usize {
        self.m * self.n
    }

    pub fn max(&self) -> usize {
        self.m.max(self.n)
    }

    pub fn swapped(&self) -> Self {
        Self { m: self.n, n: self.m }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

impl FromStr for Dims {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| StateError::Dimension(format!("expected MxN, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| StateError::Dimension(format!("expected MxN, got {s:?}")))
        };
        Dims::new(parse(a)?, parse(b)?)
    }
}

/// Tensor factor selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Slack for "sums to one" checks: `floor` in `f64`, a few ulps above that in `f32`.
pub(crate) fn unit_slack<T: Real>(floor: f64) -> T {
    T::lit(floor).max(T::epsilon() * T::lit(64.0))
}

/// Pure product vector `e ⊗ f` with unit factors.
///
/// Only the rays `[e]`, `[f]` matter for the state; equality of product
/// vectors is therefore tested with [`ProductVector::same_rays`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector<T> {
    e: Vec<Cx<T>>,
    f: Vec<Cx<T>>,
}

impl<T: Real> ProductVector<T> {
    /// Normalizes both factors; fails on empty, zero or non-finite input.
    pub fn new(e: Vec<Cx<T>>, f: Vec<Cx<T>>) -> Result<Self, StateError> {
        Ok(Self { e: unit(e, "e")?, f: unit(f, "f")? })
    }

    /// Accepts factors that are already unit vectors within `1e-12` (or a few ulps for `f32`).
    pub fn from_unit(e: Vec<Cx<T>>, f: Vec<Cx<T>>) -> Result<Self, StateError> {
        let slack = unit_slack::<T>(1e-12);
        for (name, v) in [("e", &e), ("f", &f)] {
            let nv = norm(v);
            if (nv - T::one()).abs() > slack {
                return Err(StateError::InvalidVector(format!("{name} has norm {nv}, expected 1")));
            }
        }
        Ok(Self { e, f })
    }

    pub fn e(&self) -> &[Cx<T>] {
        &self.e
    }

    pub fn f(&self) -> &[Cx<T>] {
        &self.f
    }

    pub fn dims(&self) -> Dims {
        Dims { m: self.e.len(), n: self.f.len() }
    }

    /// The joint vector `e ⊗ f` in `C^{mn}`.
    pub fn vector(&self) -> Vec<Cx<T>> {
        kron_vec(&self.e, &self.f)
    }

    /// Rank-one projector onto `[e ⊗ f]`.
    pub fn projector(&self) -> Matrix<T> {
        let v = self.vector();
        outer(&v, &v)
    }

    /// Both factor rays agree within `eps`.
    pub fn same_rays(&self, other: &Self, eps: T) -> bool {
        ray_distance(&self.e, &other.e) <= eps && ray_distance(&self.f, &other.f) <= eps
    }

    /// Copy with both factors phase-normalized (largest entry real positive).
    pub fn canonical(&self) -> Self {
        use crate::numerics::phase_normalize;
        Self { e: phase_normalize(&self.e), f: phase_normalize(&self.f) }
    }
}

fn unit<T: Real>(v: Vec<Cx<T>>, name: &str) -> Result<Vec<Cx<T>>, StateError> {
    if v.is_empty() {
        return Err(StateError::InvalidVector(format!("{name} is empty")));
    }
    let nv = norm(&v);
    if !nv.is_finite() || nv == T::zero() {
        return Err(StateError::InvalidVector(format!("{name} has norm {nv}")));
    }
    Ok(normalize(&v))
}

/// One weighted term `λ ω_{e⊗f}` of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Component<T> {
    pub weight: T,
    pub pv: ProductVector<T>,
}

/// Convex combination `Σ λ_i ω_{e_i⊗f_i}` of pure product states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    dims: Dims,
    components: Vec<Component<T>>,
}

impl<T: Real> Ensemble<T> {
    /// Checks positivity of every weight, unit total weight (within `1e-12`) and factor dimensions.
    pub fn new(dims: Dims, components: Vec<Component<T>>) -> Result<Self, StateError> {
        if components.is_empty() {
            return Err(StateError::Empty);
        }
        let mut sum = T::zero();
        for (index, c) in components.iter().enumerate() {
            if !(c.weight > T::zero()) || !c.weight.is_finite() {
                return Err(StateError::InvalidWeight { index, value: c.weight.as_f64() });
            }
            if c.pv.dims() != dims {
                return Err(StateError::Dimension(format!(
                    "component {index} is {} but the ensemble is {dims}",
                    c.pv.dims()
                )));
            }
            sum += c.weight;
        }
        if (sum - T::one()).abs() > unit_slack(1e-12) {
            return Err(StateError::WeightSum { sum: sum.as_f64() });
        }
        Ok(Self { dims, components })
    }

    /// Like [`Ensemble::new`] but rescales positive weights to sum to one first.
    pub fn with_normalized_weights(dims: Dims, mut components: Vec<Component<T>>) -> Result<Self, StateError> {
        let sum = components.iter().fold(T::zero(), |acc, c| acc + c.weight);
        if sum > T::zero() && sum.is_finite() {
            for c in &mut components {
                c.weight = c.weight / sum;
            }
        }
        Self::new(dims, components)
    }

    /// Convenience constructor from `(weight, e, f)` triples; factors are normalized.
    pub fn from_parts(dims: Dims, parts: Vec<(T, Vec<Cx<T>>, Vec<Cx<T>>)>) -> Result<Self, StateError> {
        let components = parts
            .into_iter()
            .map(|(weight, e, f)| Ok(Component { weight, pv: ProductVector::new(e, f)? }))
            .collect::<Result<Vec<_>, StateError>>()?;
        Self::new(dims, components)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    pub fn weights(&self) -> Vec<T> {
        self.components.iter().map(|c| c.weight).collect()
    }

    /// `t·self + (1 − t)·other` as a single ensemble.
    pub fn mix(&self, t: T, other: &Self) -> Result<Self, StateError> {
        if self.dims != other.dims {
            return Err(StateError::Dimension("mixing ensembles of different dims".into()));
        }
        let comps = self
            .components
            .iter()
            .map(|c| Component { weight: c.weight * t, pv: c.pv.clone() })
            .chain(other.components.iter().map(|c| Component { weight: c.weight * (T::one() - t), pv: c.pv.clone() }))
            .filter(|c| c.weight > T::zero())
            .collect();
        Self::with_normalized_weights(self.dims, comps)
    }

    /// Sub-ensemble over `indices`, with weights renormalized.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, StateError> {
        let comps = indices.iter().map(|&i| self.components[i].clone()).collect();
        Self::with_normalized_weights(self.dims, comps)
    }
}

/// Density matrix on `C^m ⊗ C^n` that passed [`validate_state`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    dims: Dims,
    mat: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub(crate) fn from_trusted(dims: Dims, mat: Matrix<T>) -> Self {
        debug_assert_eq!(mat.rows(), dims.total());
        Self { dims, mat }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.mat
    }

    /// Pure state `|ψ⟩⟨ψ|` for a vector in `C^{mn}`.
    pub fn pure(dims: Dims, psi: &[Cx<T>]) -> Result<Self, StateError> {
        if psi.len() != dims.total() {
            return Err(StateError::Dimension(format!("vector length {} for {dims}", psi.len())));
        }
        let v = unit(psi.to_vec(), "psi")?;
        Ok(Self { dims, mat: outer(&v, &v) })
    }

    pub fn marginal(&self, keep: Side) -> Self {
        marginal(self, keep)
    }

    pub fn partial_transpose(&self, side: Side) -> Matrix<T> {
        partial_transpose(self, side)
    }

    pub fn rank(&self, tol: &Tolerance<T>) -> usize {
        crate::numerics::rank_svd(&self.mat, tol)
    }

    /// Eigenvalues, nonincreasing.
    pub fn spectrum(&self) -> Vec<T> {
        eig_hermitian(&self.mat.hermitian_part(), &Tolerance::default())
            .map(|e| e.values)
            .expect("density matrices are Hermitian")
    }
}

/// `Σ λ_i |e_i⊗f_i⟩⟨e_i⊗f_i|`.
pub fn density_of<T: Real>(ens: &Ensemble<T>) -> DensityMatrix<T> {
    let d = ens.dims.total();
    let mut mat = Matrix::zeros(d, d);
    for c in &ens.components {
        let v = c.pv.vector();
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] += v[i] * v[j].conj() * c.weight;
            }
        }
    }
    DensityMatrix { dims: ens.dims, mat }
}

/// Reduced state on the `keep` factor (the other factor is traced out).
///
/// The result lives on a single factor and carries dims `(d, 1)`.
pub fn marginal<T: Real>(rho: &DensityMatrix<T>, keep: Side) -> DensityMatrix<T> {
    let Dims { m, n } = rho.dims;
    let a = &rho.mat;
    let (mat, d) = match keep {
        Side::A => (
            Matrix::from_fn(m, m, |i, j| (0..n).fold(czero(), |acc, k| acc + a[(i * n + k, j * n + k)])),
            m,
        ),
        Side::B => (
            Matrix::from_fn(n, n, |k, l| (0..m).fold(czero(), |acc, i| acc + a[(i * n + k, i * n + l)])),
            n,
        ),
    };
    DensityMatrix { dims: Dims { m: d, n: 1 }, mat }
}

/// Partial transpose of an `mn × mn` operator on the chosen factor.
pub fn partial_transpose_matrix<T: Real>(mat: &Matrix<T>, dims: Dims, side: Side) -> Matrix<T> {
    let Dims { m: _, n } = dims;
    Matrix::from_fn(mat.rows(), mat.cols(), |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        match side {
            Side::A => mat[(j * n + k, i * n + l)],
            Side::B => mat[(i * n + l, j * n + k)],
        }
    })
}

pub fn partial_transpose<T: Real>(rho: &DensityMatrix<T>, side: Side) -> Matrix<T> {
    partial_transpose_matrix(&rho.mat, rho.dims, side)
}

/// Checks Hermiticity, then unit trace, then positivity, reporting the first failure.
pub fn validate_state<T: Real>(mat: &Matrix<T>, dims: Dims, tol: &Tolerance<T>) -> Result<DensityMatrix<T>, StateError> {
    if mat.rows() != dims.total() || mat.cols() != dims.total() {
        return Err(StateError::Dimension(format!(
            "{}x{} matrix for {dims} (expected {t}x{t})",
            mat.rows(),
            mat.cols(),
            t = dims.total()
        )));
    }
    let dev = mat.hermitian_deviation();
    if dev > tol.eps_herm * mat.frobenius_norm().max(T::one()) {
        return Err(StateError::NotHermitian { deviation: dev.as_f64() });
    }
    let tr = mat.trace().re;
    if (tr - T::one()).abs() > unit_slack(1e-10) {
        return Err(StateError::TraceNotOne { deviation: (tr - T::one()).abs().as_f64() });
    }
    let eig = eig_hermitian(&mat.hermitian_part(), tol)?;
    let min = eig.min_value();
    if min < -tol.eps_herm {
        return Err(StateError::NotPositive { deviation: (-min).as_f64() });
    }
    Ok(DensityMatrix { dims, mat: mat.clone() })
}

/// Trace distance `½‖a − b‖₁`.
pub fn trace_distance<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> T {
    let diff = (&a.mat - &b.mat).hermitian_part();
    let eig = eig_hermitian(&diff, &Tolerance::default()).expect("difference of Hermitian matrices");
    eig.values.iter().fold(T::zero(), |acc, v| acc + v.abs()) * T::lit(0.5)
}

/// Factors a (numerically) pure product state back into `e ⊗ f`.
///
/// Returns `None` when `rho` is not rank one, or its range vector is not a product vector,
/// at relative level `eps_rank`.
pub fn pure_product_of<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerance<T>) -> Option<ProductVector<T>> {
    let eig = eig_hermitian(&rho.mat.hermitian_part(), tol).ok()?;
    let top = eig.values[0];
    if top <= T::zero() || eig.values.get(1).is_some_and(|&v| v.abs() > tol.eps_rank.sqrt() * top) {
        return None;
    }
    let psi = eig.vector(0);
    let m = reshape_vec(&psi, rho.dims.m, rho.dims.n).ok()?;
    let d = svd(&m).ok()?;
    if d.s.get(1).is_some_and(|&s| s > tol.eps_rank.sqrt() * d.s[0]) {
        return None;
    }
    // M ≈ σ u v*, so e ∝ u and f ∝ conj(v)
    let e = d.u.column(0);
    let f: Vec<Cx<T>> = d.v.column(0).iter().map(|z| z.conj()).collect();
    ProductVector::new(e, f).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cx, kron, Cx};

    type C = Cx<f64>;

    fn basis(d: usize, i: usize) -> Vec<C> {
        (0..d).map(|k| if k == i { cx(1.0, 0.0) } else { cx(0.0, 0.0) }).collect()
    }

    fn bell() -> DensityMatrix<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = vec![cx(h, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(h, 0.0)];
        DensityMatrix::pure(Dims::new(2, 2).unwrap(), &psi).unwrap()
    }

    #[test]
    fn dims_parse() {
        assert_eq!("3x4".parse::<Dims>().unwrap(), Dims { m: 3, n: 4 });
        assert!("3by4".parse::<Dims>().is_err());
        assert!("0x4".parse::<Dims>().is_err());
    }

    #[test]
    fn density_single_and_orthogonal() {
        let d = Dims::new(2, 2).unwrap();
        let one = Ensemble::from_parts(d, vec![(1.0, basis(2, 0), basis(2, 0))]).unwrap();
        assert_eq!(density_of(&one).matrix(), &Matrix::diag(&[1.0, 0.0, 0.0, 0.0]));
        let two = Ensemble::from_parts(
            d,
            vec![(0.5, basis(2, 0), basis(2, 0)), (0.5, basis(2, 1), basis(2, 1))],
        )
        .unwrap();
        assert_eq!(density_of(&two).matrix(), &Matrix::diag(&[0.5, 0.0, 0.0, 0.5]));
    }

    #[test]
    fn ensemble_rejects_bad_weights() {
        let d = Dims::new(2, 2).unwrap();
        let err = Ensemble::from_parts(d, vec![(0.6, basis(2, 0), basis(2, 0)), (0.5, basis(2, 1), basis(2, 1))]);
        assert!(matches!(err, Err(StateError::WeightSum { .. })));
        let err = Ensemble::from_parts(d, vec![(1.0, basis(2, 0), basis(2, 0)), (0.0, basis(2, 1), basis(2, 1))]);
        assert!(matches!(err, Err(StateError::InvalidWeight { index: 1, .. })));
        assert!(matches!(Ensemble::<f64>::new(d, vec![]), Err(StateError::Empty)));
        let err = Ensemble::from_parts(d, vec![(1.0, basis(3, 0), basis(2, 0))]);
        assert!(matches!(err, Err(StateError::Dimension(_))));
    }

    #[test]
    fn marginals_of_product_and_bell() {
        let d = Dims::new(2, 2).unwrap();
        let p = validate_state(&Matrix::diag(&[1.0, 0.0, 0.0, 0.0]), d, &Tolerance::default()).unwrap();
        assert_eq!(marginal(&p, Side::A).matrix(), &Matrix::diag(&[1.0, 0.0]));
        assert_eq!(marginal(&p, Side::B).matrix(), &Matrix::diag(&[1.0, 0.0]));
        let b = bell();
        for side in [Side::A, Side::B] {
            let r = marginal(&b, side);
            assert!((r.matrix() - &Matrix::identity(2).scale_real(0.5)).frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn marginal_picks_the_right_factor() {
        let d = Dims::new(2, 3).unwrap();
        let a = Matrix::<f64>::diag(&[0.25, 0.75]);
        let b = Matrix::<f64>::diag(&[0.5, 0.3, 0.2]);
        let rho = validate_state(&kron(&a, &b), d, &Tolerance::default()).unwrap();
        assert!((marginal(&rho, Side::A).matrix() - &a).frobenius_norm() < 1e-15);
        assert!((marginal(&rho, Side::B).matrix() - &b).frobenius_norm() < 1e-15);
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let b = bell();
        for side in [Side::A, Side::B] {
            let pt = partial_transpose(&b, side);
            let e = eig_hermitian(&pt, &Tolerance::default()).unwrap();
            let want = [0.5, 0.5, 0.5, -0.5];
            for (got, w) in e.values.iter().zip(want) {
                assert!((got - w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn partial_transposes_compose_to_full_transpose() {
        let d = Dims::new(2, 3).unwrap();
        let m = Matrix::<f64>::from_fn(6, 6, |i, j| cx(i as f64 + 0.1 * j as f64, (i * j) as f64));
        let a = partial_transpose_matrix(&m, d, Side::A);
        assert_eq!(partial_transpose_matrix(&a, d, Side::B), m.transpose());
        assert_eq!(partial_transpose_matrix(&a, d, Side::A), m);
        // transpose factor-wise: (X ⊗ Y)^{T_A} = X^T ⊗ Y
        let x = Matrix::<f64>::from_fn(2, 2, |i, j| cx(i as f64, j as f64 + 1.0));
        let y = Matrix::<f64>::from_fn(3, 3, |i, j| cx((i + 2 * j) as f64, -(i as f64)));
        assert_eq!(partial_transpose_matrix(&kron(&x, &y), d, Side::A), kron(&x.transpose(), &y));
        assert_eq!(partial_transpose_matrix(&kron(&x, &y), d, Side::B), kron(&x, &y.transpose()));
    }

    #[test]
    fn validate_examples() {
        let d = Dims::new(2, 2).unwrap();
        let tol = Tolerance::default();
        assert!(validate_state(&Matrix::<f64>::identity(4).scale_real(0.25), d, &tol).is_ok());
        match validate_state(&Matrix::diag(&[1.0, -0.001, 0.001, 0.0]), d, &tol) {
            Err(StateError::NotPositive { deviation }) => assert!((deviation - 0.001).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        // trace is exactly 1, so positivity is the failing check
        match validate_state(&Matrix::diag(&[0.6, 0.6, -0.1, -0.1]), d, &tol) {
            Err(StateError::NotPositive { deviation }) => assert!((deviation - 0.1).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        // both trace and positivity fail: trace is checked first
        assert!(matches!(
            validate_state(&Matrix::diag(&[0.9, 0.6, -0.1, -0.1]), d, &tol),
            Err(StateError::TraceNotOne { .. })
        ));
        let mut nh = Matrix::<f64>::identity(4).scale_real(0.25);
        nh[(0, 1)] = cx(0.1, 0.0);
        assert!(matches!(validate_state(&nh, d, &tol), Err(StateError::NotHermitian { .. })));
        assert!(matches!(validate_state(&Matrix::<f64>::identity(3), d, &tol), Err(StateError::Dimension(_))));
    }

    #[test]
    fn pure_product_extraction() {
        let d = Dims::new(2, 3).unwrap();
        let e = vec![cx(0.6, 0.0), cx(0.0, 0.8)];
        let f = vec![cx(0.0, 1.0), cx(1.0, 0.0), cx(-1.0, 1.0)];
        let ens = Ensemble::from_parts(d, vec![(1.0, e, f)]).unwrap();
        let tol = Tolerance::default();
        let pv = pure_product_of(&density_of(&ens), &tol).unwrap();
        assert!(pv.same_rays(&ens.components()[0].pv, 1e-12));
        assert!(pure_product_of(&bell(), &tol).is_none());
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let d = Dims::new(2, 2).unwrap();
        let a = DensityMatrix::pure(d, &kron_vec(&basis(2, 0), &basis(2, 0))).unwrap();
        let b = DensityMatrix::pure(d, &kron_vec(&basis(2, 1), &basis(2, 0))).unwrap();
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-14);
        assert!(trace_distance(&a, &a) < 1e-15);
    }
}
