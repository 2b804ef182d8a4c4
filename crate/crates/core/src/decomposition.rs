//! Uniqueness certificates, pencil-based recovery of unique pure-product
//! decompositions, and the coarse (block) decomposition of an ensemble.

use std::cmp::Ordering;

use thiserror::Error;

use crate::numerics::{
    eig_hermitian, kron_vec, norm, normalize, orthonormal_basis, pencil_eig, phase_normalize,
    rank_svd, ray_distance, reshape_vec, svd, Cx, LinalgError, Matrix, Real, Tolerance,
};
use crate::sampling;
use crate::states::{
    density_of, marginal, trace_distance, Component, Dims, DensityMatrix, Ensemble, ProductVector, Side, StateError,
};

/// Number of fresh random combinations tried before giving up on a degenerate pencil.
pub const MAX_PENCIL_ATTEMPTS: usize = 8;

/// Upper limit on the number of terms `hjw_mixtures` will produce.
pub const MAX_MIXTURE_TERMS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("state is outside the uniqueness regime: {reason}")]
    NotInRegime { reason: String },
    #[error("pencil stayed degenerate after {attempts} attempts: {reason}")]
    DegeneratePencil { attempts: usize, reason: String },
    #[error("f vectors are linearly dependent (smallest singular value {f_min_sv:e})")]
    DependentF { f_min_sv: f64 },
    #[error("requested {requested} terms but the state has rank {rank}")]
    RankTooHigh { rank: usize, requested: usize },
    #[error("requested {requested} terms, at most {max} supported")]
    TooManyTerms { requested: usize, max: usize },
    #[error("no ensemble known and recovery failed: {reason}")]
    Unbounded { reason: String },
    #[error("known ensemble does not reproduce the state (residual {residual:e})")]
    KnownMismatch { residual: f64 },
    #[error("cannot repair: {reason}")]
    NotRepairable { reason: String },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Margins of the uniqueness hypotheses for an ensemble of `k` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VkCertificate<T> {
    pub k: usize,
    /// `min_{i≠j} √(1 − |⟨e_i, e_j⟩|²)`; 1 when `k = 1`.
    pub ray_gap: T,
    /// Smallest singular value of `[f_1 … f_k]`; 0 when `k > n`.
    pub f_min_sv: T,
    pub min_weight: T,
    pub valid: bool,
}

/// Which uniqueness hypothesis failed first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// `k ≤ max(m, n)`.
    ComponentCount,
    PositiveWeights,
    DistinctRays,
    IndependentF,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VkRejection<T> {
    pub hypothesis: Hypothesis,
    /// Signed slack of the failed hypothesis (nonpositive).
    pub margin: T,
    pub certificate: VkCertificate<T>,
}

/// Computes the certificate without judging it; `valid` is filled in.
pub fn vk_certificate<T: Real>(ens: &Ensemble<T>, tol: &Tolerance<T>) -> VkCertificate<T> {
    let k = ens.len();
    let comps = ens.components();
    let mut ray_gap = T::one();
    for i in 0..k {
        for j in i + 1..k {
            ray_gap = ray_gap.min(ray_distance(comps[i].pv.e(), comps[j].pv.e()));
        }
    }
    let f_min_sv = f_min_singular_value(ens);
    let min_weight = comps.iter().fold(T::infinity(), |acc, c| acc.min(c.weight));
    let valid = k <= ens.dims().max() && min_weight > T::zero() && ray_gap > tol.eps_rank && f_min_sv > tol.eps_rank;
    VkCertificate { k, ray_gap, f_min_sv, min_weight, valid }
}

fn f_min_singular_value<T: Real>(ens: &Ensemble<T>) -> T {
    if ens.len() > ens.dims().n {
        return T::zero();
    }
    let cols: Vec<Vec<Cx<T>>> = ens.components().iter().map(|c| c.pv.f().to_vec()).collect();
    let f = Matrix::from_columns(&cols).expect("f vectors share the dimension n");
    svd(&f).map(|d| d.smallest()).unwrap_or_else(|_| T::zero())
}

/// Checks the uniqueness hypotheses in the order count, weights, rays, independence.
pub fn certify_vk<T: Real>(ens: &Ensemble<T>, tol: &Tolerance<T>) -> Result<VkCertificate<T>, VkRejection<T>> {
    let cert = vk_certificate(ens, tol);
    let max = ens.dims().max();
    let reject = |hypothesis, margin| Err(VkRejection { hypothesis, margin, certificate: cert });
    if cert.k > max {
        return reject(Hypothesis::ComponentCount, T::lit(max as f64) - T::lit(cert.k as f64));
    }
    if !(cert.min_weight > T::zero()) {
        return reject(Hypothesis::PositiveWeights, cert.min_weight);
    }
    if cert.ray_gap <= tol.eps_rank {
        return reject(Hypothesis::DistinctRays, cert.ray_gap - tol.eps_rank);
    }
    if cert.f_min_sv <= tol.eps_rank {
        return reject(Hypothesis::IndependentF, cert.f_min_sv - tol.eps_rank);
    }
    Ok(cert)
}

/// Recovered decomposition with diagnostics.
#[derive(Debug, Clone)]
pub struct Recovery<T> {
    pub ensemble: Ensemble<T>,
    /// `‖density_of(ensemble) − ρ‖_F`.
    pub residual: T,
    /// Random combinations discarded because the pencil was degenerate.
    pub retries: usize,
}

/// Recovers the unique pure-product decomposition of `rho`.
///
/// See [`recover_unique_report`] for the algorithm; this returns only the ensemble.
pub fn recover_unique<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerance<T>, seed: u64) -> Result<Ensemble<T>, DecompositionError> {
    recover_unique_report(rho, tol, seed).map(|r| r.ensemble)
}

/// Pencil recovery on the B side.
///
/// With `ρ = Σ λ_i e_i e_i* ⊗ f_i f_i*`, any Hermitian combination
/// `Σ_ab c_ab ρ_ab` of the conditional blocks equals `Σ λ_i μ_i f_i f_i*` with
/// `μ_i = e_iᵀ C ē_i`, while `ρ_B = Σ λ_i f_i f_i*`. On the range of `ρ_B` the
/// pencil has eigenvectors `w_i` dual to the `f_i`; `ρ_B w_i ∝ f_i`, and
/// contracting `ρ` with `w_i` on the B factor leaves `λ_i e_i e_i*`.
pub fn recover_unique_report<T: Real>(
    rho: &DensityMatrix<T>,
    tol: &Tolerance<T>,
    seed: u64,
) -> Result<Recovery<T>, DecompositionError> {
    let dims = rho.dims();
    let Dims { m, n } = dims;
    let rb = marginal(rho, Side::B);
    let eb = eig_hermitian(rb.matrix(), tol)?;
    let top = eb.values[0];
    let k = eb.values.iter().filter(|&&v| v > tol.eps_rank * top).count();
    let rank = rank_svd(rho.matrix(), tol);
    if rank != k {
        return Err(DecompositionError::NotInRegime {
            reason: format!("rank of the state ({rank}) differs from rank of its B marginal ({k})"),
        });
    }

    let q = Matrix::from_fn(n, k, |i, j| eb.vectors[(i, j)]);
    let qh = q.adjoint();
    let restricted: Vec<Matrix<T>> = (0..m * m)
        .map(|ab| {
            let (a, b) = (ab / m, ab % m);
            qh.matmul(&rho.matrix().block(a * n, b * n, n, n)).matmul(&q)
        })
        .collect();
    let s2 = qh.matmul(rb.matrix()).matmul(&q);

    let mut last_reason = String::new();
    for attempt in 0..MAX_PENCIL_ATTEMPTS {
        let mut rng = sampling::rng(seed.wrapping_add(attempt as u64));
        let c = sampling::hermitian::<T, _>(&mut rng, m);
        let mut s1 = Matrix::zeros(k, k);
        for (ab, blk) in restricted.iter().enumerate() {
            s1 = &s1 + &blk.scale(c[(ab / m, ab % m)]);
        }
        let pencil = match pencil_eig(&s1, &s2, k, tol) {
            Ok(p) => p,
            Err(LinalgError::DegeneratePencil { reason }) => {
                last_reason = reason;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let ensemble = assemble(rho, &q, &pencil.vectors)?;
        let residual = (density_of(&ensemble).matrix() - rho.matrix()).frobenius_norm();
        if residual > tol.eps_match {
            return Err(DecompositionError::NotInRegime {
                reason: format!("reconstruction residual {:e} exceeds {:e}", residual.as_f64(), tol.eps_match.as_f64()),
            });
        }
        if let Err(rej) = certify_vk(&ensemble, tol) {
            return Err(DecompositionError::NotInRegime {
                reason: format!("recovered ensemble fails {:?} (margin {:e})", rej.hypothesis, rej.margin.as_f64()),
            });
        }
        return Ok(Recovery { ensemble, residual, retries: attempt });
    }
    Err(DecompositionError::DegeneratePencil { attempts: MAX_PENCIL_ATTEMPTS, reason: last_reason })
}

fn assemble<T: Real>(rho: &DensityMatrix<T>, q: &Matrix<T>, ws: &[Vec<Cx<T>>]) -> Result<Ensemble<T>, DecompositionError> {
    let Dims { m, n } = rho.dims();
    let a = rho.matrix();
    let rb = marginal(rho, Side::B);
    let mut parts = Vec::with_capacity(ws.len());
    for w in ws {
        let mut big_w = q.mul_vec(w);
        let f = normalize(&rb.matrix().mul_vec(&big_w));
        let scale = crate::numerics::inner(&f, &big_w);
        if scale.norm() <= T::epsilon() {
            return Err(DecompositionError::NotInRegime { reason: "dual vector orthogonal to its f".into() });
        }
        for z in big_w.iter_mut() {
            *z = *z / scale;
        }
        // X[a][b] = Σ_kl conj(W_k) ρ[(a,k),(b,l)] W_l = λ e e*
        let x = Matrix::from_fn(m, m, |ia, ib| {
            let mut acc = Cx::new(T::zero(), T::zero());
            for kk in 0..n {
                let wk = big_w[kk].conj();
                for ll in 0..n {
                    acc += wk * a[(ia * n + kk, ib * n + ll)] * big_w[ll];
                }
            }
            acc
        });
        let ex = eig_hermitian(&x.hermitian_part(), &Tolerance::default())?;
        let lambda = x.trace().re;
        if !(lambda > T::zero()) {
            return Err(DecompositionError::NotInRegime {
                reason: format!("recovered weight {:e} is not positive", lambda.as_f64()),
            });
        }
        parts.push((lambda, ex.vector(0), f));
    }
    let total = parts.iter().fold(T::zero(), |acc, p| acc + p.0);
    let comps = parts
        .into_iter()
        .map(|(w, e, f)| {
            Ok(Component { weight: w / total, pv: ProductVector::new(phase_normalize(&e), phase_normalize(&f))? })
        })
        .collect::<Result<Vec<_>, StateError>>()?;
    Ok(Ensemble::with_normalized_weights(rho.dims(), canonical_order(comps, |c| c.weight, |c| lex_key(&c.pv)))?)
}

fn lex_key<T: Real>(pv: &ProductVector<T>) -> Vec<T> {
    let e = phase_normalize(pv.e());
    let f = phase_normalize(pv.f());
    e.iter().chain(&f).flat_map(|z| [z.re, z.im]).collect()
}

fn lex_cmp<T: Real>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Orders by descending weight; runs of weights closer than `1e-9` (relative)
/// are ordered lexicographically by `key`.
pub(crate) fn canonical_order<I, T: Real>(
    mut items: Vec<I>,
    weight: impl Fn(&I) -> T,
    key: impl Fn(&I) -> Vec<T>,
) -> Vec<I> {
    items.sort_by(|a, b| weight(b).partial_cmp(&weight(a)).unwrap_or(Ordering::Equal));
    let tie = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
    let mut start = 0;
    while start < items.len() {
        let mut end = start + 1;
        while end < items.len() && weight(&items[end - 1]) - weight(&items[end]) <= tie {
            end += 1;
        }
        items[start..end].sort_by(|a, b| lex_cmp(&key(a), &key(b)));
        start = end;
    }
    items
}

/// Product vectors in the span of `basis`, found by alternating rank-one projection.
///
/// Each of `budget` seeded restarts begins at a random point of the span and
/// alternates between the nearest product vector and the projection back onto
/// the span. Converged product vectors are kept and de-duplicated when their
/// fidelity is at least `1 − 1e-6`. This is a search, not a proof: it is
/// complete only when the span contains finitely many product rays that all
/// attract random starts, which holds in the uniqueness regime.
pub fn product_vectors_in_subspace<T: Real>(
    basis: &[Vec<Cx<T>>],
    dims: Dims,
    tol: &Tolerance<T>,
    budget: usize,
    seed: u64,
) -> Result<Vec<ProductVector<T>>, DecompositionError> {
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(v) = basis.iter().find(|v| v.len() != dims.total()) {
        return Err(StateError::Dimension(format!("basis vector of length {} for {dims}", v.len())).into());
    }
    let q = Matrix::from_columns(&orthonormal_basis(basis, tol)?)?;
    let qh = q.adjoint();
    let project = |v: &[Cx<T>]| q.mul_vec(&qh.mul_vec(v));
    let accept = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
    let dedup = T::lit(1e-6);

    let mut rng = sampling::rng(seed);
    let mut found: Vec<ProductVector<T>> = Vec::new();
    for _ in 0..budget {
        let coeffs = sampling::unit_vector::<T, _>(&mut rng, q.cols());
        let mut x = q.mul_vec(&coeffs);
        let mut prev = T::infinity();
        let mut stall = 0;
        let mut start = None;
        for _ in 0..2000 {
            let d = svd(&reshape_vec(&x, dims.m, dims.n)?)?;
            let dist = d.s[1..].iter().fold(T::zero(), |acc, &s| acc + s * s).sqrt();
            let e = d.u.column(0);
            let f: Vec<Cx<T>> = d.v.column(0).iter().map(|z| z.conj()).collect();
            // close rays make the linear rate poor; hand over to Gauss-Newton early
            if dist <= T::lit(1e-3) {
                start = Some((e, f));
                break;
            }
            if dist > prev * T::lit(0.9999) {
                stall += 1;
                if stall > 50 {
                    start = Some((e, f));
                    break;
                }
            } else {
                stall = 0;
            }
            prev = dist;
            x = normalize(&project(&kron_vec(&e, &f)));
            if norm(&x) == T::zero() {
                break;
            }
        }
        let Some((e, f)) = start else { continue };
        if let Some((e, f)) = polish_product(&q, dims, e, f, accept, tol)? {
            let pv = ProductVector::new(phase_normalize(&e), phase_normalize(&f))?;
            let pv_vec = pv.vector();
            let dup = found.iter().any(|g| crate::numerics::inner(&g.vector(), &pv_vec).norm() >= T::one() - dedup);
            if !dup {
                found.push(pv);
            }
        }
    }
    found.sort_by(|a, b| lex_cmp(&lex_key(a), &lex_key(b)));
    Ok(found)
}

/// Gauss-Newton on `(I - QQ*)(e ⊗ f) = 0`; returns unit factors once the residual is below `accept`.
fn polish_product<T: Real>(
    q: &Matrix<T>,
    dims: Dims,
    mut e: Vec<Cx<T>>,
    mut f: Vec<Cx<T>>,
    accept: T,
    tol: &Tolerance<T>,
) -> Result<Option<(Vec<Cx<T>>, Vec<Cx<T>>)>, DecompositionError> {
    let (m, n) = (dims.m, dims.n);
    let qh = q.adjoint();
    let off = |v: &[Cx<T>]| {
        let p = q.mul_vec(&qh.mul_vec(v));
        v.iter().zip(p).map(|(&a, b)| a - b).collect::<Vec<_>>()
    };
    for _ in 0..60 {
        let r = off(&kron_vec(&e, &f));
        let res = norm(&r);
        if res <= accept {
            return Ok(Some((e, f)));
        }
        if !res.is_finite() {
            return Ok(None);
        }
        // steps are kept orthogonal to e and f: the residual is homogeneous in both
        let tangent = |v: &[Cx<T>], k: usize| {
            let c = v[k].conj();
            (0..v.len()).map(|i| if i == k { Cx::new(T::one(), T::zero()) - v[i] * c } else { -(v[i] * c) }).collect::<Vec<_>>()
        };
        let mut cols = Vec::with_capacity(m + n);
        for i in 0..m {
            cols.push(off(&kron_vec(&tangent(&e, i), &f)));
        }
        for j in 0..n {
            cols.push(off(&kron_vec(&e, &tangent(&f, j))));
        }
        let jac = Matrix::from_columns(&cols)?;
        let coef = crate::numerics::pinv(&jac, tol)?.mul_vec(&r);
        let de: Vec<Cx<T>> = (0..m).fold(vec![Cx::new(T::zero(), T::zero()); m], |acc, i| {
            acc.iter().zip(tangent(&e, i)).map(|(&a, t)| a + t * coef[i]).collect()
        });
        let df: Vec<Cx<T>> = (0..n).fold(vec![Cx::new(T::zero(), T::zero()); n], |acc, j| {
            acc.iter().zip(tangent(&f, j)).map(|(&a, t)| a + t * coef[m + j]).collect()
        });
        e = normalize(&e.iter().zip(&de).map(|(&a, &b)| a - b).collect::<Vec<_>>());
        f = normalize(&f.iter().zip(&df).map(|(&a, &b)| a - b).collect::<Vec<_>>());
    }
    Ok(None)
}

/// One block `γ σ` of a coarse decomposition.
#[derive(Debug, Clone)]
pub struct CoarseBlock<T> {
    pub gamma: T,
    /// Normalized sum of the member terms.
    pub sigma: DensityMatrix<T>,
    /// Phase-normalized representative of the shared e-ray.
    pub ray: Vec<Cx<T>>,
    /// The member f vectors, in input order.
    pub f_members: Vec<Vec<Cx<T>>>,
    /// Orthonormal basis of `e ⊗ span{f_j}`.
    pub l_basis: Vec<Vec<Cx<T>>>,
    /// Indices of the member components in the input ensemble.
    pub members: Vec<usize>,
}

/// The unique decomposition `ω = Σ γ_k σ_k` by e-ray classes.
#[derive(Debug, Clone)]
pub struct CoarseDecomposition<T> {
    pub dims: Dims,
    pub blocks: Vec<CoarseBlock<T>>,
}

impl<T: Real> CoarseDecomposition<T> {
    pub fn q(&self) -> usize {
        self.blocks.len()
    }

    /// `Σ γ_k σ_k`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let d = self.dims.total();
        self.blocks
            .iter()
            .fold(Matrix::zeros(d, d), |acc, b| &acc + &b.sigma.matrix().scale_real(b.gamma))
    }
}

/// Groups components by e-ray (threshold `eps_rank`, as in [`certify_vk`]).
pub fn coarse_decompose<T: Real>(ens: &Ensemble<T>, tol: &Tolerance<T>) -> Result<CoarseDecomposition<T>, DecompositionError> {
    let f_min_sv = f_min_singular_value(ens);
    if f_min_sv <= tol.eps_rank {
        return Err(DecompositionError::DependentF { f_min_sv: f_min_sv.as_f64() });
    }
    let dims = ens.dims();
    let mut classes: Vec<(Vec<Cx<T>>, Vec<usize>)> = Vec::new();
    for (i, c) in ens.components().iter().enumerate() {
        match classes.iter_mut().find(|(ray, _)| ray_distance(ray, c.pv.e()) <= tol.eps_rank) {
            Some((_, members)) => members.push(i),
            None => classes.push((phase_normalize(c.pv.e()), vec![i])),
        }
    }
    let blocks = classes
        .into_iter()
        .map(|(ray, members)| {
            let sub = ens.subset(&members)?;
            let gamma = members.iter().fold(T::zero(), |acc, &i| acc + ens.components()[i].weight);
            let f_members: Vec<Vec<Cx<T>>> = members.iter().map(|&i| ens.components()[i].pv.f().to_vec()).collect();
            let l_basis = orthonormal_basis(&f_members, tol)?.iter().map(|g| kron_vec(&ray, g)).collect();
            Ok(CoarseBlock { gamma, sigma: density_of(&sub), ray, f_members, l_basis, members })
        })
        .collect::<Result<Vec<_>, DecompositionError>>()?;
    let blocks = canonical_order(blocks, |b| b.gamma, |b| b.ray.iter().flat_map(|z| [z.re, z.im]).collect());
    Ok(CoarseDecomposition { dims, blocks })
}

/// One pure decomposition `σ = Σ_j w_j ψ_j ψ_j*` with `r` terms.
///
/// The spectral decomposition `σ = Σ μ_j v_j v_j*` is mixed through a seeded
/// Haar `r × rank` isometry `U`: `ψ̃_i = Σ_j U_ij √μ_j v_j`, `w_i = ‖ψ̃_i‖²`.
/// Every `r`-term decomposition arises from some isometry.
pub fn hjw_mixtures<T: Real>(
    sigma: &DensityMatrix<T>,
    r: usize,
    mixing_seed: u64,
    tol: &Tolerance<T>,
) -> Result<Vec<(T, Vec<Cx<T>>)>, DecompositionError> {
    if r > MAX_MIXTURE_TERMS {
        return Err(DecompositionError::TooManyTerms { requested: r, max: MAX_MIXTURE_TERMS });
    }
    let eig = eig_hermitian(sigma.matrix(), tol)?;
    let top = eig.values[0];
    let rank = eig.values.iter().filter(|&&v| v > tol.eps_rank * top).count();
    if r < rank {
        return Err(DecompositionError::RankTooHigh { rank, requested: r });
    }
    let u = sampling::isometry::<T, _>(&mut sampling::rng(mixing_seed), r, rank);
    let d = sigma.matrix().rows();
    let out = (0..r)
        .map(|i| {
            let mut psi = vec![Cx::new(T::zero(), T::zero()); d];
            for j in 0..rank {
                let c = u[(i, j)] * eig.values[j].sqrt();
                for (p, v) in psi.iter_mut().zip(eig.vector(j)) {
                    *p += c * v;
                }
            }
            let w = norm(&psi);
            if w == T::zero() {
                (T::zero(), eig.vector(0))
            } else {
                (w * w, normalize(&psi))
            }
        })
        .collect();
    Ok(out)
}

/// Bounds on the length (fewest pure product terms) of a separable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthBounds {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
}

/// `lower` is the rank; `upper` comes from `known` or from recovery.
pub fn length_bounds<T: Real>(
    rho: &DensityMatrix<T>,
    known: Option<&Ensemble<T>>,
    tol: &Tolerance<T>,
    seed: u64,
) -> Result<LengthBounds, DecompositionError> {
    let lower = rank_svd(rho.matrix(), tol);
    let recovered = recover_unique(rho, tol, seed);
    let upper = match (known, &recovered) {
        (Some(ens), _) => {
            if ens.dims() != rho.dims() {
                return Err(StateError::Dimension(format!("known ensemble is {} but the state is {}", ens.dims(), rho.dims())).into());
            }
            let residual = (density_of(ens).matrix() - rho.matrix()).frobenius_norm();
            if residual > tol.eps_match {
                return Err(DecompositionError::KnownMismatch { residual: residual.as_f64() });
            }
            ens.len()
        }
        (None, Ok(ens)) => ens.len(),
        (None, Err(e)) => return Err(DecompositionError::Unbounded { reason: e.to_string() }),
    };
    let exact = match &recovered {
        Ok(ens) => Some(ens.len()),
        Err(_) if lower == upper => Some(lower),
        Err(_) => None,
    };
    Ok(LengthBounds { lower, upper: upper.max(lower), exact })
}

/// Nudges a degenerate ensemble into the uniqueness regime.
///
/// Every factor moves by a random vector of norm `η` (renormalized); `η`
/// starts at `δ/8` and halves until the new state is within trace distance
/// `δ` of the old one and certifies.
pub fn repair_to_vk<T: Real>(ens: &Ensemble<T>, delta: T, seed: u64, tol: &Tolerance<T>) -> Result<Ensemble<T>, DecompositionError> {
    if ens.len() > ens.dims().n {
        return Err(DecompositionError::NotRepairable {
            reason: format!("{} terms cannot have independent f vectors in dimension {}", ens.len(), ens.dims().n),
        });
    }
    let original = density_of(ens);
    let mut rng = sampling::rng(seed);
    let mut eta = delta / T::lit(8.0);
    for _ in 0..60 {
        let cand = sampling::perturb_ensemble(&mut rng, ens, eta, T::zero());
        if trace_distance(&density_of(&cand), &original) < delta && certify_vk(&cand, tol).is_ok() {
            return Ok(cand);
        }
        eta = eta * T::lit(0.5);
    }
    Err(DecompositionError::NotRepairable { reason: "no certified perturbation found".into() })
}
