//! Seeded random sources for vectors, unitaries, states and ensembles.
//!
//! Every generator takes an explicit RNG; [`rng`] builds the crate's standard
//! stream from a `u64` seed, so equal seeds give bit-identical output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::automorphisms::{AutomorphismWord, Generator};
use crate::decomposition::vk_certificate;
use crate::numerics::{cx, inner, norm, normalize, Cx, Matrix, Real, Tolerance};
use crate::states::{Component, Dims, Ensemble, ProductVector, Side};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `seed + index`; used to derive per-instance seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    cx(T::lit(re), T::lit(im))
}

/// Vector with i.i.d. standard complex Gaussian entries.
pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Cx<T>> {
    (0..d).map(|_| gaussian(rng)).collect()
}

/// Uniform (rotation-invariant) unit vector in `C^d`.
pub fn unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Cx<T>> {
    loop {
        let v = gaussian_vector(rng, d);
        if norm(&v) > T::lit(1e-6) {
            return normalize(&v);
        }
    }
}

/// Complex Ginibre matrix.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Hermitian matrix `(G + G*)/2` with Ginibre `G`.
pub fn hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix<T> {
    ginibre(rng, d, d).hermitian_part()
}

/// `rows × cols` matrix with orthonormal columns (`rows ≥ cols`), Haar distributed.
///
/// Gram–Schmidt on a Ginibre matrix; the triangular factor has positive
/// diagonal, which makes the result Haar.
pub fn isometry<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        let g = ginibre::<T, _>(rng, rows, cols);
        let mut cols_out: Vec<Vec<Cx<T>>> = Vec::with_capacity(cols);
        let mut ok = true;
        for j in 0..cols {
            let mut v = g.column(j);
            // two passes keep the columns orthogonal to working precision
            for _ in 0..2 {
                for q in &cols_out {
                    let c = inner(q, &v);
                    for (x, y) in v.iter_mut().zip(q) {
                        *x -= *y * c;
                    }
                }
            }
            if norm(&v) < T::lit(1e-8) {
                ok = false;
                break;
            }
            cols_out.push(normalize(&v));
        }
        if ok {
            return Matrix::from_columns(&cols_out).expect("columns share a length");
        }
    }
}

pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix<T> {
    isometry(rng, d, d)
}

/// Weights drawn from the uniform measure on the probability simplex.
pub fn simplex_weights<T: Real, R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|&x| T::lit(x / total)).collect()
}

/// Density matrix `G G* / Tr(G G*)` with `G` a `d × rank` Ginibre matrix.
pub fn density<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> Matrix<T> {
    let g = ginibre::<T, _>(rng, d, rank.max(1));
    let p = g.matmul(&g.adjoint());
    let tr = p.trace().re;
    p.scale_real(T::one() / tr).hermitian_part()
}

/// `k` components with sphere-uniform factors and simplex-uniform weights.
pub fn ensemble<T: Real, R: Rng + ?Sized>(rng: &mut R, dims: Dims, k: usize) -> Ensemble<T> {
    let weights = simplex_weights::<T, _>(rng, k);
    let comps = weights
        .into_iter()
        .map(|weight| {
            let pv = ProductVector::from_unit(unit_vector(rng, dims.m), unit_vector(rng, dims.n))
                .expect("sampled unit vectors");
            Component { weight, pv }
        })
        .collect();
    Ensemble::with_normalized_weights(dims, comps).expect("positive weights")
}

/// Ensemble whose certificate margins (ray gap, smallest f singular value,
/// smallest weight) are all at least `margin`.
///
/// Weights are `margin + (1 − k·margin)·simplex`; vectors are resampled until
/// the geometric margins hold. Returns `None` if `k·margin ≥ 1`, `k > n`, or
/// 10 000 draws fail.
pub fn margin_ensemble<T: Real, R: Rng + ?Sized>(rng: &mut R, dims: Dims, k: usize, margin: T) -> Option<Ensemble<T>> {
    if k == 0 || k > dims.n || T::lit(k as f64) * margin >= T::one() {
        return None;
    }
    let free = T::one() - T::lit(k as f64) * margin;
    let weights: Vec<T> = simplex_weights::<T, _>(rng, k).into_iter().map(|w| margin + free * w).collect();
    let tol = Tolerance::default();
    for _ in 0..10_000 {
        let comps: Vec<Component<T>> = weights
            .iter()
            .map(|&weight| Component {
                weight,
                pv: ProductVector::from_unit(unit_vector(rng, dims.m), unit_vector(rng, dims.n))
                    .expect("sampled unit vectors"),
            })
            .collect();
        let ens = Ensemble::with_normalized_weights(dims, comps).ok()?;
        let cert = vk_certificate(&ens, &tol);
        if cert.ray_gap >= margin && cert.f_min_sv >= margin {
            return Some(ens);
        }
    }
    None
}

/// Moves every factor by a random vector of norm `eta_vec` (then renormalizes)
/// and every weight by a uniform amount in `[−eta_weight, eta_weight]` (then
/// renormalizes; weights are kept positive).
pub fn perturb_ensemble<T: Real, R: Rng + ?Sized>(rng: &mut R, ens: &Ensemble<T>, eta_vec: T, eta_weight: T) -> Ensemble<T> {
    let kick = |rng: &mut R, v: &[Cx<T>]| -> Vec<Cx<T>> {
        let d = unit_vector::<T, _>(rng, v.len());
        normalize(&v.iter().zip(&d).map(|(&x, &y)| x + y * eta_vec).collect::<Vec<_>>())
    };
    let comps = ens
        .components()
        .iter()
        .map(|c| {
            let e = kick(rng, c.pv.e());
            let f = kick(rng, c.pv.f());
            let shift = T::lit(rng.random_range(-1.0..=1.0)) * eta_weight;
            let weight = (c.weight + shift).max(c.weight * T::lit(0.5));
            Component { weight, pv: ProductVector::new(e, f).expect("perturbed factors are nonzero") }
        })
        .collect();
    Ensemble::with_normalized_weights(ens.dims(), comps).expect("positive weights")
}

/// Random generator word of length `0..=max_len`; swaps appear only when `m = n`.
pub fn word<T: Real, R: Rng + ?Sized>(rng: &mut R, dims: Dims, max_len: usize) -> AutomorphismWord<T> {
    let len = rng.random_range(0..=max_len);
    let kinds = if dims.m == dims.n { 4 } else { 3 };
    let gens = (0..len)
        .map(|_| match rng.random_range(0..kinds) {
            0 => Generator::LocalUnitary { u: haar_unitary(rng, dims.m), v: haar_unitary(rng, dims.n) },
            1 => Generator::PartialTranspose(Side::A),
            2 => Generator::PartialTranspose(Side::B),
            _ => Generator::Swap,
        })
        .collect();
    AutomorphismWord::new(dims, gens).expect("sampled generators are well formed")
}
