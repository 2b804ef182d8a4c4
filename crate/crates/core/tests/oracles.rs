//! Library results checked against values built by hand from index arithmetic.

use sepfact_core::decomposition::{certify_vk, length_bounds, product_vectors_in_subspace};
use sepfact_core::faces::face_of_ensemble;
use sepfact_core::numerics::eig_hermitian;
use sepfact_core::septests::{bell_diagonal, octahedron_check, ppt_test, Verdict};
use sepfact_core::states::{density_of, DensityMatrix, Ensemble};
use sepfact_core::{Cx, Dims, Matrix, Side, Tolerance};

type C = Cx<f64>;

fn c(re: f64) -> C {
    Cx::new(re, 0.0)
}

fn basis(d: usize, i: usize) -> Vec<C> {
    (0..d).map(|j| c(if i == j { 1.0 } else { 0.0 })).collect()
}

#[test]
fn transpose_of_maximally_entangled_3x3_is_a_third_of_swap() {
    let d = Dims::new(3, 3).unwrap();
    let phi: Vec<C> = (0..9).map(|i| c(if i % 4 == 0 { 1.0 / 3f64.sqrt() } else { 0.0 })).collect();
    let rho = DensityMatrix::pure(d, &phi).unwrap();
    // swap sends |i,k> (index 3i+k) to |k,i>
    let swap = Matrix::from_fn(9, 9, |r, s| c(if r == 3 * (s % 3) + s / 3 { 1.0 / 3.0 } else { 0.0 }));
    let pt = rho.partial_transpose(Side::A);
    assert!((&pt - &swap).frobenius_norm() < 1e-14);
    // swap has eigenvalues +1 (6 times) and -1 (3 times)
    let ev = eig_hermitian(&pt, &Tolerance::default()).unwrap().values;
    assert_eq!(ev.iter().filter(|&&v| (v - 1.0 / 3.0).abs() < 1e-12).count(), 6);
    assert_eq!(ev.iter().filter(|&&v| (v + 1.0 / 3.0).abs() < 1e-12).count(), 3);
}

#[test]
fn bell_diagonal_transpose_spectrum_is_half_minus_weights() {
    let tol = Tolerance::default();
    for p in [[0.6, 0.2, 0.1, 0.1], [0.25; 4], [0.5, 0.5, 0.0, 0.0], [0.1, 0.7, 0.2, 0.0]] {
        let r = ppt_test(&bell_diagonal(p).unwrap(), Side::A, &tol);
        let want = p.iter().map(|x| 0.5 - x).fold(f64::INFINITY, f64::min);
        assert!((r.min_eig_pt - want).abs() < 1e-12, "{p:?}");
        let verdict = if want >= -1e-12 { Verdict::Separable } else { Verdict::Entangled };
        assert_eq!(octahedron_check(p, &tol).unwrap(), verdict);
    }
}

#[test]
fn rays_at_45_degrees_have_gap_sin_45() {
    let s = 0.5f64.sqrt();
    let d = Dims::new(2, 3).unwrap();
    let ens = Ensemble::from_parts(
        d,
        vec![
            (0.4, basis(2, 0), basis(3, 0)),
            (0.3, vec![c(s), c(s)], basis(3, 1)),
            (0.3, basis(2, 1), basis(3, 2)),
        ],
    )
    .unwrap();
    let cert = certify_vk(&ens, &Tolerance::default()).unwrap();
    assert_eq!(cert.k, 3);
    assert!((cert.ray_gap - s).abs() < 1e-12);
    assert!((cert.f_min_sv - 1.0).abs() < 1e-12);
}

#[test]
fn octahedron_vertex_has_length_two() {
    let tol = Tolerance::default();
    let rho = bell_diagonal([0.5, 0.5, 0.0, 0.0]).unwrap();
    // (Φ+ Φ+* + Φ- Φ-*)/2 = diag(½, 0, 0, ½)
    let want = Matrix::diag(&[0.5, 0.0, 0.0, 0.5]);
    assert!((rho.matrix() - &want).frobenius_norm() < 1e-14);
    let lb = length_bounds(&rho, None, &tol, 0).unwrap();
    assert_eq!((lb.lower, lb.upper, lb.exact), (2, 2, Some(2)));
}

#[test]
fn oracle_finds_the_standard_product_rays() {
    let d = Dims::new(2, 2).unwrap();
    let v00 = basis(4, 0);
    let v11 = basis(4, 3);
    let found = product_vectors_in_subspace(&[v00, v11], d, &Tolerance::default(), 50, 1).unwrap();
    assert_eq!(found.len(), 2);
    let mut firsts: Vec<(usize, usize)> = found
        .iter()
        .map(|pv| {
            let i = pv.e().iter().position(|z| z.norm() > 0.5).unwrap();
            let k = pv.f().iter().position(|z| z.norm() > 0.5).unwrap();
            (i, k)
        })
        .collect();
    firsts.sort_unstable();
    assert_eq!(firsts, vec![(0, 0), (1, 1)]);
}

#[test]
fn planted_classes_give_expected_affine_dimension() {
    let d = Dims::new(3, 4).unwrap();
    let r1 = basis(3, 0);
    let r2 = vec![c(0.6), c(0.8), c(0.0)];
    let r3 = basis(3, 2);
    let ens = Ensemble::from_parts(
        d,
        vec![(0.25, r1.clone(), basis(4, 0)), (0.25, r1, basis(4, 1)), (0.25, r2, basis(4, 2)), (0.25, r3, basis(4, 3))],
    )
    .unwrap();
    let face = face_of_ensemble(&ens, &Tolerance::default()).unwrap();
    let mut dims: Vec<usize> = face.blocks.iter().map(|b| b.block_dim).collect();
    dims.sort_unstable();
    assert_eq!(dims, vec![1, 1, 2]);
    assert_eq!(face.affine_dim, 2 * 2 + 1 + 1 - 1);
    assert!((density_of(&ens).matrix().trace().re - 1.0).abs() < 1e-15);
}
