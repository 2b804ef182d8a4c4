//! Faces of the separable set generated by an ensemble, described block-wise.
//!
//! A face is stored as its blocks: an e-ray together with the subspace
//! `L = e ⊗ span{f_j}` of the members sharing that ray. Each block is a copy of
//! the state space of `B(L)` and the face is their direct convex sum.

use crate::decomposition::{coarse_decompose, DecompositionError};
use crate::numerics::{flatten, pinv, rank_svd, ray_distance, Cx, Matrix, Real, Tolerance};
use crate::states::{DensityMatrix, Dims, Ensemble, ProductVector};

#[derive(Debug, Clone)]
pub struct FaceBlock<T> {
    /// Phase-normalized representative of the block's e-ray.
    pub ray: Vec<Cx<T>>,
    /// The members' f vectors.
    pub f_basis: Vec<Vec<Cx<T>>>,
    /// Orthonormal basis of `e ⊗ span{f_j}`.
    pub l_basis: Vec<Vec<Cx<T>>>,
    pub block_dim: usize,
}

#[derive(Debug, Clone)]
pub struct BlockSimplexFace<T> {
    pub dims: Dims,
    pub blocks: Vec<FaceBlock<T>>,
    pub q: usize,
    /// `Σ d_i² − 1`.
    pub affine_dim: usize,
}

impl<T: Real> BlockSimplexFace<T> {
    /// All `L` bases side by side, as columns.
    pub fn stacked_basis(&self) -> Matrix<T> {
        let cols: Vec<Vec<Cx<T>>> = self.blocks.iter().flat_map(|b| b.l_basis.iter().cloned()).collect();
        Matrix::from_columns(&cols).expect("basis vectors share the dimension mn")
    }

    /// Numerical rank of [`BlockSimplexFace::stacked_basis`].
    pub fn stacked_rank(&self, tol: &Tolerance<T>) -> usize {
        rank_svd(&self.stacked_basis(), tol)
    }

    pub fn total_block_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.block_dim).sum()
    }
}

/// Relation between two pure product states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceRelation {
    Equal,
    /// Exactly one factor agrees: the generated face is a 3-ball.
    ThreeBall,
    /// Both factors differ: the generated face is a segment.
    Segment,
}

pub fn face_of_ensemble<T: Real>(ens: &Ensemble<T>, tol: &Tolerance<T>) -> Result<BlockSimplexFace<T>, DecompositionError> {
    let cd = coarse_decompose(ens, tol)?;
    let blocks: Vec<FaceBlock<T>> = cd
        .blocks
        .into_iter()
        .map(|b| FaceBlock { block_dim: b.f_members.len(), ray: b.ray, f_basis: b.f_members, l_basis: b.l_basis })
        .collect();
    let affine_dim = blocks.iter().map(|b| b.block_dim * b.block_dim).sum::<usize>() - 1;
    Ok(BlockSimplexFace { dims: cd.dims, q: blocks.len(), blocks, affine_dim })
}

pub fn is_simplex<T: Real>(face: &BlockSimplexFace<T>) -> bool {
    face.blocks.iter().all(|b| b.block_dim == 1)
}

pub fn face_relation<T: Real>(a: &ProductVector<T>, b: &ProductVector<T>, tol: &Tolerance<T>) -> FaceRelation {
    let same_e = ray_distance(a.e(), b.e()) <= tol.eps_rank;
    let same_f = ray_distance(a.f(), b.f()) <= tol.eps_rank;
    match (same_e, same_f) {
        (true, true) => FaceRelation::Equal,
        (false, false) => FaceRelation::Segment,
        _ => FaceRelation::ThreeBall,
    }
}

/// Block weights of `rho` if it lies in `face`, else `None`.
///
/// The blocks' subspaces are independent but generally not orthogonal, so the
/// block components are taken with the oblique projections `E_i` of the
/// direct sum `⊕ L_i` (`E_i` is the identity on `L_i` and kills the other
/// blocks). `rho` is in the face iff its support lies in `⊕ L_i` and
/// `Σ E_i ρ E_i* = ρ`, both within `eps_match` in Frobenius norm; the weights
/// are `Tr E_i ρ E_i*`.
pub fn face_contains<T: Real>(face: &BlockSimplexFace<T>, rho: &DensityMatrix<T>, tol: &Tolerance<T>) -> Option<Vec<T>> {
    if rho.dims() != face.dims {
        return None;
    }
    let b = face.stacked_basis();
    let b_pinv = pinv(&b, tol).ok()?;
    let a = rho.matrix();
    let p = b.matmul(&b_pinv);
    if (&p.matmul(a).matmul(&p.adjoint()) - a).frobenius_norm() > tol.eps_match {
        return None;
    }
    let d = face.dims.total();
    let mut sum = Matrix::zeros(d, d);
    let mut weights = Vec::with_capacity(face.q);
    let mut offset = 0;
    for blk in &face.blocks {
        let bi = b.block(0, offset, d, blk.block_dim);
        let rows = b_pinv.block(offset, 0, blk.block_dim, d);
        offset += blk.block_dim;
        let e = bi.matmul(&rows);
        let comp = e.matmul(a).matmul(&e.adjoint());
        weights.push(comp.trace().re);
        sum = &sum + &comp;
    }
    if (&sum - a).frobenius_norm() > tol.eps_match {
        return None;
    }
    Some(weights)
}

/// Rank of the `p × (mn)²` stack of flattened projectors `ω_{e_i ⊗ f_i}`.
pub fn projector_stack_rank<T: Real>(pvs: &[ProductVector<T>], tol: &Tolerance<T>) -> usize {
    if pvs.is_empty() {
        return 0;
    }
    let cols: Vec<Vec<Cx<T>>> = pvs.iter().map(|pv| flatten(&pv.projector())).collect();
    Matrix::from_columns(&cols).map(|m| rank_svd(&m, tol)).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::coarse_decompose;
    use crate::numerics::{cx, kron_vec};
    use crate::states::density_of;

    type C = Cx<f64>;

    fn basis(d: usize, i: usize) -> Vec<C> {
        (0..d).map(|k| if k == i { cx(1.0, 0.0) } else { cx(0.0, 0.0) }).collect()
    }

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn segment_and_ball() {
        let d = Dims::new(2, 2).unwrap();
        let seg = Ensemble::from_parts(d, vec![(0.5, basis(2, 0), basis(2, 0)), (0.5, basis(2, 1), basis(2, 1))]).unwrap();
        let f = face_of_ensemble(&seg, &tol()).unwrap();
        assert_eq!((f.q, f.affine_dim), (2, 1));
        assert!(is_simplex(&f));
        let ball = Ensemble::from_parts(d, vec![(0.5, basis(2, 0), basis(2, 0)), (0.5, basis(2, 0), basis(2, 1))]).unwrap();
        let f = face_of_ensemble(&ball, &tol()).unwrap();
        assert_eq!((f.q, f.affine_dim, f.blocks[0].block_dim), (1, 3, 2));
        assert!(!is_simplex(&f));
    }

    #[test]
    fn planted_classes_in_3x4() {
        let d = Dims::new(3, 4).unwrap();
        let r1 = vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)];
        let r2 = basis(3, 2);
        let r3 = vec![cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0)];
        let ens = Ensemble::from_parts(
            d,
            vec![
                (0.25, r1.clone(), basis(4, 0)),
                (0.25, r1, basis(4, 1)),
                (0.3, r2, basis(4, 2)),
                (0.2, r3, vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0)]),
            ],
        )
        .unwrap();
        let f = face_of_ensemble(&ens, &tol()).unwrap();
        let dims: Vec<usize> = f.blocks.iter().map(|b| b.block_dim).collect();
        assert_eq!(dims, vec![2, 1, 1]);
        assert_eq!(f.affine_dim, 5);
        assert_eq!(f.stacked_rank(&tol()), 4);
    }

    #[test]
    fn relation_cases() {
        let e = vec![cx(0.6, 0.0), cx(0.0, 0.8)];
        let a = ProductVector::new(e.clone(), basis(2, 0)).unwrap();
        let b = ProductVector::new(e.iter().map(|z| z * cx(0.0, 1.0)).collect(), basis(2, 1)).unwrap();
        let c = ProductVector::new(basis(2, 1), basis(2, 1)).unwrap();
        assert_eq!(face_relation(&a, &a, &tol()), FaceRelation::Equal);
        assert_eq!(face_relation(&a, &b, &tol()), FaceRelation::ThreeBall);
        assert_eq!(face_relation(&b, &a, &tol()), FaceRelation::ThreeBall);
        assert_eq!(face_relation(&a, &c, &tol()), FaceRelation::Segment);
    }

    #[test]
    fn containment() {
        let d = Dims::new(2, 3).unwrap();
        let e1 = vec![cx(1.0, 0.0), cx(0.5, 0.0)];
        let ens = Ensemble::from_parts(
            d,
            vec![(0.5, e1.clone(), basis(3, 0)), (0.2, e1.clone(), basis(3, 1)), (0.3, basis(2, 1), basis(3, 2))],
        )
        .unwrap();
        let face = face_of_ensemble(&ens, &tol()).unwrap();
        let gammas = face_contains(&face, &density_of(&ens), &tol()).unwrap();
        let cd = coarse_decompose(&ens, &tol()).unwrap();
        for (g, b) in gammas.iter().zip(&cd.blocks) {
            assert!((g - b.gamma).abs() < 1e-12);
        }
        let mixed = DensityMatrix::from_trusted(d, Matrix::<f64>::identity(6).scale_real(1.0 / 6.0));
        assert!(face_contains(&face, &mixed, &tol()).is_none());
        // e1 ⊗ g with g in the span of the first block's f vectors
        let g = vec![cx(0.6, 0.0), cx(0.0, 0.8), cx(0.0, 0.0)];
        let pure = DensityMatrix::pure(d, &kron_vec(&e1, &g)).unwrap();
        let w = face_contains(&face, &pure, &tol()).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && w[1].abs() < 1e-12);
        // a superposition across blocks is not in the face
        let mut psi = kron_vec(&e1, &basis(3, 0));
        for (p, q) in psi.iter_mut().zip(kron_vec(&basis(2, 1), &basis(3, 2))) {
            *p += q;
        }
        let cross = DensityMatrix::pure(d, &psi).unwrap();
        assert!(face_contains(&face, &cross, &tol()).is_none());
    }

    #[test]
    fn distinct_ray_projectors_are_independent() {
        let pvs: Vec<ProductVector<f64>> = (0..3)
            .map(|i| ProductVector::new(basis(2, i % 2), vec![cx(1.0, 0.0), cx(i as f64, 0.0), cx(0.0, 1.0)]).unwrap())
            .collect();
        assert_eq!(projector_stack_rank(&pvs, &tol()), 3);
        let dup = vec![pvs[0].clone(), pvs[0].clone()];
        assert_eq!(projector_stack_rank(&dup, &tol()), 1);
    }
}
