//! Partial-transpose test and the Bell-diagonal family of two qubits.

use thiserror::Error;

use crate::numerics::{eig_hermitian, Cx, Matrix, Real, Tolerance};
use crate::states::{partial_transpose, unit_slack, DensityMatrix, Dims, Side};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SepTestError {
    #[error("invalid Bell weights: {0}")]
    InvalidWeights(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport<T> {
    pub side: Side,
    pub min_eig_pt: T,
    pub passes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Separable,
    Entangled,
}

/// Smallest eigenvalue of the partial transpose; passes iff it is `≥ −eps_herm`.
///
/// Passing is necessary for separability in every dimension and sufficient for
/// `2⊗2`, `2⊗3` and `3⊗2`.
pub fn ppt_test<T: Real>(rho: &DensityMatrix<T>, side: Side, tol: &Tolerance<T>) -> PptReport<T> {
    let pt = partial_transpose(rho, side).hermitian_part();
    let min_eig_pt = eig_hermitian(&pt, tol).expect("partial transpose of a state is Hermitian").min_value();
    PptReport { side, min_eig_pt, passes: min_eig_pt >= -tol.eps_herm }
}

/// The Bell vectors in the order Φ+, Φ−, Ψ+, Ψ−.
///
/// `Φ± = (|00⟩ ± |11⟩)/√2`, `Ψ± = (|01⟩ ± |10⟩)/√2`.
pub fn bell_vectors<T: Real>() -> [Vec<Cx<T>>; 4] {
    let h = T::one() / T::lit(2.0).sqrt();
    let z = T::zero();
    let v = |a: T, b: T, c: T, d: T| vec![Cx::new(a, z), Cx::new(b, z), Cx::new(c, z), Cx::new(d, z)];
    [v(h, z, z, h), v(h, z, z, -h), v(z, h, h, z), v(z, h, -h, z)]
}

fn check_weights<T: Real>(p: &[T; 4]) -> Result<(), SepTestError> {
    if let Some((i, w)) = p.iter().enumerate().find(|(_, w)| !(**w >= T::zero()) || !w.is_finite()) {
        return Err(SepTestError::InvalidWeights(format!("p[{i}] = {w} is negative or not finite")));
    }
    let sum = p.iter().fold(T::zero(), |a, &b| a + b);
    if (sum - T::one()).abs() > unit_slack(1e-10) {
        return Err(SepTestError::InvalidWeights(format!("weights sum to {sum}")));
    }
    Ok(())
}

/// `Σ p_i |β_i⟩⟨β_i|` over the Bell basis.
pub fn bell_diagonal<T: Real>(p: [T; 4]) -> Result<DensityMatrix<T>, SepTestError> {
    check_weights(&p)?;
    let mut mat = Matrix::zeros(4, 4);
    for (w, b) in p.iter().zip(bell_vectors::<T>()) {
        for i in 0..4 {
            for j in 0..4 {
                mat[(i, j)] += b[i] * b[j].conj() * *w;
            }
        }
    }
    Ok(DensityMatrix::from_trusted(Dims { m: 2, n: 2 }, mat))
}

/// Separable iff `max p_i ≤ ½` (up to `eps_herm`).
///
/// The partial transpose of a Bell-diagonal state has eigenvalues `½ − p_i`,
/// so this is exactly the partial-transpose test for the family.
pub fn octahedron_check<T: Real>(p: [T; 4], tol: &Tolerance<T>) -> Result<Verdict, SepTestError> {
    check_weights(&p)?;
    let max = p.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok(if max <= T::lit(0.5) + tol.eps_herm { Verdict::Separable } else { Verdict::Entangled })
}

/// The six weight vectors with two entries equal to ½.
pub fn octahedron_vertices<T: Real>() -> Vec<[T; 4]> {
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            let mut p = [T::zero(); 4];
            p[i] = T::lit(0.5);
            p[j] = T::lit(0.5);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn bell_projector_fails_ppt() {
        let rho = bell_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap();
        for side in [Side::A, Side::B] {
            let r = ppt_test(&rho, side, &tol());
            assert!(!r.passes);
            assert!((r.min_eig_pt + 0.5).abs() < 1e-14);
        }
        assert_eq!(octahedron_check([1.0, 0.0, 0.0, 0.0], &tol()).unwrap(), Verdict::Entangled);
    }

    #[test]
    fn uniform_mixture_is_maximally_mixed() {
        let rho = bell_diagonal([0.25; 4]).unwrap();
        assert!((rho.matrix() - &Matrix::identity(4).scale_real(0.25)).frobenius_norm() < 1e-15);
        let r = ppt_test(&rho, Side::A, &tol());
        assert!(r.passes && (r.min_eig_pt - 0.25).abs() < 1e-14);
    }

    #[test]
    fn marginals_are_maximally_mixed() {
        let rho = bell_diagonal([0.1, 0.2, 0.3, 0.4]).unwrap();
        for side in [Side::A, Side::B] {
            let r = rho.marginal(side);
            assert!((r.matrix() - &Matrix::identity(2).scale_real(0.5)).frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn vertices_and_interior_points() {
        for p in octahedron_vertices::<f64>() {
            assert!(ppt_test(&bell_diagonal(p).unwrap(), Side::A, &tol()).passes);
            assert_eq!(octahedron_check(p, &tol()).unwrap(), Verdict::Separable);
        }
        let p = [0.6, 0.2, 0.1, 0.1];
        assert_eq!(octahedron_check(p, &tol()).unwrap(), Verdict::Entangled);
        let r = ppt_test(&bell_diagonal(p).unwrap(), Side::A, &tol());
        assert!(!r.passes && (r.min_eig_pt + 0.1).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(bell_diagonal([0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(bell_diagonal([0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(octahedron_check([f64::NAN, 0.5, 0.5, 0.0], &tol()).is_err());
    }
}
