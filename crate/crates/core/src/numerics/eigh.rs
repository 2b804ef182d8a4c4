use super::{creal, czero, Cx, LinalgError, Matrix, Real, Tolerance};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = V diag(values) V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Eigenvalues in nonincreasing order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, aligned with `values`.
    pub vectors: Matrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, j: usize) -> Vec<Cx<T>> {
        self.vectors.column(j)
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.values.len();
        let scaled = Matrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled.matmul(&self.vectors.adjoint())
    }

    pub fn min_value(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eig_hermitian<T: Real>(
    a: &Matrix<T>,
    tol: &Tolerance<T>,
) -> Result<HermitianEigen<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let dev = a.hermitian_deviation();
    if dev > tol.eps_herm * a.frobenius_norm() {
        return Err(LinalgError::NotHermitian { deviation: dev.as_f64() });
    }
    jacobi_eigh(a.hermitian_part())
}

pub(crate) fn jacobi_eigh<T: Real>(mut a: Matrix<T>) -> Result<HermitianEigen<T>, LinalgError> {
    let n = a.rows();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let target = T::epsilon() * scale;

    let mut converged = n < 2 || scale == T::zero();
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        sweep += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let mut off = T::zero();
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        converged = off.sqrt() <= target;
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Unitary `G` (entries `g00, g01, g10, g11`) such that `G* [[app, apq], [conj(apq), aqq]] G`
/// is diagonal. `None` when `apq` is already zero.
pub(super) fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: Cx<T>) -> Option<[Cx<T>; 4]> {
    let mag = apq.norm();
    if mag == T::zero() {
        return None;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() { -t } else { t }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
    Some([creal(c), creal(s), phase.conj() * (-s), phase.conj() * c])
}

/// Right-multiplies columns `p, q` of `m` by `G`.
pub(super) fn rotate_cols<T: Real>(m: &mut Matrix<T>, p: usize, q: usize, g: &[Cx<T>; 4]) {
    for k in 0..m.rows() {
        let x = m[(k, p)];
        let y = m[(k, q)];
        m[(k, p)] = x * g[0] + y * g[2];
        m[(k, q)] = x * g[1] + y * g[3];
    }
}

/// Annihilates `a[p,q]` with a unitary rotation `G`, `a ← G* a G`, `v ← v G`.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let Some(g) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, a[(p, q)]) else {
        return;
    };
    rotate_cols(a, p, q, &g);
    for k in 0..a.cols() {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = g[0].conj() * x + g[2].conj() * y;
        a[(q, k)] = g[1].conj() * x + g[3].conj() * y;
    }
    a[(p, q)] = czero();
    a[(q, p)] = czero();
    a[(p, p)] = creal(a[(p, p)].re);
    a[(q, q)] = creal(a[(q, q)].re);
    rotate_cols(v, p, q, &g);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cx;

    fn hermitian_sample(n: usize, seed: u64) -> Matrix<f64> {
        // xorshift-style deterministic entries, independent of the rand stack
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = Matrix::from_fn(n, n, |_, _| cx(next(), next()));
        (&g + &g.adjoint()).scale_real(0.5)
    }

    #[test]
    fn diagonal_sorted_descending() {
        let tol = Tolerance::default();
        let e = eig_hermitian(&Matrix::<f64>::diag(&[3.0, 1.0, 2.0]), &tol).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn degenerate_half_identity() {
        let tol = Tolerance::default();
        let e = eig_hermitian(&Matrix::<f64>::identity(2).scale_real(0.5), &tol).unwrap();
        assert_eq!(e.values, vec![0.5, 0.5]);
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        assert!((&vv - &Matrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let tol = Tolerance::default();
        for seed in 1..8 {
            let a = hermitian_sample(6, seed);
            let e = eig_hermitian(&a, &tol).unwrap();
            assert!((&e.reconstruct() - &a).frobenius_norm() <= 1e-12 * a.frobenius_norm().max(1.0));
            let vv = e.vectors.adjoint().matmul(&e.vectors);
            assert!((&vv - &Matrix::identity(6)).frobenius_norm() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn f32_reconstructs() {
        let a64 = hermitian_sample(4, 3);
        let a = Matrix::<f32>::from_fn(4, 4, |i, j| {
            let z = a64[(i, j)];
            cx(z.re as f32, z.im as f32)
        });
        let e = eig_hermitian(&a, &Tolerance::default()).unwrap();
        assert!((&e.reconstruct() - &a).frobenius_norm() < 1e-5);
    }

    #[test]
    fn rejects_bad_input() {
        let tol = Tolerance::default();
        let rect = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(eig_hermitian(&rect, &tol), Err(LinalgError::NotSquare { .. })));
        let mut a = Matrix::<f64>::identity(2);
        a[(0, 1)] = cx(1.0, 0.0);
        assert!(matches!(eig_hermitian(&a, &tol), Err(LinalgError::NotHermitian { .. })));
    }
}
