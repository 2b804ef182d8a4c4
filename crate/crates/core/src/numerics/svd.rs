use super::eigh::{jacobi_rotation, rotate_cols};
use super::{czero, inner, Cx, LinalgError, Matrix, Real, Tolerance};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(s) V*`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// `rows × r` left singular vectors (columns), `r = min(rows, cols)`.
    pub u: Matrix<T>,
    /// Singular values, nonincreasing.
    pub s: Vec<T>,
    /// `cols × r` right singular vectors (columns).
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    /// Number of singular values above `eps_rank` times the largest one.
    pub fn rank(&self, tol: &Tolerance<T>) -> usize {
        match self.s.first() {
            Some(&s0) if s0 > T::zero() => self.s.iter().filter(|&&x| x > tol.eps_rank * s0).count(),
            _ => 0,
        }
    }

    pub fn smallest(&self) -> T {
        self.s.last().copied().unwrap_or_else(T::zero)
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(a: &Matrix<T>) -> Result<Svd<T>, LinalgError> {
    if a.rows() < a.cols() {
        let t = one_sided_jacobi(a.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    one_sided_jacobi(a.clone())
}

fn one_sided_jacobi<T: Real>(mut w: Matrix<T>) -> Result<Svd<T>, LinalgError> {
    let (m, n) = (w.rows(), w.cols());
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    // columns at roundoff level carry no singular value worth resolving
    let negligible = (eps * w.frobenius_norm()).powi(2);

    let mut converged = n < 2;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        sweep += 1;
        converged = true;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let wp = w.column(p);
                let wq = w.column(q);
                let alpha = inner(&wp, &wp).re;
                let beta = inner(&wq, &wq).re;
                let gamma = inner(&wp, &wq);
                if gamma.norm() <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                converged = false;
                if let Some(g) = jacobi_rotation(alpha, beta, gamma) {
                    rotate_cols(&mut w, p, q, &g);
                    rotate_cols(&mut v, p, q, &g);
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<T> = (0..n).map(|j| super::norm(&w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite singular values"));
    let s: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let u = Matrix::from_fn(m, n, |i, c| {
        let j = order[c];
        if norms[j] > T::zero() { w[(i, j)] / norms[j] } else { czero() }
    });
    let v = Matrix::from_fn(n, n, |i, c| v[(i, order[c])]);
    Ok(Svd { u, s, v })
}

/// Numerical rank: singular values above `eps_rank` times the largest; 0 for the zero matrix.
pub fn rank_svd<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> usize {
    svd(a).map(|d| d.rank(tol)).unwrap_or(0)
}

/// Orthonormal basis of the span of `vectors` (numerical rank at `eps_rank`).
pub fn orthonormal_basis<T: Real>(
    vectors: &[Vec<Cx<T>>],
    tol: &Tolerance<T>,
) -> Result<Vec<Vec<Cx<T>>>, LinalgError> {
    let a = Matrix::from_columns(vectors)?;
    let d = svd(&a)?;
    let r = d.rank(tol);
    Ok((0..r).map(|j| d.u.column(j)).collect())
}

/// Moore–Penrose pseudo-inverse with singular values cut at `eps_rank`.
pub fn pinv<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>, LinalgError> {
    let d = svd(a)?;
    let r = d.rank(tol);
    let vs = Matrix::from_fn(a.cols(), r, |i, j| d.v[(i, j)] / d.s[j]);
    let ur = Matrix::from_fn(a.rows(), r, |i, j| d.u[(i, j)]);
    Ok(vs.matmul(&ur.adjoint()))
}
