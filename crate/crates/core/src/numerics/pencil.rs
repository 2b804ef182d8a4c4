use super::eigh::jacobi_eigh;
use super::{creal, eig_general, normalize, svd, Cx, LinalgError, Matrix, Real, Tolerance};

/// Finite generalized eigenpairs `s1 w = θ s2 w`, sorted by `(Re θ, Im θ)`.
#[derive(Debug, Clone)]
pub struct PencilEigen<T> {
    pub values: Vec<Cx<T>>,
    /// Unit-norm eigenvectors aligned with `values`.
    pub vectors: Vec<Vec<Cx<T>>>,
}

/// Generalized eigenvectors of the pencil `(s1, s2)`, restricted to the numerical range of `s2`.
///
/// Hermitian pencils whose `s2` is semidefinite are reduced to an ordinary
/// Hermitian problem through the spectral square root of `s2`; anything else
/// goes through the pseudo-inverse reduction `Σ⁻¹ U* s1 V` and a general
/// eigensolver. Fails with [`LinalgError::DegeneratePencil`] when fewer than
/// `k` finite eigenvalues exist or two of them are not separated by more than
/// `eps_rank` (relative to `max(1, max|θ|)`).
pub fn pencil_eig<T: Real>(
    s1: &Matrix<T>,
    s2: &Matrix<T>,
    k: usize,
    tol: &Tolerance<T>,
) -> Result<PencilEigen<T>, LinalgError> {
    if !s1.is_square() {
        return Err(LinalgError::NotSquare { rows: s1.rows(), cols: s1.cols() });
    }
    if !s1.same_shape(s2) {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("{}x{}", s1.rows(), s1.cols()),
            actual: format!("{}x{}", s2.rows(), s2.cols()),
        });
    }
    if k == 0 || k > s1.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("1 <= k <= {}", s1.rows()),
            actual: format!("k = {k}"),
        });
    }

    let (mut values, mut vectors) = match definite_reduction(s1, s2, tol)? {
        Some(pairs) => pairs,
        None => general_reduction(s1, s2, tol)?,
    };
    if values.len() < k {
        return Err(LinalgError::DegeneratePencil {
            reason: format!("only {} finite eigenvalues, {k} required", values.len()),
        });
    }

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (values[i], values[j]);
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    values = order.iter().map(|&i| values[i]).collect();
    vectors = order.iter().map(|&i| normalize(&vectors[i])).collect();

    let scale = values.iter().fold(T::one(), |acc, z| acc.max(z.norm()));
    let mut min_gap = T::infinity();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            min_gap = min_gap.min((values[i] - values[j]).norm());
        }
    }
    if min_gap <= tol.eps_rank * scale {
        return Err(LinalgError::DegeneratePencil {
            reason: format!("eigenvalue separation {:e} below threshold", min_gap.as_f64()),
        });
    }
    values.truncate(k);
    vectors.truncate(k);
    Ok(PencilEigen { values, vectors })
}

type Pairs<T> = (Vec<Cx<T>>, Vec<Vec<Cx<T>>>);

fn definite_reduction<T: Real>(
    s1: &Matrix<T>,
    s2: &Matrix<T>,
    tol: &Tolerance<T>,
) -> Result<Option<Pairs<T>>, LinalgError> {
    let hermitian = |m: &Matrix<T>| m.hermitian_deviation() <= tol.eps_herm * m.frobenius_norm();
    if !(hermitian(s1) && hermitian(s2)) {
        return Ok(None);
    }
    let e2 = jacobi_eigh(s2.hermitian_part())?;
    let top = e2.values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if top == T::zero() {
        return Ok(Some((Vec::new(), Vec::new())));
    }
    let kept: Vec<usize> = (0..e2.values.len()).filter(|&j| e2.values[j].abs() > tol.eps_rank * top).collect();
    let positive = kept.iter().all(|&j| e2.values[j] > T::zero());
    let negative = kept.iter().all(|&j| e2.values[j] < T::zero());
    if !(positive || negative) {
        return Ok(None);
    }
    let sign = if positive { T::one() } else { -T::one() };
    let n = s2.rows();
    let r = kept.len();
    // B = W_r |Λ_r|^{-1/2}
    let b = Matrix::from_fn(n, r, |i, c| {
        let j = kept[c];
        e2.vectors[(i, j)] / e2.values[j].abs().sqrt()
    });
    let m = b.adjoint().matmul(&s1.hermitian_part()).matmul(&b);
    let em = jacobi_eigh(m.hermitian_part())?;
    let values = em.values.iter().map(|&t| creal(t * sign)).collect();
    let vectors = (0..r).map(|c| b.mul_vec(&em.vector(c))).collect();
    Ok(Some((values, vectors)))
}

fn general_reduction<T: Real>(
    s1: &Matrix<T>,
    s2: &Matrix<T>,
    tol: &Tolerance<T>,
) -> Result<Pairs<T>, LinalgError> {
    let d = svd(s2)?;
    let r = d.rank(tol);
    if r == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let n = s2.rows();
    let ur = Matrix::from_fn(n, r, |i, j| d.u[(i, j)] / d.s[j]);
    let vr = Matrix::from_fn(n, r, |i, j| d.v[(i, j)]);
    let reduced = ur.adjoint().matmul(s1).matmul(&vr);
    let (values, z) = eig_general(&reduced)?;
    let vectors = (0..r).map(|c| vr.mul_vec(&z.column(c))).collect();
    Ok((values, vectors))
}
