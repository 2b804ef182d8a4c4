use super::{cone, creal, czero, norm, Cx, LinalgError, Matrix, Real};

const MAX_ITERS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues and unit eigenvectors (as columns) of a general square complex matrix.
///
/// Hessenberg reduction followed by single-shift QR to complex Schur form, then
/// back substitution on the triangular factor.
pub fn eig_general<T: Real>(a: &Matrix<T>) -> Result<(Vec<Cx<T>>, Matrix<T>), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let (mut h, mut q) = hessenberg(a);
    schur_qr(&mut h, &mut q)?;

    let values: Vec<Cx<T>> = (0..n).map(|i| h[(i, i)]).collect();
    let small = T::epsilon() * h.frobenius_norm().max(T::min_positive_value());
    let mut vectors = Matrix::zeros(n, n);
    for k in 0..n {
        let lambda = h[(k, k)];
        let mut x = vec![czero(); n];
        x[k] = cone();
        for j in (0..k).rev() {
            let mut acc: Cx<T> = czero();
            for l in j + 1..=k {
                acc += h[(j, l)] * x[l];
            }
            let mut d = h[(j, j)] - lambda;
            if d.norm() < small {
                d = creal(small);
            }
            x[j] = -acc / d;
        }
        let v = q.mul_vec(&x);
        let nv = norm(&v);
        for i in 0..n {
            vectors[(i, k)] = v[i] / nv;
        }
    }
    Ok((values, vectors))
}

/// Householder reduction `A = Q H Q*` with `H` upper Hessenberg.
fn hessenberg<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Cx<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xn = norm(&x);
        if xn == T::zero() {
            continue;
        }
        let phase = if x[0].norm() > T::zero() { x[0] / x[0].norm() } else { cone() };
        let mut v = x.clone();
        v[0] += phase * xn;
        let vn = norm(&v);
        if vn == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vn;
        }
        // H ← P H P with P = I − 2 v v* acting on rows/cols k+1..n
        for j in 0..n {
            let mut s: Cx<T> = czero();
            for (t, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + t, j)];
            }
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= *vi * s * T::lit(2.0);
            }
        }
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let mut s: Cx<T> = czero();
                for (t, vi) in v.iter().enumerate() {
                    s += mat[(i, k + 1 + t)] * *vi;
                }
                for (t, vi) in v.iter().enumerate() {
                    mat[(i, k + 1 + t)] -= s * vi.conj() * T::lit(2.0);
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    (h, q)
}

/// Givens parameters `(c, s)` with `[[c, s], [-conj(s), c]] · [a; b] = [r; 0]`.
fn givens<T: Real>(a: Cx<T>, b: Cx<T>) -> (T, Cx<T>) {
    let an = a.norm();
    let r = (an * an + b.norm_sqr()).sqrt();
    if r == T::zero() {
        return (T::one(), czero());
    }
    if an == T::zero() {
        return (T::zero(), b.conj() / b.norm());
    }
    (an / r, (a / an) * b.conj() / r)
}

fn schur_qr<T: Real>(h: &mut Matrix<T>, q: &mut Matrix<T>) -> Result<(), LinalgError> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iters = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // deflation scan
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let scale = if diag > T::zero() { diag } else { h.frobenius_norm() };
            if sub <= eps * scale {
                h[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iters = 0;
            continue;
        }
        iters += 1;
        total += 1;
        if total > MAX_ITERS_PER_EIGENVALUE * n {
            return Err(LinalgError::NoConvergence { sweeps: total });
        }

        let shift = if iters % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + creal(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -(s.conj() * x) + y * c;
            }
            rots.push((c, s));
        }
        for (idx, k) in (lo..hi).enumerate() {
            let (c, s) = rots[idx];
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -(x * s) + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -(x * s) + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Cx<T> {
    let half = T::lit(0.5);
    let tr = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() { l1 } else { l2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cx;

    fn sample(n: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        Matrix::from_fn(n, n, |_, _| cx(next(), next()))
    }

    #[test]
    fn eigenpairs_satisfy_residual() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (9, 4), (16, 5)] {
            let a = sample(n, seed);
            let (vals, vecs) = eig_general(&a).unwrap();
            for k in 0..n {
                let v = vecs.column(k);
                let av = a.mul_vec(&v);
                let r: f64 = av.iter().zip(&v).map(|(&x, &y)| (x - vals[k] * y).norm_sqr()).sum();
                assert!(r.sqrt() < 1e-11, "n={n} k={k} residual {}", r.sqrt());
            }
        }
    }

    #[test]
    fn real_rotation_has_conjugate_pair() {
        let a = Matrix::<f64>::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let (mut vals, _) = eig_general(&a).unwrap();
        vals.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((vals[0] - cx(0.0, -1.0)).norm() < 1e-14);
        assert!((vals[1] - cx(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn triangular_input_keeps_diagonal() {
        let a = Matrix::<f64>::from_real(3, 3, &[1.0, 4.0, 5.0, 0.0, 2.0, 6.0, 0.0, 0.0, 3.0]).unwrap();
        let (mut vals, _) = eig_general(&a).unwrap();
        vals.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (v, want) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - cx(want, 0.0)).norm() < 1e-13);
        }
    }
}
