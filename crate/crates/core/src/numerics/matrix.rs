use std::ops::{Add, Index, IndexMut, Mul, Sub};

use super::{cone, creal, czero, Cx, LinalgError, Real};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> Matrix<T> {
    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{rows}x{cols} with positive sides"),
                actual: format!("{} entries", data.len()),
            });
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { cone() } else { czero() })
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { creal(values[i]) } else { czero() })
    }

    /// Matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, values: &[T]) -> Result<Self, LinalgError> {
        Self::new(rows, cols, values.iter().map(|&x| creal(x)).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Cx<T>>]) -> Result<Self, LinalgError> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if cols == 0 || rows == 0 || columns.iter().any(|c| c.len() != rows) {
            return Err(LinalgError::DimensionMismatch {
                expected: "non-empty columns of equal length".into(),
                actual: format!("{cols} columns"),
            });
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Cx<T>> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<Cx<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Cx<T>>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Frobenius norm of the anti-Hermitian part, `‖A − A*‖_F / 2`.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / T::lit(2.0)
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * T::lit(0.5))
    }

    pub fn mul_vec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(czero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * other * self^*`.
    pub fn conjugate_by(&self, other: &Self) -> Self {
        self.matmul(other).matmul(&self.adjoint())
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Copy of the rectangular block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Cx<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert!(self.same_shape(rhs), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert!(self.same_shape(rhs), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Kronecker product with `(i·rb + k, j·cb + l) ↦ a[i,j]·b[k,l]`.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (rb, cb) = (b.rows, b.cols);
    Matrix::from_fn(a.rows * rb, a.cols * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Kronecker product of vectors; the first factor is the slow index.
pub fn kron_vec<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Rank-one matrix `u v^*`.
pub fn outer<T: Real>(u: &[Cx<T>], v: &[Cx<T>]) -> Matrix<T> {
    Matrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// `M[i,j] = v[i·n + j]`; a product vector `e⊗f` reshapes to `e f^T`.
pub fn reshape_vec<T: Real>(v: &[Cx<T>], m: usize, n: usize) -> Result<Matrix<T>, LinalgError> {
    if m == 0 || n == 0 || v.len() != m * n {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("vector of length {m}*{n}"),
            actual: format!("length {}", v.len()),
        });
    }
    Matrix::new(m, n, v.to_vec())
}

/// Row-major flattening; inverse of [`reshape_vec`].
pub fn flatten<T: Real>(m: &Matrix<T>) -> Vec<Cx<T>> {
    m.data.clone()
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter().zip(b).fold(czero(), |acc, (&x, &y)| acc + x.conj() * y)
}

pub fn norm<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Unit vector along `v`; the zero vector is returned unchanged.
pub fn normalize<T: Real>(v: &[Cx<T>]) -> Vec<Cx<T>> {
    let n = norm(v);
    if n == T::zero() {
        return v.to_vec();
    }
    v.iter().map(|&z| z / n).collect()
}

/// Scales `v` by a unit phase so that its largest-magnitude entry is real and
/// positive. Near-ties resolve to the lowest index.
pub fn phase_normalize<T: Real>(v: &[Cx<T>]) -> Vec<Cx<T>> {
    let max = v.iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
    if max == T::zero() {
        return v.to_vec();
    }
    let cut = max * (T::one() - T::lit(1e-6));
    let pivot = v.iter().find(|z| z.norm() >= cut).copied().unwrap_or_else(cone);
    let phase = pivot.conj() / pivot.norm();
    v.iter().map(|&z| z * phase).collect()
}

/// Distance between the rays `[a]` and `[b]`, `√(1 − |⟨â, b̂⟩|²)`.
///
/// Evaluated as the norm of the component of `b̂` orthogonal to `â`, which is
/// accurate down to rounding even for nearly equal rays.
pub fn ray_distance<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> T {
    let a = normalize(a);
    let b = normalize(b);
    let overlap = inner(&a, &b);
    let resid: Vec<Cx<T>> = b.iter().zip(&a).map(|(&y, &x)| y - x * overlap).collect();
    norm(&resid).min(T::one())
}
