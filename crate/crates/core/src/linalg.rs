//! Small dense complex linear algebra.
//!
//! Only what the downlink model needs: products, conjugate transposes, norms,
//! and the right pseudo-inverse behind zero-forcing. Matrices are row-major.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Pivots smaller than this fraction of the largest row norm are treated as zero.
pub const SINGULARITY_RTOL: f64 = 1e-12;

/// Non-empty dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<T> {
    entries: Vec<Complex<T>>,
}

impl<T: Real> Vector<T> {
    pub fn new(entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("vector length must be positive"));
        }
        Ok(Self { entries })
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "vector length must be positive");
        Self {
            entries: vec![Complex::zero(); len],
        }
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Complex<T>) -> Self {
        assert!(len > 0, "vector length must be positive");
        Self {
            entries: (0..len).map(f).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex<T>> {
        self.entries.iter()
    }

    pub fn into_inner(self) -> Vec<Complex<T>> {
        self.entries
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        vec_norm2(self)
    }

    /// Unconjugated product `sum_i self[i] * other[i]`, i.e. a row vector times a column.
    pub fn dotu(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.len(), other.len());
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn conj(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = *a + b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, i: usize) -> &Complex<T> {
        &self.entries[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut Complex<T> {
        &mut self.entries[i]
    }
}

/// Dense row-major complex matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "Matrix::new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Stacks equal-length vectors as rows.
    pub fn from_rows(rows: &[Vector<T>]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::invalid("no rows"))?;
        let cols = first.len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    op: "Matrix::from_rows",
                    left: (0, cols),
                    right: (i, r.len()),
                });
            }
            data.extend_from_slice(r.as_slice());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds `diag(entries)`.
    pub fn diag(entries: &[Complex<T>]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex::zero() })
    }

    /// Outer product `a * b^H`.
    pub fn outer_conj(a: &Vector<T>, b: &Vector<T>) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector::from_fn(self.rows, |i| self[(i, j)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        matmul(self, other)
    }

    pub fn hermitian(&self) -> Self {
        hermitian(self)
    }

    /// Row vector `v^T * self` for a length-`rows` vector `v`.
    pub fn left_mul_row(&self, v: &[Complex<T>]) -> Vector<T> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![Complex::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + vi * a;
            }
        }
        Vector { entries: out }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Entry-wise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "sub",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Inverse of a square matrix by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                op: "inverse",
                left: self.shape(),
                right: (self.cols, self.rows),
            });
        }
        let n = self.rows;
        let scale = (0..n)
            .map(|i| self.row(i).iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
            .fold(T::zero(), T::max);
        let threshold = T::lit(SINGULARITY_RTOL) * scale;

        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, T::lit(-1.0)), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_mag >= threshold) || pivot_mag.is_zero() {
                return Err(Error::Singular {
                    pivot: pivot_mag.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let p_inv = a[col * n + col].inv();
            for j in 0..n {
                a[col * n + j] = a[col * n + j] * p_inv;
                inv[col * n + j] = inv[col * n + j] * p_inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[col * n + j], inv[col * n + j]);
                    a[r * n + j] = a[r * n + j] - factor * ac;
                    inv[r * n + j] = inv[r * n + j] - factor * ic;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: n,
            data: inv,
        })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

pub fn matmul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, aik) in a.row(i).iter().enumerate() {
            for (o, bkj) in out_row.iter_mut().zip(b.row(k)) {
                *o = *o + aik * bkj;
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn hermitian<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.cols, a.rows, |i, j| a[(j, i)].conj())
}

/// `H^H (H H^H)^{-1}` for a wide matrix with full row rank.
///
/// Fails with [`Error::Singular`] when `H H^H` has a pivot below
/// [`SINGULARITY_RTOL`] times its largest row norm.
pub fn right_pseudo_inverse<T: Real>(h: &Matrix<T>) -> Result<Matrix<T>> {
    if h.rows > h.cols {
        return Err(Error::DimensionMismatch {
            op: "right_pseudo_inverse",
            left: h.shape(),
            right: (h.cols, h.rows),
        });
    }
    let hh = hermitian(h);
    let gram = matmul(h, &hh)?;
    matmul(&hh, &gram.inverse()?)
}

pub fn vec_norm2<T: Real>(v: &Vector<T>) -> T {
    // scaled accumulation so tiny path-loss-scaled channels do not underflow in f32
    let max = v.iter().map(|z| z.re.abs().max(z.im.abs())).fold(T::zero(), T::max);
    if max.is_zero() {
        return T::zero();
    }
    let s: T = v.iter().map(|z| (z / max).norm_sqr()).sum();
    max * s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
        Matrix::from_fn(rows, cols, |_, _| c(f64::std_normal(rng), f64::std_normal(rng)))
    }

    fn naive_product(a: &Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = c(0.0, 0.0);
                for k in 0..a.cols() {
                    acc += a[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn identity_times_m() {
        let m = Matrix::new(2, 2, vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, -1.0), c(4.0, 4.0)]).unwrap();
        assert_eq!(matmul(&Matrix::identity(2), &m).unwrap(), m);
    }

    #[test]
    fn i_squared() {
        let i = Matrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(matmul(&i, &i).unwrap()[(0, 0)], c(-1.0, 0.0));
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 3, 3);
        let b = random_matrix(&mut rng, 3, 3);
        let fast = matmul(&a, &b).unwrap();
        let slow = naive_product(&a, &b);
        assert!(fast.sub(&slow).unwrap().frobenius_norm() <= 1e-12 * slow.frobenius_norm());
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(matmul(&a, &a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constructors_reject_empty() {
        assert!(Matrix::<f64>::new(0, 2, vec![]).is_err());
        assert!(Matrix::<f64>::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(Vector::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn hermitian_cases() {
        let sym = Matrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert_eq!(hermitian(&sym), sym);
        let i = Matrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(hermitian(&i)[(0, 0)], c(0.0, -1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(&mut rng, 3, 5);
        assert_eq!(hermitian(&hermitian(&m)), m);
    }

    #[test]
    fn pinv_identity() {
        let w = right_pseudo_inverse(&Matrix::<f64>::identity(3)).unwrap();
        assert!(w.sub(&Matrix::identity(3)).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn pinv_diagonal() {
        let h = Matrix::from_fn(2, 3, |i, j| match (i, j) {
            (0, 0) => c(2.0, 0.0),
            (1, 1) => c(4.0, 0.0),
            _ => c(0.0, 0.0),
        });
        let w = right_pseudo_inverse(&h).unwrap();
        let expect = Matrix::from_fn(3, 2, |i, j| match (i, j) {
            (0, 0) => c(0.5, 0.0),
            (1, 1) => c(0.25, 0.0),
            _ => c(0.0, 0.0),
        });
        assert!(w.sub(&expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn pinv_residual_random_4x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = random_matrix(&mut rng, 4, 8);
        let w = right_pseudo_inverse(&h).unwrap();
        let resid = matmul(&h, &w).unwrap().sub(&Matrix::identity(4)).unwrap();
        assert!(resid.frobenius_norm() < 1e-9);
    }

    #[test]
    fn pinv_singular_reports_pivot() {
        // two identical rows
        let h = Matrix::new(2, 2, vec![c(1.0, 1.0), c(2.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)]).unwrap();
        match right_pseudo_inverse(&h) {
            Err(Error::Singular { pivot, threshold }) => {
                assert!(pivot < threshold);
                assert!(threshold > 0.0);
            }
            other => panic!("expected singular error, got {other:?}"),
        }
        assert!(matches!(
            right_pseudo_inverse(&Matrix::<f64>::zeros(3, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pinv_is_scale_relative() {
        // a well-conditioned but tiny matrix must not trip the singularity check
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_matrix(&mut rng, 3, 6).scale(1e-9);
        let w = right_pseudo_inverse(&h).unwrap();
        let resid = matmul(&h, &w).unwrap().sub(&Matrix::identity(3)).unwrap();
        assert!(resid.frobenius_norm() < 1e-9);
    }

    #[test]
    fn norms() {
        assert_eq!(vec_norm2(&Vector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap()), 1.0);
        let v = Vector::new(vec![c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
        assert!((vec_norm2(&v) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(vec_norm2(&Vector::new(vec![c(3.0, 4.0)]).unwrap()), 5.0);
        assert_eq!(vec_norm2(&Vector::<f64>::zeros(4)), 0.0);
        let tiny = Vector::new(vec![Complex::new(3e-30_f32, 4e-30)]).unwrap();
        assert!((vec_norm2(&tiny) / 5e-30 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn f32_pinv() {
        let h = Matrix::<f32>::from_fn(2, 3, |i, j| {
            Complex::new((i * 3 + j) as f32 + 1.0, if i == j { 1.0 } else { 0.0 })
        });
        let w = right_pseudo_inverse(&h).unwrap();
        let resid = matmul(&h, &w).unwrap().sub(&Matrix::identity(2)).unwrap();
        assert!(resid.frobenius_norm() < 1e-4);
    }
}
