//! Dense linear algebra for small operators: row-major matrices over `f64` or
//! `Complex64`, Cholesky and LU factorizations, symmetric and nonsymmetric
//! eigensolvers, and the matrix exponential.
//!
//! The eigensolvers follow the EISPACK lineage: Householder tridiagonalization with
//! implicit QL for symmetric matrices, and Hessenberg reduction with shifted QR and
//! back-substitution for general real matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Field operations shared by `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        math::hypot(self.re, self.im)
    }
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.modulus()).sum::<f64>()).fold(0.0, f64::max)
    }
}

impl Mat<f64> {
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn to_complex(&self) -> Mat<Complex64> {
        self.map(Complex64::from)
    }

    pub fn symmetric_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Cholesky factor `A = L Lᵀ` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Mat<f64>,
}

impl Cholesky {
    pub fn factor(a: &Mat<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension { expected: a.rows(), got: a.cols() });
        }
        let n = a.rows();
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::Singular);
            }
            let d = math::sqrt(d);
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn l(&self) -> &Mat<f64> {
        &self.l
    }

    /// `L⁻¹ b`
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[(i, k)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// `L⁻ᵀ b`
    pub fn backward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// `A⁻¹ b`
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.backward(&self.forward(b))
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T = f64> {
    lu: Mat<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Mat<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension { expected: a.rows(), got: a.cols() });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, big) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if big == 0.0 || !big.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
                perm.swap(p, k);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == T::zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Mat<T> {
        let n = self.lu.rows();
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = self.solve(&e);
            e[j] = T::zero();
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a symmetric matrix.
pub fn symmetric_eigen(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    if !a.is_square() {
        return Err(Error::Dimension { expected: a.rows(), got: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let mut v = a.symmetric_part();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, v))
}

// Householder reduction to tridiagonal form; `v` accumulates the transformation.
fn tred2(v: &mut Mat<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = math::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), then sorts ascending.
fn tql2(v: &mut Mat<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::EigenIteration);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = math::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = math::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    // selection sort keeps the columns paired with their values
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for r in 0..n {
                let t = v[(r, i)];
                v[(r, i)] = v[(r, k)];
                v[(r, k)] = t;
            }
        }
    }
    Ok(())
}

/// Eigen-decomposition of a general real matrix.
///
/// Eigenvalue `k` is `re[k] + i im[k]`; complex pairs are adjacent with `im[k] > 0`
/// first. For a real eigenvalue column `k` of `vectors` is its eigenvector; for a pair
/// `(k, k+1)` the eigenvector of `re[k] + i im[k]` is `vectors[:,k] + i vectors[:,k+1]`.
#[derive(Debug, Clone)]
pub struct RealEigen {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl RealEigen {
    pub fn values(&self) -> Vec<Complex64> {
        self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect()
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&x| x == 0.0)
    }

    /// Eigenvectors as complex columns, one per eigenvalue.
    pub fn complex_vectors(&self) -> Mat<Complex64> {
        let n = self.re.len();
        let v = &self.vectors;
        let mut out = Mat::zeros(n, n);
        let mut k = 0;
        while k < n {
            if self.im[k] == 0.0 {
                for i in 0..n {
                    out[(i, k)] = Complex64::new(v[(i, k)], 0.0);
                }
                k += 1;
            } else {
                for i in 0..n {
                    out[(i, k)] = Complex64::new(v[(i, k)], v[(i, k + 1)]);
                    out[(i, k + 1)] = Complex64::new(v[(i, k)], -v[(i, k + 1)]);
                }
                k += 2;
            }
        }
        out
    }
}

/// Eigenvalues and eigenvectors of a general real square matrix.
pub fn real_eigen(a: &Mat<f64>) -> Result<RealEigen> {
    if !a.is_square() {
        return Err(Error::Dimension { expected: a.rows(), got: a.cols() });
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut v = Mat::identity(n);
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    if n > 0 {
        orthes(&mut h, &mut v);
        hqr2(&mut h, &mut v, &mut re, &mut im)?;
    }
    Ok(RealEigen { re, im, vectors: v })
}

// Orthogonal reduction to upper Hessenberg form, accumulating the transformation in `v`.
fn orthes(h: &mut Mat<f64>, v: &mut Mat<f64>) {
    let n = h.rows();
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[(i, m - 1)].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = math::sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }
    for m in (1..high).rev() {
        if h[(m, m - 1)] == 0.0 {
            continue;
        }
        for i in (m + 1)..=high {
            ort[i] = h[(i, m - 1)];
        }
        for j in m..=high {
            let mut g = 0.0;
            for i in m..=high {
                g += ort[i] * v[(i, j)];
            }
            g = (g / ort[m]) / h[(m, m - 1)];
            for i in m..=high {
                v[(i, j)] += g * ort[i];
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

// Shifted QR on the Hessenberg matrix to real Schur form, then back-substitution for
// the eigenvectors of the quasi-triangular factor, transformed back through `v`.
#[allow(clippy::many_single_char_names)]
fn hqr2(h: &mut Mat<f64>, v: &mut Mat<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.rows() as isize;
    let low: isize = 0;
    let high: isize = nn - 1;
    let eps = f64::EPSILON;
    let mut n = nn - 1;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut t, mut w, mut x, mut y);

    macro_rules! hm {
        ($i:expr, $j:expr) => {
            h[(($i) as usize, ($j) as usize)]
        };
    }
    macro_rules! vm {
        ($i:expr, $j:expr) => {
            v[(($i) as usize, ($j) as usize)]
        };
    }

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += hm!(i, j).abs();
        }
    }

    let mut iter = 0;
    let mut total_iter = 0usize;
    while n >= low {
        let mut l = n;
        while l > low {
            s = hm!(l - 1, l - 1).abs() + hm!(l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if hm!(l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }
        if l == n {
            // one root found
            hm!(n, n) += exshift;
            d[n as usize] = hm!(n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots found
            w = hm!(n, n - 1) * hm!(n - 1, n);
            p = (hm!(n - 1, n - 1) - hm!(n, n)) / 2.0;
            q = p * p + w;
            z = math::sqrt(q.abs());
            hm!(n, n) += exshift;
            hm!(n - 1, n - 1) += exshift;
            x = hm!(n, n);
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = hm!(n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = math::sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for j in (n - 1)..nn {
                    z = hm!(n - 1, j);
                    hm!(n - 1, j) = q * z + p * hm!(n, j);
                    hm!(n, j) = q * hm!(n, j) - p * z;
                }
                for i in 0..=n {
                    z = hm!(i, n - 1);
                    hm!(i, n - 1) = q * z + p * hm!(i, n);
                    hm!(i, n) = q * hm!(i, n) - p * z;
                }
                for i in low..=high {
                    z = vm!(i, n - 1);
                    vm!(i, n - 1) = q * z + p * vm!(i, n);
                    vm!(i, n) = q * vm!(i, n) - p * z;
                }
            } else {
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = hm!(n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = hm!(n - 1, n - 1);
                w = hm!(n, n - 1) * hm!(n - 1, n);
            }
            // exceptional shifts
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    hm!(i, i) -= x;
                }
                s = hm!(n, n - 1).abs() + hm!(n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = math::sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        hm!(i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total_iter += 1;
            if total_iter > 100 * nn as usize + 100 {
                return Err(Error::EigenIteration);
            }
            // look for two consecutive small sub-diagonal elements
            let mut m = n - 2;
            while m >= l {
                z = hm!(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / hm!(m + 1, m) + hm!(m, m + 1);
                q = hm!(m + 1, m + 1) - z - r - s;
                r = hm!(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if hm!(m, m - 1).abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (hm!(m - 1, m - 1).abs() + z.abs() + hm!(m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=n {
                hm!(i, i - 2) = 0.0;
                if i > m + 2 {
                    hm!(i, i - 3) = 0.0;
                }
            }
            // double QR step on rows l..n, columns m..n
            let mut k = m;
            while k < n {
                let notlast = k != n - 1;
                if k != m {
                    p = hm!(k, k - 1);
                    q = hm!(k + 1, k - 1);
                    r = if notlast { hm!(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = math::sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        hm!(k, k - 1) = -s * x;
                    } else if l != m {
                        hm!(k, k - 1) = -hm!(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = hm!(k, j) + q * hm!(k + 1, j);
                        if notlast {
                            p += r * hm!(k + 2, j);
                            hm!(k + 2, j) -= p * z;
                        }
                        hm!(k, j) -= p * x;
                        hm!(k + 1, j) -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * hm!(i, k) + y * hm!(i, k + 1);
                        if notlast {
                            p += z * hm!(i, k + 2);
                            hm!(i, k + 2) -= p * r;
                        }
                        hm!(i, k) -= p;
                        hm!(i, k + 1) -= p * q;
                    }
                    for i in low..=high {
                        p = x * vm!(i, k) + y * vm!(i, k + 1);
                        if notlast {
                            p += z * vm!(i, k + 2);
                            vm!(i, k + 2) -= p * r;
                        }
                        vm!(i, k) -= p;
                        vm!(i, k + 1) -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if norm == 0.0 {
        return Ok(());
    }

    // back-substitute to find vectors of the upper triangular form
    for n in (0..nn).rev() {
        p = d[n as usize];
        q = e[n as usize];
        if q == 0.0 {
            let mut l = n;
            hm!(n, n) = 1.0;
            for i in (0..n).rev() {
                w = hm!(i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += hm!(i, j) * hm!(j, n);
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        hm!(i, n) = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = hm!(i, i + 1);
                        y = hm!(i + 1, i);
                        q = (d[i as usize] - p) * (d[i as usize] - p) + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        hm!(i, n) = t;
                        hm!(i + 1, n) = if x.abs() > z.abs() { (-r - w * t) / x } else { (-s - y * t) / z };
                    }
                    t = hm!(i, n).abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            hm!(j, n) /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if hm!(n, n - 1).abs() > hm!(n - 1, n).abs() {
                hm!(n - 1, n - 1) = q / hm!(n, n - 1);
                hm!(n - 1, n) = -(hm!(n, n) - p) / hm!(n, n - 1);
            } else {
                let (cr, ci) = cdiv(0.0, -hm!(n - 1, n), hm!(n - 1, n - 1) - p, q);
                hm!(n - 1, n - 1) = cr;
                hm!(n - 1, n) = ci;
            }
            hm!(n, n - 1) = 0.0;
            hm!(n, n) = 1.0;
            for i in (0..(n - 1)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += hm!(i, j) * hm!(j, n - 1);
                    sa += hm!(i, j) * hm!(j, n);
                }
                w = hm!(i, i) - p;
                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        hm!(i, n - 1) = cr;
                        hm!(i, n) = ci;
                    } else {
                        x = hm!(i, i + 1);
                        y = hm!(i + 1, i);
                        let di = d[i as usize] - p;
                        let mut vr = di * di + e[i as usize] * e[i as usize] - q * q;
                        let vi = di * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        hm!(i, n - 1) = cr;
                        hm!(i, n) = ci;
                        if x.abs() > z.abs() + q.abs() {
                            hm!(i + 1, n - 1) = (-ra - w * hm!(i, n - 1) + q * hm!(i, n)) / x;
                            hm!(i + 1, n) = (-sa - w * hm!(i, n) - q * hm!(i, n - 1)) / x;
                        } else {
                            let (cr, ci) =
                                cdiv(-r - y * hm!(i, n - 1), -s - y * hm!(i, n), z, q);
                            hm!(i + 1, n - 1) = cr;
                            hm!(i + 1, n) = ci;
                        }
                    }
                    t = hm!(i, n - 1).abs().max(hm!(i, n).abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            hm!(j, n - 1) /= t;
                            hm!(j, n) /= t;
                        }
                    }
                }
            }
        }
    }

    // back-transform to the eigenvectors of the original matrix
    for j in (low..nn).rev() {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += vm!(i, k) * hm!(k, j);
            }
            vm!(i, j) = z;
        }
    }
    Ok(())
}

/// Matrix exponential by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(a: &Mat<f64>) -> Result<Mat<f64>> {
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371_920_351_148_152;
    if !a.is_square() {
        return Err(Error::Dimension { expected: a.rows(), got: a.cols() });
    }
    let n = a.rows();
    let norm = a.norm1();
    if !norm.is_finite() {
        return Err(Error::InvalidParameter("matrix exponential of a non-finite matrix".into()));
    }
    let squarings = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)) as i32
    } else {
        0
    };
    let a = a.scale(1.0 / math::powi(2.0, squarings));
    let id = Mat::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        a6.scale(c6).add(&a4.scale(c4)).add(&a2.scale(c2)).add(&id.scale(c0))
    };
    let u_inner = a6.matmul(&lin(B[13], B[11], B[9], 0.0)).add(&lin(B[7], B[5], B[3], B[1]));
    let u = a.matmul(&u_inner);
    let v = a6.matmul(&lin(B[12], B[10], B[8], 0.0)).add(&lin(B[6], B[4], B[2], B[0]));
    let lu = Lu::factor(&v.sub(&u))?;
    let rhs = v.add(&u);
    let mut r = Mat::zeros(n, n);
    for j in 0..n {
        let col = lu.solve(&rhs.column(j));
        for i in 0..n {
            r[(i, j)] = col[i];
        }
    }
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}
