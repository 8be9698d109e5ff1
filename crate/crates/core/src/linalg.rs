//! Dense complex matrices and vectors.
//!
//! Tensor factors flatten left-most-significant: in `a.kron(&b)` the entry
//! at row `i * b.rows() + k`, column `j * b.cols() + l` is `a[i, j] * b[k, l]`.
//! Every multi-factor index in the crate is therefore a big-endian
//! mixed-radix number over the factor dimensions.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type Scalar = Complex64;

/// Tolerance used by every predicate unless the caller supplies one.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const ZERO: Scalar = Complex64::new(0.0, 0.0);
pub const ONE: Scalar = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },

    #[error("entry count {len} does not match shape {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, len: usize },

    #[error("ragged matrix: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("shape mismatch: {op} of {lhs:?} and {rhs:?}")]
    ShapeMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
}

fn check_finite(entries: &[Scalar]) -> Result<(), LinalgError> {
    match entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(index) => Err(LinalgError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyShape { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount { rows, cols, len: entries.len() });
        }
        check_finite(&entries)?;
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n * m);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != m {
                return Err(LinalgError::Ragged { row, len: r.len(), expected: m });
            }
            entries.extend(r);
        }
        Self::new(n, m, entries)
    }

    /// Builds a matrix from real rows. Panics on ragged or empty input, so
    /// only use it with literal data.
    pub fn real(rows: &[&[f64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(rows).expect("literal real matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, entries: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = ONE;
        }
        m
    }

    /// Square 0/1 matrix with a one at every `(row, col)` in `ones`.
    pub fn indicator(n: usize, ones: &[(usize, usize)]) -> Self {
        let mut m = Self::zeros(n, n);
        for &(i, j) in ones {
            m.entries[i * n + j] = ONE;
        }
        m
    }

    pub fn scalar(z: Scalar) -> Self {
        Self { rows: 1, cols: 1, entries: vec![z] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Scalar] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Kronecker product, left factor most significant.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    let base = (i * other.rows + k) * cols + j * other.cols;
                    for l in 0..other.cols {
                        entries[base + l] = a * other.get(k, l);
                    }
                }
            }
        }
        Self { rows, cols, entries }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conj());
            }
        }
        Self { rows: self.cols, cols: self.rows, entries }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "matmul",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let mut entries = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                let out = &mut entries[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, entries })
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(Scalar, Scalar) -> Scalar,
    ) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch { op, lhs: self.shape(), rhs: other.shape() });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// In-place `self += other`; shapes must agree.
    pub fn add_assign(&mut self, other: &Self) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch {
                op: "add",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&self, z: Scalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&a| a * z).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`, or `None` when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.shape() != other.shape() {
            return None;
        }
        Some(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.entries.iter().all(|&z| z == ZERO)
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// `max |A†A - I| <= tol`.
    pub fn is_unitary(&self, tol: f64) -> Result<bool, LinalgError> {
        self.require_square()?;
        let gram = self.dagger().matmul(self)?;
        let diff = gram.try_sub(&Self::identity(self.rows))?;
        Ok(diff.max_norm() <= tol)
    }

    /// Idempotent and self-adjoint, both within `tol` in max-norm.
    pub fn is_orthogonal_projection(&self, tol: f64) -> Result<bool, LinalgError> {
        self.require_square()?;
        let square = self.matmul(self)?;
        let idempotent = square.try_sub(self)?.max_norm() <= tol;
        let hermitian = self.dagger().try_sub(self)?.max_norm() <= tol;
        Ok(idempotent && hermitian)
    }

    /// `A = U P` with `U` unitary, `P` an orthogonal projection, and `UP = PU`.
    ///
    /// Tested as `A†A = AA†` with `A†A` idempotent. Unitaries (`P = I`),
    /// orthogonal projections (`U = I`), and tensor products of the two all
    /// qualify; a 0/1 matrix moving one basis state to another does not.
    pub fn is_projected_unitary(&self, tol: f64) -> Result<bool, LinalgError> {
        self.require_square()?;
        let adj = self.dagger();
        let gram = adj.matmul(self)?;
        let cogram = self.matmul(&adj)?;
        let normal = gram.try_sub(&cogram)?.max_norm() <= tol;
        let idempotent = gram.matmul(&gram)?.try_sub(&gram)?.max_norm() <= tol;
        Ok(normal && idempotent)
    }

    /// Every entry is within `tol` of 0 or 1.
    pub fn is_zero_one(&self, tol: f64) -> bool {
        self.entries
            .iter()
            .all(|z| z.im.abs() <= tol && (z.re.abs() <= tol || (z.re - 1.0).abs() <= tol))
    }

    pub fn apply(&self, x: &StateVector) -> Result<StateVector, LinalgError> {
        if self.cols != x.dim() {
            return Err(LinalgError::ShapeMismatch {
                op: "apply",
                lhs: self.shape(),
                rhs: (x.dim(), 1),
            });
        }
        let entries = (0..self.rows)
            .map(|i| self.row(i).iter().zip(x.entries()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(StateVector { entries })
    }

    /// Reorders tensor factors: for a square matrix on `V_0 ⊗ … ⊗ V_{n-1}`
    /// with `dims[i] = dim V_i`, returns the same map on
    /// `V_{order[0]} ⊗ … ⊗ V_{order[n-1]}`.
    pub fn permute_factors(&self, dims: &[usize], order: &[usize]) -> Result<Self, LinalgError> {
        self.require_square()?;
        let perm = factor_permutation(dims, order);
        if perm.len() != self.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "permute_factors",
                lhs: self.shape(),
                rhs: (perm.len(), perm.len()),
            });
        }
        let n = self.rows;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[perm[i] * n + perm[j]] = self.get(i, j);
            }
        }
        Ok(Self { rows: n, cols: n, entries })
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix shapes must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix shapes must agree")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("inner dimensions must agree")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|&z| format_scalar(z)).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Maps a flat index over factors `dims` to the flat index of the same basis
/// element after the factors are reordered to `order`.
///
/// `result[i]` is the new position of old index `i`.
pub fn factor_permutation(dims: &[usize], order: &[usize]) -> Vec<usize> {
    assert_eq!(dims.len(), order.len(), "one position per factor");
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    (0..total)
        .map(|i| {
            let digits = mixed_radix_digits(i, dims);
            let reordered: Vec<usize> = order.iter().map(|&k| digits[k]).collect();
            mixed_radix_index(&reordered, &new_dims)
        })
        .collect()
}

/// Big-endian digits of `index` over `dims`.
pub fn mixed_radix_digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (d, &n) in digits.iter_mut().zip(dims).rev() {
        *d = index % n;
        index /= n;
    }
    digits
}

pub fn mixed_radix_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// A vector in a finite dimensional complex space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    entries: Vec<Scalar>,
}

impl StateVector {
    pub fn new(entries: Vec<Scalar>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::EmptyShape { rows: 0, cols: 1 });
        }
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "state dimension must be positive");
        Self { entries: vec![ZERO; dim] }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[k] = ONE;
        v
    }

    pub fn real(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| Scalar::new(x, 0.0)).collect()).expect("literal vector")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.entries[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .flat_map(|&a| other.entries.iter().map(move |&b| a * b))
            .collect();
        Self { entries }
    }

    pub fn scale(&self, z: Scalar) -> Self {
        Self { entries: self.entries.iter().map(|&a| a * z).collect() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::ShapeMismatch {
                op: "add",
                lhs: (self.dim(), 1),
                rhs: (other.dim(), 1),
            });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { entries })
    }

    /// Adds `z` to the coordinate at `index`.
    pub fn add_at(&mut self, index: usize, z: Scalar) {
        self.entries[index] += z;
    }

    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.dim() != other.dim() {
            return None;
        }
        Some(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }
}

/// Formats a real number to 12 significant digits, dropping trailing zeros.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

/// `re+imi` with 12 significant digits per part.
pub fn format_scalar(z: Scalar) -> String {
    let sign = if z.im.is_sign_negative() && z.im != 0.0 { '-' } else { '+' };
    format!("{}{}{}i", format_real(z.re), sign, format_real(z.im.abs()))
}
