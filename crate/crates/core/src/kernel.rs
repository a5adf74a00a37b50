//! Dense complex vectors and operators at small dimension.
//!
//! Everything here is row-major and immutable after construction. The
//! dimensions handled by the algebraic modules never exceed a few hundred,
//! so there is no sparse path.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A column vector in `C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec {
    entries: Vec<C64>,
}

impl CVec {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite vector entry".into()));
        }
        Ok(CVec { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "zero-dimensional vector");
        CVec { entries: vec![ZERO; dim] }
    }

    /// The `index`-th standard basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: C64) -> CVec {
        CVec { entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> CVec {
        self.scale(C64::new(factor, 0.0))
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<CVec> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale_real(1.0 / n))
    }

    pub fn inner(&self, other: &CVec) -> Result<C64> {
        inner(self, other)
    }

    pub fn tensor(&self, other: &CVec) -> CVec {
        tensor_vec(self, other)
    }

    pub fn max_abs_diff(&self, other: &CVec) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Add for &CVec {
    type Output = CVec;
    fn add(self, rhs: &CVec) -> CVec {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        CVec { entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CVec {
    type Output = CVec;
    fn sub(self, rhs: &CVec) -> CVec {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        CVec { entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

/// `<a, b>`, conjugate-linear in the first argument.
pub fn inner(a: &CVec, b: &CVec) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| x.conj() * y).sum())
}

/// Kronecker product `a ⊗ b`; index `(i, j)` lands at `i * b.dim() + j`.
pub fn tensor_vec(a: &CVec, b: &CVec) -> CVec {
    let mut entries = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.entries {
        entries.extend(b.entries.iter().map(|y| x * y));
    }
    CVec { entries }
}

/// A square complex matrix acting on `C^dim`.
#[derive(Clone, PartialEq)]
pub struct COp {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for COp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "COp({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl COp {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "zero-dimensional operator");
        COp { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = ONE;
        }
        op
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "zero-dimensional operator");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        COp { dim, data }
    }

    /// Builds an operator from rows; every row must have as many entries as
    /// there are rows.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend(row);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator("non-finite matrix entry".into()));
        }
        Ok(COp { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            op.data[i * op.dim + i] = z;
        }
        op
    }

    /// `|a><b|`
    pub fn outer(a: &CVec, b: &CVec) -> Self {
        assert_eq!(a.dim(), b.dim(), "outer product dimension mismatch");
        Self::from_fn(a.dim(), |i, j| a.entries()[i] * b.entries()[j].conj())
    }

    /// `|v><v|`
    pub fn projector(v: &CVec) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn adjoint(&self) -> COp {
        COp::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: C64) -> COp {
        COp { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> COp {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn apply(&self, v: &CVec) -> Result<CVec> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        let entries =
            self.data.chunks_exact(self.dim).map(|row| row.iter().zip(v.entries()).map(|(a, x)| a * x).sum()).collect();
        Ok(CVec { entries })
    }

    /// `<v, A v>`
    pub fn expectation(&self, v: &CVec) -> Result<C64> {
        inner(v, &self.apply(v)?)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &COp) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `A - A*`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `(A + A*) / 2`
    pub fn hermitian_part(&self) -> COp {
        COp::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = to_nalgebra(&self.hermitian_part()).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        to_nalgebra(self).singular_values().iter().copied().fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.adjoint() * self).max_abs_diff(&COp::identity(self.dim)) <= tol
    }

    pub fn tensor(&self, other: &COp) -> COp {
        tensor_op(self, other)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.norm() <= tol)
    }
}

fn to_nalgebra(op: &COp) -> DMatrix<C64> {
    DMatrix::from_row_slice(op.dim, op.dim, &op.data)
}

impl Mul for &COp {
    type Output = COp;
    fn mul(self, rhs: &COp) -> COp {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let n = self.dim;
        let mut out = COp::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &COp {
    type Output = COp;
    fn add(self, rhs: &COp) -> COp {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        COp { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &COp {
    type Output = COp;
    fn sub(self, rhs: &COp) -> COp {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        COp { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Kronecker product `A ⊗ B`, matching the index layout of [`tensor_vec`].
pub fn tensor_op(a: &COp, b: &COp) -> COp {
    let (m, n) = (a.dim, b.dim);
    COp::from_fn(m * n, |r, c| a.get(r / n, c / n) * b.get(r % n, c % n))
}

/// `0 <= A` within `tol`: Hermitian up to `tol` entrywise and no eigenvalue of
/// the Hermitian part below `-tol`.
pub fn is_positive(a: &COp, tol: f64) -> bool {
    if a.hermiticity_residual() > tol {
        return false;
    }
    a.hermitian_eigenvalues().first().is_none_or(|&lo| lo >= -tol)
}

/// Operator norm of `AB - BA`.
pub fn commutator_norm(a: &COp, b: &COp) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    Ok((&(a * b) - &(b * a)).operator_norm())
}
