//! Dense complex matrices and the entropy primitives built on them.
//!
//! Everything here targets the small Hilbert spaces of a few qubits, so the
//! storage is a flat row-major `Vec` and the eigensolver is a cyclic complex
//! Jacobi iteration. Jacobi is slow for large matrices but deterministic and
//! accurate to machine precision on the 2×2 and 4×4 problems the optimizers
//! hammer.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::tol;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric(format!("non-finite entry at ({}, {})", pos / cols.max(1), pos % cols.max(1))));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self · v`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect())
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Which half of a bipartite system an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * p, a.cols * q, |i, j| a[(i / p, j / q)] * b[(i % p, j % q)])
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Traces out one factor of a `d_a·d_b` square matrix, returning the block on `keep`.
pub fn partial_trace_matrix(m: &ComplexMatrix, (d_a, d_b): (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows != d_a * d_b {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix cannot be split as {d_a}x{d_b}", m.rows, m.cols)));
    }
    let idx = |a: usize, b: usize| a * d_b + b;
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(d_a, d_a, |i, j| (0..d_b).map(|k| m[(idx(i, k), idx(j, k))]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(d_b, d_b, |i, j| (0..d_a).map(|k| m[(idx(k, i), idx(k, j))]).sum()),
    })
}

/// Reduced state of `rho` on the `keep` subsystem.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let dims = rho.require_dims()?;
    let reduced = partial_trace_matrix(rho.matrix(), dims, keep)?;
    Ok(DensityMatrix::from_trusted(reduced, None))
}

/// Eigenvalues in ascending order with matching column eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenDecomposition {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = self.eigenvalues.len();
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum())
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before solving, so drift up to [`tol::MATRIX`]
/// in `m - m†` is tolerated; anything larger is rejected.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigenDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.rows, m.cols)));
    }
    if m.rows > tol::MAX_DIM {
        return Err(Error::UnsupportedDimension(format!(
            "dimension {} exceeds the dense limit {}",
            m.rows,
            tol::MAX_DIM
        )));
    }
    if !m.is_finite() {
        return Err(Error::Numeric("non-finite matrix entry".into()));
    }
    let herr = m.hermiticity_error();
    if herr > tol::MATRIX {
        return Err(Error::NotHermitian(herr));
    }
    let (eigenvalues, eigenvectors) = jacobi(m.hermitian_part());
    Ok(HermitianEigenDecomposition { eigenvalues, eigenvectors })
}

/// Eigenvalues only; skips accumulating the eigenvector matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(m)?.eigenvalues)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.rows;
    let mut v = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= f64::EPSILON * 1e-2 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                // Rotation U = [[c, s e^{iα}], [-s e^{-iα}, c]] in the (p, q) plane
                // zeroes a_pq for a_pq = g e^{iα}.
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                if t == 0.0 {
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let up = phase * s; // s e^{iα}
                let down = -phase.conj() * s; // -s e^{-iα}

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * down;
                    a[(k, q)] = akp * up + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * up;
                    a[(q, k)] = aqk * c - apk * down;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * down;
                    v[(k, q)] = vkp * up + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (eigenvalues, eigenvectors)
}

/// Clips drift in `[-EIGEN_CLIP, 0)` to zero and renormalizes the mass.
///
/// Fails on eigenvalues below `-EIGEN_CLIP` or a spectrum with no mass.
pub fn clip_spectrum(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = eigenvalues.iter().find(|&&l| l < -tol::EIGEN_CLIP) {
        return Err(Error::InvalidState(format!(
            "eigenvalue {bad:e} is below -{:e}; the matrix is not positive semidefinite",
            tol::EIGEN_CLIP
        )));
    }
    let clipped: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::InvalidState("spectrum carries no probability mass".into()));
    }
    Ok(clipped.into_iter().map(|l| l / total).collect())
}

/// `-Σ x log₂ x` with `0 log 0 = 0`.
pub(crate) fn entropy_bits(values: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = values.into_iter().filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum();
    // -0.0 and rounding below zero both collapse to 0
    h.max(0.0)
}

/// Binary entropy `h₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits([p, 1.0 - p])
}

/// Entropy of a spectrum that is known to come from a valid state; negative
/// drift of any size is clipped rather than reported.
pub(crate) fn entropy_of_psd_matrix(m: &ComplexMatrix) -> f64 {
    let (eigenvalues, _) = jacobi(m.hermitian_part());
    let total: f64 = eigenvalues.iter().map(|l| l.max(0.0)).sum();
    if total <= 0.0 {
        return 0.0;
    }
    entropy_bits(eigenvalues.iter().map(|l| l.max(0.0) / total))
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = hermitian_eigenvalues(rho.matrix())?;
    Ok(entropy_bits(clip_spectrum(&eig)?))
}

/// Probabilities clipped into `[0, 1]` and summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::OutOfRange("empty probability vector".into()));
        }
        let mut clipped = Vec::with_capacity(values.len());
        for &p in &values {
            if !p.is_finite() || !(-tol::PROB_CLIP..=1.0 + tol::PROB_CLIP).contains(&p) {
                return Err(Error::OutOfRange(format!("probability {p} outside [0, 1]")));
            }
            clipped.push(p.clamp(0.0, 1.0));
        }
        let sum: f64 = clipped.iter().sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(Error::OutOfRange(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self(clipped))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_bits(p.values().iter().copied())
}

/// `S(A|B) = S(AB) - S(B)`; negative for sufficiently entangled states.
pub fn conditional_vn_entropy(rho_ab: &DensityMatrix) -> Result<f64> {
    let s_ab = von_neumann_entropy(rho_ab)?;
    let s_b = von_neumann_entropy(&partial_trace(rho_ab, Subsystem::B)?)?;
    Ok(s_ab - s_b)
}
