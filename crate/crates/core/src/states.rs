//! Validated density matrices and the standard two-qubit test families.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::qmat::{self, ComplexMatrix, Subsystem, ONE, ZERO};
use crate::tol;

/// A Hermitian, unit-trace, positive-semidefinite matrix, optionally split
/// into a bipartite `(d_A, d_B)` structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Option<(usize, usize)>,
}

impl DensityMatrix {
    /// Validates `matrix` against every density-matrix invariant.
    ///
    /// The stored matrix is the Hermitian part of the input.
    pub fn new(matrix: ComplexMatrix, dims: Option<(usize, usize)>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!("matrix is {}x{}, not square", matrix.rows(), matrix.cols())));
        }
        if matrix.rows() == 0 || matrix.rows() > tol::MAX_DIM {
            return Err(Error::UnsupportedDimension(format!(
                "dimension {} outside 1..={}",
                matrix.rows(),
                tol::MAX_DIM
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("matrix has non-finite entries".into()));
        }
        check_dims(matrix.rows(), dims)?;
        let herr = matrix.hermiticity_error();
        if herr > tol::MATRIX {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |rho - rho^dagger| = {herr:e} exceeds {:e}",
                tol::MATRIX
            )));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > tol::MATRIX {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1 (tolerance {:e})", tol::MATRIX)));
        }
        let lowest = qmat::hermitian_eigenvalues(&matrix)?[0];
        if lowest < -tol::EIGEN_CLIP {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: smallest eigenvalue {lowest:e} is below -{:e}",
                tol::EIGEN_CLIP
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Wraps a matrix produced by an operation that preserves validity.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Option<(usize, usize)>) -> Self {
        debug_assert!(check_dims(matrix.rows(), dims).is_ok());
        Self { matrix, dims }
    }

    /// `|ψ⟩⟨ψ|` for a state vector normalized here.
    pub fn from_pure(psi: &[Complex64], dims: Option<(usize, usize)>) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&psi), dims)
    }

    /// `ρ ⊗ σ` with the bipartite split taken from the operands' dimensions.
    pub fn product(rho: &DensityMatrix, sigma: &DensityMatrix) -> Self {
        Self::from_trusted(qmat::tensor_product(&rho.matrix, &sigma.matrix), Some((rho.dim(), sigma.dim())))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    pub fn require_dims(&self) -> Result<(usize, usize)> {
        self.dims
            .ok_or_else(|| Error::DimensionMismatch(format!("{}-dimensional state has no bipartite split", self.dim())))
    }

    pub fn with_dims(self, dims: (usize, usize)) -> Result<Self> {
        check_dims(self.dim(), Some(dims))?;
        Ok(Self { dims: Some(dims), ..self })
    }

    pub fn reduced(&self, keep: Subsystem) -> Result<DensityMatrix> {
        qmat::partial_trace(self, keep)
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Exchanges the roles of A and B.
    pub fn swap_subsystems(&self) -> Result<DensityMatrix> {
        let (d_a, d_b) = self.require_dims()?;
        let src = |i: usize| {
            let (b, a) = (i / d_a, i % d_a);
            a * d_b + b
        };
        let m = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(src(i), src(j))]);
        Ok(Self::from_trusted(m, Some((d_b, d_a))))
    }

    /// `U ρ U†`.
    pub fn unitarily_rotated(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on a {}-dimensional state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Ok(Self::from_trusted(self.matrix.conjugate_by(u)?.hermitian_part(), self.dims))
    }
}

fn check_dims(n: usize, dims: Option<(usize, usize)>) -> Result<()> {
    match dims {
        Some((a, b)) if a * b != n || a == 0 || b == 0 => {
            Err(Error::DimensionMismatch(format!("split {a}x{b} does not match dimension {n}")))
        }
        _ => Ok(()),
    }
}

/// Computational basis vector `|i⟩` in dimension `d`.
pub fn ket(d: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {x} is outside [0, 1]")))
    }
}

/// `a |ψ⁺⟩⟨ψ⁺| + (1 - a) |11⟩⟨11|` with `|ψ⁺⟩ = (|01⟩ + |10⟩)/√2`.
pub fn mixed_bell(a: f64) -> Result<DensityMatrix> {
    check_unit_interval("a", a)?;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let psi_plus = [ZERO, h, h, ZERO];
    let bell = ComplexMatrix::projector(&psi_plus).scale_real(a);
    let one_one = ComplexMatrix::projector(&ket(4, 3)).scale_real(1.0 - a);
    DensityMatrix::new(&bell + &one_one, Some((2, 2)))
}

/// Werner state `p |ψ⁻⟩⟨ψ⁻| + (1 - p) I/4` with `|ψ⁻⟩ = (|01⟩ - |10⟩)/√2`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let h = FRAC_1_SQRT_2;
    let singlet = [ZERO, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), ZERO];
    let proj = ComplexMatrix::projector(&singlet).scale_real(p);
    let noise = ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    DensityMatrix::new(&proj + &noise, Some((2, 2)))
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Seeded Ginibre state `G G† / tr(G G†)`.
///
/// `G` is `d × rank`, filled in row-major order with complex entries whose
/// real then imaginary parts are standard normal draws from a ChaCha8 stream
/// seeded with `seed_from_u64(seed)`. The result carries no bipartite split;
/// attach one with [`DensityMatrix::with_dims`].
pub fn random_density(seed: u64, d: usize, rank: usize) -> Result<DensityMatrix> {
    if d == 0 || d > tol::MAX_DIM {
        return Err(Error::UnsupportedDimension(format!("dimension {d} outside 1..={}", tol::MAX_DIM)));
    }
    if rank == 0 || rank > d {
        return Err(Error::OutOfRange(format!("rank {rank} outside 1..={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(&mut rng, d, rank);
    let ggt = &g * &g.adjoint();
    let tr = ggt.trace().re;
    Ok(DensityMatrix::from_trusted(ggt.scale_real(1.0 / tr).hermitian_part(), None))
}

/// Random two-qubit state with the `(2, 2)` split attached.
pub fn random_two_qubit(seed: u64, rank: usize) -> Result<DensityMatrix> {
    random_density(seed, 4, rank)?.with_dims((2, 2))
}

/// Seeded Haar-random unitary from Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary(seed: u64, d: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(&mut rng, d, d);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for u in &cols {
            let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= overlap * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}
