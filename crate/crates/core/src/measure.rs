//! Rank-1 projective measurements on subsystem A and their statistics.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{self, NelderMead};
use crate::qmat::{self, ComplexMatrix, ProbabilityVector, Subsystem, ZERO};
use crate::states::DensityMatrix;
use crate::tol;

/// Polar and azimuthal angle of a qubit measurement axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAngles {
    /// Checked constructor: `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(Error::OutOfRange(format!("Bloch angles ({theta}, {phi}) outside [0, pi] x [0, 2pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// Maps arbitrary angles to the canonical ranges while keeping the same
    /// Bloch direction.
    pub fn normalized(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Uniformly distributed direction on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        Self::normalized((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), TAU * v)
    }
}

/// A complete set of orthogonal rank-1 projectors `|v_j⟩⟨v_j|`, stored as
/// the orthonormal basis `{v_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    label: String,
    basis: Vec<Vec<Complex64>>,
}

impl ProjectiveMeasurement {
    /// Accepts `d` vectors of length `d` that are orthonormal within [`tol::MATRIX`].
    pub fn from_basis(label: impl Into<String>, basis: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = basis.len();
        if d == 0 || basis.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch("a projective measurement needs d basis vectors of length d".into()));
        }
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (ip - Complex64::new(want, 0.0)).norm() > tol::MATRIX {
                    return Err(Error::OutOfRange(format!(
                        "basis vectors {i} and {j} have inner product {ip}, expected {want}"
                    )));
                }
            }
        }
        Ok(Self { label: label.into(), basis })
    }

    /// Uses the columns of a unitary as the measurement basis.
    pub fn from_unitary_columns(label: impl Into<String>, u: &ComplexMatrix) -> Result<Self> {
        Self::from_basis(label, (0..u.cols()).map(|j| u.column(j)).collect())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        self.basis.iter().map(|v| ComplexMatrix::projector(v)).collect()
    }

    /// Worst deviation from idempotence, mutual orthogonality and completeness
    /// over the projector set.
    pub fn projector_defect(&self) -> f64 {
        let ps = self.projectors();
        let d = self.dim();
        let mut worst: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(d, d);
        for (i, p) in ps.iter().enumerate() {
            worst = worst.max(p.hermiticity_error());
            worst = worst.max((p * p).max_abs_diff(p));
            for q in ps.iter().skip(i + 1) {
                worst = worst.max((p * q).max_abs());
            }
            sum = &sum + p;
        }
        worst.max(sum.max_abs_diff(&ComplexMatrix::identity(d)))
    }

    /// Bloch axis of the first basis vector, for qubit measurements.
    pub fn bloch_angles(&self) -> Option<BlochAngles> {
        if self.dim() != 2 {
            return None;
        }
        let (a, b) = (self.basis[0][0], self.basis[0][1]);
        let ab = a.conj() * b;
        let z = (a.norm_sqr() - b.norm_sqr()).clamp(-1.0, 1.0);
        Some(BlochAngles::normalized(z.acos(), (2.0 * ab.im).atan2(2.0 * ab.re)))
    }

    /// Same outcomes, listed in a different order.
    pub fn relabeled(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dim()];
        if order.len() != self.dim() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::OutOfRange("outcome order is not a permutation".into()));
        }
        Ok(Self { label: self.label.clone(), basis: order.iter().map(|&i| self.basis[i].clone()).collect() })
    }
}

fn qubit_basis(angles: BlochAngles) -> Vec<Vec<Complex64>> {
    let (s, c) = (angles.theta / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, angles.phi);
    vec![vec![Complex64::new(c, 0.0), phase * s], vec![Complex64::new(s, 0.0), -phase * c]]
}

/// Basis `{cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩, sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩}`.
pub fn projective_from_bloch(angles: BlochAngles) -> ProjectiveMeasurement {
    ProjectiveMeasurement { label: format!("bloch:{}:{}", angles.theta, angles.phi), basis: qubit_basis(angles) }
}

fn named(label: &str, theta: f64, phi: f64) -> ProjectiveMeasurement {
    ProjectiveMeasurement { label: label.into(), basis: qubit_basis(BlochAngles { theta, phi }) }
}

pub fn pauli_z() -> ProjectiveMeasurement {
    named("z", 0.0, 0.0)
}

pub fn pauli_x() -> ProjectiveMeasurement {
    named("x", FRAC_PI_2, 0.0)
}

pub fn pauli_y() -> ProjectiveMeasurement {
    named("y", FRAC_PI_2, FRAC_PI_2)
}

/// The three mutually unbiased qubit bases `[Z, X, Y]`.
pub fn mub_qubit() -> Vec<ProjectiveMeasurement> {
    vec![pauli_z(), pauli_x(), pauli_y()]
}

/// Seeded measurement along a uniformly random Bloch axis.
pub fn random_qubit_measurement(seed: u64) -> ProjectiveMeasurement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles = BlochAngles::random(&mut rng);
    projective_from_bloch(angles)
}

fn expectation(rho: &ComplexMatrix, v: &[Complex64]) -> f64 {
    let n = v.len();
    let mut acc = ZERO;
    for i in 0..n {
        let mut row = ZERO;
        for j in 0..n {
            row += rho[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

/// `p_j = ⟨v_j|ρ|v_j⟩`.
pub fn outcome_distribution(rho: &DensityMatrix, r: &ProjectiveMeasurement) -> Result<ProbabilityVector> {
    if rho.dim() != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-outcome measurement on a {}-dimensional state",
            r.dim(),
            rho.dim()
        )));
    }
    ProbabilityVector::new(r.basis.iter().map(|v| expectation(rho.matrix(), v)).collect())
}

/// Unnormalized conditional state `(⟨v| ⊗ I) ρ (|v⟩ ⊗ I)` on B.
fn conditional_block(rho: &ComplexMatrix, d_b: usize, v: &[Complex64]) -> ComplexMatrix {
    let d_a = v.len();
    ComplexMatrix::from_fn(d_b, d_b, |b, bp| {
        let mut acc = ZERO;
        for i in 0..d_a {
            let vi = v[i].conj();
            if vi == ZERO {
                continue;
            }
            for ip in 0..d_a {
                acc += vi * rho[(i * d_b + b, ip * d_b + bp)] * v[ip];
            }
        }
        acc
    })
}

/// Retained outcomes of a measurement on A with the post-measurement states of B.
#[derive(Clone, Debug)]
pub struct OutcomeEnsemble {
    /// Index of each retained outcome in the measurement basis.
    pub outcomes: Vec<usize>,
    pub probabilities: ProbabilityVector,
    pub conditional_states: Vec<DensityMatrix>,
}

impl OutcomeEnsemble {
    /// `Σ_j p_j ρ_j`.
    pub fn average_state(&self) -> ComplexMatrix {
        let d = self.conditional_states[0].dim();
        self.probabilities
            .values()
            .iter()
            .zip(&self.conditional_states)
            .fold(ComplexMatrix::zeros(d, d), |acc, (&p, s)| &acc + &s.matrix().scale_real(p))
    }

    /// `Σ_j p_j S(ρ_j)` in bits.
    pub fn average_entropy(&self) -> Result<f64> {
        let mut total = 0.0;
        for (&p, s) in self.probabilities.values().iter().zip(&self.conditional_states) {
            total += p * qmat::von_neumann_entropy(s)?;
        }
        Ok(total)
    }
}

fn check_on_a(rho_ab: &DensityMatrix, r: &ProjectiveMeasurement) -> Result<(usize, usize)> {
    let (d_a, d_b) = rho_ab.require_dims()?;
    if d_a != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-outcome measurement on subsystem A of dimension {d_a}",
            r.dim()
        )));
    }
    Ok((d_a, d_b))
}

/// Measures `r` on subsystem A; outcomes with `p < 1e-12` are dropped.
pub fn measure_on_a(rho_ab: &DensityMatrix, r: &ProjectiveMeasurement) -> Result<OutcomeEnsemble> {
    let (_, d_b) = check_on_a(rho_ab, r)?;
    let mut outcomes = Vec::new();
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for (j, v) in r.basis.iter().enumerate() {
        let block = conditional_block(rho_ab.matrix(), d_b, v);
        let p = block.trace().re;
        if p < tol::ZERO_OUTCOME {
            continue;
        }
        outcomes.push(j);
        probs.push(p);
        states.push(DensityMatrix::from_trusted(block.scale_real(1.0 / p).hermitian_part(), None));
    }
    let total: f64 = probs.iter().sum();
    let probabilities = ProbabilityVector::new(probs.iter().map(|p| p / total).collect())?;
    Ok(OutcomeEnsemble { outcomes, probabilities, conditional_states: states })
}

/// `Σ_j p_j S(ρ_j)` for the basis `v` on A without building an ensemble.
///
/// This is the inner loop of the classical-correlation optimizer; it assumes a
/// validated state and clips any eigenvalue drift silently.
pub(crate) fn average_conditional_entropy(rho: &ComplexMatrix, d_b: usize, basis: &[Vec<Complex64>]) -> f64 {
    let mut total = 0.0;
    for v in basis {
        let block = conditional_block(rho, d_b, v);
        let p = block.trace().re;
        if p < tol::ZERO_OUTCOME {
            continue;
        }
        total += p * qmat::entropy_of_psd_matrix(&block.scale_real(1.0 / p));
    }
    total
}

/// Qubit-axis form of [`average_conditional_entropy`].
pub(crate) fn average_conditional_entropy_at(rho: &ComplexMatrix, d_b: usize, angles: BlochAngles) -> f64 {
    average_conditional_entropy(rho, d_b, &qubit_basis(angles))
}

/// `c(R1, R2) = max_{i,j} |⟨r1_i|r2_j⟩|²`.
pub fn overlap_c(r1: &ProjectiveMeasurement, r2: &ProjectiveMeasurement) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch(format!("overlap of {}- and {}-dimensional bases", r1.dim(), r2.dim())));
    }
    let mut best: f64 = 0.0;
    for u in &r1.basis {
        for v in &r2.basis {
            let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            best = best.max(ip.norm_sqr());
        }
    }
    Ok(best.min(1.0))
}

/// Grid and refinement settings for [`bound_term`].
#[derive(Clone, Debug, Serialize)]
pub struct BoundOptions {
    /// Radii on `[0, 1]`, endpoints included.
    pub r_steps: usize,
    /// Polar angles on `[0, π]`, endpoints included.
    pub theta_steps: usize,
    /// Azimuths on `[0, 2π)`.
    pub phi_steps: usize,
    /// Number of best grid points polished by Nelder–Mead.
    pub refine_starts: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { r_steps: 51, theta_steps: 91, phi_steps: 180, refine_starts: 10 }
    }
}

/// Minimizer of `Σ_i H(R_i) − S(σ)` over single-qubit states `σ`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundTerm {
    pub value: f64,
    /// Bloch radius of the minimizing state.
    pub r: f64,
    pub angles: BlochAngles,
    pub evals: usize,
    pub k: usize,
}

fn bloch_state(r: f64, angles: BlochAngles) -> ComplexMatrix {
    let [x, y, z] = angles.direction();
    ComplexMatrix::from_row_major(
        2,
        2,
        vec![
            Complex64::new((1.0 + r * z) / 2.0, 0.0),
            Complex64::new(r * x / 2.0, -r * y / 2.0),
            Complex64::new(r * x / 2.0, r * y / 2.0),
            Complex64::new((1.0 - r * z) / 2.0, 0.0),
        ],
    )
    .expect("2x2 literal")
}

fn uncertainty_objective(measurements: &[ProjectiveMeasurement], r: f64, angles: BlochAngles) -> f64 {
    let r = r.clamp(0.0, 1.0);
    let sigma = bloch_state(r, angles);
    let h: f64 = measurements
        .iter()
        .map(|m| qmat::entropy_bits(m.basis.iter().map(|v| expectation(&sigma, v).clamp(0.0, 1.0))))
        .sum();
    // A Bloch state has spectrum (1 ± r)/2.
    h - qmat::binary_entropy((1.0 + r) / 2.0)
}

/// State-independent uncertainty term: the minimum over all qubit states σ
/// (the whole Bloch ball) of `Σ_i H(R_i)_σ − S(σ)`.
///
/// The minimum is located by an exhaustive `(r, θ, φ)` grid followed by
/// Nelder–Mead polish from the best grid points; the result is the smallest
/// value seen, so it can only over-estimate the true minimum.
pub fn bound_term(measurements: &[ProjectiveMeasurement], opts: &BoundOptions) -> Result<BoundTerm> {
    if measurements.is_empty() {
        return Err(Error::OutOfRange("bound term needs at least one measurement".into()));
    }
    if let Some(m) = measurements.iter().find(|m| m.dim() != 2) {
        return Err(Error::UnsupportedDimension(format!(
            "bound term is computed over qubit states; `{}` has {} outcomes",
            m.label,
            m.dim()
        )));
    }
    if opts.r_steps < 2 || opts.theta_steps < 2 || opts.phi_steps < 1 {
        return Err(Error::OutOfRange("bound grid needs at least 2x2x1 points".into()));
    }
    let (nr, nt, np) = (opts.r_steps, opts.theta_steps, opts.phi_steps);
    let point = |idx: usize| {
        let (ir, rest) = (idx / (nt * np), idx % (nt * np));
        let (it, ip) = (rest / np, rest % np);
        (
            optim::closed_grid(0.0, 1.0, nr, ir),
            BlochAngles { theta: optim::closed_grid(0.0, PI, nt, it), phi: TAU * ip as f64 / np as f64 },
        )
    };
    let total = nr * nt * np;
    let starts = optim::grid_best(total, opts.refine_starts.max(1), |idx| {
        let (r, a) = point(idx);
        uncertainty_objective(measurements, r, a)
    });
    let mut evals = total;
    let (r0, a0) = point(starts[0].0);
    let mut best = (starts[0].1, r0, a0);

    let nm = NelderMead {
        initial_step: vec![1.0 / (nr - 1) as f64, PI / (nt - 1) as f64, TAU / np as f64],
        xatol: 1e-10,
        fatol: 1e-15,
        max_evals: 2000,
    };
    for &(idx, _) in starts.iter().take(opts.refine_starts) {
        let (r, a) = point(idx);
        let m = nm.minimize(
            |x| uncertainty_objective(measurements, x[0], BlochAngles { theta: x[1], phi: x[2] }),
            &[r, a.theta, a.phi],
        );
        evals += m.evals;
        if m.value < best.0 {
            best = (m.value, m.x[0].clamp(0.0, 1.0), BlochAngles::normalized(m.x[1], m.x[2]));
        }
    }
    Ok(BoundTerm { value: best.0, r: best.1, angles: best.2, evals, k: measurements.len() })
}

/// State-specific uncertainty term `Σ_i H(R_i)_ρ − S(ρ)` for the actual state of A.
pub fn state_bound_term(rho_a: &DensityMatrix, measurements: &[ProjectiveMeasurement]) -> Result<f64> {
    let mut h = 0.0;
    for m in measurements {
        h += qmat::shannon_entropy(&outcome_distribution(rho_a, m)?);
    }
    Ok(h - qmat::von_neumann_entropy(rho_a)?)
}

/// Draws `n` outcomes of `r` on `rho` and returns the count per outcome.
///
/// Each draw takes one uniform `f64` from a ChaCha8 stream seeded with
/// `seed_from_u64(seed)` and inverts the cumulative distribution.
pub fn sample_outcomes(rho: &DensityMatrix, r: &ProjectiveMeasurement, n: u64, seed: u64) -> Result<Vec<u64>> {
    let dist = outcome_distribution(rho, r)?;
    Ok(sample_distribution(dist.values(), n, seed))
}

pub(crate) fn sample_distribution(p: &[f64], n: u64, seed: u64) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &x in p {
        acc += x;
        cdf.push(acc);
    }
    let last = p.iter().rposition(|&x| x > 0.0).unwrap_or(0);
    let mut counts = vec![0u64; p.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let u: f64 = rng.random();
        let j = cdf.iter().position(|&c| u < c).unwrap_or(last);
        counts[j] += 1;
    }
    counts
}

/// Sampling the measurement on A of a bipartite state.
pub fn sample_outcomes_on_a(rho_ab: &DensityMatrix, r: &ProjectiveMeasurement, n: u64, seed: u64) -> Result<Vec<u64>> {
    check_on_a(rho_ab, r)?;
    sample_outcomes(&rho_ab.reduced(Subsystem::A)?, r, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn state(diag: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_diagonal(diag), None).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn bloch_named_bases() {
        let z = projective_from_bloch(BlochAngles::new(0.0, 0.0).unwrap());
        assert!(close(outcome_distribution(&state(&[1.0, 0.0]), &z).unwrap().values(), &[1.0, 0.0], 1e-15));
        let x = projective_from_bloch(BlochAngles::new(FRAC_PI_2, 0.0).unwrap());
        assert!((overlap_c(&x, &pauli_x()).unwrap() - 1.0).abs() < 1e-15);
        let y = projective_from_bloch(BlochAngles::new(FRAC_PI_2, FRAC_PI_2).unwrap());
        assert!((overlap_c(&y, &pauli_y()).unwrap() - 1.0).abs() < 1e-15);
        let plus_y = DensityMatrix::from_pure(&y.basis()[0], None).unwrap();
        let py = outcome_distribution(&plus_y, &pauli_y()).unwrap();
        assert!((py.values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projectors_satisfy_invariants() {
        for m in mub_qubit().into_iter().chain((0..20).map(random_qubit_measurement)) {
            assert!(m.projector_defect() < 1e-10, "{}", m.label());
        }
        let u = states::random_unitary(5, 4);
        let m = ProjectiveMeasurement::from_unitary_columns("u4", &u).unwrap();
        assert!(m.projector_defect() < 1e-10);
    }

    #[test]
    fn bloch_angles_round_trip() {
        for seed in 0..20 {
            let m = random_qubit_measurement(seed);
            let back = projective_from_bloch(m.bloch_angles().unwrap());
            assert!((overlap_c(&m, &back).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((pauli_z().bloch_angles().unwrap().theta).abs() < 1e-15);
    }

    #[test]
    fn from_basis_rejects_non_orthonormal() {
        let b = vec![vec![Complex64::new(1.0, 0.0), ZERO], vec![Complex64::new(1.0, 0.0), ZERO]];
        assert!(ProjectiveMeasurement::from_basis("bad", b).is_err());
        assert!(ProjectiveMeasurement::from_basis("short", vec![vec![ZERO, ZERO]]).is_err());
    }

    #[test]
    fn angle_validation_and_normalization() {
        assert!(BlochAngles::new(4.0, 0.0).is_err());
        assert!(BlochAngles::new(0.5, TAU).is_err());
        let n = BlochAngles::normalized(-0.3, 0.2);
        let m = BlochAngles::new(0.3, 0.2 + PI).unwrap();
        let (dn, dm) = (n.direction(), m.direction());
        assert!(close(&dn, &dm, 1e-12));
        assert!((0.0..=PI).contains(&n.theta) && (0.0..TAU).contains(&n.phi));
    }

    #[test]
    fn mub_overlaps() {
        let mubs = mub_qubit();
        assert_eq!(mubs.len(), 3);
        for (i, a) in mubs.iter().enumerate() {
            for (j, b) in mubs.iter().enumerate() {
                let c = overlap_c(a, b).unwrap();
                let want = if i == j { 1.0 } else { 0.5 };
                assert!((c - want).abs() < 1e-15, "{i},{j}: {c}");
            }
        }
    }

    #[test]
    fn overlap_closed_form() {
        let tilted = projective_from_bloch(BlochAngles::new(PI / 3.0, 0.0).unwrap());
        assert!((overlap_c(&pauli_z(), &tilted).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn overlap_symmetric_and_relabel_invariant() {
        for s in 0..20 {
            let a = random_qubit_measurement(2 * s);
            let b = random_qubit_measurement(2 * s + 1);
            let ab = overlap_c(&a, &b).unwrap();
            assert!((ab - overlap_c(&b, &a).unwrap()).abs() < 1e-15);
            assert!((ab - overlap_c(&a.relabeled(&[1, 0]).unwrap(), &b).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn outcome_distribution_fixtures() {
        let zero = state(&[1.0, 0.0]);
        assert!(close(outcome_distribution(&zero, &pauli_z()).unwrap().values(), &[1.0, 0.0], 1e-15));
        assert!(close(outcome_distribution(&zero, &pauli_x()).unwrap().values(), &[0.5, 0.5], 1e-15));
        let diag = state(&[0.005, 0.995]);
        assert!(close(outcome_distribution(&diag, &pauli_z()).unwrap().values(), &[0.005, 0.995], 1e-15));
        assert!(matches!(
            outcome_distribution(&states::mixed_bell(0.5).unwrap(), &pauli_z()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bell_ensemble_is_perfectly_correlated() {
        let e = measure_on_a(&states::mixed_bell(1.0).unwrap(), &pauli_z()).unwrap();
        assert!(close(e.probabilities.values(), &[0.5, 0.5], 1e-15));
        let k1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let k0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(e.conditional_states[0].matrix().max_abs_diff(&k1) < 1e-15);
        assert!(e.conditional_states[1].matrix().max_abs_diff(&k0) < 1e-15);
    }

    #[test]
    fn degenerate_outcome_is_dropped() {
        let zz = DensityMatrix::from_pure(&states::ket(4, 0), Some((2, 2))).unwrap();
        let e = measure_on_a(&zz, &pauli_z()).unwrap();
        assert_eq!(e.outcomes, vec![0]);
        assert_eq!(e.probabilities.values(), &[1.0]);
        assert!(e.conditional_states[0].matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
    }

    /// Hand expansion of the mixed Bell family under Z on A:
    /// outcome 0 leaves `(a/2)|1⟩⟨1|`, outcome 1 leaves `(a/2)|0⟩⟨0| + (1-a)|1⟩⟨1|`.
    /// Cross-checked against `tr_A[(P⊗I) ρ (P⊗I)]` built from full 4×4 products.
    #[test]
    fn mixed_bell_z_ensemble_matches_direct_products() {
        let rho = states::mixed_bell(0.01).unwrap();
        let e = measure_on_a(&rho, &pauli_z()).unwrap();
        assert!(close(e.probabilities.values(), &[0.005, 0.995], 1e-15));
        let c0 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let c1 = ComplexMatrix::from_real_diagonal(&[0.005 / 0.995, 0.99 / 0.995]);
        assert!(e.conditional_states[0].matrix().max_abs_diff(&c0) < 1e-14);
        assert!(e.conditional_states[1].matrix().max_abs_diff(&c1) < 1e-14);

        for (j, proj) in pauli_z().projectors().iter().enumerate() {
            let lift = qmat::tensor_product(proj, &ComplexMatrix::identity(2));
            let post = &(&lift * rho.matrix()) * &lift;
            let p = post.trace().re;
            let cond = qmat::partial_trace_matrix(&post, (2, 2), Subsystem::B).unwrap().scale_real(1.0 / p);
            assert!((p - e.probabilities.values()[j]).abs() < 1e-15);
            assert!(cond.max_abs_diff(e.conditional_states[j].matrix()) < 1e-14);
        }
    }

    #[test]
    fn ensemble_reconstructs_marginal() {
        for seed in 0..30 {
            let rho = states::random_two_qubit(seed, 1 + seed as usize % 4).unwrap();
            let m = random_qubit_measurement(1000 + seed);
            let e = measure_on_a(&rho, &m).unwrap();
            let rho_b = rho.reduced(Subsystem::B).unwrap();
            assert!(e.average_state().max_abs_diff(rho_b.matrix()) < 1e-9);
            let fast = average_conditional_entropy(rho.matrix(), 2, m.basis());
            assert!((fast - e.average_entropy().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_term_fixtures() {
        let opts = BoundOptions::default();
        let zx = bound_term(&[pauli_z(), pauli_x()], &opts).unwrap();
        assert!((zx.value - 1.0).abs() < 1e-9, "{zx:?}");
        let zxy = bound_term(&mub_qubit(), &opts).unwrap();
        assert!((zxy.value - 2.0).abs() < 1e-9, "{zxy:?}");
        let zz = bound_term(&[pauli_z(), pauli_z()], &opts).unwrap();
        assert!(zz.value.abs() < 1e-9, "{zz:?}");
        assert!(matches!(bound_term(&[], &opts), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn bound_term_rejects_qudits() {
        let u = states::random_unitary(1, 3);
        let m = ProjectiveMeasurement::from_unitary_columns("q3", &u).unwrap();
        assert!(matches!(bound_term(&[m], &BoundOptions::default()), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn state_bound_term_for_maximally_mixed() {
        let half = state(&[0.5, 0.5]);
        assert!((state_bound_term(&half, &mub_qubit()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_fixtures() {
        let zero = state(&[1.0, 0.0]);
        assert_eq!(sample_outcomes(&zero, &pauli_z(), 0, 1).unwrap(), vec![0, 0]);
        assert_eq!(sample_outcomes(&zero, &pauli_z(), 100, 1).unwrap(), vec![100, 0]);

        let bell = states::mixed_bell(1.0).unwrap();
        let n = 10_000u64;
        let counts = sample_outcomes_on_a(&bell, &pauli_z(), n, 7).unwrap();
        let band = 3.0 * (n as f64 * 0.25).sqrt();
        assert_eq!(counts.iter().sum::<u64>(), n);
        for c in counts {
            assert!((c as f64 - 5000.0).abs() <= band, "{c}");
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let rho = states::random_density(3, 2, 2).unwrap();
        let m = random_qubit_measurement(9);
        let a = sample_outcomes(&rho, &m, 5000, 11).unwrap();
        assert_eq!(a, sample_outcomes(&rho, &m, 5000, 11).unwrap());
        assert_ne!(a, sample_outcomes(&rho, &m, 5000, 12).unwrap());
    }
}
