//! The k-party uncertainty game.
//!
//! Bob holds B of many copies of `ρ_AB`; `k − 1` Alices each pick a distinct
//! measurement from the list `R_1 … R_k` and measure it on A, leaving the last
//! one to Bob. The summed conditional entropies obey
//!
//! ```text
//! Σ_i S(R_i|B) = {Σ_i H(R_i) − S(A)} + S(A|B) + (I − kC) + residual
//! ```
//!
//! where `residual = Σ_i Σ_j p_j^(i) S(ρ_j^(i)) − k · min Σ_l p_l S(ρ_l)` is
//! non-negative. Replacing the first brace by its minimum over all qubit
//! states gives the lower bound reported as `rhs_unclipped`.

use serde::Serialize;

use crate::correlations::{self, CorrelationOptions, KOpt};
use crate::error::{Error, Result};
use crate::measure::{self, BoundOptions, BoundTerm, ProjectiveMeasurement};
use crate::qmat::{self, Subsystem};
use crate::states::DensityMatrix;
use crate::tol;

/// State, measurement list and the player → measurement assignment.
#[derive(Clone, Debug)]
pub struct GameSpec {
    state: DensityMatrix,
    measurements: Vec<ProjectiveMeasurement>,
    /// `assignment[p]` is the measurement index played by player `p`;
    /// players `0..k-1` are the Alices and `k-1` is Bob.
    assignment: Vec<usize>,
}

impl GameSpec {
    /// Game in which Alice_i measures `R_i` and Bob is left with `R_k`.
    pub fn new(state: DensityMatrix, measurements: Vec<ProjectiveMeasurement>) -> Result<Self> {
        let k = measurements.len();
        Self::with_assignment(state, measurements, (0..k).collect())
    }

    pub fn with_assignment(
        state: DensityMatrix,
        measurements: Vec<ProjectiveMeasurement>,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        let k = measurements.len();
        if k < 2 {
            return Err(Error::InvalidGame(format!("a game needs Bob and at least one Alice (k >= 2), got k = {k}")));
        }
        for (i, a) in measurements.iter().enumerate() {
            if measurements[..i].iter().any(|b| b.label() == a.label()) {
                return Err(Error::InvalidGame(format!("measurement `{}` is listed twice", a.label())));
            }
        }
        let mut seen = vec![false; k];
        if assignment.len() != k || assignment.iter().any(|&m| m >= k || std::mem::replace(&mut seen[m], true)) {
            return Err(Error::InvalidGame("assignment is not a bijection onto the measurements".into()));
        }
        let (d_a, d_b) = state.require_dims()?;
        if d_a != 2 || d_b != 2 {
            return Err(Error::UnsupportedDimension(format!("games are played on two-qubit states, got {d_a}x{d_b}")));
        }
        if let Some(m) = measurements.iter().find(|m| m.dim() != 2) {
            return Err(Error::DimensionMismatch(format!("measurement `{}` is not a qubit measurement", m.label())));
        }
        Ok(Self { state, measurements, assignment })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn measurements(&self) -> &[ProjectiveMeasurement] {
        &self.measurements
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn k(&self) -> usize {
        self.measurements.len()
    }
}

/// Settings for both optimizers a game needs.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GameOptions {
    pub correlation: CorrelationOptions,
    pub bound: BoundOptions,
}

/// `S(R|B) = H(R) + Σ_j p_j S(ρ_j) − S(B)` for a measurement on A.
pub fn conditional_measurement_entropy(rho_ab: &DensityMatrix, r: &ProjectiveMeasurement) -> Result<f64> {
    let s_b = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::B)?)?;
    let stats = MeasurementStats::compute(rho_ab, r)?;
    Ok(stats.shannon + stats.avg_conditional_entropy - s_b)
}

#[derive(Clone, Copy, Debug)]
struct MeasurementStats {
    shannon: f64,
    avg_conditional_entropy: f64,
}

impl MeasurementStats {
    fn compute(rho_ab: &DensityMatrix, r: &ProjectiveMeasurement) -> Result<Self> {
        let ensemble = measure::measure_on_a(rho_ab, r)?;
        let rho_a = rho_ab.reduced(Subsystem::A)?;
        Ok(Self {
            shannon: qmat::shannon_entropy(&measure::outcome_distribution(&rho_a, r)?),
            avg_conditional_entropy: ensemble.average_entropy()?,
        })
    }
}

/// The four bracketed terms on the right of the summed-entropy identity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FourTerms {
    /// `Σ_i H(R_i) − S(A)` for the actual state.
    pub uncertainty: f64,
    /// `S(A|B)`.
    pub conditional_entropy: f64,
    /// `I − kC`.
    pub correlation_gap: f64,
    /// `Σ_i Σ_j p_j^(i) S(ρ_j^(i)) − k · min Σ p S`.
    pub residual: f64,
}

impl FourTerms {
    pub fn sum(&self) -> f64 {
        self.uncertainty + self.conditional_entropy + self.correlation_gap + self.residual
    }
}

/// Everything the identity needs, computed from one optimizer run.
#[derive(Clone, Debug)]
struct Decomposition {
    per_measurement: Vec<f64>,
    shannon: Vec<f64>,
    terms: FourTerms,
    s_a: f64,
    s_b: f64,
    mutual_information: f64,
    classical: f64,
    min_avg_entropy: f64,
}

fn decompose(
    rho_ab: &DensityMatrix,
    measurements: &[ProjectiveMeasurement],
    opts: &CorrelationOptions,
) -> Result<Decomposition> {
    if opts.measured != Subsystem::A {
        return Err(Error::InvalidGame("game measurements act on subsystem A".into()));
    }
    let k = measurements.len();
    let s_a = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::A)?)?;
    let s_b = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::B)?)?;
    let s_ab = qmat::von_neumann_entropy(rho_ab)?;
    let mutual_information = s_a + s_b - s_ab;

    // The game's own bases are candidates of the same minimization, which
    // keeps the shared minimum at or below each of their averages.
    let cc = correlations::classical_correlations_with_candidates(rho_ab, opts, measurements)?;

    let stats = measurements.iter().map(|r| MeasurementStats::compute(rho_ab, r)).collect::<Result<Vec<_>>>()?;
    let per_measurement: Vec<f64> = stats.iter().map(|s| s.shannon + s.avg_conditional_entropy - s_b).collect();
    let shannon: Vec<f64> = stats.iter().map(|s| s.shannon).collect();
    let sum_avg: f64 = stats.iter().map(|s| s.avg_conditional_entropy).sum();

    let terms = FourTerms {
        uncertainty: shannon.iter().sum::<f64>() - s_a,
        conditional_entropy: s_ab - s_b,
        correlation_gap: mutual_information - k as f64 * cc.value,
        residual: sum_avg - k as f64 * cc.min_avg_entropy,
    };
    Ok(Decomposition {
        per_measurement,
        shannon,
        terms,
        s_a,
        s_b,
        mutual_information,
        classical: cc.value,
        min_avg_entropy: cc.min_avg_entropy,
    })
}

/// The four terms of the summed-entropy identity together with its left side.
pub fn decompose_uncertainty_sum(
    rho_ab: &DensityMatrix,
    measurements: &[ProjectiveMeasurement],
    opts: &CorrelationOptions,
) -> Result<(f64, FourTerms)> {
    if measurements.len() < 2 {
        return Err(Error::InvalidGame("the decomposition needs k >= 2 measurements".into()));
    }
    let d = decompose(rho_ab, measurements, opts)?;
    Ok((d.per_measurement.iter().sum(), d.terms))
}

#[derive(Clone, Debug, Serialize)]
pub struct PlayerEntry {
    pub player: String,
    pub measurement: String,
    #[serde(rename = "S_R_given_B")]
    pub s_r_given_b: f64,
}

fn player_name(p: usize, k: usize) -> String {
    if p + 1 == k {
        "Bob".to_string()
    } else {
        format!("Alice_{}", p + 1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GameReport {
    pub k: usize,
    pub players: Vec<PlayerEntry>,
    /// Labels in measurement-list order.
    pub measurements: Vec<String>,
    /// `S(R_i|B)` in measurement-list order.
    #[serde(rename = "per_measurement_S_R_given_B")]
    pub per_measurement_s_r_given_b: Vec<f64>,
    pub shannon_entropies: Vec<f64>,
    pub lhs_sum: f64,
    /// State-independent `min_σ Σ H(R_i) − S(σ)`.
    pub bound_term: f64,
    pub bound_detail: BoundTerm,
    /// `Σ H(R_i) − S(A)` evaluated on the actual state.
    pub bound_term_state: f64,
    #[serde(rename = "S_A")]
    pub s_a: f64,
    #[serde(rename = "S_B")]
    pub s_b: f64,
    #[serde(rename = "S_A_given_B")]
    pub s_a_given_b: f64,
    #[serde(rename = "I")]
    pub mutual_information: f64,
    #[serde(rename = "C")]
    pub classical: f64,
    #[serde(rename = "D")]
    pub discord: f64,
    pub min_avg_entropy: f64,
    /// `I − kC`.
    pub correlation_gap: f64,
    pub residual: f64,
    pub terms: FourTerms,
    /// `|lhs − Σ terms|`.
    pub identity_error: f64,
    /// `bound_term + S(A|B) + (I − kC)`.
    pub rhs_unclipped: f64,
    /// `bound_term + S(A|B) + max{0, I − kC}`.
    pub rhs_clipped: f64,
    /// `bound_term_state + S(A|B) + (I − kC)`.
    pub rhs_state: f64,
    /// `lhs − rhs_unclipped`.
    pub slack: f64,
    pub slack_clipped: f64,
    /// `I − kC > 0`.
    pub tightened: bool,
    /// `D > C`.
    pub discord_exceeds_classical: bool,
    /// `slack < −1e-6`.
    pub violation: bool,
    pub k_opt: KOpt,
}

/// Plays the game, computing the state-independent bound term from scratch.
pub fn play_game(spec: &GameSpec, opts: &GameOptions) -> Result<GameReport> {
    let bound = measure::bound_term(spec.measurements(), &opts.bound)?;
    play_game_with_bound(spec, &bound, opts)
}

/// Plays the game with a precomputed bound term for the same measurement list.
///
/// The bound term depends only on the measurements, so batches of games over
/// many states can share one.
pub fn play_game_with_bound(spec: &GameSpec, bound: &BoundTerm, opts: &GameOptions) -> Result<GameReport> {
    let k = spec.k();
    if bound.k != k {
        return Err(Error::InvalidGame(format!("bound term was computed for k = {}, game has k = {k}", bound.k)));
    }
    let d = decompose(spec.state(), spec.measurements(), &opts.correlation)?;
    let lhs_sum: f64 = d.per_measurement.iter().sum();
    let terms = d.terms;
    let identity_error = (lhs_sum - terms.sum()).abs();
    if !identity_error.is_finite() || identity_error > tol::ENTROPY {
        return Err(Error::Numeric(format!("summed-entropy identity off by {identity_error:e}")));
    }

    let rhs_unclipped = bound.value + terms.conditional_entropy + terms.correlation_gap;
    let rhs_clipped = bound.value + terms.conditional_entropy + terms.correlation_gap.max(0.0);
    let rhs_state = terms.uncertainty + terms.conditional_entropy + terms.correlation_gap;
    let slack = lhs_sum - rhs_unclipped;
    let discord = d.mutual_information - d.classical;

    let players = spec
        .assignment()
        .iter()
        .enumerate()
        .map(|(p, &m)| PlayerEntry {
            player: player_name(p, k),
            measurement: spec.measurements()[m].label().to_string(),
            s_r_given_b: d.per_measurement[m],
        })
        .collect();

    Ok(GameReport {
        k,
        players,
        measurements: spec.measurements().iter().map(|m| m.label().to_string()).collect(),
        per_measurement_s_r_given_b: d.per_measurement.clone(),
        shannon_entropies: d.shannon.clone(),
        lhs_sum,
        bound_term: bound.value,
        bound_detail: bound.clone(),
        bound_term_state: terms.uncertainty,
        s_a: d.s_a,
        s_b: d.s_b,
        s_a_given_b: terms.conditional_entropy,
        mutual_information: d.mutual_information,
        classical: d.classical,
        discord,
        min_avg_entropy: d.min_avg_entropy,
        correlation_gap: terms.correlation_gap,
        residual: terms.residual,
        terms,
        identity_error,
        rhs_unclipped,
        rhs_clipped,
        rhs_state,
        slack,
        slack_clipped: lhs_sum - rhs_clipped,
        tightened: terms.correlation_gap > 0.0,
        discord_exceeds_classical: discord > d.classical,
        violation: slack < -tol::SLACK,
        k_opt: correlations::k_opt(d.mutual_information, d.classical)?,
    })
}

fn check_pair(rho_ab: &DensityMatrix, r1: &ProjectiveMeasurement, r2: &ProjectiveMeasurement) -> Result<()> {
    let (d_a, _) = rho_ab.require_dims()?;
    if r1.dim() != d_a || r2.dim() != d_a {
        return Err(Error::DimensionMismatch(format!("measurements do not act on A of dimension {d_a}")));
    }
    Ok(())
}

/// Memory-assisted two-measurement bound `−log₂ c(R1, R2) + S(A|B)`.
pub fn berta_rhs(rho_ab: &DensityMatrix, r1: &ProjectiveMeasurement, r2: &ProjectiveMeasurement) -> Result<f64> {
    check_pair(rho_ab, r1, r2)?;
    Ok(-measure::overlap_c(r1, r2)?.log2() + qmat::conditional_vn_entropy(rho_ab)?)
}

/// [`berta_rhs`] tightened by `max{0, D − C}`.
pub fn pati_rhs(
    rho_ab: &DensityMatrix,
    r1: &ProjectiveMeasurement,
    r2: &ProjectiveMeasurement,
    opts: &CorrelationOptions,
) -> Result<f64> {
    let base = berta_rhs(rho_ab, r1, r2)?;
    let report = correlations::correlation_report(rho_ab, opts)?;
    Ok(base + (report.discord - report.classical).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{mub_qubit, pauli_x, pauli_z};
    use crate::states;

    fn zz() -> DensityMatrix {
        DensityMatrix::from_pure(&states::ket(4, 0), Some((2, 2))).unwrap()
    }

    fn bell() -> DensityMatrix {
        states::mixed_bell(1.0).unwrap()
    }

    #[test]
    fn conditional_entropy_fixtures() {
        assert!(conditional_measurement_entropy(&bell(), &pauli_z()).unwrap().abs() < 1e-12);
        assert!((conditional_measurement_entropy(&zz(), &pauli_x()).unwrap() - 1.0).abs() < 1e-12);
    }

    /// Under Z the mixed Bell family gives p = (a/2, 1 − a/2), a pure first
    /// conditional and a second with spectrum (a/2, 1 − a)/(1 − a/2); S(B) = h(a/2).
    #[test]
    fn conditional_entropy_mixed_bell_z() {
        let a: f64 = 0.01;
        let q = a / 2.0;
        let h = qmat::binary_entropy(q);
        let expect = h + (1.0 - q) * qmat::binary_entropy(q / (1.0 - q)) - h;
        let got = conditional_measurement_entropy(&states::mixed_bell(a).unwrap(), &pauli_z()).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.0454).abs() < 5e-4, "{got}");
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(GameSpec::new(bell(), vec![pauli_z()]), Err(Error::InvalidGame(_))));
        assert!(matches!(GameSpec::new(bell(), vec![pauli_z(), pauli_z()]), Err(Error::InvalidGame(_))));
        assert!(matches!(GameSpec::with_assignment(bell(), mub_qubit(), vec![0, 0, 1]), Err(Error::InvalidGame(_))));
        assert!(matches!(GameSpec::with_assignment(bell(), mub_qubit(), vec![0, 1]), Err(Error::InvalidGame(_))));
        assert!(GameSpec::with_assignment(bell(), mub_qubit(), vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn bell_decomposition() {
        let (lhs, t) =
            decompose_uncertainty_sum(&bell(), &[pauli_z(), pauli_x()], &CorrelationOptions::default()).unwrap();
        assert!(lhs.abs() < 1e-12);
        assert!((t.uncertainty - 1.0).abs() < 1e-12);
        assert!((t.conditional_entropy + 1.0).abs() < 1e-12);
        assert!(t.correlation_gap.abs() < 1e-9);
        assert!(t.residual.abs() < 1e-9);
    }

    #[test]
    fn product_decomposition() {
        let rho = DensityMatrix::product(
            &DensityMatrix::from_pure(&states::ket(2, 0), None).unwrap(),
            &states::random_density(3, 2, 1).unwrap(),
        );
        let (lhs, t) =
            decompose_uncertainty_sum(&rho, &[pauli_z(), pauli_x()], &CorrelationOptions::default()).unwrap();
        assert!(t.conditional_entropy.abs() < 1e-9);
        assert!(t.correlation_gap.abs() < 1e-9);
        assert!(t.residual >= -1e-9);
        assert!((lhs - t.sum()).abs() < 1e-12);
    }

    #[test]
    fn bell_games() {
        let opts = GameOptions::default();
        let r = play_game(&GameSpec::new(bell(), vec![pauli_z(), pauli_x()]).unwrap(), &opts).unwrap();
        assert!(r.lhs_sum.abs() < 1e-9);
        assert!(r.rhs_unclipped.abs() < 1e-9);
        assert!(r.slack.abs() < 1e-6);
        assert!(!r.violation);

        let r3 = play_game(&GameSpec::new(bell(), mub_qubit()).unwrap(), &opts).unwrap();
        assert!(r3.lhs_sum.abs() < 1e-9);
        assert!(r3.rhs_unclipped.abs() < 1e-9);
        assert!((r3.rhs_clipped - 1.0).abs() < 1e-9);
        assert!(r3.slack_clipped < -0.9);
        assert!(!r3.tightened);
        assert_eq!(r3.players[2].player, "Bob");
    }

    #[test]
    fn product_game_is_tight() {
        let r = play_game(&GameSpec::new(zz(), vec![pauli_z(), pauli_x()]).unwrap(), &GameOptions::default()).unwrap();
        assert!((r.lhs_sum - 1.0).abs() < 1e-9);
        assert!((r.rhs_unclipped - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_bell_mub_game_is_tightened() {
        let r =
            play_game(&GameSpec::new(states::mixed_bell(0.01).unwrap(), mub_qubit()).unwrap(), &GameOptions::default())
                .unwrap();
        assert!(r.tightened);
        assert!((r.correlation_gap - 0.009457).abs() < 1e-5, "{}", r.correlation_gap);
        assert!(r.slack >= -1e-6);
    }

    #[test]
    fn bound_term_mismatch_rejected() {
        let bound = measure::bound_term(&[pauli_z(), pauli_x()], &BoundOptions::default()).unwrap();
        let spec = GameSpec::new(bell(), mub_qubit()).unwrap();
        assert!(matches!(play_game_with_bound(&spec, &bound, &GameOptions::default()), Err(Error::InvalidGame(_))));
    }

    #[test]
    fn two_measurement_bounds() {
        let opts = CorrelationOptions::default();
        let (z, x) = (pauli_z(), pauli_x());
        assert!(berta_rhs(&bell(), &z, &x).unwrap().abs() < 1e-12);
        assert!((berta_rhs(&zz(), &z, &x).unwrap() - 1.0).abs() < 1e-12);
        let mb = states::mixed_bell(0.01).unwrap();
        assert!((berta_rhs(&mb, &z, &x).unwrap() - 1.0354).abs() < 5e-4);

        assert!(pati_rhs(&bell(), &z, &x, &opts).unwrap().abs() < 1e-9);
        let prod = DensityMatrix::product(
            &states::random_density(5, 2, 2).unwrap(),
            &states::random_density(6, 2, 2).unwrap(),
        );
        let b = berta_rhs(&prod, &z, &x).unwrap();
        assert!((pati_rhs(&prod, &z, &x, &opts).unwrap() - b).abs() < 1e-9);
    }
}
