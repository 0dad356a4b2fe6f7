//! Mutual information, classical correlations, discord and the player bound
//! `k_opt = ⌊I/C⌋`.
//!
//! Classical correlations are optimized over rank-1 projective measurements
//! on a qubit subsystem A (or on B after an explicit subsystem swap).

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measure::{self, BlochAngles, ProjectiveMeasurement};
use crate::optim::{self, NelderMead};
use crate::qmat::{self, Subsystem};
use crate::states::DensityMatrix;
use crate::tol;

/// Maximum number of players who benefit from non-classical correlations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KOpt {
    Finite(u64),
    /// `C` vanishes while `I` does not.
    Unbounded,
    /// Both `I` and `C` vanish.
    NoCorrelations,
}

impl fmt::Display for KOpt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KOpt::Finite(k) => write!(f, "{k}"),
            KOpt::Unbounded => f.write_str("unbounded"),
            KOpt::NoCorrelations => f.write_str("none"),
        }
    }
}

impl Serialize for KOpt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KOpt::Finite(k) => s.serialize_u64(*k),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

fn non_negative(name: &str, x: f64) -> Result<f64> {
    if x.is_nan() || x < -tol::CLASSICAL_ZERO {
        return Err(Error::OutOfRange(format!("{name} = {x} must be non-negative")));
    }
    Ok(x.max(0.0))
}

/// `⌊I/C⌋`, with `Unbounded` when only `C` vanishes.
///
/// A ratio within 1e-9 of an integer is rounded first, so a state with
/// `I = 2C` exactly reports 2 rather than 1 after rounding noise.
pub fn k_opt(mutual_information: f64, classical: f64) -> Result<KOpt> {
    let i = non_negative("I", mutual_information)?;
    let c = non_negative("C", classical)?;
    if c > tol::CLASSICAL_ZERO {
        let ratio = i / c;
        let nearest = ratio.round();
        let ratio = if (ratio - nearest).abs() <= tol::RATIO_INTEGER { nearest } else { ratio };
        Ok(KOpt::Finite(ratio.floor() as u64))
    } else if i > tol::CLASSICAL_ZERO {
        Ok(KOpt::Unbounded)
    } else {
        Ok(KOpt::NoCorrelations)
    }
}

/// `I = S(A) + S(B) − S(AB)`.
pub fn mutual_information(rho_ab: &DensityMatrix) -> Result<f64> {
    let s_a = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::A)?)?;
    let s_b = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::B)?)?;
    let s_ab = qmat::von_neumann_entropy(rho_ab)?;
    Ok(s_a + s_b - s_ab)
}

/// Search settings for the measurement-axis optimization.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationOptions {
    /// Polar angles on `[0, π]`, endpoints included.
    pub theta_steps: usize,
    /// Azimuths on `[0, 2π]`, endpoints included.
    pub phi_steps: usize,
    /// Number of best grid points polished by Nelder–Mead.
    pub refine_starts: usize,
    /// Which subsystem is measured.
    pub measured: Subsystem,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        Self { theta_steps: 181, phi_steps: 361, refine_starts: 10, measured: Subsystem::A }
    }
}

/// Outcome of maximizing `S(B) − Σ_j p_j S(ρ_B|j)` over measurement axes.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalCorrelations {
    pub value: f64,
    pub angles: BlochAngles,
    /// The achieved `min Σ_j p_j S(ρ_j)`.
    pub min_avg_entropy: f64,
    pub evals: usize,
}

/// Classical correlations `C` for measurements on `opts.measured`.
pub fn classical_correlations(rho_ab: &DensityMatrix, opts: &CorrelationOptions) -> Result<ClassicalCorrelations> {
    classical_correlations_with_candidates(rho_ab, opts, &[])
}

/// As [`classical_correlations`], additionally evaluating the given qubit
/// bases so the reported minimum never exceeds their average conditional
/// entropy.
pub fn classical_correlations_with_candidates(
    rho_ab: &DensityMatrix,
    opts: &CorrelationOptions,
    candidates: &[ProjectiveMeasurement],
) -> Result<ClassicalCorrelations> {
    let swapped;
    let rho = match opts.measured {
        Subsystem::A => rho_ab,
        Subsystem::B => {
            swapped = rho_ab.swap_subsystems()?;
            &swapped
        }
    };
    let mut cc = classical_on_a(rho, opts)?;
    let (_, d_b) = rho.require_dims()?;
    for m in candidates {
        let Some(angles) = m.bloch_angles() else {
            return Err(Error::UnsupportedDimension(format!("candidate `{}` is not a qubit measurement", m.label())));
        };
        let v = measure::average_conditional_entropy(rho.matrix(), d_b, m.basis());
        cc.evals += 1;
        if v < cc.min_avg_entropy {
            cc.value += cc.min_avg_entropy - v;
            cc.min_avg_entropy = v;
            cc.angles = angles;
        }
    }
    Ok(cc)
}

fn classical_on_a(rho_ab: &DensityMatrix, opts: &CorrelationOptions) -> Result<ClassicalCorrelations> {
    let (d_a, d_b) = rho_ab.require_dims()?;
    if d_a != 2 {
        return Err(Error::UnsupportedDimension(format!(
            "classical correlations are optimized over qubit measurements; measured subsystem has dimension {d_a}"
        )));
    }
    if opts.theta_steps < 2 || opts.phi_steps < 2 {
        return Err(Error::OutOfRange("angle grid needs at least 2x2 points".into()));
    }
    let s_b = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::B)?)?;
    let m = rho_ab.matrix();
    let (nt, np) = (opts.theta_steps, opts.phi_steps);
    let angles_at = |idx: usize| BlochAngles {
        theta: optim::closed_grid(0.0, PI, nt, idx / np),
        phi: optim::closed_grid(0.0, TAU, np, idx % np),
    };
    let objective = |a: BlochAngles| measure::average_conditional_entropy_at(m, d_b, a);

    let starts = optim::grid_best(nt * np, opts.refine_starts.max(1), |idx| objective(angles_at(idx)));
    let mut evals = nt * np;
    let mut best = (starts[0].1, BlochAngles::normalized(angles_at(starts[0].0).theta, angles_at(starts[0].0).phi));

    let nm = NelderMead {
        initial_step: vec![PI / (nt - 1) as f64, TAU / (np - 1) as f64],
        xatol: 1e-10,
        fatol: 1e-16,
        max_evals: 1000,
    };
    for &(idx, _) in starts.iter().take(opts.refine_starts) {
        let a = angles_at(idx);
        let local = nm.minimize(|x| objective(BlochAngles { theta: x[0], phi: x[1] }), &[a.theta, a.phi]);
        evals += local.evals;
        if local.value < best.0 {
            best = (local.value, BlochAngles::normalized(local.x[0], local.x[1]));
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Numeric("classical-correlation objective is not finite".into()));
    }
    Ok(ClassicalCorrelations { value: s_b - best.0, angles: best.1, min_avg_entropy: best.0, evals })
}

/// One-way discord `D = I − C` from the same optimizer run as `C`.
pub fn discord(rho_ab: &DensityMatrix, opts: &CorrelationOptions) -> Result<f64> {
    Ok(correlation_report(rho_ab, opts)?.discord)
}

/// Every correlation quantity of a two-qubit state from one optimizer run.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    #[serde(rename = "S_A")]
    pub s_a: f64,
    #[serde(rename = "S_B")]
    pub s_b: f64,
    #[serde(rename = "S_AB")]
    pub s_ab: f64,
    #[serde(rename = "S_A_given_B")]
    pub s_a_given_b: f64,
    #[serde(rename = "I")]
    pub mutual_information: f64,
    #[serde(rename = "C")]
    pub classical: f64,
    #[serde(rename = "D")]
    pub discord: f64,
    pub k_opt: KOpt,
    pub opt_angles: BlochAngles,
    pub opt_min_avg_entropy: f64,
    pub optimizer_evals: usize,
    /// Set when a discord value in `[-1e-6, 0)` was clamped to zero.
    pub discord_clamped: bool,
    pub measured_subsystem: Subsystem,
    pub measurement_class: &'static str,
}

impl CorrelationReport {
    /// `I / C`; infinite when only `C` vanishes and NaN when both do.
    pub fn ratio(&self) -> f64 {
        match self.k_opt {
            KOpt::NoCorrelations => f64::NAN,
            KOpt::Unbounded => f64::INFINITY,
            KOpt::Finite(_) => self.mutual_information / self.classical,
        }
    }
}

pub fn correlation_report(rho_ab: &DensityMatrix, opts: &CorrelationOptions) -> Result<CorrelationReport> {
    let s_a = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::A)?)?;
    let s_b = qmat::von_neumann_entropy(&rho_ab.reduced(Subsystem::B)?)?;
    let s_ab = qmat::von_neumann_entropy(rho_ab)?;
    let i = s_a + s_b - s_ab;
    if i < -tol::ENTROPY {
        return Err(Error::Numeric(format!("mutual information {i:e} is negative")));
    }
    let cc = classical_correlations(rho_ab, opts)?;
    if cc.value < -tol::ENTROPY {
        return Err(Error::Numeric(format!("classical correlations {:e} are negative", cc.value)));
    }
    let raw_discord = i - cc.value;
    if raw_discord < -tol::DISCORD_CLAMP {
        return Err(Error::Numeric(format!(
            "discord {raw_discord:e} is below -{:e}; classical correlations exceed the mutual information",
            tol::DISCORD_CLAMP
        )));
    }
    let discord_clamped = raw_discord < 0.0;
    Ok(CorrelationReport {
        s_a,
        s_b,
        s_ab,
        s_a_given_b: s_ab - s_b,
        mutual_information: i,
        classical: cc.value,
        discord: raw_discord.max(0.0),
        k_opt: k_opt(i, cc.value)?,
        opt_angles: cc.angles,
        opt_min_avg_entropy: cc.min_avg_entropy,
        optimizer_evals: cc.evals,
        discord_clamped,
        measured_subsystem: opts.measured,
        measurement_class: "rank-1 projective",
    })
}
