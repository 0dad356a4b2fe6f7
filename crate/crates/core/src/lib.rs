//! Correlation measures of bipartite quantum states and the k-party entropic
//! uncertainty game.
//!
//! The crate computes von Neumann entropies, mutual information `I`,
//! classical correlations `C` (optimized over projective measurements on a
//! qubit), discord `D = I − C`, and the largest number of players
//! `k_opt = ⌊I/C⌋` whose summed conditional measurement entropies are
//! tightened by non-classical correlations.
//!
//! ```
//! use eupgame_core::{correlation_report, mixed_bell, CorrelationOptions, KOpt};
//!
//! let rho = mixed_bell(1.0).unwrap();
//! let report = correlation_report(&rho, &CorrelationOptions::default()).unwrap();
//! assert!((report.mutual_information - 2.0).abs() < 1e-9);
//! assert_eq!(report.k_opt, KOpt::Finite(2));
//! ```

pub mod correlations;
pub mod error;
pub mod game;
pub mod literal;
pub mod measure;
pub mod optim;
pub mod qmat;
pub mod report;
pub mod states;
pub mod tol;

pub use correlations::{
    classical_correlations, correlation_report, discord, k_opt, mutual_information, ClassicalCorrelations,
    CorrelationOptions, CorrelationReport, KOpt,
};
pub use error::{Error, Result};
pub use game::{
    berta_rhs, conditional_measurement_entropy, decompose_uncertainty_sum, pati_rhs, play_game, play_game_with_bound,
    FourTerms, GameOptions, GameReport, GameSpec,
};
pub use measure::{
    bound_term, measure_on_a, mub_qubit, outcome_distribution, overlap_c, projective_from_bloch, sample_outcomes,
    BlochAngles, BoundOptions, BoundTerm, OutcomeEnsemble, ProjectiveMeasurement,
};
pub use qmat::{
    conditional_vn_entropy, hermitian_eig, partial_trace, shannon_entropy, tensor_product, von_neumann_entropy,
    ComplexMatrix, HermitianEigenDecomposition, ProbabilityVector, Subsystem,
};
pub use states::{mixed_bell, random_density, werner, DensityMatrix};
