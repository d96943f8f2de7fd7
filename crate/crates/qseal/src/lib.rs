//! Quantum bit seals: encode one classical bit so that anyone can read it
//! better than chance, while any reading disturbs the state detectably.
//!
//! The crate models sealing schemes as pairs of bipartite pure states,
//! constructs the optimal reading measurement from the Helstrom split of
//! the reduced states, computes the resulting guessing probability and
//! average fidelity both by exact simulation and in closed form, and
//! verifies the min-max fidelity bound by constrained maximization over
//! general measurement families.
//!
//! Modules:
//!
//! - [`linalg`]: dense complex matrices, a Jacobi Hermitian eigensolver,
//!   partial trace, and trace distance.
//! - [`seal`]: scheme construction, analysis, and file persistence.
//! - [`attack`]: Helstrom decomposition, the optimal reading POVM,
//!   measurement channels, and guessing probability.
//! - [`fidelity`]: average fidelity by simulation and closed forms.
//! - [`optimizer`]: derivative-free constrained maximization used as a
//!   numerical check on the closed-form bound.
//! - [`report`]: tradeoff curves and deterministic CSV/text rendering.

pub mod attack;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod optimizer;
pub mod report;
pub mod seal;

pub use attack::{
    apply_channel, build_attack, classical_l1, guess_probability, helstrom_decomposition,
    outcome_distribution, overlap_report, HelstromDecomposition, OverlapReport, Povm,
};
pub use error::{Error, Result};
pub use fidelity::{
    average_fidelity, fbar_at_a, fbar_minmax, verification_pass_probability, FidelityReport,
};
pub use linalg::{
    hermitian_eigendecomposition, partial_trace_over_a, tensor_product, trace_distance,
    ComplexMatrix, EigenDecomposition, StateVector,
};
pub use optimizer::{
    maximize_fidelity, retract_to_povm, sample_parameterization, verify_bound, BoundReport,
    OptimizationResult, PovmParameterization,
};
pub use report::{analyze_at, curve_to_csv, tradeoff_curve, AnalyzeReport, TradeoffPoint};
pub use seal::{
    analyze_scheme, load_scheme, make_product_scheme, make_stringent_scheme, save_scheme,
    SealScheme, SchemeAnalysis,
};
