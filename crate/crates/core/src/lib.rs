//! Simulation and verification of entanglement-assisted local discrimination
//! of orthogonal product states in a 3x3x3 system.
//!
//! The crate builds the twelve-state orthogonal product instance, certifies
//! its nonlocality through the triviality of orthogonality-preserving local
//! measurements, and executes measurement-tree protocols that consume GHZ
//! SLOCC-class resource states of varying entanglement. Branch masses,
//! reduced-state concurrences and the three-tangle are cross-checked between
//! the simulator and closed forms, and parameter sweeps export the error
//! versus entanglement trade-off curves.
//!
//! Modules:
//!
//! * [`tensor`]: labeled multipartite state vectors, operators, embeddings
//!   and partial traces.
//! * [`linalg`]: dense complex matrices, Hermitian Jacobi eigensolver,
//!   one-sided Jacobi singular values, rank.
//! * [`measures`]: Wootters concurrence and the three-tangle.
//! * [`ghz`]: the (a, b, c, r) filter parametrization of the GHZ class.
//! * [`states`]: the canonical twelve-state set and the set-file parser.
//! * [`locc`]: local measurements, protocol trees, execution reports and the
//!   measurement-triviality checker.
//! * [`protocols`]: the five built-in protocols and their mass formulas.
//! * [`sweeps`]: parameter sweeps, error curves and CSV output.
//! * [`verify`]: the named verification suites.

pub mod error;
pub mod ghz;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod protocols;
pub mod states;
pub mod sweeps;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use ghz::{build_ghz_state, classify_case, closed_form_concurrences, normalization_k, CaseLabel, GhzClassState, GhzParams};
pub use locc::{
    apply_measurement, check_orthogonality_preserving, measurement_template,
    opm_triviality_check, run_protocol, Leaf, LocalMeasurement, OpmConstraintReport,
    ProtocolNode, RunReport,
};
pub use measures::{concurrence_mixed, concurrence_pure_cut, tangle, ConcurrenceResult, TangleResult};
pub use protocols::{
    execute, family_protocol, make_resource, protocol_corollary1, protocol_corollary2,
    protocol_theorem1, protocol_theorem2, protocol_theorem3, resource_concurrences,
    resource_tangle, residual_formula, ProtocolKind, ResourceFamily, ResourceSpec,
};
pub use states::{build_canonical_set, parse_state_set, verify_orthogonality, ProductState, StateSet};
pub use sweeps::{pe_vs_measure, sweep, CurvePoint, Measure, SweepRecord};
pub use tensor::{
    embed_local, inner, partial_trace, reduced_state, tensor, DensityMatrix, Operator, Slot,
    StateVector, SystemLayout,
};
pub use verify::{run_all, SuiteResult, VerifyOptions};
