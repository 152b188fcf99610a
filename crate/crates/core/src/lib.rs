//! Stationary quantum scattering on a ring built from two Y-junctions.
//!
//! Each junction is a point interaction parametrized by U(3). The crate builds
//! the node scattering matrices, assembles the two-terminal ring S-matrix,
//! detects localized (bound-in-continuum) states through rank deficiency of the
//! matching matrix, and threads an Aharonov-Bohm flux through the ring. The
//! [`oracle`] module solves the raw junction conditions directly and is used to
//! cross-check every closed form.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound_states;
pub mod error;
pub mod junction;
pub mod magnetic;
pub mod oracle;
pub mod ring;
pub mod su3;

mod linalg;

pub use num_complex::Complex64;

pub use bound_states::{
    build_m, find_localized_k, localized_wavefunction, numerical_rank, LocalizedHit,
    LocalizedState, MatchingMatrix, DEFAULT_RANK_TOL,
};
pub use error::{Error, Result};
pub use junction::{s0_entry, scattering_matrix, Axis, NodeKind, NodeScattering};
pub use magnetic::{
    flux_modified_node_ii, flux_phase_matrix, flux_ring_response, flux_ring_smatrix,
    flux_rt_special, special_switch_node, ClosedFormAudit, FluxPhase, FluxResponse,
};
pub use oracle::{
    expm_series, reconstruct_node_smatrix, solve_junction_direct, solve_ring_direct,
    AmplitudeVector, Incoming, OracleSolution,
};
pub use ring::{ring_response, ring_smatrix, symmetric_rt, RingResponse, RingSMatrix, RingSystem};
pub use su3::{build_u, build_v, exp_i_lambda, gell_mann, EulerAngles, NodeParams, UnitaryMatrix3};

/// 3x3 complex matrix used throughout the crate.
pub type CMatrix3 = nalgebra::Matrix3<Complex64>;
/// 2x2 complex matrix (ring blocks and the ring S-matrix).
pub type CMatrix2 = nalgebra::Matrix2<Complex64>;
