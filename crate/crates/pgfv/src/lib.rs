//! Mixed finite elements and Petrov-Galerkin finite volumes for the
//! homogeneous Dirichlet Poisson problem on triangulated polygonal domains.
//!
//! The library provides three discretizations of `-Δu = f` on the unit
//! square:
//!
//! * the classical lowest-order Raviart-Thomas mixed method ([`mixed_fem`]),
//! * a two-point finite-volume baseline ([`mixed_fem::solve_two_point_fv`]),
//! * a Petrov-Galerkin finite-volume scheme whose interface fluxes come from
//!   a six-point stencil that is exact for affine fields ([`pg_stencil`],
//!   [`fv_solver`]),
//!
//! together with a manufactured-solution verification harness ([`verify`]).

pub mod fv_solver;
pub mod linalg;
pub mod mesh;
pub mod mixed_fem;
pub mod pg_stencil;
pub mod quadrature;
pub mod rt0;
pub mod svg;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh quality: {0}")]
    MeshQuality(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("matrix is singular to working precision (pivot {pivot:.3e} at step {step})")]
    Singular { step: usize, pivot: f64 },

    #[error("rank-deficient constraint matrix: numerical rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("constraint system for edge {edge} is rank deficient")]
    ConstraintRank { edge: usize },

    #[error("mesh not admissible for the two-point scheme: nonpositive distance {distance:.3e} on edge {edge}")]
    Admissibility { edge: usize, distance: f64 },

    #[error("edge {0} has no flux closure")]
    UncoveredEdge(usize),

    #[error("unknown manufactured case `{0}` (expected `sinsin` or `bubble`)")]
    UnknownCase(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
