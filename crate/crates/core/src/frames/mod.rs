//! Canonical forms on frame-bundle charts, their structure identities,
//! fiber integration, and transverse connection verification.

pub mod canonical;
mod connection;
pub mod form;

pub use canonical::{
    check_invariance, frame_tangent_to_y, frame_to_y_point, push_frame_tangent,
    theta_numeric,
};
pub use connection::{
    affine_cocycle_residual, connection_from_conjugacy, projective_cocycle_residual,
    schwarzian, verify_affine_connection, verify_projective_connection,
    ConnectionCandidate, ConnectionReport, GeneratorCheck, GridSpec,
    DEFAULT_COCYCLE_TOLERANCE,
};
pub use form::{
    cl1_form, gvl_form, gysin_chain_sign, structure_identities, theta, Chart, CoordForm,
    IdentityCheck, IdentityReport,
};

use thiserror::Error;

use crate::jets::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FramesError {
    #[error("frame or map is not regular")]
    NotRegular,
    #[error("canonical form level {k} needs jet order at least {}", k + 1)]
    OrderTooSmall { k: usize, q: usize },
    #[error("tangent vector has {got} components, frame needs {want}")]
    TangentLength { got: usize, want: usize },
    #[error("form lives in the wrong chart for this operation")]
    WrongChart,
    #[error("form does not descend to the quotient chart: {0}")]
    NotProjectable(String),
    #[error("map evaluation failed: {0}")]
    MapEvaluation(String),
    #[error("evaluation error: {0}")]
    Eval(#[from] crate::expr::EvalError),
    #[error("jet error: {0}")]
    Jet(#[from] JetError),
}
