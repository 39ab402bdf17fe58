use hierasm_core::hull::HullError;
use hierasm_core::kinematics::KinematicsError;
use hierasm_core::placement::PlacementError;
use hierasm_core::sequence::SequenceError;
use hierasm_core::TreeError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GatewayError {
    #[error("{0}")]
    Io(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
}

impl GatewayError {
    /// Machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            GatewayError::Io(_) => "IO",
            GatewayError::Schema(_) => "SCHEMA",
            GatewayError::DuplicateId(_) => "DUP_ID",
            GatewayError::Tree(e) => e.code(),
            GatewayError::Hull(HullError::UnknownId(_)) => "UnknownId",
            GatewayError::Hull(_) => "HULL",
            GatewayError::Placement(PlacementError::Infeasible(_)) => "Infeasible",
            GatewayError::Placement(PlacementError::NoConvergence { .. }) => "NoConvergence",
            GatewayError::Placement(PlacementError::InvalidSpec(_)) => "InvalidSpec",
            GatewayError::Placement(_) => "PLACEMENT",
            GatewayError::Sequence(SequenceError::IkFailure(_)) => "IKFailure",
            GatewayError::Sequence(SequenceError::CyclicPrecedence) => "CyclicPrecedence",
            GatewayError::Sequence(_) => "SEQUENCE",
            GatewayError::Kinematics(_) => "KINEMATICS",
            GatewayError::UnknownSession(_) => "UnknownSession",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "code": self.code(), "message": self.to_string() } })
    }
}
