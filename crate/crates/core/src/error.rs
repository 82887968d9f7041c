use alloc::string::String;
use alloc::vec::Vec;

use crate::Q;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("operands belong to different étale specs")]
    SpecMismatch,
    #[error("operands belong to different associative algebras")]
    AlgebraMismatch,
    #[error("element is not invertible (norm is zero)")]
    NotInvertible,
    #[error("map {map} is not defined on {spec}")]
    MapUndefinedForSpec { map: &'static str, spec: String },
    #[error("invalid étale spec: {0}")]
    InvalidSpec(String),
    #[error("invalid associative algebra: {0}")]
    InvalidAlgebra(String),
    #[error("element is not hermitian for the involution")]
    NotHermitian,
    #[error("pair is not admissible: {0}")]
    NotAdmissible(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is too large for symbolic expansion")]
    DimensionTooLarge(usize),
    #[error("axiom `{identity}` fails at witness {}", crate::rational::show(witness))]
    AxiomFailure { identity: String, witness: Vec<Q> },
    #[error("certification failed: {0}")]
    CertificationFailure(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("value expected in the base field is not fixed by conjugation: {0}")]
    NotBaseValued(String),
    #[error("word does not fix the identity")]
    NotAutomorphism,
    #[error("word does not leave the subalgebra invariant")]
    NotInvariant,
    #[error("restriction is not a right homothety composed with a Galois map")]
    NoDecomposition,
    #[error("restriction to the subalgebra is not a right homothety")]
    RestrictionNotHomothety,
    #[error("unexpected subalgebra dimension {0}")]
    UnexpectedDimension(usize),
    #[error("singular linear system")]
    Singular,
    #[error("operands belong to different cubic norm structures")]
    StructureMismatch,
    #[error("word is undefined at step {step}")]
    Undefined { step: usize },
}
