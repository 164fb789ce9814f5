use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    MixedDimensions { expected: usize, found: usize },
    #[error("entry table has {found} values, expected {expected}")]
    BadEntryCount { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("index {index} out of range for Z_{bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("{p}·{q} is not a factorization of {d}")]
    BadFactorization { p: usize, q: usize, d: usize },
    #[error("operation requires a PSI/PHI family, got a basis family")]
    WrongFamilyKind,
    #[error("unsupported dimension {d}: {reason}")]
    BadDimension { d: usize, reason: &'static str },
    #[error("state is not KD classical (worst cell ({}, {}))", .witness.0, .witness.1)]
    NotClassical { witness: (usize, usize) },
    #[error("quadruple condition ({condition}) fails at ({i},{j},{k},{l}), defect {defect:e}")]
    ConditionsFailed {
        condition: &'static str,
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        defect: f64,
    },
    #[error("state is not in the real span of the chosen sets (residual {residual:e})")]
    NotInSpan { residual: f64 },
    #[error("state trace {trace} is not 1")]
    NotUnitTrace { trace: f64 },
    #[error("solver hit its iteration cap ({iterations}) before certifying optimality")]
    SolverDidNotConverge { iterations: usize },
    #[error("perturbation direction is zero")]
    ZeroDirection,
    #[error("expected three distinct families out of A, B, C, D")]
    BadSetChoice,
    #[error("projector set is empty")]
    EmptySet,
    #[error("reconstruction residual {residual:e} exceeds tolerance")]
    ReconstructionFailed { residual: f64 },
}
