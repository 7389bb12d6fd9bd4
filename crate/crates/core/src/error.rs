use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in unrelated extension towers")]
    TowerMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot adjoin a root of a constant polynomial")]
    ConstantPolynomial,
    #[error("extension tower degree {requested} exceeds the configured limit {limit}")]
    DegreeGuard { requested: usize, limit: usize },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is not regular in y")]
    NotRegular,
    #[error("polynomial does not vanish at the origin")]
    NonVanishing,
    #[error("component {0} does not vanish at the origin")]
    ComponentNonVanishing(usize),
    #[error("shear parameter does not make the product regular in y")]
    ShearNotRegular,
    #[error("branch separation did not terminate; input is not squarefree")]
    NotSquarefree,
    #[error("no components given")]
    EmptyMapping,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate slope fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// True for failures caused by a resource limit rather than bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::DegreeGuard { .. } | Error::NotSquarefree)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
