use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grading parameters: {0}")]
    InvalidParams(String),

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("degree violation in d({from}): term {to}*t^{r} has degree {found}, expected {expected}")]
    DegreeViolation { from: String, to: String, r: i64, expected: i64, found: i64 },

    #[error("action increase in d({from}): term {to}*t^{r} has action {term_action} > {source_action}")]
    ActionIncrease { from: String, to: String, r: i64, source_action: f64, term_action: f64 },

    #[error("d^2 != 0 on {generator}: d(d({generator})) = {residue}")]
    SquareNonzero { generator: String, residue: String },

    #[error("window endpoint {0} lies in the action spectrum")]
    EndpointInSpectrum(f64),

    #[error("invalid window ({0}, {1})")]
    InvalidWindow(f64, f64),

    #[error("windows ({0}, {1}) and ({2}, {3}) are not comparable")]
    NotComparable(f64, f64, f64, f64),

    #[error("exact triangle fails at node {node} in degree {degree}")]
    NotExact { node: &'static str, degree: i64 },

    #[error("spectrum point in collar [{0}, {1}]")]
    SpectrumInCollar(f64, f64),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("no primitive within budget {budget} (death action {death})")]
    NoPrimitive { death: f64, budget: f64 },

    #[error("not a chain map: d(f({0})) != f(d({0}))")]
    NotChainMap(String),

    #[error("shift budget exceeded at {generator}: realized {realized} > budget {budget}")]
    ShiftExceeded { generator: String, realized: f64, budget: f64 },

    #[error("chain homotopy check failed: {0}")]
    HomotopyFails(String),

    #[error("homotopy budget exceeded at {generator}: realized {realized} > budget {budget}")]
    BudgetExceeded { generator: String, realized: f64, budget: f64 },

    #[error("supremum is not finite")]
    NonFiniteSup,

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("window endpoint {0} is a critical value")]
    EndpointIsCriticalValue(f64),

    #[error("integrator step failed to converge at t = {0}")]
    StepFailure(f64),

    #[error("reparametrization target {alpha} exceeds m(H) = {max}")]
    AlphaTooLarge { alpha: f64, max: f64 },

    #[error("cannot build reparametrization: {0}")]
    InfeasibleRho(String),

    #[error("invalid cutoff profile: {0}")]
    ProfileInvalid(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error("collar violation: {0}")]
    CollarViolation(String),

    #[error("local isomorphism fails: {0}")]
    LocalIsoFails(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// `true` when the error records a failed mathematical check on
    /// well-formed input, as opposed to malformed or unusable input.
    pub fn is_verdict(&self) -> bool {
        matches!(
            self,
            Error::DegreeViolation { .. }
                | Error::ActionIncrease { .. }
                | Error::SquareNonzero { .. }
                | Error::NotExact { .. }
                | Error::NotChainMap(_)
                | Error::ShiftExceeded { .. }
                | Error::HomotopyFails(_)
                | Error::BudgetExceeded { .. }
                | Error::NoPrimitive { .. }
                | Error::LocalIsoFails(_)
                | Error::IndexMismatch(_)
        )
    }
}

/// Reads a file, naming the path in the error.
pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}
