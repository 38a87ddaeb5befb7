//! Error type shared across the synthesis pipeline.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate polynomial")]
    DegeneratePolynomial,

    #[error("evaluation at pole (s = {0})")]
    EvaluationAtPole(num_complex::Complex64),

    #[error("not interior RHP: zero at {0} has nonpositive real part")]
    NotInteriorRhp(num_complex::Complex64),

    #[error("unbounded on axis near omega = {0}")]
    UnboundedOnAxis(f64),

    #[error("boundary zero suspected on search box edge")]
    BoundaryZeroSuspected,

    #[error("unresolved cluster: winding count {expected} but {found} zeros converged")]
    UnresolvedCluster { expected: usize, found: usize },

    #[error("marginal chain, condition (ii) violated")]
    MarginalChain,

    #[error("imaginary-axis zero detected: min |Q(j w)| = {0:.3e} relative")]
    ImaginaryAxisZero(f64),

    #[error("infinitely many plant zeros unsupported")]
    InfinitelyManyPlantZeros,

    #[error("non-integer relative degree: fitted slope {0:.3} dB/decade")]
    NonIntegerRelativeDegree(f64),

    #[error("multiple interpolation point unsupported")]
    RepeatedInterpolationPoint,

    #[error("interpolation point maps outside the unit disc")]
    PointOutsideDisc,

    #[error("infeasible within ell range")]
    InfeasibleEllRange,

    #[error("infeasible gamma")]
    InfeasibleGamma,

    #[error("strictly suboptimal gamma required")]
    NotStrictlySuboptimal,

    #[error("infeasible rho")]
    InfeasibleRho,

    #[error("argument outside map domain")]
    OutsideMapDomain,

    #[error("F is not a unit")]
    NotAUnit,

    #[error("outer not boundedly invertible")]
    OuterNotInvertible,

    #[error("assembly inconsistent: sensitivity identity residual {0:.3e}")]
    AssemblyInconsistent(f64),

    #[error("invalid quasi-polynomial: {0}")]
    InvalidQuasiPolynomial(String),

    #[error("invalid plant file: {0}")]
    InvalidPlantFile(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable process exit code for scripting: 2 infeasible, 3 input error,
    /// 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleEllRange
            | Error::InfeasibleGamma
            | Error::InfeasibleRho
            | Error::NotAUnit => 2,
            Error::InvalidPlantFile(_) | Error::InvalidQuasiPolynomial(_) => 3,
            _ => 4,
        }
    }
}
