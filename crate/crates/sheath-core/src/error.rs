use thiserror::Error;

/// Error type shared by every solver and diagnostic in the crate.
#[derive(Debug, Error)]
pub enum SheathError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("branch exceeded: phi = {phi} is below f(c_inf) = {f_at_c}; no density on the admissible branch")]
    BranchExceeded { phi: f64, f_at_c: f64 },

    #[error("root finding failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("stationary existence conditions violated: V(phi_b) = {v_at_phib}, f(c_inf) = {f_at_c}")]
    ExistenceViolation { v_at_phib: f64, f_at_c: f64 },

    #[error("Sagdeev potential vanishes at interior phi = {phi}; quadrature would be singular")]
    QuadratureSingularity { phi: f64 },

    #[error("profile tail too short for decay fitting: {0}")]
    InsufficientTail(String),

    #[error("finite-difference noise floor {floor:e} exceeds measured sup {sup:e} for derivative order {order}")]
    InsufficientResolution { order: usize, floor: f64, sup: f64 },

    #[error("Poisson Newton iteration diverged after {iters} iterations (residual {residual:e})")]
    NewtonDivergence { iters: usize, residual: f64 },

    #[error("characteristic speed lambda3 = {lambda3} >= 0 at x = {x} under strict upwinding")]
    CharacteristicSignViolation { x: f64, lambda3: f64 },

    #[error("temperature positivity lost at x = {x} (T = {t})")]
    PositivityLoss { x: f64, t: f64 },

    #[error("time step {dt} exceeds CFL limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("decay fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("pipeline stage `{stage}` requires missing artifact: {missing}")]
    DependencyMissing { stage: String, missing: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SheathError>;
