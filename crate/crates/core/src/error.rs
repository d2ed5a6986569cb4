use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate curve: |q'| = {speed:.3e} below threshold at parameter {t}")]
    DegenerateCurve { t: f64, speed: f64 },

    #[error("argument {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("point ({x}, {y}) outside the tubular neighbourhood (|u| would exceed {half_width})")]
    OutOfTube { x: f64, y: f64, half_width: f64 },

    #[error("Newton iteration failed to converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("chart width violated: 1 - k(s) u = {jacobian:.3e} <= 0 at s = {s}, u = {u}")]
    ChartWidth { s: f64, u: f64, jacobian: f64 },

    #[error("normal frame not orthonormal (residual {residual:.3e})")]
    Frame { residual: f64 },

    #[error("induced metric not positive definite at the sample point")]
    DegenerateEmbedding,

    #[error("confinement violated: omega = {omega:.3e} <= 0 at base point")]
    ConfinementViolation { omega: f64 },

    #[error("eigenfunction boundary amplitude {amplitude:.3e} exceeds decay threshold; widen the interval")]
    IntervalTooSmall { amplitude: f64 },

    #[error("right-hand side not orthogonal to the eigenstate (overlap {overlap:.3e})")]
    NotOrthogonal { overlap: f64 },

    #[error("invalid packet parameters: {reason} (residual {residual:.3e})")]
    InvalidPacket { reason: &'static str, residual: f64 },

    #[error("dispersion matrix A is singular")]
    SingularDispersion,

    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("trajectory left the declared domain at t = {time}")]
    DomainExit { time: f64 },

    #[error("metric degenerate along the trajectory at t = {time}")]
    DegenerateMetric { time: f64 },

    #[error("projected initial velocity vanishes; the constrained limit is not determined")]
    DegenerateFunnelVelocity,

    #[error("packet conditions drifted beyond tolerance during integration (residual {residual:.3e})")]
    IntegratorTolerance { residual: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("boundary density {density:.3e} breached the guard; run rejected")]
    BoundaryBreach { density: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("time step for the residual difference failed the Richardson check (ratio {ratio:.3})")]
    ResidualStep { ratio: f64 },

    #[error("unknown scenario id '{0}'")]
    UnknownScenario(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
