use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parameter point ({u}, {v}) lies outside the chart domain")]
    Domain { u: f64, v: f64 },
    #[error("chart is singular at ({u}, {v}): square root of negative argument {arg:e}")]
    SingularChart { u: f64, v: f64, arg: f64 },
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("point lies on the tropic, curvature data unavailable")]
    Degenerate,
    #[error("({u}, {v}, {w}) is not an admissible point of the triple system")]
    OutsideSystem { u: f64, v: f64, w: f64 },
    #[error("seed ({u}, {v}) is umbilic-like")]
    SeedAtUmbilic { u: f64, v: f64 },
    #[error("seed ({u}, {v}) is outside the domain")]
    SeedOutsideDomain { u: f64, v: f64 },
    #[error("no real principal direction at seed ({u}, {v})")]
    SeedWithoutDirection { u: f64, v: f64 },
    #[error("umbilic is not Darbouxian")]
    NotDarbouxian,
    #[error("point is on the light cone of the inversion center")]
    Lightcone,
    #[error("quadratic part is not positive definite")]
    NotPositiveDefinite,
    #[error("no timelike eigenvector")]
    NoTimelikeEigenvector,
    #[error("quadric has no real points")]
    EmptyQuadric,
    #[error("precondition violated: {0}")]
    Precondition(String),
}
