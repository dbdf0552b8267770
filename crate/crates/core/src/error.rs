use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid surface: {0}")]
    InvalidSpec(String),
    #[error("{0} has no boundary condition {1}")]
    UnsupportedBoundary(String, String),
    #[error("{0} has boundary; geodesic lengths are only listed for closed surfaces and tori")]
    HasBoundary(String),
    #[error("{0} has no counting identity through a reference surface")]
    NoIdentity(String),
    #[error("{0} has no polygonal geometry")]
    NoGeometry(String),
    #[error("fixture mismatch for {spec}: {field} computed {computed}, expected {expected}")]
    FixtureMismatch { spec: String, field: &'static str, computed: String, expected: String },
    #[error("no fixture for {0}")]
    NoFixture(String),
    #[error("corner angle must lie in (0, 2pi)")]
    AngleOutOfRange,
    #[error("tail bound {tail:e} exceeds tolerance {tol:e}; raise the cutoff")]
    CutoffTooSmall { tail: f64, tol: f64 },
    #[error("enumeration guard exceeded ({0} modes)")]
    GuardExceeded(u64),
    #[error("need at least 3 dyadic windows in [{0}, {1}]")]
    InsufficientWindows(f64, f64),
    #[error("too few samples: {0}, need at least {1}")]
    TooFewSamples(usize, usize),
    #[error("frequency grid spacing {spacing} is coarser than 2pi/L = {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error("window of length {window} is shorter than {needed}")]
    WindowTooShort { window: f64, needed: f64 },
    #[error("symmetry group character is not consistent on this torus")]
    InconsistentCharacter,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
