use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatError {
    #[error("matrix is not unimodular: AD - BC = {det}")]
    NotUnimodular { det: i64 },

    #[error("matrix is not hyperbolic: |trace| = {trace} <= 2")]
    NotHyperbolic { trace: i64 },

    #[error("integer overflow while computing {what}")]
    Overflow { what: &'static str },

    #[error("lattice of size l = {l} exceeds the enumeration guard {guard}")]
    EnumerationTooLarge { l: u64, guard: u64 },

    #[error("no Bloch angle in {{0, pi}}^2 is compatible with the map at N = {n}")]
    NoInvariantTheta { n: usize },

    #[error("unsupported matrix: {reason}")]
    UnsupportedMatrix { reason: String },

    #[error("coherent-state periodization needs {n_max} lattice translates (limit 64)")]
    TruncationFailure { n_max: usize },

    #[error("grid resolution G = {g} too coarse for N = {n} (need G >= {min_g})")]
    ResolutionTooCoarse { g: usize, n: usize, min_g: usize },

    #[error("radius {r} outside admissible interval [{lo}, {hi}]")]
    RadiusOutOfRange { r: f64, lo: f64, hi: f64 },

    #[error("dimension N = {n} exceeds dense limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },

    #[error("N = {n} exceeds the cap {cap}; choose (T, delta) or N explicitly")]
    NTooLarge { n: f64, cap: usize },

    #[error("Husimi balls around x_{t} and x_{s} overlap: distance {dist:.6} < 2 * radius {radius:.6}")]
    BallsOverlap {
        t: usize,
        s: usize,
        dist: f64,
        radius: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{op}: {source}")]
    During {
        op: &'static str,
        #[source]
        source: Box<CatError>,
    },
}

impl CatError {
    /// Variant name, for structured error output.
    pub fn kind(&self) -> &'static str {
        use CatError::*;
        match self {
            NotUnimodular { .. } => "NotUnimodular",
            NotHyperbolic { .. } => "NotHyperbolic",
            Overflow { .. } => "Overflow",
            EnumerationTooLarge { .. } => "EnumerationTooLarge",
            NoInvariantTheta { .. } => "NoInvariantTheta",
            UnsupportedMatrix { .. } => "UnsupportedMatrix",
            TruncationFailure { .. } => "TruncationFailure",
            ResolutionTooCoarse { .. } => "ResolutionTooCoarse",
            RadiusOutOfRange { .. } => "RadiusOutOfRange",
            DimensionTooLarge { .. } => "DimensionTooLarge",
            NTooLarge { .. } => "NTooLarge",
            BallsOverlap { .. } => "BallsOverlap",
            Precondition(_) => "Precondition",
            Config(_) => "ConfigError",
            Format(_) => "FormatError",
            Io(_) => "IoError",
            During { source, .. } => source.kind(),
        }
    }

    /// True for errors caused by a violated numerical precondition rather than
    /// malformed input.
    pub fn is_numeric(&self) -> bool {
        use CatError::*;
        if let During { source, .. } = self {
            return source.is_numeric();
        }
        matches!(
            self,
            NotHyperbolic { .. }
                | Overflow { .. }
                | EnumerationTooLarge { .. }
                | NoInvariantTheta { .. }
                | UnsupportedMatrix { .. }
                | TruncationFailure { .. }
                | ResolutionTooCoarse { .. }
                | RadiusOutOfRange { .. }
                | DimensionTooLarge { .. }
                | NTooLarge { .. }
                | BallsOverlap { .. }
                | Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, CatError>;

/// Tags an error with the operation that produced it.
pub trait Context<T> {
    fn during(self, op: &'static str) -> Result<T>;
}

impl<T> Context<T> for Result<T> {
    fn during(self, op: &'static str) -> Result<T> {
        self.map_err(|e| CatError::During {
            op,
            source: Box::new(e),
        })
    }
}

