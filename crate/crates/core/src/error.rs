use thiserror::Error;

/// Every failure the library reports. Variant names double as the `kind`
/// field of the CLI's error JSON.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is zero")]
    ZeroElement,
    #[error("minimal polynomial must be monic with integer coefficients: {0}")]
    NotMonic(String),
    #[error("minimal polynomial is reducible over the rationals: {0}")]
    Reducible(String),
    #[error("field is not totally real: {real} real roots for degree {degree}")]
    NotTotallyReal { real: usize, degree: usize },
    #[error("place index {index} out of range for {count} places")]
    PlaceOutOfRange { index: usize, count: usize },
    #[error("place {0} is complex; only its modulus is available")]
    NonRealPlace(usize),
    #[error("u^2 - 4 is a square in the base field")]
    SquareDiscriminant,
    #[error("u^2 - 4 is not positive at the identity place")]
    NegativeDiscriminant,
    #[error("the field is Q: its unit group is {{1, -1}}")]
    RankZeroField,
    #[error("supplied units have dependent log vectors")]
    DegenerateBasis,
    #[error("expected {expected} fundamental units, got {got}")]
    UnitCountMismatch { expected: usize, got: usize },
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("place count contradicts the Salem pattern: {0}")]
    PlaceCountMismatch(String),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("matrix has entries outside the base field")]
    EntriesOutsideBaseField,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("element is not unitary")]
    NotUnitary,
    #[error("bending matrix does not commute with the image of `{0}`")]
    CentralizerViolation(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed word `{0}`")]
    BadWord(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("points are not collinear")]
    NotCollinear,
    #[error("coincident points")]
    CoincidentPoints,
    #[error("point lies on the boundary")]
    PointOnBoundary,
    #[error("point lies outside the domain")]
    PointOutside,
    #[error("cusp model needs a larger dimension: {0}")]
    DimensionTooSmall(String),
    #[error("point is not on the horosphere")]
    NotOnLeaf,
    #[error("zero vector")]
    ZeroVector,
    #[error("matrix is singular")]
    Singular,
    #[error("no generators given")]
    EmptyGenerators,
    #[error("bad reduction: {0}")]
    BadReduction(String),
    #[error("group enumeration exceeded {0} elements")]
    BudgetExceeded(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            DivisionByZero => "DivisionByZero",
            ZeroElement => "ZeroElement",
            NotMonic(_) => "NotMonic",
            Reducible(_) => "Reducible",
            NotTotallyReal { .. } => "NotTotallyReal",
            PlaceOutOfRange { .. } => "PlaceOutOfRange",
            NonRealPlace(_) => "NonRealPlace",
            SquareDiscriminant => "SquareDiscriminant",
            NegativeDiscriminant => "NegativeDiscriminant",
            RankZeroField => "RankZeroField",
            DegenerateBasis => "DegenerateBasis",
            UnitCountMismatch { .. } => "UnitCountMismatch",
            NotAUnit(_) => "NotAUnit",
            PlaceCountMismatch(_) => "PlaceCountMismatch",
            InvalidForm(_) => "InvalidForm",
            EntriesOutsideBaseField => "EntriesOutsideBaseField",
            SizeMismatch(_) => "SizeMismatch",
            NotUnitary => "NotUnitary",
            CentralizerViolation(_) => "CentralizerViolation",
            UnknownGenerator(_) => "UnknownGenerator",
            BadWord(_) => "BadWord",
            InvalidDecomposition(_) => "InvalidDecomposition",
            NotCollinear => "NotCollinear",
            CoincidentPoints => "CoincidentPoints",
            PointOnBoundary => "PointOnBoundary",
            PointOutside => "PointOutside",
            DimensionTooSmall(_) => "DimensionTooSmall",
            NotOnLeaf => "NotOnLeaf",
            ZeroVector => "ZeroVector",
            Singular => "Singular",
            EmptyGenerators => "EmptyGenerators",
            BadReduction(_) => "BadReduction",
            BudgetExceeded(_) => "BudgetExceeded",
            Parse(_) => "Parse",
            Config(_) => "Config",
            Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
