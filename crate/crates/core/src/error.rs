use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field degree {0} out of range (1..=16)")]
    DegreeOutOfRange(u32),
    #[error("modulus {modulus:b} does not have degree {n}")]
    ModulusDegree { n: u32, modulus: u32 },
    #[error("modulus {0:b} is reducible over F2")]
    ReducibleModulus(u32),
    #[error("cannot parse modulus literal {0:?}")]
    BadModulusLiteral(String),
    #[error("bit mask {bits} is not an element of GF(2^{n})")]
    NotCanonical { bits: u32, n: u32 },
    #[error("form parameter {0} has trace 0")]
    TraceZeroLambda(u16),
    #[error("zero vector has no projective point")]
    ZeroVector,
    #[error("a line needs two distinct points")]
    DegenerateLine,
    #[error("model construction is limited to n <= {max} (got n = {n})")]
    ModelTooLarge { n: u32, max: u32 },
    #[error("point {0} lies on Q0")]
    PointOnQ0(u32),
    #[error("subspace is not contained in H0")]
    NotInH0,
    #[error("subspace has rank {got}, expected {expected}")]
    WrongRank { got: usize, expected: usize },
    #[error("ovoids {0} and {1} are identical")]
    SameOvoid(u32, u32),
    #[error("ovoids {0} and {1} are not tangent")]
    NotTangent(u32, u32),
    #[error("ovoids {0} and {1} meet in {2} points")]
    BadIntersection(u32, u32, usize),
    #[error("vertices do not form a clique: {0} and {1} are not adjacent")]
    NotAClique(u32, u32),
    #[error("linear clique has no centric lifting")]
    LinearClique,
    #[error("unsupported clique size {0}")]
    CliqueSize(usize),
    #[error("start point {0} is not in the fiber of the first vertex")]
    WrongFiber(u32),
    #[error("path step {0} -> {1} is not an edge of the tangency graph")]
    NotAdjacent(u32, u32),
    #[error("full census refused for n = {n} (limit n <= {max})")]
    CensusTooLarge { n: u32, max: u32 },
    #[error("exhaustive mode refused for q = {0}")]
    ExhaustiveTooLarge(u32),
    #[error("not a centric figure: {0}")]
    NotCentric(String),
    #[error("cube parameters violate r^2+rs+lambda s^2 = 1, uv != 0")]
    BadCubeParams,
    #[error("invalid frame: {0}")]
    BadFrame(String),
    #[error("vector {0:?} is not in the F2-structure of the previous ones")]
    InconsistentScaling(Vec<u16>),
    #[error("ovoid id {0} out of range")]
    UnknownOvoid(u32),
    #[error("i/o: {0}")]
    Io(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
