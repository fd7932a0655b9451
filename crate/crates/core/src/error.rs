use thiserror::Error;

/// Every failure surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis list is empty")]
    EmptyBasisSet,
    #[error("bases have unequal sizes ({expected} and {found})")]
    UnequalBasisSizes { expected: usize, found: usize },
    #[error("basis exchange fails for {first:?} and {second:?} after removing {removed}")]
    ExchangeAxiomViolation {
        first: Vec<usize>,
        second: Vec<usize>,
        removed: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("matroid has loops {0:?}")]
    LoopyMatroid(Vec<usize>),
    #[error("characteristic polynomial is not divisible by (t - 1)")]
    NonExactDivision,
    #[error("minor requires F to be a subset of G")]
    NotNested,
    #[error("{0:?} is not a flat")]
    NotAFlat(Vec<usize>),
    #[error("operands live over different variable sets")]
    VarSetMismatch,
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("constant term {0} is not a unit")]
    NonUnitConstantTerm(String),
    #[error("quotient has torsion, elementary divisors {0:?}")]
    TorsionDetected(Vec<String>),
    #[error("quotient is free but no complement is spanned by monomials")]
    NonMonomialBasis,
    #[error("{count} monomials exceed the cap of {cap}")]
    CombinatorialExplosion { count: usize, cap: usize },
    #[error("K-ring rank {k} differs from Chow rank {chow}")]
    RankMismatch { k: usize, chow: usize },
    #[error("simplicial monomials do not span the K-ring unimodularly")]
    SpanDeficit,
    #[error("simplicial monomial pairs are inconsistent")]
    InconsistentPairs,
    #[error("lambda^{0} is not integral")]
    NonIntegralLambda(u32),
    #[error("total degree {found} but {expected} required")]
    WrongTotalDegree { expected: usize, found: usize },
    #[error("ground sets differ")]
    GroundSetMismatch,
    #[error("pairing matrix is not unimodular")]
    SingularPairing,
    #[error("n = {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },
    #[error("substitution does not respect the relation {0}")]
    CertificateFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
