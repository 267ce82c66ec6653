use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime >= 5")]
    NotPrime(u64),
    #[error("modulus {0} does not fit the 32-bit residue representation")]
    ModulusTooLarge(u64),
    #[error("matrix determinant is {det}, expected {expected}")]
    Determinant { det: u32, expected: &'static str },
    #[error("gcd({0}, {1}) != 1")]
    NotCoprime(u64, u64),
    #[error("numerator {0} exceeds denominator {1}")]
    OutOfUnitInterval(u64, u64),
    #[error("dilation by zero")]
    ZeroDilate,
    #[error("beta = {0} outside (0, 1/2]")]
    BetaOutOfRange(f64),
    #[error("need at least {needed} grid points for a fit, got {got}")]
    DegenerateFit { needed: usize, got: usize },
    #[error("element is central (+-I), no cyclic classification")]
    Central,
    #[error("objects built over different primes ({0} vs {1})")]
    ContextMismatch(u32, u32),
    #[error("function is not balanced: sum = {0}")]
    NotMeanZero(f64),
    #[error("group of order {0} exceeds the dense-table limit")]
    GroupTooLarge(u64),
    #[error("projected size {projected} exceeds the configured cap {cap}")]
    MemoryCap { projected: u64, cap: u64 },
    #[error("family members collide projectively mod p ({0} distinct of {1})")]
    ProjectiveCollision(usize, usize),
    #[error("S meets S⁻¹ (generator {0})")]
    InverseOverlap(usize),
    #[error("count overflows 128 bits")]
    Overflow,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
