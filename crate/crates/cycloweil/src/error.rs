//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not fixed by complex conjugation")]
    NotReal,
    #[error("2 is not a primitive root mod {p}; the dyadic prime is not inert")]
    TwoNotPrimitiveRoot { p: u64 },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("coefficient denominator is even; element has no image in the truncated ring")]
    EvenDenominator,
    #[error("element is not a unit in the truncated ring")]
    NonUnit,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("conductor search exceeded bound |t| <= {bound}")]
    ConductorSearchExceeded { bound: i64 },
    #[error("Gauss sum does not identify as an eighth root of unity (internal bug)")]
    IdentificationFailure,
    #[error("local factor landed outside {{+1, -1}}: eighth-root exponent {k}")]
    NonRealLocalFactor { k: u8 },
    #[error("trace has even denominator; integrand is not 2-adically integral")]
    NonIntegralTrace,
    #[error("character evaluation undefined at the identity")]
    IdentityArgument,
    #[error("character specification unsupported here: {0}")]
    UnsupportedCharacter(String),
    #[error("subgroup index {k} out of range for {which}")]
    SubgroupIndex { which: &'static str, k: u32 },
    #[error("p-adic precision exhausted (working precision {m})")]
    PrecisionExhausted { m: u32 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {ell} is ramified or equal to p = {p}")]
    RamifiedPrime { ell: u64, p: u64 },
    #[error("residue field size {q} exceeds cap {cap}")]
    QTooLarge { q: u64, cap: u64 },
    #[error("invalid Hecke tuple ({r}, {s}, {t}) for p = {p}")]
    InvalidTuple { p: u64, r: u64, s: u64, t: u64 },
    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),
    #[error("A = {a} is not 11th-power-free")]
    NotEleventhPowerFree { a: i64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
