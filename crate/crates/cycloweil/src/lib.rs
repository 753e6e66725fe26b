//! Exact arithmetic over prime cyclotomic fields `K = Q(zeta_p)` and the
//! finite computations built on top of it: additive characters and Gauss
//! sums at the dyadic place, Hilbert symbols, the norm-one unit-group
//! filtration, and Jacobi-sum Hecke character screening for twist families.
//!
//! Everything that feeds a verdict is computed in exact arithmetic
//! (rational coefficient vectors, truncated 2-adic rings, roots of unity
//! as integer vectors); floating point appears only as a cross-check and
//! in report summaries.

pub mod cyclotomic;
pub mod dyadic;
pub mod error;
pub mod exec;
pub mod fermat;
pub mod finite_field;
pub mod galois;
pub mod jacobi;
pub mod padic;
pub mod report;
pub mod unit_group;
pub mod weil;

pub use cyclotomic::{CyclotomicElem, Val2};
pub use dyadic::{Dyadic, DyadicFrac, Field};
pub use error::Error;
pub use fermat::{HeckeTuple, TwistReport, Verdict};
pub use galois::GaloisRingElem;
pub use weil::{EighthRoot, EigenParams, LocalCharacterSpec, NormOneElem};

/// Crate result alias; every checked precondition surfaces as [`Error`].
pub type Result<T> = std::result::Result<T, Error>;

/// True when 2 generates the full multiplicative group mod `p`, i.e. the
/// prime 2 is inert in `Q(zeta_p)`. All dyadic machinery requires this.
pub fn two_is_primitive_root(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut pow = 2u64 % p;
    let mut ord = 1u64;
    while pow != 1 {
        pow = pow * 2 % p;
        ord += 1;
    }
    ord == p - 1
}

pub(crate) fn require_two_primitive_root(p: u64) -> Result<()> {
    if two_is_primitive_root(p) {
        Ok(())
    } else {
        Err(Error::TwoNotPrimitiveRoot { p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_root_table() {
        // ord(2 mod 7) = 3 and ord(2 mod 31) = 5, so both are excluded.
        let good: Vec<u64> = (3..40).filter(|&p| two_is_primitive_root(p)).collect();
        assert_eq!(good, vec![3, 5, 11, 13, 19, 29, 37]);
    }
}
