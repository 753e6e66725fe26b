//! Truncated p-adic decomposition of rationals.
//!
//! Every nonzero `x in Q_p` factors uniquely as
//! `x = eps * p^a * (1 - p)^b` with `eps` a (p-1)-th root of unity,
//! `a in Z`, `b in Z_p`. The invariant `u(x) = min(ord_p(a), ord_p(b) + 1)`
//! controls the conductor exponent at p. Everything here is residue
//! arithmetic mod `p^M` for a working precision `M`; nothing is rounded,
//! and a quantity that is not determined at the working precision is
//! reported as a lower bound instead of a guess.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cyclotomic::check_odd_prime;
use crate::error::Error;
use crate::Result;

/// `min(ord_p(a), ord_p(b) + 1)`, possibly only bounded below by the
/// working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UValue {
    Infinite,
    Finite(u64),
    /// Known to be at least this, undetermined beyond the precision.
    AtLeast(u64),
}

impl UValue {
    /// Three-valued comparison; `None` when the precision cannot decide.
    pub fn geq(&self, k: u64) -> Option<bool> {
        match *self {
            UValue::Infinite => Some(true),
            UValue::Finite(v) => Some(v >= k),
            UValue::AtLeast(l) => {
                if l >= k {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }
}

/// The decomposition data at precision `p^M`.
#[derive(Debug, Clone, Serialize)]
pub struct PadicDecomp {
    pub p: u64,
    pub precision: u32,
    pub a: i64,
    /// Discrete log of the Teichmueller part at the residue field, with
    /// respect to the smallest primitive root mod p.
    pub teich_index: u64,
    /// `b mod p^(M-1)` (canonical non-negative representative).
    #[serde(serialize_with = "serialize_bigint_decimal")]
    pub b_mod: BigInt,
    /// True when `b = 0` exactly (the unit part is a rational root of
    /// unity, hence +-1).
    pub b_exact_zero: bool,
    pub u: UValue,
}

fn serialize_bigint_decimal<S: serde::Serializer>(
    n: &BigInt,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&n.to_string())
}

fn vp_bigint(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// Truncated logarithm of a 1-unit `u = 1 + t`, `t = 0 mod p`, as an
/// exact rational whose value agrees with `log_p(u)` mod `p^M`.
fn log_one_unit(t: &BigRational, p: u64, m: u32) -> BigRational {
    // Terms beyond K have valuation k - ord_p(k) > M.
    let k_max = 2 * m as u64 + 6;
    for k in (k_max + 1)..=(2 * k_max) {
        let vp = if k % p == 0 { vp_bigint(&BigInt::from(k), p) } else { 0 };
        debug_assert!(k - vp > m as u64);
    }
    let mut sum = BigRational::zero();
    let mut t_pow = BigRational::one();
    for k in 1..=k_max {
        t_pow *= t;
        let term = &t_pow / BigRational::from_integer(BigInt::from(k));
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Reduces a p-integral rational mod `p^M`.
fn rational_mod(x: &BigRational, modulus: &BigInt, p: u64) -> BigInt {
    assert_eq!(vp_bigint(x.denom(), p), 0, "denominator not a p-unit");
    let n = x.numer().mod_floor(modulus);
    let d = x.denom().mod_floor(modulus);
    (n * mod_inverse_big(&d, modulus)).mod_floor(modulus)
}

fn smallest_primitive_root(p: u64) -> u64 {
    let factors = crate::finite_field::factorize(p - 1);
    'cand: for g in 2..p {
        for &(r, _) in &factors {
            let mut acc = 1u64;
            let mut base = g % p;
            let mut e = (p - 1) / r;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % p;
                }
                e >>= 1;
                base = base * base % p;
            }
            if acc == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("primitive root exists")
}

/// The decomposition `x = eps p^a (1-p)^b` at working precision `M`.
pub fn u_of(x: &BigRational, p: u64, precision: u32) -> Result<PadicDecomp> {
    check_odd_prime(p)?;
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let m = precision.max(3);
    let a_val = vp_bigint(x.numer(), p) as i64 - vp_bigint(x.denom(), p) as i64;
    let p_big = BigInt::from(p);
    let p_pow_a = BigRational::from_integer(p_big.pow(a_val.unsigned_abs() as u32));
    let x_unit = if a_val >= 0 {
        x / p_pow_a
    } else {
        x * p_pow_a
    };

    let modulus = p_big.pow(m);
    let r = rational_mod(&x_unit, &modulus, p);

    // Teichmueller representative: eps = r^(p^(M-1)) mod p^M.
    let eps = r.modpow(&p_big.pow(m - 1), &modulus);
    let g0 = smallest_primitive_root(p);
    let res = r.mod_floor(&p_big).to_u64().unwrap();
    let mut teich_index = 0;
    {
        let mut acc = 1u64;
        while acc != res {
            acc = acc * g0 % p;
            teich_index += 1;
            assert!(teich_index < p, "residue not a unit");
        }
    }

    // 1-unit part and its logarithm.
    let u1 = (&r * mod_inverse_big(&eps, &modulus)).mod_floor(&modulus);
    let b_exact_zero = x_unit == BigRational::one() || x_unit == -BigRational::one();
    let mod_b = p_big.pow(m - 1);
    let b_mod = if b_exact_zero {
        BigInt::zero()
    } else {
        let t = BigRational::from_integer(&u1 - BigInt::one());
        let log_u1 = log_one_unit(&t, p, m);
        let log_base = log_one_unit(&BigRational::from_integer(-&p_big), p, m);
        // Both logs are divisible by p exactly once at the base; the ratio
        // is a p-integer determined mod p^(M-1).
        let ratio = log_u1 / log_base;
        rational_mod(&ratio, &mod_b, p)
    };

    // Reconstruction sanity: eps * (1-p)^b = r mod p^M.
    #[cfg(debug_assertions)]
    {
        let base = (BigInt::one() - &p_big).mod_floor(&modulus);
        let back = (&eps * base.modpow(&b_mod, &modulus)).mod_floor(&modulus);
        if b_exact_zero {
            debug_assert_eq!(back, r);
        } else {
            debug_assert_eq!(back, r, "decomposition must reconstruct the unit");
        }
    }

    let u_from_a = if a_val == 0 {
        UValue::Infinite
    } else {
        UValue::Finite(vp_bigint(&BigInt::from(a_val), p))
    };
    let u_from_b = if b_exact_zero {
        UValue::Infinite
    } else if b_mod.is_zero() {
        UValue::AtLeast(m as u64 - 1 + 1)
    } else {
        UValue::Finite(vp_bigint(&b_mod, p) + 1)
    };
    let u = min_uvalue(u_from_a, u_from_b);

    Ok(PadicDecomp {
        p,
        precision: m,
        a: a_val,
        teich_index,
        b_mod,
        b_exact_zero,
        u,
    })
}

fn min_uvalue(a: UValue, b: UValue) -> UValue {
    use UValue::*;
    match (a, b) {
        (Infinite, x) | (x, Infinite) => x,
        (Finite(x), Finite(y)) => Finite(x.min(y)),
        (Finite(f), AtLeast(l)) | (AtLeast(l), Finite(f)) => {
            if f <= l {
                Finite(f)
            } else {
                AtLeast(l)
            }
        }
        (AtLeast(x), AtLeast(y)) => AtLeast(x.min(y)),
    }
}

/// Fast test for `u(x) >= 2` on p-unit rationals: equivalent to
/// `x^(p-1) = 1 mod p^2`.
pub fn u_geq2_fast(x: &BigRational, p: u64) -> Result<bool> {
    check_odd_prime(p)?;
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if vp_bigint(x.numer(), p) != 0 || vp_bigint(x.denom(), p) != 0 {
        return Err(Error::InvalidInput("x must be a p-unit".into()));
    }
    let p2 = BigInt::from(p * p);
    let r = rational_mod(x, &p2, p);
    Ok(r.modpow(&BigInt::from(p - 1), &p2).is_one())
}
