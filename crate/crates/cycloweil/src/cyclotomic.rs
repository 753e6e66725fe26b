//! Exact elements of the p-th cyclotomic field `K = Q(zeta_p)`.
//!
//! An element is stored as a rational coefficient vector in the power basis
//! `1, zeta, ..., zeta^(p-2)`, reduced modulo the minimal polynomial
//! `Phi_p = 1 + x + ... + x^(p-1)`, so equality is coefficient-wise.
//! The real subfield `F` is detected by conjugation-fixedness rather than
//! carried as a separate representation.
//!
//! When 2 is a primitive root mod p the prime 2 is inert in `K`, the power
//! basis is a local integral basis, and the valuation at the unique dyadic
//! prime of an integral element is the minimum of the coefficient
//! 2-valuations (the residue ring mod 2 is a field). `ord2` relies on this;
//! it refuses p where 2 is not a primitive root.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::galois::GaloisRingElem;
use crate::{require_two_primitive_root, Result};

/// Valuation at the unique dyadic prime, normalized by `ord2(2) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val2 {
    Finite(i64),
    /// Valuation of zero; makes the ultrametric rules hold degenerately.
    Infinite,
}

impl Val2 {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val2::Finite(v) => Some(v),
            Val2::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Val2::Infinite)
    }
}

/// Exact element of `Q(zeta_p)` in canonical power-basis form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicElem {
    p: u64,
    /// Length `p - 1`; `coeffs[i]` multiplies `zeta^i`.
    coeffs: Vec<BigRational>,
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_odd_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

impl CyclotomicElem {
    /// Builds an element from polynomial coefficients in `zeta` of any
    /// length, reducing via `zeta^p = 1` and `Phi_p(zeta) = 0`.
    pub fn from_poly(p: u64, poly: &[BigRational]) -> Result<Self> {
        check_odd_prime(p)?;
        let n = p as usize;
        let mut buckets = vec![BigRational::zero(); n];
        for (e, c) in poly.iter().enumerate() {
            buckets[e % n] += c;
        }
        Ok(Self::from_buckets(p, buckets))
    }

    /// `buckets` has length `p`, indexed by exponents `0..p`; eliminates
    /// `zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))`.
    fn from_buckets(p: u64, mut buckets: Vec<BigRational>) -> Self {
        let top = buckets.pop().expect("buckets nonempty");
        if !top.is_zero() {
            for b in buckets.iter_mut() {
                *b -= &top;
            }
        }
        CyclotomicElem { p, coeffs: buckets }
    }

    pub fn zero(p: u64) -> Self {
        CyclotomicElem {
            p,
            coeffs: vec![BigRational::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u64) -> Self {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u64, r: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); (p - 1) as usize];
        coeffs[0] = r;
        CyclotomicElem { p, coeffs }
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::from_rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    /// `zeta^k` for any integer exponent (reduced mod p).
    pub fn zeta_pow(p: u64, k: i64) -> Self {
        let e = k.rem_euclid(p as i64) as usize;
        let mut buckets = vec![BigRational::zero(); p as usize];
        buckets[e] = BigRational::one();
        Self::from_buckets(p, buckets)
    }

    pub fn zeta(p: u64) -> Self {
        Self::zeta_pow(p, 1)
    }

    /// Convenience constructor from small fractions `(numer, denom)` in
    /// the power basis (used by the CLI front end).
    pub fn from_fractions(p: u64, fractions: &[(i64, i64)]) -> Result<Self> {
        if fractions.iter().any(|&(_, d)| d == 0) {
            return Err(Error::DivisionByZero);
        }
        let coeffs: Vec<BigRational> = fractions
            .iter()
            .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect();
        Self::from_poly(p, &coeffs)
    }

    /// `omega = zeta + zeta^(-1)`, a generator of the real subfield.
    pub fn omega(p: u64) -> Self {
        Self::zeta_pow(p, 1) + Self::zeta_pow(p, -1)
    }

    /// `delta = zeta^(-(p-1)/2) - zeta^((p-1)/2)`; purely imaginary under
    /// the standard embedding, with `conj(delta) = -delta`.
    pub fn delta(p: u64) -> Self {
        let h = ((p - 1) / 2) as i64;
        Self::zeta_pow(p, -h) - Self::zeta_pow(p, h)
    }

    /// `Delta = delta^2`, an element of the real subfield.
    pub fn delta_sq(p: u64) -> Self {
        let d = Self::delta(p);
        &d * &d
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Some(r) when the element is the rational number r.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn assert_same_field(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed cyclotomic levels");
    }

    /// Galois action `zeta -> zeta^k` for `gcd(k, p) = 1`.
    pub fn galois(&self, k: u64) -> Self {
        let p = self.p as usize;
        let k = (k % self.p) as usize;
        assert!(k != 0, "galois exponent divisible by p");
        let mut buckets = vec![BigRational::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            buckets[(i * k) % p] += c;
        }
        Self::from_buckets(self.p, buckets)
    }

    /// Complex conjugation `zeta -> zeta^(-1)`, the nontrivial element of
    /// `Gal(K/F)`.
    pub fn conj(&self) -> Self {
        self.galois(self.p - 1)
    }

    /// Membership in the real subfield, checked (never assumed).
    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Relative norm `N_{K/F}(a) = a * conj(a)`; always real.
    pub fn norm_kf(&self) -> Self {
        self * &self.conj()
    }

    /// Absolute trace `Tr_{K/Q}`: `zeta^i` has trace `-1` for `i != 0`
    /// and `p - 1` for `i = 0`.
    pub fn trace_kq(&self) -> BigRational {
        let pm1 = BigRational::from_integer(BigInt::from(self.p - 1));
        let mut t = &self.coeffs[0] * pm1;
        for c in &self.coeffs[1..] {
            t -= c;
        }
        t
    }

    /// Trace of the real subfield to Q; requires a conjugation-fixed input.
    pub fn trace_fq(&self) -> Result<BigRational> {
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        Ok(self.trace_kq() / BigRational::from_integer(BigInt::from(2)))
    }

    /// Absolute norm `N_{K/Q}` as the product of all Galois conjugates.
    /// Used as an independent route for valuations in tests.
    pub fn norm_kq(&self) -> BigRational {
        let mut prod = self.clone();
        for k in 2..self.p {
            prod = &prod * &self.galois(k);
        }
        prod.as_rational()
            .expect("norm is Galois-stable, hence rational")
            .clone()
    }

    /// Valuation at the unique dyadic prime (requires 2 inert). Computed as
    /// the minimum coefficient 2-valuation: the power basis is a local
    /// integral basis and the residue ring mod 2 is a field.
    pub fn ord2(&self) -> Result<Val2> {
        require_two_primitive_root(self.p)?;
        let mut min: Option<i64> = None;
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let vn = c.numer().trailing_zeros().expect("nonzero numer") as i64;
            let vd = c.denom().trailing_zeros().expect("nonzero denom") as i64;
            let v = vn - vd;
            min = Some(match min {
                Some(m) => m.min(v),
                None => v,
            });
        }
        Ok(match min {
            Some(v) => Val2::Finite(v),
            None => Val2::Infinite,
        })
    }

    /// Splits a nonzero element as `2^v * unit` at the dyadic prime and
    /// returns `(unit, v)`.
    pub fn two_power_split(&self) -> Result<(Self, i64)> {
        match self.ord2()? {
            Val2::Infinite => Err(Error::ZeroArgument),
            Val2::Finite(v) => {
                let two = BigRational::from_integer(BigInt::from(2));
                let factor = if v >= 0 {
                    BigRational::one() / two.pow(v as i32)
                } else {
                    two.pow((-v) as i32)
                };
                Ok((self.scale(&factor), v))
            }
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CyclotomicElem {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact inverse via extended gcd with `Phi_p` in `Q[x]`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.p, r.recip()));
        }
        let phi = vec![BigRational::one(); self.p as usize];
        let (g, s) = poly_half_extgcd(&self.coeffs, &phi);
        // gcd must be a nonzero constant: Phi_p is irreducible over Q.
        assert_eq!(g.len(), 1, "Phi_p irreducible; gcd is constant");
        let ginv = g[0].recip();
        let inv_coeffs: Vec<BigRational> = s.iter().map(|c| c * &ginv).collect();
        let inv = Self::from_poly(self.p, &inv_coeffs)?;
        debug_assert!((&inv * self).as_rational().map(|r| r.is_one()) == Some(true));
        Ok(inv)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn pow_i(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow_u(e as u64))
        } else {
            Ok(self.inverse()?.pow_u((-e) as u64))
        }
    }

    /// Image in the truncated ring `O_K / 2^s`. Requires every coefficient
    /// denominator to be odd.
    pub fn reduce_mod(&self, s: u32) -> Result<GaloisRingElem> {
        GaloisRingElem::from_cyclotomic(self, s)
    }

    /// Common-denominator form `(numerators, denominator)` with the
    /// denominator positive and minimal.
    pub fn to_parts(&self) -> (Vec<BigInt>, BigInt) {
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (nums, den)
    }

    /// Numerical embedding `zeta -> exp(2*pi*i/p)` as `(re, im)`.
    pub fn embed(&self) -> (f64, f64) {
        let p = self.p as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let cf = rational_to_f64(c);
            let ang = 2.0 * std::f64::consts::PI * (i as f64) / p;
            re += cf * ang.cos();
            im += cf * ang.sin();
        }
        (re, im)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    // Good enough for report summaries; exact paths never round-trip floats.
    let n = r.numer();
    let d = r.denom();
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

impl Add for &CyclotomicElem {
    type Output = CyclotomicElem;
    fn add(self, rhs: &CyclotomicElem) -> CyclotomicElem {
        self.assert_same_field(rhs);
        CyclotomicElem {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CyclotomicElem {
    type Output = CyclotomicElem;
    fn sub(self, rhs: &CyclotomicElem) -> CyclotomicElem {
        self.assert_same_field(rhs);
        CyclotomicElem {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CyclotomicElem {
    type Output = CyclotomicElem;
    fn mul(self, rhs: &CyclotomicElem) -> CyclotomicElem {
        self.assert_same_field(rhs);
        let p = self.p as usize;
        let mut buckets = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                buckets[(i + j) % p] += a * b;
            }
        }
        CyclotomicElem::from_buckets(self.p, buckets)
    }
}

impl Neg for &CyclotomicElem {
    type Output = CyclotomicElem;
    fn neg(self) -> CyclotomicElem {
        CyclotomicElem {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for CyclotomicElem {
            type Output = CyclotomicElem;
            fn $method(self, rhs: CyclotomicElem) -> CyclotomicElem {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for CyclotomicElem {
    type Output = CyclotomicElem;
    fn neg(self) -> CyclotomicElem {
        -&self
    }
}

impl fmt::Display for CyclotomicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if i == 0 {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "z^{}", i)?;
            } else {
                write!(f, "{}*z^{}", a, i)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for CyclotomicElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (nums, den) = self.to_parts();
        let mut st = serializer.serialize_struct("CyclotomicElem", 3)?;
        st.serialize_field("p", &self.p)?;
        let num_repr: Vec<IntRepr> = nums.iter().map(IntRepr::from_bigint).collect();
        st.serialize_field("num", &num_repr)?;
        st.serialize_field("den", &IntRepr::from_bigint(&den))?;
        st.end()
    }
}

/// JSON integer when it fits i128, decimal string beyond that.
#[derive(Serialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i128),
    Big(String),
}

impl IntRepr {
    fn from_bigint(n: &BigInt) -> Self {
        match i128::try_from(n) {
            Ok(v) => IntRepr::Small(v),
            Err(_) => IntRepr::Big(n.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial helpers over Q (little-endian coefficient vectors)
// ---------------------------------------------------------------------------

fn poly_trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().map(|c| c.is_zero()) == Some(true) {
        v.pop();
    }
}

fn poly_is_zero(v: &[BigRational]) -> bool {
    v.iter().all(|c| c.is_zero())
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r: Vec<BigRational> = a.to_vec();
    poly_trim(&mut r);
    let mut bb: Vec<BigRational> = b.to_vec();
    poly_trim(&mut bb);
    assert!(!poly_is_zero(&bb), "division by zero polynomial");
    let db = bb.len() - 1;
    let lead = bb[db].clone();
    if r.len() - 1 < db || poly_is_zero(&r) {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while !poly_is_zero(&r) && r.len() > db {
        let dr = r.len() - 1;
        let f = &r[dr] / &lead;
        q[dr - db] = f.clone();
        for i in 0..=db {
            let t = &bb[i] * &f;
            r[dr - db + i] -= t;
        }
        poly_trim(&mut r);
        if dr == db {
            break;
        }
    }
    poly_trim(&mut q);
    (q, r)
}

/// Returns `(g, s)` with `g = gcd(a, b)` and `s*a = g mod b`.
fn poly_half_extgcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0: Vec<BigRational> = a.to_vec();
    let mut r1: Vec<BigRational> = b.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0 = vec![BigRational::one()];
    let mut s1 = vec![BigRational::zero()];
    while !poly_is_zero(&r1) {
        let (q, rem) = poly_divmod(&r0, &r1);
        let qs1 = poly_mul(&q, &s1);
        let s_next = poly_sub(&s0, &qs1);
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s_next);
    }
    poly_trim(&mut r0);
    poly_trim(&mut s0);
    (r0, s0)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if poly_is_zero(a) || poly_is_zero(b) {
        return vec![BigRational::zero()];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    poly_trim(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, RngExt, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn random_elem(rng: &mut StdRng, p: u64) -> CyclotomicElem {
        let coeffs: Vec<BigRational> = (0..p - 1)
            .map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=4)))
            .collect();
        CyclotomicElem { p, coeffs }
    }

    fn random_integral(rng: &mut StdRng, p: u64) -> CyclotomicElem {
        let coeffs: Vec<BigRational> = (0..p - 1)
            .map(|_| rat(rng.random_range(-9..=9), 1))
            .collect();
        CyclotomicElem { p, coeffs }
    }

    #[test]
    fn one_is_identity() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..10 {
            let x = random_elem(&mut rng, 11);
            assert_eq!(&CyclotomicElem::one(11) * &x, x);
        }
    }

    #[test]
    fn zeta_pow_wraps() {
        for p in [3u64, 5, 7, 11] {
            assert_eq!(CyclotomicElem::zeta_pow(p, p as i64), CyclotomicElem::one(p));
            assert_eq!(
                CyclotomicElem::zeta_pow(p, -1),
                CyclotomicElem::zeta_pow(p, p as i64 - 1)
            );
        }
    }

    #[test]
    fn delta_squared_is_omega_minus_two() {
        // For p = 11: (zeta^6 - zeta^5)^2 = omega - 2, and the same closed
        // form holds for every p.
        for p in [3u64, 5, 7, 11, 13] {
            let expect = &CyclotomicElem::omega(p) - &CyclotomicElem::from_int(p, 2);
            assert_eq!(CyclotomicElem::delta_sq(p), expect);
        }
        let z6 = CyclotomicElem::zeta_pow(11, 6);
        let z5 = CyclotomicElem::zeta_pow(11, 5);
        let d = &z6 - &z5;
        assert_eq!(&d * &d, CyclotomicElem::delta_sq(11));
    }

    #[test]
    fn product_of_one_plus_two_zeta() {
        // prod_{i=0}^{p-1} (1 + 2 zeta^i) = 1 + 2^p, from x^p - 1 at x = -1/2.
        for p in [3u64, 5, 7, 11, 13] {
            let mut prod = CyclotomicElem::one(p);
            for i in 0..p {
                let f = &CyclotomicElem::one(p)
                    + &CyclotomicElem::zeta_pow(p, i as i64).scale_int(2);
                prod = &prod * &f;
            }
            let expect = CyclotomicElem::from_int(p, 1 + (1i64 << p));
            assert_eq!(prod, expect);
        }
    }

    #[test]
    fn conjugation_fixed_points() {
        let p = 11;
        assert_eq!(
            CyclotomicElem::zeta(p).conj(),
            CyclotomicElem::zeta_pow(p, -1)
        );
        let om = CyclotomicElem::omega(p);
        assert_eq!(om.conj(), om);
        assert!(om.is_real());
        let d = CyclotomicElem::delta(p);
        assert_eq!(d.conj(), -&d);
        assert!(!d.is_real());
        // Involution on random elements.
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..10 {
            let x = random_elem(&mut rng, p);
            assert_eq!(x.conj().conj(), x);
        }
    }

    #[test]
    fn trace_and_norm_basics() {
        let p = 11;
        assert_eq!(CyclotomicElem::zeta(p).trace_kq(), rat(-1, 1));
        assert_eq!(CyclotomicElem::one(p).trace_kq(), rat(10, 1));
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..5 {
            let j = rng.random_range(0..11);
            let n = CyclotomicElem::zeta_pow(p, j).norm_kf();
            assert_eq!(n, CyclotomicElem::one(p));
            assert!(n.is_real());
        }
        // trace_fq = trace_kq / 2 on F; 1/2 has trace 5/2 at p = 11.
        let half = CyclotomicElem::from_rational(p, rat(1, 2));
        assert_eq!(half.trace_fq().unwrap(), rat(5, 2));
        assert!(CyclotomicElem::delta(p).trace_fq().is_err());
    }

    #[test]
    fn trace_matches_conjugate_sum() {
        // Independent route: sum the p-1 Galois conjugates.
        let mut rng = StdRng::seed_from_u64(4);
        for p in [5u64, 11] {
            for _ in 0..5 {
                let x = random_elem(&mut rng, p);
                let mut s = x.clone();
                for k in 2..p {
                    s = &s + &x.galois(k);
                }
                assert_eq!(
                    s.as_rational().expect("trace is rational").clone(),
                    x.trace_kq()
                );
            }
        }
    }

    #[test]
    fn galois_composes() {
        let mut rng = StdRng::seed_from_u64(5);
        let p = 11;
        for _ in 0..10 {
            let x = random_elem(&mut rng, p);
            let k = rng.random_range(1..p);
            let l = rng.random_range(1..p);
            assert_eq!(x.galois(k).galois(l), x.galois(k * l % p));
        }
    }

    #[test]
    fn division_round_trips() {
        let mut rng = StdRng::seed_from_u64(6);
        for p in [5u64, 11] {
            for _ in 0..10 {
                let a = random_elem(&mut rng, p);
                let mut b = random_elem(&mut rng, p);
                while b.is_zero() {
                    b = random_elem(&mut rng, p);
                }
                let q = a.checked_div(&b).unwrap();
                assert_eq!(&q * &b, a);
            }
        }
        assert_eq!(
            CyclotomicElem::zero(11).inverse(),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn ord2_basics() {
        let p = 11;
        assert_eq!(
            CyclotomicElem::from_int(p, 2).ord2().unwrap(),
            Val2::Finite(1)
        );
        assert_eq!(CyclotomicElem::zero(p).ord2().unwrap(), Val2::Infinite);
        assert_eq!(
            CyclotomicElem::from_rational(p, rat(3, 4)).ord2().unwrap(),
            Val2::Finite(-2)
        );
        // Refused when 2 is not a primitive root.
        assert!(CyclotomicElem::from_int(7, 2).ord2().is_err());
    }

    #[test]
    fn ord2_of_y_j_is_minus_one() {
        // y_j = (zeta^j - zeta^(-j)) / (2 delta) is a half-unit for p = 11.
        let p = 11;
        let delta = CyclotomicElem::delta(p);
        for j in 1..p as i64 {
            let num = &CyclotomicElem::zeta_pow(p, j) - &CyclotomicElem::zeta_pow(p, -j);
            let y = num.checked_div(&delta.scale_int(2)).unwrap();
            assert!(y.is_real());
            assert_eq!(y.ord2().unwrap(), Val2::Finite(-1), "j = {j}");
        }
    }

    #[test]
    fn ord2_of_generator_ratios() {
        // ord2((1 + 2 zeta^i)/(1 + 2 zeta^(-i)) - 1) = 1 for i = 2..5, p = 11.
        let p = 11;
        for i in 2..=5i64 {
            let n = &CyclotomicElem::one(p) + &CyclotomicElem::zeta_pow(p, i).scale_int(2);
            let d = &CyclotomicElem::one(p) + &CyclotomicElem::zeta_pow(p, -i).scale_int(2);
            let g = n.checked_div(&d).unwrap();
            let gm1 = &g - &CyclotomicElem::one(p);
            assert_eq!(gm1.ord2().unwrap(), Val2::Finite(1), "i = {i}");
        }
    }

    #[test]
    fn ord2_matches_norm_route() {
        // Independent oracle: ord2(x) = ord_2(N_{K/Q} x) / (p - 1).
        let mut rng = StdRng::seed_from_u64(7);
        for p in [5u64, 11] {
            for _ in 0..15 {
                let x = random_integral(&mut rng, p);
                if x.is_zero() {
                    continue;
                }
                let n = x.norm_kq();
                assert!(n.denom().is_one());
                let vn = n.numer().trailing_zeros().unwrap() as i64;
                assert_eq!(vn % (p as i64 - 1), 0);
                assert_eq!(
                    x.ord2().unwrap(),
                    Val2::Finite(vn / (p as i64 - 1)),
                    "p = {p}"
                );
            }
        }
    }

    #[test]
    fn ord2_ultrametric() {
        let mut rng = StdRng::seed_from_u64(8);
        let p = 11;
        for _ in 0..25 {
            let a = random_elem(&mut rng, p);
            let b = random_elem(&mut rng, p);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let va = a.ord2().unwrap().finite().unwrap();
            let vb = b.ord2().unwrap().finite().unwrap();
            let prod = (&a * &b).ord2().unwrap().finite().unwrap();
            assert_eq!(prod, va + vb);
            match (&a + &b).ord2().unwrap() {
                Val2::Finite(v) => assert!(v >= va.min(vb)),
                Val2::Infinite => {}
            }
        }
    }

    #[test]
    fn two_power_split_unit_part() {
        let p = 11;
        let x = CyclotomicElem::omega(p).scale(&rat(12, 5));
        let (u, v) = x.two_power_split().unwrap();
        assert_eq!(v, 2);
        assert_eq!(u.ord2().unwrap(), Val2::Finite(0));
        assert_eq!(u.scale(&rat(4, 1)), x);
    }

    #[test]
    fn serialization_parts() {
        let p = 5;
        let x = CyclotomicElem::from_poly(
            p,
            &[rat(1, 2), rat(-1, 3), rat(0, 1), rat(5, 1)],
        )
        .unwrap();
        let (nums, den) = x.to_parts();
        assert_eq!(den, BigInt::from(6));
        assert_eq!(
            nums,
            vec![
                BigInt::from(3),
                BigInt::from(-2),
                BigInt::from(0),
                BigInt::from(30)
            ]
        );
        let json = serde_json::to_value(&x).unwrap();
        assert_eq!(json["p"], 5);
        assert_eq!(json["den"], 6);
        assert_eq!(json["num"][0], 3);
    }
}
