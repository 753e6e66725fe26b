//! The truncated ring `O_K / 2^s` in the power basis.
//!
//! When 2 is a primitive root mod p, `Phi_p` stays irreducible mod 2 and
//! this quotient is the Galois ring `GR(2^s, p-1)`; its mod-2 reduction is
//! the field `F_{2^(p-1)}`. Unit-group enumeration, Frobenius, and the
//! square tables all live here, on plain `u64` coefficient vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::cyclotomic::{check_odd_prime, CyclotomicElem};
use crate::error::Error;
use crate::{require_two_primitive_root, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaloisRingElem {
    p: u64,
    s: u32,
    /// Length `p - 1`, residues mod `2^s`.
    coeffs: Vec<u64>,
}

#[inline]
fn mask(s: u32) -> u64 {
    (1u64 << s) - 1
}

/// Inverse of an odd residue mod `2^64`, masked down by the caller.
#[inline]
fn inv_odd_u64(d: u64) -> u64 {
    debug_assert!(d & 1 == 1);
    let mut x = d; // correct mod 2^3 already for odd d? start from d: x*d = d^2 = 1 mod 8.
    for _ in 0..5 {
        x = x.wrapping_mul(2u64.wrapping_sub(d.wrapping_mul(x)));
    }
    x
}

impl GaloisRingElem {
    pub fn zero(p: u64, s: u32) -> Self {
        assert!((1..=16).contains(&s), "precision out of range");
        GaloisRingElem {
            p,
            s,
            coeffs: vec![0; (p - 1) as usize],
        }
    }

    pub fn one(p: u64, s: u32) -> Self {
        let mut e = Self::zero(p, s);
        e.coeffs[0] = 1;
        e
    }

    pub fn from_u64(p: u64, s: u32, n: u64) -> Self {
        let mut e = Self::zero(p, s);
        e.coeffs[0] = n & mask(s);
        e
    }

    /// `zeta^k` in the truncated ring.
    pub fn zeta_pow(p: u64, s: u32, k: i64) -> Self {
        let mut buckets = vec![0u64; p as usize];
        buckets[k.rem_euclid(p as i64) as usize] = 1;
        Self::from_buckets(p, s, buckets)
    }

    fn from_buckets(p: u64, s: u32, mut buckets: Vec<u64>) -> Self {
        let m = mask(s);
        let top = buckets.pop().expect("nonempty");
        if top != 0 {
            for b in buckets.iter_mut() {
                *b = (b.wrapping_sub(top)) & m;
            }
        } else {
            for b in buckets.iter_mut() {
                *b &= m;
            }
        }
        GaloisRingElem { p, s, coeffs: buckets }
    }

    /// Reduction of a cyclotomic element with odd coefficient denominators.
    pub fn from_cyclotomic(x: &CyclotomicElem, s: u32) -> Result<Self> {
        check_odd_prime(x.p())?;
        assert!((1..=16).contains(&s), "precision out of range");
        let m = mask(s);
        let modulus = BigInt::from(1u64 << s);
        let mut coeffs = Vec::with_capacity(x.coeffs().len());
        for c in x.coeffs() {
            if c.denom().is_even() {
                return Err(Error::EvenDenominator);
            }
            let num = c.numer().mod_floor(&modulus).to_u64().expect("masked");
            let den = c.denom().mod_floor(&modulus).to_u64().expect("masked");
            coeffs.push(num.wrapping_mul(inv_odd_u64(den)) & m);
        }
        Ok(GaloisRingElem { p: x.p(), s, coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed levels");
        assert_eq!(self.s, other.s, "mixed precisions");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compat(other);
        let m = mask(self.s);
        GaloisRingElem {
            p: self.p,
            s: self.s,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a + b) & m)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compat(other);
        let m = mask(self.s);
        GaloisRingElem {
            p: self.p,
            s: self.s,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.wrapping_sub(*b) & m)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        let m = mask(self.s);
        GaloisRingElem {
            p: self.p,
            s: self.s,
            coeffs: self.coeffs.iter().map(|a| a.wrapping_neg() & m).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other);
        let p = self.p as usize;
        let mut buckets = vec![0u64; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let idx = i + j;
                let idx = if idx >= p { idx - p } else { idx };
                buckets[idx] = buckets[idx].wrapping_add(a * b);
            }
        }
        Self::from_buckets(self.p, self.s, buckets)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p, self.s);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Scalar multiple by a residue.
    pub fn scale(&self, n: u64) -> Self {
        let m = mask(self.s);
        GaloisRingElem {
            p: self.p,
            s: self.s,
            coeffs: self.coeffs.iter().map(|a| a.wrapping_mul(n) & m).collect(),
        }
    }

    /// Galois action `zeta -> zeta^k`, `gcd(k, p) = 1`.
    pub fn galois(&self, k: u64) -> Self {
        let p = self.p as usize;
        let k = (k % self.p) as usize;
        assert!(k != 0, "galois exponent divisible by p");
        let mut buckets = vec![0u64; p];
        for (i, &c) in self.coeffs.iter().enumerate() {
            buckets[(i * k) % p] = buckets[(i * k) % p].wrapping_add(c);
        }
        Self::from_buckets(self.p, self.s, buckets)
    }

    pub fn conj(&self) -> Self {
        self.galois(self.p - 1)
    }

    /// Frobenius power `zeta -> zeta^(2^i)`; reduces to `x -> x^(2^i)` on
    /// the residue field. Requires 2 primitive root mod p.
    pub fn frobenius(&self, i: u32) -> Result<Self> {
        require_two_primitive_root(self.p)?;
        let mut k = 1u64;
        for _ in 0..i {
            k = k * 2 % self.p;
        }
        Ok(self.galois(k))
    }

    /// Norm to the real subring, `a * conj(a)`.
    pub fn norm_kf(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Unit test in the Galois ring: nonzero image in the residue field.
    pub fn is_unit(&self) -> Result<bool> {
        require_two_primitive_root(self.p)?;
        Ok(self.coeffs.iter().any(|&c| c & 1 == 1))
    }

    /// Exact inverse of a unit: Fermat inverse in the residue field lifted
    /// by Newton iteration to full precision.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit()? {
            return Err(Error::NonUnit);
        }
        let m = self.p - 1;
        // In F_{2^m}: a^(2^m - 2) = a^(-1).
        let a1 = self.reduce_precision(1);
        let inv1 = a1.pow((1u64 << m) - 2);
        let mut x = inv1.lift_precision(self.s);
        let two = Self::from_u64(self.p, self.s, 2);
        for _ in 0..5 {
            // x <- x (2 - a x), quadratic convergence in the 2-adic metric.
            x = x.mul(&two.sub(&self.mul(&x)));
        }
        debug_assert!(self.mul(&x) == Self::one(self.p, self.s));
        Ok(x)
    }

    /// Trace of the real subring down to `Z / 2^s`: the sum of the first
    /// `(p-1)/2` Frobenius powers. Matches the global `Tr_{F/Q}` mod `2^s`
    /// on reductions of integral real elements. Requires conjugation-fixed
    /// input.
    pub fn trace_f(&self) -> Result<u64> {
        if *self != self.conj() {
            return Err(Error::NotReal);
        }
        let k_v = (self.p - 1) / 2;
        let mut acc = self.clone();
        let mut fr = self.clone();
        for _ in 1..k_v {
            fr = fr.frobenius(1)?;
            acc = acc.add(&fr);
        }
        debug_assert!(
            acc.coeffs[1..].iter().all(|&c| c == 0),
            "trace must be a constant"
        );
        Ok(acc.coeffs[0])
    }

    /// Truncates to a smaller precision.
    pub fn reduce_precision(&self, s: u32) -> Self {
        assert!(s <= self.s);
        let m = mask(s);
        GaloisRingElem {
            p: self.p,
            s,
            coeffs: self.coeffs.iter().map(|c| c & m).collect(),
        }
    }

    /// Reinterprets at a higher precision (coefficients unchanged).
    pub fn lift_precision(&self, s: u32) -> Self {
        assert!(s >= self.s && s <= 16);
        GaloisRingElem {
            p: self.p,
            s,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Minimum coefficient 2-valuation, i.e. the dyadic valuation as far as
    /// this precision can see it; `None` when the element is 0 mod `2^s`.
    pub fn val2(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| c.trailing_zeros())
            .min()
    }

    /// Divides by `2^k`; requires every coefficient divisible by `2^k`.
    /// Precision drops accordingly.
    pub fn shift_down(&self, k: u32) -> Self {
        assert!(k < self.s);
        assert!(self.coeffs.iter().all(|c| c & ((1u64 << k) - 1) == 0));
        GaloisRingElem {
            p: self.p,
            s: self.s - k,
            coeffs: self.coeffs.iter().map(|c| c >> k).collect(),
        }
    }

    /// Packs the coefficient vector into a single integer, `s` bits per
    /// coefficient. Requires `(p-1) * s <= 64`.
    pub fn encode(&self) -> u64 {
        debug_assert!((self.p - 1) * self.s as u64 <= 64);
        let mut out = 0u64;
        for &c in self.coeffs.iter().rev() {
            out = (out << self.s) | c;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;
    use rand::{rngs::StdRng, RngExt, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn inverse_of_three_mod_eight() {
        let p = 11;
        let three = GaloisRingElem::from_u64(p, 3, 3);
        let inv = three.inverse().unwrap();
        assert_eq!(three.mul(&inv), GaloisRingElem::one(p, 3));
        assert_eq!(inv, GaloisRingElem::from_u64(p, 3, 3)); // 3 * 3 = 9 = 1 mod 8
    }

    #[test]
    fn fourth_powers_of_one_plus_two_zeta() {
        // (1 + 2 zeta^i)^4 = 1 in O_K/8 for p = 11.
        let p = 11;
        for i in 1..p as i64 {
            let g = GaloisRingElem::one(p, 3).add(&GaloisRingElem::zeta_pow(p, 3, i).scale(2));
            assert_eq!(g.pow(4), GaloisRingElem::one(p, 3), "i = {i}");
        }
    }

    #[test]
    fn even_denominator_rejected() {
        let x = CyclotomicElem::from_rational(11, rat(1, 2));
        assert_eq!(x.reduce_mod(3), Err(Error::EvenDenominator));
        // Odd denominators reduce fine: 1/3 = 3 mod 8.
        let y = CyclotomicElem::from_rational(11, rat(1, 3));
        assert_eq!(y.reduce_mod(3).unwrap(), GaloisRingElem::from_u64(11, 3, 3));
    }

    #[test]
    fn frobenius_moves_zeta() {
        let p = 11;
        let z = GaloisRingElem::zeta_pow(p, 3, 1);
        assert_eq!(z.frobenius(1).unwrap(), GaloisRingElem::zeta_pow(p, 3, 2));
        assert_eq!(z.frobenius(2).unwrap(), GaloisRingElem::zeta_pow(p, 3, 4));
        // frobenius^(p-1)/2 is conjugation: 2^5 = -1 mod 11.
        assert_eq!(z.frobenius(5).unwrap(), z.conj());
    }

    #[test]
    fn trace_of_one() {
        for (p, s) in [(11u64, 3u32), (5, 4), (13, 3)] {
            let one = GaloisRingElem::one(p, s);
            assert_eq!(one.trace_f().unwrap(), ((p - 1) / 2) & ((1 << s) - 1));
        }
        // Non-real input is rejected.
        let z = GaloisRingElem::zeta_pow(11, 3, 1);
        assert_eq!(z.trace_f(), Err(Error::NotReal));
    }

    #[test]
    fn trace_matches_global_trace() {
        // Oracle: exact Tr_{F/Q} of a random integral real element, mod 2^s.
        let mut rng = StdRng::seed_from_u64(11);
        for p in [5u64, 11, 13] {
            for _ in 0..34 {
                let mut x = CyclotomicElem::zero(p);
                for j in 1..=(p - 1) / 2 {
                    let c = rng.random_range(-20i64..=20);
                    let w = &CyclotomicElem::zeta_pow(p, j as i64)
                        + &CyclotomicElem::zeta_pow(p, -(j as i64));
                    x = &x + &w.scale_int(c);
                }
                let s = 3;
                let tr = x.trace_fq().unwrap();
                assert!(tr.denom().is_one());
                let expect = tr.numer().mod_floor(&BigInt::from(8)).to_u64().unwrap();
                assert_eq!(x.reduce_mod(s).unwrap().trace_f().unwrap(), expect);
            }
        }
    }

    #[test]
    fn reduction_is_ring_homomorphism() {
        let mut rng = StdRng::seed_from_u64(12);
        let p = 11;
        let s = 3;
        for _ in 0..20 {
            let a = random_integral(&mut rng, p);
            let b = random_integral(&mut rng, p);
            let ra = a.reduce_mod(s).unwrap();
            let rb = b.reduce_mod(s).unwrap();
            assert_eq!((&a + &b).reduce_mod(s).unwrap(), ra.add(&rb));
            assert_eq!((&a * &b).reduce_mod(s).unwrap(), ra.mul(&rb));
            assert_eq!(a.conj().reduce_mod(s).unwrap(), ra.conj());
            assert_eq!(
                a.galois(2).reduce_mod(s).unwrap(),
                ra.frobenius(1).unwrap()
            );
        }
    }

    #[test]
    fn non_unit_inverse_rejected() {
        let two = GaloisRingElem::from_u64(11, 3, 2);
        assert_eq!(two.inverse(), Err(Error::NonUnit));
        assert!(!two.is_unit().unwrap());
    }

    #[test]
    fn random_unit_inverses() {
        let mut rng = StdRng::seed_from_u64(13);
        for p in [5u64, 11] {
            for s in [1u32, 3, 6] {
                for _ in 0..10 {
                    let mut e = GaloisRingElem::zero(p, s);
                    for c in e.coeffs.iter_mut() {
                        *c = rng.random_range(0..(1u64 << s));
                    }
                    if !e.is_unit().unwrap() {
                        continue;
                    }
                    let inv = e.inverse().unwrap();
                    assert_eq!(e.mul(&inv), GaloisRingElem::one(p, s));
                }
            }
        }
    }

    fn random_integral(rng: &mut StdRng, p: u64) -> CyclotomicElem {
        let coeffs: Vec<BigRational> = (0..p - 1)
            .map(|_| rat(rng.random_range(-20..=20), 1))
            .collect();
        CyclotomicElem::from_poly(p, &coeffs).unwrap()
    }
}
