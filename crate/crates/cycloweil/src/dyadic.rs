//! The completion of the real subfield `F` at its unique dyadic place:
//! additive character, conductors, unit squareness, and the Hilbert symbol.
//!
//! Requires 2 to be a primitive root mod p, so that 2 is inert in `K` and
//! `F` and the global trace equals the local one. Squareness of a unit is
//! decided mod 8 (local square theorem for an unramified dyadic field), so
//! one precomputed table of unit squares in `O_F/8` settles everything.
//!
//! The Hilbert symbol is decided by an exact-certificate search: a grid
//! point either exhibits `a x^2 + b y^2` equal to a square (an actual
//! isotropic vector, so `+1` answers are unconditional), or the staged
//! grids exhaust the Hensel bounds and `-1` is returned. Stage A scans
//! `y/x` mod 4 for valuation-0 targets; stage B, only reachable when both
//! slots are units, follows the unique mod-2 square root to valuation-2
//! targets mod 16. Deeper targets would force `-ab` into the square class
//! already handled by an early exit.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::cyclotomic::CyclotomicElem;
use crate::error::Error;
use crate::galois::GaloisRingElem;
use crate::{require_two_primitive_root, Result};

/// Which completion a squareness question refers to: the real subfield
/// `F_v` or the full field `K_w` (its unramified quadratic extension).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    F,
    K,
}

/// An additive character value `lambda_v(x) in [0, 1)` with 2-power
/// denominator, so `psi_v(x) = exp(-2 pi i lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicFrac {
    num: u64,
    log_den: u32,
}

impl DyadicFrac {
    pub fn zero() -> Self {
        DyadicFrac { num: 0, log_den: 0 }
    }

    fn new(mut num: u64, mut log_den: u32) -> Self {
        if log_den > 0 {
            num &= (1u64 << log_den) - 1;
        } else {
            num = 0;
        }
        while log_den > 0 && num % 2 == 0 {
            if num == 0 {
                log_den = 0;
                break;
            }
            num /= 2;
            log_den -= 1;
        }
        DyadicFrac { num, log_den }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    /// log2 of the denominator.
    pub fn log_den(&self) -> u32 {
        self.log_den
    }

    pub fn value_f64(&self) -> f64 {
        self.num as f64 / (1u64 << self.log_den) as f64
    }

    /// Numerator after rescaling to denominator `2^n`; requires
    /// `log_den <= n`.
    pub fn scaled_numer(&self, n: u32) -> u64 {
        assert!(self.log_den <= n, "insufficient root-of-unity order");
        self.num << (n - self.log_den)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.log_den.max(other.log_den);
        DyadicFrac::new(self.scaled_numer(n) + other.scaled_numer(n), n)
    }
}

/// The 2-power fractional part of a rational: its image in `Q_2 / Z_2`.
pub fn frac2(r: &BigRational) -> DyadicFrac {
    let e = r.denom().trailing_zeros().expect("nonzero denominator") as u32;
    if e == 0 {
        return DyadicFrac::zero();
    }
    assert!(e <= 32, "unexpectedly deep dyadic denominator");
    let modulus = BigInt::one() << e;
    let m_odd = r.denom() >> (e as u64);
    let num = r.numer().mod_floor(&modulus).to_u64().expect("fits");
    let m = m_odd.mod_floor(&modulus).to_u64().expect("fits");
    DyadicFrac::new(num.wrapping_mul(inv_odd(m, e)), e)
}

/// Inverse of an odd residue mod `2^e` (e <= 32).
fn inv_odd(d: u64, e: u32) -> u64 {
    debug_assert!(d & 1 == 1);
    let mut x = d;
    for _ in 0..5 {
        x = x.wrapping_mul(2u64.wrapping_sub(d.wrapping_mul(x)));
    }
    x & ((1u64 << e) - 1)
}

/// Precomputed dyadic context for one prime p: integral basis of `O_F`,
/// the conductor of the standard character, and the unit-square table of
/// `O_F/8`. Immutable once built; all methods are pure.
pub struct Dyadic {
    p: u64,
    k_v: u64,
    /// omega_j = zeta^j + zeta^(-j), j = 1..k_v: a Z-basis of O_F.
    omega_basis: Vec<CyclotomicElem>,
    big_delta: CyclotomicElem,
    psi_conductor: i64,
    /// Encodings (3 bits per coefficient) of squares of units of `O_F/8`.
    square_table: HashSet<u64>,
    unit_count: u64,
}

impl Dyadic {
    pub fn new(p: u64) -> Result<Self> {
        require_two_primitive_root(p)?;
        let k_v = (p - 1) / 2;
        let omega_basis: Vec<CyclotomicElem> = (1..=k_v as i64)
            .map(|j| &CyclotomicElem::zeta_pow(p, j) + &CyclotomicElem::zeta_pow(p, -j))
            .collect();
        let big_delta = CyclotomicElem::delta_sq(p);
        let mut dy = Dyadic {
            p,
            k_v,
            omega_basis,
            big_delta,
            psi_conductor: 0,
            square_table: HashSet::new(),
            unit_count: 0,
        };
        dy.psi_conductor = dy.find_psi_conductor()?;
        dy.build_square_table()?;
        Ok(dy)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue degree of `F_v` over `Q_2`.
    pub fn k_v(&self) -> u64 {
        self.k_v
    }

    pub fn omega_basis(&self) -> &[CyclotomicElem] {
        &self.omega_basis
    }

    pub fn big_delta(&self) -> &CyclotomicElem {
        &self.big_delta
    }

    pub fn unit_count(&self) -> u64 {
        self.unit_count
    }

    pub fn square_count(&self) -> usize {
        self.square_table.len()
    }

    /// `lambda_v(x)`: the 2-power fractional part of `Tr_{F_v/Q_2}(x)`,
    /// equal to the global `Tr_{F/Q}(x)` since 2 is inert.
    pub fn psi_eval(&self, x: &CyclotomicElem) -> Result<DyadicFrac> {
        Ok(frac2(&x.trace_fq()?))
    }

    fn find_psi_conductor(&self) -> Result<i64> {
        const BOUND: i64 = 8;
        let two = BigRational::from_integer(BigInt::from(2));
        'outer: for m in (-BOUND..=BOUND).rev() {
            // psi trivial on 2^(-m) O_F <=> trivial on scaled basis elements.
            for b in &self.omega_basis {
                let scaled = if m >= 0 {
                    b.scale(&(BigRational::one() / two.pow(m as i32)))
                } else {
                    b.scale(&two.pow((-m) as i32))
                };
                if !self.psi_eval(&scaled)?.is_zero() {
                    continue 'outer;
                }
            }
            return Ok(m);
        }
        Err(Error::ConductorSearchExceeded { bound: BOUND })
    }

    /// `m(scale * psi) = m(psi) + ord2(scale)` for real nonzero `scale`.
    pub fn conductor_m(&self, scale: &CyclotomicElem) -> Result<i64> {
        if scale.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if !scale.is_real() {
            return Err(Error::NotReal);
        }
        let v = scale.ord2()?.finite().expect("nonzero");
        Ok(self.psi_conductor + v)
    }

    fn build_square_table(&mut self) -> Result<()> {
        let s = 3u32;
        let basis_gr: Vec<GaloisRingElem> = self
            .omega_basis
            .iter()
            .map(|w| w.reduce_mod(s))
            .collect::<Result<_>>()?;
        let mut table = HashSet::new();
        let mut units = 0u64;
        for_grid(&basis_gr, 8, self.p, s, |x| {
            if x.coeffs().iter().any(|&c| c & 1 == 1) {
                units += 1;
                table.insert(x.square().encode());
            }
        });
        // |units| = (2^k - 1) 2^2k and the squaring kernel has order 2^(k+1),
        // so the image must have exactly |units| / 2^(k+1) elements.
        let k = self.k_v as u32;
        let expected_units = ((1u64 << k) - 1) << (2 * k);
        assert_eq!(units, expected_units, "unit count of O_F/8");
        assert_eq!(
            table.len() as u64,
            expected_units >> (k + 1),
            "square count of O_F/8"
        );
        assert!(table.contains(&GaloisRingElem::one(self.p, s).encode()));
        self.square_table = table;
        self.unit_count = units;
        Ok(())
    }

    /// Squareness in the completion: even valuation and unit part a square
    /// mod 8. For `K` (the unramified quadratic extension) a real element
    /// is a square exactly when `x` or `x * Delta` is a square in `F`.
    pub fn is_square(&self, x: &CyclotomicElem, field: Field) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if !x.is_real() {
            return Err(Error::NotReal);
        }
        match field {
            Field::F => {
                let (unit, v) = x.two_power_split()?;
                if v.rem_euclid(2) != 0 {
                    return Ok(false);
                }
                let enc = unit.reduce_mod(3)?.encode();
                Ok(self.square_table.contains(&enc))
            }
            Field::K => Ok(self.is_square(x, Field::F)?
                || self.is_square(&(x * &self.big_delta), Field::F)?),
        }
    }

    /// Certifies squareness of the exact value behind a mod-64 residue:
    /// valuation visible and in {0, 2}, unit part mod 8 in the table.
    /// A `true` here proves the exact element is a square.
    fn certify_square_gr(&self, w: &GaloisRingElem) -> bool {
        match w.val2() {
            None => false,
            Some(e) if e % 2 == 1 || e > 2 => false,
            Some(e) => {
                let u = w.shift_down(e).reduce_precision(3);
                self.square_table.contains(&u.encode())
            }
        }
    }

    /// The dyadic Hilbert symbol `(a, b)_{F_v}` of two nonzero real
    /// elements: +1 exactly when `z^2 = a x^2 + b y^2` has a nontrivial
    /// solution over the completion.
    pub fn hilbert(&self, a: &CyclotomicElem, b: &CyclotomicElem) -> Result<i8> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if !a.is_real() || !b.is_real() {
            return Err(Error::NotReal);
        }
        // Normalize valuations into {0, 1} by square-class invariance.
        let mut a1 = normalize_val(a)?;
        let mut b1 = normalize_val(b)?;
        if self.is_square(&a1.0, Field::F)? || self.is_square(&b1.0, Field::F)? {
            return Ok(1);
        }
        // z = 0 branch: -ab a square makes the binary form isotropic. The
        // staged search below relies on this exit for its denominator bound.
        let minus_ab = normalize_val(&-&(&a1.0 * &b1.0))?;
        if self.is_square(&minus_ab.0, Field::F)? {
            return Ok(1);
        }
        if a1.1 == 1 && b1.1 == 1 {
            // (a, b) = (a, -ab); the product has even valuation.
            b1 = minus_ab;
            debug_assert_eq!(b1.1, 0);
        }
        if a1.1 == 1 {
            std::mem::swap(&mut a1, &mut b1);
        }
        debug_assert_eq!(a1.1, 0);
        // normalize_val already folded the residual factor of 2 into the
        // element, so the reductions carry the right valuations.
        let s = 6u32;
        let ag = a1.0.reduce_mod(s)?;
        let bg = b1.0.reduce_mod(s)?;
        let basis6: Vec<GaloisRingElem> = self
            .omega_basis
            .iter()
            .map(|w| w.reduce_mod(s))
            .collect::<Result<_>>()?;

        // Stage A: representations a + b (y/x)^2 and b + a (x/y)^2 with the
        // square landing at valuation 0; mod-4 grids saturate the Hensel
        // bound there.
        let mut found = false;
        for_grid(&basis6, 4, self.p, s, |y| {
            if !found {
                let w = ag.add(&bg.mul(&y.square()));
                found = self.certify_square_gr(&w);
            }
        });
        if found {
            return Ok(1);
        }
        for_grid(&basis6, 4, self.p, s, |x| {
            if !found {
                let w = bg.add(&ag.mul(&x.square()));
                found = self.certify_square_gr(&w);
            }
        });
        if found {
            return Ok(1);
        }

        // Stage B (both units): valuation-2 targets a + b y^2 = 4 * unit^2.
        // The square root of -a/b mod 2 is unique (Frobenius is bijective),
        // so refine along it mod 16.
        if b1.1 == 0 {
            let t0 = ag
                .reduce_precision(1)
                .neg()
                .mul(&bg.reduce_precision(1).inverse()?);
            let m = self.p - 1;
            let ystar = t0.pow(1u64 << (m - 1)).lift_precision(s);
            debug_assert_eq!(ystar.square().reduce_precision(1), t0);
            let double_basis: Vec<GaloisRingElem> =
                basis6.iter().map(|w| w.scale(2)).collect();
            for_grid_offset(&ystar, &double_basis, 8, |y| {
                if !found {
                    let w = ag.add(&bg.mul(&y.square()));
                    found = self.certify_square_gr(&w);
                }
            });
            if found {
                return Ok(1);
            }
        }
        Ok(-1)
    }
}

/// Rescales by an even power of 2 so the valuation lands in {0, 1};
/// returns the unit part together with the residual parity.
fn normalize_val(x: &CyclotomicElem) -> Result<(CyclotomicElem, i64)> {
    let (unit, v) = x.two_power_split()?;
    let parity = v.rem_euclid(2);
    Ok((
        if parity == 1 { unit.scale_int(2) } else { unit },
        parity,
    ))
}

/// Odometer over `sum_j c_j basis_j` for digits `c_j in [0, limit)`,
/// visiting every point exactly once with one basis addition per step.
pub(crate) fn for_grid(
    basis: &[GaloisRingElem],
    limit: u64,
    p: u64,
    s: u32,
    mut visit: impl FnMut(&GaloisRingElem),
) {
    for_grid_offset(&GaloisRingElem::zero(p, s), basis, limit, &mut visit)
}

pub(crate) fn for_grid_offset(
    offset: &GaloisRingElem,
    basis: &[GaloisRingElem],
    limit: u64,
    mut visit: impl FnMut(&GaloisRingElem),
) {
    let k = basis.len();
    let wrap: Vec<GaloisRingElem> = basis.iter().map(|w| w.scale(limit)).collect();
    let mut digits = vec![0u64; k];
    let mut cur = offset.clone();
    loop {
        visit(&cur);
        let mut j = 0;
        loop {
            if j == k {
                return;
            }
            digits[j] += 1;
            cur = cur.add(&basis[j]);
            if digits[j] < limit {
                break;
            }
            cur = cur.sub(&wrap[j]);
            digits[j] = 0;
            j += 1;
        }
    }
}
