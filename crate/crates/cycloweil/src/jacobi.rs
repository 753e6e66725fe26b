//! Jacobi sums and the Hecke character values they determine.
//!
//! `J(chi^r, chi^s) = -sum_{x != 0,1} chi^r(x) chi^s(1-x)` is computed
//! exactly in `Z[zeta_p]` by bucketing the character exponents with a
//! discrete-log table over the residue field, in parallel chunks of the
//! x-range. Every constructed sum is certified by `J * conj(J) = q`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cyclotomic::CyclotomicElem;
use crate::error::Error;
use crate::exec;
use crate::fermat::HeckeTuple;
use crate::finite_field::{DlogTable, PrimeIdealRep, DLOG_NONE};
use crate::Result;

/// An exact Jacobi sum with its certified modulus `q`.
#[derive(Debug, Clone)]
pub struct JacobiSumValue {
    pub value: CyclotomicElem,
    pub q: u64,
}

impl JacobiSumValue {
    /// Verifies `J * conj(J) = q` exactly before accepting the value.
    pub fn new(value: CyclotomicElem, q: u64) -> Result<Self> {
        let expect = CyclotomicElem::from_int(value.p(), q as i64);
        if value.norm_kf() != expect {
            return Err(Error::IdentificationFailure);
        }
        Ok(JacobiSumValue { value, q })
    }

    /// Numerical embedding of the normalized value `-J/sqrt(q)`.
    pub fn unit_embedding(&self) -> (f64, f64) {
        let (re, im) = self.value.embed();
        let s = (self.q as f64).sqrt();
        (-re / s, -im / s)
    }
}

/// The exact Jacobi sum for the character pair `(chi^r, chi^s)` at the
/// given prime ideal.
pub fn jacobi_sum(tuple: &HeckeTuple, ideal: &PrimeIdealRep) -> Result<JacobiSumValue> {
    jacobi_sum_impl(tuple, ideal, true)
}

/// Sequential twin of [`jacobi_sum`] for the benchmark comparison.
pub fn jacobi_sum_seq(tuple: &HeckeTuple, ideal: &PrimeIdealRep) -> Result<JacobiSumValue> {
    jacobi_sum_impl(tuple, ideal, false)
}

fn jacobi_sum_impl(
    tuple: &HeckeTuple,
    ideal: &PrimeIdealRep,
    parallel: bool,
) -> Result<JacobiSumValue> {
    if tuple.p != ideal.p {
        return Err(Error::InvalidInput("tuple level differs from ideal".into()));
    }
    let p = ideal.p;
    let q = ideal.q;
    let fq = &ideal.fq;
    let dlog = DlogTable::build(fq);

    // chi(x) = zeta^(minv * dlog(x) mod p) where zeta_image = gen^(m (q-1)/p).
    let z_dlog = dlog.table[fq.encode(&ideal.zeta_image) as usize] as u64;
    debug_assert_eq!(z_dlog % ((q - 1) / p), 0);
    let m = z_dlog / ((q - 1) / p);
    let minv = inverse_mod_u64(m, p);

    let one_idx = fq.encode(&fq.one());
    let table = &dlog.table;
    let r = tuple.r;
    let s = tuple.s;
    let skip_bucket = p as usize;
    let fq_owned = fq.clone();
    let bucket_of = move |idx: u64| -> usize {
        if idx == 0 || idx == one_idx {
            return skip_bucket;
        }
        let dx = table[idx as usize];
        debug_assert_ne!(dx, DLOG_NONE);
        let om_idx = fq_owned.encode_one_minus(idx);
        let d1mx = table[om_idx as usize];
        debug_assert_ne!(d1mx, DLOG_NONE);
        let jx = minv * (dx as u64 % p) % p;
        let j1mx = minv * (d1mx as u64 % p) % p;
        ((r * jx + s * j1mx) % p) as usize
    };
    let counts = if parallel {
        exec::range_fold_counts(q, p as usize + 1, bucket_of)
    } else {
        exec::range_fold_counts_seq(q, p as usize + 1, bucket_of)
    };
    debug_assert_eq!(counts[skip_bucket], 2);

    // J = -sum counts[j] zeta^j.
    let mut coeffs = vec![BigRational::from_integer(BigInt::from(0)); p as usize];
    for (j, &c) in counts.iter().take(p as usize).enumerate() {
        coeffs[j] = BigRational::from_integer(BigInt::from(c as i64));
    }
    let value = -&CyclotomicElem::from_poly(p, &coeffs)?;
    JacobiSumValue::new(value, q)
}

fn inverse_mod_u64(a: u64, m: u64) -> u64 {
    // m prime here; Fermat inverse.
    let mut acc = 1u64;
    let mut base = a % m;
    let mut e = m - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        e >>= 1;
        base = base * base % m;
    }
    acc
}

/// The character value `chi_{r,s,t}(l) = -J/|J|`: the exact sum plus its
/// unit-circle embedding.
pub fn chi_rst(tuple: &HeckeTuple, ideal: &PrimeIdealRep) -> Result<(JacobiSumValue, (f64, f64))> {
    let j = jacobi_sum(tuple, ideal)?;
    let v = j.unit_embedding();
    Ok((j, v))
}

/// The twisting character exponent: `chi_d(l) = (d/l)_p = zeta^e`.
pub fn chi_d(d: i64, ideal: &PrimeIdealRep) -> Result<u64> {
    if d == 0 {
        return Err(Error::ZeroArgument);
    }
    if (d.unsigned_abs() % ideal.ell) == 0 || ideal.ell == ideal.p {
        return Err(Error::RamifiedPrime {
            ell: ideal.ell,
            p: ideal.p,
        });
    }
    ideal.power_residue_int(d)
}

/// Value data for the twisted character `chi_d^(r+s) chi_{r,s,t}`.
#[derive(Debug, Clone)]
pub struct TwistedChiValue {
    pub twist_exponent: u64,
    pub jacobi: JacobiSumValue,
    /// Unit-circle embedding of the full value.
    pub value: (f64, f64),
}

pub fn chi_rst_d(tuple: &HeckeTuple, d: i64, ideal: &PrimeIdealRep) -> Result<TwistedChiValue> {
    let e = chi_d(d, ideal)?;
    let twist_exponent = (tuple.r + tuple.s) * e % tuple.p;
    let jacobi = jacobi_sum(tuple, ideal)?;
    let (re, im) = jacobi.unit_embedding();
    let ang = 2.0 * std::f64::consts::PI * twist_exponent as f64 / tuple.p as f64;
    let (c, sn) = (ang.cos(), ang.sin());
    Ok(TwistedChiValue {
        twist_exponent,
        jacobi,
        value: (re * c - im * sn, re * sn + im * c),
    })
}
