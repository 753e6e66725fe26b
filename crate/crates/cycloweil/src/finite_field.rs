//! Small finite fields `F_q`, `q = ell^d`, and prime-ideal data above a
//! rational prime `ell` in the p-th cyclotomic field.
//!
//! `Phi_p mod ell` splits into `(p-1)/d` irreducible factors of degree
//! `d = ord(ell mod p)`. Each factor corresponds to a prime ideal; the
//! representative carries the factor, the residue field realized as
//! `F_ell[x]/(factor)`, and the image of `zeta` (the class of `x`), which
//! has exact order p. Power-residue symbols are computed against that
//! image.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::cyclotomic::CyclotomicElem;
use crate::error::Error;
use crate::Result;

/// Cap on the residue field size; the discrete-log table is O(q) memory.
pub const Q_CAP: u64 = 10_000_000;

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of `a` mod `n` (requires gcd(a, n) = 1).
pub fn multiplicative_order(a: u64, n: u64) -> u64 {
    let mut x = a % n;
    let mut ord = 1;
    while x != 1 {
        x = x * (a % n) % n;
        ord += 1;
        assert!(ord <= n, "not coprime");
    }
    ord
}

// ---------------------------------------------------------------------------
// F_q arithmetic on little-endian coefficient vectors mod ell
// ---------------------------------------------------------------------------

/// The field `F_ell[x] / (modulus)` for a monic irreducible `modulus`.
#[derive(Debug, Clone)]
pub struct Fq {
    pub ell: u64,
    pub d: usize,
    pub q: u64,
    /// Monic, length d + 1.
    pub modulus: Vec<u64>,
}

pub type FqElem = Vec<u64>;

impl Fq {
    fn new(ell: u64, modulus: Vec<u64>) -> Self {
        let d = modulus.len() - 1;
        assert_eq!(modulus[d], 1, "modulus must be monic");
        let q = ell.pow(d as u32);
        Fq { ell, d, q, modulus }
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.d]
    }

    pub fn one(&self) -> FqElem {
        let mut e = self.zero();
        e[0] = 1;
        e
    }

    pub fn from_u64(&self, n: u64) -> FqElem {
        let mut e = self.zero();
        e[0] = n % self.ell;
        e
    }

    pub fn from_i64(&self, n: i64) -> FqElem {
        self.from_u64(n.rem_euclid(self.ell as i64) as u64)
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + y) % self.ell)
            .collect()
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + self.ell - y) % self.ell)
            .collect()
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let d = self.d;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    prod[i + j] = (prod[i + j] + x * y) % self.ell;
                }
            }
        }
        // Reduce by the monic modulus.
        for i in (d..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..d {
                let m = self.modulus[j];
                if m != 0 {
                    let idx = i - d + j;
                    prod[idx] = (prod[idx] + c * (self.ell - m) % self.ell) % self.ell;
                }
            }
        }
        prod.truncate(d);
        prod
    }

    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn inverse(&self, a: &FqElem) -> Result<FqElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Index of an element: digits base ell.
    pub fn encode(&self, a: &FqElem) -> u64 {
        let mut idx = 0u64;
        for &c in a.iter().rev() {
            idx = idx * self.ell + c;
        }
        idx
    }

    pub fn decode(&self, mut idx: u64) -> FqElem {
        let mut e = self.zero();
        for slot in e.iter_mut() {
            *slot = idx % self.ell;
            idx /= self.ell;
        }
        e
    }

    /// Index of `1 - x` given the index of `x`, without decoding twice.
    pub fn encode_one_minus(&self, idx: u64) -> u64 {
        let mut rest = idx;
        let mut out = 0u64;
        let mut base = 1u64;
        for i in 0..self.d {
            let digit = rest % self.ell;
            rest /= self.ell;
            let nd = if i == 0 {
                (1 + self.ell - digit) % self.ell
            } else {
                (self.ell - digit) % self.ell
            };
            out += nd * base;
            base *= self.ell;
        }
        out
    }

    /// A generator of the cyclic group `F_q^x`.
    pub fn find_generator(&self) -> FqElem {
        let factors = factorize(self.q - 1);
        let mut idx = 1u64;
        loop {
            idx += 1;
            let cand = self.decode(idx % self.q);
            if self.is_zero(&cand) {
                continue;
            }
            if factors
                .iter()
                .all(|&(r, _)| self.pow(&cand, (self.q - 1) / r) != self.one())
            {
                return cand;
            }
        }
    }
}

// Polynomial helpers mod ell (little-endian, variable length) used for
// locating an irreducible modulus.

fn poly_mod_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], ell: u64) -> Vec<u64> {
    let d = m.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                prod[i + j] = (prod[i + j] + x * y) % ell;
            }
        }
    }
    for i in (d..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..d {
            if m[j] != 0 {
                let idx = i - d + j;
                prod[idx] = (prod[idx] + c * (ell - m[j]) % ell) % ell;
            }
        }
    }
    prod.truncate(d.max(1));
    prod
}

fn poly_powmod(a: &[u64], mut e: u64, m: &[u64], ell: u64) -> Vec<u64> {
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    acc.resize(m.len() - 1, 0);
    let mut b = base.clone();
    b.resize(m.len() - 1, 0);
    base = b;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, ell);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mulmod(&base, &base, m, ell);
        }
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], ell: u64) -> Vec<u64> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    poly_mod_trim(&mut r0);
    poly_mod_trim(&mut r1);
    while !(r1.len() == 1 && r1[0] == 0) {
        let rem = poly_rem(&r0, &r1, ell);
        r0 = std::mem::replace(&mut r1, rem);
    }
    r0
}

fn poly_rem(a: &[u64], b: &[u64], ell: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_mod_trim(&mut r);
    let mut bb = b.to_vec();
    poly_mod_trim(&mut bb);
    assert!(!(bb.len() == 1 && bb[0] == 0), "remainder by zero polynomial");
    let db = bb.len() - 1;
    let lead_inv = mod_inverse(bb[db], ell);
    loop {
        poly_mod_trim(&mut r);
        if (r.len() == 1 && r[0] == 0) || r.len() - 1 < db {
            return r;
        }
        let dr = r.len() - 1;
        let f = r[dr] * lead_inv % ell;
        for i in 0..=db {
            if bb[i] != 0 {
                let idx = dr - db + i;
                r[idx] = (r[idx] + f * (ell - bb[i]) % ell) % ell;
            }
        }
        debug_assert_eq!(r[dr], 0);
        r.pop();
        if r.is_empty() {
            r.push(0);
        }
    }
}

fn mod_inverse(a: u64, ell: u64) -> u64 {
    // Fermat; ell prime.
    let mut e = ell - 2;
    let mut base = a % ell;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % ell;
        }
        e >>= 1;
        base = base * base % ell;
    }
    acc
}

/// Monic irreducible of degree d over F_ell (Rabin's test over a
/// deterministic sweep of candidates).
fn find_irreducible(ell: u64, d: usize) -> Vec<u64> {
    if d == 1 {
        return vec![0, 1]; // x itself
    }
    let prime_divs: Vec<u64> = factorize(d as u64).iter().map(|&(r, _)| r).collect();
    let x = vec![0u64, 1];
    let mut counter = 0u64;
    loop {
        // Candidate x^d + (base-ell digits of counter).
        let mut cand = vec![0u64; d + 1];
        cand[d] = 1;
        let mut rest = counter;
        for slot in cand.iter_mut().take(d) {
            *slot = rest % ell;
            rest /= ell;
        }
        counter += 1;
        if rest > 0 {
            panic!("no irreducible of degree {d} over F_{ell} found");
        }
        // x^(ell^d) = x mod cand, and gcd(x^(ell^(d/r)) - x, cand) = 1.
        let mut frob = x.clone();
        frob.resize(d, 0);
        let mut powers = vec![frob.clone()];
        for _ in 0..d {
            let last = powers.last().unwrap().clone();
            powers.push(poly_powmod(&last, ell, &cand, ell));
        }
        let mut xd = powers[d].clone();
        poly_mod_trim(&mut xd);
        let mut xx = x.clone();
        poly_mod_trim(&mut xx);
        if xd != xx {
            continue;
        }
        let ok = prime_divs.iter().all(|&r| {
            let sub = d / r as usize;
            let mut diff: Vec<u64> = powers[sub].clone();
            diff.resize(d.max(2), 0);
            diff[1] = (diff[1] + ell - 1) % ell;
            poly_mod_trim(&mut diff);
            if diff.len() == 1 && diff[0] == 0 {
                return false;
            }
            let g = poly_gcd(&cand, &diff, ell);
            g.len() == 1
        });
        if ok {
            return cand;
        }
    }
}

// ---------------------------------------------------------------------------
// Prime ideals above ell
// ---------------------------------------------------------------------------

/// One prime ideal above `ell` in `Q(zeta_p)`: an irreducible factor `g`
/// of `Phi_p mod ell` together with the residue field `F_ell[x]/(g)` and
/// the image of `zeta` (the class of x, of exact order p).
#[derive(Debug, Clone)]
pub struct PrimeIdealRep {
    pub p: u64,
    pub ell: u64,
    pub q: u64,
    pub degree: usize,
    /// Monic irreducible factor of `Phi_p` mod ell, little-endian.
    pub factor: Vec<u64>,
    pub fq: Fq,
    pub zeta_image: FqElem,
}

impl PrimeIdealRep {
    /// Image of a cyclotomic element with denominators coprime to ell.
    pub fn map_cyclotomic(&self, a: &CyclotomicElem) -> Result<FqElem> {
        let ell_big = BigInt::from(self.ell);
        let mut acc = self.fq.zero();
        let mut zeta_pow = self.fq.one();
        for c in a.coeffs() {
            let den = c.denom().mod_floor(&ell_big).to_u64().unwrap();
            if den == 0 {
                return Err(Error::InvalidInput(
                    "denominator not coprime to ell".into(),
                ));
            }
            let num = c.numer().mod_floor(&ell_big).to_u64().unwrap();
            let coeff = num * mod_inverse(den, self.ell) % self.ell;
            if coeff != 0 {
                let term: FqElem = zeta_pow.iter().map(|&z| z * coeff % self.ell).collect();
                acc = self.fq.add(&acc, &term);
            }
            zeta_pow = self.fq.mul(&zeta_pow, &self.zeta_image);
        }
        Ok(acc)
    }

    pub fn map_int(&self, n: i64) -> FqElem {
        self.fq.from_i64(n)
    }

    /// The p-power-residue symbol: the exponent j with
    /// `a^((q-1)/p) = zeta_image^j`. Errors when `a = 0` in the residue
    /// field.
    pub fn power_residue(&self, a: &FqElem) -> Result<u64> {
        if self.fq.is_zero(a) {
            return Err(Error::ZeroArgument);
        }
        let w = self.fq.pow(a, (self.q - 1) / self.p);
        let mut z = self.fq.one();
        for j in 0..self.p {
            if w == z {
                return Ok(j);
            }
            z = self.fq.mul(&z, &self.zeta_image);
        }
        Err(Error::IdentificationFailure)
    }

    pub fn power_residue_int(&self, n: i64) -> Result<u64> {
        self.power_residue(&self.map_int(n))
    }
}

/// All prime ideals above `ell` in `Q(zeta_p)`: factors `Phi_p mod ell`
/// via the orbit structure of a p-th root of unity in `F_(ell^d)`.
pub fn build_prime_ideals(p: u64, ell: u64) -> Result<Vec<PrimeIdealRep>> {
    crate::cyclotomic::check_odd_prime(p)?;
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == p {
        return Err(Error::RamifiedPrime { ell, p });
    }
    let d = multiplicative_order(ell % p, p) as usize;
    let q = ell
        .checked_pow(d as u32)
        .filter(|&q| q <= Q_CAP)
        .ok_or(Error::QTooLarge {
            q: u64::MAX,
            cap: Q_CAP,
        })?;

    // Splitting field of Phi_p and a primitive p-th root of unity in it.
    let host = Fq::new(ell, find_irreducible(ell, d));
    let mut seed = 1u64;
    let z = loop {
        seed += 1;
        let w = host.decode(seed % q);
        if host.is_zero(&w) {
            continue;
        }
        let cand = host.pow(&w, (q - 1) / p);
        if cand != host.one() {
            break cand;
        }
    };
    debug_assert_eq!(host.pow(&z, p), host.one());

    // Orbits of exponents under multiplication by ell give the factors.
    let mut seen = vec![false; p as usize];
    let mut ideals = Vec::new();
    for k in 1..p {
        if seen[k as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut e = k;
        loop {
            seen[e as usize] = true;
            orbit.push(e);
            e = e * ell % p;
            if e == k {
                break;
            }
        }
        assert_eq!(orbit.len(), d);
        // factor = prod (x - z^e) over the orbit, computed in host[x].
        let mut coeffs: Vec<FqElem> = vec![host.one()];
        for &e in &orbit {
            let root = host.pow(&z, e);
            let mut next: Vec<FqElem> = vec![host.zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = host.add(&next[i + 1], c);
                let t = host.mul(c, &root);
                next[i] = host.sub(&next[i], &t);
            }
            coeffs = next;
        }
        let factor: Vec<u64> = coeffs
            .iter()
            .map(|c| {
                assert!(
                    c[1..].iter().all(|&x| x == 0),
                    "factor coefficients must be rational"
                );
                c[0]
            })
            .collect();
        let fq = Fq::new(ell, factor.clone());
        let mut zeta_image = fq.zero();
        if d == 1 {
            zeta_image[0] = (ell - factor[0] % ell) % ell; // root of x + c
        } else {
            zeta_image[1] = 1; // the class of x
        }
        debug_assert_eq!(fq.pow(&zeta_image, p), fq.one());
        debug_assert_ne!(zeta_image, fq.one());
        ideals.push(PrimeIdealRep {
            p,
            ell,
            q,
            degree: d,
            factor,
            fq,
            zeta_image,
        });
    }
    assert_eq!(ideals.len() as u64, (p - 1) / d as u64);
    assert_eq!((q - 1) % p, 0);
    Ok(ideals)
}

/// Discrete-log table over `F_q^x`: index -> exponent of a fixed
/// generator. O(q) memory, built in one sweep.
pub struct DlogTable {
    pub table: Vec<u32>,
    pub generator: FqElem,
}

pub const DLOG_NONE: u32 = u32::MAX;

impl DlogTable {
    pub fn build(fq: &Fq) -> Self {
        let g = fq.find_generator();
        let mut table = vec![DLOG_NONE; fq.q as usize];
        let mut acc = fq.one();
        for e in 0..(fq.q - 1) {
            table[fq.encode(&acc) as usize] = e as u32;
            acc = fq.mul(&acc, &g);
        }
        DlogTable {
            table,
            generator: g,
        }
    }
}
