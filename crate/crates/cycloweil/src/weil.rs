//! Weil indices at the dyadic place and the local condition they enter.
//!
//! The Weil index of `x -> psi(x^2)` over `F_v` is an eighth root of
//! unity. It is computed here as a normalized Gauss sum over `O/2^m~`,
//! accumulated exactly as an integer vector over 2-power roots of unity
//! and then identified against the eight candidates, so a sign error
//! anywhere surfaces as an identification failure instead of a wrong
//! float. On top of that sit the norm-one parametrization `a -> g_a`,
//! the congruence filtration membership tests, the local factor
//! `xi(g) = chi2(-delta y (g-1)) (a Delta, a^2+Delta) gamma(a^2+Delta)`,
//! the trace term `T`, and the two condition checks (congruence subgroup
//! generators, and the roots-of-unity sum).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::cyclotomic::{CyclotomicElem, Val2};
use crate::dyadic::Dyadic;
use crate::error::Error;
use crate::Result;

/// An eighth root of unity `exp(2 pi i k / 8)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EighthRoot {
    k: u8,
}

impl EighthRoot {
    pub fn new(k: u8) -> Self {
        EighthRoot { k: k % 8 }
    }

    pub fn exponent(&self) -> u8 {
        self.k
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.k + other.k)
    }

    /// `self / other`.
    pub fn div(&self, other: &Self) -> Self {
        Self::new(self.k + 8 - other.k)
    }

    pub fn conj(&self) -> Self {
        Self::new(8 - self.k)
    }

    /// `Some(+-1)` when the root is real.
    pub fn as_sign(&self) -> Option<i8> {
        match self.k {
            0 => Some(1),
            4 => Some(-1),
            _ => None,
        }
    }

    pub fn value(&self) -> (f64, f64) {
        let ang = std::f64::consts::FRAC_PI_4 * self.k as f64;
        (ang.cos(), ang.sin())
    }
}

impl std::fmt::Display for EighthRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exp(2*pi*i*{}/8)", self.k)
    }
}

/// Raw exact Gauss sum data: integer coefficients over the basis
/// `zeta_(2^N)^i`, `i < 2^(N-1)`, plus the ring size `|O / 2^m~|`.
#[derive(Debug, Clone)]
pub struct GaussSumRaw {
    pub counts: Vec<i64>,
    pub order_log2: u32,
    pub ring_size: u64,
    pub m: i64,
    pub m_tilde: i64,
}

/// The exact Gauss sum of `scale * psi` over `O/2^m~`, before
/// normalization.
pub fn gauss_sum_raw(dy: &Dyadic, scale: &CyclotomicElem) -> Result<GaussSumRaw> {
    let m = dy.conductor_m(scale)?;
    let m_bar = m.rem_euclid(2);
    let m_tilde = m_bar + 1;
    let n: u32 = (m_tilde + 2) as u32;
    let k_v = dy.k_v() as usize;

    // factor = 2^(-m~ - m - 1); the summand is psi(scale * factor * x^2).
    let two = BigRational::from_integer(BigInt::from(2));
    let e = -m_tilde - m - 1;
    let factor = if e >= 0 {
        two.pow(e as i32)
    } else {
        BigRational::one() / two.pow((-e) as i32)
    };
    let scaled = scale.scale(&factor);

    // lambda(scaled * x^2) expanded over x = sum c_j omega_j: the trace is
    // bilinear in the digits, so precompute t_jk mod 2^n.
    let basis = dy.omega_basis();
    let mask = (1u64 << n) - 1;
    let mut t = vec![vec![0u64; k_v]; k_v];
    for j in 0..k_v {
        for k in j..k_v {
            let prod = &(&basis[j] * &basis[k]) * &scaled;
            let f = dy.psi_eval(&prod)?;
            let v = f.scaled_numer(n);
            t[j][k] = v;
            t[k][j] = v;
        }
    }

    let half = 1usize << (n - 1);
    let mut counts = vec![0i64; half];
    let limit = 1u64 << m_tilde;
    let mut digits = vec![0u64; k_v];
    let ring_size = limit.pow(k_v as u32);
    for _ in 0..ring_size {
        let mut lambda = 0u64;
        for j in 0..k_v {
            if digits[j] == 0 {
                continue;
            }
            for k in 0..k_v {
                if digits[k] != 0 {
                    lambda += digits[j] * digits[k] * t[j][k];
                }
            }
        }
        // psi = exp(-2 pi i lambda / 2^n).
        let exp = (mask + 1 - (lambda & mask)) & mask;
        if exp as usize >= half {
            counts[exp as usize - half] -= 1;
        } else {
            counts[exp as usize] += 1;
        }
        // odometer
        for d in digits.iter_mut() {
            *d += 1;
            if *d < limit {
                break;
            }
            *d = 0;
        }
    }
    Ok(GaussSumRaw {
        counts,
        order_log2: n,
        ring_size,
        m,
        m_tilde,
    })
}

fn eighth_root_candidate(k: u8, pow2: u64, n: u32) -> Vec<i64> {
    // 2^(pow2/2) * zeta_8^k as an integer vector over zeta_(2^n) powers;
    // odd pow2 contributes sqrt(2) = zeta_8 + zeta_8^(-1).
    let half = 1usize << (n - 1);
    let mut v = vec![0i64; half];
    let mut add = |e8: u64, c: i64| {
        let exp = ((e8 % 8) * (1u64 << (n - 3))) as usize;
        if exp >= half {
            v[exp - half] -= c;
        } else {
            v[exp] += c;
        }
    };
    if pow2 % 2 == 0 {
        add(k as u64, 1i64 << (pow2 / 2));
    } else {
        let c = 1i64 << ((pow2 - 1) / 2);
        add(k as u64 + 1, c);
        add(k as u64 + 7, c);
    }
    v
}

/// The Weil index `gamma_{F,v}(scale * psi)` as an exact eighth root.
pub fn gamma_psi(dy: &Dyadic, scale: &CyclotomicElem) -> Result<EighthRoot> {
    let raw = gauss_sum_raw(dy, scale)?;
    let pow2 = (raw.m_tilde as u64) * dy.k_v();
    let mut matches = Vec::new();
    for k in 0..8u8 {
        if raw.counts == eighth_root_candidate(k, pow2, raw.order_log2) {
            matches.push(k);
        }
    }
    match matches.as_slice() {
        [k] => Ok(EighthRoot::new(*k)),
        _ => Err(Error::IdentificationFailure),
    }
}

/// The normalized ratio `gamma(a, psi) = gamma(a psi) / gamma(psi)`,
/// invariant under multiplying `a` by squares.
pub fn gamma_ratio(dy: &Dyadic, a: &CyclotomicElem) -> Result<EighthRoot> {
    let num = gamma_psi(dy, a)?;
    let den = gamma_psi(dy, &CyclotomicElem::one(dy.p()))?;
    Ok(num.div(&den))
}

// ---------------------------------------------------------------------------
// Norm-one elements and the congruence filtration
// ---------------------------------------------------------------------------

/// A norm-one element `g_a = (a + delta)/(a - delta)` parametrized by
/// `a in P^1(F_v)`; `a = None` is the point at infinity (`g = 1`).
#[derive(Debug, Clone)]
pub struct NormOneElem {
    p: u64,
    a: Option<CyclotomicElem>,
    g: CyclotomicElem,
    x: CyclotomicElem,
    y: CyclotomicElem,
}

impl NormOneElem {
    pub fn from_a(p: u64, a: Option<CyclotomicElem>) -> Result<Self> {
        match a {
            None => Ok(NormOneElem {
                p,
                a: None,
                g: CyclotomicElem::one(p),
                x: CyclotomicElem::one(p),
                y: CyclotomicElem::zero(p),
            }),
            Some(a) => {
                if !a.is_real() {
                    return Err(Error::NotReal);
                }
                let delta = CyclotomicElem::delta(p);
                let dsq = CyclotomicElem::delta_sq(p);
                let a2 = &a * &a;
                let denom = &a2 - &dsq;
                // a real and delta imaginary force a != +-delta.
                let g = (&a + &delta).checked_div(&(&a - &delta))?;
                let x = (&a2 + &dsq).checked_div(&denom)?;
                let y = a.scale_int(2).checked_div(&denom)?;
                debug_assert_eq!(&x + &(&y * &delta), g);
                debug_assert_eq!(g.norm_kf(), CyclotomicElem::one(p));
                Ok(NormOneElem { p, a: Some(a), g, x, y })
            }
        }
    }

    /// Recovers the parameter from a norm-one `g` via
    /// `a = delta (g + 1) / (g - 1)`.
    pub fn from_g(p: u64, g: CyclotomicElem) -> Result<Self> {
        if g.norm_kf() != CyclotomicElem::one(p) {
            return Err(Error::InvalidInput("element does not have norm 1".into()));
        }
        let one = CyclotomicElem::one(p);
        if g == one {
            return Self::from_a(p, None);
        }
        if g == -&one {
            return Self::from_a(p, Some(CyclotomicElem::zero(p)));
        }
        let delta = CyclotomicElem::delta(p);
        let a = (&delta * &(&g + &one)).checked_div(&(&g - &one))?;
        debug_assert!(a.is_real());
        let out = Self::from_a(p, Some(a))?;
        debug_assert_eq!(out.g, g);
        Ok(out)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> Option<&CyclotomicElem> {
        self.a.as_ref()
    }

    pub fn g(&self) -> &CyclotomicElem {
        &self.g
    }

    /// Real part in the `x + y delta` coordinates.
    pub fn x(&self) -> &CyclotomicElem {
        &self.x
    }

    /// `delta`-coordinate; `ord2(y)` drives the character evaluations.
    pub fn y(&self) -> &CyclotomicElem {
        &self.y
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_none()
    }
}

/// Subgroups of the norm-one group: `Gamma_k = {g = 1 mod 2^k}` and
/// `Gamma'_k = {x + y delta : y in 2^k O}` (the latter for k >= 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormSubgroup {
    Gamma(u32),
    GammaPrime(u32),
}

/// Membership via the valuation criteria on the parameter `a`.
pub fn membership(elem: &NormOneElem, sub: NormSubgroup) -> Result<bool> {
    let a = match elem.a() {
        None => {
            return match sub {
                NormSubgroup::Gamma(k) if k >= 1 => Ok(true),
                NormSubgroup::GammaPrime(k) if k >= 2 => Ok(true),
                NormSubgroup::Gamma(k) | NormSubgroup::GammaPrime(k) => {
                    Err(Error::SubgroupIndex {
                        which: "subgroup",
                        k,
                    })
                }
            }
        }
        Some(a) => a,
    };
    let dsq = CyclotomicElem::delta_sq(elem.p());
    match sub {
        NormSubgroup::Gamma(1) => {
            // g_a in Gamma_1 iff a^2 - Delta is not 0 mod 4.
            let diff = &(a * a) - &dsq;
            Ok(match diff.ord2()? {
                Val2::Finite(v) => v < 2,
                Val2::Infinite => false,
            })
        }
        NormSubgroup::Gamma(k) if k >= 2 => Ok(match a.ord2()? {
            Val2::Finite(v) => v <= -((k as i64) - 1),
            Val2::Infinite => false, // a = 0 is g = -1
        }),
        NormSubgroup::GammaPrime(k) if k >= 2 => Ok(match a.ord2()? {
            Val2::Finite(v) => v >= (k as i64) - 1 || v <= -((k as i64) - 1),
            Val2::Infinite => true, // a = 0: y = 0
        }),
        NormSubgroup::Gamma(k) | NormSubgroup::GammaPrime(k) => Err(Error::SubgroupIndex {
            which: "subgroup",
            k,
        }),
    }
}

// ---------------------------------------------------------------------------
// Characters, eigenfunction parameters, and the condition
// ---------------------------------------------------------------------------

/// Kinds of local character data supported by the checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CharKind {
    /// Nontrivial unramified quadratic character.
    UnramifiedQuadratic,
    /// Character of the twisted hyperelliptic family, parametrized by an
    /// odd integer A.
    HyperellipticA(i64),
}

/// The facts about `chi_2` the dyadic checks consume.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalCharacterSpec {
    pub kind: CharKind,
    pub chi2_of_two: i8,
    pub chi2_of_minus_delta: i8,
}

impl LocalCharacterSpec {
    pub fn unramified_quadratic() -> Self {
        LocalCharacterSpec {
            kind: CharKind::UnramifiedQuadratic,
            chi2_of_two: -1,
            chi2_of_minus_delta: 1,
        }
    }

    /// `chi2(2) = -1` and `chi2(-delta) = (-1)^((A-1)/2)` for odd A.
    pub fn hyperelliptic(a: i64) -> Result<Self> {
        if a % 2 == 0 {
            return Err(Error::InvalidInput(
                "hyperelliptic parameter A must be odd".into(),
            ));
        }
        let md = if (a - 1).rem_euclid(4) == 0 { 1 } else { -1 };
        Ok(LocalCharacterSpec {
            kind: CharKind::HyperellipticA(a),
            chi2_of_two: -1,
            chi2_of_minus_delta: md,
        })
    }

    /// The `(-1)^ord` evaluation is only valid when `chi2` is trivial on
    /// units, i.e. unramified; that is the quadratic case and A = 1 mod 4.
    fn supports_ord_evaluation(&self) -> Result<()> {
        match self.kind {
            CharKind::UnramifiedQuadratic => Ok(()),
            CharKind::HyperellipticA(a) if a.rem_euclid(4) == 1 => Ok(()),
            CharKind::HyperellipticA(a) => Err(Error::UnsupportedCharacter(format!(
                "A = {a} = 3 mod 4 has conductor exponent 2 at the dyadic place"
            ))),
        }
    }
}

/// The eigenfunction parameters: a dyadic unit `alpha` and
/// `u = 2 beta = (alpha (zeta^((p-1)/2) + zeta^(-(p-1)/2))^3)^(2^(k_v-1)-1)`.
#[derive(Debug, Clone)]
pub struct EigenParams {
    alpha: CyclotomicElem,
    u: CyclotomicElem,
    u_sq: CyclotomicElem,
    beta: CyclotomicElem,
}

impl EigenParams {
    pub fn new(p: u64, alpha: CyclotomicElem) -> Result<Self> {
        if !alpha.is_real() {
            return Err(Error::NotReal);
        }
        if alpha.ord2()? != Val2::Finite(0) {
            return Err(Error::InvalidInput(
                "alpha must be a dyadic unit (odd)".into(),
            ));
        }
        let k_v = (p - 1) / 2;
        let h = k_v as i64;
        let w = &CyclotomicElem::zeta_pow(p, h) + &CyclotomicElem::zeta_pow(p, -h);
        let base = &alpha * &w.pow_u(3);
        let exponent = (1u64 << (k_v - 1)) - 1;
        let u = base.pow_u(exponent);
        let u_sq = &u * &u;
        let beta = u.scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
        Ok(EigenParams {
            alpha,
            u,
            u_sq,
            beta,
        })
    }

    pub fn alpha(&self) -> &CyclotomicElem {
        &self.alpha
    }

    pub fn u(&self) -> &CyclotomicElem {
        &self.u
    }

    pub fn beta(&self) -> &CyclotomicElem {
        &self.beta
    }
}

/// `T = Tr_{F_v/Q_2}(a alpha u^2 Delta^2 / (a^2 + Delta)) mod 4`. The
/// integrand must be 2-adically integral (it is on all of `Gamma_1`,
/// including parameters of negative valuation); a unit denominator is not
/// required.
pub fn trace_t_mod4(g: &NormOneElem, params: &EigenParams) -> Result<u8> {
    let a = match g.a() {
        None => return Ok(0),
        Some(a) if a.is_zero() => return Ok(0),
        Some(a) => a,
    };
    let p = g.p();
    let dsq = CyclotomicElem::delta_sq(p);
    let num = &(&(a * &params.alpha) * &params.u_sq) * &(&dsq * &dsq);
    let den = &(a * a) + &dsq;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let tr = num.checked_div(&den)?.trace_fq()?;
    if tr.denom().is_even() {
        return Err(Error::NonIntegralTrace);
    }
    let four = BigInt::from(4);
    let n = tr.numer().mod_floor(&four).to_u64().unwrap();
    let d = tr.denom().mod_floor(&four).to_u64().unwrap();
    // Inverse of an odd residue mod 4 is itself.
    Ok(((n * d) % 4) as u8)
}

/// `chi_2(-delta y (g - 1))` from the stored character facts, valid when
/// `chi_2` is trivial on units: the value is
/// `chi2(-delta) * chi2(2)^(ord2(y) + ord2(g-1))`.
pub fn chi2_eval(spec: &LocalCharacterSpec, g: &NormOneElem) -> Result<i8> {
    spec.supports_ord_evaluation()?;
    if g.is_identity() {
        return Err(Error::IdentityArgument);
    }
    if g.y().is_zero() {
        return Err(Error::ZeroArgument);
    }
    let gm1 = &(g.g() - &CyclotomicElem::one(g.p()));
    let ord_g = gm1.ord2()?.finite().expect("g != 1");
    let ord_y = g.y().ord2()?.finite().expect("y != 0");
    Ok(spec.chi2_of_minus_delta * sign_pow(spec.chi2_of_two, ord_g + ord_y))
}

fn sign_pow(s: i8, e: i64) -> i8 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        s
    }
}

/// The local factor
/// `xi(g_a) = chi2(-delta y (g-1)) * (a Delta, a^2 + Delta) * gamma(a^2 + Delta, psi)`,
/// which must land in {+1, -1}.
pub fn xi_factor(dy: &Dyadic, spec: &LocalCharacterSpec, g: &NormOneElem) -> Result<i8> {
    let a = match g.a() {
        None => return Ok(1),
        Some(a) => a,
    };
    if a.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let dsq = dy.big_delta();
    let a_delta = a * dsq;
    let a2_delta = &(a * a) + dsq;
    if a2_delta.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let chi = chi2_eval(spec, g)?;
    let h = dy.hilbert(&a_delta, &a2_delta)?;
    let gr = gamma_ratio(dy, &a2_delta)?;
    let gsign = gr
        .as_sign()
        .ok_or(Error::NonRealLocalFactor { k: gr.exponent() })?;
    Ok(chi * h * gsign)
}

/// Whether `xi(g) = i^T` holds; both sides are fourth roots of unity and
/// `xi` is real, so the check is `T` even and signs matching.
pub fn condition_holds(xi: i8, t_mod4: u8) -> bool {
    match t_mod4 {
        0 => xi == 1,
        2 => xi == -1,
        _ => false,
    }
}

/// One generator of `Gamma_1 / Gamma_3` given by its parameter value.
#[derive(Debug, Clone)]
pub struct Gamma1Generator {
    pub label: String,
    pub a: CyclotomicElem,
}

/// The parameter values, in the order: the class of `1+2`, the ratios
/// `(1+2 zeta^i)/(1+2 zeta^-i)` for `i = 2..(p-1)/2`, and the product
/// `prod_i (1+2 zeta^i)/(1+2 zeta^-i)`.
pub fn gamma1_generators(p: u64) -> Result<Vec<Gamma1Generator>> {
    let k_v = (p - 1) / 2;
    let delta = CyclotomicElem::delta(p);
    let one = CyclotomicElem::one(p);
    let mut gens = Vec::new();

    let h = k_v as i64;
    let a1 = (&CyclotomicElem::zeta_pow(p, h) + &CyclotomicElem::zeta_pow(p, -h)).scale_int(2);
    gens.push(Gamma1Generator {
        label: "1+2".into(),
        a: a1,
    });

    for i in 2..=h {
        // a = (1 + zeta^i + zeta^-i) delta / (zeta^i - zeta^-i)
        let num = &(&one + &CyclotomicElem::zeta_pow(p, i)) + &CyclotomicElem::zeta_pow(p, -i);
        let den = &CyclotomicElem::zeta_pow(p, i) - &CyclotomicElem::zeta_pow(p, -i);
        let a = (&num * &delta).checked_div(&den)?;
        gens.push(Gamma1Generator {
            label: format!("(1+2z^{i})/(1+2z^-{i})"),
            a,
        });
    }

    // a = (P + Q) delta / (P - Q) with P = prod (1+2 zeta^i), Q = conj(P).
    let mut prod_pos = one.clone();
    for i in 1..=h {
        prod_pos = &prod_pos * &(&one + &CyclotomicElem::zeta_pow(p, i).scale_int(2));
    }
    let prod_neg = prod_pos.conj();
    let a = (&(&prod_pos + &prod_neg) * &delta).checked_div(&(&prod_pos - &prod_neg))?;
    debug_assert!(a.is_real());
    gens.push(Gamma1Generator {
        label: "prod(1+2z^i)/(1+2z^-i)".into(),
        a,
    });
    Ok(gens)
}

/// Per-generator record of the condition check.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorConditionCheck {
    pub label: String,
    pub chi2: i8,
    pub hilbert: i8,
    pub gamma_ratio: i8,
    pub t_mod4: u8,
    pub xi: i8,
    pub ord2_y: i64,
    pub ord2_g_minus_1: i64,
    pub passes: bool,
}

/// Condition report over the generator set plus a sample of deeper
/// congruence elements (which must pass automatically).
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub p: u64,
    pub generators: Vec<GeneratorConditionCheck>,
    pub gamma3_samples: usize,
    pub gamma3_all_pass: bool,
    pub all_pass: bool,
}

fn check_one(
    dy: &Dyadic,
    spec: &LocalCharacterSpec,
    params: &EigenParams,
    label: &str,
    g: &NormOneElem,
) -> Result<GeneratorConditionCheck> {
    let a = g.a().expect("non-identity");
    let dsq = dy.big_delta();
    let a_delta = a * dsq;
    let a2_delta = &(a * a) + dsq;
    let chi = chi2_eval(spec, g)?;
    let h = dy.hilbert(&a_delta, &a2_delta)?;
    let gr = gamma_ratio(dy, &a2_delta)?;
    let gsign = gr
        .as_sign()
        .ok_or(Error::NonRealLocalFactor { k: gr.exponent() })?;
    let xi = chi * h * gsign;
    let t = trace_t_mod4(g, params)?;
    let gm1 = g.g() - &CyclotomicElem::one(g.p());
    Ok(GeneratorConditionCheck {
        label: label.to_string(),
        chi2: chi,
        hilbert: h,
        gamma_ratio: gsign,
        t_mod4: t,
        xi,
        ord2_y: g.y().ord2()?.finite().expect("y != 0"),
        ord2_g_minus_1: gm1.ord2()?.finite().expect("g != 1"),
        passes: condition_holds(xi, t),
    })
}

/// Checks the condition on every generator of `Gamma_1 / Gamma_3` and on
/// `sample_count` pseudo-random elements of `Gamma_3` (parameters
/// `a = (4w)^(-1)` for random integral units `w`). Deterministic in `seed`.
pub fn check_gamma1_condition(
    dy: &Dyadic,
    spec: &LocalCharacterSpec,
    params: &EigenParams,
    sample_count: usize,
    seed: u64,
) -> Result<ConditionReport> {
    let p = dy.p();
    let mut generators = Vec::new();
    for gen in gamma1_generators(p)? {
        let g = NormOneElem::from_a(p, Some(gen.a.clone()))?;
        if g.y().is_zero() {
            // Happens at p = 3, where the product generator is -1 itself:
            // the ratio-formula evaluation has no y to read.
            return Err(Error::UnsupportedCharacter(format!(
                "generator {} is -1 = x + 0*delta; the evaluation degenerates at p = {p}",
                gen.label
            )));
        }
        debug_assert!(membership(&g, NormSubgroup::Gamma(1))?);
        generators.push(check_one(dy, spec, params, &gen.label, &g)?);
    }

    let mut rng = SplitMix64::new(seed);
    let mut gamma3_all_pass = true;
    let mut produced = 0usize;
    while produced < sample_count {
        let w = random_real_unit(&mut rng, dy)?;
        let a = w.scale_int(4).inverse()?;
        let g = NormOneElem::from_a(p, Some(a))?;
        debug_assert!(membership(&g, NormSubgroup::Gamma(3))?);
        let check = check_one(dy, spec, params, "gamma3-sample", &g)?;
        if !check.passes {
            gamma3_all_pass = false;
        }
        produced += 1;
    }

    let all_pass = generators.iter().all(|c| c.passes) && gamma3_all_pass;
    Ok(ConditionReport {
        p,
        generators,
        gamma3_samples: sample_count,
        gamma3_all_pass,
        all_pass,
    })
}

/// Deterministic generator for sampling; splitmix64.
pub(crate) struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

fn random_real_unit(rng: &mut SplitMix64, dy: &Dyadic) -> Result<CyclotomicElem> {
    loop {
        let mut w = CyclotomicElem::from_int(dy.p(), rng.below(9) as i64 - 4);
        for b in dy.omega_basis() {
            w = &w + &b.scale_int(rng.below(9) as i64 - 4);
        }
        if !w.is_zero() && w.ord2()? == Val2::Finite(0) {
            return Ok(w);
        }
    }
}

// ---------------------------------------------------------------------------
// The roots-of-unity sum
// ---------------------------------------------------------------------------

/// Exact element of `Z[zeta_8]` on the basis `1, zeta_8, zeta_8^2, zeta_8^3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Zeta8(pub [i64; 4]);

impl Zeta8 {
    pub fn zero() -> Self {
        Zeta8([0; 4])
    }

    pub fn add_root(&mut self, exp: u64, sign: i64) {
        let e = (exp % 8) as usize;
        if e >= 4 {
            self.0[e - 4] -= sign;
        } else {
            self.0[e] += sign;
        }
    }

    pub fn embed(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &c) in self.0.iter().enumerate() {
            let ang = std::f64::consts::FRAC_PI_4 * i as f64;
            re += c as f64 * ang.cos();
            im += c as f64 * ang.sin();
        }
        (re, im)
    }
}

/// Outcome of the roots-of-unity condition: the sum
/// `2^(-k_v/2) sum_j chi(-delta y_j (zeta^j - 1)) gamma(alpha y_j (1 - x_j) psi)
///  psi(Delta alpha (x_j - 1) / y_j * beta^2)`
/// computed exactly in `Z[zeta_8]` and compared against -1.
#[derive(Debug, Clone, Serialize)]
pub struct RootsSumReport {
    pub p: u64,
    /// The unnormalized sum (before dividing by 2^(k_v/2)).
    pub exact: Zeta8,
    pub value_re: f64,
    pub value_im: f64,
    pub magnitude: f64,
    pub bound: f64,
    /// True when the bound alone rules out -1.
    pub auto_pass_by_bound: bool,
    pub equals_minus_one: bool,
    pub passes: bool,
}

pub fn roots_of_unity_sum(
    dy: &Dyadic,
    spec: &LocalCharacterSpec,
    params: &EigenParams,
) -> Result<RootsSumReport> {
    spec.supports_ord_evaluation()?;
    let p = dy.p();
    let k_v = dy.k_v();
    let one = CyclotomicElem::one(p);
    let two = BigRational::from_integer(BigInt::from(2));
    let delta = CyclotomicElem::delta(p);
    let dsq = dy.big_delta();
    let beta_sq = &params.beta * &params.beta;

    let mut sum = Zeta8::zero();
    for j in 1..p as i64 {
        let zj = CyclotomicElem::zeta_pow(p, j);
        let zmj = CyclotomicElem::zeta_pow(p, -j);
        let x_j = (&zj + &zmj).scale(&(BigRational::one() / &two));
        let y_j = (&zj - &zmj).checked_div(&delta.scale_int(2))?;

        // chi(-delta y_j (zeta^j - 1)) via valuations; units contribute 1.
        let ord = y_j.ord2()?.finite().expect("y_j != 0")
            + (&zj - &one).ord2()?.finite().expect("zeta^j != 1");
        let chi_sign = spec.chi2_of_minus_delta * sign_pow(spec.chi2_of_two, ord);

        let scale = &(&params.alpha * &y_j) * &(&one - &x_j);
        let gamma = gamma_psi(dy, &scale)?;

        let psi_arg = &(&(dsq * &params.alpha) * &(&x_j - &one)).checked_div(&y_j)? * &beta_sq;
        let f = dy.psi_eval(&psi_arg)?;
        // psi = exp(-2 pi i f); fold into an eighth root (f has 2-power
        // denominator at most 8 here).
        let f8 = f.scaled_numer(3);
        let exp = (gamma.exponent() as u64 + (8 - f8)) % 8;
        sum.add_root(exp, chi_sign as i64);
    }

    let norm = (2f64).powf(-(k_v as f64) / 2.0);
    let (re, im) = sum.embed();
    let value_re = re * norm;
    let value_im = im * norm;
    let magnitude = value_re.hypot(value_im);
    let bound = (p - 1) as f64 * norm;
    debug_assert!(magnitude <= bound + 1e-9);

    // -1 exactly: the unnormalized sum equals -2^(k_v/2).
    let minus_target = if k_v % 2 == 0 {
        let mut t = Zeta8::zero();
        t.add_root(4, 1 << (k_v / 2));
        t
    } else {
        // -2^((k_v-1)/2) sqrt(2) = -2^((k_v-1)/2) (zeta_8 + zeta_8^-1).
        let c = 1i64 << ((k_v - 1) / 2);
        let mut t = Zeta8::zero();
        t.add_root(5, c);
        t.add_root(3, c);
        t
    };
    let equals_minus_one = sum == minus_target;
    Ok(RootsSumReport {
        p,
        exact: sum,
        value_re,
        value_im,
        magnitude,
        bound,
        auto_pass_by_bound: bound < 1.0,
        equals_minus_one,
        passes: !equals_minus_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::rational_to_f64;
    use crate::dyadic::Field;
    use rand::{rngs::StdRng, RngExt, SeedableRng};

    fn dy11() -> Dyadic {
        Dyadic::new(11).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn gamma_baseline_p11() {
        // gamma_F(psi) = (-1+i)/sqrt(2) = exp(2 pi i 3/8); the raw sum over
        // the 32-element residue ring is exactly -4 + 4i.
        let dy = dy11();
        let one = CyclotomicElem::one(11);
        let raw = gauss_sum_raw(&dy, &one).unwrap();
        assert_eq!(raw.ring_size, 32);
        assert_eq!(raw.order_log2, 3);
        // Z[zeta_8] basis 1, zeta_8, i, zeta_8^3: -4 + 4i.
        assert_eq!(raw.counts, vec![-4, 0, 4, 0]);
        assert_eq!(gamma_psi(&dy, &one).unwrap(), EighthRoot::new(3));
    }

    #[test]
    fn gamma_unit_modulus() {
        let dy = dy11();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..5 {
            let a = random_real_nonzero(&mut rng, &dy);
            let g = gamma_psi(&dy, &a).unwrap();
            let (re, im) = g.value();
            assert!((re * re + im * im - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_float_oracle_p5() {
        // Independent floating-point evaluation of the same finite sum.
        let dy = Dyadic::new(5).unwrap();
        let one = CyclotomicElem::one(5);
        let raw = gauss_sum_raw(&dy, &one).unwrap();
        let g = gamma_psi(&dy, &one).unwrap();

        let mut re = 0.0;
        let mut im = 0.0;
        let m_tilde = raw.m_tilde;
        let factor = rat(1, 1 << (m_tilde + raw.m + 1));
        let basis = dy.omega_basis();
        let limit = 1i64 << m_tilde;
        for c1 in 0..limit {
            for c2 in 0..limit {
                let x = &basis[0].scale_int(c1) + &basis[1].scale_int(c2);
                let t = (&x * &x).scale(&factor).trace_fq().unwrap();
                let ang = -2.0 * std::f64::consts::PI * rational_to_f64(&t);
                re += ang.cos();
                im += ang.sin();
            }
        }
        let norm = (raw.ring_size as f64).sqrt();
        let (gre, gim) = g.value();
        assert!((re / norm - gre).abs() < 1e-9, "{re} {gre}");
        assert!((im / norm - gim).abs() < 1e-9, "{im} {gim}");
    }

    #[test]
    fn gamma_ratio_square_invariance() {
        let dy = dy11();
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..12 {
            let a = random_real_nonzero(&mut rng, &dy);
            let c = random_real_nonzero(&mut rng, &dy);
            let ac2 = &a * &(&c * &c);
            assert_eq!(
                gamma_ratio(&dy, &a).unwrap(),
                gamma_ratio(&dy, &ac2).unwrap()
            );
        }
        assert_eq!(
            gamma_ratio(&dy, &CyclotomicElem::one(11)).unwrap(),
            EighthRoot::new(0)
        );
    }

    fn random_real_nonzero(rng: &mut StdRng, dy: &Dyadic) -> CyclotomicElem {
        loop {
            let mut x = CyclotomicElem::from_rational(
                dy.p(),
                rat(rng.random_range(-9..=9), 1 << rng.random_range(0..=1)),
            );
            for b in dy.omega_basis() {
                x = &x + &b.scale(&rat(rng.random_range(-9..=9), 1 << rng.random_range(0..=1)));
            }
            if !x.is_zero() {
                return x;
            }
        }
    }

    #[test]
    fn a_to_g_basics() {
        let p = 11;
        let inf = NormOneElem::from_a(p, None).unwrap();
        assert_eq!(inf.g(), &CyclotomicElem::one(p));
        let zero = NormOneElem::from_a(p, Some(CyclotomicElem::zero(p))).unwrap();
        assert_eq!(zero.g(), &-&CyclotomicElem::one(p));

        // a1 = 2(zeta^5 + zeta^-5) maps to (zeta^5 + 3 zeta^-5)/(3 zeta^5 + zeta^-5).
        let a1 = (&CyclotomicElem::zeta_pow(p, 5) + &CyclotomicElem::zeta_pow(p, -5)).scale_int(2);
        let g = NormOneElem::from_a(p, Some(a1)).unwrap();
        let num = &CyclotomicElem::zeta_pow(p, 5) + &CyclotomicElem::zeta_pow(p, -5).scale_int(3);
        let den = &CyclotomicElem::zeta_pow(p, 5).scale_int(3) + &CyclotomicElem::zeta_pow(p, -5);
        assert_eq!(g.g(), &num.checked_div(&den).unwrap());
    }

    #[test]
    fn from_g_round_trip() {
        let p = 11;
        let mut rng = StdRng::seed_from_u64(43);
        let dy = dy11();
        for _ in 0..8 {
            let a = random_real_nonzero(&mut rng, &dy);
            let g = NormOneElem::from_a(p, Some(a.clone())).unwrap();
            let back = NormOneElem::from_g(p, g.g().clone()).unwrap();
            assert_eq!(back.a().unwrap(), &a);
        }
        // Non-norm-one input is rejected.
        assert!(NormOneElem::from_g(p, CyclotomicElem::from_int(p, 3)).is_err());
    }

    #[test]
    fn membership_of_generators() {
        let p = 11;
        let gens = gamma1_generators(p).unwrap();
        assert_eq!(gens.len(), 6);
        for gen in &gens {
            let g = NormOneElem::from_a(p, Some(gen.a.clone())).unwrap();
            assert!(membership(&g, NormSubgroup::Gamma(1)).unwrap(), "{}", gen.label);
            assert!(!membership(&g, NormSubgroup::Gamma(3)).unwrap(), "{}", gen.label);
        }
        // Filtration: Gamma_3 within Gamma_2' within Gamma_1 on samples.
        let dy = dy11();
        let mut rng = SplitMix64::new(7);
        for _ in 0..10 {
            let w = random_real_unit(&mut rng, &dy).unwrap();
            let a = w.scale_int(4).inverse().unwrap();
            let g = NormOneElem::from_a(p, Some(a)).unwrap();
            assert!(membership(&g, NormSubgroup::Gamma(3)).unwrap());
            assert!(membership(&g, NormSubgroup::GammaPrime(2)).unwrap());
            assert!(membership(&g, NormSubgroup::Gamma(1)).unwrap());
        }
    }

    #[test]
    fn generator_values_in_omega_coordinates() {
        // The parameter values written in powers of omega = zeta + zeta^-1.
        let p = 11;
        let om = CyclotomicElem::omega(p);
        let pow = |k: u64| om.pow_u(k);
        let lin = |c4: i64, c3: i64, c2: i64, c1: i64, c0: i64| {
            &(&(&pow(4).scale_int(c4) + &pow(3).scale_int(c3)) + &pow(2).scale_int(c2))
                + &(&pow(1).scale_int(c1) + &CyclotomicElem::from_int(p, c0))
        };
        let gens = gamma1_generators(p).unwrap();
        assert_eq!(gens[0].a, lin(-2, -2, 6, 4, -2));
        assert_eq!(gens[1].a, lin(0, -1, 1, 2, -2));
        assert_eq!(gens[2].a, lin(-1, 0, 3, -1, 1));
        assert_eq!(gens[3].a, lin(0, -1, 1, 3, -3));
        assert_eq!(gens[4].a, lin(1, 1, -3, -2, 0));
        let a6 = lin(251598, 184454, -1058498, -468084, 893580)
            .scale(&rat(-1, 3917));
        assert_eq!(gens[5].a, a6, "product generator parameter");
    }

    #[test]
    fn gamma3_squares() {
        // a^2 + Delta is a square in F for g_a in Gamma_3.
        let dy = dy11();
        let mut rng = SplitMix64::new(9);
        for _ in 0..10 {
            let w = random_real_unit(&mut rng, &dy).unwrap();
            let a = w.scale_int(4).inverse().unwrap();
            let a2d = &(&a * &a) + dy.big_delta();
            assert!(dy.is_square(&a2d, Field::F).unwrap());
        }
    }

    #[test]
    fn golden_table_p11() {
        // gamma(a^2+Delta), (a Delta, a^2+Delta), T mod 4 over the six
        // generators, with alpha = 1.
        let dy = dy11();
        let params = EigenParams::new(11, CyclotomicElem::one(11)).unwrap();
        let gens = gamma1_generators(11).unwrap();
        let expected_gamma: [i8; 6] = [1, -1, -1, -1, -1, 1];
        let expected_hilbert: [i8; 6] = [1, 1, -1, -1, -1, -1];
        let expected_t: [u8; 6] = [2, 2, 0, 0, 0, 0];
        for (i, gen) in gens.iter().enumerate() {
            let g = NormOneElem::from_a(11, Some(gen.a.clone())).unwrap();
            let a = gen.a.clone();
            let a2d = &(&a * &a) + dy.big_delta();
            let ad = &a * dy.big_delta();
            let gr = gamma_ratio(&dy, &a2d).unwrap().as_sign().unwrap();
            assert_eq!(gr, expected_gamma[i], "gamma row, {}", gen.label);
            let h = dy.hilbert(&ad, &a2d).unwrap();
            assert_eq!(h, expected_hilbert[i], "hilbert row, {}", gen.label);
            let t = trace_t_mod4(&g, &params).unwrap();
            assert_eq!(t, expected_t[i], "trace row, {}", gen.label);
            if i == 5 {
                // The product generator has an odd denominator; clearing it
                // by an odd square must not move the index.
                let cleared = a2d.scale_int(3917 * 3917);
                assert_eq!(
                    gamma_ratio(&dy, &cleared).unwrap(),
                    gamma_ratio(&dy, &a2d).unwrap()
                );
            }
        }
    }

    #[test]
    fn chi2_pattern_and_ord_y() {
        let spec = LocalCharacterSpec::unramified_quadratic();
        let gens = gamma1_generators(11).unwrap();
        let expected_chi: [i8; 6] = [-1, 1, 1, 1, 1, -1];
        let expected_ord_y: [i64; 6] = [2, 1, 1, 1, 1, 2];
        for (i, gen) in gens.iter().enumerate() {
            let g = NormOneElem::from_a(11, Some(gen.a.clone())).unwrap();
            assert_eq!(
                chi2_eval(&spec, &g).unwrap(),
                expected_chi[i],
                "{}",
                gen.label
            );
            assert_eq!(
                g.y().ord2().unwrap().finite().unwrap(),
                expected_ord_y[i],
                "{}",
                gen.label
            );
        }
        // A = 1 mod 4 gives identical values.
        let hyper = LocalCharacterSpec::hyperelliptic(5).unwrap();
        for gen in &gens {
            let g = NormOneElem::from_a(11, Some(gen.a.clone())).unwrap();
            assert_eq!(
                chi2_eval(&spec, &g).unwrap(),
                chi2_eval(&hyper, &g).unwrap()
            );
        }
        // A = 3 mod 4 is refused.
        let bad = LocalCharacterSpec::hyperelliptic(3).unwrap();
        let g = NormOneElem::from_a(11, Some(gens[0].a.clone())).unwrap();
        assert!(chi2_eval(&bad, &g).is_err());
    }

    #[test]
    fn trace_t_invariances() {
        let p = 11;
        let gens = gamma1_generators(p).unwrap();
        let mut rng = StdRng::seed_from_u64(45);
        let base = EigenParams::new(p, CyclotomicElem::one(p)).unwrap();
        for _ in 0..20 {
            // alpha and alpha + 2 give the same T on every generator.
            let alpha = CyclotomicElem::from_int(p, 2 * rng.random_range(-10..=10i64) + 1);
            let params = EigenParams::new(p, alpha.clone()).unwrap();
            let shifted =
                EigenParams::new(p, &alpha + &CyclotomicElem::from_int(p, 2)).unwrap();
            let gen = &gens[rng.random_range(0..gens.len())];
            let g = NormOneElem::from_a(p, Some(gen.a.clone())).unwrap();
            assert_eq!(
                trace_t_mod4(&g, &params).unwrap(),
                trace_t_mod4(&g, &shifted).unwrap()
            );
            let _ = base;
        }
        // Gamma_3 elements have T = 0 mod 4.
        let dy = dy11();
        let mut sm = SplitMix64::new(11);
        let params = EigenParams::new(p, CyclotomicElem::one(p)).unwrap();
        for _ in 0..10 {
            let w = random_real_unit(&mut sm, &dy).unwrap();
            let a = w.scale_int(4).inverse().unwrap();
            let g = NormOneElem::from_a(p, Some(a)).unwrap();
            assert_eq!(trace_t_mod4(&g, &params).unwrap(), 0);
        }
    }

    #[test]
    fn condition_check_p11_unramified() {
        let dy = dy11();
        let spec = LocalCharacterSpec::unramified_quadratic();
        let params = EigenParams::new(11, CyclotomicElem::one(11)).unwrap();
        let report = check_gamma1_condition(&dy, &spec, &params, 8, 1).unwrap();
        assert_eq!(report.generators.len(), 6);
        for c in &report.generators {
            assert!(c.passes, "{}: xi = {}, T = {}", c.label, c.xi, c.t_mod4);
        }
        assert!(report.gamma3_all_pass);
        assert!(report.all_pass);
    }

    #[test]
    fn xi_times_i_minus_t_multiplicative() {
        // g -> xi(g) i^(-T(g)) is a character on Gamma_1: check on products
        // of generator pairs.
        let dy = dy11();
        let spec = LocalCharacterSpec::unramified_quadratic();
        let params = EigenParams::new(11, CyclotomicElem::one(11)).unwrap();
        let gens = gamma1_generators(11).unwrap();
        let val = |g: &NormOneElem| -> (i8, u8) {
            (
                xi_factor(&dy, &spec, g).unwrap(),
                trace_t_mod4(g, &params).unwrap(),
            )
        };
        // i^(-T) for T in {0, 2} is (-1)^(T/2); combine as signs.
        let chr = |(xi, t): (i8, u8)| -> i8 {
            assert!(t % 2 == 0);
            xi * if t == 0 { 1 } else { -1 }
        };
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                let gi = NormOneElem::from_a(11, Some(gens[i].a.clone())).unwrap();
                let gj = NormOneElem::from_a(11, Some(gens[j].a.clone())).unwrap();
                let prod = NormOneElem::from_g(11, gi.g() * gj.g()).unwrap();
                assert_eq!(
                    chr(val(&prod)),
                    chr(val(&gi)) * chr(val(&gj)),
                    "generators {i} and {j}"
                );
            }
        }
    }

    #[test]
    fn roots_sum_p11() {
        let dy = dy11();
        let spec = LocalCharacterSpec::unramified_quadratic();
        let params = EigenParams::new(11, CyclotomicElem::one(11)).unwrap();
        let report = roots_of_unity_sum(&dy, &spec, &params).unwrap();
        // Bound 10/sqrt(32) = 1.77.. does not rule out -1 on its own.
        assert!(!report.auto_pass_by_bound);
        assert!(report.magnitude <= report.bound + 1e-9);
        assert!(!report.equals_minus_one);
        assert!(report.passes);
        // The sum is real (terms pair into conjugates).
        assert!(report.value_im.abs() < 1e-9);
    }
}
