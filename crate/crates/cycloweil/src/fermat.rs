//! Twist screening for the Fermat-curve and hyperelliptic families:
//! Legendre symbols, the split test in `K/F`, the unit-congruence
//! criterion at p, the global root number, and the certified reports for
//! candidate twists `d` (Fermat side) and `A` (hyperelliptic side).

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::Error;
use crate::exec;
use crate::finite_field::{factorize, is_prime_u64, multiplicative_order};
use crate::padic::u_geq2_fast;
use crate::Result;

/// Legendre symbol `(a / p)` via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i8 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = r % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        e >>= 1;
        base = base * base % p;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Whether every prime of `F` above `ell` splits in `K/F`: complex
/// conjugation misses the decomposition group exactly when the
/// multiplicative order of `ell` mod p is odd.
pub fn splits_in_k_over_f(ell: u64, p: u64) -> Result<bool> {
    if ell == p || ell % p == 0 {
        return Err(Error::RamifiedPrime { ell, p });
    }
    Ok(multiplicative_order(ell % p, p) % 2 == 1)
}

/// An exponent triple `(r, s, t)` with `r + s + t = p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HeckeTuple {
    pub p: u64,
    pub r: u64,
    pub s: u64,
    pub t: u64,
}

impl HeckeTuple {
    pub fn new(p: u64, r: u64, s: u64, t: u64) -> Result<Self> {
        if r == 0 || s == 0 || t == 0 || r + s + t != p {
            return Err(Error::InvalidTuple { p, r, s, t });
        }
        Ok(HeckeTuple { p, r, s, t })
    }

    /// `r^r s^s (t - p)^t`, the unit whose congruence class mod `p^2`
    /// controls the conductor at p.
    pub fn x_value(&self) -> BigInt {
        let r = BigInt::from(self.r).pow(self.r as u32);
        let s = BigInt::from(self.s).pow(self.s as u32);
        let t = BigInt::from(self.t as i64 - self.p as i64).pow(self.t as u32);
        r * s * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

/// One hypothesis check with its witness.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    pub witness: String,
}

/// Certified verdict for one candidate twist. Serializes as
/// `{"d": ..., "family": ..., "conditions": {name: {...}}, "verdict": ...,
///   "theorem": ...}`.
#[derive(Debug, Clone)]
pub struct TwistReport {
    /// The twist parameter: `d` for the Fermat family, `A` for the
    /// hyperelliptic one.
    pub subject: i64,
    pub family: String,
    pub conditions: Vec<ConditionCheck>,
    pub verdict: Verdict,
    pub theorem: String,
}

impl Serialize for TwistReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::{SerializeMap, SerializeStruct};

        struct CondMap<'a>(&'a [ConditionCheck]);
        impl Serialize for CondMap<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                #[derive(Serialize)]
                struct Entry<'a> {
                    passed: bool,
                    witness: &'a str,
                }
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for c in self.0 {
                    map.serialize_entry(
                        &c.name,
                        &Entry {
                            passed: c.passed,
                            witness: &c.witness,
                        },
                    )?;
                }
                map.end()
            }
        }

        let mut st = serializer.serialize_struct("TwistReport", 5)?;
        st.serialize_field("d", &self.subject)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("conditions", &CondMap(&self.conditions))?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("theorem", &self.theorem)?;
        st.end()
    }
}

impl TwistReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failing_conditions(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Global root number of the twisted character: `(2/p) prod_{l | d} (l/p)`
/// for squarefree odd `d >= 1` coprime to p whose unit-congruence
/// hypothesis holds.
pub fn global_root_number(tuple: &HeckeTuple, d: i64) -> Result<i8> {
    if d < 1 {
        return Err(Error::InvalidInput("d must be a positive integer".into()));
    }
    if d % 2 == 0 {
        return Err(Error::HypothesisFailure("d must be odd".into()));
    }
    if d as u64 % tuple.p == 0 {
        return Err(Error::HypothesisFailure("d must be coprime to p".into()));
    }
    let factors = factorize(d as u64);
    if factors.iter().any(|&(_, e)| e > 1) {
        return Err(Error::HypothesisFailure("d must be squarefree".into()));
    }
    let arg = BigRational::from_integer(
        tuple.x_value() * BigInt::from(d).pow((tuple.r + tuple.s) as u32),
    );
    if !u_geq2_fast(&arg, tuple.p)? {
        return Err(Error::HypothesisFailure(
            "unit-congruence u >= 2 fails for this (tuple, d)".into(),
        ));
    }
    let mut sign = legendre(2, tuple.p);
    for (ell, _) in factors {
        sign *= legendre(ell as i64, tuple.p);
    }
    Ok(sign)
}

fn fermat_report(tuple: &HeckeTuple, d: u64) -> TwistReport {
    let p = tuple.p;
    let p2 = p * p;
    let odd = d % 2 == 1;
    let qr = legendre(d as i64, p) == 1;
    let unit_congruence = {
        let arg =
            BigRational::from_integer(tuple.x_value() * BigInt::from(d).pow((tuple.r + tuple.s) as u32));
        u_geq2_fast(&arg, p).unwrap_or(false)
    };
    let split = splits_in_k_over_f(d, p).unwrap_or(false);
    let conditions = vec![
        ConditionCheck {
            name: "odd".into(),
            passed: odd,
            witness: format!("d mod 2 = {}", d % 2),
        },
        ConditionCheck {
            name: "quadratic_residue".into(),
            passed: qr,
            witness: format!("(d/p) = {}, d mod p^2 = {}", legendre(d as i64, p), d % p2),
        },
        ConditionCheck {
            name: "unit_congruence".into(),
            passed: unit_congruence,
            witness: format!(
                "(r^r s^s (t-p)^t d^(r+s))^(p-1) mod p^2 {} 1",
                if unit_congruence { "=" } else { "!=" }
            ),
        },
        ConditionCheck {
            name: "split".into(),
            passed: split,
            witness: format!("ord(d mod p) = {}", multiplicative_order(d % p, p)),
        },
    ];
    let pass = odd && qr && unit_congruence && split;
    TwistReport {
        subject: d as i64,
        family: format!("fermat p={} (r,s,t)=({},{},{})", p, tuple.r, tuple.s, tuple.t),
        conditions,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        theorem: "fermat-twist-nonvanishing".into(),
    }
}

/// Scans prime twists `d` in `[d_min, d_max]` against the nonvanishing
/// hypotheses. Requires `(2/p) = +1` (otherwise the family's root number
/// obstruction makes the screen vacuous). Reports are sorted by `d`.
pub fn scan_twists(tuple: &HeckeTuple, d_min: u64, d_max: u64) -> Result<Vec<TwistReport>> {
    if legendre(2, tuple.p) != 1 {
        return Err(Error::HypothesisFailure(format!(
            "(2/{}) = -1: 2 does not split, the scan hypothesis fails",
            tuple.p
        )));
    }
    if d_min > d_max {
        return Err(Error::InvalidInput("empty range".into()));
    }
    let tuple = *tuple;
    let mut reports = exec::range_filter_map(d_max - d_min + 1, move |off| {
        let d = d_min + off;
        if !is_prime_u64(d) || d == tuple.p {
            return None;
        }
        Some(fermat_report(&tuple, d))
    });
    reports.sort_by_key(|r| r.subject);
    Ok(reports)
}

/// All tuples `(r, s, t)` with `(r^r s^s (t-p)^t)^(p-1) = a mod p^2`,
/// exhaustively over the O(p^2) candidates. Ordered pairs are returned;
/// the set is closed under swapping r and s.
pub fn find_simultaneous_tuples(p: u64, a: u64) -> Result<Vec<HeckeTuple>> {
    crate::cyclotomic::check_odd_prime(p)?;
    let p2 = p * p;
    if a == 0 || a % p == 0 {
        return Err(Error::InvalidInput("a must be a unit mod p^2".into()));
    }
    let a = a % p2;
    let mut out = Vec::new();
    for r in 1..=(p - 2) {
        for s in 1..=(p - 1 - r) {
            let t = p - r - s;
            let x = modpow(r % p2, r, p2) * modpow(s % p2, s, p2) % p2
                * modpow((t + p2 - p) % p2, t, p2)
                % p2;
            if modpow(x, p - 1, p2) == a {
                out.push(HeckeTuple { p, r, s, t });
            }
        }
    }
    Ok(out)
}

fn modpow(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        e >>= 1;
        base = base * base % m;
    }
    acc
}

/// The hyperelliptic twist checker for `y^2 = x^11 + A^2`: A must be
/// 11th-power-free (checked as an error), and the four hypotheses are
/// coprimality to 22, `11^2 | A^10 - 1`, `A = 1 mod 4`, and split prime
/// divisors.
pub fn hyperelliptic_check(a_val: i64) -> Result<TwistReport> {
    const P: u64 = 11;
    if a_val == 0 {
        return Err(Error::ZeroArgument);
    }
    let abs = a_val.unsigned_abs();
    let factors = factorize(abs);
    if factors.iter().any(|&(_, e)| e >= P as u32) {
        return Err(Error::NotEleventhPowerFree { a: a_val });
    }

    let g = gcd_u64(abs, 22);
    let coprime = g == 1;

    let a_big = BigInt::from(a_val);
    let pow10 = a_big.pow(10) - BigInt::from(1);
    let rem121 = (&pow10 % BigInt::from(121) + BigInt::from(121)) % BigInt::from(121);
    let p_squared = rem121 == BigInt::from(0);

    let mod4 = a_val.rem_euclid(4);
    let mod4_ok = mod4 == 1;

    let mut split_all = true;
    let mut split_witness = Vec::new();
    for &(ell, _) in &factors {
        if ell == 2 || ell == 11 {
            // Covered by the coprimality condition; the split test is not
            // defined at the ramified prime.
            split_all = false;
            split_witness.push(format!("{ell}: excluded by coprimality"));
            continue;
        }
        let ord = multiplicative_order(ell % P, P);
        let ok = ord % 2 == 1;
        split_all &= ok;
        split_witness.push(format!(
            "{ell}: ord mod 11 = {ord} ({})",
            if ok { "split" } else { "nonsplit" }
        ));
    }
    if factors.is_empty() {
        split_witness.push("no prime divisors".into());
    }

    let conditions = vec![
        ConditionCheck {
            name: "coprime_22".into(),
            passed: coprime,
            witness: format!("gcd(|A|, 22) = {g}"),
        },
        ConditionCheck {
            name: "p_squared_congruence".into(),
            passed: p_squared,
            witness: format!("A^10 - 1 mod 121 = {rem121}"),
        },
        ConditionCheck {
            name: "mod_4".into(),
            passed: mod4_ok,
            witness: format!("A mod 4 = {mod4}"),
        },
        ConditionCheck {
            name: "split_primes".into(),
            passed: split_all,
            witness: split_witness.join("; "),
        },
    ];
    let pass = coprime && p_squared && mod4_ok && split_all;
    Ok(TwistReport {
        subject: a_val,
        family: "hyperelliptic p=11".into(),
        conditions,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        theorem: "hyperelliptic-twist-nonvanishing".into(),
    })
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// All passing hyperelliptic parameters `1 < A <= limit`, ascending.
pub fn hyperelliptic_search(limit: i64) -> Result<Vec<i64>> {
    if limit < 2 {
        return Ok(Vec::new());
    }
    let mut hits = exec::range_filter_map((limit - 1) as u64, |off| {
        let a = off as i64 + 2;
        match hyperelliptic_check(a) {
            Ok(r) if r.passed() => Some(a),
            _ => None,
        }
    });
    hits.sort_unstable();
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_values() {
        // QRs mod 11 are {1, 3, 4, 5, 9}.
        let qrs: Vec<i64> = (1..11).filter(|&a| legendre(a, 11) == 1).collect();
        assert_eq!(qrs, vec![1, 3, 4, 5, 9]);
        assert_eq!(legendre(2, 11), -1);
        // 31 = 7 mod 8, so 2 is a QR.
        assert_eq!(legendre(2, 31), 1);
        assert_eq!(legendre(22, 11), 0);
    }

    #[test]
    fn split_tests() {
        assert!(splits_in_k_over_f(3, 11).unwrap()); // ord 5
        assert!(!splits_in_k_over_f(2, 11).unwrap()); // ord 10
        assert!(splits_in_k_over_f(23, 11).unwrap()); // 23 = 1 mod 11
        assert!(splits_in_k_over_f(11, 5).unwrap()); // 11 = 1 mod 5
        assert!(splits_in_k_over_f(5, 5).is_err());
    }

    #[test]
    fn tuple_validation() {
        assert!(HeckeTuple::new(11, 1, 1, 9).is_ok());
        assert!(HeckeTuple::new(11, 1, 2, 9).is_err());
        assert!(HeckeTuple::new(11, 0, 2, 9).is_err());
        let t = HeckeTuple::new(31, 1, 5, 25).unwrap();
        assert_eq!(
            t.x_value(),
            BigInt::from(5i64).pow(5) * BigInt::from(-6i64).pow(25)
        );
    }

    #[test]
    fn simultaneous_tuples_p31() {
        // The congruence x = r^r s^s t^t (1-p) mod p^2 is symmetric in all
        // of (r, s, t), so solutions come in permutation families; the
        // canonical representatives are the sorted triples.
        let tuples = find_simultaneous_tuples(31, 1).unwrap();
        let mut canon: Vec<[u64; 3]> = tuples
            .iter()
            .map(|t| {
                let mut v = [t.r, t.s, t.t];
                v.sort_unstable();
                v
            })
            .collect();
        canon.sort_unstable();
        canon.dedup();
        assert_eq!(
            canon,
            vec![
                [1, 5, 25],
                [2, 10, 19],
                [3, 13, 15],
                [4, 7, 20],
                [8, 9, 14]
            ]
        );
        // Closed under swapping r and s.
        for t in &tuples {
            assert!(tuples
                .iter()
                .any(|u| u.r == t.s && u.s == t.r && u.t == t.t));
        }
    }

    #[test]
    fn simultaneous_tuples_p5_brute_force() {
        // Independent oracle: exact integer powers reduced afterwards.
        for a in [1u64, 6] {
            let got = find_simultaneous_tuples(5, a).unwrap();
            let mut expect = Vec::new();
            for r in 1..=3u64 {
                for s in 1..=(4 - r) {
                    let t = 5 - r - s;
                    let x = BigInt::from(r).pow(r as u32)
                        * BigInt::from(s).pow(s as u32)
                        * BigInt::from(t as i64 - 5).pow(t as u32);
                    let xp = x.pow(4);
                    let m = ((xp % 25) + BigInt::from(25)) % BigInt::from(25);
                    if m == BigInt::from(a % 25) {
                        expect.push((r, s, t));
                    }
                }
            }
            let got_t: Vec<(u64, u64, u64)> = got.iter().map(|t| (t.r, t.s, t.t)).collect();
            assert_eq!(got_t, expect, "a = {a}");
        }
    }

    #[test]
    fn root_number_values() {
        let t31 = HeckeTuple::new(31, 1, 5, 25).unwrap();
        assert_eq!(global_root_number(&t31, 1).unwrap(), 1);
        // Hypothesis failures are errors, not silent values.
        assert!(global_root_number(&t31, 9).is_err()); // not squarefree
        assert!(global_root_number(&t31, 2).is_err()); // even
        // p = 11: no tuple satisfies the congruence at d = 1 (checked
        // exhaustively), so the (2/11) = -1 factor is exercised through a
        // searched prime twist instead.
        assert!(find_simultaneous_tuples(11, 1).unwrap().is_empty());
        let tup = HeckeTuple::new(11, 1, 1, 9).unwrap();
        let mut hit = None;
        for d in (3..20000u64).step_by(2) {
            if !is_prime_u64(d) || d == 11 {
                continue;
            }
            if let Ok(sign) = global_root_number(&tup, d as i64) {
                hit = Some((d, sign));
                break;
            }
        }
        let (d, sign) = hit.expect("an admissible twist exists below the bound");
        assert_eq!(sign, legendre(2, 11) * legendre(d as i64, 11));
        assert_eq!(legendre(2, 11), -1);
    }

    #[test]
    fn root_number_multiplicative_in_d() {
        let t31 = HeckeTuple::new(31, 1, 5, 25).unwrap();
        // d = 1 mod 961 guarantees the u-condition for this tuple; products
        // of split primes in that class stay admissible.
        let d1 = 1923; // 961 * 2 + 1 = 3 * 641
        assert_eq!(d1 % 961, 1);
        let f = factorize(d1);
        assert_eq!(f.len(), 2);
        let total = global_root_number(&t31, d1 as i64).unwrap();
        let parts: i8 = legendre(2, 31) * legendre(3, 31) * legendre(641, 31);
        assert_eq!(total, parts);
    }

    #[test]
    fn scan_p31_small_range() {
        let t31 = HeckeTuple::new(31, 1, 5, 25).unwrap();
        let reports = scan_twists(&t31, 2, 40000).unwrap();
        // 2 is prime, so it gets a report; it fails the odd condition.
        let d2 = reports.iter().find(|r| r.subject == 2).unwrap();
        assert!(!d2.passed());
        assert_eq!(d2.failing_conditions()[0], "odd");
        // Every prime = 1 mod 961 in range passes all conditions, and the
        // range is wide enough to contain some.
        let ones: Vec<&TwistReport> = reports
            .iter()
            .filter(|r| r.subject as u64 % 961 == 1)
            .collect();
        assert!(!ones.is_empty(), "range must contain primes = 1 mod 961");
        for r in &ones {
            assert!(r.passed(), "d = {}", r.subject);
        }
        assert!(reports.iter().any(|r| r.passed()));
    }

    #[test]
    fn scan_refuses_non_split_two() {
        let t11 = HeckeTuple::new(11, 1, 1, 9).unwrap();
        assert!(matches!(
            scan_twists(&t11, 2, 100),
            Err(Error::HypothesisFailure(_))
        ));
    }

    #[test]
    fn hyperelliptic_examples() {
        let r1 = hyperelliptic_check(1).unwrap();
        assert!(r1.passed());

        let r2 = hyperelliptic_check(2).unwrap();
        assert!(!r2.passed());
        assert!(r2.failing_conditions().contains(&"coprime_22"));

        // A = 3: 3^10 - 1 = 59048 = 121 * 488 and ord(3 mod 11) = 5, so only
        // the mod-4 condition fails.
        let r3 = hyperelliptic_check(3).unwrap();
        assert!(!r3.passed());
        assert_eq!(r3.failing_conditions(), vec!["mod_4"]);

        let r12 = hyperelliptic_check(12).unwrap();
        assert!(!r12.passed());
        let failing = r12.failing_conditions();
        assert!(failing.contains(&"coprime_22"));
        assert!(failing.contains(&"mod_4"));

        assert!(matches!(
            hyperelliptic_check(2048 * 3),
            Err(Error::NotEleventhPowerFree { a: 6144 })
        ));
        assert!(matches!(hyperelliptic_check(0), Err(Error::ZeroArgument)));
    }

    #[test]
    fn hyperelliptic_search_small() {
        // Whatever the search returns must pass the checker; verified
        // against the checker itself over a small window.
        let hits = hyperelliptic_search(5000).unwrap();
        for &a in &hits {
            assert!(hyperelliptic_check(a).unwrap().passed());
        }
        for a in 2..200 {
            let pass = hyperelliptic_check(a).map(|r| r.passed()).unwrap_or(false);
            assert_eq!(pass, hits.contains(&a), "A = {a}");
        }
    }
}
