//! Exact integer and rational helpers shared by every stage: residues,
//! modular inverses, p-adic valuations, factorisation and the string
//! encodings used by the JSON interfaces.

use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Least nonnegative residue of `a` modulo `n` (n > 0).
pub fn residue(a: &BigInt, n: &BigInt) -> BigInt {
    a.mod_floor(n)
}

/// Inverse of `a` modulo `n`, as a least nonnegative residue.
pub fn mod_inverse(a: &BigInt, n: &BigInt) -> Result<BigInt> {
    let a = residue(a, n);
    let eg = a.extended_gcd(n);
    if !eg.gcd.is_one() {
        return Err(Error::NotInvertible { value: a, modulus: n.clone() });
    }
    Ok(residue(&eg.x, n))
}

/// v_p(a) for a nonzero integer; `None` for zero.
pub fn valuation(p: u128, a: &BigInt) -> Option<i64> {
    if a.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut a = a.abs();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        a = q;
        v += 1;
    }
}

/// v_p of a nonzero rational; `None` for zero.
pub fn rational_valuation(p: u128, a: &BigRational) -> Option<i64> {
    let vn = valuation(p, a.numer())?;
    let vd = valuation(p, a.denom()).unwrap_or(0);
    Some(vn - vd)
}

/// Distinct prime factors of |a| in increasing order. Zero and units have none.
pub fn prime_factors(a: &BigInt) -> Result<Vec<u128>> {
    let a = a.abs();
    if a <= BigInt::one() {
        return Ok(Vec::new());
    }
    let value = a.to_u128().ok_or_else(|| Error::Factorization(a.clone()))?;
    Ok(num_prime::nt_funcs::factorize128(value).into_keys().collect())
}

pub fn is_prime(p: u64) -> bool {
    num_prime::nt_funcs::is_prime64(p)
}

/// Parses "p/q", an integer, or a plain decimal such as "-0.125".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole = match whole.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            w => BigInt::from_str(w).map_err(|_| bad())?,
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let mut v = BigRational::new(whole * &scale + frac, scale);
        if negative {
            v = -v;
        }
        return Ok(v);
    }
    BigInt::from_str(s).map(BigRational::from_integer).map_err(|_| bad())
}

pub fn parse_bigint(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("malformed integer {s:?}")))
}

/// "p/q" with q > 1, or "p" for integers.
pub fn format_rational(v: &BigRational) -> String {
    v.to_string()
}

/// Floor square root of a nonnegative rational scaled by 2^bits, i.e. a rational
/// lower bound on sqrt(v) accurate to 2^-bits.
pub fn sqrt_lower(v: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << (2 * bits);
    let scaled = (v * BigRational::from_integer(scale)).floor().to_integer();
    let root = if scaled.sign() == Sign::Minus { BigInt::zero() } else { scaled.sqrt() };
    BigRational::new(root, BigInt::one() << bits)
}

/// Rational upper bound on sqrt(v), within 2^-bits.
pub fn sqrt_upper(v: &BigRational, bits: u32) -> BigRational {
    let lo = sqrt_lower(v, bits);
    if &(&lo * &lo) == v {
        lo
    } else {
        lo + BigRational::new(BigInt::one(), BigInt::one() << bits)
    }
}

/// Exact square root of a rational when it is a perfect square.
pub fn exact_sqrt(v: &BigRational) -> Option<BigRational> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    (&n * &n == *v.numer() && &d * &d == *v.denom()).then(|| BigRational::new(n, d))
}

pub fn rational_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapters: big integers as decimal strings, rationals as "p/q" strings.
pub mod serde_str {
    pub mod bigint {
        use num_bigint::BigInt;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
            let s = String::deserialize(d)?;
            crate::arith::parse_bigint(&s).map_err(serde::de::Error::custom)
        }
    }

    /// Primes up to 2^128 exceed what JSON numbers carry exactly.
    pub mod prime {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
            let s = String::deserialize(d)?;
            s.trim().parse().map_err(serde::de::Error::custom)
        }
    }

    pub mod rational {
        use num_rational::BigRational;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&crate::arith::format_rational(v))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
            let s = String::deserialize(d)?;
            crate::arith::parse_rational(&s).map_err(serde::de::Error::custom)
        }
    }

    pub mod opt_rational {
        use num_rational::BigRational;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_some(&crate::arith::format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| crate::arith::parse_rational(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("6").unwrap(), rat(6, 1));
        assert_eq!(parse_rational("0.6").unwrap(), rat(3, 5));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(matches!(parse_rational("1/0"), Err(Error::Parse(_))));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn inverse_and_residue() {
        assert_eq!(mod_inverse(&int(3), &int(101)).unwrap(), int(34));
        assert_eq!(residue(&int(-1179), &int(101)), int(33));
        assert!(mod_inverse(&int(6), &int(12)).is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(2, &int(24)), Some(3));
        assert_eq!(valuation(3, &int(-7)), Some(0));
        assert_eq!(valuation(5, &int(0)), None);
        assert_eq!(rational_valuation(3, &rat(1, 9)), Some(-2));
        assert_eq!(rational_valuation(2, &rat(12, 5)), Some(2));
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(&int(360)).unwrap(), vec![2, 3, 5]);
        assert_eq!(prime_factors(&int(-10007)).unwrap(), vec![10007]);
        assert!(prime_factors(&int(1)).unwrap().is_empty());
    }

    #[test]
    fn square_roots() {
        let two = rat(2, 1);
        let lo = sqrt_lower(&two, 40);
        let hi = sqrt_upper(&two, 40);
        assert!(&lo * &lo < two && &hi * &hi > two);
        assert_eq!(exact_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(exact_sqrt(&rat(2, 1)), None);
        assert_eq!(sqrt_upper(&rat(9, 4), 10), rat(3, 2));
    }
}
