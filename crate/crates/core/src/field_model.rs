//! Field invariants, the congruence instance, and the Minkowski feasibility
//! inequality that guarantees a first auxiliary line exists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, residue, serde_str};
use crate::bound::SizeBound;
use crate::error::{Error, Result};

/// A rational lower bound on pi, truncated after 70 decimals.
const PI_DIGITS: &str = "3.1415926535897932384626433832795028841971693993751058209749445923078164";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawField")]
pub struct FieldInvariants {
    pub degree: u32,
    pub r1: u32,
    pub r2: u32,
    #[serde(with = "serde_str::bigint")]
    pub abs_discriminant: BigInt,
    #[serde(with = "serde_str::bigint")]
    pub ideal_norm: BigInt,
}

#[derive(Deserialize)]
struct RawField {
    degree: u32,
    r1: u32,
    r2: u32,
    #[serde(with = "serde_str::bigint")]
    abs_discriminant: BigInt,
    #[serde(with = "serde_str::bigint")]
    ideal_norm: BigInt,
}

impl TryFrom<RawField> for FieldInvariants {
    type Error = Error;

    fn try_from(r: RawField) -> Result<Self> {
        FieldInvariants::new(r.degree, r.r1, r.r2, r.abs_discriminant, r.ideal_norm)
    }
}

impl FieldInvariants {
    pub fn new(degree: u32, r1: u32, r2: u32, abs_discriminant: BigInt, ideal_norm: BigInt) -> Result<Self> {
        if degree == 0 || r1 + 2 * r2 != degree {
            return Err(Error::InvalidInstance(format!(
                "signature mismatch: r1 + 2 r2 = {} but degree = {degree}",
                r1 + 2 * r2
            )));
        }
        if abs_discriminant < BigInt::one() || ideal_norm < BigInt::one() {
            return Err(Error::InvalidInstance("discriminant and ideal norm must be >= 1".into()));
        }
        if degree == 1 && !abs_discriminant.is_one() {
            return Err(Error::InvalidInstance("the rational field has discriminant 1".into()));
        }
        Ok(FieldInvariants { degree, r1, r2, abs_discriminant, ideal_norm })
    }

    /// F = Q with J = nZ.
    pub fn rational(n: &BigInt) -> Self {
        FieldInvariants {
            degree: 1,
            r1: 1,
            r2: 0,
            abs_discriminant: BigInt::one(),
            ideal_norm: n.abs(),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }
}

/// x + t·y + a ≡ 0 mod n with |x| ≤ X, |y| ≤ Y.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct CongruenceInstance {
    #[serde(with = "serde_str::bigint")]
    pub n: BigInt,
    #[serde(with = "serde_str::bigint")]
    pub t: BigInt,
    #[serde(with = "serde_str::bigint")]
    pub a: BigInt,
    #[serde(rename = "X")]
    pub x_bound: SizeBound,
    #[serde(rename = "Y")]
    pub y_bound: SizeBound,
    pub field: FieldInvariants,
}

#[derive(Deserialize)]
struct RawInstance {
    #[serde(with = "serde_str::bigint")]
    n: BigInt,
    #[serde(with = "serde_str::bigint")]
    t: BigInt,
    #[serde(with = "serde_str::bigint")]
    a: BigInt,
    #[serde(rename = "X")]
    x_bound: SizeBound,
    #[serde(rename = "Y")]
    y_bound: SizeBound,
    field: Option<FieldInvariants>,
}

impl TryFrom<RawInstance> for CongruenceInstance {
    type Error = Error;

    fn try_from(r: RawInstance) -> Result<Self> {
        let field = r.field.unwrap_or_else(|| FieldInvariants::rational(&r.n));
        CongruenceInstance::with_field(r.n, r.t, r.a, r.x_bound, r.y_bound, field)
    }
}

impl CongruenceInstance {
    /// Instance over Q; t and a are reduced to least nonnegative residues.
    pub fn new(n: BigInt, t: BigInt, a: BigInt, x_bound: SizeBound, y_bound: SizeBound) -> Result<Self> {
        let field = FieldInvariants::rational(&n);
        CongruenceInstance::with_field(n, t, a, x_bound, y_bound, field)
    }

    pub fn with_field(
        n: BigInt,
        t: BigInt,
        a: BigInt,
        x_bound: SizeBound,
        y_bound: SizeBound,
        field: FieldInvariants,
    ) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::InvalidInstance(format!("modulus must be positive, got {n}")));
        }
        if field.is_rational() && field.ideal_norm != n {
            return Err(Error::InvalidInstance(format!(
                "over Q the ideal norm must equal n ({} != {n})",
                field.ideal_norm
            )));
        }
        let t = residue(&t, &n);
        let a = residue(&a, &n);
        if !t.gcd(&n).is_one() {
            return Err(Error::InvalidInstance(format!("gcd(t, n) = {} != 1", t.gcd(&n))));
        }
        if x_bound.is_zero() {
            return Err(Error::InvalidInstance("X must be positive".into()));
        }
        check_y(&y_bound)?;
        Ok(CongruenceInstance { n, t, a, x_bound, y_bound, field })
    }

    pub fn from_ints(n: i64, t: i64, a: i64, x: SizeBound, y: SizeBound) -> Result<Self> {
        CongruenceInstance::new(BigInt::from(n), BigInt::from(t), BigInt::from(a), x, y)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.a.is_zero()
    }
}

fn check_y(y: &SizeBound) -> Result<()> {
    if y.cmp_rational(&arith::rat(1, 3)) != std::cmp::Ordering::Greater {
        return Err(Error::YTooSmall(y.to_string()));
    }
    Ok(())
}

/// (π/2)^{3 r2} · 3^{-3 deg} · |D|^{-3/2} · Norm(J), rounded down.
///
/// Exact except for π and √|D|, both replaced by rational bounds in the
/// direction that shrinks the result, so the threshold never overstates
/// feasibility.
pub fn minkowski_threshold(field: &FieldInvariants) -> BigRational {
    let pi_lower = arith::parse_rational(PI_DIGITS).expect("pi digits parse");
    let half_pi = pi_lower / BigRational::from_integer(BigInt::from(2));
    let pi_factor: BigRational = Pow::pow(&half_pi, 3 * field.r2);
    let three_pow = BigRational::from_integer(BigInt::from(3).pow(3 * field.degree));
    let disc = BigRational::from_integer(field.abs_discriminant.clone());
    let root_disc = arith::sqrt_upper(&disc, 256);
    let norm = BigRational::from_integer(field.ideal_norm.clone());
    pi_factor * norm / (three_pow * &disc * root_disc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// threshold - (XY)^degree, with (XY)^degree rounded up when irrational.
    #[serde(with = "serde_str::rational")]
    pub margin: BigRational,
    #[serde(with = "serde_str::rational")]
    pub threshold: BigRational,
}

/// Is (XY)^degree strictly below the Minkowski threshold?
pub fn feasible(instance: &CongruenceInstance) -> Result<Feasibility> {
    check_y(&instance.y_bound)?;
    feasible_for(&instance.field, &instance.x_bound, &instance.y_bound)
}

pub fn feasible_for(field: &FieldInvariants, x: &SizeBound, y: &SizeBound) -> Result<Feasibility> {
    check_y(y)?;
    let threshold = minkowski_threshold(field);
    let xy_sq: BigRational = x.square() * y.square();
    let lhs_sq: BigRational = Pow::pow(&xy_sq, field.degree);
    let feasible = lhs_sq < &threshold * &threshold;
    let lhs_upper = arith::sqrt_upper(&lhs_sq, 128);
    let margin = &threshold - lhs_upper;
    Ok(Feasibility { feasible, margin, threshold })
}

impl Default for FieldInvariants {
    fn default() -> Self {
        FieldInvariants::rational(&BigInt::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn field(deg: u32, r1: u32, r2: u32, d: i64, norm: i64) -> FieldInvariants {
        FieldInvariants::new(deg, r1, r2, int(d), int(norm)).unwrap()
    }

    #[test]
    fn threshold_over_q() {
        assert_eq!(minkowski_threshold(&field(1, 1, 0, 1, 1000)), rat(1000, 27));
        assert_eq!(minkowski_threshold(&field(1, 1, 0, 1, 1)), rat(1, 27));
    }

    #[test]
    fn threshold_gaussian_field() {
        // (π/2)^3 · 3^-6 · 4^{-3/2} checked against an independent f64 evaluation.
        let t = minkowski_threshold(&field(2, 0, 1, 4, 1));
        let expect = (std::f64::consts::PI / 2.0).powi(3) / 729.0 / 8.0;
        let got = arith::rational_to_f64(&t);
        assert!((got - expect).abs() < 1e-15, "{got} vs {expect}");
        assert!(got <= expect + 1e-18);
        assert!((got - 0.000664).abs() < 1e-6);
    }

    #[test]
    fn threshold_rounds_down_for_non_square_discriminant() {
        let t = minkowski_threshold(&field(2, 2, 0, 5, 1));
        let exact = 1.0 / 729.0 / 5f64.powf(1.5);
        let got = arith::rational_to_f64(&t);
        assert!(got <= exact && exact - got < 1e-15);
    }

    #[test]
    fn invalid_signature_rejected() {
        assert!(FieldInvariants::new(2, 1, 0, int(5), int(1)).is_err());
        assert!(FieldInvariants::new(1, 1, 0, int(0), int(1)).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let six = SizeBound::from(6);
        let inst = CongruenceInstance::from_ints(1000, 3, 0, six.clone(), six).unwrap();
        let f = feasible(&inst).unwrap();
        assert!(f.feasible);
        assert_eq!(f.margin, rat(1000, 27) - rat(36, 1));

        let one = SizeBound::from(1);
        let inst = CongruenceInstance::from_ints(27, 2, 0, one.clone(), one).unwrap();
        let f = feasible(&inst).unwrap();
        assert!(!f.feasible);
        assert_eq!(f.margin, rat(0, 1));

        let b: SizeBound = "0.34".parse().unwrap();
        let inst = CongruenceInstance::from_ints(1000, 7, 5, b.clone(), b).unwrap();
        assert!(feasible(&inst).unwrap().feasible);
    }

    #[test]
    fn y_at_one_third_rejected() {
        let y: SizeBound = "1/3".parse().unwrap();
        let err = CongruenceInstance::from_ints(100, 3, 0, SizeBound::from(1), y.clone()).unwrap_err();
        assert!(matches!(err, Error::YTooSmall(_)));
        let field = FieldInvariants::rational(&int(100));
        assert!(matches!(feasible_for(&field, &SizeBound::from(1), &y), Err(Error::YTooSmall(_))));
    }

    #[test]
    fn instance_canonicalises_and_validates() {
        let one = SizeBound::from(1);
        let inst = CongruenceInstance::from_ints(12, -7, 25, one.clone(), one.clone()).unwrap();
        assert_eq!((inst.t.clone(), inst.a.clone()), (int(5), int(1)));
        assert!(CongruenceInstance::from_ints(12, 4, 0, one.clone(), one.clone()).is_err());
        assert!(CongruenceInstance::from_ints(0, 1, 0, one.clone(), one).is_err());
    }

    #[test]
    fn instance_json_round_trip() {
        let json = r#"{"n":"101","t":"69","a":"36","X":"sqrt(101/4)","Y":"sqrt(101/4)"}"#;
        let inst: CongruenceInstance = serde_json::from_str(json).unwrap();
        assert_eq!(inst.field, FieldInvariants::rational(&int(101)));
        let back: CongruenceInstance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);
        let bad = r#"{"n":"12","t":"5","a":"0","X":"1/0","Y":"1"}"#;
        assert!(serde_json::from_str::<CongruenceInstance>(bad).is_err());
    }
}
