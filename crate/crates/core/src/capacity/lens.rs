//! Transfinite diameter of V = D(0, r) ∩ D(1, s).
//!
//! The case split is decided exactly from R = r² and S = s². In the general
//! case, with u the intersection point in the upper half plane, α the interior
//! angle of V at u and k = π/(2π - α),
//!
//!   ζ = ((ū - r)/(u - r))^k,   γ∞(V) = k·|ū - u| / (2·Im ζ).
//!
//! On the branch arg ∈ [0, 2π) the ratio (ū - r)/(u - r) is e^{iθ} with
//! θ = π + 2·atan((Re u - r)/Im u), so γ∞(V) = k·Im(u)/sin(kθ). That real form
//! is what the interval evaluation uses; [`lens_geometry`] keeps the literal
//! complex route in f64 as a cross-check.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, rational_to_f64};
use crate::bound::SizeBound;
use crate::error::{Error, Result};
use crate::interval::{default_precision, Ball, Ctx, Interval};

const MAX_PRECISION: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LensCase {
    /// r + s < 1 with neither disk containing the other.
    Empty,
    /// r + s = 1: V is a single point.
    Tangent,
    /// r ≥ 1 + s: V = D(1, s).
    SecondInsideFirst,
    /// s ≥ 1 + r: V = D(0, r).
    FirstInsideSecond,
    General,
}

/// γ∞(V) with its case; `exact` is set whenever the value is a disk radius or 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LensCapacity {
    pub case: LensCase,
    pub exact: Option<SizeBound>,
    pub interval: Interval,
}

/// Exact classification from the squared radii.
pub fn classify_lens(r_sq: &BigRational, s_sq: &BigRational) -> LensCase {
    let one = BigRational::one();
    let four = rat(4, 1);
    // r ≥ 1 + s  ⇔  R - 1 - S ≥ 2s  ⇔  R - 1 - S ≥ 0 and (R - 1 - S)² ≥ 4S.
    let m = r_sq - &one - s_sq;
    if !m.is_negative() && &m * &m >= &four * s_sq {
        return LensCase::SecondInsideFirst;
    }
    let m = s_sq - &one - r_sq;
    if !m.is_negative() && &m * &m >= &four * r_sq {
        return LensCase::FirstInsideSecond;
    }
    // Without containment, r + s ≤ 1  ⇔  2r ≤ 1 + R - S  ⇔  1 + R - S ≥ 0 and 4R ≤ (1 + R - S)².
    let m = &one + r_sq - s_sq;
    if !m.is_negative() {
        let lhs = &four * r_sq;
        let rhs = &m * &m;
        if lhs < rhs {
            return LensCase::Empty;
        }
        if lhs == rhs {
            return LensCase::Tangent;
        }
    }
    LensCase::General
}

/// γ∞(D(0, r) ∩ D(1, s)) from R = r², S = s².
pub fn lens_capacity_sq(r_sq: &BigRational, s_sq: &BigRational) -> Result<LensCapacity> {
    if r_sq.is_negative() || s_sq.is_negative() {
        return Err(Error::Usage("lens radii must be nonnegative".into()));
    }
    let case = classify_lens(r_sq, s_sq);
    let exact = match case {
        LensCase::Empty | LensCase::Tangent => Some(SizeBound::zero()),
        LensCase::SecondInsideFirst => Some(SizeBound::from_square(s_sq.clone())?),
        LensCase::FirstInsideSecond => Some(SizeBound::from_square(r_sq.clone())?),
        LensCase::General => None,
    };
    let interval = match &exact {
        Some(v) => size_interval(v)?,
        None => general_interval(r_sq, s_sq, &BigRational::one())?,
    };
    Ok(LensCapacity { case, exact, interval })
}

/// f64 convenience wrapper; the inputs are taken as exact binary rationals.
pub fn lens_capacity(r: f64, s: f64) -> Result<LensCapacity> {
    let to_rat = |v: f64| BigRational::from_float(v).ok_or_else(|| Error::Usage(format!("radius {v} is not finite")));
    let (r, s) = (to_rat(r)?, to_rat(s)?);
    lens_capacity_sq(&(&r * &r), &(&s * &s))
}

/// Enclosure of a size bound √square.
pub fn size_interval(v: &SizeBound) -> Result<Interval> {
    if v.is_zero() {
        return Ok(Interval::zero());
    }
    if let Some(q) = v.as_rational() {
        return Ok(crate::interval::rational_interval(&q));
    }
    let mut ctx = Ctx::with_default_precision()?;
    let sq = ctx.rational(v.square())?;
    Ok(ctx.sqrt(&sq)?.to_interval())
}

/// scale · γ∞(V) in the general case, retrying at higher precision when an
/// enclosure is too wide to divide by.
pub(crate) fn general_interval(r_sq: &BigRational, s_sq: &BigRational, scale: &BigRational) -> Result<Interval> {
    let mut prec = default_precision();
    loop {
        let mut ctx = Ctx::new(prec)?;
        match general_ball(&mut ctx, r_sq, s_sq) {
            Ok(b) => {
                let sc = ctx.rational(&scale.abs())?;
                return Ok(ctx.mul(&b, &sc)?.to_interval());
            }
            Err(Error::Internal(msg)) if prec < MAX_PRECISION && msg.contains("division") => prec *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn general_ball(ctx: &mut Ctx, r_sq: &BigRational, s_sq: &BigRational) -> Result<Ball> {
    let one = BigRational::one();
    let xu = (&one + r_sq - s_sq) / rat(2, 1);
    let yu_sq = r_sq - &xu * &xu;
    if !yu_sq.is_positive() {
        return Err(Error::Internal(format!("lens boundary circles do not cross (Im(u)² = {yu_sq})")));
    }
    let r = {
        let v = ctx.rational(r_sq)?;
        ctx.sqrt(&v)?
    };
    let yu = {
        let v = ctx.rational(&yu_sq)?;
        ctx.sqrt(&v)?
    };
    // cos α = (1 - R - S)/(2rs)
    let two_rs = {
        let v = ctx.rational(&(rat(4, 1) * r_sq * s_sq))?;
        ctx.sqrt(&v)?
    };
    let num = ctx.rational(&(&one - r_sq - s_sq))?;
    let cos_a = ctx.div(&num, &two_rs)?;
    let alpha = ctx.acos(&cos_a)?;
    let pi = ctx.pi()?;
    let two_pi = ctx.add(&pi, &pi)?;
    let denom = ctx.sub(&two_pi, &alpha)?;
    let k = ctx.div(&pi, &denom)?;
    // θ = π + 2·atan((Re u - r)/Im u)
    let xu_b = ctx.rational(&xu)?;
    let diff = ctx.sub(&xu_b, &r)?;
    let slope = ctx.div(&diff, &yu)?;
    let at = ctx.atan(&slope)?;
    let two_at = ctx.add(&at, &at)?;
    let theta = ctx.add(&pi, &two_at)?;
    let k_theta = ctx.mul(&k, &theta)?;
    let sin = ctx.sin(&k_theta)?;
    let top = ctx.mul(&k, &yu)?;
    ctx.div(&top, &sin)
}

/// u, α and ζ from the literal complex formula, in f64.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LensGeometry {
    pub u: Complex64,
    pub u_bar: Complex64,
    pub alpha: f64,
    pub zeta: Complex64,
    pub capacity: f64,
}

pub fn lens_geometry(r: f64, s: f64) -> Result<LensGeometry> {
    let xu = (1.0 + r * r - s * s) / 2.0;
    let yu_sq = r * r - xu * xu;
    if yu_sq <= 0.0 {
        return Err(Error::Internal("lens boundary circles do not cross".into()));
    }
    let u = Complex64::new(xu, yu_sq.sqrt());
    let u_bar = u.conj();
    // Interior angle of V at u between the tangents of the two circles.
    let alpha = ((1.0 - r * r - s * s) / (2.0 * r * s)).clamp(-1.0, 1.0).acos();
    let k = std::f64::consts::PI / (2.0 * std::f64::consts::PI - alpha);
    let ratio = (u_bar - r) / (u - r);
    let arg = ratio.arg().rem_euclid(2.0 * std::f64::consts::PI);
    let log = Complex64::new(ratio.norm().ln(), arg);
    let zeta = (log * k).exp();
    let capacity = k * (u_bar - u).norm() / (2.0 * zeta.im);
    Ok(LensGeometry { u, u_bar, alpha, zeta, capacity })
}

pub(crate) fn approx(v: &BigRational) -> f64 {
    rational_to_f64(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cap(r: f64, s: f64) -> LensCapacity {
        lens_capacity(r, s).unwrap()
    }

    #[test]
    fn containment_cases_are_exact() {
        let c = cap(0.3, 1.5);
        assert_eq!(c.case, LensCase::FirstInsideSecond);
        assert_eq!(c.exact, Some(SizeBound::from_rational(BigRational::from_float(0.3).unwrap()).unwrap()));
        assert!(c.interval.contains(0.3));
        let c = lens_capacity_sq(&rat(9, 1), &rat(1, 4)).unwrap();
        assert_eq!(c.case, LensCase::SecondInsideFirst);
        assert_eq!(c.exact.unwrap().as_rational(), Some(rat(1, 2)));
        // r = 1 + s exactly.
        let c = lens_capacity_sq(&rat(9, 4), &rat(1, 4)).unwrap();
        assert_eq!(c.case, LensCase::SecondInsideFirst);
    }

    #[test]
    fn empty_and_tangent() {
        assert_eq!(cap(0.2, 0.2).case, LensCase::Empty);
        assert!(cap(0.2, 0.2).interval.is_exact_zero());
        let t = lens_capacity_sq(&rat(1, 4), &rat(1, 4)).unwrap();
        assert_eq!(t.case, LensCase::Tangent);
        assert!(t.interval.is_exact_zero());
    }

    #[test]
    fn reference_values() {
        // Independent evaluation of the complex formula (separate script, f64).
        for (r, s, v) in [(1.0, 1.0, 0.649519052838329), (0.5, 0.8, 0.25875), (2.0, 2.0, 1.66815)] {
            let c = cap(r, s);
            assert_eq!(c.case, LensCase::General);
            assert!((c.interval.mid() - v).abs() < 5e-5, "({r},{s}) -> {:?}", c.interval);
            assert!(c.interval.width() < 1e-12);
        }
        assert!(cap(1.0, 1.0).interval.contains(0.649519052838329));
    }

    #[test]
    fn containment_limit() {
        let c = cap(0.5, 1.5 - 1e-6);
        assert_eq!(c.case, LensCase::General);
        assert!((c.interval.mid() - 0.5).abs() < 1e-2);
        assert!((c.interval.mid() - 0.49999999948).abs() < 1e-8);
    }

    #[test]
    fn geometry_matches_interval_form() {
        for (r, s) in [(1.0, 1.0), (0.5, 0.8), (2.0, 2.0), (0.3, 0.9), (1.5, 0.7)] {
            let g = lens_geometry(r, s).unwrap();
            assert!((g.zeta.norm() - 1.0).abs() < 1e-12);
            assert!((g.u.norm() - r).abs() < 1e-12 && ((g.u - 1.0).norm() - s).abs() < 1e-12);
            assert!(g.u.im > 0.0 && g.alpha > 0.0 && g.alpha < std::f64::consts::PI);
            let c = cap(r, s);
            assert!((c.interval.mid() - g.capacity).abs() < 1e-9, "({r},{s})");
        }
    }

    #[test]
    fn negative_radius_rejected() {
        assert!(lens_capacity_sq(&rat(-1, 1), &rat(1, 1)).is_err());
    }

    fn general_pair() -> impl Strategy<Value = (f64, f64)> {
        (0.05f64..3.0, 0.05f64..3.0).prop_filter("general", |(r, s)| {
            r + s > 1.0 + 1e-6 && *r < 1.0 + s - 1e-6 && *s < 1.0 + r - 1e-6
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// z ↦ 1 - z swaps the roles of the two disks.
        #[test]
        fn swap_symmetry((r, s) in general_pair()) {
            let a = cap(r, s).interval;
            let b = cap(s, r).interval;
            prop_assert!(a.lo <= b.hi + 1e-12 && b.lo <= a.hi + 1e-12, "{a:?} vs {b:?}");
        }

        #[test]
        fn unit_modulus_zeta((r, s) in general_pair()) {
            let g = lens_geometry(r, s).unwrap();
            prop_assert!((g.zeta.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monotone_in_each_radius(r in 0.05f64..3.0, s in 0.05f64..3.0, dr in 0.0f64..0.5, ds in 0.0f64..0.5) {
            let base = cap(r, s).interval;
            let up = cap(r + dr, s + ds).interval;
            prop_assert!(up.hi >= base.lo - 1e-12, "({r},{s}) {base:?} -> {up:?}");
            if base.lo > 0.0 && dr > 1e-6 && ds > 1e-6 {
                prop_assert!(up.lo > base.hi, "strict: ({r},{s}) {base:?} -> {up:?}");
            }
        }
    }
}
