//! Interval enclosures.
//!
//! [`Interval`] is the f64 enclosure handed to every consumer of a capacity.
//! [`Ball`] is the working-precision enclosure built on `astro-float`, whose
//! operations are correctly rounded to nearest; each result is pushed outward
//! by at least two ulps so the true value always stays inside.

use std::sync::OnceLock;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: usize = 128;
pub const PRECISION_ENV: &str = "CAPCLASS_PRECISION_BITS";

/// Working precision: `CAPCLASS_PRECISION_BITS` if set and sane, else 128.
pub fn default_precision() -> usize {
    static PREC: OnceLock<usize> = OnceLock::new();
    *PREC.get_or_init(|| {
        std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&p| (64..=1 << 16).contains(&p))
            .unwrap_or(DEFAULT_PRECISION_BITS)
    })
}

/// Closed interval [lo, hi] with f64 endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn zero() -> Self {
        Interval::point(0.0)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }

    /// Hull of two intervals.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }
}

/// Interval with working-precision endpoints.
#[derive(Clone, Debug)]
pub struct Ball {
    lo: BigFloat,
    hi: BigFloat,
}

/// Arithmetic context: precision plus the constants cache astro-float needs.
pub struct Ctx {
    prec: usize,
    cc: Consts,
    rm: RoundingMode,
}

impl Ctx {
    pub fn new(prec: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Internal(format!("constants cache: {e:?}")))?;
        Ok(Ctx { prec: prec.max(64), cc, rm: RoundingMode::ToEven })
    }

    pub fn with_default_precision() -> Result<Self> {
        Ctx::new(default_precision())
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    fn check(&self, v: BigFloat, what: &str) -> Result<BigFloat> {
        if v.is_nan() || v.is_inf() {
            return Err(Error::Internal(format!("non-finite value in {what}")));
        }
        Ok(v)
    }

    /// x - |x|·2^(2-p): strictly below the true value of a correctly rounded x.
    fn down(&mut self, x: BigFloat) -> BigFloat {
        if x.is_zero() {
            return x;
        }
        let d = self.slack(&x);
        x.sub(&d, self.prec, self.rm)
    }

    fn up(&mut self, x: BigFloat) -> BigFloat {
        if x.is_zero() {
            return x;
        }
        let d = self.slack(&x);
        x.add(&d, self.prec, self.rm)
    }

    fn slack(&self, x: &BigFloat) -> BigFloat {
        let mut d = x.abs();
        if let Some(e) = d.exponent() {
            d.set_exponent(e - self.prec as i32 + 2);
        }
        d
    }

    fn ball(&mut self, lo: BigFloat, hi: BigFloat, what: &str) -> Result<Ball> {
        let lo = self.check(lo, what)?;
        let hi = self.check(hi, what)?;
        Ok(Ball { lo: self.down(lo), hi: self.up(hi) })
    }

    pub fn int(&mut self, v: &BigInt) -> Result<Ball> {
        let x = BigFloat::parse(&v.to_string(), Radix::Dec, self.prec, self.rm, &mut self.cc);
        self.ball(x.clone(), x, "integer conversion")
    }

    pub fn small(&mut self, v: i64) -> Result<Ball> {
        self.int(&BigInt::from(v))
    }

    pub fn rational(&mut self, v: &BigRational) -> Result<Ball> {
        let num = self.int(v.numer())?;
        if v.denom() == &BigInt::from(1) {
            return Ok(num);
        }
        let den = self.int(v.denom())?;
        self.div(&num, &den)
    }

    pub fn pi(&mut self) -> Result<Ball> {
        let p = self.cc.pi(self.prec, self.rm);
        self.ball(p.clone(), p, "pi")
    }

    pub fn add(&mut self, a: &Ball, b: &Ball) -> Result<Ball> {
        let lo = a.lo.add(&b.lo, self.prec, self.rm);
        let hi = a.hi.add(&b.hi, self.prec, self.rm);
        self.ball(lo, hi, "add")
    }

    pub fn sub(&mut self, a: &Ball, b: &Ball) -> Result<Ball> {
        let lo = a.lo.sub(&b.hi, self.prec, self.rm);
        let hi = a.hi.sub(&b.lo, self.prec, self.rm);
        self.ball(lo, hi, "sub")
    }

    pub fn neg(&self, a: &Ball) -> Ball {
        Ball { lo: a.hi.neg(), hi: a.lo.neg() }
    }

    pub fn mul(&mut self, a: &Ball, b: &Ball) -> Result<Ball> {
        let products = [
            a.lo.mul(&b.lo, self.prec, self.rm),
            a.lo.mul(&b.hi, self.prec, self.rm),
            a.hi.mul(&b.lo, self.prec, self.rm),
            a.hi.mul(&b.hi, self.prec, self.rm),
        ];
        let (lo, hi) = min_max(&products);
        self.ball(lo, hi, "mul")
    }

    pub fn div(&mut self, a: &Ball, b: &Ball) -> Result<Ball> {
        if !b.excludes_zero() {
            return Err(Error::Internal("interval division by an interval containing zero".into()));
        }
        let q = [
            a.lo.div(&b.lo, self.prec, self.rm),
            a.lo.div(&b.hi, self.prec, self.rm),
            a.hi.div(&b.lo, self.prec, self.rm),
            a.hi.div(&b.hi, self.prec, self.rm),
        ];
        let (lo, hi) = min_max(&q);
        self.ball(lo, hi, "div")
    }

    /// sqrt over the nonnegative part; errors if the interval is entirely negative.
    pub fn sqrt(&mut self, a: &Ball) -> Result<Ball> {
        if a.hi.is_negative() {
            return Err(Error::Internal("sqrt of a negative interval".into()));
        }
        let zero = BigFloat::from_word(0, self.prec);
        let lo = if a.lo.is_positive() { a.lo.sqrt(self.prec, self.rm) } else { zero };
        let hi = a.hi.sqrt(self.prec, self.rm);
        let mut out = self.ball(lo, hi, "sqrt")?;
        if out.lo.is_negative() {
            out.lo = BigFloat::from_word(0, self.prec);
        }
        Ok(out)
    }

    pub fn atan(&mut self, a: &Ball) -> Result<Ball> {
        let lo = a.lo.atan(self.prec, self.rm, &mut self.cc);
        let hi = a.hi.atan(self.prec, self.rm, &mut self.cc);
        self.ball(lo, hi, "atan")
    }

    /// arccos, decreasing; the argument is clamped to [-1, 1].
    pub fn acos(&mut self, a: &Ball) -> Result<Ball> {
        let one = BigFloat::from_word(1, self.prec);
        let m_one = one.neg();
        let clamp = |x: &BigFloat| -> BigFloat {
            if x.cmp3(&one) == Some(1) {
                one.clone()
            } else if x.cmp3(&m_one) == Some(-1) {
                m_one.clone()
            } else {
                x.clone()
            }
        };
        let (alo, ahi) = (clamp(&a.lo), clamp(&a.hi));
        let lo = ahi.acos(self.prec, self.rm, &mut self.cc);
        let hi = alo.acos(self.prec, self.rm, &mut self.cc);
        self.ball(lo, hi, "acos")
    }

    /// sin over an interval, accounting for interior extrema.
    pub fn sin(&mut self, a: &Ball) -> Result<Ball> {
        let s_lo = a.lo.sin(self.prec, self.rm, &mut self.cc);
        let s_hi = a.hi.sin(self.prec, self.rm, &mut self.cc);
        let (mut lo, mut hi) = min_max(&[s_lo, s_hi]);
        let pi = self.pi()?;
        let two_pi = self.add(&pi, &pi)?;
        let two = self.small(2)?;
        let half_pi = self.div(&pi, &two)?;
        // Is some critical point pi/2 + m*pi inside [a.lo, a.hi]?
        let rel = self.sub(a, &half_pi)?;
        let m_lo = self.div(&rel, &pi)?;
        let k_first = m_lo.lo.ceil();
        let k_last = m_lo.hi.floor();
        let width = self.sub(&Ball { lo: a.hi.clone(), hi: a.hi.clone() }, &Ball { lo: a.lo.clone(), hi: a.lo.clone() })?;
        if width.hi.cmp3(&two_pi.lo) != Some(-1) {
            let one = BigFloat::from_word(1, self.prec);
            return Ok(Ball { lo: one.neg(), hi: one });
        }
        // Critical points can only be located up to the enclosure of pi; be
        // conservative and include every candidate the enclosures admit.
        let mut k = k_first.sub(&BigFloat::from_word(1, self.prec), self.prec, self.rm);
        while k.cmp3(&k_last.add(&BigFloat::from_word(1, self.prec), self.prec, self.rm)) != Some(1) {
            let kb = Ball { lo: k.clone(), hi: k.clone() };
            let crit = self.mul(&kb, &pi)?;
            let crit = self.add(&crit, &half_pi)?;
            let inside = crit.hi.cmp3(&a.lo) != Some(-1) && crit.lo.cmp3(&a.hi) != Some(1);
            if inside {
                let odd = k.rem(&BigFloat::from_word(2, self.prec));
                let one = BigFloat::from_word(1, self.prec);
                if odd.is_zero() {
                    hi = one;
                } else {
                    lo = one.neg();
                }
            }
            k = k.add(&BigFloat::from_word(1, self.prec), self.prec, self.rm);
        }
        self.ball(lo, hi, "sin")
    }

    pub fn max(&self, a: &Ball, b: &Ball) -> Ball {
        let pick = |x: &BigFloat, y: &BigFloat| if x.cmp3(y) == Some(1) { x.clone() } else { y.clone() };
        Ball { lo: pick(&a.lo, &b.lo), hi: pick(&a.hi, &b.hi) }
    }

    pub fn min(&self, a: &Ball, b: &Ball) -> Ball {
        let pick = |x: &BigFloat, y: &BigFloat| if x.cmp3(y) == Some(-1) { x.clone() } else { y.clone() };
        Ball { lo: pick(&a.lo, &b.lo), hi: pick(&a.hi, &b.hi) }
    }

    /// Outward f64 enclosure.
    pub fn to_interval(&self, a: &Ball) -> Interval {
        a.to_interval()
    }
}

impl Ball {
    /// Outward f64 enclosure.
    pub fn to_interval(&self) -> Interval {
        Interval { lo: to_f64_below(&self.lo), hi: to_f64_above(&self.hi) }
    }

    pub fn excludes_zero(&self) -> bool {
        self.lo.is_positive() && !self.lo.is_zero() || self.hi.is_negative() && !self.hi.is_zero()
    }

    /// Certainly below `v`.
    pub fn below(&self, v: i64) -> bool {
        self.hi.cmp3(&BigFloat::from_f64(v as f64, 64)) == Some(-1)
    }

    /// Certainly above `v`.
    pub fn above(&self, v: i64) -> bool {
        self.lo.cmp3(&BigFloat::from_f64(v as f64, 64)) == Some(1)
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive() && !self.lo.is_zero()
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }
}

/// `BigFloat::cmp` reports only the sign of the difference; normalise it to -1/0/1.
trait Cmp3 {
    fn cmp3(&self, other: &BigFloat) -> Option<i64>;
}

impl Cmp3 for BigFloat {
    fn cmp3(&self, other: &BigFloat) -> Option<i64> {
        self.cmp(other).map(|c| (c as i64).signum())
    }
}

fn min_max(xs: &[BigFloat]) -> (BigFloat, BigFloat) {
    let mut lo = xs[0].clone();
    let mut hi = xs[0].clone();
    for x in &xs[1..] {
        if x.cmp3(&lo) == Some(-1) {
            lo = x.clone();
        }
        if x.cmp3(&hi) == Some(1) {
            hi = x.clone();
        }
    }
    (lo, hi)
}

/// Approximate f64 value of a finite BigFloat, within a few f64 ulps.
fn approx_f64(x: &BigFloat) -> f64 {
    let Some((words, _bits, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if x.is_zero() {
        return 0.0;
    }
    let top = *words.last().unwrap_or(&0) as f64;
    let v = top * pow2(exp as i64 - 64);
    if sign == Sign::Neg { -v } else { v }
}

fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e < -1022 {
        2f64.powi(-1022) * 2f64.powi((e + 1022) as i32)
    } else {
        2f64.powi(e as i32)
    }
}

fn to_f64_below(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    approx_f64(x).next_down().next_down()
}

fn to_f64_above(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    approx_f64(x).next_up().next_up()
}

/// Enclose a rational in an f64 interval.
pub fn rational_interval(v: &BigRational) -> Interval {
    if v.is_zero() {
        return Interval::zero();
    }
    let f = crate::arith::rational_to_f64(v);
    Interval { lo: f.next_down(), hi: f.next_up() }
}

/// Product of an exact nonnegative rational and an interval.
pub fn scale_interval(k: &BigRational, iv: &Interval) -> Interval {
    if k.is_zero() || iv.is_exact_zero() {
        return Interval::zero();
    }
    let kf = rational_interval(k);
    let c = [kf.lo * iv.lo, kf.lo * iv.hi, kf.hi * iv.lo, kf.hi * iv.hi];
    let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Interval { lo: lo.next_down(), hi: hi.next_up() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn ctx() -> Ctx {
        Ctx::new(128).unwrap()
    }

    #[test]
    fn encloses_simple_values() {
        let mut c = ctx();
        let third = c.rational(&rat(1, 3)).unwrap();
        let iv = c.to_interval(&third);
        assert!(iv.contains(1.0 / 3.0));
        assert!(iv.width() < 1e-15);
        let one = c.small(1).unwrap();
        let iv = c.to_interval(&one);
        assert!(iv.contains(1.0) && iv.width() < 1e-15);
        let big = c.int(&BigInt::from(10u64).pow(30)).unwrap();
        assert!(c.to_interval(&big).contains(1e30));
    }

    #[test]
    fn transcendental_enclosures() {
        let mut c = ctx();
        let pi = c.pi().unwrap();
        assert!(c.to_interval(&pi).contains(std::f64::consts::PI));
        let two = c.small(2).unwrap();
        let r2 = c.sqrt(&two).unwrap();
        assert!(c.to_interval(&r2).contains(std::f64::consts::SQRT_2));
        let half = c.rational(&rat(1, 2)).unwrap();
        let a = c.acos(&half).unwrap();
        assert!(c.to_interval(&a).contains(std::f64::consts::FRAC_PI_3));
        let one = c.small(1).unwrap();
        let t = c.atan(&one).unwrap();
        assert!(c.to_interval(&t).contains(std::f64::consts::FRAC_PI_4));
    }

    #[test]
    fn sine_handles_extrema() {
        let mut c = ctx();
        let a = c.rational(&rat(1, 1)).unwrap();
        let b = c.rational(&rat(2, 1)).unwrap();
        let hull = Ball { lo: a.lo.clone(), hi: b.hi.clone() };
        let s = c.sin(&hull).unwrap().to_interval();
        assert!(s.contains(1.0));
        assert!(s.lo <= 1f64.sin() && s.lo <= 2f64.sin());
        let s1 = c.sin(&a).unwrap().to_interval();
        assert!(s1.contains(1f64.sin()) && s1.width() < 1e-14);
        let m = c.rational(&rat(-2, 1)).unwrap();
        let hull = Ball { lo: m.lo.clone(), hi: m.hi.clone() };
        let s = c.sin(&hull).unwrap().to_interval();
        assert!(s.contains((-2f64).sin()));
    }

    #[test]
    fn division_by_zero_interval_is_rejected() {
        let mut c = ctx();
        let one = c.small(1).unwrap();
        let z = c.small(0).unwrap();
        assert!(c.div(&one, &z).is_err());
    }

    #[test]
    fn higher_precision_is_tighter() {
        let mut lo = Ctx::new(64).unwrap();
        let mut hi = Ctx::new(256).unwrap();
        let a = lo.rational(&rat(1, 7)).unwrap();
        let b = hi.rational(&rat(1, 7)).unwrap();
        let wa = lo.sub(&Ball { lo: a.hi.clone(), hi: a.hi.clone() }, &Ball { lo: a.lo.clone(), hi: a.lo.clone() }).unwrap();
        let wb = hi.sub(&Ball { lo: b.hi.clone(), hi: b.hi.clone() }, &Ball { lo: b.lo.clone(), hi: b.lo.clone() }).unwrap();
        assert_eq!(wb.hi.cmp3(&wa.hi), Some(-1));
    }
}
