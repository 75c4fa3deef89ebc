//! Brute-force ground truth: all small solutions of x + t·y + a ≡ 0 mod n in
//! Z and in the imaginary quadratic rings Z[i], Z[√-2], Z[ω] (ω² = ω - 1).
//!
//! Each ring has one infinite place, so |x| ≤ X is the integer test N(x) ≤ X².
//! Elements are u + v·θ with θ = i, √-2 or ω; {1, θ} is a Z-basis, so an
//! element is divisible by a rational integer n iff both coordinates are.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inverse, residue};
use crate::bound::SizeBound;
use crate::error::{Error, Result};

pub const DEFAULT_BOX_LIMIT: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ring {
    Integers,
    Gaussian,
    SqrtMinusTwo,
    Eisenstein,
}

impl Ring {
    pub const ALL: [Ring; 4] = [Ring::Integers, Ring::Gaussian, Ring::SqrtMinusTwo, Ring::Eisenstein];

    pub fn norm(self, x: RingElement) -> i128 {
        let (u, v) = (x.u as i128, x.v as i128);
        match self {
            Ring::Integers => u * u,
            Ring::Gaussian => u * u + v * v,
            Ring::SqrtMinusTwo => u * u + 2 * v * v,
            Ring::Eisenstein => u * u + u * v + v * v,
        }
    }

    pub fn mul(self, a: RingElement, b: RingElement) -> RingElement {
        let (ac, bd) = (a.u * b.u, a.v * b.v);
        let cross = a.u * b.v + a.v * b.u;
        match self {
            Ring::Integers => RingElement::new(ac, 0),
            Ring::Gaussian => RingElement::new(ac - bd, cross),
            Ring::SqrtMinusTwo => RingElement::new(ac - 2 * bd, cross),
            Ring::Eisenstein => RingElement::new(ac - bd, cross + bd),
        }
    }

    pub fn conj(self, a: RingElement) -> RingElement {
        match self {
            Ring::Integers => a,
            Ring::Gaussian | Ring::SqrtMinusTwo => RingElement::new(a.u, -a.v),
            // conj(ω) = 1 - ω
            Ring::Eisenstein => RingElement::new(a.u + a.v, -a.v),
        }
    }

    pub fn contains(self, x: RingElement) -> bool {
        self != Ring::Integers || x.v == 0
    }

    /// Euclidean remainder: a - q·b with q the coordinate-wise rounding of a/b.
    fn rem(self, a: RingElement, b: RingElement) -> RingElement {
        let nb = self.norm(b) as i64;
        let p = self.mul(a, self.conj(b));
        let round = |x: i64| (2 * x + nb).div_euclid(2 * nb);
        let q = RingElement::new(round(p.u), round(p.v));
        let qb = self.mul(q, b);
        RingElement::new(a.u - qb.u, a.v - qb.v)
    }

    /// A gcd, defined up to a unit. All four rings are norm-Euclidean.
    pub fn gcd(self, mut a: RingElement, mut b: RingElement) -> RingElement {
        while !b.is_zero() {
            let r = self.rem(a, b);
            a = b;
            b = r;
        }
        a
    }

    pub fn is_unit(self, a: RingElement) -> bool {
        self.norm(a) == 1
    }

    pub fn units(self) -> Vec<RingElement> {
        let e = RingElement::new;
        match self {
            Ring::Integers | Ring::SqrtMinusTwo => vec![e(1, 0), e(-1, 0)],
            Ring::Gaussian => vec![e(1, 0), e(-1, 0), e(0, 1), e(0, -1)],
            Ring::Eisenstein => vec![e(1, 0), e(-1, 0), e(0, 1), e(0, -1), e(1, -1), e(-1, 1)],
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::Integers => "Z",
            Ring::Gaussian => "Z[i]",
            Ring::SqrtMinusTwo => "Z[sqrt(-2)]",
            Ring::Eisenstein => "Z[omega]",
        })
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" | "integers" => Ok(Ring::Integers),
            "z[i]" | "gaussian" => Ok(Ring::Gaussian),
            "z[sqrt(-2)]" | "z[sqrt-2]" | "sqrt_minus_two" => Ok(Ring::SqrtMinusTwo),
            "z[omega]" | "z[w]" | "eisenstein" => Ok(Ring::Eisenstein),
            other => Err(Error::Parse(format!("unknown ring {other:?}"))),
        }
    }
}

/// u + v·θ, serialised as [u, v].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct RingElement {
    pub u: i64,
    pub v: i64,
}

impl From<(i64, i64)> for RingElement {
    fn from((u, v): (i64, i64)) -> Self {
        RingElement { u, v }
    }
}

impl From<RingElement> for (i64, i64) {
    fn from(e: RingElement) -> Self {
        (e.u, e.v)
    }
}

impl RingElement {
    pub const fn new(u: i64, v: i64) -> Self {
        RingElement { u, v }
    }

    pub const fn int(u: i64) -> Self {
        RingElement { u, v: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.u == 0 && self.v == 0
    }

    pub fn divisible_by(&self, n: i64) -> bool {
        self.u.rem_euclid(n) == 0 && self.v.rem_euclid(n) == 0
    }
}

impl std::ops::Neg for RingElement {
    type Output = Self;

    fn neg(self) -> Self {
        RingElement::new(-self.u, -self.v)
    }
}

pub type Solution = (RingElement, RingElement);

fn norm_within(norm: i128, square: &BigRational) -> bool {
    &BigRational::from_integer(BigInt::from(norm)) <= square
}

fn coord_range(square: &BigRational) -> i64 {
    // |u|, |v| ≤ 2·sqrt(norm) covers all four norm forms.
    let four = BigRational::from_integer(BigInt::from(4));
    (square * four).floor().to_integer().sqrt().to_i64().unwrap_or(i64::MAX / 4)
}

struct Search<'a> {
    ring: Ring,
    n: i64,
    t: i64,
    a: i64,
    x_sq: &'a BigRational,
    y_sq: &'a BigRational,
}

impl Search<'_> {
    fn estimate(&self) -> f64 {
        let rx = coord_range(self.x_sq) as f64;
        let ry = coord_range(self.y_sq) as f64;
        let per_axis = |r: f64| 2.0 * r / self.n as f64 + 1.0;
        match self.ring {
            Ring::Integers => (2.0 * ry + 1.0) * per_axis(rx),
            _ => (2.0 * ry + 1.0).powi(2) * per_axis(rx).powi(2),
        }
    }

    /// Solutions with y in a fixed first coordinate, ordered by (y, x).
    fn slice(&self, yu: i64) -> Vec<Solution> {
        let ry = coord_range(self.y_sq);
        let rx = coord_range(self.x_sq);
        let vs: Vec<i64> = if self.ring == Ring::Integers { vec![0] } else { (-ry..=ry).collect() };
        let mut out = Vec::new();
        for yv in vs {
            let y = RingElement::new(yu, yv);
            if !norm_within(self.ring.norm(y), self.y_sq) {
                continue;
            }
            // x ≡ -t·y - a coordinate-wise.
            let tu = (-(self.t as i128) * yu as i128 - self.a as i128).rem_euclid(self.n as i128) as i64;
            let tv = (-(self.t as i128) * yv as i128).rem_euclid(self.n as i128) as i64;
            let xvs: Vec<i64> = if self.ring == Ring::Integers { vec![0] } else { class_in(tv, self.n, rx) };
            for xv in xvs {
                for xu in class_in(tu, self.n, rx) {
                    let x = RingElement::new(xu, xv);
                    if norm_within(self.ring.norm(x), self.x_sq) {
                        out.push((x, y));
                    }
                }
            }
        }
        out
    }

    fn run(&self, limit: f64) -> Result<Vec<Solution>> {
        let estimate = self.estimate();
        if estimate > limit {
            return Err(Error::SearchTooLarge { estimate, limit });
        }
        let ry = coord_range(self.y_sq);
        let slices: Vec<Vec<Solution>> = (-ry..=ry).into_par_iter().map(|yu| self.slice(yu)).collect();
        Ok(slices.into_iter().flatten().collect())
    }
}

/// Integers ≡ r mod n in [-bound, bound], increasing.
fn class_in(r: i64, n: i64, bound: i64) -> Vec<i64> {
    let start = -bound + (r - -bound).rem_euclid(n);
    (0..).map(|k| start + k * n).take_while(|&v| v <= bound).collect()
}

fn small(v: &BigInt, what: &str) -> Result<i64> {
    v.to_i64().filter(|x| x.abs() < 1 << 40).ok_or_else(|| Error::Usage(format!("{what} = {v} is too large for the brute-force oracle")))
}

/// Every pair (x, y) of ring elements with |x| ≤ X, |y| ≤ Y and
/// x + t·y + a ≡ 0 mod n, ordered by y then x.
pub fn enumerate_solutions(n: &BigInt, t: &BigInt, a: &BigInt, x: &SizeBound, y: &SizeBound, ring: Ring) -> Result<Vec<Solution>> {
    enumerate_with_limit(n, t, a, x, y, ring, DEFAULT_BOX_LIMIT)
}

pub fn enumerate_with_limit(
    n: &BigInt,
    t: &BigInt,
    a: &BigInt,
    x: &SizeBound,
    y: &SizeBound,
    ring: Ring,
    limit: f64,
) -> Result<Vec<Solution>> {
    if !n.is_positive() {
        return Err(Error::InvalidInstance("modulus must be positive".into()));
    }
    let n_small = small(n, "n")?;
    let search = Search {
        ring,
        n: n_small,
        t: small(&residue(t, n), "t")?,
        a: small(&residue(a, n), "a")?,
        x_sq: x.square(),
        y_sq: y.square(),
    };
    search.run(limit)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCount {
    pub raw: usize,
    /// Pairs other than (0, 0).
    pub nonzero: usize,
}

pub fn count_solutions(t: &BigInt, a: &BigInt, n: &BigInt, x: &SizeBound, y: &SizeBound, ring: Ring) -> Result<SolutionCount> {
    let sols = enumerate_solutions(n, t, a, x, y, ring)?;
    let nonzero = sols.iter().filter(|(x, y)| !(x.is_zero() && y.is_zero())).count();
    Ok(SolutionCount { raw: sols.len(), nonzero })
}

/// x0 + t·y0 ≡ 0 mod n with |x0·y0| ≤ n/2 and x0, y0, n pairwise coprime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionInstance {
    pub n: i64,
    pub t: i64,
    pub x0: RingElement,
    pub y0: RingElement,
    pub ring: Ring,
}

impl ObstructionInstance {
    pub fn validate(&self) -> Result<()> {
        let (n, ring) = (self.n, self.ring);
        let fail = |msg: String| Err(Error::Hypothesis(msg));
        if n < 2 {
            return fail(format!("n = {n} must be at least 2"));
        }
        if !ring.contains(self.x0) || !ring.contains(self.y0) {
            return fail(format!("x0, y0 must lie in {ring}"));
        }
        if num_integer::gcd(self.t, n) != 1 {
            return fail(format!("gcd(t, n) = {} != 1", num_integer::gcd(self.t, n)));
        }
        let ty0 = ring.mul(RingElement::int(self.t), self.y0);
        if !RingElement::new(self.x0.u + ty0.u, self.x0.v + ty0.v).divisible_by(n) {
            return fail("x0 + t·y0 is not divisible by n".into());
        }
        // |x0·y0| ≤ n/2  ⇔  4·N(x0)·N(y0) ≤ n².
        if 4 * ring.norm(self.x0) * ring.norm(self.y0) > (n as i128) * (n as i128) {
            return fail("|x0·y0| exceeds n/2".into());
        }
        let nn = RingElement::int(n);
        for (p, q, what) in [(self.x0, self.y0, "x0, y0"), (self.x0, nn, "x0, n"), (self.y0, nn, "y0, n")] {
            if !ring.is_unit(ring.gcd(p, q)) {
                return fail(format!("{what} share a proper ideal in {ring}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCheck {
    pub ring: Ring,
    pub holds: bool,
    /// Nonzero solutions no larger than (x0, y0) and strictly smaller in one coordinate.
    pub counterexamples: Vec<Solution>,
}

/// Searches each ring in `rings` containing the instance's ring for nonzero
/// (x, y) with |x| ≤ |x0|, |y| ≤ |y0|, one of them strict.
pub fn check_obstruction(obs: &ObstructionInstance, rings: &[Ring]) -> Result<Vec<ObstructionCheck>> {
    obs.validate()?;
    let x_sq = BigRational::from_integer(BigInt::from(obs.ring.norm(obs.x0)));
    let y_sq = BigRational::from_integer(BigInt::from(obs.ring.norm(obs.y0)));
    let mut out = Vec::new();
    for &ring in rings {
        if obs.ring != Ring::Integers && ring != obs.ring {
            continue;
        }
        let search = Search { ring, n: obs.n, t: obs.t.rem_euclid(obs.n), a: 0, x_sq: &x_sq, y_sq: &y_sq };
        let counterexamples: Vec<Solution> = search
            .run(DEFAULT_BOX_LIMIT)?
            .into_iter()
            .filter(|(x, y)| {
                let (nx, ny) = (ring.norm(*x), ring.norm(*y));
                !(x.is_zero() && y.is_zero())
                    && (nx < obs.ring.norm(obs.x0) || ny < obs.ring.norm(obs.y0))
            })
            .collect();
        out.push(ObstructionCheck { ring, holds: counterexamples.is_empty(), counterexamples });
    }
    Ok(out)
}

/// A valid integer instance: y0 ≥ 1 and x0 ≠ 0 with |x0·y0| ≤ n/2, pairwise
/// coprime with n, and t = -x0/y0 mod n. `None` when the draw is invalid.
pub fn integer_obstruction(n: i64, x0: i64, y0: i64) -> Option<ObstructionInstance> {
    if n < 2 || y0 == 0 || x0 == 0 || 2 * (x0 * y0).abs() > n {
        return None;
    }
    if x0.gcd(&y0) != 1 || x0.gcd(&n) != 1 || y0.gcd(&n) != 1 {
        return None;
    }
    let inv = mod_inverse(&BigInt::from(y0), &BigInt::from(n)).ok()?;
    let t = residue(&(-BigInt::from(x0) * inv), &BigInt::from(n)).to_i64()?;
    let obs = ObstructionInstance { n, t, x0: RingElement::int(x0), y0: RingElement::int(y0), ring: Ring::Integers };
    obs.validate().ok().map(|_| obs)
}

/// Valid Gaussian instances with integer t are unit multiples of integer ones:
/// x0 + t·y0 ≡ 0 forces n | Im(x0·conj(y0)), and |Im(x0·conj(y0))| ≤ |x0·y0| ≤ n/2.
pub fn gaussian_obstruction(n: i64, x0: i64, y0: i64, unit: RingElement) -> Option<ObstructionInstance> {
    let base = integer_obstruction(n, x0, y0)?;
    let ring = Ring::Gaussian;
    let obs = ObstructionInstance { ring, x0: ring.mul(unit, base.x0), y0: ring.mul(unit, base.y0), ..base };
    obs.validate().ok().map(|_| obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use proptest::prelude::*;

    fn ints(v: &[(i64, i64)]) -> Vec<Solution> {
        v.iter().map(|&(x, y)| (RingElement::int(x), RingElement::int(y))).collect()
    }

    #[test]
    fn integer_examples() {
        let two = SizeBound::from(2);
        let s = enumerate_solutions(&int(12), &int(5), &int(0), &two, &two, Ring::Integers).unwrap();
        assert_eq!(s, ints(&[(-2, -2), (0, 0), (2, 2)]));
        let s = enumerate_solutions(&int(12), &int(7), &int(0), &SizeBound::from(5), &SizeBound::from(1), Ring::Integers).unwrap();
        assert_eq!(s, ints(&[(-5, -1), (0, 0), (5, 1)]));
        let c = count_solutions(&int(5), &int(0), &int(12), &two, &two, Ring::Integers).unwrap();
        assert_eq!(c, SolutionCount { raw: 3, nonzero: 2 });
    }

    #[test]
    fn ring_arithmetic() {
        let w = RingElement::new(0, 1);
        assert_eq!(Ring::Eisenstein.mul(w, w), RingElement::new(-1, 1));
        assert_eq!(Ring::Eisenstein.norm(w), 1);
        assert_eq!(Ring::Gaussian.mul(w, w), RingElement::int(-1));
        assert_eq!(Ring::SqrtMinusTwo.mul(w, w), RingElement::int(-2));
        // 5 = (2 + i)(2 - i) in Z[i]
        let g = Ring::Gaussian.gcd(RingElement::int(5), RingElement::new(2, 1));
        assert_eq!(Ring::Gaussian.norm(g), 5);
        assert!(Ring::Gaussian.is_unit(Ring::Gaussian.gcd(RingElement::int(3), RingElement::new(1, 1))));
        // 3 = -ω̄²·(1 + ω)²... ramified: 1 + ω has norm 3.
        let g = Ring::Eisenstein.gcd(RingElement::int(3), RingElement::new(1, 1));
        assert_eq!(Ring::Eisenstein.norm(g), 3);
        for r in Ring::ALL {
            for e in r.units() {
                assert!(r.is_unit(e));
            }
        }
    }

    #[test]
    fn worked_obstruction() {
        let obs = ObstructionInstance { n: 12, t: 7, x0: RingElement::int(5), y0: RingElement::int(1), ring: Ring::Integers };
        let checks = check_obstruction(&obs, &[Ring::Integers, Ring::Gaussian]).unwrap();
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
        assert_eq!(checks.len(), 2);
    }

    #[test]
    fn hypothesis_violations_are_rejected() {
        let bad = ObstructionInstance { n: 12, t: 7, x0: RingElement::int(10), y0: RingElement::int(2), ring: Ring::Integers };
        assert!(matches!(check_obstruction(&bad, &[Ring::Integers]), Err(Error::Hypothesis(_))));
        let not_congruent = ObstructionInstance { n: 12, t: 7, x0: RingElement::int(1), y0: RingElement::int(1), ring: Ring::Integers };
        assert!(not_congruent.validate().is_err());
        let too_big = ObstructionInstance { n: 12, t: 5, x0: RingElement::int(7), y0: RingElement::int(1), ring: Ring::Integers };
        assert!(too_big.validate().is_err());
    }

    #[test]
    fn gaussian_instances_are_valid() {
        let obs = gaussian_obstruction(101, 7, 3, RingElement::new(0, 1)).unwrap();
        assert_eq!(obs.x0, RingElement::new(0, 7));
        let checks = check_obstruction(&obs, &Ring::ALL).unwrap();
        assert_eq!(checks.len(), 1);
        assert!(checks[0].holds);
    }

    /// Naive double loop over the whole box, for the completeness property.
    fn naive(n: i64, t: i64, a: i64, xb: i64, yb: i64, ring: Ring) -> Vec<Solution> {
        let r = 2 * xb.max(yb);
        let mut out = Vec::new();
        let vs: Vec<i64> = if ring == Ring::Integers { vec![0] } else { (-r..=r).collect() };
        for yu in -r..=r {
            for &yv in &vs {
                for xu in -r..=r {
                    for &xv in &vs {
                        let (x, y) = (RingElement::new(xu, xv), RingElement::new(yu, yv));
                        if ring.norm(x) > (xb * xb) as i128 || ring.norm(y) > (yb * yb) as i128 {
                            continue;
                        }
                        let ty = ring.mul(RingElement::int(t), y);
                        if RingElement::new(x.u + ty.u + a, x.v + ty.v).divisible_by(n) {
                            out.push((x, y));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn complete_against_naive(n in 2i64..200, t in 0i64..200, a in 0i64..200, xb in 0i64..7, yb in 0i64..7, ring in prop::sample::select(Ring::ALL.to_vec())) {
            let mut got = enumerate_solutions(&int(n), &int(t), &int(a), &SizeBound::from(xb as u32), &SizeBound::from(yb as u32), ring).unwrap();
            got.sort();
            prop_assert_eq!(got, naive(n, t % n, a % n, xb, yb, ring));
        }

        #[test]
        fn integer_obstructions_hold(n in 10i64..3000, y0 in 1i64..40, x0 in -1500i64..1500) {
            if let Some(obs) = integer_obstruction(n, x0, y0) {
                let checks = check_obstruction(&obs, &[Ring::Integers, Ring::Gaussian]).unwrap();
                prop_assert!(checks.iter().all(|c| c.holds), "{obs:?}: {checks:?}");
            }
        }
    }
}
