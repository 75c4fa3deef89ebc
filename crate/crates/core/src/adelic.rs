//! Local constraint sets cut out by an auxiliary line: a p-adic disk at each
//! finite place and an intersection of two real-centred disks at infinity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{prime_factors, rat_int, rational_valuation, serde_str, valuation};
use crate::bound::SizeBound;
use crate::error::{Error, Result};
use crate::field_model::CongruenceInstance;
use crate::lattice::AuxiliaryLine;

/// D(center, p^radius_exp) = {y : |y - center|_p ≤ p^radius_exp}, or the empty set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicDisk {
    #[serde(with = "serde_str::prime")]
    pub p: u128,
    #[serde(with = "serde_str::opt_rational", default, skip_serializing_if = "Option::is_none")]
    pub center: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_exp: Option<i64>,
}

impl PAdicDisk {
    pub fn new(p: u128, center: BigRational, radius_exp: i64) -> Self {
        PAdicDisk { p, center: Some(center), radius_exp: Some(radius_exp) }
    }

    pub fn unit(p: u128) -> Self {
        PAdicDisk::new(p, BigRational::zero(), 0)
    }

    pub fn empty(p: u128) -> Self {
        PAdicDisk { p, center: None, radius_exp: None }
    }

    pub fn is_empty(&self) -> bool {
        self.radius_exp.is_none()
    }

    /// -v_p(x), the exponent of |x|_p; `None` for x = 0.
    fn abs_exp(p: u128, x: &BigRational) -> Option<i64> {
        rational_valuation(p, x).map(|v| -v)
    }

    pub fn contains(&self, y: &BigRational) -> bool {
        match (&self.center, self.radius_exp) {
            (Some(c), Some(k)) => PAdicDisk::abs_exp(self.p, &(y - c)).is_none_or(|e| e <= k),
            _ => false,
        }
    }

    /// Equality as sets: same radius and each centre inside the other disk.
    pub fn same_set(&self, other: &PAdicDisk) -> bool {
        if self.p != other.p {
            return false;
        }
        match (&self.center, other.radius_exp) {
            (None, _) => other.is_empty(),
            (Some(c), Some(k)) => self.radius_exp == Some(k) && other.contains(c),
            (Some(_), None) => false,
        }
    }

    /// Is `other` a subset of `self`?
    pub fn contains_disk(&self, other: &PAdicDisk) -> bool {
        match (&other.center, other.radius_exp) {
            (Some(c), Some(k)) => self.contains(c) && self.radius_exp.is_some_and(|r| k <= r),
            _ => true,
        }
    }
}

/// A local condition before intersection: a disk, everything, or nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    All,
    Empty,
    Disk(BigRational, i64),
}

/// Two p-adic disks meet iff one contains the other; the meet is the smaller one.
pub fn padic_intersect(disks: &[PAdicDisk]) -> Result<PAdicDisk> {
    let Some(first) = disks.first() else {
        return Err(Error::Usage("intersection of no disks".into()));
    };
    let p = first.p;
    if disks.iter().any(|d| d.p != p) {
        return Err(Error::Usage("disks at different primes".into()));
    }
    let mut acc = first.clone();
    for d in &disks[1..] {
        acc = intersect_two(&acc, d);
    }
    Ok(acc)
}

fn intersect_two(a: &PAdicDisk, b: &PAdicDisk) -> PAdicDisk {
    let p = a.p;
    let (Some(ca), Some(ka), Some(cb), Some(kb)) = (&a.center, a.radius_exp, &b.center, b.radius_exp) else {
        return PAdicDisk::empty(p);
    };
    let dist = PAdicDisk::abs_exp(p, &(ca - cb));
    if dist.is_some_and(|e| e > ka.max(kb)) {
        return PAdicDisk::empty(p);
    }
    if ka <= kb { a.clone() } else { b.clone() }
}

fn apply(p: u128, acc: PAdicDisk, cond: &Condition) -> PAdicDisk {
    match cond {
        Condition::All => acc,
        Condition::Empty => PAdicDisk::empty(p),
        Condition::Disk(c, k) => intersect_two(&acc, &PAdicDisk::new(p, c.clone(), *k)),
    }
}

/// The three conditions at p:
/// |y|_p ≤ 1, |b2·y + b3|_p ≤ |b1|_p and |(t - b2/b1)·y + (a - b3/b1)|_p ≤ |n|_p.
pub fn local_conditions(p: u128, line: &AuxiliaryLine, instance: &CongruenceInstance) -> [Condition; 3] {
    let [b1, b2, b3] = &line.b;
    let first = Condition::Disk(BigRational::zero(), 0);
    if b1.is_zero() {
        return [first, Condition::Empty, Condition::Empty];
    }
    let second = linear_condition(p, b2, b3, PAdicDisk::abs_exp(p, b1));
    let a_coef = rat_int(&instance.t) - b2 / b1;
    let c_coef = rat_int(&instance.a) - b3 / b1;
    let n_exp = -valuation(p, &instance.n).expect("n > 0");
    let third = linear_condition(p, &a_coef, &c_coef, Some(n_exp));
    [first, second, third]
}

/// {y : |A·y + C|_p ≤ p^bound}, where `bound = None` stands for |0|_p.
fn linear_condition(p: u128, a: &BigRational, c: &BigRational, bound: Option<i64>) -> Condition {
    let within = |e: Option<i64>| match (e, bound) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(e), Some(b)) => e <= b,
    };
    if a.is_zero() {
        return if within(PAdicDisk::abs_exp(p, c)) { Condition::All } else { Condition::Empty };
    }
    let Some(bound) = bound else {
        // |A·y + C| = 0 pins y to a point, which has no disk of positive radius.
        return Condition::Empty;
    };
    let a_exp = PAdicDisk::abs_exp(p, a).expect("nonzero");
    Condition::Disk(-c / a, bound - a_exp)
}

pub fn local_set_at(p: u128, line: &AuxiliaryLine, instance: &CongruenceInstance) -> PAdicDisk {
    local_conditions(p, line, instance)
        .iter()
        .fold(PAdicDisk::new(p, BigRational::zero(), i64::MAX / 2), |acc, c| apply(p, acc, c))
}

/// D(0, Y) ∩ D(-b3/b2, |b1/b2|·X) in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchLens {
    pub disk0_radius: SizeBound,
    #[serde(with = "serde_str::opt_rational")]
    pub disk1_center: Option<BigRational>,
    pub disk1_radius: Option<SizeBound>,
    /// b2 = 0: the second condition does not involve y.
    pub degenerate: bool,
    /// Only set for degenerate lenses whose second condition fails everywhere.
    pub empty: bool,
}

pub fn arch_set(line: &AuxiliaryLine, instance: &CongruenceInstance) -> ArchLens {
    let [b1, b2, b3] = &line.b;
    let y = instance.y_bound.clone();
    if b2.is_zero() {
        // |b3| ≤ |b1|·X, compared exactly through squares.
        let rhs = instance.x_bound.scale(b1);
        let empty = rhs.cmp_rational(&b3.abs()) == std::cmp::Ordering::Less;
        return ArchLens { disk0_radius: y, disk1_center: None, disk1_radius: None, degenerate: true, empty };
    }
    ArchLens {
        disk0_radius: y,
        disk1_center: Some(-b3 / b2),
        disk1_radius: Some(instance.x_bound.scale(&(b1 / b2))),
        degenerate: false,
        empty: false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdelicSet {
    /// Disks at the exceptional primes; every other prime carries D(0, 1).
    pub finite: Vec<PAdicDisk>,
    pub arch: ArchLens,
}

impl AdelicSet {
    pub fn disk_at(&self, p: u128) -> PAdicDisk {
        self.finite.iter().find(|d| d.p == p).cloned().unwrap_or_else(|| PAdicDisk::unit(p))
    }
}

/// Primes where the local set can differ from D(0, 1): those dividing n, d1 or d2.
pub fn exceptional_primes(line: &AuxiliaryLine, instance: &CongruenceInstance) -> Result<Vec<u128>> {
    let mut ps = BTreeMap::new();
    for v in [&instance.n, &line.d[0], &line.d[1]] {
        for p in prime_factors(v)? {
            ps.insert(p, ());
        }
    }
    Ok(ps.into_keys().collect())
}

pub fn assemble(line: &AuxiliaryLine, instance: &CongruenceInstance) -> Result<AdelicSet> {
    if line.b[0].is_zero() {
        return Err(Error::DegenerateB1);
    }
    let finite = exceptional_primes(line, instance)?
        .into_iter()
        .map(|p| local_set_at(p, line, instance))
        .collect();
    Ok(AdelicSet { finite, arch: arch_set(line, instance) })
}

/// The disk predicted for census-shaped lines (d1x + d2y + d3)/p with
/// gcd(d1, d2) = 1: D(-d3/d2, |d1|_ℓ) at every prime ℓ.
pub fn census_fast_path(ell: u128, d: &[BigInt; 3]) -> PAdicDisk {
    let k = -valuation(ell, &d[0]).expect("d1 ≠ 0");
    if k == 0 {
        return PAdicDisk::unit(ell);
    }
    PAdicDisk::new(ell, -BigRational::new(d[2].clone(), d[1].clone()), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::bound::scaled_sqrt;
    use crate::lattice::{find_auxiliary_line, SearchBox};
    use proptest::prelude::*;

    #[test]
    fn nesting_and_disjointness() {
        let d = |c: BigRational, k: i64| PAdicDisk::new(3, c, k);
        let r = padic_intersect(&[d(rat(0, 1), 0), d(rat(0, 1), -1)]).unwrap();
        assert_eq!(r, d(rat(0, 1), -1));
        assert!(padic_intersect(&[d(rat(0, 1), -1), d(rat(1, 1), -1)]).unwrap().is_empty());
        assert!(padic_intersect(&[d(rat(0, 1), 0), d(rat(1, 3), -2)]).unwrap().is_empty());
        assert!(padic_intersect(&[PAdicDisk::unit(3), PAdicDisk::unit(5)]).is_err());
    }

    /// Sampling oracle: y in 0..3^6 lies in both disks iff it lies in the meet.
    #[test]
    fn intersection_agrees_with_sampling() {
        let disks = [
            (rat(0, 1), 0),
            (rat(1, 1), -1),
            (rat(4, 1), -2),
            (rat(10, 1), -1),
            (rat(1, 2), 0),
        ];
        for (c1, k1) in &disks {
            for (c2, k2) in &disks {
                let a = PAdicDisk::new(3, c1.clone(), *k1);
                let b = PAdicDisk::new(3, c2.clone(), *k2);
                let m = padic_intersect(&[a.clone(), b.clone()]).unwrap();
                for y in 0..729 {
                    let y = rat(y, 1);
                    assert_eq!(a.contains(&y) && b.contains(&y), m.contains(&y));
                }
            }
        }
    }

    fn census_instance(d: [i64; 3], p: i64, c: BigRational) -> (CongruenceInstance, AuxiliaryLine) {
        let inv = crate::arith::mod_inverse(&int(d[0]), &int(p)).unwrap();
        let t = int(d[1]) * &inv;
        let a = int(d[2]) * &inv;
        let x = scaled_sqrt(&c, &int(p));
        let inst = CongruenceInstance::new(int(p), t, a, x.clone(), x).unwrap();
        let line = AuxiliaryLine::from_normalized(d.map(int), int(p), int(1)).unwrap();
        (inst, line)
    }

    #[test]
    fn generic_prime_gives_unit_disk() {
        let (inst, line) = census_instance([3, 5, 7], 101, rat(1, 2));
        for p in [2, 7, 11, 13] {
            assert!(local_set_at(p, &line, &inst).same_set(&PAdicDisk::unit(p)));
        }
    }

    #[test]
    fn census_disk_at_prime_of_d1() {
        let (inst, line) = census_instance([12, 5, 7], 10007, rat(1, 2));
        let d2 = local_set_at(2, &line, &inst);
        assert_eq!(d2.radius_exp, Some(-2));
        assert!(d2.same_set(&PAdicDisk::new(2, rat(-7, 5), -2)));
        let d3 = local_set_at(3, &line, &inst);
        assert_eq!(d3.radius_exp, Some(-1));
        let set = assemble(&line, &inst).unwrap();
        assert_eq!(set.finite.iter().map(|d| d.p).collect::<Vec<_>>(), vec![2, 3, 5, 10007]);
    }

    #[test]
    fn obstruction_line_has_radius_of_y0() {
        // x0 + 5·y0 ≡ 0 mod 12 with (x0, y0) = (-1, 5); the line is (y0·x - x0·y)/12.
        let inst = CongruenceInstance::from_ints(12, 5, 0, SizeBound::from(1), SizeBound::from(5)).unwrap();
        let line = AuxiliaryLine::from_scaled([int(5), int(1), int(0)], int(12)).unwrap();
        assert_eq!(local_set_at(5, &line, &inst).radius_exp, Some(-1));
        assert_eq!(local_set_at(2, &line, &inst).radius_exp, Some(0));
        assert_eq!(local_set_at(3, &line, &inst).radius_exp, Some(0));
    }

    #[test]
    fn degenerate_arch_cases() {
        let inst = CongruenceInstance::from_ints(12, 5, 0, SizeBound::from(2), SizeBound::from(1)).unwrap();
        let full = AuxiliaryLine::from_scaled([int(1), int(0), int(2)], int(12)).unwrap();
        let lens = arch_set(&full, &inst);
        assert!(lens.degenerate && !lens.empty);
        let empty = AuxiliaryLine::from_scaled([int(1), int(0), int(3)], int(12)).unwrap();
        assert!(arch_set(&empty, &inst).empty);
    }

    #[test]
    fn arch_lens_for_census_line() {
        let (inst, line) = census_instance([3, 5, 7], 101, rat(1, 2));
        let lens = arch_set(&line, &inst);
        assert_eq!(lens.disk1_center, Some(rat(-7, 5)));
        assert_eq!(lens.disk1_radius.unwrap().square(), &(rat(9, 25) * rat(101, 4)));
    }

    #[test]
    fn json_shape() {
        let set = AdelicSet { finite: vec![PAdicDisk::new(2, rat(-7, 5), -2), PAdicDisk::empty(3)], arch: ArchLens {
            disk0_radius: SizeBound::from(1),
            disk1_center: Some(rat(1, 2)),
            disk1_radius: Some(SizeBound::from(2)),
            degenerate: false,
            empty: false,
        } };
        let s = serde_json::to_string(&set).unwrap();
        assert!(s.starts_with(r#"{"finite":[{"p":"2","center":"-7/5","radius_exp":-2},{"p":"3"}]"#), "{s}");
        assert_eq!(serde_json::from_str::<AdelicSet>(&s).unwrap(), set);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Census lines agree with the fast path at every exceptional prime.
        #[test]
        fn census_lines_match_fast_path(d1 in 1i64..60, d2 in 1i64..60, d3 in 0i64..400) {
            prop_assume!(num_integer::Integer::gcd(&d1, &d2) == 1);
            let p = 10007;
            let (inst, line) = census_instance([d1, d2, d3], p, rat(1, 2));
            for ell in exceptional_primes(&line, &inst).unwrap() {
                let got = local_set_at(ell, &line, &inst);
                prop_assert!(got.same_set(&census_fast_path(ell, &line.d)), "ell={ell}: {got:?}");
            }
        }

        /// With gcd(n·b1, n) = 1 the first two conditions already imply the third.
        #[test]
        fn first_two_conditions_imply_third(n in 20i64..300, t in 1i64..300, a in 0i64..300, s in 34i64..90) {
            let x = SizeBound::from_rational(rat(s, 10)).unwrap();
            let Ok(inst) = CongruenceInstance::from_ints(n, t % n, a % n, x.clone(), x) else { return Ok(()); };
            let Ok(line) = find_auxiliary_line(&inst, &SearchBox::optimal(&inst)) else { return Ok(()); };
            // The implication needs n·b1 to be a unit wherever n is not.
            prop_assume!(num_integer::Integer::gcd(&line.scaled()[0], &inst.n) == BigInt::from(1));
            for p in exceptional_primes(&line, &inst).unwrap().into_iter().chain([2, 3, 5, 7]) {
                let [c1, c2, c3] = local_conditions(p, &line, &inst);
                let two = apply(p, apply(p, PAdicDisk::new(p, rat(0, 1), 1 << 20), &c1), &c2);
                let third = apply(p, PAdicDisk::new(p, rat(0, 1), 1 << 20), &c3);
                prop_assert!(third.contains_disk(&two) || c3 == Condition::All);
            }
        }
    }
}
