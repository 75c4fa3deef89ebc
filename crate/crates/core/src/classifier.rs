//! Verdicts from the global capacity, and the hidden-number-problem reduction
//! built on them.
//!
//! γ < 1 means only finitely many algebraic integer pairs satisfy every local
//! condition, so a second independent auxiliary polynomial exists; γ > 1
//! means infinitely many do, and every further auxiliary polynomial is a
//! multiple of the first. An interval containing 1 decides neither.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inverse, residue, serde_str};
use crate::bound::SizeBound;
use crate::capacity::{ArchCase, CapacityReport};
use crate::error::{Error, Result};
use crate::field_model::CongruenceInstance;
use crate::interval::Interval;
use crate::lattice::AuxiliaryLine;
use crate::pipeline::{analyze, AnalyzeOptions, RunReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    MethodCanSucceed,
    MethodCannotSucceed,
    Boundary,
}

impl VerdictKind {
    pub fn is_definite(self) -> bool {
        self != VerdictKind::Boundary
    }
}

/// The position of `gamma` relative to 1. Only strict separation is definite.
pub fn verdict_kind(gamma: &Interval) -> VerdictKind {
    if gamma.hi < 1.0 {
        VerdictKind::MethodCanSucceed
    } else if gamma.lo > 1.0 {
        VerdictKind::MethodCannotSucceed
    } else {
        VerdictKind::Boundary
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Narrative {
    #[serde(with = "serde_str::rational")]
    pub finite_product: BigRational,
    pub arch_case: ArchCase,
    pub arch_interval: Interval,
    pub global_exact: Option<SizeBound>,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub gamma_interval: Interval,
    pub line: AuxiliaryLine,
    pub narrative: Narrative,
}

pub fn classify(report: &CapacityReport, line: &AuxiliaryLine) -> Verdict {
    let g = report.global;
    let kind = verdict_kind(&g);
    let summary = match kind {
        VerdictKind::MethodCanSucceed => format!(
            "gamma <= {:.6e} < 1: finitely many pairs meet every local condition, so a second independent auxiliary polynomial exists",
            g.hi
        ),
        VerdictKind::MethodCannotSucceed => format!(
            "gamma >= {:.6e} > 1: infinitely many pairs meet every local condition, so every auxiliary polynomial is a multiple of g1",
            g.lo
        ),
        VerdictKind::Boundary => format!("gamma in [{:.6e}, {:.6e}] contains 1: neither alternative is certified", g.lo, g.hi),
    };
    Verdict {
        kind,
        gamma_interval: g,
        line: line.clone(),
        narrative: Narrative {
            finite_product: report.finite_product.clone(),
            arch_case: report.arch.case,
            arch_interval: report.arch.interval,
            global_exact: report.global_exact.clone(),
            summary,
        },
    }
}

/// One sample d ≈ c·s mod n, with d = c·s - x for an unknown error x.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnpSample {
    #[serde(with = "serde_str::bigint")]
    pub c: BigInt,
    #[serde(with = "serde_str::bigint")]
    pub d: BigInt,
}

/// Two samples whose errors satisfy |x_i| ≤ X/2; c0 and c1 must be units mod n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnpSamples {
    #[serde(with = "serde_str::bigint")]
    pub n: BigInt,
    pub samples: [HnpSample; 2],
    #[serde(rename = "X")]
    pub x_bound: SizeBound,
}

impl HnpSamples {
    pub fn new(n: BigInt, (c0, d0): (BigInt, BigInt), (c1, d1): (BigInt, BigInt), x_bound: SizeBound) -> Self {
        HnpSamples { n, samples: [HnpSample { c: c0, d: d0 }, HnpSample { c: c1, d: d1 }], x_bound }
    }

    /// The error x = c·s - d of each sample for a candidate secret, centred in (-n/2, n/2].
    pub fn errors(&self, s: &BigInt) -> [BigInt; 2] {
        self.samples.clone().map(|smp| centred(&(smp.c * s - smp.d), &self.n))
    }
}

fn centred(v: &BigInt, n: &BigInt) -> BigInt {
    let r = residue(v, n);
    if &r * 2 > *n { r - n } else { r }
}

/// x1 + t·x0 + a ≡ 0 mod n, derived from s ≡ c0⁻¹(x0 + d0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnpReduction {
    #[serde(with = "serde_str::bigint")]
    pub c0_inv: BigInt,
    #[serde(with = "serde_str::bigint")]
    pub t: BigInt,
    #[serde(with = "serde_str::bigint")]
    pub a: BigInt,
    /// (t, a) with bounds X/2; absent when X/2 ≤ 1/3.
    pub inhomogeneous: Option<CongruenceInstance>,
    /// (t, 0) with bounds X.
    pub homogeneous: CongruenceInstance,
}

pub fn hnp_reduce(samples: &HnpSamples) -> Result<HnpReduction> {
    let n = &samples.n;
    let [s0, s1] = &samples.samples;
    let c0_inv = mod_inverse(&s0.c, n)?;
    // t = -c1/c0 must be a unit for the instance to be well posed.
    mod_inverse(&s1.c, n)?;
    let k = &s1.c * &c0_inv;
    let t = residue(&-&k, n);
    let a = residue(&(&s1.d - &k * &s0.d), n);
    let x = &samples.x_bound;
    let half = x.half();
    let inhomogeneous = match CongruenceInstance::new(n.clone(), t.clone(), a.clone(), half.clone(), half) {
        Ok(inst) => Some(inst),
        Err(Error::YTooSmall(_)) => None,
        Err(e) => return Err(e),
    };
    let homogeneous = CongruenceInstance::new(n.clone(), t.clone(), BigInt::zero(), x.clone(), x.clone())?;
    Ok(HnpReduction { c0_inv, t, a, inhomogeneous, homogeneous })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificationOutcome {
    AtMostOne,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub outcome: CertificationOutcome,
    pub reduction: HnpReduction,
    /// The full analysis of the homogeneous instance.
    pub evidence: RunReport,
}

/// At most one secret mod n is consistent with the samples when the
/// homogeneous instance (t, 0, X, X) has γ < 1: two secrets would differ by a
/// nonzero solution of it.
pub fn certify_unique_secret(samples: &HnpSamples) -> Result<Certification> {
    certify_with(samples, &AnalyzeOptions::default())
}

pub fn certify_with(samples: &HnpSamples, opts: &AnalyzeOptions) -> Result<Certification> {
    let reduction = hnp_reduce(samples)?;
    let evidence = analyze(&reduction.homogeneous, opts)?;
    let outcome = match evidence.verdict.kind {
        VerdictKind::MethodCanSucceed => CertificationOutcome::AtMostOne,
        _ => CertificationOutcome::Inconclusive,
    };
    Ok(Certification { outcome, reduction, evidence })
}

/// Every s mod n whose induced errors satisfy |x_i| ≤ X/2, by exhaustion.
pub fn consistent_secrets(samples: &HnpSamples) -> Result<Vec<BigInt>> {
    let n = samples.n.to_u64().filter(|&n| n <= 10_000_000).ok_or_else(|| Error::Usage(format!("exhaustive secret search needs n <= 1e7, got {}", samples.n)))?;
    let x_sq = samples.x_bound.square();
    let ok = |x: &BigInt| {
        // 4x² ≤ X²
        BigRational::from_integer(x * x * 4) <= *x_sq
    };
    Ok((0..n)
        .map(BigInt::from)
        .filter(|s| samples.errors(s).iter().all(ok))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Dichotomy {
    NoSolutions,
    InfiniteOrUnknown,
}

/// For a = 0 the solutions in all algebraic integers are closed under scaling
/// by roots of unity, so finitely many means none besides (0, 0).
pub fn homogeneous_dichotomy(instance: &CongruenceInstance, verdict: &Verdict) -> Result<Dichotomy> {
    if !instance.a.is_zero() {
        return Err(Error::Usage(format!("the dichotomy needs a = 0, got a = {}", instance.a)));
    }
    Ok(match verdict.kind {
        VerdictKind::MethodCanSucceed => Dichotomy::NoSolutions,
        _ => Dichotomy::InfiniteOrUnknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::oracle::{count_solutions, Ring};
    use num_integer::Integer;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kinds_from_intervals() {
        assert_eq!(verdict_kind(&Interval::new(1.2, 1.2001)), VerdictKind::MethodCannotSucceed);
        assert_eq!(verdict_kind(&Interval::zero()), VerdictKind::MethodCanSucceed);
        assert_eq!(verdict_kind(&Interval::new(0.9999, 1.0001)), VerdictKind::Boundary);
        assert_eq!(verdict_kind(&Interval::point(1.0)), VerdictKind::Boundary);
    }

    proptest! {
        #[test]
        fn widening_never_flips(lo in 0.0f64..3.0, w in 0.0f64..1.0, dl in 0.0f64..1.0, dh in 0.0f64..1.0) {
            let narrow = verdict_kind(&Interval::new(lo, lo + w));
            let wide = verdict_kind(&Interval::new((lo - dl).max(0.0), lo + w + dh));
            prop_assert!(wide == narrow || wide == VerdictKind::Boundary);
        }
    }

    fn samples(n: i64, c0: i64, d0: i64, c1: i64, d1: i64, x: u32) -> HnpSamples {
        HnpSamples::new(int(n), (int(c0), int(d0)), (int(c1), int(d1)), SizeBound::from(x))
    }

    #[test]
    fn reduction_examples() {
        let r = hnp_reduce(&samples(101, 3, 7, 5, 11, 2)).unwrap();
        assert_eq!((r.c0_inv.clone(), r.t.clone(), r.a.clone()), (int(34), int(32), int(33)));
        assert_eq!(r.homogeneous.t, int(32));
        assert!(r.homogeneous.a.is_zero());
        let r = hnp_reduce(&samples(101, 1, 0, 9, 40, 2)).unwrap();
        assert_eq!((r.t, r.a), (int(92), int(40)));
        assert!(matches!(hnp_reduce(&samples(100, 10, 7, 3, 11, 2)), Err(Error::NotInvertible { .. })));
        assert!(matches!(hnp_reduce(&samples(100, 3, 7, 5, 11, 2)), Err(Error::NotInvertible { .. })));
        // X/2 = 1/4 is too small for the inhomogeneous instance, X = 1/3 for both.
        let r = hnp_reduce(&HnpSamples::new(int(101), (int(3), int(7)), (int(5), int(11)), "1/2".parse().unwrap())).unwrap();
        assert!(r.inhomogeneous.is_none());
        let r = hnp_reduce(&HnpSamples::new(int(101), (int(3), int(7)), (int(5), int(11)), "1/3".parse().unwrap()));
        assert!(matches!(r, Err(Error::YTooSmall(_))));
    }

    fn unit(rng: &mut ChaCha8Rng, n: i64) -> i64 {
        loop {
            let c = rng.random_range(1..n);
            if c.gcd(&n) == 1 {
                return c;
            }
        }
    }

    #[test]
    fn planted_secret_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n: i64 = rng.random_range(50..5000);
            let xb: i64 = rng.random_range(2..40);
            let s = rng.random_range(0..n);
            let c0 = unit(&mut rng, n);
            let c1 = unit(&mut rng, n);
            let (x0, x1) = (rng.random_range(-xb / 2..=xb / 2), rng.random_range(-xb / 2..=xb / 2));
            let smp = samples(n, c0, c0 * s - x0, c1, c1 * s - x1, xb as u32);
            let r = hnp_reduce(&smp).unwrap();
            assert!((int(x1) + &r.t * x0 + &r.a).is_multiple_of(&int(n)));
            assert_eq!(smp.errors(&int(s)), [int(x0), int(x1)].map(|v| centred(&v, &int(n))));
            assert!(consistent_secrets(&smp).unwrap().contains(&int(s)));
        }
    }

    #[test]
    fn certification_is_sound_at_desk_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut certified = 0;
        for _ in 0..40 {
            let n: i64 = rng.random_range(2000..20000);
            let s = rng.random_range(0..n);
            let c0 = unit(&mut rng, n);
            let c1 = unit(&mut rng, n);
            let xb = 6u32;
            let (x0, x1) = (rng.random_range(-3..=3), rng.random_range(-3..=3));
            let smp = samples(n, c0, c0 * s - x0, c1, c1 * s - x1, xb);
            let cert = match certify_unique_secret(&smp) {
                Ok(c) => c,
                Err(Error::NotFound) => continue,
                Err(e) => panic!("{e}"),
            };
            if cert.outcome == CertificationOutcome::AtMostOne {
                certified += 1;
                assert_eq!(consistent_secrets(&smp).unwrap(), vec![int(s)]);
                let d = homogeneous_dichotomy(&cert.reduction.homogeneous, &cert.evidence.verdict).unwrap();
                assert_eq!(d, Dichotomy::NoSolutions);
                let x = &cert.reduction.homogeneous.x_bound;
                for ring in [Ring::Integers, Ring::Gaussian] {
                    let c = count_solutions(&cert.reduction.t, &int(0), &int(n), x, x, ring).unwrap();
                    assert_eq!(c.nonzero, 0, "{ring} n={n}");
                }
            }
        }
        assert!(certified > 10, "only {certified} certified");
    }

    #[test]
    fn dichotomy_rejects_inhomogeneous() {
        let inst = CongruenceInstance::from_ints(101, 32, 33, SizeBound::from(2), SizeBound::from(2)).unwrap();
        let report = analyze(&inst, &AnalyzeOptions::default()).unwrap();
        assert!(matches!(homogeneous_dichotomy(&inst, &report.verdict), Err(Error::Usage(_))));
    }
}
