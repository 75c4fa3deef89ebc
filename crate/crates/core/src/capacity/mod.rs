//! Local and global capacities of an adelic set.
//!
//! A p-adic disk of radius p^k has capacity p^k. The archimedean factor is the
//! transfinite diameter of D(0, Y) ∩ D(c, ρ): after z ↦ z/c it is |c| times the
//! capacity of D(0, Y/|c|) ∩ D(1, ρ/|c|). The global capacity is the product.

pub mod fekete;
pub mod lens;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::adelic::{AdelicSet, ArchLens, PAdicDisk};
use crate::arith::{rat_int, serde_str};
use crate::bound::SizeBound;
use crate::error::{Error, Result};
use crate::interval::{default_precision, scale_interval, Ctx, Interval};

pub use fekete::{fekete_oracle, fekete_oracle_with, FeketeEstimate, PlaneSet};
pub use lens::{classify_lens, lens_capacity, lens_capacity_sq, lens_geometry, LensCapacity, LensCase, LensGeometry};

/// γ_p of a p-adic disk: its radius, or 0 when empty.
pub fn finite_capacity(disk: &PAdicDisk) -> BigRational {
    match disk.radius_exp {
        None => BigRational::zero(),
        Some(k) => {
            let p = BigRational::from_integer(BigInt::from(disk.p));
            if k >= 0 {
                num_traits::pow(p, k as usize)
            } else {
                BigRational::one() / num_traits::pow(p, (-k) as usize)
            }
        }
    }
}

/// E = ξ·(D(0, r) ∩ D(1, s)) for a real ξ ≠ 0, stored as ξ, r², s².
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedLens {
    #[serde(with = "serde_str::rational")]
    pub xi: BigRational,
    /// Rotation angle of ξ: 0 or π, as a multiple of π.
    pub rotation_pi: u8,
    #[serde(with = "serde_str::rational")]
    pub r_sq: BigRational,
    #[serde(with = "serde_str::rational")]
    pub s_sq: BigRational,
}

impl NormalizedLens {
    pub fn r(&self) -> f64 {
        lens::approx(&self.r_sq).sqrt()
    }

    pub fn s(&self) -> f64 {
        lens::approx(&self.s_sq).sqrt()
    }
}

pub fn normalize_lens(arch: &ArchLens) -> Result<NormalizedLens> {
    let (Some(c), Some(rho)) = (&arch.disk1_center, &arch.disk1_radius) else {
        return Err(Error::Usage("a degenerate lens has no second disk to normalise against".into()));
    };
    if c.is_zero() {
        return Err(Error::Usage("concentric disks have no normalisation".into()));
    }
    let c_sq = c * c;
    Ok(NormalizedLens {
        xi: c.clone(),
        rotation_pi: u8::from(c.is_negative()),
        r_sq: arch.disk0_radius.square() / &c_sq,
        s_sq: rho.square() / &c_sq,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchCase {
    /// b2 = 0 and |b3| > |b1|·X.
    DegenerateEmpty,
    /// b2 = 0 and |b3| ≤ |b1|·X: the set is D(0, Y).
    DegenerateFull,
    /// Both disks centred at 0: the smaller one.
    Concentric,
    Lens(LensCase),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchCapacity {
    pub case: ArchCase,
    pub normalized: Option<NormalizedLens>,
    /// Set when the capacity is a disk radius or 0.
    pub exact: Option<SizeBound>,
    pub interval: Interval,
}

pub fn arch_capacity(arch: &ArchLens) -> Result<ArchCapacity> {
    let exact_case = |case: ArchCase, v: SizeBound| -> Result<ArchCapacity> {
        let interval = lens::size_interval(&v)?;
        Ok(ArchCapacity { case, normalized: None, exact: Some(v), interval })
    };
    if arch.degenerate {
        return if arch.empty {
            exact_case(ArchCase::DegenerateEmpty, SizeBound::zero())
        } else {
            exact_case(ArchCase::DegenerateFull, arch.disk0_radius.clone())
        };
    }
    let rho = arch.disk1_radius.as_ref().ok_or_else(|| Error::Internal("lens without second radius".into()))?;
    if arch.disk1_center.as_ref().is_some_and(Zero::is_zero) {
        return exact_case(ArchCase::Concentric, SizeBound::min(&arch.disk0_radius, rho));
    }
    let norm = normalize_lens(arch)?;
    let scale = norm.xi.abs();
    let case = classify_lens(&norm.r_sq, &norm.s_sq);
    let (exact, interval) = match case {
        LensCase::General => (None, lens::general_interval(&norm.r_sq, &norm.s_sq, &scale)?),
        _ => {
            let v = lens_capacity_sq(&norm.r_sq, &norm.s_sq)?.exact.expect("non-general cases are exact").scale(&scale);
            let iv = lens::size_interval(&v)?;
            (Some(v), iv)
        }
    };
    Ok(ArchCapacity { case: ArchCase::Lens(case), normalized: Some(norm), exact, interval })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    /// ∏ over finite places of γ_p; every non-exceptional prime contributes 1.
    #[serde(with = "serde_str::rational")]
    pub finite_product: BigRational,
    pub arch: ArchCapacity,
    /// The global capacity, exactly, when the archimedean factor is a radius or 0.
    pub global_exact: Option<SizeBound>,
    pub global: Interval,
    pub precision_bits: usize,
}

pub fn global_capacity(set: &AdelicSet) -> Result<CapacityReport> {
    let finite_product = set.finite.iter().map(finite_capacity).fold(BigRational::one(), |a, b| a * b);
    let arch = arch_capacity(&set.arch)?;
    let global_exact = arch.exact.as_ref().map(|v| v.scale(&finite_product));
    let global = match &global_exact {
        Some(v) => lens::size_interval(v)?,
        None => scale_interval(&finite_product, &arch.interval),
    };
    Ok(CapacityReport { finite_product, arch, global_exact, global, precision_bits: default_precision() })
}

/// δ1, δ2 and the segment lower bound √p(δ2 - δ1)/(4·d1) for the census line
/// (d1·x + d2·y + d3)/p with X = Y = c·√p.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusBound {
    pub delta1: Interval,
    pub delta2: Interval,
    /// δ1 > δ2: the real slice of the archimedean set is empty and γ = 0.
    pub empty: bool,
    pub lower_bound: Interval,
}

pub fn census_capacity_bound(d1: &BigInt, d2: &BigInt, d3: &BigInt, p: &BigInt, c: &BigRational) -> Result<CensusBound> {
    if !d1.is_positive() || !d2.is_positive() || d3.is_negative() || !c.is_positive() {
        return Err(Error::Usage("census bound needs d1, d2 > 0, d3 ≥ 0 and c > 0".into()));
    }
    let (d1r, d2r, d3r, pr) = (rat_int(d1), rat_int(d2), rat_int(d3), rat_int(p));
    let d3_sq = &d3r * &d3r;
    let c2p = c * c * &pr;
    // Branches of the max/min, decided exactly through squares.
    let delta1_is_c = d2 <= d1 || d3_sq >= &c2p * (&d2r - &d1r) * (&d2r - &d1r);
    let delta2_is_c = d1 >= d2 && d3_sq <= &c2p * (&d1r - &d2r) * (&d1r - &d2r);
    let sum = &d1r + &d2r;
    let empty = d3_sq > &c2p * &sum * &sum;
    let degenerate = d3_sq == &c2p * &sum * &sum;

    let mut ctx = Ctx::with_default_precision()?;
    let sqrt_p = {
        let v = ctx.rational(&pr)?;
        ctx.sqrt(&v)?
    };
    let c_b = ctx.rational(c)?;
    let d3_b = ctx.rational(&d3r)?;
    let shift = ctx.div(&d3_b, &sqrt_p)?;
    let d1c = ctx.rational(&(&d1r * c))?;
    let d2_b = ctx.rational(&d2r)?;
    let delta1 = if delta1_is_c {
        ctx.neg(&c_b)
    } else {
        let m = ctx.neg(&d1c);
        let num = ctx.sub(&m, &shift)?;
        ctx.div(&num, &d2_b)?
    };
    let delta2 = if delta2_is_c {
        c_b.clone()
    } else {
        let num = ctx.sub(&d1c, &shift)?;
        ctx.div(&num, &d2_b)?
    };
    let lower_bound = if empty || degenerate {
        Interval::zero()
    } else {
        let width = ctx.sub(&delta2, &delta1)?;
        let top = ctx.mul(&sqrt_p, &width)?;
        let den = ctx.rational(&(rat_int(&BigInt::from(4)) * &d1r))?;
        let v = ctx.div(&top, &den)?.to_interval();
        Interval::new(v.lo.max(0.0), v.hi)
    };
    Ok(CensusBound { delta1: delta1.to_interval(), delta2: delta2.to_interval(), empty, lower_bound })
}
