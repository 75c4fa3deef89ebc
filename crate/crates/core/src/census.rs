//! Census of census-shaped lines (d1·x + d2·y + d3)/p over the parameter set
//!
//!   S(w, z): w·3c√p/k ≤ d1 ≤ 3c√p/2,  1 ≤ d2 ≤ 3c√p/2,  0 ≤ d3 < z·p,
//!            gcd(d1, d2) = 1,
//!
//! with X = Y = c√p and k the lower-bound divisor (4 by default). Each triple
//! determines (t, a) by d1·(1, t, a) ≡ (d1, d2, d3) mod p, injectively.
//!
//! Normalised coordinates: χ1 = d1/(3c√p/2), χ2 = d2/(3c√p/2), χ3 = d3/p.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adelic::assemble;
use crate::arith::{is_prime, mod_inverse, rat, serde_str};
use crate::bound::{scaled_sqrt, SizeBound};
use crate::capacity::{census_capacity_bound, global_capacity};
use crate::error::{Error, Result};
use crate::field_model::CongruenceInstance;
use crate::interval::Interval;
use crate::lattice::{find_auxiliary_line, AuxiliaryLine, SearchBox};

pub type Triple = [i64; 3];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusParams {
    pub p: u64,
    #[serde(with = "serde_str::rational")]
    pub c: BigRational,
    #[serde(with = "serde_str::rational")]
    pub w: BigRational,
    #[serde(with = "serde_str::rational")]
    pub z: BigRational,
    /// k in the d1 lower bound w·3c√p/k.
    pub divisor: u32,
    pub sample_size: usize,
    pub seed: u64,
}

impl CensusParams {
    /// w = 1/24, z = 9c²/576, divisor 4.
    pub fn with_defaults(p: u64, c: BigRational, sample_size: usize, seed: u64) -> Self {
        let z = &c * &c * rat(9, 576);
        CensusParams { p, c, w: rat(1, 24), z, divisor: 4, sample_size, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Usage(m));
        if !is_prime(self.p) {
            return bad(format!("p = {} is not prime", self.p));
        }
        let zero = BigRational::zero();
        if self.c <= zero || self.c >= rat(2, 3) {
            return bad(format!("c = {} must lie in (0, 2/3)", self.c));
        }
        if self.w <= zero || self.w > rat(2, 1) {
            return bad(format!("w = {} must lie in (0, 2]", self.w));
        }
        if self.z < zero || self.z >= BigRational::one() {
            return bad(format!("z = {} must lie in [0, 1)", self.z));
        }
        if self.z > &self.w * &self.c * &self.c * rat(3, 1) {
            return bad(format!("z = {} exceeds 3wc²", self.z));
        }
        if self.divisor == 0 {
            return bad("divisor must be positive".into());
        }
        if &self.c * &self.c * rat(self.p as i64, 1) <= rat(1, 9) {
            return bad("c·√p must exceed 1/3".into());
        }
        Ok(())
    }

    pub fn size_bound(&self) -> SizeBound {
        scaled_sqrt(&self.c, &BigInt::from(self.p))
    }

    /// M = 3c√p/2, the scale of χ1 and χ2.
    fn m_factor(&self) -> BigRational {
        &self.c * rat(3, 2)
    }

    /// Inclusive integer ranges of d1, d2, d3.
    pub fn ranges(&self) -> Result<[(i64, i64); 3]> {
        self.validate()?;
        let m = self.m_factor();
        let lo1 = ceil_sqrt_mul(&(&self.w * &m * rat(2, self.divisor as i64)), self.p).max(1);
        let hi = floor_sqrt_mul(&m, self.p);
        let zp = &self.z * rat(self.p as i64, 1);
        let hi3 = zp.ceil().to_integer().to_i64().expect("z·p < p") - 1;
        Ok([(lo1, hi), (1, hi), (0, hi3)])
    }

    pub fn instance_for(&self, d: &Triple) -> Result<CongruenceInstance> {
        let (t, a) = lambda_map(d[0], d[1], d[2], self.p)?;
        let x = self.size_bound();
        CongruenceInstance::new(BigInt::from(self.p), BigInt::from(t), BigInt::from(a), x.clone(), x)
    }

    pub fn line_for(&self, d: &Triple) -> Result<AuxiliaryLine> {
        AuxiliaryLine::from_normalized(d.map(BigInt::from), BigInt::from(self.p), BigInt::one())
    }
}

/// floor(k·√p) for k ≥ 0.
fn floor_sqrt_mul(k: &BigRational, p: u64) -> i64 {
    let sq = k * k * rat(p as i64, 1);
    sq.floor().to_integer().sqrt().to_i64().expect("fits")
}

/// ceil(k·√p) for k ≥ 0.
fn ceil_sqrt_mul(k: &BigRational, p: u64) -> i64 {
    let sq = k * k * rat(p as i64, 1);
    let f = floor_sqrt_mul(k, p);
    if rat(f * f, 1) < sq { f + 1 } else { f }
}

/// Sub-box of normalised coordinates [lo, hi] for χ1, χ2 and [lo, hi) for χ3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiBox {
    #[serde(with = "serde_str::rational")]
    pub chi1_lo: BigRational,
    #[serde(with = "serde_str::rational")]
    pub chi1_hi: BigRational,
    #[serde(with = "serde_str::rational")]
    pub chi2_lo: BigRational,
    #[serde(with = "serde_str::rational")]
    pub chi2_hi: BigRational,
    #[serde(with = "serde_str::rational")]
    pub chi3_lo: BigRational,
    #[serde(with = "serde_str::rational")]
    pub chi3_hi: BigRational,
}

impl ChiBox {
    /// [1/24, 1/12]² × [0, z): every triple has bound ≥ 1.
    pub fn large_gamma(z: &BigRational) -> Self {
        ChiBox {
            chi1_lo: rat(1, 24),
            chi1_hi: rat(1, 12),
            chi2_lo: rat(1, 24),
            chi2_hi: rat(1, 12),
            chi3_lo: BigRational::zero(),
            chi3_hi: z.clone(),
        }
    }

    /// χ1 ∈ [w', w'(1 + e1)], χ2 ∈ [0, e2], χ3 ∈ [z(1 - e3), z) with w' the
    /// floor of χ1: the corner where the lens is empty when z is large enough.
    pub fn empty_corner(params: &CensusParams, [e1, e2, e3]: [BigRational; 3]) -> Self {
        let w_floor = &params.w * rat(2, params.divisor as i64);
        let one = BigRational::one();
        ChiBox {
            chi1_lo: w_floor.clone(),
            chi1_hi: &w_floor * (&one + e1),
            chi2_lo: BigRational::zero(),
            chi2_hi: e2,
            chi3_lo: &params.z * (&one - e3),
            chi3_hi: params.z.clone(),
        }
    }

    fn ranges(&self, params: &CensusParams) -> Result<[(i64, i64); 3]> {
        let full = params.ranges()?;
        let m = params.m_factor();
        let p = params.p;
        let pr = rat(p as i64, 1);
        let r1 = (ceil_sqrt_mul(&(&self.chi1_lo * &m), p).max(full[0].0), floor_sqrt_mul(&(&self.chi1_hi * &m), p).min(full[0].1));
        let r2 = (ceil_sqrt_mul(&(&self.chi2_lo * &m), p).max(full[1].0), floor_sqrt_mul(&(&self.chi2_hi * &m), p).min(full[1].1));
        let lo3 = (&self.chi3_lo * &pr).ceil().to_integer().to_i64().expect("fits");
        let hi3 = (&self.chi3_hi * &pr).ceil().to_integer().to_i64().expect("fits") - 1;
        Ok([r1, r2, (lo3.max(full[2].0), hi3.min(full[2].1))])
    }
}

fn count_range((lo, hi): (i64, i64)) -> u64 {
    if hi < lo { 0 } else { (hi - lo + 1) as u64 }
}

/// `size` distinct triples, uniform over the set cut out by `ranges` and
/// gcd(d1, d2) = 1, reproducible from `seed`.
fn sample_in(ranges: [(i64, i64); 3], size: usize, seed: u64) -> Result<Vec<Triple>> {
    let coprime: Vec<(i64, i64)> = (ranges[0].0..=ranges[0].1)
        .flat_map(|d1| (ranges[1].0..=ranges[1].1).map(move |d2| (d1, d2)))
        .filter(|&(d1, d2)| d1.gcd(&d2) == 1)
        .collect();
    let n3 = count_range(ranges[2]);
    let total = coprime.len() as u64 * n3;
    if total == 0 {
        return Err(Error::EmptyParameterSet(format!("no triples in d1 ∈ {:?}, d2 ∈ {:?}, d3 ∈ {:?}", ranges[0], ranges[1], ranges[2])));
    }
    if size as u64 > total {
        return Err(Error::Usage(format!("asked for {size} distinct triples, the set has {total}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decode = |i: u64| {
        let (d1, d2) = coprime[(i / n3) as usize];
        [d1, d2, ranges[2].0 + (i % n3) as i64]
    };
    if total <= 1 << 24 {
        return Ok(sample_indices(&mut rng, total as usize, size).into_iter().map(|i| decode(i as u64)).collect());
    }
    let mut seen = HashSet::with_capacity(size);
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let i = rng.random_range(0..total);
        if seen.insert(i) {
            out.push(decode(i));
        }
    }
    Ok(out)
}

pub fn sample_triples(params: &CensusParams) -> Result<Vec<Triple>> {
    sample_in(params.ranges()?, params.sample_size, params.seed)
}

/// Every triple of S(w, z) in the box, ordered by (d1, d2, d3).
pub fn box_triples(params: &CensusParams, chi: &ChiBox) -> Result<Vec<Triple>> {
    let r = chi.ranges(params)?;
    Ok((r[0].0..=r[0].1)
        .flat_map(|d1| (r[1].0..=r[1].1).map(move |d2| (d1, d2)))
        .filter(|&(d1, d2)| d1.gcd(&d2) == 1)
        .flat_map(|(d1, d2)| (r[2].0..=r[2].1).map(move |d3| [d1, d2, d3]))
        .collect())
}

pub fn sample_box(params: &CensusParams, chi: &ChiBox, size: usize) -> Result<Vec<Triple>> {
    sample_in(chi.ranges(params)?, size, params.seed)
}

/// (t, a) with d1·(1, t, a) ≡ (d1, d2, d3) mod p, least nonnegative.
pub fn lambda_map(d1: i64, d2: i64, d3: i64, p: u64) -> Result<(i64, i64)> {
    let pb = BigInt::from(p);
    let inv = mod_inverse(&BigInt::from(d1), &pb)?;
    let t = (BigInt::from(d2) * &inv).mod_floor(&pb);
    let a = (BigInt::from(d3) * &inv).mod_floor(&pb);
    Ok((t.to_i64().expect("below p"), a.to_i64().expect("below p")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RoundTrip {
    Recovered,
    /// No admissible line in the search box.
    NotFound,
    Different { line: Box<AuxiliaryLine> },
}

pub fn roundtrip(d: &Triple, params: &CensusParams) -> Result<RoundTrip> {
    let inst = params.instance_for(d)?;
    match find_auxiliary_line(&inst, &SearchBox::optimal(&inst)) {
        Ok(line) if line.d == d.map(BigInt::from) => Ok(RoundTrip::Recovered),
        Ok(line) => Ok(RoundTrip::Different { line: Box::new(line) }),
        Err(Error::NotFound) => Ok(RoundTrip::NotFound),
        Err(e) => Err(e),
    }
}

/// Does the line search on λ(d) return exactly (d1, d2, d3)?
pub fn roundtrip_uniqueness(d: &Triple, params: &CensusParams) -> bool {
    matches!(roundtrip(d, params), Ok(RoundTrip::Recovered))
}

/// The census line meets the coefficient bounds of the default search box:
/// 9c²·d_i² < p for i = 1, 2 (d3 < p/3 holds on all of S(w, z) once z < 1/3).
pub fn in_search_box(d: &Triple, params: &CensusParams) -> bool {
    let lim = &params.c * &params.c * rat(9, 1);
    d[..2].iter().all(|&di| &lim * rat(di * di, 1) < rat(params.p as i64, 1)) && rat(3 * d[2], 1) < rat(params.p as i64, 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaClass {
    GammaGtOne,
    GammaZero,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub d1: i64,
    pub d2: i64,
    pub d3: i64,
    pub t: i64,
    pub a: i64,
    pub delta1: Interval,
    pub delta2: Interval,
    pub bound: Interval,
    pub gamma_interval: Interval,
    #[serde(with = "serde_str::rational")]
    pub finite_product: BigRational,
    pub class: GammaClass,
}

impl CensusRecord {
    pub const CSV_HEADER: &'static str =
        "d1,d2,d3,t,a,delta1_lo,delta1_hi,delta2_lo,delta2_hi,bound_lo,bound_hi,gamma_lo,gamma_hi,class";

    pub fn to_csv(&self) -> String {
        let class = match self.class {
            GammaClass::GammaGtOne => "gamma_gt_one",
            GammaClass::GammaZero => "gamma_zero",
            GammaClass::Other => "other",
        };
        format!(
            "{},{},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{class}",
            self.d1,
            self.d2,
            self.d3,
            self.t,
            self.a,
            self.delta1.lo,
            self.delta1.hi,
            self.delta2.lo,
            self.delta2.hi,
            self.bound.lo,
            self.bound.hi,
            self.gamma_interval.lo,
            self.gamma_interval.hi
        )
    }
}

/// Census bound and full global capacity of one triple.
pub fn census_record(d: &Triple, params: &CensusParams) -> Result<CensusRecord> {
    let inst = params.instance_for(d)?;
    let line = params.line_for(d)?;
    let set = assemble(&line, &inst)?;
    let report = global_capacity(&set)?;
    let [d1, d2, d3] = *d;
    let cb = census_capacity_bound(&BigInt::from(d1), &BigInt::from(d2), &BigInt::from(d3), &BigInt::from(params.p), &params.c)?;
    let gamma = report.global;
    let class = if report.global_exact.as_ref().is_some_and(SizeBound::is_zero) {
        GammaClass::GammaZero
    } else if gamma.lo > 1.0 || cb.lower_bound.lo > 1.0 {
        GammaClass::GammaGtOne
    } else {
        GammaClass::Other
    };
    Ok(CensusRecord {
        d1,
        d2,
        d3,
        t: inst.t.to_i64().expect("below p"),
        a: inst.a.to_i64().expect("below p"),
        delta1: cb.delta1,
        delta2: cb.delta2,
        bound: cb.lower_bound,
        gamma_interval: gamma,
        finite_product: report.finite_product,
        class,
    })
}

/// count/total with a 95% Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub count: usize,
    pub total: usize,
    pub estimate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

impl Proportion {
    pub fn new(count: usize, total: usize) -> Self {
        if total == 0 {
            return Proportion { count, total, estimate: 0.0, wilson_lo: 0.0, wilson_hi: 1.0 };
        }
        let n = total as f64;
        let ph = count as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (ph + z2 / (2.0 * n)) / denom;
        let half = Z95 * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        // A zero count has lower limit exactly 0; rounding must not lift it.
        let lo = if count == 0 { 0.0 } else { (centre - half).max(0.0) };
        let hi = if count == total { 1.0 } else { (centre + half).min(1.0) };
        Proportion { count, total, estimate: ph, wilson_lo: lo, wilson_hi: hi }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub params: CensusParams,
    pub fraction_gamma_gt_1: Proportion,
    pub fraction_gamma_zero: Proportion,
    pub fraction_other: Proportion,
    /// No two sampled triples share (t, a).
    pub lambda_injective: bool,
    /// Every record has bound.lo ≤ gamma_interval.hi.
    pub bound_below_gamma: bool,
    pub records: Vec<CensusRecord>,
}

pub fn run_census(params: &CensusParams) -> Result<CensusReport> {
    let triples = sample_triples(params)?;
    census_of(params, &triples)
}

/// Tallies for an explicit batch of triples, in the given order.
pub fn census_of(params: &CensusParams, triples: &[Triple]) -> Result<CensusReport> {
    params.validate()?;
    let records: Vec<CensusRecord> = triples.par_iter().map(|d| census_record(d, params)).collect::<Result<_>>()?;
    let mut seen = HashSet::with_capacity(records.len());
    let distinct: HashSet<Triple> = triples.iter().copied().collect();
    let lambda_injective = records.iter().filter(|r| seen.insert((r.t, r.a))).count() == distinct.len();
    let bound_below_gamma = records.iter().all(|r| r.bound.lo <= r.gamma_interval.hi);
    let total = records.len();
    let count = |c: GammaClass| records.iter().filter(|r| r.class == c).count();
    Ok(CensusReport {
        params: params.clone(),
        fraction_gamma_gt_1: Proportion::new(count(GammaClass::GammaGtOne), total),
        fraction_gamma_zero: Proportion::new(count(GammaClass::GammaZero), total),
        fraction_other: Proportion::new(count(GammaClass::Other), total),
        lambda_injective,
        bound_below_gamma,
        records,
    })
}

/// Is d ∈ S(w, z)?
pub fn in_parameter_set(d: &Triple, params: &CensusParams) -> Result<bool> {
    let r = params.ranges()?;
    Ok(d.iter().zip(r).all(|(&v, (lo, hi))| lo <= v && v <= hi) && d[0].gcd(&d[1]) == 1)
}
