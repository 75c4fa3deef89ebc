//! The rank-3 lattice of auxiliary lines and the search for a short vector in
//! the box |b1| < dx, |b2| < dy, |b3| < dc.
//!
//! Work happens on e = n·b, which is integral: the lattice n·L has basis
//! (1, t, a), (0, n, 0), (0, 0, n). LLL runs on an exactly rational scaling of
//! that basis, the unimodular transform is replayed on the exact basis, and the
//! box is enumerated exhaustively through the reduced basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, rat_int, residue, serde_str};
use crate::bound::SizeBound;
use crate::error::{Error, Result};
use crate::field_model::CongruenceInstance;

/// Upper limit on enumerated coefficient vectors.
pub const DEFAULT_SEARCH_LIMIT: f64 = 5e7;

const LLL_DELTA: (i64, i64) = (99, 100);

/// Box radii for the x-, y- and constant coefficients, stored as exact squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBox {
    pub dx: SizeBound,
    pub dy: SizeBound,
    pub dc: SizeBound,
}

impl SearchBox {
    /// (1/(3X), 1/(3Y), 1/3), the choice maximising the box volume under
    /// dx·X + dy·Y + dc = 1.
    pub fn optimal(instance: &CongruenceInstance) -> Self {
        let inv = |b: &SizeBound| SizeBound::from_square(rat(1, 9) / b.square()).expect("positive square");
        SearchBox {
            dx: inv(&instance.x_bound),
            dy: inv(&instance.y_bound),
            dc: SizeBound::from_rational(rat(1, 3)).expect("positive"),
        }
    }

    fn radii(&self) -> [&SizeBound; 3] {
        [&self.dx, &self.dy, &self.dc]
    }

    /// |e_j / n| < radius_j for each coordinate.
    pub fn contains_scaled(&self, e: &[BigInt; 3], n: &BigInt) -> bool {
        let n2 = rat_int(&(n * n));
        self.radii()
            .iter()
            .zip(e)
            .all(|(r, ej)| rat_int(&(ej * ej)) < r.square() * &n2)
    }
}

/// g1 = b1·x + b2·y + b3 with e = n·b = q·d, gcd(d) = 1 and d1 > 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LineJson", into = "LineJson")]
pub struct AuxiliaryLine {
    pub b: [BigRational; 3],
    pub d: [BigInt; 3],
    pub q: BigInt,
    pub n: BigInt,
}

#[derive(Serialize, Deserialize)]
struct LineJson {
    #[serde(with = "serde_str::bigint")]
    d1: BigInt,
    #[serde(with = "serde_str::bigint")]
    d2: BigInt,
    #[serde(with = "serde_str::bigint")]
    d3: BigInt,
    #[serde(with = "serde_str::bigint")]
    n: BigInt,
    #[serde(with = "serde_str::bigint", default = "one")]
    q: BigInt,
}

fn one() -> BigInt {
    BigInt::one()
}

impl From<AuxiliaryLine> for LineJson {
    fn from(l: AuxiliaryLine) -> Self {
        let [d1, d2, d3] = l.d;
        LineJson { d1, d2, d3, n: l.n, q: l.q }
    }
}

impl TryFrom<LineJson> for AuxiliaryLine {
    type Error = Error;

    fn try_from(j: LineJson) -> Result<Self> {
        AuxiliaryLine::from_normalized([j.d1, j.d2, j.d3], j.n, j.q)
    }
}

impl AuxiliaryLine {
    /// The line q·(d1·x + d2·y + d3)/n; `d` is normalised on the way in.
    pub fn from_normalized(d: [BigInt; 3], n: BigInt, q: BigInt) -> Result<Self> {
        if !n.is_positive() || !q.is_positive() {
            return Err(Error::InvalidInstance("line needs n > 0 and q > 0".into()));
        }
        let e = d.map(|di| di * &q);
        AuxiliaryLine::from_scaled(e, n)
    }

    /// The line with n·b = e. Fails for e = 0.
    pub fn from_scaled(e: [BigInt; 3], n: BigInt) -> Result<Self> {
        let (d, q) = normalize(&e).ok_or_else(|| Error::InvalidInstance("zero line".into()))?;
        let nr = rat_int(&n);
        let b = e.map(|ei| rat_int(&ei) / &nr);
        Ok(AuxiliaryLine { b, d, q, n })
    }

    /// e = n·b.
    pub fn scaled(&self) -> [BigInt; 3] {
        let nr = rat_int(&self.n);
        self.b.clone().map(|bi| (bi * &nr).to_integer())
    }

    /// g1(x, y), exactly.
    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        &self.b[0] * x + &self.b[1] * y + &self.b[2]
    }
}

/// (d, q) with e = sign(e1)·q·d, q = gcd(e) and d1 > 0 (or the first nonzero
/// entry positive when e1 = 0). `None` for the zero vector.
pub fn normalize(e: &[BigInt; 3]) -> Option<([BigInt; 3], BigInt)> {
    let q = e[0].gcd(&e[1]).gcd(&e[2]);
    if q.is_zero() {
        return None;
    }
    let lead = e.iter().find(|v| !v.is_zero()).expect("nonzero vector");
    let sign = if lead.is_negative() { -BigInt::one() } else { BigInt::one() };
    let d = e.clone().map(|v| v * &sign / &q);
    Some((d, q))
}

/// Rows (1/n)(1, t, a), (0, 1, 0), (0, 0, 1).
pub fn build_lattice(instance: &CongruenceInstance) -> [[BigRational; 3]; 3] {
    let n = rat_int(&instance.n);
    let z = BigRational::zero;
    [
        [BigRational::one() / &n, rat_int(&instance.t) / &n, rat_int(&instance.a) / &n],
        [z(), BigRational::one(), z()],
        [z(), z(), BigRational::one()],
    ]
}

/// |det| of the basis; 1/n for the lattice above.
pub fn covolume(basis: &[[BigRational; 3]; 3]) -> BigRational {
    det3(basis).abs()
}

fn det3<T>(m: &[[T; 3]; 3]) -> T
where
    T: Clone + std::ops::Mul<Output = T> + std::ops::Sub<Output = T> + std::ops::Add<Output = T>,
{
    let c = |i: usize, j: usize| m[i][j].clone();
    c(0, 0) * (c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1)) - c(0, 1) * (c(1, 0) * c(2, 2) - c(1, 2) * c(2, 0))
        + c(0, 2) * (c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0))
}

/// Integer basis of n·L.
fn scaled_basis(instance: &CongruenceInstance) -> [[BigInt; 3]; 3] {
    let z = BigInt::zero;
    [
        [BigInt::one(), instance.t.clone(), instance.a.clone()],
        [z(), instance.n.clone(), z()],
        [z(), z(), instance.n.clone()],
    ]
}

fn dot(a: &[BigRational; 3], b: &[BigRational; 3]) -> BigRational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn round_rational(q: &BigRational) -> BigInt {
    (q + rat(1, 2)).floor().to_integer()
}

/// Exact LLL on the rows of `m`; returns the unimodular U with U·m_in = m_out.
fn lll(m: &mut [[BigRational; 3]; 3]) -> [[BigInt; 3]; 3] {
    let delta = rat(LLL_DELTA.0, LLL_DELTA.1);
    let mut u: [[BigInt; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
    let mut k = 1;
    while k < 3 {
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(m);
            let r = round_rational(&mu[k][j]);
            if !r.is_zero() {
                let rr = rat_int(&r);
                for c in 0..3 {
                    let v = &m[j][c] * &rr;
                    m[k][c] -= v;
                    let w = &u[j][c] * &r;
                    u[k][c] -= w;
                }
            }
        }
        let (bstar, mu) = gram_schmidt(m);
        let lhs = dot(&bstar[k], &bstar[k]);
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * dot(&bstar[k - 1], &bstar[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            m.swap(k, k - 1);
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    u
}

#[allow(clippy::type_complexity)]
fn gram_schmidt(m: &[[BigRational; 3]; 3]) -> ([[BigRational; 3]; 3], [[BigRational; 3]; 3]) {
    let mut bstar = m.clone();
    let mut mu: [[BigRational; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()));
    for i in 0..3 {
        for j in 0..i {
            let bb = dot(&bstar[j], &bstar[j]);
            mu[i][j] = if bb.is_zero() { BigRational::zero() } else { dot(&m[i], &bstar[j]) / bb };
            let bj = bstar[j].clone();
            for (v, b) in bstar[i].iter_mut().zip(&bj) {
                *v -= &mu[i][j] * b;
            }
        }
    }
    (bstar, mu)
}

/// Exact inverse of a nonsingular 3x3 rational matrix.
fn inverse3(m: &[[BigRational; 3]; 3]) -> [[BigRational; 3]; 3] {
    let det = det3(m);
    let c = |i: usize, j: usize| &m[i % 3][j % 3];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            // Cofactor of (j, i), written cyclically so the sign is built in.
            (c(j + 1, i + 1) * c(j + 2, i + 2) - c(j + 1, i + 2) * c(j + 2, i + 1)) / &det
        })
    })
}

/// Key for the deterministic choice among admissible vectors.
fn tie_key(d: &[BigInt; 3], q: &BigInt) -> (BigInt, BigInt, BigInt, BigInt, BigInt, BigInt) {
    (d[0].clone(), d[1].abs(), d[2].abs(), d[1].clone(), d[2].clone(), q.clone())
}

/// All admissible e = n·b in the open box, up to sign (e1 > 0 when e1 ≠ 0),
/// together with whether some admissible vector had e1 = 0.
pub fn enumerate_box(instance: &CongruenceInstance, bx: &SearchBox, limit: f64) -> Result<(Vec<[BigInt; 3]>, bool)> {
    let n = &instance.n;
    let exact = scaled_basis(instance);
    // Radii shrink like n^(-1/2); resolve them to well beyond that.
    let bits = n.bits() as u32 + 64;
    let tiny = BigRational::new(BigInt::one(), BigInt::one() << bits);
    // Coordinates are scaled by roughly 1/radius so the box becomes a cube.
    let scale: Vec<BigRational> = bx.radii().iter().map(|r| BigRational::one() / r.lower(bits).max(tiny.clone())).collect();
    let mut m: [[BigRational; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| rat_int(&exact[i][j]) * &scale[j]));
    let u = lll(&mut m);
    let reduced: [[BigInt; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| &u[i][k] * &exact[k][j]).sum())
    });
    let inv = inverse3(&reduced.clone().map(|row| row.map(|v| rat_int(&v))));
    let limits: Vec<BigRational> = bx.radii().iter().map(|r| r.upper(bits) * rat_int(n)).collect();
    let mut cmax = [0i64; 3];
    for (i, cm) in cmax.iter_mut().enumerate() {
        let bound: BigRational = (0..3).map(|j| &limits[j] * inv[j][i].abs()).sum();
        let b = bound.floor().to_integer();
        *cm = b.to_i64().filter(|v| *v < 1 << 40).ok_or(Error::SearchTooLarge { estimate: f64::INFINITY, limit })?;
    }
    let estimate: f64 = cmax.iter().map(|c| (2 * c + 1) as f64).product();
    if estimate > limit {
        return Err(Error::SearchTooLarge { estimate, limit });
    }

    // Float prefilter in units of n; the exact test below decides.
    let nr = rat_int(n);
    let rf: Vec<[f64; 3]> = reduced.iter().map(|row| row.clone().map(|v| (rat_int(&v) / &nr).to_f64().unwrap_or(f64::NAN))).collect();
    let lf: Vec<f64> = (0..3)
        .map(|j| {
            let l = (&limits[j] / &nr).to_f64().unwrap_or(f64::INFINITY);
            let spread: f64 = (0..3).map(|k| cmax[k] as f64 * rf[k][j].abs()).sum();
            l * (1.0 + 1e-9) + spread * 1e-12
        })
        .collect();
    let mut found = Vec::new();
    let mut zero_b1 = false;
    for c0 in -cmax[0]..=cmax[0] {
        for c1 in -cmax[1]..=cmax[1] {
            let partial: [f64; 3] = std::array::from_fn(|j| c0 as f64 * rf[0][j] + c1 as f64 * rf[1][j]);
            for c2 in -cmax[2]..=cmax[2] {
                let ef: [f64; 3] = std::array::from_fn(|j| partial[j] + c2 as f64 * rf[2][j]);
                if (0..3).any(|j| ef[j].abs() > lf[j]) {
                    continue;
                }
                let c = [c0, c1, c2];
                let e: [BigInt; 3] =
                    std::array::from_fn(|j| (0..3).map(|k| BigInt::from(c[k]) * &reduced[k][j]).sum());
                if e.iter().all(Zero::is_zero) || !bx.contains_scaled(&e, n) {
                    continue;
                }
                if e[0].is_zero() {
                    zero_b1 = true;
                } else if e[0].is_positive() {
                    found.push(e);
                }
            }
        }
    }
    Ok((found, zero_b1))
}

/// The admissible line with smallest (d1, |d2|, |d3|, d2, d3, q).
pub fn find_auxiliary_line(instance: &CongruenceInstance, bx: &SearchBox) -> Result<AuxiliaryLine> {
    find_auxiliary_line_with_limit(instance, bx, DEFAULT_SEARCH_LIMIT)
}

pub fn find_auxiliary_line_with_limit(instance: &CongruenceInstance, bx: &SearchBox, limit: f64) -> Result<AuxiliaryLine> {
    let (found, zero_b1) = enumerate_box(instance, bx, limit)?;
    let best = found
        .into_iter()
        .map(|e| {
            let (d, q) = normalize(&e).expect("nonzero");
            (tie_key(&d, &q), e)
        })
        .min_by(|a, b| a.0.cmp(&b.0));
    match best {
        Some((_, e)) => AuxiliaryLine::from_scaled(e, instance.n.clone()),
        None if zero_b1 => Err(Error::DegenerateB1),
        None => Err(Error::NotFound),
    }
}

/// Checks the open bounds of the optimal box, b1 ≠ 0, integrality of n·b and
/// n·b ≡ n·b1·(1, t, a) mod n.
pub fn verify_line(instance: &CongruenceInstance, line: &AuxiliaryLine) -> bool {
    verify_line_in(instance, line, &SearchBox::optimal(instance))
}

pub fn verify_line_in(instance: &CongruenceInstance, line: &AuxiliaryLine, bx: &SearchBox) -> bool {
    let n = &instance.n;
    let nr = rat_int(n);
    let scaled: Vec<BigRational> = line.b.iter().map(|b| b * &nr).collect();
    if scaled.iter().any(|v| !v.is_integer()) || line.b[0].is_zero() {
        return false;
    }
    let e: [BigInt; 3] = std::array::from_fn(|i| scaled[i].to_integer());
    if !bx.contains_scaled(&e, n) {
        return false;
    }
    residue(&(&e[1] - &e[0] * &instance.t), n).is_zero() && residue(&(&e[2] - &e[0] * &instance.a), n).is_zero()
}
