//! Independent numerical estimate of the transfinite diameter.
//!
//! d_N = max ∏_{i<j} |z_i - z_j|^{2/(N(N-1))} over N points of the set
//! decreases to γ∞. Points are chosen greedily (each new point maximises its
//! product of distances to the ones already chosen) from a fine discretisation
//! of the boundary, which carries the extremal configurations. The greedy
//! sequence is nested, so one run gives d_n for every prefix n ≤ N.
//!
//! For N equally spaced points on a circle of radius ρ the product is exactly
//! ρ·N^{1/(N-1)}; `estimate` divides that finite-N factor out, `raw` does not.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_BOUNDARY_POINTS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaneSet {
    Empty,
    Disk { center: f64, radius: f64 },
    /// D(0, r) ∩ D(1, s).
    Lens { r: f64, s: f64 },
    Segment { a: f64, b: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeketeEstimate {
    pub n: usize,
    pub raw: f64,
    pub estimate: f64,
    /// (n, estimate) for a few prefixes of the greedy sequence.
    pub trend: Vec<(usize, f64)>,
}

pub fn fekete_oracle(set: &PlaneSet, n: usize) -> Result<FeketeEstimate> {
    fekete_oracle_with(set, n, DEFAULT_BOUNDARY_POINTS)
}

pub fn fekete_oracle_with(set: &PlaneSet, n: usize, m: usize) -> Result<FeketeEstimate> {
    if n < 10 {
        return Err(Error::Usage(format!("need at least 10 Fekete points, got {n}")));
    }
    let Some(z) = boundary(set, m.max(4 * n)) else {
        return Ok(FeketeEstimate { n, raw: 0.0, estimate: 0.0, trend: vec![(n, 0.0)] });
    };
    let sums = greedy_log_sums(&z, n);
    let at = |k: usize| {
        let raw = (2.0 * sums[k - 1] / (k * (k - 1)) as f64).exp();
        (raw, raw / (k as f64).powf(1.0 / (k - 1) as f64))
    };
    let (raw, estimate) = at(n);
    let trend = [n / 8, n / 4, n / 2, n].into_iter().filter(|&k| k >= 10).map(|k| (k, at(k).1)).collect();
    Ok(FeketeEstimate { n, raw, estimate, trend })
}

/// Cumulative Σ_{i<j<k} log|z_i - z_j| for the greedy prefix of length k.
fn greedy_log_sums(z: &[Complex64], n: usize) -> Vec<f64> {
    let mut acc: Vec<f64> = z.iter().map(|w| (w - z[0]).norm().ln()).collect();
    let mut taken = vec![false; z.len()];
    taken[0] = true;
    let mut sums = vec![0.0];
    for _ in 1..n {
        let (j, best) = acc
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        taken[j] = true;
        sums.push(sums.last().unwrap() + best);
        let zj = z[j];
        for (a, w) in acc.iter_mut().zip(z) {
            *a += (w - zj).norm().ln();
        }
    }
    sums
}

fn boundary(set: &PlaneSet, m: usize) -> Option<Vec<Complex64>> {
    match *set {
        PlaneSet::Empty => None,
        PlaneSet::Disk { center, radius } => {
            if radius <= 0.0 {
                return None;
            }
            Some(arc(Complex64::new(center, 0.0), radius, 0.0, 2.0 * PI, m))
        }
        PlaneSet::Segment { a, b } => {
            if b <= a {
                return None;
            }
            // Cosine spacing resolves the endpoint clustering of extremal points.
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            Some((0..m).map(|i| Complex64::new(mid - half * (PI * (i as f64 + 0.5) / m as f64).cos(), 0.0)).collect())
        }
        PlaneSet::Lens { r, s } => lens_boundary(r, s, m),
    }
}

fn arc(c: Complex64, rho: f64, from: f64, span: f64, m: usize) -> Vec<Complex64> {
    (0..m).map(|i| c + Complex64::from_polar(rho, from + span * (i as f64 + 0.5) / m as f64)).collect()
}

fn lens_boundary(r: f64, s: f64, m: usize) -> Option<Vec<Complex64>> {
    if r >= 1.0 + s {
        return boundary(&PlaneSet::Disk { center: 1.0, radius: s }, m);
    }
    if s >= 1.0 + r {
        return boundary(&PlaneSet::Disk { center: 0.0, radius: r }, m);
    }
    if r + s <= 1.0 {
        return None;
    }
    let xu = (1.0 + r * r - s * s) / 2.0;
    let yu = (r * r - xu * xu).max(0.0).sqrt();
    // Arc of |z| = r inside D(1, s), then the arc of |z - 1| = s inside D(0, r).
    let a0 = yu.atan2(xu);
    let a1 = yu.atan2(xu - 1.0);
    let l0 = 2.0 * a0 * r;
    let l1 = 2.0 * (PI - a1) * s;
    let m0 = ((m as f64 * l0 / (l0 + l1)) as usize).max(2);
    let m1 = m.saturating_sub(m0).max(2);
    let mut z = arc(Complex64::new(0.0, 0.0), r, -a0, 2.0 * a0, m0);
    z.extend(arc(Complex64::new(1.0, 0.0), s, a1, 2.0 * (PI - a1), m1));
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk() {
        let f = fekete_oracle(&PlaneSet::Disk { center: 0.0, radius: 1.0 }, 200).unwrap();
        assert!((f.estimate - 1.0).abs() < 2e-2, "{f:?}");
        assert!(f.raw >= f.estimate);
    }

    #[test]
    fn segment_quarter_length() {
        let f = fekete_oracle(&PlaneSet::Segment { a: -1.0, b: 1.0 }, 200).unwrap();
        assert!((f.estimate - 0.5).abs() < 2e-2, "{f:?}");
        // A thin lens around the same segment.
        let thin = fekete_oracle(&PlaneSet::Lens { r: 1.0, s: 1.0 - 1e-6 }, 100).unwrap();
        assert!(thin.estimate > 0.0);
    }

    #[test]
    fn empty_set_and_small_n() {
        assert_eq!(fekete_oracle(&PlaneSet::Empty, 50).unwrap().estimate, 0.0);
        assert_eq!(fekete_oracle(&PlaneSet::Lens { r: 0.2, s: 0.3 }, 50).unwrap().estimate, 0.0);
        assert!(fekete_oracle(&PlaneSet::Empty, 5).is_err());
    }

    #[test]
    fn trend_decreases_for_a_disk() {
        let f = fekete_oracle(&PlaneSet::Disk { center: 0.0, radius: 2.0 }, 400).unwrap();
        assert_eq!(f.trend.len(), 4);
        assert!(f.trend.iter().all(|(_, v)| (v - 2.0).abs() < 0.1));
    }
}
