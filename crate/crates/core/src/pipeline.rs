//! The end-to-end analysis of one instance: auxiliary line, adelic set,
//! capacity, verdict, and optionally a brute-force cross-check.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::adelic::{assemble, AdelicSet};
use crate::capacity::{global_capacity, CapacityReport};
use crate::classifier::{classify, Verdict, VerdictKind};
use crate::error::Result;
use crate::field_model::{feasible, CongruenceInstance, Feasibility};
use crate::lattice::{find_auxiliary_line_with_limit, AuxiliaryLine, SearchBox, DEFAULT_SEARCH_LIMIT};
use crate::oracle::{enumerate_solutions, Ring, Solution};

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    /// Defaults to `SearchBox::optimal`.
    pub search_box: Option<SearchBox>,
    pub search_limit: f64,
    pub check_oracle: bool,
    pub timing: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { search_box: None, search_limit: DEFAULT_SEARCH_LIMIT, check_oracle: false, timing: false }
    }
}

/// Brute-force solutions in one ring. Over Z every solution must lie on g1;
/// for a = 0 and a γ < 1 verdict there must be no nonzero solution anywhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub ring: Ring,
    pub solutions: Vec<Solution>,
    pub nonzero: usize,
    /// Every solution satisfies g1 = 0; checked over Z only.
    pub all_on_line: Option<bool>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub lattice_ms: f64,
    pub adelic_ms: f64,
    pub capacity_ms: f64,
    pub oracle_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: CongruenceInstance,
    pub feasibility: Feasibility,
    pub search_box: SearchBox,
    pub line: AuxiliaryLine,
    pub adelic: AdelicSet,
    pub capacity: CapacityReport,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn oracle_consistent(&self) -> bool {
        self.oracle.iter().all(|o| o.consistent)
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn analyze(instance: &CongruenceInstance, opts: &AnalyzeOptions) -> Result<RunReport> {
    let start = Instant::now();
    let feasibility = feasible(instance)?;
    let search_box = opts.search_box.clone().unwrap_or_else(|| SearchBox::optimal(instance));

    let t = Instant::now();
    let line = find_auxiliary_line_with_limit(instance, &search_box, opts.search_limit)?;
    let lattice_ms = ms(t);

    let t = Instant::now();
    let adelic = assemble(&line, instance)?;
    let adelic_ms = ms(t);

    let t = Instant::now();
    let capacity = global_capacity(&adelic)?;
    let verdict = classify(&capacity, &line);
    let capacity_ms = ms(t);

    let t = Instant::now();
    let oracle = if opts.check_oracle { oracle_reports(instance, &line, verdict.kind)? } else { Vec::new() };
    let oracle_ms = ms(t);

    let timing = opts.timing.then(|| Timing { lattice_ms, adelic_ms, capacity_ms, oracle_ms, total_ms: ms(start) });
    Ok(RunReport { instance: instance.clone(), feasibility, search_box, line, adelic, capacity, verdict, oracle, timing })
}

fn oracle_reports(instance: &CongruenceInstance, line: &AuxiliaryLine, kind: VerdictKind) -> Result<Vec<OracleReport>> {
    let rings: &[Ring] = if instance.is_homogeneous() { &Ring::ALL } else { &[Ring::Integers] };
    let no_solutions_claimed = instance.is_homogeneous() && kind == VerdictKind::MethodCanSucceed;
    rings
        .iter()
        .map(|&ring| {
            let solutions = enumerate_solutions(&instance.n, &instance.t, &instance.a, &instance.x_bound, &instance.y_bound, ring)?;
            let nonzero = solutions.iter().filter(|(x, y)| !(x.is_zero() && y.is_zero())).count();
            let all_on_line = (ring == Ring::Integers).then(|| {
                solutions.iter().all(|(x, y)| {
                    let (x, y) = (BigRational::from_integer(x.u.into()), BigRational::from_integer(y.u.into()));
                    line.eval(&x, &y).is_zero()
                })
            });
            let consistent = all_on_line != Some(false) && !(no_solutions_claimed && nonzero > 0);
            Ok(OracleReport { ring, solutions, nonzero, all_on_line, consistent })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::SizeBound;

    #[test]
    fn small_instance_end_to_end() {
        let x: SizeBound = "0.6".parse().unwrap();
        let inst = CongruenceInstance::from_ints(12, 5, 0, x.clone(), x).unwrap();
        let opts = AnalyzeOptions { check_oracle: true, ..Default::default() };
        let r = analyze(&inst, &opts).unwrap();
        assert!(r.feasibility.feasible);
        assert_eq!(r.oracle.len(), 4);
        assert!(r.oracle_consistent());
        assert!(r.timing.is_none());
        let json = serde_json::to_string(&r).unwrap();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn solutions_lie_on_the_line() {
        let inst = CongruenceInstance::from_ints(10007, 1234, 777, SizeBound::from(15), SizeBound::from(12)).unwrap();
        let r = analyze(&inst, &AnalyzeOptions { check_oracle: true, timing: true, ..Default::default() }).unwrap();
        assert_eq!(r.oracle[0].all_on_line, Some(true));
        assert!(r.timing.is_some());
    }
}
