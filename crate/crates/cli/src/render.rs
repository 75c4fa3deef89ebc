//! Plain-text renderings of the reports.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use capclass_core::capacity::{FeketeEstimate, LensCapacity};
use capclass_core::census::CensusReport;
use capclass_core::classifier::{Certification, CertificationOutcome};
use capclass_core::interval::Interval;
use capclass_core::oracle::{ObstructionCheck, ObstructionInstance, Ring, RingElement, Solution};
use capclass_core::{CongruenceInstance, Feasibility, FieldInvariants, RunReport, SizeBound};

fn iv(i: &Interval) -> String {
    if i.lo == i.hi {
        format!("{:.12}", i.lo)
    } else {
        format!("[{:.12}, {:.12}]", i.lo, i.hi)
    }
}

fn solutions(k: usize) -> String {
    format!("{k} solution{}", if k == 1 { "" } else { "s" })
}

fn elem(e: &RingElement) -> String {
    if e.v == 0 { e.u.to_string() } else { format!("({}, {})", e.u, e.v) }
}

/// d1·x + d2·y + d3 with signs folded in and zero terms dropped.
fn linear_form(d: &[BigInt; 3]) -> String {
    let mut s = String::new();
    for (c, var) in d.iter().zip(["x", "y", ""]) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let coeff = if mag.is_one() && !var.is_empty() { String::new() } else { mag.to_string() };
        let sep = if var.is_empty() || coeff.is_empty() { "" } else { "·" };
        match (s.is_empty(), c.is_negative()) {
            (true, false) => {}
            (true, true) => s.push('-'),
            (false, false) => s.push_str(" + "),
            (false, true) => s.push_str(" - "),
        }
        let _ = write!(s, "{coeff}{sep}{var}");
    }
    if s.is_empty() { "0".into() } else { s }
}

fn instance(out: &mut String, inst: &CongruenceInstance) {
    let form = linear_form(&[BigInt::one(), inst.t.clone(), inst.a.clone()]);
    let _ = writeln!(out, "instance   {form} ≡ 0 mod {},  |x| ≤ {},  |y| ≤ {}", inst.n, inst.x_bound, inst.y_bound);
}

pub fn run_report(r: &RunReport) -> String {
    let mut out = String::new();
    instance(&mut out, &r.instance);
    let f = &r.feasibility;
    let _ = writeln!(out, "minkowski  {} (threshold {}, margin {:.6e})", if f.feasible { "guaranteed" } else { "not guaranteed" }, f.threshold, capclass_core::arith::rational_to_f64(&f.margin));
    let q = if r.line.q == 1.into() { String::new() } else { format!("{}·", r.line.q) };
    let _ = writeln!(out, "line       g1 = {q}({})/{}", linear_form(&r.line.d), r.line.n);
    for disk in &r.adelic.finite {
        match (&disk.center, disk.radius_exp) {
            (Some(c), Some(0)) => {
                let _ = writeln!(out, "  p = {:<8} D({c}, 1)", disk.p);
            }
            (Some(c), Some(k)) => {
                let _ = writeln!(out, "  p = {:<8} D({c}, {}^{k})", disk.p, disk.p);
            }
            _ => {
                let _ = writeln!(out, "  p = {:<8} empty", disk.p);
            }
        }
    }
    let a = &r.capacity.arch;
    let _ = writeln!(out, "arch       {:?}, capacity {}", a.case, iv(&a.interval));
    let _ = writeln!(out, "finite     product {}", r.capacity.finite_product);
    match &r.capacity.global_exact {
        Some(g) => {
            let _ = writeln!(out, "gamma      {} = {}", g, iv(&r.capacity.global));
        }
        None => {
            let _ = writeln!(out, "gamma      {}", iv(&r.capacity.global));
        }
    }
    let _ = writeln!(out, "verdict    {}", serde_json::to_value(r.verdict.kind).unwrap().as_str().unwrap_or_default());
    let _ = writeln!(out, "           {}", r.verdict.narrative.summary);
    for o in &r.oracle {
        let line_note = match o.all_on_line {
            Some(true) => ", all on g1",
            Some(false) => ", NOT all on g1",
            None => "",
        };
        let sols: Vec<String> = o.solutions.iter().take(12).map(|(x, y)| format!("({}, {})", elem(x), elem(y))).collect();
        let more = if o.solutions.len() > 12 { " ..." } else { "" };
        let _ = writeln!(
            out,
            "oracle     {}: {} ({} nonzero{line_note}){} {}{more}",
            o.ring,
            solutions(o.solutions.len()),
            o.nonzero,
            if o.consistent { "" } else { " INCONSISTENT" },
            sols.join(" ")
        );
    }
    if let Some(t) = &r.timing {
        let _ = writeln!(
            out,
            "timing     lattice {:.2} ms, adelic {:.2} ms, capacity {:.2} ms, oracle {:.2} ms, total {:.2} ms",
            t.lattice_ms, t.adelic_ms, t.capacity_ms, t.oracle_ms, t.total_ms
        );
    }
    out
}

pub fn not_found_guidance(inst: &CongruenceInstance, f: &Feasibility) -> String {
    format!(
        "no auxiliary line with |b1| < 1/(3X), |b2| < 1/(3Y), |b3| < 1/3 exists for n = {}; \
         Minkowski guarantees one only when (XY)^deg < {} and here the margin is {:.6e}; shrink X or Y",
        inst.n,
        f.threshold,
        capclass_core::arith::rational_to_f64(&f.margin)
    )
}

pub fn certification(c: &Certification) -> String {
    let mut out = String::new();
    let r = &c.reduction;
    let _ = writeln!(out, "reduction  c0⁻¹ = {}, t = {}, a = {}", r.c0_inv, r.t, r.a);
    if r.inhomogeneous.is_none() {
        let _ = writeln!(out, "           X/2 ≤ 1/3: only the homogeneous instance is formed");
    }
    out += &run_report(&c.evidence);
    let outcome = match c.outcome {
        CertificationOutcome::AtMostOne => "AT_MOST_ONE: the samples determine at most one secret mod n",
        CertificationOutcome::Inconclusive => "INCONCLUSIVE: γ < 1 is not certified for the homogeneous instance",
    };
    let _ = writeln!(out, "secret     {outcome}");
    out
}

pub fn census(r: &CensusReport) -> String {
    let mut out = String::new();
    let p = &r.params;
    let _ = writeln!(out, "census     p = {}, c = {}, w = {}, z = {}, divisor {}, {} samples, seed {}", p.p, p.c, p.w, p.z, p.divisor, r.records.len(), p.seed);
    for (name, f) in [("gamma > 1", &r.fraction_gamma_gt_1), ("gamma = 0", &r.fraction_gamma_zero), ("other", &r.fraction_other)] {
        let _ = writeln!(out, "  {name:<10} {:>7} / {:<7} = {:.5}  (95% Wilson [{:.5}, {:.5}])", f.count, f.total, f.estimate, f.wilson_lo, f.wilson_hi);
    }
    let _ = writeln!(out, "  lambda injective on the batch: {}", r.lambda_injective);
    let _ = writeln!(out, "  census bound never exceeds gamma: {}", r.bound_below_gamma);
    out
}

pub fn search(results: &[(Ring, Vec<Solution>)]) -> String {
    let mut out = String::new();
    for (ring, sols) in results {
        let _ = writeln!(out, "{ring}: {}", solutions(sols.len()));
        for (x, y) in sols {
            let _ = writeln!(out, "  x = {}, y = {}", elem(x), elem(y));
        }
    }
    out
}

pub fn obstruction(obs: &ObstructionInstance, checks: &[ObstructionCheck]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "obstruction  x0 = {}, y0 = {}, t = {}, n = {} in {}", elem(&obs.x0), elem(&obs.y0), obs.t, obs.n, obs.ring);
    for c in checks {
        let status = if c.holds { "holds" } else { "FAILS" };
        let _ = write!(out, "  {}: {status}", c.ring);
        if let Some((x, y)) = c.counterexamples.first() {
            let _ = write!(out, " (smaller solution x = {}, y = {})", elem(x), elem(y));
        }
        out.push('\n');
    }
    out
}

pub fn capacity(r: &SizeBound, s: &SizeBound, lc: &LensCapacity, oracle: Option<&FeketeEstimate>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "lens       D(0, {r}) ∩ D(1, {s}): {:?}", lc.case);
    match &lc.exact {
        Some(v) => {
            let _ = writeln!(out, "capacity   {v} = {}", iv(&lc.interval));
        }
        None => {
            let _ = writeln!(out, "capacity   {}", iv(&lc.interval));
        }
    }
    if let Some(f) = oracle {
        let _ = writeln!(out, "fekete     N = {}: {:.6} (raw {:.6})", f.n, f.estimate, f.raw);
    }
    out
}

pub fn bound(field: &FieldInvariants, x: &SizeBound, y: &SizeBound, f: &Feasibility) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "field      degree {}, r1 = {}, r2 = {}, |D| = {}, norm {}",
        field.degree, field.r1, field.r2, field.abs_discriminant, field.ideal_norm
    );
    let _ = writeln!(out, "bounds     X = {x}, Y = {y}");
    let _ = writeln!(out, "threshold  {} ≈ {:.6e}", f.threshold, capclass_core::arith::rational_to_f64(&f.threshold));
    let _ = writeln!(out, "feasible   {} (margin {:.6e})", f.feasible, capclass_core::arith::rational_to_f64(&f.margin));
    out
}
