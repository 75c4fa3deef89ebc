//! Decides whether the auxiliary-polynomial (Coppersmith) method can succeed on
//! x + t·y + a ≡ 0 mod n with |x| ≤ X, |y| ≤ Y, by building the first auxiliary
//! line and computing the capacity of the adelic set it cuts out.
//!
//! ```
//! use capclass_core::{analyze, AnalyzeOptions, CongruenceInstance, VerdictKind};
//!
//! let inst = CongruenceInstance::from_ints(12, 7, 0, "4/5".parse()?, "1/2".parse()?)?;
//! let report = analyze(&inst, &AnalyzeOptions::default())?;
//! assert_eq!(report.verdict.kind, VerdictKind::MethodCanSucceed);
//! # Ok::<(), capclass_core::Error>(())
//! ```

pub mod adelic;
pub mod arith;
pub mod bound;
pub mod capacity;
pub mod census;
pub mod classifier;
pub mod error;
pub mod field_model;
pub mod interval;
pub mod lattice;
pub mod oracle;
pub mod pipeline;

pub use bound::SizeBound;
pub use error::{Error, Result};
pub use field_model::{feasible, minkowski_threshold, CongruenceInstance, Feasibility, FieldInvariants};
pub use interval::Interval;
pub use lattice::{build_lattice, find_auxiliary_line, verify_line, AuxiliaryLine, SearchBox};
pub use adelic::{arch_set, assemble, local_set_at, padic_intersect, AdelicSet, ArchLens, PAdicDisk};
pub use capacity::{census_capacity_bound, fekete_oracle, finite_capacity, global_capacity, lens_capacity, normalize_lens, CapacityReport};
pub use oracle::{check_obstruction, count_solutions, enumerate_solutions, ObstructionInstance, Ring, RingElement};
pub use classifier::{certify_unique_secret, classify, hnp_reduce, homogeneous_dichotomy, Certification, CertificationOutcome, Dichotomy, HnpSamples, Verdict, VerdictKind};
pub use pipeline::{analyze, AnalyzeOptions, RunReport};
pub use census::{lambda_map, roundtrip_uniqueness, run_census, sample_triples, CensusParams, CensusReport};
