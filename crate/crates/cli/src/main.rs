//! `capclass`: decide whether Coppersmith's method can succeed on
//! x + t·y + a ≡ 0 mod n with |x| ≤ X, |y| ≤ Y.
//!
//! Exit status: 0 for a definite verdict, 2 for BOUNDARY, 1 for any error.

mod render;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use capclass_core::arith::{parse_bigint, parse_rational};
use capclass_core::capacity::{fekete_oracle, lens_capacity_sq, PlaneSet};
use capclass_core::census::{run_census, CensusParams, CensusRecord};
use capclass_core::classifier::{certify_with, HnpSamples, VerdictKind};
use capclass_core::field_model::feasible_for;
use capclass_core::interval::PRECISION_ENV;
use capclass_core::oracle::{check_obstruction, enumerate_solutions, ObstructionInstance, Ring, RingElement};
use capclass_core::pipeline::{analyze, AnalyzeOptions};
use capclass_core::{feasible, CongruenceInstance, Error, FieldInvariants, Result, SizeBound};

#[derive(Parser)]
#[command(name = "capclass", version, about = "Capacity classification of two-variable linear congruences")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for census and search (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Working precision in bits for interval arithmetic.
    #[arg(long, global = true, env = PRECISION_ENV, hide_env_values = true)]
    precision_bits: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one instance.
    Analyze(AnalyzeArgs),
    /// Certify that two hidden-number samples determine at most one secret.
    Hnp(HnpArgs),
    /// Sample census-shaped lines and tally their capacities.
    Census(CensusArgs),
    /// Enumerate small solutions by brute force, or check an obstruction.
    Search(SearchArgs),
    /// Capacity of the lens D(0, r) ∩ D(1, s).
    Capacity(CapacityArgs),
    /// Minkowski feasibility of (X, Y) for a field and ideal norm.
    Bound(BoundArgs),
}

fn big(s: &str) -> std::result::Result<BigInt, String> {
    parse_bigint(s).map_err(|e| e.to_string())
}

fn size(s: &str) -> std::result::Result<SizeBound, String> {
    s.parse::<SizeBound>().map_err(|e| e.to_string())
}

fn ratio(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct InstanceArgs {
    /// Modulus.
    #[arg(long, value_parser = big)]
    n: Option<BigInt>,
    /// Coefficient of y, a unit mod n.
    #[arg(long, value_parser = big)]
    t: Option<BigInt>,
    /// Constant term.
    #[arg(long, value_parser = big, default_value = "0")]
    a: BigInt,
    /// Bound on |x|: "p/q", a decimal, or "sqrt(p/q)".
    #[arg(long = "X", value_parser = size)]
    x: Option<SizeBound>,
    /// Bound on |y|, which must exceed 1/3.
    #[arg(long = "Y", value_parser = size)]
    y: Option<SizeBound>,
}

impl InstanceArgs {
    fn build(&self, file: Option<&PathBuf>) -> Result<CongruenceInstance> {
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
            return Ok(serde_json::from_str(&text)?);
        }
        let need = |v: Option<&SizeBound>, name: &str| v.cloned().ok_or_else(|| Error::Usage(format!("missing --{name}")));
        let n = self.n.clone().ok_or_else(|| Error::Usage("missing --n".into()))?;
        let t = self.t.clone().ok_or_else(|| Error::Usage("missing --t".into()))?;
        CongruenceInstance::new(n, t, self.a.clone(), need(self.x.as_ref(), "X")?, need(self.y.as_ref(), "Y")?)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Instance JSON file; otherwise the instance comes from the flags.
    instance: Option<PathBuf>,
    #[command(flatten)]
    inst: InstanceArgs,
    /// Cross-check by brute-force enumeration of small solutions.
    #[arg(long)]
    check_oracle: bool,
    /// Include per-stage timings (makes the report nondeterministic).
    #[arg(long)]
    timing: bool,
    /// Maximum number of lattice coefficient vectors to enumerate.
    #[arg(long, default_value_t = capclass_core::lattice::DEFAULT_SEARCH_LIMIT)]
    search_limit: f64,
}

#[derive(Args)]
struct HnpArgs {
    /// Modulus.
    #[arg(long, value_parser = big)]
    n: BigInt,
    /// First multiplier, a unit mod n.
    #[arg(long, value_parser = big)]
    c0: BigInt,
    /// First observed value, c0·s - x0.
    #[arg(long, value_parser = big)]
    d0: BigInt,
    /// Second multiplier, a unit mod n.
    #[arg(long, value_parser = big)]
    c1: BigInt,
    /// Second observed value, c1·s - x1.
    #[arg(long, value_parser = big)]
    d1: BigInt,
    /// The sample errors satisfy |x_i| ≤ X/2.
    #[arg(long = "X", value_parser = size)]
    x: SizeBound,
    /// Include per-stage timings.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct CensusArgs {
    /// Prime modulus.
    #[arg(long)]
    p: u64,
    /// Size constant: X = Y = c·√p.
    #[arg(long, value_parser = ratio, default_value = "1/2")]
    c: BigRational,
    /// Lower end of d1 as a fraction of 3c√p/k.
    #[arg(long, value_parser = ratio, default_value = "1/24")]
    w: BigRational,
    /// Upper end of d3/p (default 9c²/576).
    #[arg(long, value_parser = ratio)]
    z: Option<BigRational>,
    /// k in the lower bound d1 ≥ w·3c√p/k.
    #[arg(long, default_value_t = 4)]
    divisor: u32,
    /// Number of distinct triples to draw.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Write one CSV row per sampled triple.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// z, z[i], z[sqrt(-2)] or z[omega].
    #[arg(long, default_value = "z")]
    ring: String,
    /// Search every supported ring.
    #[arg(long)]
    all_rings: bool,
    /// Obstruction mode: x0 as "u" or "u,v" (needs --y0, --n, --t).
    #[arg(long)]
    x0: Option<String>,
    /// Obstruction mode: y0 as "u" or "u,v".
    #[arg(long)]
    y0: Option<String>,
}

#[derive(Args)]
struct CapacityArgs {
    /// Radius of the disk about 0.
    #[arg(long, value_parser = size)]
    r: SizeBound,
    /// Radius of the disk about 1.
    #[arg(long, value_parser = size)]
    s: SizeBound,
    /// Also estimate the capacity with this many Fekete points.
    #[arg(long)]
    fekete: Option<usize>,
}

#[derive(Args)]
struct BoundArgs {
    /// Degree of the number field.
    #[arg(long, default_value_t = 1)]
    degree: u32,
    /// Number of complex places.
    #[arg(long, default_value_t = 0)]
    r2: u32,
    /// |discriminant|.
    #[arg(long, value_parser = big, default_value = "1")]
    disc: BigInt,
    /// Norm of the ideal (n over Q).
    #[arg(long, value_parser = big)]
    norm: BigInt,
    /// Bound on |x|.
    #[arg(long = "X", value_parser = size)]
    x: SizeBound,
    /// Bound on |y|.
    #[arg(long = "Y", value_parser = size)]
    y: SizeBound,
}

/// What a command produced: the text and JSON renderings and its exit status.
struct Output {
    text: String,
    json: Value,
    boundary: bool,
}

fn emit(out: &Output, json: bool) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    let body = if json { serde_json::to_string_pretty(&out.json)? } else { out.text.clone() };
    match writeln!(stdout, "{}", body.trim_end()) {
        // A closed downstream pipe (e.g. `| head`) is not an error.
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Internal(e.to_string())),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Hnp(h) => cmd_hnp(h),
        Command::Census(c) => cmd_census(c, cli.seed),
        Command::Search(s) => cmd_search(s),
        Command::Capacity(c) => cmd_capacity(c),
        Command::Bound(b) => cmd_bound(b),
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Output> {
    let inst = args.inst.build(args.instance.as_ref())?;
    let opts = AnalyzeOptions { search_box: None, search_limit: args.search_limit, check_oracle: args.check_oracle, timing: args.timing };
    let report = match analyze(&inst, &opts) {
        Ok(r) => r,
        Err(Error::NotFound) => {
            let f = feasible(&inst)?;
            return Err(Error::Usage(render::not_found_guidance(&inst, &f)));
        }
        Err(e) => return Err(e),
    };
    Ok(Output {
        text: render::run_report(&report),
        json: serde_json::to_value(&report)?,
        boundary: report.verdict.kind == VerdictKind::Boundary,
    })
}

fn cmd_hnp(args: &HnpArgs) -> Result<Output> {
    let samples = HnpSamples::new(args.n.clone(), (args.c0.clone(), args.d0.clone()), (args.c1.clone(), args.d1.clone()), args.x.clone());
    let opts = AnalyzeOptions { timing: args.timing, ..Default::default() };
    let cert = certify_with(&samples, &opts)?;
    Ok(Output {
        text: render::certification(&cert),
        json: serde_json::to_value(&cert)?,
        boundary: cert.evidence.verdict.kind == VerdictKind::Boundary,
    })
}

fn cmd_census(args: &CensusArgs, seed: u64) -> Result<Output> {
    let mut params = CensusParams::with_defaults(args.p, args.c.clone(), args.samples, seed);
    params.w = args.w.clone();
    params.divisor = args.divisor;
    if let Some(z) = &args.z {
        params.z = z.clone();
    }
    let report = run_census(&params)?;
    if let Some(path) = &args.records {
        let mut csv = String::from(CensusRecord::CSV_HEADER);
        csv.push('\n');
        for r in &report.records {
            csv += &r.to_csv();
            csv.push('\n');
        }
        fs::write(path, csv).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Output { text: render::census(&report), json: serde_json::to_value(&report)?, boundary: false })
}

fn element(s: &str) -> Result<RingElement> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<i64>().map_err(|_| Error::Parse(format!("malformed ring element {s:?}")));
    match parts.as_slice() {
        [u] => Ok(RingElement::int(num(u)?)),
        [u, v] => Ok(RingElement::new(num(u)?, num(v)?)),
        _ => Err(Error::Parse(format!("malformed ring element {s:?}"))),
    }
}

fn small_int(v: &Option<BigInt>, name: &str) -> Result<i64> {
    let v = v.as_ref().ok_or_else(|| Error::Usage(format!("missing --{name}")))?;
    i64::try_from(v).map_err(|_| Error::Usage(format!("--{name} is too large for the brute-force oracle")))
}

fn cmd_search(args: &SearchArgs) -> Result<Output> {
    let rings: Vec<Ring> = if args.all_rings { Ring::ALL.to_vec() } else { vec![args.ring.parse()?] };
    if let (Some(x0), Some(y0)) = (&args.x0, &args.y0) {
        let obs = ObstructionInstance {
            n: small_int(&args.inst.n, "n")?,
            t: small_int(&args.inst.t, "t")?,
            x0: element(x0)?,
            y0: element(y0)?,
            ring: rings[0],
        };
        let checks = check_obstruction(&obs, &rings)?;
        let json = serde_json::json!({ "instance": obs, "checks": checks });
        return Ok(Output { text: render::obstruction(&obs, &checks), json, boundary: false });
    }
    if args.x0.is_some() || args.y0.is_some() {
        return Err(Error::Usage("obstruction mode needs both --x0 and --y0".into()));
    }
    let n = args.inst.n.clone().ok_or_else(|| Error::Usage("missing --n".into()))?;
    let t = args.inst.t.clone().ok_or_else(|| Error::Usage("missing --t".into()))?;
    let x = args.inst.x.clone().ok_or_else(|| Error::Usage("missing --X".into()))?;
    let y = args.inst.y.clone().ok_or_else(|| Error::Usage("missing --Y".into()))?;
    let mut results = Vec::new();
    for ring in rings {
        let sols = enumerate_solutions(&n, &t, &args.inst.a, &x, &y, ring)?;
        results.push((ring, sols));
    }
    let json = serde_json::to_value(
        results.iter().map(|(ring, sols)| serde_json::json!({ "ring": ring, "solutions": sols })).collect::<Vec<_>>(),
    )?;
    Ok(Output { text: render::search(&results), json, boundary: false })
}

fn cmd_capacity(args: &CapacityArgs) -> Result<Output> {
    let lc = lens_capacity_sq(args.r.square(), args.s.square())?;
    let oracle = match args.fekete {
        Some(n) => Some(fekete_oracle(&PlaneSet::Lens { r: args.r.to_f64(), s: args.s.to_f64() }, n)?),
        None => None,
    };
    let json = serde_json::json!({ "r": args.r, "s": args.s, "capacity": lc, "fekete": oracle });
    Ok(Output { text: render::capacity(&args.r, &args.s, &lc, oracle.as_ref()), json, boundary: false })
}

fn cmd_bound(args: &BoundArgs) -> Result<Output> {
    if 2 * args.r2 > args.degree {
        return Err(Error::Usage(format!("r2 = {} is too large for degree {}", args.r2, args.degree)));
    }
    let field = FieldInvariants::new(args.degree, args.degree - 2 * args.r2, args.r2, args.disc.clone(), args.norm.clone())?;
    let f = feasible_for(&field, &args.x, &args.y)?;
    let json = serde_json::json!({ "field": field, "X": args.x, "Y": args.y, "feasibility": f });
    Ok(Output { text: render::bound(&field, &args.x, &args.y, &f), json, boundary: false })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(bits) = cli.precision_bits {
        // Read once by the core crate before any interval work starts.
        std::env::set_var(PRECISION_ENV, bits.to_string());
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli).and_then(|out| emit(&out, cli.json).map(|_| out.boundary)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
