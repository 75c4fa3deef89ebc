//! Fixed inputs shared by the benchmarks.

use capclass_core::arith::{int, rat, rat_int};
use capclass_core::{CongruenceInstance, SizeBound};
use num_bigint::BigInt;

/// Mersenne prime 2^e - 1 for e in {61, 89, 127}.
pub fn mersenne(e: u32) -> BigInt {
    (BigInt::from(1) << e) - 1
}

/// x + t·y + a ≡ 0 mod n with X² = Y² = n/54, half the Minkowski threshold.
pub fn instance(n: BigInt, a: i64) -> CongruenceInstance {
    // Full size, with no short relation to n.
    let t = BigInt::from(3).modpow(&BigInt::from(1_000_003), &n);
    let side = SizeBound::from_square(rat_int(&n) * rat(1, 54)).expect("positive");
    CongruenceInstance::new(n, t, int(a), side.clone(), side).expect("valid instance")
}
