//! Fixtures shared by the benchmarks.

use chainrec::random::random_relation;
use chainrec::rng::SplitMix64;
use chainrec::Relation;

/// A seeded relation on `n` points with edge density `density`.
pub fn seeded_relation(n: usize, density: f64, seed: u64) -> Relation {
    random_relation(&mut SplitMix64::new(seed), n, density)
}
