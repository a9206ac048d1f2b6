//! Thread-parallel drivers over the pure core routines.

use z2lab_core::intsets::IntegerSet;
use z2lab_core::moments::{self, McAccumulator, McReport, SystemSpec};
use z2lab_core::witness::{self, AuditReport};

use crate::parallel::par_map;

/// Monte Carlo profile with shards spread over `threads` workers. Shards are
/// merged in index order, so the report does not depend on `threads`.
pub fn monte_carlo_profile(
    spec: &SystemSpec,
    samples: usize,
    seed: u64,
    threads: usize,
) -> z2lab_core::Result<McReport> {
    if samples < moments::MC_MIN_SAMPLES {
        return Err(z2lab_core::Error::InvalidParameter(
            "need at least 10^4 samples".into(),
        ));
    }
    let shards: Vec<usize> = (0..moments::mc_shard_count(samples)).collect();
    let parts = par_map(&shards, threads, |&s| {
        moments::mc_shard(spec, samples, seed, s)
    });
    let mut acc = McAccumulator::new(spec.len());
    for part in parts {
        acc.merge(&part?);
    }
    moments::mc_report(spec, &acc, seed)
}

/// Runs the converse audit on every set.
pub fn audit_many(
    sets: &[IntegerSet],
    tol: f64,
    threads: usize,
) -> Vec<z2lab_core::Result<AuditReport>> {
    par_map(sets, threads, |v| witness::converse_audit(v, tol))
}
