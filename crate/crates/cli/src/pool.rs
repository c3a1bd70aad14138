//! Frame-sharded worker pool.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::CliError;

/// Run `task` for every frame on `workers` threads (0 = one per core).
///
/// Each task owns its output files, so results do not depend on scheduling.
/// After the first failure, frames not yet started are skipped; the error
/// reported is the lowest-indexed one among the frames that ran.
pub(crate) fn for_each_frame<F>(workers: usize, frames: u32, task: F) -> Result<(), CliError>
where
    F: Fn(u32) -> matrixgt::Result<()> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let failed = AtomicBool::new(false);
    let results: Vec<matrixgt::Result<()>> = pool.install(|| {
        (0..frames)
            .into_par_iter()
            .map(|i| {
                if failed.load(Ordering::Relaxed) {
                    return Ok(());
                }
                let r = task(i);
                if r.is_err() {
                    failed.store(true, Ordering::Relaxed);
                }
                r
            })
            .collect()
    });
    results.into_iter().collect::<matrixgt::Result<()>>().map_err(CliError::from)
}
