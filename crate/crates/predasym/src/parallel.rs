//! Rayon-parallel sweeps and ensembles.
//!
//! Results are identical to the sequential runners in the core crate for
//! any worker count.

use rayon::prelude::*;

use predasym_core::resampling::{aggregate, member, EnsembleConfig, EnsembleInput, EnsembleResult};
use predasym_core::robustness::{assemble, run_task, tasks, SweepConfig, SweepResult};

use crate::error::{Error, Result};

/// Runs `f` on a pool of `jobs` workers, or the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Invalid("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Output(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn sweep(cfg: &SweepConfig, jobs: Option<usize>) -> Result<SweepResult> {
    cfg.validate()?;
    let all = tasks(cfg);
    let outcomes = with_jobs(jobs, || all.par_iter().map(|t| run_task(cfg, t)).collect())?;
    Ok(assemble(cfg, outcomes))
}

pub fn ensemble(input: &EnsembleInput, cfg: &EnsembleConfig, jobs: Option<usize>) -> Result<EnsembleResult> {
    cfg.validate()?;
    let members: Vec<_> =
        with_jobs(jobs, || (0..cfg.segments.count).into_par_iter().map(|i| member(input, cfg, i)).collect())?;
    if let Some(Err(e)) = members.iter().all(|m| m.is_err()).then(|| members[0].clone()) {
        return Err(e.into());
    }
    Ok(aggregate(cfg, &members))
}
