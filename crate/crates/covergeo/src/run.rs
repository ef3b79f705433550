//! Multi-threaded coverage experiments and sample-count ladders.

use covergeo_core::bounds::{invert_for_n, CoverageBound};
use covergeo_core::montecarlo::{aggregate, estimate_probability, run_trial, CoverageMode, Sampler, TrialOutcome, TrialReport};
use covergeo_core::GridSet;

use crate::config::Ladder;
use crate::error::Result;

/// Same report as [`estimate_probability`], with trials spread over
/// `threads` workers. Trial `t` always uses the same random stream, so
/// the report does not depend on the thread count.
pub fn estimate_parallel(
    e: &GridSet,
    r: f64,
    n: u64,
    trials: u64,
    seed: u64,
    mode: CoverageMode,
    bound: Option<&CoverageBound>,
    threads: usize,
) -> Result<TrialReport> {
    // The serial path validates the arguments; reuse it for the cheap and
    // degenerate cases.
    if threads <= 1 || n == 0 || trials < 2 * threads as u64 || trials > u32::MAX as u64 {
        return Ok(estimate_probability(e, r, n, trials, seed, mode, bound)?);
    }
    estimate_probability(e, r, 0, 1, seed, mode, None)?;
    let sampler = Sampler::new(e, seed)?;
    let trials = trials as u32;
    let threads = threads as u32;
    let mut outcomes: Vec<Option<TrialOutcome>> = vec![None; trials as usize];
    std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|k| {
                let sampler = &sampler;
                scope.spawn(move || {
                    (k..trials)
                        .step_by(threads as usize)
                        .map(|t| (t, run_trial(e, sampler, r, n, t, mode)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for w in workers {
            for (t, o) in w.join().expect("trial worker panicked") {
                outcomes[t as usize] = Some(o);
            }
        }
    });
    let outcomes: Vec<TrialOutcome> = outcomes.into_iter().map(|o| o.expect("every trial ran")).collect();
    Ok(aggregate(&outcomes, n, r, mode, seed, bound))
}

/// Sample counts where the bound reaches 1/2 (`N₀`), then `2N₀`, `4N₀`
/// and the count where it reaches 0.99, sorted and deduplicated.
pub fn auto_ladder(bound: &CoverageBound) -> Result<Vec<u64>> {
    let n0 = invert_for_n(bound, 0.5)?;
    let n99 = invert_for_n(bound, 0.99)?;
    let mut ns = vec![n0, 2 * n0, 4 * n0, n99];
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}

pub fn resolve_ladder(ladder: &Ladder, bound: &CoverageBound) -> Result<Vec<u64>> {
    match ladder {
        Ladder::Auto => auto_ladder(bound),
        Ladder::Explicit(ns) => Ok(ns.clone()),
    }
}
