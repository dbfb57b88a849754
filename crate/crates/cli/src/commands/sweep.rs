//! Seed sweeps: independent runs in a worker pool, one report at the end.

use crate::common::{run_solves, ProblemArgs, SolveArgsCommon};
use crate::report::{write_report, ExperimentReport};
use rayon::prelude::*;

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub common: SolveArgsCommon,
    /// Number of runs; seeds are seed, seed+1, ..
    #[arg(long, default_value_t = 8)]
    pub runs: usize,
}

pub fn run(args: &SweepArgs) -> anyhow::Result<i32> {
    std::fs::create_dir_all(&args.common.out)?;
    let outcomes: Vec<_> = (0..args.runs as u64)
        .into_par_iter()
        .map(|offset| {
            let mut problem_args = args.problem.clone();
            problem_args.seed = args.problem.seed.wrapping_add(offset);
            let problem = problem_args.build()?;
            run_solves(&problem, &args.common, &args.common.out)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut violated = false;
    let mut runs = Vec::new();
    for outcome in outcomes.into_iter().flatten() {
        if outcome.pass == Some(false) {
            violated = true;
        }
        runs.push(outcome.report);
    }
    runs.sort_by_key(|r| (r.seed, r.algorithm.clone()));
    for r in &runs {
        println!(
            "seed {:>4} {}: iters={} stop={} final_dist={:.3e} bounds={}",
            r.seed,
            r.algorithm,
            r.iterations,
            r.stop,
            r.final_dist,
            r.bound_checks
                .as_ref()
                .map(|b| if b.pass { "pass" } else { "FAIL" })
                .unwrap_or("n/a"),
        );
    }
    let report = ExperimentReport::new(runs);
    let path = write_report(&args.common.out, &report)?;
    println!("report: {}", path.display());

    if args.common.enforce_bounds && violated {
        return Ok(2);
    }
    Ok(0)
}
