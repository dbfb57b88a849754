use crate::common::{run_solves, ProblemArgs, SolveArgsCommon};
use crate::report::{write_report, ExperimentReport};

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub common: SolveArgsCommon,
}

pub fn run(args: &SolveArgs) -> anyhow::Result<i32> {
    let problem = args.problem.build()?;
    let outcomes = run_solves(&problem, &args.common, &args.common.out)?;

    let mut violated = false;
    for outcome in &outcomes {
        let r = &outcome.report;
        println!(
            "{}: n={} k={} rule={} iters={} stop={} final_dist={:.3e} final_gap={:.3e} bounds={}",
            r.algorithm,
            r.n,
            r.k,
            r.rule,
            r.iterations,
            r.stop,
            r.final_dist,
            r.final_gap,
            match outcome.pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "n/a",
            }
        );
        if outcome.pass == Some(false) {
            violated = true;
        }
    }
    let report = ExperimentReport::new(outcomes.into_iter().map(|o| o.report).collect());
    let path = write_report(&args.common.out, &report)?;
    println!("report: {}", path.display());

    if args.common.enforce_bounds && violated {
        return Ok(2);
    }
    Ok(0)
}
