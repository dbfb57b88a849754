//! Generate a problem matrix and write it in the dense text format.

use crate::common::ProblemArgs;
use crate::matrix_io::write_matrix;
use anyhow::Context;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(args: &GenArgs) -> anyhow::Result<i32> {
    let problem = args.problem.build()?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;
    let path = args.out.join(format!("matrix_seed{}.txt", problem.seed));
    write_matrix(&path, &problem.a)?;
    println!(
        "wrote {} (n={}, k={}, delta={}, gamma={})",
        path.display(),
        problem.data.n(),
        problem.data.k(),
        problem.data.delta(),
        problem.data.gamma()
    );
    Ok(0)
}
