//! Shared flag groups and the solve pipeline used by `solve` and `sweep`.

use crate::matrix_io;
use crate::problem::{generate_problem, ProblemSpec, SpectrumGen, SpectrumSource};
use crate::report::{BoundChecks, RunReport};
use crate::trace_files::{self, Format, TraceMeta};
use anyhow::{anyhow, bail, Context};
use grsd_core::grassmann::GrassmannPoint;
use grsd_core::rayleigh::{SpectralData, SymmetricPSDMatrix};
use grsd_core::sampling;
use grsd_core::solvers::{
    solve_rsd, subspace_iteration, verify_contraction, SolverConfig, StepRule,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

/// Seed streams are derived from the user seed so that problem rotation,
/// initial point and gradient noise are independent but reproducible.
const SEED_INIT_OFFSET: u64 = 1;
const SEED_NOISE_OFFSET: u64 = 2;

#[derive(Clone, Debug, clap::Args)]
pub struct ProblemArgs {
    /// Ambient dimension (inferred from --spectrum or --matrix when omitted).
    #[arg(long)]
    pub n: Option<usize>,
    /// Subspace dimension.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Explicit eigenvalues, descending, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub spectrum: Option<Vec<f64>>,
    /// Spectrum generator (used when --spectrum is absent).
    #[arg(long, value_enum)]
    pub spectrum_gen: Option<SpectrumGen>,
    /// Eigengap for the clustered generator.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Conjugate by a seeded random orthogonal matrix.
    #[arg(long)]
    pub rotate: bool,
    /// Master seed for problem rotation, initialization and noise.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read A from a matrix file instead of generating it.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

impl ProblemArgs {
    pub fn build(&self) -> anyhow::Result<BuiltProblem> {
        if let Some(path) = &self.matrix {
            let a = matrix_io::read_matrix(path)?;
            let data = grsd_core::rayleigh::spectral_data(&a, self.k)?;
            return Ok(BuiltProblem {
                spectrum: data.eigenvalues.clone(),
                a,
                data,
                seed: self.seed,
                rotate: false,
            });
        }
        let n = match (self.n, &self.spectrum) {
            (Some(n), _) => n,
            (None, Some(s)) => s.len(),
            (None, None) => bail!("either --n, --spectrum or --matrix is required"),
        };
        let source = match (&self.spectrum, self.spectrum_gen) {
            (Some(s), _) => SpectrumSource::Explicit(s.clone()),
            (None, Some(gen)) => SpectrumSource::Generator {
                gen,
                delta: self.delta,
            },
            (None, None) => SpectrumSource::Generator {
                gen: SpectrumGen::Clustered,
                delta: self.delta,
            },
        };
        let spec = ProblemSpec {
            n,
            k: self.k,
            spectrum: source,
            rotate: self.rotate,
            seed: self.seed,
        };
        let spectrum = spec.resolved_spectrum()?;
        let (a, data) = generate_problem(&spec)?;
        Ok(BuiltProblem {
            a,
            data,
            spectrum,
            seed: self.seed,
            rotate: self.rotate,
        })
    }
}

pub struct BuiltProblem {
    pub a: SymmetricPSDMatrix,
    pub data: SpectralData,
    pub spectrum: Vec<f64>,
    pub seed: u64,
    pub rotate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RuleArg {
    /// a(X_t)/gamma (largest step with proved one-step contraction).
    Adaptive,
    /// cos(dist(X_0, V_alpha))/gamma, constant.
    Cos,
    /// 1/gamma (the appendix step).
    SdFixed,
    /// A fixed step given by --eta.
    Eta,
}

impl RuleArg {
    pub fn to_step_rule(self, eta: Option<f64>) -> anyhow::Result<StepRule> {
        Ok(match self {
            RuleArg::Adaptive => StepRule::AdaptiveAOverGamma,
            RuleArg::Cos => StepRule::CosD0OverGamma,
            RuleArg::SdFixed => StepRule::FixedOneOverGamma,
            RuleArg::Eta => StepRule::FixedEta(
                eta.ok_or_else(|| anyhow!("--rule eta requires --eta"))?,
            ),
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            RuleArg::Adaptive => "adaptive",
            RuleArg::Cos => "cos",
            RuleArg::SdFixed => "sd-fixed",
            RuleArg::Eta => "eta",
        }
    }

    pub fn needs_init_inside_pi2(self) -> bool {
        matches!(self, RuleArg::Adaptive | RuleArg::Cos)
    }
}

#[derive(Clone, Debug, clap::Args)]
pub struct SolveArgsCommon {
    /// Step-size rule.
    #[arg(long, value_enum, default_value_t = RuleArg::Cos)]
    pub rule: RuleArg,
    /// Fixed step size for --rule eta.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Initial intrinsic distance to V_alpha (exactly realized).
    #[arg(long, default_value_t = 0.7)]
    pub init_angle: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Stopping tolerance for both the distance and the optimality gap.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Standard deviation of Gaussian noise injected into A X in the step
    /// gradient.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    /// Output directory for traces and the report.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Exit with code 2 when a recorded bound is violated.
    #[arg(long)]
    pub enforce_bounds: bool,
    /// Store every iterate's representative next to the trace.
    #[arg(long)]
    pub store_iterates: bool,
    /// Also run the subspace-iteration baseline.
    #[arg(long)]
    pub baseline: bool,
}

/// Initial point at intrinsic distance exactly `d` from V_alpha along a
/// seeded random direction. Distances at or beyond pi/2 are spread over
/// equal principal angles, which needs k <= n/2.
pub fn initial_point(
    data: &SpectralData,
    d: f64,
    seed: u64,
) -> anyhow::Result<GrassmannPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(SEED_INIT_OFFSET));
    let v_alpha = &data.leading_block;
    if !(d >= 0.0) {
        bail!("--init-angle must be non-negative, got {d}");
    }
    if d < FRAC_PI_2 {
        return Ok(sampling::point_at_distance(v_alpha, d, &mut rng)?);
    }
    let (n, k) = (data.n(), data.k());
    let per_angle = d / (k as f64).sqrt();
    if 2 * k <= n && per_angle < FRAC_PI_2 {
        let angles = vec![per_angle; k];
        return Ok(sampling::point_at_angles(v_alpha, &angles, &mut rng)?);
    }
    bail!("cannot realize --init-angle {d} on Gr({n},{k}); largest principal angle would reach pi/2")
}

pub struct SolveOutcome {
    pub report: RunReport,
    pub pass: Option<bool>,
}

/// Runs RSD (and optionally the baseline) for one seed, writes traces, and
/// assembles the run reports.
pub fn run_solves(
    problem: &BuiltProblem,
    common: &SolveArgsCommon,
    out_dir: &Path,
) -> anyhow::Result<Vec<SolveOutcome>> {
    let rule = common.rule.to_step_rule(common.eta)?;
    if common.rule.needs_init_inside_pi2() && common.init_angle >= FRAC_PI_2 {
        bail!("initialization outside pi/2 (init-angle {} with the {} rule)",
            common.init_angle, common.rule.label());
    }
    let x0 = initial_point(&problem.data, common.init_angle, problem.seed)?;
    let cfg = SolverConfig {
        step_rule: rule,
        max_iters: common.max_iters,
        dist_tol: common.tol,
        fval_tol: common.tol,
        seed: problem.seed.wrapping_add(SEED_NOISE_OFFSET),
        noise_sigma: common.noise_sigma,
        record_bounds: true,
        store_iterates: common.store_iterates,
    };
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let mut outcomes = Vec::new();
    let trace = solve_rsd(&problem.a, problem.data.k(), &x0, &cfg)?;
    outcomes.push(emit(
        problem, common, out_dir, "rsd", &cfg, &trace, true,
    )?);
    if common.baseline {
        let trace = subspace_iteration(&problem.a, problem.data.k(), &x0, &cfg)?;
        outcomes.push(emit(
            problem, common, out_dir, "subspace", &cfg, &trace, false,
        )?);
    }
    Ok(outcomes)
}

fn emit(
    problem: &BuiltProblem,
    common: &SolveArgsCommon,
    out_dir: &Path,
    algorithm: &str,
    cfg: &SolverConfig,
    trace: &grsd_core::solvers::ConvergenceTrace,
    verify: bool,
) -> anyhow::Result<SolveOutcome> {
    let meta = TraceMeta {
        algorithm: algorithm.into(),
        n: problem.data.n(),
        k: problem.data.k(),
        spectrum: problem.spectrum.clone(),
        rotate: problem.rotate,
        seed: problem.seed,
        rule: common.rule.label().into(),
        init_angle: common.init_angle,
        max_iters: common.max_iters,
        tol: common.tol,
        noise_sigma: common.noise_sigma,
        gamma: problem.data.gamma(),
        delta: problem.data.delta(),
        f_star: problem.data.f_star,
        d0: trace.d0,
        stop: trace_files::stop_label(trace.stop).into(),
        iterations: trace.iterations(),
    };
    let stem = format!("trace_{algorithm}_seed{}", problem.seed);
    let paths = trace_files::write_trace(out_dir, &stem, &meta, trace, common.format)?;

    let bound_checks = if verify && trace.lyapunov.is_some() {
        let report = verify_contraction(trace, &problem.data, cfg)?;
        Some(BoundChecks::from(&report))
    } else {
        None
    };
    let pass = bound_checks.as_ref().map(|b| b.pass);
    let last = trace.len() - 1;
    Ok(SolveOutcome {
        report: RunReport {
            algorithm: algorithm.into(),
            seed: problem.seed,
            n: problem.data.n(),
            k: problem.data.k(),
            rule: common.rule.label().into(),
            iterations: trace.iterations(),
            final_f: trace.f[last],
            final_gap: trace.gap[last],
            final_dist: trace.dist[last],
            final_theta_max: trace.theta_max[last],
            stop: trace_files::stop_label(trace.stop).into(),
            bound_checks,
            trace_paths: paths
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
        },
        pass,
    })
}
