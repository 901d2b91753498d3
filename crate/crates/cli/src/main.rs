//! `chancompat`: compatibility checks for channel-flow initial fields.
//!
//! Exit status: 0 compatible / pass, 2 incompatible / fail, 1 error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use channel_compat::compat::{self, Verdict};
use channel_compat::io::{self as cio, FieldFile};
use channel_compat::search::{self, AnsatzCoeffs, AnsatzSpec, SearchOptions, SearchSeed};
use channel_compat::spectral::{build_grid, FlowParams, DEFAULT_POINTS};
use channel_compat::{modes, oracle};

#[derive(Parser)]
#[command(name = "chancompat", version, about = "Compatibility analysis of initial fields in a periodic channel")]
struct Cli {
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a field file; writes report.json and defect CSVs.
    Check(CheckArgs),
    /// Emit the analytic incompatible example with oracle comparison and figure data.
    Example(ExampleArgs),
    /// Orr-Sommerfeld eigenmodes: mode table and a field file for one mode.
    Oss(OssArgs),
    /// Search for a compatible field with a wall-normal component.
    Find(FindArgs),
    /// Admissibility of a field file (no-slip, divergence-free).
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// Collocation points in y.
    #[arg(short, long, default_value_t = DEFAULT_POINTS)]
    n: usize,
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Reynolds number.
    #[arg(long = "re", default_value_t = 80.0)]
    reynolds: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<FlowParams> {
        Ok(FlowParams::new(self.alpha, self.beta, self.reynolds)?)
    }
}

#[derive(Args)]
struct CheckArgs {
    field: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Relative tolerance of the verdict.
    #[arg(long, default_value_t = compat::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Override the Reynolds number of the field file.
    #[arg(long = "re")]
    reynolds: Option<f64>,
}

#[derive(Args)]
struct ExampleArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = compat::DEFAULT_TOLERANCE)]
    tol: f64,
}

#[derive(Args)]
struct OssArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ParamArgs,
    /// Mode index, 0 = least damped.
    #[arg(long, default_value_t = 0)]
    mode: usize,
    /// Max-abs of the wall-normal velocity.
    #[arg(long, default_value_t = 1e-3)]
    amplitude: f64,
    /// Leave out the Poiseuille base flow.
    #[arg(long)]
    no_base: bool,
}

#[derive(Args)]
struct FindArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ParamArgs,
    /// Degree of the free polynomial factor.
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Seed of the random starting coefficients.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start from the published four-digit coefficients instead (degree 4).
    #[arg(long, conflicts_with = "seed")]
    published: bool,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Tolerance of the search and of the final check.
    #[arg(long, default_value_t = search::SEARCH_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ValidateArgs {
    field: PathBuf,
    #[arg(short, long, default_value_t = DEFAULT_POINTS)]
    n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Check(a) => cmd_check(a),
        Command::Example(a) => cmd_example(a),
        Command::Oss(a) => cmd_oss(a),
        Command::Find(a) => cmd_find(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn read_field(path: &Path) -> Result<FieldFile> {
    FieldFile::read(path).with_context(|| format!("reading {}", path.display()))
}

fn print_report(r: &compat::CompatReport) {
    let (along, across) = r.tangential.split_relative(&r.params);
    println!("verdict               {:?}", r.verdict);
    println!("defect (relative)     {:e}", r.defect_relative);
    println!("defect (max-abs)      {:e}", r.defect_norms.max_abs);
    println!("wall residual (rel.)  {:e}", r.tangential_relative);
    println!("  along wavevector    {along:e}");
    println!("  across wavevector   {across:e}");
    println!("tolerance             {:e}", r.tolerance);
}

fn cmd_check(a: CheckArgs) -> Result<bool> {
    let file = read_field(&a.field)?;
    let mut params = file.params;
    if let Some(re) = a.reynolds {
        params.reynolds = re;
    }
    let grid = build_grid(a.common.n)?;
    let u = file.to_field(&grid)?;
    let report = compat::check(&u, &params, &grid, a.tol)?;
    cio::write_check_outputs(&a.common.out, &report)?;
    print_report(&report);
    Ok(report.verdict == Verdict::Compatible)
}

#[derive(Serialize)]
struct OracleBlock {
    block: &'static str,
    max_abs_difference: f64,
    max_abs_reference: f64,
}

#[derive(Serialize)]
struct OracleComparison {
    params: FlowParams,
    grid_points: usize,
    blocks: Vec<OracleBlock>,
    /// Largest difference relative to the block's reference magnitude.
    max_relative: f64,
    /// The typeset spanwise cosine tendencies against the pipeline value.
    printed_spanwise_cosine_max: f64,
}

/// Largest discrepancy accepted for `example` to exit with 0.
const ORACLE_TOL: f64 = 1e-8;

fn cmd_example(a: ExampleArgs) -> Result<bool> {
    let params = a.params.params()?;
    let grid = build_grid(a.common.n)?;
    let out = &a.common.out;
    std::fs::create_dir_all(out)?;
    let u = oracle::example_field(&params, &grid)?;
    FieldFile::from_field(&u).write(&out.join("example_field.json"))?;

    let re = params.reynolds;
    let report = compat::check(&u, &params, &grid, a.tol)?;
    let mut blocks = Vec::new();
    let mut push = |block, pipeline: channel_compat::spectral::WaveField, closed: channel_compat::spectral::WaveField| -> Result<()> {
        blocks.push(OracleBlock {
            block,
            max_abs_difference: pipeline.sub(&closed)?.max_abs(),
            max_abs_reference: closed.max_abs(),
        });
        Ok(())
    };
    push("vorticity", channel_compat::fieldops::curl(&u), oracle::example_vorticity(&params, &grid)?)?;
    push("forcing", channel_compat::fieldops::forcing(&u, re)?, oracle::example_forcing(&params, &grid)?)?;
    push("dudt", report.dudt.clone(), oracle::example_dudt(&params, &grid)?)?;
    let dc = oracle::example_div_coeffs(&params, &grid)?;
    blocks.push(OracleBlock {
        block: "divergence",
        max_abs_difference: report.divergence_defect.sub(&dc)?.max_abs(),
        max_abs_reference: dc.max_abs(),
    });
    let cc = oracle::example_cc_coeffs(&params)?;
    let mut cc_diff: f64 = 0.0;
    let mut cc_ref: f64 = 0.0;
    for j in 0..3 {
        for (dir, vals) in [(compat::Direction::X, cc.x[j]), (compat::Direction::Z, cc.z[j])] {
            let got = report.tangential.get(compat::Wall::Top, dir, j).unwrap_or((0.0, 0.0));
            cc_diff = cc_diff.max((got.0 - vals.0).abs()).max((got.1 - vals.1).abs());
            cc_ref = cc_ref.max(vals.0.abs()).max(vals.1.abs());
        }
    }
    blocks.push(OracleBlock {
        block: "wall_residual",
        max_abs_difference: cc_diff,
        max_abs_reference: cc_ref,
    });
    let max_relative = blocks
        .iter()
        .map(|b| if b.max_abs_reference > 0.0 { b.max_abs_difference / b.max_abs_reference } else { b.max_abs_difference })
        .fold(0.0, f64::max);
    let mut printed: f64 = 0.0;
    for &y in grid.points() {
        let w = report.dudt.component(2);
        let c1 = w.harmonic(1).map_or(0.0, |h| h.cos.eval(&grid, y));
        let c2 = w.harmonic(2).map_or(0.0, |h| h.cos.eval(&grid, y));
        printed = printed
            .max((oracle::printed_a31(&params, y)? - c1).abs())
            .max((oracle::printed_a32(&params, y)? - c2).abs());
    }
    let cmp = OracleComparison {
        params,
        grid_points: grid.n(),
        blocks,
        max_relative,
        printed_spanwise_cosine_max: printed,
    };
    cio::write_json(&out.join("oracle_comparison.json"), &cmp)?;
    cio::write_check_outputs(out, &report)?;
    let [_, u2, u3] = u.components();
    cio::write_slice_csv(&out.join("velocity_slice.csv"), &["u2", "u3"], &[u2, u3])?;

    print_report(&report);
    for b in &cmp.blocks {
        println!("oracle {:<14} max |diff| {:e}  (scale {:e})", b.block, b.max_abs_difference, b.max_abs_reference);
    }
    println!("typeset spanwise cosine tendencies differ by up to {printed:e}");
    Ok(max_relative < ORACLE_TOL)
}

#[derive(Serialize)]
struct ModeTable {
    params: FlowParams,
    grid_points: usize,
    modes: Vec<modes::ModeSummary>,
    selected: usize,
    amplitude: f64,
    include_base: bool,
}

fn cmd_oss(a: OssArgs) -> Result<bool> {
    let params = a.params.params()?;
    let out = &a.common.out;
    std::fs::create_dir_all(out)?;
    let found = modes::solve_orr_sommerfeld(&params, a.common.n)?;
    let Some(mode) = found.get(a.mode) else {
        anyhow::bail!("mode index {} out of range ({} resolved modes)", a.mode, found.len());
    };
    let table = ModeTable {
        params,
        grid_points: a.common.n,
        modes: found.iter().enumerate().map(modes::ModeSummary::from).collect(),
        selected: a.mode,
        amplitude: a.amplitude,
        include_base: !a.no_base,
    };
    cio::write_json(&out.join("modes.json"), &table)?;
    let u = modes::mode_to_field(mode, a.amplitude, !a.no_base)?;
    FieldFile::from_field(&u).write(&out.join("mode_field.json"))?;
    println!("{:>5}  {:>22}  {:>22}", "index", "growth rate", "frequency");
    for m in &table.modes {
        println!("{:>5}  {:>22e}  {:>22e}", m.index, m.growth_rate, m.frequency);
    }
    Ok(true)
}

fn cmd_find(a: FindArgs) -> Result<bool> {
    let params = a.params.params()?;
    let out = &a.common.out;
    std::fs::create_dir_all(out)?;
    let grid = build_grid(a.common.n)?;
    let spec = AnsatzSpec::new(a.degree, params);
    let seed = if a.published {
        anyhow::ensure!(a.degree == 4, "the published coefficients have degree 4");
        SearchSeed::Coeffs(AnsatzCoeffs::published())
    } else {
        SearchSeed::Random(a.seed)
    };
    let options = SearchOptions {
        max_iterations: a.max_iter,
        max_restarts: a.restarts,
        tolerance: a.tol,
        ..SearchOptions::default()
    };
    let outcome = search::find_compatible(&spec, &seed, &options, &grid)?;
    cio::write_json(&out.join("search.json"), &outcome)?;
    let u = search::assemble(&spec, &outcome.coeffs, &grid)?;
    FieldFile::from_field(&u).write(&out.join("found_field.json"))?;
    let report = compat::check(&u, &params, &grid, a.tol)?;
    cio::write_check_outputs(out, &report)?;
    println!(
        "success {}  trivial {}  attempts {}  iterations {}  wall-normal share {:e}",
        outcome.success, outcome.trivial, outcome.attempts, outcome.iterations, outcome.wall_normal_ratio
    );
    print_report(&report);
    Ok(outcome.success)
}

fn cmd_validate(a: ValidateArgs) -> Result<bool> {
    let file = read_field(&a.field)?;
    let grid = build_grid(a.n)?;
    let u = file.to_field(&grid)?;
    let adm = compat::admissibility(&u);
    println!("relative divergence   {:e}", adm.relative_divergence);
    println!("max wall velocity     {:e}", adm.max_wall_velocity);
    println!("periodic              by construction");
    if adm.passed() {
        println!("admissible");
    } else {
        for v in &adm.violations {
            println!("violation: {v}");
        }
    }
    Ok(adm.passed())
}
