//! Command-line driver: reproduces the solver experiments and writes
//! machine-readable results.
//!
//! Subcommands: `one-level`, `two-level`, `cavity`, `convergence`,
//! `scaling`. Field samples and profiles go to CSV, run statistics to
//! `stats.json`. Exit codes: 0 success, 1 solver failure (statistics are
//! still written), 2 usage error.

use crate::assembly::{BoundarySpec, FeSpace};
use crate::field::DiscreteField;
use crate::mesh::build_uniform;
use crate::problems::{
    error_norms, manufactured_f, sample_field, velocity_profile, ErrorReport,
    ManufacturedProblem, ProfileLine,
};
use crate::solvers::{
    scaling_h_for_h_coarse, solve_one_level, solve_two_level, ElementKind, InitialGuess,
    NewtonConfig, SolveStats, TwoLevelConfig, TwoLevelFailure,
};
use crate::sparse::{Preconditioner, SolverConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "streamfn", version, about = "Stream-function Navier-Stokes solver")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Newton's method on a single mesh.
    OneLevel(OneLevelArgs),
    /// Nonlinear coarse solve plus one linearized fine solve.
    TwoLevel(TwoLevelArgs),
    /// Lid-driven cavity benchmark.
    Cavity(CavityArgs),
    /// Error tables over mesh sizes or Reynolds numbers.
    Convergence(ConvergenceArgs),
    /// Recommended fine widths for each element family.
    Scaling(ScalingArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Reynolds number.
    #[arg(long, default_value_t = 10.0)]
    re: f64,
    /// Newton tolerance (residual and step norm).
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// BiCGSTAB relative residual target.
    #[arg(long = "lin-tol", default_value_t = 1e-8)]
    lin_tol: f64,
    #[arg(long, value_enum, default_value_t = PrecondArg::Jacobi)]
    precond: PrecondArg,
    /// Assembly quadrature points per axis.
    #[arg(long, default_value_t = 4)]
    quad: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated Reynolds ramp ending at --re.
    #[arg(long)]
    continuation: Option<String>,
    /// Newton starting iterate.
    #[arg(long, value_enum, default_value_t = GuessArg::Stokes)]
    guess: GuessArg,
    /// Field sampling resolution per axis.
    #[arg(long, default_value_t = 65)]
    resolution: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecondArg {
    None,
    Jacobi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GuessArg {
    Stokes,
    Zero,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ForceArg {
    /// Body force of the manufactured solution.
    Manufactured,
    /// Zero body force.
    Zero,
}

#[derive(Args)]
struct OneLevelArgs {
    /// Elements per axis.
    #[arg(long)]
    nx: usize,
    #[arg(long, value_enum, default_value_t = ForceArg::Manufactured)]
    f: ForceArg,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TwoLevelArgs {
    /// Coarse elements per axis; fine defaults to 2x.
    #[arg(long)]
    nh: usize,
    /// Explicit fine element count (must nest the coarse mesh).
    #[arg(long = "fine-nx")]
    fine_nx: Option<usize>,
    /// Run the fine level on the coarse mesh itself.
    #[arg(long = "fine-equals-coarse", default_value_t = false)]
    fine_equals_coarse: bool,
    #[arg(long, value_enum, default_value_t = ForceArg::Manufactured)]
    f: ForceArg,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CavityArgs {
    /// Coarse elements per axis; fine is 2x unless --one-level.
    #[arg(long, default_value_t = 16)]
    nh: usize,
    /// Solve on the coarse mesh alone with Newton.
    #[arg(long = "one-level", default_value_t = false)]
    one_level: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Comma-separated mesh sizes (elements per axis).
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated Reynolds numbers swept at fixed mesh.
    #[arg(long = "re-sweep")]
    re_sweep: Option<String>,
    /// Coarse elements per axis for sweep mode.
    #[arg(long, default_value_t = 16)]
    nh: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    OneLevel,
    TwoLevel,
}

#[derive(Args)]
struct ScalingArgs {
    /// Comma-separated coarse widths H in (0, 1).
    #[arg(long, default_value = "0.25,0.125,0.0625")]
    hs: String,
}

/// Serialized per-run statistics (`stats.json`).
#[derive(Serialize)]
struct RunStats {
    method: String,
    re: f64,
    coarse_h: f64,
    fine_h: Option<f64>,
    newton_iters: usize,
    fine_newton_iters: usize,
    bicgstab_iters_coarse: Vec<usize>,
    bicgstab_iters_fine: Vec<usize>,
    residual: f64,
    errors: Option<ErrorReport>,
    free_dofs: Vec<usize>,
    wall_seconds: f64,
    converged: bool,
}

const EXIT_OK: i32 = 0;
const EXIT_SOLVER: i32 = 1;
const EXIT_USAGE: i32 = 2;

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap reserves code 2 for usage errors; help/version exit 0
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::OneLevel(args) => cmd_one_level(args),
        Command::TwoLevel(args) => cmd_two_level(args),
        Command::Cavity(args) => cmd_cavity(args),
        Command::Convergence(args) => cmd_convergence(args),
        Command::Scaling(args) => cmd_scaling(args),
    }
}

fn validate_common(c: &CommonArgs) -> Result<(), String> {
    if !(c.re > 0.0) {
        return Err(format!("--re must be positive, got {}", c.re));
    }
    if !(c.tol > 0.0) || !(c.lin_tol > 0.0) {
        return Err("tolerances must be positive".into());
    }
    if c.quad == 0 || c.quad > 10 {
        return Err(format!("--quad must be in 1..=10, got {}", c.quad));
    }
    if c.resolution < 2 {
        return Err("--resolution must be at least 2".into());
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("bad {what} entry '{s}'")))
        .collect()
}

fn newton_config(c: &CommonArgs) -> Result<NewtonConfig, String> {
    let continuation = match &c.continuation {
        None => None,
        Some(text) => {
            let ramp: Vec<f64> = parse_list(text, "--continuation")?;
            if ramp.windows(2).any(|w| w[0] >= w[1]) {
                return Err("--continuation must be strictly increasing".into());
            }
            if ramp.last() != Some(&c.re) {
                return Err("--continuation must end at --re".into());
            }
            Some(ramp)
        }
    };
    Ok(NewtonConfig {
        tol: c.tol,
        initial_guess: match c.guess {
            GuessArg::Stokes => InitialGuess::Stokes,
            GuessArg::Zero => InitialGuess::Zero,
        },
        continuation,
        ..Default::default()
    })
}

fn linear_config(c: &CommonArgs) -> SolverConfig {
    SolverConfig {
        rel_tol: c.lin_tol,
        preconditioner: match c.precond {
            PrecondArg::None => Preconditioner::None,
            PrecondArg::Jacobi => Preconditioner::Jacobi,
        },
        ..Default::default()
    }
}

fn write_stats(dir: &Path, stats: &RunStats) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    let path = dir.join("stats.json");
    let body = serde_json::to_string_pretty(stats).map_err(|e| e.to_string())?;
    fs::write(&path, body + "\n").map_err(|e| format!("writing {}: {e}", path.display()))
}

fn write_field_csv(dir: &Path, field: &DiscreteField, resolution: usize) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let samples = sample_field(field, resolution).map_err(|e| e.to_string())?;
    let mut body = String::from("x,y,psi,u,v\n");
    for s in &samples {
        body.push_str(&format!("{},{},{},{},{}\n", s.x, s.y, s.psi, s.u, s.v));
    }
    fs::write(dir.join("field.csv"), body).map_err(|e| e.to_string())
}

fn write_profiles(dir: &Path, field: &DiscreteField, samples: usize) -> Result<(), String> {
    let u = velocity_profile(field, ProfileLine::Vertical(0.5), samples)
        .map_err(|e| e.to_string())?;
    let mut body = String::from("y,u\n");
    for (y, val) in &u {
        body.push_str(&format!("{y},{val}\n"));
    }
    fs::write(dir.join("profile_u.csv"), body).map_err(|e| e.to_string())?;

    let v = velocity_profile(field, ProfileLine::Horizontal(0.5), samples)
        .map_err(|e| e.to_string())?;
    let mut body = String::from("x,v\n");
    for (x, val) in &v {
        body.push_str(&format!("{x},{val}\n"));
    }
    fs::write(dir.join("profile_v.csv"), body).map_err(|e| e.to_string())
}

fn manufactured_errors(field: &DiscreteField, re: f64) -> Option<ErrorReport> {
    error_norms(field, &ManufacturedProblem::new(re), 6).ok()
}

fn cmd_one_level(args: OneLevelArgs) -> Result<i32, String> {
    validate_common(&args.common)?;
    if args.nx == 0 {
        return Err("--nx must be at least 1".into());
    }
    let c = &args.common;
    let mesh = build_uniform(args.nx, args.nx).map_err(|e| e.to_string())?;
    let mut space = FeSpace::with_quad(mesh, c.quad);
    space.apply_bc(BoundarySpec::ClampedHomogeneous);
    let newton = newton_config(c)?;
    let linear = linear_config(c);

    let force: Box<dyn Fn(f64, f64) -> (f64, f64)> = match args.f {
        ForceArg::Manufactured => Box::new(manufactured_f(c.re)),
        ForceArg::Zero => Box::new(|_, _| (0.0, 0.0)),
    };

    let h = space.mesh.width();
    match solve_one_level(&space, c.re, &force, &newton, &linear) {
        Ok((psi, stats)) => {
            let field = DiscreteField::new(space.mesh.clone(), psi);
            let errors = match args.f {
                ForceArg::Manufactured => manufactured_errors(&field, c.re),
                ForceArg::Zero => None,
            };
            let run = run_stats("one-level", c.re, h, None, &stats, errors, true);
            write_stats(&c.out, &run)?;
            write_field_csv(&c.out, &field, c.resolution)?;
            Ok(EXIT_OK)
        }
        Err(failure) => {
            eprintln!("one-level solve failed: {failure}");
            let run = run_stats("one-level", c.re, h, None, &failure.stats, None, false);
            write_stats(&c.out, &run)?;
            Ok(EXIT_SOLVER)
        }
    }
}

fn two_level_config(nh: usize, fine_nx: Option<usize>, fine_equals_coarse: bool, c: &CommonArgs) -> Result<TwoLevelConfig, String> {
    if nh == 0 {
        return Err("--nh must be at least 1".into());
    }
    let fine = if fine_equals_coarse {
        nh
    } else {
        match fine_nx {
            Some(m) => {
                if m % nh != 0 {
                    return Err(format!("--fine-nx {m} does not nest the coarse mesh {nh}"));
                }
                m
            }
            None => 2 * nh,
        }
    };
    Ok(TwoLevelConfig {
        coarse: (nh, nh),
        fine: (fine, fine),
        quad_order: c.quad,
        newton: newton_config(c)?,
        linear: linear_config(c),
    })
}

fn cmd_two_level(args: TwoLevelArgs) -> Result<i32, String> {
    validate_common(&args.common)?;
    let c = &args.common;
    let cfg = two_level_config(args.nh, args.fine_nx, args.fine_equals_coarse, c)?;
    let force: Box<dyn Fn(f64, f64) -> (f64, f64)> = match args.f {
        ForceArg::Manufactured => Box::new(manufactured_f(c.re)),
        ForceArg::Zero => Box::new(|_, _| (0.0, 0.0)),
    };
    let coarse_h = 1.0 / args.nh as f64;
    let fine_h = 1.0 / cfg.fine.0 as f64;

    match solve_two_level(&cfg, c.re, &force, BoundarySpec::ClampedHomogeneous) {
        Ok(sol) => {
            let errors = match args.f {
                ForceArg::Manufactured => manufactured_errors(&sol.fine, c.re),
                ForceArg::Zero => None,
            };
            let run =
                run_stats("two-level", c.re, coarse_h, Some(fine_h), &sol.stats, errors, true);
            write_stats(&c.out, &run)?;
            write_field_csv(&c.out, &sol.fine, c.resolution)?;
            Ok(EXIT_OK)
        }
        Err(failure) => {
            eprintln!("two-level solve failed: {failure}");
            let stats = match &failure {
                TwoLevelFailure::Coarse(f) => f.stats.clone(),
                TwoLevelFailure::Fine { stats, .. } => stats.clone(),
                TwoLevelFailure::Setup(e) => return Err(e.to_string()),
            };
            let run = run_stats("two-level", c.re, coarse_h, Some(fine_h), &stats, None, false);
            write_stats(&c.out, &run)?;
            Ok(EXIT_SOLVER)
        }
    }
}

fn cmd_cavity(args: CavityArgs) -> Result<i32, String> {
    validate_common(&args.common)?;
    if args.nh == 0 {
        return Err("--nh must be at least 1".into());
    }
    let c = &args.common;
    let bc = BoundarySpec::LidDriven { lid_speed: 1.0 };
    let force = |_: f64, _: f64| (0.0, 0.0);
    let coarse_h = 1.0 / args.nh as f64;

    let (field, stats, fine_h) = if args.one_level {
        let mesh = build_uniform(args.nh, args.nh).map_err(|e| e.to_string())?;
        let mut space = FeSpace::with_quad(mesh, c.quad);
        space.apply_bc(bc);
        match solve_one_level(&space, c.re, &force, &newton_config(c)?, &linear_config(c)) {
            Ok((psi, stats)) => {
                (DiscreteField::new(space.mesh.clone(), psi), stats, None)
            }
            Err(failure) => {
                eprintln!("cavity solve failed: {failure}");
                let run = run_stats("cavity-one-level", c.re, coarse_h, None, &failure.stats, None, false);
                write_stats(&c.out, &run)?;
                return Ok(EXIT_SOLVER);
            }
        }
    } else {
        let cfg = two_level_config(args.nh, None, false, c)?;
        let fine_h = 1.0 / cfg.fine.0 as f64;
        match solve_two_level(&cfg, c.re, &force, bc) {
            Ok(sol) => (sol.fine, sol.stats, Some(fine_h)),
            Err(failure) => {
                eprintln!("cavity solve failed: {failure}");
                let stats = match &failure {
                    TwoLevelFailure::Coarse(f) => f.stats.clone(),
                    TwoLevelFailure::Fine { stats, .. } => stats.clone(),
                    TwoLevelFailure::Setup(e) => return Err(e.to_string()),
                };
                let run = run_stats("cavity", c.re, coarse_h, Some(fine_h), &stats, None, false);
                write_stats(&c.out, &run)?;
                return Ok(EXIT_SOLVER);
            }
        }
    };

    let method = if args.one_level { "cavity-one-level" } else { "cavity" };
    let run = run_stats(method, c.re, coarse_h, fine_h, &stats, None, true);
    write_stats(&c.out, &run)?;
    write_field_csv(&c.out, &field, c.resolution)?;
    write_profiles(&c.out, &field, c.resolution)?;
    Ok(EXIT_OK)
}

fn cmd_convergence(args: ConvergenceArgs) -> Result<i32, String> {
    validate_common(&args.common)?;
    let c = &args.common;
    match (&args.sizes, &args.re_sweep) {
        (Some(_), Some(_)) | (None, None) => {
            Err("pass exactly one of --sizes or --re-sweep".into())
        }
        (Some(sizes), None) => {
            let sizes: Vec<usize> = parse_list(sizes, "--sizes")?;
            if sizes.iter().any(|&n| n == 0) {
                return Err("mesh sizes must be positive".into());
            }
            convergence_over_sizes(&sizes, args.mode, c)
        }
        (None, Some(sweep)) => {
            let res: Vec<f64> = parse_list(sweep, "--re-sweep")?;
            if res.iter().any(|&r| r <= 0.0) {
                return Err("Reynolds numbers must be positive".into());
            }
            convergence_over_reynolds(&res, args.mode, args.nh, c)
        }
    }
}

struct TableRow {
    label: f64,
    newton_iters: usize,
    bicgstab: String,
    errors: ErrorReport,
    wall_seconds: f64,
}

fn iters_field(stats: &SolveStats) -> String {
    let mut parts: Vec<String> =
        stats.bicgstab_iters_coarse.iter().map(|n| n.to_string()).collect();
    parts.extend(stats.bicgstab_iters_fine.iter().map(|n| n.to_string()));
    parts.join(";")
}

fn convergence_over_sizes(sizes: &[usize], mode: ModeArg, c: &CommonArgs) -> Result<i32, String> {
    let mut rows = Vec::new();
    for &n in sizes {
        let force = manufactured_f(c.re);
        let (field, stats, h) = match mode {
            ModeArg::OneLevel => {
                let mesh = build_uniform(n, n).map_err(|e| e.to_string())?;
                let mut space = FeSpace::with_quad(mesh, c.quad);
                space.apply_bc(BoundarySpec::ClampedHomogeneous);
                let (psi, stats) =
                    solve_one_level(&space, c.re, &force, &newton_config(c)?, &linear_config(c))
                        .map_err(|e| format!("size {n}: {e}"))?;
                let h = space.mesh.width();
                (DiscreteField::new(space.mesh.clone(), psi), stats, h)
            }
            ModeArg::TwoLevel => {
                let cfg = two_level_config(n, None, false, c)?;
                let sol = solve_two_level(&cfg, c.re, &force, BoundarySpec::ClampedHomogeneous)
                    .map_err(|e| format!("size {n}: {e}"))?;
                let h = sol.fine.mesh.width();
                (sol.fine, sol.stats, h)
            }
        };
        let errors = manufactured_errors(&field, c.re)
            .ok_or_else(|| "error norms failed".to_string())?;
        rows.push(TableRow {
            label: h,
            newton_iters: stats.newton_iters,
            bicgstab: iters_field(&stats),
            errors,
            wall_seconds: stats.wall_seconds,
        });
    }

    fs::create_dir_all(&c.out).map_err(|e| e.to_string())?;
    let mut body = String::from("h,newton_iters,bicgstab_iters,l2,h1,h2,wall_seconds\n");
    for r in &rows {
        body.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.label, r.newton_iters, r.bicgstab, r.errors.l2, r.errors.h1, r.errors.h2, r.wall_seconds
        ));
    }
    fs::write(c.out.join("table.csv"), body).map_err(|e| e.to_string())?;

    // observed rates between consecutive rows
    let mut rates = String::from("h_from,h_to,rate_l2,rate_h1,rate_h2\n");
    for w in rows.windows(2) {
        let ratio = (w[0].label / w[1].label).ln();
        let rate = |a: f64, b: f64| (a / b).ln() / ratio;
        rates.push_str(&format!(
            "{},{},{},{},{}\n",
            w[0].label,
            w[1].label,
            rate(w[0].errors.l2, w[1].errors.l2),
            rate(w[0].errors.h1, w[1].errors.h1),
            rate(w[0].errors.h2, w[1].errors.h2),
        ));
    }
    fs::write(c.out.join("rates.csv"), rates).map_err(|e| e.to_string())?;
    print!("{}", render_table(&rows, "h"));
    Ok(EXIT_OK)
}

fn convergence_over_reynolds(
    res: &[f64],
    mode: ModeArg,
    nh: usize,
    c: &CommonArgs,
) -> Result<i32, String> {
    let mut rows = Vec::new();
    for &re in res {
        let force = manufactured_f(re);
        let (field, stats) = match mode {
            ModeArg::OneLevel => {
                let mesh = build_uniform(nh, nh).map_err(|e| e.to_string())?;
                let mut space = FeSpace::with_quad(mesh, c.quad);
                space.apply_bc(BoundarySpec::ClampedHomogeneous);
                let (psi, stats) =
                    solve_one_level(&space, re, &force, &newton_config(c)?, &linear_config(c))
                        .map_err(|e| format!("Re {re}: {e}"))?;
                (DiscreteField::new(space.mesh.clone(), psi), stats)
            }
            ModeArg::TwoLevel => {
                let cfg = two_level_config(nh, None, false, c)?;
                let sol = solve_two_level(&cfg, re, &force, BoundarySpec::ClampedHomogeneous)
                    .map_err(|e| format!("Re {re}: {e}"))?;
                (sol.fine, sol.stats)
            }
        };
        let errors =
            manufactured_errors(&field, re).ok_or_else(|| "error norms failed".to_string())?;
        rows.push(TableRow {
            label: re,
            newton_iters: stats.newton_iters,
            bicgstab: iters_field(&stats),
            errors,
            wall_seconds: stats.wall_seconds,
        });
    }

    fs::create_dir_all(&c.out).map_err(|e| e.to_string())?;
    let mut body = String::from("re,newton_iters,bicgstab_iters,l2,h1,h2,wall_seconds\n");
    for r in &rows {
        body.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.label, r.newton_iters, r.bicgstab, r.errors.l2, r.errors.h1, r.errors.h2, r.wall_seconds
        ));
    }
    fs::write(c.out.join("table.csv"), body).map_err(|e| e.to_string())?;
    print!("{}", render_table(&rows, "re"));
    Ok(EXIT_OK)
}

fn render_table(rows: &[TableRow], label: &str) -> String {
    let mut out = format!(
        "{label:>10}  {:>6}  {:>20}  {:>12}  {:>12}  {:>12}  {:>8}\n",
        "newton", "bicgstab", "l2", "h1", "h2", "wall[s]"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>10.6}  {:>6}  {:>20}  {:>12.5e}  {:>12.5e}  {:>12.5e}  {:>8.2}\n",
            r.label, r.newton_iters, r.bicgstab, r.errors.l2, r.errors.h1, r.errors.h2, r.wall_seconds
        ));
    }
    out
}

fn cmd_scaling(args: ScalingArgs) -> Result<i32, String> {
    let hs: Vec<f64> = parse_list(&args.hs, "--hs")?;
    for &h in &hs {
        if !(h > 0.0 && h < 1.0) {
            return Err(format!("coarse width {h} outside (0, 1)"));
        }
    }
    println!("{:<20} {:>10} {:>12} {:>14}", "element", "exponent", "H", "h");
    for kind in ElementKind::ALL {
        for &h_coarse in &hs {
            let h = scaling_h_for_h_coarse(kind, h_coarse).map_err(|e| e.to_string())?;
            println!(
                "{:<20} {:>10} {:>12.6} {:>14.10}",
                kind.name(),
                format!("{}/2", (2.0 * kind.scaling_exponent()) as i64),
                h_coarse,
                h
            );
        }
    }
    Ok(EXIT_OK)
}

fn run_stats(
    method: &str,
    re: f64,
    coarse_h: f64,
    fine_h: Option<f64>,
    stats: &SolveStats,
    errors: Option<ErrorReport>,
    converged: bool,
) -> RunStats {
    RunStats {
        method: method.to_string(),
        re,
        coarse_h,
        fine_h,
        newton_iters: stats.newton_iters,
        fine_newton_iters: stats.fine_newton_iters,
        bicgstab_iters_coarse: stats.bicgstab_iters_coarse.clone(),
        bicgstab_iters_fine: stats.bicgstab_iters_fine.clone(),
        residual: stats.residual,
        errors,
        free_dofs: stats.free_dofs.clone(),
        wall_seconds: stats.wall_seconds,
        converged,
    }
}
