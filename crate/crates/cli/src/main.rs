use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nslab::data::DataSpec;
use nslab::duhamel::{load_trajectory, picard_ladder, save_trajectory, SolutionMode, Trajectory};
use nslab::lab::{
    exponent, exponent_schedule, fit_rate, heat_tail_check_with, picard_local_bounds, run_separation_experiment,
    write_norm_rows, write_report, ExperimentConfig, NormRow, DEFAULT_RESOLUTION,
};
use nslab::norms::{kato_norm, lebesgue_norm, lorentz_norm, mixed_norm, KatoSpec, LorentzSpec, MixedNormSpec};
use nslab::solver::{evolve, evolve_mild};
use nslab::spectral::{load_snapshot, oseen_kernel, save_snapshot, Ball, Grid3, Region, VectorField};
use nslab::{LabError, Result};

#[derive(Parser)]
#[command(name = "nslab", version, about = "Pseudo-spectral Navier-Stokes laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an initial datum as a PSLF snapshot, from a config or from flags.
    Gen(GenArgs),
    /// Evolve the Navier-Stokes equations and save the trajectory.
    Evolve(RunArgs),
    /// Build the Picard ladder P_0..P_kmax and save each iterate.
    Picard(RunArgs),
    /// Evaluate norms of a snapshot or trajectory; CSV on stdout.
    Norms(NormArgs),
    /// Print the exponent schedule a_0..a_k0.
    Schedule {
        #[arg(long)]
        gamma: f64,
        /// Integrability exponent; `inf` allowed.
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run the separation-rate experiment and write report.json, samples.csv, fits.csv.
    Rates {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagnostics: heat tail, local Picard bounds, Oseen kernel.
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Zero,
    TaylorGreen,
    SolenoidalBump,
    WeakL3Profile,
}

#[derive(Args)]
struct GenArgs {
    /// Take grid and data from a config file.
    #[arg(long, conflicts_with = "kind", required_unless_present = "kind")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Generator>,
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Box side; defaults to 2π.
    #[arg(long = "L")]
    box_length: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// Support radius of the bump.
    #[arg(long)]
    radius: Option<f64>,
    /// Mollification scale of the weak-L3 profile.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Defaults to `<output.dir>/u0.pslf` with a config, `u0.pslf` otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Initial datum; generated from the config when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Lebesgue,
    Lorentz,
    Kato,
    Mixed,
}

#[derive(Args)]
struct NormArgs {
    /// A PSLF snapshot.
    #[arg(long, conflicts_with = "trajectory", required_unless_present = "trajectory")]
    snapshot: Option<PathBuf>,
    /// A trajectory manifest.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: NormKind,
    #[arg(long, value_parser = parse_exponent)]
    p: Option<f64>,
    #[arg(long, value_parser = parse_exponent)]
    q: Option<f64>,
    #[arg(long, value_parser = parse_exponent)]
    r: Option<f64>,
    /// Horizon T for Kato and mixed norms; defaults to the trajectory horizon.
    #[arg(long = "horizon")]
    horizon: Option<f64>,
    /// Restrict to a ball of this radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Ball centre `x,y,z`; defaults to the box centre.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    center: Option<Vec<f64>>,
    /// Node used for spatial norms of a trajectory; defaults to the last.
    #[arg(long)]
    node: Option<usize>,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// N(t) against e^{-(R-r)^2/(4t)} on a logarithmic time sweep.
    Tail {
        #[arg(long = "R")]
        big_r: f64,
        #[arg(long = "r")]
        r: f64,
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 13)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Local L^q bounds of the Picard iterates on a ball inside the measurement ball.
    Local {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 6.0)]
        q: f64,
        /// Radius of the inner ball as a fraction of the measurement ball.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
    },
    /// |K(x,t)| (|x| + sqrt t)^3 and the centre value over a time sweep.
    Oseen {
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 0.02)]
        t_min: f64,
        #[arg(long, default_value_t = 0.2)]
        t_max: f64,
        #[arg(long, default_value_t = 6)]
        count: usize,
    },
}

fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    exponent::parse(s).ok_or_else(|| format!("not an exponent: {s}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &LabError) -> u8 {
    match e {
        LabError::Stability { .. } => 3,
        LabError::Degenerate(_) => 4,
        _ => 2,
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Gen(args) => {
            let (u0, default_path) = generate(&args)?;
            let path = args.out.unwrap_or(default_path);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            save_snapshot(&path, &u0, 0.0)?;
            println!("{}", path.display());
        }
        Command::Evolve(args) => {
            let (cfg, u0) = load_run(&args)?;
            let (t, m) = (cfg.time.horizon, cfg.time.steps);
            let u = match cfg.solution.scheme {
                SolutionMode::Rk4 => evolve(&u0, t, m)?,
                _ => evolve_mild(&u0, t, m)?,
            };
            let path = save_trajectory(&u.with_label("u"), out_dir(&cfg, &args.out), "u")?;
            println!("{}", path.display());
        }
        Command::Picard(args) => {
            let (cfg, u0) = load_run(&args)?;
            let ladder = picard_ladder(&u0, cfg.ladder.k_max, cfg.time.horizon, cfg.time.steps)?;
            let dir = out_dir(&cfg, &args.out);
            for (k, p) in ladder.into_iter().enumerate() {
                let stem = format!("P{k}");
                let path = save_trajectory(&p.with_label(stem.clone()), &dir, &stem)?;
                println!("{}", path.display());
            }
        }
        Command::Norms(args) => {
            let rows = norms(&args)?;
            write_norm_rows(&rows, io::stdout().lock())?;
        }
        Command::Schedule { gamma, p, sigma, json } => {
            let s = exponent_schedule(gamma, p, sigma).map_err(as_config)?;
            let mut out = io::stdout().lock();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&s)?)?;
            } else {
                writeln!(out, "gamma {}  p {}  sigma {}  step {}  k0 {}", s.gamma, fmt_exp(s.p_exp), s.sigma, s.step, s.k0)?;
                writeln!(out, "k\ta_k")?;
                writeln!(out, "-1\t{}", s.a_minus_one())?;
                for (k, a) in s.a.iter().enumerate() {
                    writeln!(out, "{k}\t{a}")?;
                }
            }
        }
        Command::Rates { config, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(dir) = out {
                cfg.output.dir = dir;
            }
            let report = run_separation_experiment(&cfg)?;
            write_report(&report, &cfg.output.dir)?;
            for s in &report.series {
                match s.fit {
                    Some(f) => println!(
                        "k={} {:<5} slope {:.4} r2 {:.4} a_k {:.4} floor {}",
                        s.k,
                        s.region,
                        f.slope,
                        f.r2,
                        s.scheduled_a_k,
                        if s.meets_floor == Some(true) { "ok" } else { "missed" }
                    ),
                    None => println!("k={} {:<5} degenerate", s.k, s.region),
                }
            }
            let c = &report.checks;
            println!(
                "floors {} monotone {} energy {} degenerate {}",
                c.slopes_meet_floor, c.slopes_non_decreasing, c.energy_floor, c.degenerate
            );
            if c.degenerate {
                eprintln!("error: degenerate fit; report written to {}", cfg.output.dir.display());
                return Ok(ExitCode::from(4));
            }
        }
        Command::Check(c) => check(c)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(args: &GenArgs) -> Result<(VectorField, PathBuf)> {
    if let Some(config) = &args.config {
        let cfg = ExperimentConfig::load(config)?;
        return Ok((cfg.data.generate(cfg.grid()?)?, cfg.output.dir.join("u0.pslf")));
    }
    let grid = Grid3::new(args.n, args.box_length.unwrap_or(std::f64::consts::TAU)).map_err(as_config)?;
    let amplitude = args.amplitude;
    let spec = match args.kind.expect("clap enforces --kind") {
        Generator::Zero => DataSpec::Zero,
        Generator::TaylorGreen => DataSpec::TaylorGreen { amplitude },
        Generator::SolenoidalBump => {
            DataSpec::SolenoidalBump { center: None, radius: need(args.radius, "radius")?, amplitude }
        }
        Generator::WeakL3Profile => DataSpec::WeakL3Profile { epsilon: need(args.epsilon, "epsilon")?, amplitude },
    };
    Ok((spec.generate(grid)?, PathBuf::from("u0.pslf")))
}

fn as_config(e: LabError) -> LabError {
    match e {
        LabError::Domain(m) => LabError::Config(m),
        other => other,
    }
}

fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}

fn load_run(args: &RunArgs) -> Result<(ExperimentConfig, VectorField)> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let grid = cfg.grid()?;
    let u0 = match &args.input {
        Some(path) => {
            let snap = load_snapshot(path)?;
            if snap.field.grid() != &grid {
                return Err(LabError::Config(format!("{} does not match grid.n / grid.L", path.display())));
            }
            snap.field
        }
        None => cfg.data.generate(grid)?,
    };
    Ok((cfg, u0))
}

fn out_dir(cfg: &ExperimentConfig, over: &Option<PathBuf>) -> PathBuf {
    over.clone().unwrap_or_else(|| cfg.output.dir.clone())
}

fn region_for(args: &NormArgs, grid: &Grid3) -> Result<Region> {
    match args.radius {
        None => Ok(Region::Whole),
        Some(radius) => {
            let center = match &args.center {
                Some(c) => [c[0], c[1], c[2]],
                None => grid.center(),
            };
            Ok(Region::Ball(Ball::in_grid(center, radius, grid).map_err(as_config)?))
        }
    }
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| LabError::Config(format!("--{name} is required for this norm")))
}

fn norms(args: &NormArgs) -> Result<Vec<NormRow>> {
    let (field, traj): (Option<VectorField>, Option<Trajectory>) = match (&args.snapshot, &args.trajectory) {
        (Some(path), _) => (Some(load_snapshot(path)?.field), None),
        (None, Some(path)) => (None, Some(load_trajectory(path)?)),
        (None, None) => return Err(LabError::Config("give --snapshot or --trajectory".into())),
    };
    let grid = *field.as_ref().map(|f| f.grid()).unwrap_or_else(|| traj.as_ref().unwrap().grid());
    let region = region_for(args, &grid)?;
    let spatial = || -> Result<VectorField> {
        match (&field, &traj) {
            (Some(f), _) => Ok(f.clone()),
            (None, Some(t)) => {
                let j = args.node.unwrap_or(t.steps());
                if j > t.steps() {
                    return Err(LabError::Config(format!("node {j} beyond M = {}", t.steps())));
                }
                Ok(t.snapshot(j).clone())
            }
            _ => unreachable!(),
        }
    };
    let needs_traj = || -> Result<&Trajectory> {
        traj.as_ref().ok_or_else(|| LabError::Config("this norm needs --trajectory".into()))
    };
    let horizon = |t: &Trajectory| args.horizon.unwrap_or(t.horizon());
    let mut row = NormRow {
        norm_kind: String::new(),
        p: None,
        q: None,
        r: None,
        horizon: None,
        region: region.label(),
        value: 0.0,
    };
    match args.kind {
        NormKind::Lebesgue => {
            let p = need(args.p, "p")?;
            row.norm_kind = "lebesgue".into();
            row.p = Some(p);
            row.value = lebesgue_norm(&spatial()?, p, &region).map_err(as_config)?;
        }
        NormKind::Lorentz => {
            let (p, q) = (need(args.p, "p")?, need(args.q, "q")?);
            let spec = LorentzSpec::new(p, q).map_err(as_config)?;
            row.norm_kind = "lorentz".into();
            row.p = Some(p);
            row.q = Some(q);
            row.value = lorentz_norm(&spatial()?, spec, &region).map_err(as_config)?;
        }
        NormKind::Kato => {
            let t = needs_traj()?;
            let q = need(args.q, "q")?;
            let h = horizon(t);
            row.norm_kind = "kato".into();
            row.q = Some(q);
            row.horizon = Some(h);
            row.region = Region::Whole.label();
            row.value = kato_norm(t, KatoSpec::new(q, h).map_err(as_config)?).map_err(as_config)?;
        }
        NormKind::Mixed => {
            let t = needs_traj()?;
            let q = need(args.q, "q")?;
            let h = horizon(t);
            let spec = match args.r {
                Some(r) => MixedNormSpec::new(r, q, h),
                None => MixedNormSpec::critical_pair(q, h),
            }
            .map_err(as_config)?;
            row.norm_kind = "mixed".into();
            row.q = Some(spec.q);
            row.r = Some(spec.r);
            row.horizon = Some(h);
            row.value = mixed_norm(t, spec, &region).map_err(as_config)?;
        }
    }
    Ok(vec![row])
}

fn log_sweep(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && count >= 1) {
        return Err(LabError::Config(format!("bad time sweep [{lo}, {hi}] x {count}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| lo * (ratio * i as f64).exp()).collect())
}

fn print_csv<T: Serialize>(rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OseenRow {
    t: f64,
    center: f64,
    max_weighted: f64,
}

fn check(cmd: CheckCommand) -> Result<()> {
    match cmd {
        CheckCommand::Tail { big_r, r, t_min, t_max, count, resolution } => {
            let times = log_sweep(t_min, t_max, count)?;
            let rows = heat_tail_check_with(big_r, r, &times, resolution).map_err(as_config)?;
            print_csv(&rows)?;
            let max = rows.iter().map(|s| s.ratio).fold(0.0, f64::max);
            eprintln!("max N/bound {max:.6e}");
        }
        CheckCommand::Local { config, q, fraction } => {
            let cfg = ExperimentConfig::load(&config)?;
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(LabError::Config(format!("fraction must lie in (0, 1], got {fraction}")));
            }
            let ball = cfg.ball()?;
            let inner = ball.with_radius(ball.radius * fraction).map_err(as_config)?;
            let u0 = cfg.data.generate(cfg.grid()?)?;
            let ladder = picard_ladder(&u0, cfg.ladder.k_max, cfg.time.horizon, cfg.time.steps)?;
            let rows = picard_local_bounds(&ladder, &inner, q, cfg.time.horizon).map_err(as_config)?;
            print_csv(&rows)?;
        }
        CheckCommand::Oseen { n, t_min, t_max, count } => {
            let grid = Grid3::periodic_2pi(n).map_err(as_config)?;
            let times = log_sweep(t_min, t_max, count)?;
            let mut rows = Vec::new();
            for &t in &times {
                let k = oseen_kernel(t, grid).map_err(as_config)?;
                rows.push(OseenRow { t, center: k.at_origin(), max_weighted: k.max_weighted() });
            }
            print_csv(&rows)?;
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.center)).collect();
            let fit = fit_rate(&pts)?;
            eprintln!("centre slope {:.4} (r2 {:.6})", fit.slope, fit.r2);
        }
    }
    Ok(())
}
