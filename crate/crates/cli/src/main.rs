//! `vwlab` command-line driver.

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vwlab::config::{schema_summary, Config, StudyModel};
use vwlab::exact::{eval_exact, PeriodicData, PiecewiseSolution};
use vwlab::experiments::{self, Format};
use vwlab::fd_solver::{field_csv, solve, ToyModel};
use vwlab::freq_energy::{
    assemble, gronwall_verify, integrate, levi_check, log_variation_bound, lot_bound_sweep,
    LEVI_SLACK,
};
use vwlab::qsym::{run_suite, SuiteOptions};
use vwlab::{coeffs, Error};

/// Environment variable overriding `output_dir`.
const OUTPUT_ENV: &str = "VWLAB_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "vwlab",
    version,
    about = "Numerical laboratory for wave equations with distributional time-dependent coefficients",
    arg_required_else_help = true
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// TOML configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a config key, e.g. --set grid.nx=1000 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (beats VWLAB_OUTPUT_DIR and output_dir)
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Seed for random sampling [default: config seed, 42]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads [default: logical cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More output (repeatable)
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a regularised coefficient on a time grid as CSV
    Regularise {
        /// Coefficient to regularise: a, c, d or e
        #[arg(long, default_value = "a")]
        which: String,
        #[arg(long)]
        eps: f64,
        /// Number of time steps of the grid
        #[arg(long, default_value_t = 400)]
        nt: usize,
    },
    /// Run the quasi-symmetriser property suite
    QsymCheck {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.3, 0.01])]
        deltas: Vec<f64>,
    },
    /// Check the logarithmic Levi conditions and the lower-order bound
    Levi {
        /// Random vectors per frequency for the lower-order bound
        #[arg(long, default_value_t = 100_000)]
        vectors: usize,
    },
    /// Integrate the frequency system and verify the Gronwall bounds
    Energy {
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        eps: f64,
        /// Time step [default: resolved automatically]
        #[arg(long)]
        dt: Option<f64>,
        /// Write the trace as CSV
        #[arg(long)]
        csv: bool,
    },
    /// Lax–Friedrichs solve of a toy model; writes the final field as CSV
    Solve {
        /// heaviside or delta
        #[arg(long, default_value = "heaviside")]
        model: String,
        #[arg(long)]
        eps: f64,
    },
    /// Write the piecewise exact solution of the Heaviside model as CSV
    Exact {
        #[arg(long, default_value_t = 2.0)]
        t: f64,
    },
    /// Run a study and emit CSV and SVG
    Study {
        /// Overrides study.model
        #[arg(long)]
        model: Option<String>,
        /// Comma-separated metrics to emit [default: all]
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
    },
}

fn command() -> clap::Command {
    let summary = schema_summary();
    Cli::command()
        .after_help(summary.clone())
        .mut_subcommands(|s| s.after_help(summary.clone()))
}

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &cli.global.config {
        if !path.exists() {
            eprintln!("error: config file {} not found\n\n{}", path.display(), schema_summary());
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let usage = matches!(
                e,
                Error::Config(_) | Error::UnknownKey { .. } | Error::Domain(_) | Error::EmptySelection { .. }
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn output_dir(cli: &Cli, cfg: &Config) -> PathBuf {
    cli.global
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| cfg.output_dir.clone())
}

fn write(dir: &Path, name: &str, body: &str) -> vwlab::Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    Ok(path)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: &Cli) -> vwlab::Result<bool> {
    let cfg = Config::load(cli.global.config.as_deref(), &cli.global.set)?;
    if let Some(j) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size thread pool: {e}")))?;
    }
    let seed = cli.global.seed.unwrap_or(cfg.seed);
    let out = output_dir(cli, &cfg);
    if cli.global.verbose > 0 {
        eprintln!("config sha256 {}  seed {seed}  output {}", cfg.hash(), out.display());
    }
    match &cli.cmd {
        Cmd::Regularise { which, eps, nt } => {
            let c = &cfg.coefficient;
            let source = match which.as_str() {
                "a" => &c.a,
                "c" => &c.c,
                "d" => &c.d,
                "e" => &c.e,
                other => return Err(Error::Domain(format!("unknown coefficient '{other}'"))),
            };
            let net = if which == "d" { cfg.damping_scale.net()? } else { cfg.scale.net()? };
            let dist = source.distribution(c.horizon)?;
            let reg = coeffs::regularise(&dist, &cfg.mollifier()?, *eps, net)?;
            println!("t,value");
            let n = (*nt).max(1);
            for i in 0..=n {
                let t = c.horizon * i as f64 / n as f64;
                println!("{t},{}", reg.eval(t));
            }
            Ok(true)
        }
        Cmd::QsymCheck { m, trials, deltas } => {
            let report = run_suite(&SuiteOptions {
                m: *m,
                trials: *trials,
                deltas: deltas.clone(),
                seed,
                ..SuiteOptions::default()
            })?;
            println!("{report}");
            println!("{}", verdict(report.pass()));
            Ok(report.pass())
        }
        Cmd::Levi { vectors } => {
            let spec = cfg.equation()?;
            let reg = cfg.regularisation()?;
            let opts = cfg.levi_options()?;
            let report = levi_check(&spec, &reg, &cfg.study.eps, &opts)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pass = report.pass();
            println!("eps,C1_eps/ln^2,C2_eps/ln^2,C_eps,lot_ratio,levi,lot");
            for row in &report.rows {
                let worst = lot_bound_sweep(
                    &spec,
                    &reg,
                    row.eps,
                    &opts.xi_grid,
                    &opts.t_grid,
                    *vectors,
                    &mut rng,
                )?;
                let lot_ok = worst <= row.c_eps * (1.0 + LEVI_SLACK);
                pass &= lot_ok;
                println!(
                    "{},{},{},{},{},{},{}",
                    row.eps,
                    row.ratio_lower,
                    row.ratio_damping,
                    row.c_eps,
                    worst,
                    verdict(row.pass),
                    verdict(lot_ok)
                );
                if let Some(v) = &row.violation {
                    println!("  violation: {v}");
                }
            }
            println!("{}", verdict(pass));
            Ok(pass)
        }
        Cmd::Energy { xi, eps, dt, csv } => {
            let spec = cfg.equation()?.with_data(
                vwlab::freq_energy::fixed_data(|_| 1.0.into()),
                vwlab::freq_energy::fixed_data(|_| 0.0.into()),
            );
            let reg = cfg.regularisation()?;
            let sys = assemble(&spec, *eps, &reg, &[*xi])?;
            let k = cfg.study.k;
            let delta = sys.bracket.powf(-k / (k + 2.0));
            let mut opts = cfg.levi_options()?;
            opts.xi_grid = vec![vec![*xi]];
            opts.r = xi.abs().max(f64::MIN_POSITIVE);
            let ceps = levi_check(&spec, &reg, &[*eps], &opts)?.rows[0].c_eps;
            let keps = log_variation_bound(&sys, delta, 20_000);
            let trace = integrate(&sys, dt.unwrap_or_else(|| sys.resolved_dt()), delta)?;
            let rep = gronwall_verify(&trace, keps, 1.0, ceps);
            println!("xi = {xi}, eps = {eps}, delta = {delta}, C_eps = {ceps}, K_eps = {keps}");
            println!("steps                 {}", trace.times.len() - 1);
            println!("E(0), E(T)            {}, {}", trace.energy[0], trace.energy.last().unwrap());
            println!("int K                 {}", rep.k_integral);
            println!("pointwise excess      {}", rep.pointwise_excess);
            println!("integrated excess     {}", rep.integrated_excess);
            println!("rhs excess            {}", rep.rhs_excess);
            if *csv {
                let mut body = String::from("t,E,K,abs_V\n");
                for i in 0..trace.times.len() {
                    body.push_str(&format!(
                        "{},{},{},{}\n",
                        trace.times[i],
                        trace.energy[i],
                        trace.k_rate[i],
                        trace.v[i].norm()
                    ));
                }
                let p = write(&out, &format!("energy_xi{xi}_eps{eps}.csv"), &body)?;
                println!("wrote {}", p.display());
            }
            println!("{}", verdict(rep.pass));
            Ok(rep.pass)
        }
        Cmd::Solve { model, eps } => {
            let toy = match model.as_str() {
                "heaviside" => ToyModel::Heaviside,
                "delta" => ToyModel::Delta,
                other => return Err(Error::Domain(format!("unknown model '{other}' (heaviside | delta)"))),
            };
            let data = PeriodicData::standard();
            let o = solve(
                cfg.grid()?,
                &toy,
                &cfg.mollifier()?,
                *eps,
                &data,
                cfg.window.t0,
                cfg.window.t1,
                &[],
            )?;
            let p = write(&out, &format!("solve_{model}_eps{eps}.csv"), &field_csv(&o.field))?;
            println!("{} steps, wrote {}", o.steps.len(), p.display());
            Ok(true)
        }
        Cmd::Exact { t } => {
            if *t < 0.0 {
                return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
            }
            let g = cfg.grid()?;
            let sol = PiecewiseSolution::new(PeriodicData::standard());
            let mut body = String::from("x,u\n");
            for j in 0..g.nx {
                body.push_str(&format!("{},{}\n", g.x(j), eval_exact(&sol, *t, g.x(j))));
            }
            let p = write(&out, &format!("exact_t{t}.csv"), &body)?;
            println!("wrote {}", p.display());
            Ok(true)
        }
        Cmd::Study { model, metrics } => {
            let mut cfg = cfg.clone();
            if let Some(m) = model {
                cfg.study.model = m.clone();
            }
            let mut exp = cfg.experiment()?;
            exp.output_dir = out.clone();
            let result = match cfg.study_model()? {
                StudyModel::Heaviside => experiments::convergence_study(&exp)?,
                StudyModel::Delta => experiments::delta_ratio_study(&exp)?,
                StudyModel::Consistency => experiments::consistency_study(&exp)?,
                StudyModel::Moderateness(case) => experiments::moderateness_study(&exp, case)?,
            };
            let files = experiments::emit(&result, &out, &[Format::Csv, Format::Svg], metrics.as_deref())?;
            print!("{}", experiments::to_csv(&result));
            let mut pass = true;
            for c in experiments::trends(&result) {
                pass &= c.pass;
                println!("{} {}: {}", verdict(c.pass), c.name, c.detail);
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(pass)
        }
    }
}
